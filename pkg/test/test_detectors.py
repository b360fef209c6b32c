import numpy as np
import pytest

from entdiss.channels import ChannelSpec, Noise, apply
from entdiss.detectors import (
    Verdict,
    cuts_of_shape,
    ghz_global_npt_threshold,
    negativity,
    npt_all_cuts,
    npt_min_over_cuts,
    npt_threshold,
    pt_min_eigenvalue,
    witness_check,
)
from entdiss.linalg import QOperator, ket, partial_transpose, projector
from entdiss.partitions import Partition
from entdiss.states import cluster4, ghz, max_mixed, parse_state, upb3, w
from entdiss.tables import NEVER, REFERENCE
from entdiss.util import UserError

from .fixtures import bell, full


def test_ghz_global_oracle():
    # smallest PT eigenvalue of GHZ under global noise: (1 - q)/2^n - q/2
    for n in (3, 4):
        for q in (0.1, 0.3, 0.7):
            lam = pt_min_eigenvalue(ghz(n), Noise.GLOBAL, cuts_of_shape(n, (1, n - 1))[0], q)
            assert abs(lam - ((1 - q) / 2**n - q / 2)) < 1e-12


@pytest.mark.parametrize("n", [3, 4])
def test_ghz_global_threshold(n: int):
    r = npt_threshold(ghz(n), Noise.GLOBAL, cuts_of_shape(n, (1, n - 1))[0])
    assert r.q_threshold is not None
    assert abs(r.q_threshold - ghz_global_npt_threshold(n)) < 1e-4
    assert ghz_global_npt_threshold(3) == 0.2


@full
def test_ghz_global_threshold_six():
    for sizes in ((1, 5), (3, 3)):
        r = npt_min_over_cuts(ghz(6), Noise.GLOBAL, sizes)
        assert r.q_threshold is not None
        assert abs(r.q_threshold - 1 / 33) < 1e-4


def test_threshold_is_monotone():
    r = npt_threshold(w(3), Noise.LOCAL, Partition.parse("A|BC"))
    assert r.q_threshold is not None
    assert len(r.curve) == 101
    for q in np.linspace(r.q_threshold + 1e-3, 1, 50):
        assert pt_min_eigenvalue(w(3), Noise.LOCAL, Partition.parse("A|BC"), q) < 0


def test_upb_never_npt():
    for noise in Noise:
        for p in cuts_of_shape(3, (1, 2)):
            r = npt_threshold(upb3(), noise, p)
            assert r.never
            assert r.describe() == "never NPT"


def npt_cases():
    for noise, table in REFERENCE.items():
        for row in table:
            if row.state == "all" or row.n > 4:
                continue
            for column, sizes in (("npt1", (1, row.n - 1)), ("npt2", (row.n // 2, row.n // 2))):
                value = row.cell(column)
                if value is not None:
                    yield noise, row.n, row.state, sizes, value


@pytest.mark.parametrize("noise,n,state,sizes,value", list(npt_cases()))
def test_reference_npt(noise: Noise, n: int, state: str, sizes, value):
    r = npt_min_over_cuts(parse_state(state, n), noise, sizes)
    if value == NEVER:
        assert r.never
    else:
        assert r.q_threshold is not None
        assert abs(r.q_threshold - value) <= 0.005


def test_symmetric_state_cuts_agree():
    results = npt_all_cuts(w(4), Noise.LOCAL, (2, 2))
    assert len(results) == 3
    values = [r.q_threshold for r in results]
    assert max(values) - min(values) < 1e-4


def test_cluster_min_over_cuts():
    results = npt_all_cuts(cluster4(), Noise.LOCAL, (1, 3))
    best = npt_min_over_cuts(cluster4(), Noise.LOCAL, (1, 3))
    assert best.q_threshold == min(r.q_threshold for r in results)


def test_cut_shapes():
    assert [p.render() for p in cuts_of_shape(3, (2, 1))] == ["A|BC", "B|AC", "C|AB"]
    with pytest.raises(UserError):
        cuts_of_shape(4, (1, 2))
    with pytest.raises(UserError):
        npt_threshold(ghz(3), Noise.LOCAL, Partition.parse("A|B|C"))


def test_negativity():
    assert abs(negativity(bell(), Partition.parse("A|B")) - 0.5) < 1e-12
    product = QOperator(projector(ket("010")), True)
    assert negativity(product, Partition.parse("A|BC")) == 0
    assert negativity(max_mixed(3).rho, Partition.parse("AB|C")) == 0
    out = apply(ChannelSpec(Noise.GLOBAL, 3, 0.5), ghz(3).rho)
    eig = np.linalg.eigvalsh(partial_transpose(out, [1]).entries)
    expected = -eig[eig < 0].sum()
    assert expected > 0
    assert abs(negativity(out, Partition.parse("A|BC")) - expected) < 1e-12


def test_witness():
    phi = (ket("00") + ket("11")) / np.sqrt(2)
    xi = QOperator(np.eye(4) / 2 - projector(phi), True)
    r = witness_check(bell(), xi, Partition.parse("A|B"), restarts=20)
    assert r.verdict is Verdict.ENTANGLED
    assert abs(r.expectation + 0.5) < 1e-12

    r = witness_check(bell(), QOperator(np.eye(4), True), Partition.parse("A|B"), restarts=5)
    assert r.verdict is Verdict.INCONCLUSIVE

    separable = QOperator(projector(ket("01")), True)
    r = witness_check(separable, xi, Partition.parse("A|B"), restarts=20)
    assert r.verdict is Verdict.INCONCLUSIVE

    # not block-positive, so a negative expectation proves nothing
    r = witness_check(bell(), QOperator(-np.eye(4), True), Partition.parse("A|B"), restarts=5)
    assert r.verdict is Verdict.INCONCLUSIVE
