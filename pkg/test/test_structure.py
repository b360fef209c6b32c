from itertools import product

import numpy as np
import pytest

from entdiss.certificate import FeasibilityCertificate
from entdiss.channels import ChannelSpec, Noise, choi_of_map, transfer_vector
from entdiss.linalg import QOperator, contract, projector
from entdiss.sic import sic_vectors
from entdiss.states import cluster4, ghz, w
from entdiss.structure import (
    ALL,
    ClassTag,
    DiagonalMapFamily,
    DissociationClass,
    _pairing_factor,
    build_system,
    constraint_set,
    product_state_terms,
    xi_operator,
)
from entdiss.util import UserError
from entdiss.verify import decomposition_transfer

from .fixtures import rng

_ = rng

CASES = [(t, n) for n in (3, 4, 6) for t in ClassTag if n % 2 == 0 or t.value in "ae"]


def solve(cls: DissociationClass, noise: Noise, q: float) -> dict:
    system = build_system(cls, noise)
    f, *_ = np.linalg.lstsq(system.matrix, system.rhs(q), rcond=None)
    return dict(zip(system.unknowns, map(float, f)))


def test_parse_and_parity():
    assert DissociationClass.parse("EA", 3).tag is ClassTag.EA
    assert DissociationClass.parse("e", 5).name == "dge"
    assert DissociationClass.parse("pairs", 4).tag is ClassTag.PAIR_CLUSTERS
    for name in ("b", "c", "d"):
        with pytest.raises(UserError):
            DissociationClass.parse(name, 3)
    with pytest.raises(UserError):
        DissociationClass.parse("ea", 2)
    with pytest.raises(UserError):
        DissociationClass.parse("z", 4)


def test_targets():
    n = 6
    got = [(c.target_k, c.target_r) for c in (DissociationClass(t, n) for t in ClassTag)]
    assert got == [(6, 1), (3, 2), (4, 3), (2, 3), (2, 5)]


@pytest.mark.parametrize("tag,n", CASES)
def test_block_weights_sum_to_one(tag: ClassTag, n: int):
    blocks = DissociationClass(tag, n).blocks()
    assert abs(sum(b.weight for b in blocks) - 1) < 1e-12
    for b in blocks:
        qubits = sorted(list(b.kept) + [q for part in b.measured for q in part])
        assert qubits == list(range(n))


def test_block_counts():
    assert len(DissociationClass(ClassTag.EA, 4).blocks()) == 4
    assert len(DissociationClass(ClassTag.PAIR_CLUSTERS, 6).blocks()) == 45
    assert len(DissociationClass(ClassTag.HALF_PLUS_SINGLES, 6).blocks()) == 20
    assert len(DissociationClass(ClassTag.HALF_CLUSTERS, 4).blocks()) == 6


def test_pairing_factor():
    assert _pairing_factor(0, 2) == 1
    assert abs(_pairing_factor(1, 1) - 1 / 5) < 1e-15
    assert abs(_pairing_factor(2, 1) - 1 / 5) < 1e-15
    assert abs(_pairing_factor(4, 2) - 1 / 25) < 1e-15
    assert _pairing_factor(5, 2) == 0


def test_ea_rows_n3():
    rows = build_system(DissociationClass(ClassTag.EA, 3), Noise.LOCAL).rows
    assert len(rows) == 4
    assert rows[0] == {(1, 2): 1.0}
    assert rows[3] == pytest.approx({(0, 0): 1 / 9})


@pytest.mark.parametrize("tag,n", CASES)
@pytest.mark.parametrize("noise", [Noise.LOCAL, Noise.GLOBAL])
def test_decomposition_identity(tag: ClassTag, n: int, noise: Noise):
    cls = DissociationClass(tag, n)
    system = build_system(cls, noise)
    assert set(system.unknowns) <= set(cls.profile_domain())
    for q in (0.0, 0.3, 1.0):
        f = solve(cls, noise, q)
        assert system.residual(f, q) < 1e-10
        cert = FeasibilityCertificate(cls.name, n, noise.value, q, "ghz", f)
        total, offdiagonal = decomposition_transfer(cert)
        target = transfer_vector(ChannelSpec(noise, n, q))
        assert np.max(np.abs(total - target)) < 1e-8
        assert offdiagonal < 1e-9


def test_xi_identity_map():
    cls = DissociationClass(ClassTag.EA, 3)
    fam = DiagonalMapFamily(cls, {p: 1.0 for p in cls.profile_domain()})
    rho = w(3).rho
    assert xi_operator(fam, 1, rho).close_to(rho)


def test_dedup_only_for_symmetric_states():
    cls = DissociationClass(ClassTag.EA, 4)
    unknowns = build_system(cls, Noise.LOCAL).unknowns
    sym = constraint_set(cls, unknowns, ghz(4).rho)
    assert sym.deduplicated
    assert {label[0] for label in sym.labels} == {0}
    assert len(sym) == 64
    full = constraint_set(cls, unknowns, ghz(4).rho, dedup=False)
    assert len(full) == 4 * 64
    cl = constraint_set(cls, unknowns, cluster4().rho)
    assert not cl.deduplicated
    assert len(cl) == 4 * 64
    assert cl.size == 2


def test_constraints_match_direct_contraction(rng: np.random.Generator):
    cls = DissociationClass(ClassTag.HALF_CLUSTERS, 4)
    unknowns = build_system(cls, Noise.GLOBAL).unknowns
    rho = cluster4().rho
    cons = constraint_set(cls, unknowns, rho, workers=3)
    f = rng.normal(size=len(unknowns))
    fam = DiagonalMapFamily(cls, dict(zip(unknowns, map(float, f))))
    stack = cons.evaluate(f)
    blocks = cls.blocks()
    for c in rng.choice(len(cons), size=12, replace=False):
        i, choice = cons.labels[c]
        block = blocks[i]
        part = block.measured[0]
        v = sic_vectors(2 ** len(part)).vectors[choice[0]]
        direct = contract(xi_operator(fam, i, rho), [q + 1 for q in part], v)
        assert np.allclose(stack[c], direct.entries, atol=1e-12)


def test_all_mode_terms(rng: np.random.Generator):
    cls = DissociationClass(ClassTag.EA, 3)
    unknowns = build_system(cls, Noise.LOCAL).unknowns
    cons = constraint_set(cls, unknowns, ALL)
    assert cons.mode == "all"
    f = rng.normal(size=len(unknowns))
    fam = DiagonalMapFamily(cls, dict(zip(unknowns, map(float, f))))
    omega = choi_of_map(lambda e: xi_operator(fam, 0, QOperator(e)).entries, 3)
    assert np.allclose(np.einsum("p,pab->ab", f, cons.choi), omega, atol=1e-12)

    vectors = []
    for part in cons.parties[:-1]:
        v = rng.normal(size=2 ** len(part)) + 1j * rng.normal(size=2 ** len(part))
        vectors.append(v / np.linalg.norm(v))
    terms = product_state_terms(cls, cons, vectors)
    a = np.ones(1, dtype=complex)
    for v in vectors:
        a = np.kron(a, v)
    # block 0 keeps qubit 0 and measures 1 and 2, so the parties are already in order
    expected = xi_operator(fam, 0, QOperator(projector(a), True)).entries
    assert np.allclose(np.einsum("p,pab->ab", f, terms), expected, atol=1e-12)


def test_profile_domain_sizes():
    for tag, n in product(ClassTag, (4, 6)):
        cls = DissociationClass(tag, n)
        assert len(cls.profile_domain()) == (cls.first_size + 1) * (n - cls.first_size + 1)
