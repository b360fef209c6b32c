import numpy as np
import pytest

from entdiss.linalg import is_psd, partial_transpose
from entdiss.states import (
    StateName,
    all_permutations_invariant,
    cluster4,
    ghz,
    is_fully_symmetric,
    max_mixed,
    parse_state,
    random_density,
    upb3,
    w,
)
from entdiss.util import UserError


def test_named_states_are_density_matrices():
    for s in (ghz(3), w(3), ghz(6), cluster4(), upb3(), max_mixed(4), random_density(3, 7)):
        assert abs(s.rho.trace() - 1) < 1e-12
        assert is_psd(s.rho)
        assert s.rho.n_qubits == s.n_qubits


def test_pure_states_have_unit_purity():
    for s in (ghz(4), w(4), cluster4()):
        rho = s.rho.entries
        assert abs(np.trace(rho @ rho) - 1) < 1e-12


def test_ghz_entries():
    rho = ghz(3).rho.entries
    assert abs(rho[0, 0] - 0.5) < 1e-12
    assert abs(rho[0, 7] - 0.5) < 1e-12
    assert abs(rho[7, 7] - 0.5) < 1e-12


def test_symmetry():
    assert is_fully_symmetric(ghz(4).rho.entries, 4)
    assert is_fully_symmetric(w(3).rho.entries, 3)
    assert not is_fully_symmetric(cluster4().rho.entries, 4)
    assert not is_fully_symmetric(upb3().rho.entries, 3)
    for s in (ghz(3), w(3), upb3(), random_density(3, 1)):
        assert is_fully_symmetric(s.rho.entries, 3) == all_permutations_invariant(
            s.rho.entries, 3
        )


def test_upb_is_ppt_entangled_candidate():
    rho = upb3().rho
    assert np.allclose(rho.entries @ rho.entries * 4, rho.entries, atol=1e-12)
    for part in ([1], [2], [3]):
        assert is_psd(partial_transpose(rho, part))


def test_random_is_deterministic():
    a = random_density(3, 42).rho
    b = random_density(3, 42).rho
    c = random_density(3, 43).rho
    assert a.close_to(b, 0)
    assert not a.close_to(c)


def test_parse_state():
    assert parse_state("GHZ", 3).name is StateName.GHZ
    assert parse_state("random:5", 2).spec == "random:5"
    assert parse_state("cluster", 4).spec == "cluster"
    for spec, n in (("cluster", 3), ("upb", 4), ("bogus", 3), ("random:x", 3)):
        with pytest.raises(UserError):
            parse_state(spec, n)
    with pytest.raises(UserError):
        w(1)
