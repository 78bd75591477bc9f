import numpy as np
import pytest
from scipy.integrate import quad

from ptqme.bath import BathSpec, spectral_density
from ptqme.grid import (
    TAA_GRID,
    SURROGATE_MASS,
    solve_schroedinger,
    surrogate_double_well,
)
from ptqme.system import (
    NLevelSystem,
    bohr_frequencies,
    from_tables,
    hamiltonian_matrix,
    load_system,
    renormalize,
    renormalize_dvr,
    save_system,
    system_from_dvr,
)

from conftest import BETA_300K


def test_tabulated_values(taa6):
    assert taa6.n_levels == 6
    assert taa6.energies[0] == 4.114537e-3
    assert taa6.coupling[0, 0] == -0.3813
    assert taa6.coupling[0, 1] == 0.3325


def test_bohr_frequencies(taa6):
    d = bohr_frequencies(taa6)
    assert np.allclose(np.diag(d), 0.0)
    assert d[1, 0] == pytest.approx(5.76478e-4, rel=1e-12)
    assert d[2, 0] == pytest.approx(4.018579e-3, rel=1e-12)
    assert np.max(np.abs(d + d.T)) == 0.0


def test_hamiltonian_matrix(taa6):
    h = hamiltonian_matrix(taa6)
    assert np.allclose(h, np.diag(taa6.energies))
    assert np.trace(h) == pytest.approx(np.sum(taa6.energies))
    one = NLevelSystem([1.5], [[0.2]])
    assert hamiltonian_matrix(one).shape == (1, 1)


def test_two_level_truncation_energies(taa6):
    h2 = np.diag(taa6.energies[:2])
    assert h2[0, 0] == 4.114537e-3
    assert h2[1, 1] == 4.691015e-3


def test_construction_guards():
    with pytest.raises(ValueError):
        NLevelSystem([1.0, 1.0], np.eye(2))  # degenerate
    with pytest.raises(ValueError):
        NLevelSystem([1.0, 2.0], [[0.0, 0.3], [0.4, 0.0]])  # asymmetric
    with pytest.raises(ValueError):
        NLevelSystem([1.0, 2.0], np.eye(3))  # shape mismatch


# ---------------------------------------------------------------- renormalization


def test_renormalize_zero_coupling_is_identity(taa6):
    out = renormalize(taa6, 0.0, 2.28e-3)
    assert out is taa6


def test_renormalize_trace_identity(taa6):
    gamma, wc = 0.5, 2.28e-3
    out = renormalize(taa6, gamma, wc)
    q2_trace = np.trace(taa6.coupling @ taa6.coupling)
    expected = np.sum(taa6.energies) + 0.5 * gamma * wc * q2_trace
    assert np.sum(out.energies) == pytest.approx(expected, abs=1e-12)


def test_renormalize_keeps_coupling_symmetric(taa6):
    out = renormalize(taa6, 1.0, 2.28e-3)
    assert np.max(np.abs(out.coupling - out.coupling.T)) < 1e-12


def test_renormalize_rejects_negative_gamma(taa6):
    with pytest.raises(ValueError):
        renormalize(taa6, -0.1, 2.28e-3)


def test_reorganization_prefactor_matches_quadrature():
    # sum_k c_k^2/(m_k w_k^2) = (2/pi) int_0^inf J(w)/w dw = gamma * w_c
    bath = BathSpec(0.37, 2.28e-3, BETA_300K, 10)
    integral, _ = quad(
        lambda w: spectral_density(bath, w) / w, 0, np.inf, limit=400
    )
    assert (2.0 / np.pi) * integral == pytest.approx(
        bath.gamma * bath.omega_c, rel=1e-8
    )


def test_renormalize_dvr_matches_truncated_route_at_weak_coupling():
    # the two renormalization routes agree on the low-lying gaps when the
    # quadratic term is small
    gamma, wc = 0.1, 2.28e-3
    sys_dvr, _ = renormalize_dvr(
        TAA_GRID, surrogate_double_well(), SURROGATE_MASS, 6, gamma, wc
    )
    base = system_from_dvr(
        solve_schroedinger(TAA_GRID, surrogate_double_well(), SURROGATE_MASS, 6)
    )
    sys_trunc = renormalize(base, gamma, wc)
    gaps_dvr = np.diff(sys_dvr.energies)
    gaps_trunc = np.diff(sys_trunc.energies)
    assert np.max(np.abs(gaps_dvr - gaps_trunc) / gaps_dvr) < 0.02


def test_renormalize_dvr_zero_coupling_reproduces_bare_solution():
    sys0, sol = renormalize_dvr(
        TAA_GRID, surrogate_double_well(), SURROGATE_MASS, 6, 0.0, 2.28e-3
    )
    assert np.allclose(sys0.energies, sol.energies)


# ---------------------------------------------------------------- file round-trip


def test_save_load_roundtrip(tmp_path, taa6):
    path = tmp_path / "sys.txt"
    save_system(taa6, path)
    back = load_system(path)
    np.testing.assert_allclose(back.energies, taa6.energies, rtol=1e-15)
    np.testing.assert_allclose(back.coupling, taa6.coupling, rtol=1e-15)


def test_load_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2\n1.0 2.0\n")  # missing coupling rows
    with pytest.raises(ValueError):
        load_system(path)
