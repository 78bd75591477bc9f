import numpy as np
import pytest

from ptqme.grid import (
    Grid1D,
    PotentialCurve,
    SURROGATE_BARRIER_HEIGHT,
    SURROGATE_COEFFS,
    SURROGATE_LEFT_MINIMUM,
    SURROGATE_MASS,
    SURROGATE_RIGHT_MINIMUM,
    TAA_GRID,
    harmonic_potential,
    kinetic_matrix,
    matrix_elements,
    named_potential,
    potential_from_file,
    solve_schroedinger,
    surrogate_double_well,
)

HO_GRID = Grid1D(-10.0, 10.0, 201)

TABLE_ENERGIES = np.array(
    [4.114537e-3, 4.691015e-3, 8.133116e-3, 1.110714e-2, 1.458100e-2, 1.881039e-2]
)


@pytest.fixture(scope="module")
def ho_solution():
    return solve_schroedinger(HO_GRID, harmonic_potential(), mass=1.0, n_states=8)


@pytest.fixture(scope="module")
def surrogate_solution():
    return solve_schroedinger(
        TAA_GRID, surrogate_double_well(), mass=SURROGATE_MASS, n_states=6
    )


# ---------------------------------------------------------------- kinetic matrix


def test_kinetic_diagonal():
    grid = Grid1D(0.0, 3.6, 121)
    mass = 1836.15
    t = kinetic_matrix(grid, mass)
    assert np.allclose(np.diag(t), np.pi**2 / (6.0 * mass * grid.spacing**2))


def test_kinetic_offdiagonal_formula():
    grid = Grid1D(-1.0, 1.0, 21)
    t = kinetic_matrix(grid, 2.0)
    dq = grid.spacing
    for i, j in [(0, 1), (3, 7), (10, 4)]:
        assert t[i, j] == pytest.approx(
            (-1.0) ** (i - j) / (2.0 * dq**2 * (i - j) ** 2)
        )
    assert np.allclose(t, t.T)


def test_kinetic_invalid_inputs():
    with pytest.raises(ValueError):
        kinetic_matrix(Grid1D(0.0, 1.0, 11), mass=-1.0)
    with pytest.raises(ValueError):
        Grid1D(1.0, 1.0, 11)
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 1)


# ---------------------------------------------------------------- eigensolver


def test_harmonic_spectrum(ho_solution):
    expected = np.arange(6) + 0.5
    np.testing.assert_allclose(ho_solution.energies[:6], expected, rtol=1e-8)


def test_orthonormality(ho_solution):
    psi = ho_solution.wavefunctions
    gram = psi @ psi.T * ho_solution.grid.spacing
    assert np.max(np.abs(gram - np.eye(len(gram)))) < 1e-10


def test_grid_halving_convergence():
    fine = Grid1D(-10.0, 10.0, 401)
    e1 = solve_schroedinger(HO_GRID, harmonic_potential(), 1.0, 6).energies
    e2 = solve_schroedinger(fine, harmonic_potential(), 1.0, 6).energies
    assert np.max(np.abs(e1 - e2)) < 1e-8


def test_constant_potential_shift():
    flat = PotentialCurve(evaluate=lambda q: np.zeros_like(np.asarray(q)), label="flat")
    shifted = PotentialCurve(
        evaluate=lambda q: np.full_like(np.asarray(q, dtype=float), 0.37), label="flat+c"
    )
    grid = Grid1D(-4.0, 4.0, 81)
    e0 = solve_schroedinger(grid, flat, 1.0, 10).energies
    e1 = solve_schroedinger(grid, shifted, 1.0, 10).energies
    np.testing.assert_allclose(e1, e0 + 0.37, atol=1e-12)


def test_n_states_bounds():
    with pytest.raises(ValueError):
        solve_schroedinger(HO_GRID, harmonic_potential(), 1.0, 500)


def test_sign_convention(ho_solution):
    for row in ho_solution.wavefunctions:
        assert row[np.argmax(np.abs(row))] > 0.0


# ---------------------------------------------------------------- matrix elements


def test_identity_function_gives_identity(ho_solution):
    m = matrix_elements(ho_solution, lambda q: np.ones_like(q))
    assert np.max(np.abs(m - np.eye(len(m)))) < 1e-10


def test_harmonic_ladder_elements(ho_solution):
    q = matrix_elements(ho_solution)
    for n in range(5):
        assert abs(q[n, n + 1]) == pytest.approx(np.sqrt((n + 1) / 2.0), rel=1e-8)
    assert np.max(np.abs(np.diag(q))) < 1e-10  # even potential, symmetric grid


def test_nonfinite_f_rejected(ho_solution):
    with pytest.raises(ValueError):
        matrix_elements(ho_solution, lambda q: 1.0 / q)  # grid contains q = 0


# ---------------------------------------------------------------- surrogate double well


def test_surrogate_reproduces_tabulated_ground_energy(surrogate_solution):
    assert surrogate_solution.energies[0] == pytest.approx(TABLE_ENERGIES[0], abs=1e-9)


def test_surrogate_spectrum_residuals(surrogate_solution):
    # calibration residuals frozen from the fit: <= 0.2% for E_1, <= 8%
    # above the barrier (a quartic cannot do better against all targets)
    rel = np.abs(surrogate_solution.energies - TABLE_ENERGIES) / TABLE_ENERGIES
    assert rel[1] < 2e-3
    assert np.max(rel) < 0.08


def test_surrogate_barrier_height():
    target = 1573.3 * 4.556335252912e-6
    assert SURROGATE_BARRIER_HEIGHT == pytest.approx(target, rel=0.075)


def test_surrogate_geometry():
    pot = surrogate_double_well()
    a4, a3, a2, a1, _ = SURROGATE_COEFFS
    dv = np.polynomial.polynomial.Polynomial([a1, 2 * a2, 3 * a3, 4 * a4])
    for q_star in (SURROGATE_LEFT_MINIMUM, SURROGATE_RIGHT_MINIMUM):
        assert abs(dv(q_star)) < 1e-10
    # left minimum is the global one
    assert pot.evaluate(SURROGATE_LEFT_MINIMUM) < pot.evaluate(SURROGATE_RIGHT_MINIMUM)


def test_surrogate_coupling_elements(surrogate_solution):
    q = matrix_elements(surrogate_solution)
    # ground state localized left, first excited right, with the
    # tabulated tunneling-doublet structure
    assert q[0, 0] == pytest.approx(-0.3813, abs=0.02)
    assert q[1, 1] == pytest.approx(0.6712, abs=0.04)
    assert abs(q[0, 1]) == pytest.approx(0.3325, abs=0.04)


# ---------------------------------------------------------------- potential sources


def test_potential_from_file_interpolates(tmp_path):
    path = tmp_path / "pot.txt"
    q = np.linspace(-2.0, 2.0, 41)
    np.savetxt(path, np.column_stack([q, q**2]))
    pot = potential_from_file(path)
    assert pot.evaluate(0.55) == pytest.approx(0.55**2, abs=5e-3)


def test_potential_from_file_rejects_bad_shape(tmp_path):
    path = tmp_path / "bad.txt"
    np.savetxt(path, np.ones((5, 3)))
    with pytest.raises(ValueError):
        potential_from_file(path)


def test_named_potential_lookup():
    assert named_potential("harmonic").label == "harmonic"
    assert named_potential("surrogate-taa").label == "surrogate-taa"
    with pytest.raises(ValueError):
        named_potential("nope")
