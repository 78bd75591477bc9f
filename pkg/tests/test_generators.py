import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptqme.bath import BathSpec, tunneling_rate, tunneling_rate_t
from ptqme.ccqme import two_level
from ptqme.equilibrium import gibbs_state
from ptqme.generators import (
    Superoperator,
    convolution_operator,
    convolution_operator_t,
    hermiticity_defect,
    liouvillian,
    redfield_superoperator,
    redfield_superoperator_t,
    secularize,
    steady_state,
    trace_defect,
    trace_vector,
    unitary_liouvillian,
    unvec,
    vec,
    vec_index,
)
from ptqme.system import NLevelSystem

from conftest import BETA_300K, random_hermitian


@pytest.fixture()
def bath():
    return BathSpec(0.3, 2.28e-3, BETA_300K, 500)


@pytest.fixture()
def two_site():
    return NLevelSystem([4.114537e-3, 4.691015e-3], [[-0.3813, 0.3325], [0.3325, 0.6712]])


# ---------------------------------------------------------------- vectorisation


def test_vec_roundtrip():
    rng = np.random.default_rng(1)
    rho = random_hermitian(rng, 4)
    assert np.array_equal(unvec(vec(rho)), rho)
    assert vec(rho)[vec_index(1, 3, 4)] == rho[1, 3]


def test_trace_vector():
    rng = np.random.default_rng(2)
    rho = random_hermitian(rng, 5)
    assert trace_vector(5) @ vec(rho) == pytest.approx(1.0)


def test_superoperator_shape_guard():
    with pytest.raises(ValueError):
        Superoperator(np.zeros((5, 5)), kind="unitary")


# ---------------------------------------------------------------- memory kernel


def test_kernel_matrix_zero_coupling(two_site):
    bath0 = BathSpec(0.0, 2.28e-3, BETA_300K, 10)
    assert np.all(convolution_operator(two_site, bath0) == 0.0)


def test_kernel_matrix_two_level_structure(two_site, bath):
    k = convolution_operator(two_site, bath)
    d = two_site.energies[1] - two_site.energies[0]
    q = two_site.coupling
    assert k[0, 0] == q[0, 0] * tunneling_rate(bath, 0.0)
    assert k[0, 1] == q[0, 1] * tunneling_rate(bath, -d)
    assert k[1, 0] == q[1, 0] * tunneling_rate(bath, +d)
    assert k[1, 1] == q[1, 1] * tunneling_rate(bath, 0.0)


def test_kernel_adjoint_consistency(two_site, bath):
    k = convolution_operator(two_site, bath)
    kd = k.conj().T
    d = two_site.energies[1] - two_site.energies[0]
    assert kd[0, 1] == np.conj(tunneling_rate(bath, d)) * two_site.coupling[1, 0]


def test_finite_time_kernel_matrix(two_site, bath):
    assert np.all(convolution_operator_t(two_site, bath, 0.0) == 0.0)
    t_large = 80.0 / bath.omega_c
    k_inf = convolution_operator(two_site, bath)
    k_t = convolution_operator_t(two_site, bath, t_large)
    assert np.max(np.abs(k_t - k_inf)) <= 1e-10 * np.max(np.abs(k_inf))
    d = two_site.energies[1] - two_site.energies[0]
    assert convolution_operator_t(two_site, bath, 35.0)[1, 0] == pytest.approx(
        tunneling_rate_t(bath, d, 35.0) * two_site.coupling[1, 0]
    )


# ---------------------------------------------------------------- dissipator


def test_dissipator_matches_two_level_closed_form(two_site, bath):
    rng = np.random.default_rng(3)
    sop = redfield_superoperator(two_site, convolution_operator(two_site, bath))
    e0, e1 = two_site.energies
    q = two_site.coupling
    for _ in range(20):
        rho = random_hermitian(rng, 2)
        oracle = two_level(e0, e1, q[0, 0], q[1, 1], q[0, 1], bath, rho)
        mine = sop.apply(rho)
        assert np.max(np.abs(mine - oracle["R"])) <= 1e-12 * np.max(np.abs(oracle["R"]))


def test_dissipator_zero_coupling(taa6):
    bath0 = BathSpec(0.0, 2.28e-3, BETA_300K, 10)
    sop = redfield_superoperator(taa6, convolution_operator(taa6, bath0))
    assert np.all(sop.matrix == 0.0)


def test_dissipator_annihilates_trace(taa6, bath):
    sop = redfield_superoperator(taa6, convolution_operator(taa6, bath))
    assert trace_defect(sop) < 1e-10
    rng = np.random.default_rng(4)
    rho = random_hermitian(rng, 6)
    assert abs(np.trace(sop.apply(rho))) < 1e-12


def test_dissipator_preserves_hermiticity(taa6, bath):
    sop = redfield_superoperator(taa6, convolution_operator(taa6, bath))
    assert hermiticity_defect(sop) < 1e-12


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_dissipator_hermitian_output_property(seed, taa6):
    bath = BathSpec(0.4, 2.28e-3, BETA_300K, 200)
    sop = redfield_superoperator(taa6, convolution_operator(taa6, bath))
    rho = random_hermitian(np.random.default_rng(seed), 6)
    out = sop.apply(rho)
    assert np.max(np.abs(out - out.conj().T)) < 1e-12 * max(1.0, np.max(np.abs(out)))


def test_dissipator_dimension_guard(taa6, two_site, bath):
    kernel = convolution_operator(two_site, bath)
    with pytest.raises(ValueError):
        redfield_superoperator(taa6, kernel)


def test_time_dependent_dissipator(taa6, bath):
    assert np.all(redfield_superoperator_t(taa6, bath, 0.0).matrix == 0.0)
    t_large = 80.0 / bath.omega_c
    asym = redfield_superoperator(taa6, convolution_operator(taa6, bath))
    trans = redfield_superoperator_t(taa6, bath, t_large)
    assert np.max(np.abs(trans.matrix - asym.matrix)) <= 1e-10 * np.max(
        np.abs(asym.matrix)
    )
    assert hermiticity_defect(trans) < 1e-12


# ---------------------------------------------------------------- unitary part


def test_unitary_annihilates_diagonal(taa6):
    lu = unitary_liouvillian(taa6)
    rho = np.diag([0.4, 0.3, 0.2, 0.1, 0.0, 0.0]).astype(complex)
    assert np.max(np.abs(lu.apply(rho))) == 0.0


def test_unitary_two_level_coherence(two_site):
    lu = unitary_liouvillian(two_site)
    d = two_site.energies[1] - two_site.energies[0]
    rho = np.array([[0.0, 0.25 + 0.1j], [0.25 - 0.1j, 0.0]])
    out = lu.apply(rho)
    assert out[0, 1] == pytest.approx(1j * d * rho[0, 1], rel=1e-14)
    assert out[1, 0] == pytest.approx(-1j * d * rho[1, 0], rel=1e-14)


def test_unitary_preserves_hermiticity(taa6):
    assert hermiticity_defect(unitary_liouvillian(taa6)) < 1e-14


# ---------------------------------------------------------------- secular projection


def test_secular_keeps_population_block(taa6, bath):
    sop = secularize(
        redfield_superoperator(taa6, convolution_operator(taa6, bath)), taa6
    )
    n = taa6.n_levels
    m4 = sop.matrix.reshape(n, n, n, n)
    # population-population entries match the detailed-balance rate matrix
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            rate = 2.0 * taa6.coupling[a, b] ** 2 * tunneling_rate(
                bath, taa6.energies[a] - taa6.energies[b]
            ).real
            assert m4[a, a, b, b].real == pytest.approx(rate, rel=1e-12)
            assert abs(m4[a, a, b, b].imag) < 1e-18
    # coherence rows couple only to themselves
    assert abs(m4[0, 1, 0, 0]) == 0.0
    assert abs(m4[0, 1, 2, 3]) == 0.0
    assert abs(m4[0, 1, 0, 1]) > 0.0


def test_secular_idempotent_on_diagonal_superoperator(taa6):
    diag = Superoperator(np.diag(np.arange(36.0, dtype=complex)), kind="composite")
    out = secularize(diag, taa6)
    assert np.array_equal(out.matrix, diag.matrix)


def test_secular_steady_state_is_gibbs(taa6, bath):
    sop = liouvillian(taa6, bath, secular=True)
    rho_ss = steady_state(sop)
    target = gibbs_state(taa6, bath.beta)
    assert np.max(np.abs(rho_ss - target)) < 1e-10


def test_steady_state_rejects_pure_unitary(taa6):
    with pytest.raises(ValueError):
        steady_state(unitary_liouvillian(taa6))


def test_dump_writes_matrix(tmp_path, taa6, bath):
    sop = redfield_superoperator(taa6, convolution_operator(taa6, bath))
    path = tmp_path / "sop.txt"
    sop.dump(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# superoperator kind=redfield")
    assert len(lines) == 1 + 36
