"""Dense superoperator assembly in Liouville space.

States are vectorised row-major, vec(rho)[n*N + m] = rho[n, m], so that
vec(A rho B) = (A kron B^T) vec(rho).  That single convention is used by
every generator in the package.

The dissipative second-order generator is built from the convolution
operator K, whose matrix elements are the relaxation kernel evaluated at
the Bohr frequencies times the coupling matrix, K_nm = T(d_nm) q_nm:

    R[rho] = K rho q - q K rho + q rho K^+ - rho K^+ q.

The secular projection removes every element coupling vec-index (n, m)
to (k, l) unless d_nm = d_kl; for a nondegenerate spectrum that retains
the population block and each coherence's self-coupling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathSpec, tunneling_rate, tunneling_rate_t
from .system import NLevelSystem, bohr_frequencies, hamiltonian_matrix

__all__ = [
    "Superoperator",
    "vec",
    "unvec",
    "vec_index",
    "trace_vector",
    "hermiticity_defect",
    "trace_defect",
    "convolution_operator",
    "convolution_operator_t",
    "redfield_superoperator",
    "redfield_superoperator_t",
    "unitary_liouvillian",
    "liouvillian",
    "secularize",
    "steady_state",
]

SECULAR_TOL = 1e-12


def vec(rho: np.ndarray) -> np.ndarray:
    """Row-major vectorisation of a density matrix."""
    return np.asarray(rho, dtype=complex).reshape(-1)

def unvec(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`."""
    x = np.asarray(x)
    n = round(np.sqrt(x.size))
    if n * n != x.size:
        raise ValueError(f"vector of length {x.size} is not a vectorised matrix")
    return x.reshape(n, n)

def vec_index(n: int, m: int, dim: int) -> int:
    """Flat index of matrix element (n, m)."""
    return n * dim + m

def trace_vector(dim: int) -> np.ndarray:
    """Left vector l with l . vec(rho) = tr(rho)."""
    out = np.zeros(dim * dim)
    out[:: dim + 1] = 1.0
    return out


@dataclass(frozen=True)
class Superoperator:
    """An N^2 x N^2 complex linear map on vectorised density matrices."""

    matrix: np.ndarray
    kind: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        n = round(np.sqrt(m.shape[0]))
        if m.ndim != 2 or m.shape[0] != m.shape[1] or n * n != m.shape[0]:
            raise ValueError(f"superoperator matrix must be N^2 x N^2, got {m.shape}")

    @property
    def dim(self) -> int:
        return round(np.sqrt(self.matrix.shape[0]))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply to a density matrix, returning a matrix."""
        return unvec(self.matrix @ vec(rho))

    def __matmul__(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix @ other.matrix, kind="composite")

    def dump(self, path) -> None:
        """Debug dump as a complex-matrix text file for cross-checking."""
        n2 = self.matrix.shape[0]
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# superoperator kind={self.kind} dim={n2}\n")
            for row in self.matrix:
                fh.write(
                    " ".join(f"{v.real:+.16e}{v.imag:+.16e}j" for v in row) + "\n"
                )


def hermiticity_defect(sop: Superoperator) -> float:
    """How far the map is from commuting with rho -> rho^+.

    A map L preserves Hermiticity iff L_(mn),(lk) = conj(L_(nm),(kl));
    the defect is the max-norm violation of that symmetry.
    """
    n = sop.dim
    m4 = sop.matrix.reshape(n, n, n, n)
    return float(np.max(np.abs(m4.transpose(1, 0, 3, 2) - m4.conj())))


def trace_defect(sop: Superoperator) -> float:
    """Max-norm of the left trace vector image (zero for trace-preserving flows)."""
    return float(np.max(np.abs(trace_vector(sop.dim) @ sop.matrix)))


def convolution_operator(sys: NLevelSystem, bath: BathSpec) -> np.ndarray:
    """Asymptotic memory kernel K_nm = T(d_nm) q_nm."""
    delta = bohr_frequencies(sys)
    return tunneling_rate(bath, delta) * sys.coupling


def convolution_operator_t(sys: NLevelSystem, bath: BathSpec, t: float) -> np.ndarray:
    """Finite-time memory kernel K_nm = T_t(d_nm) q_nm."""
    delta = bohr_frequencies(sys)
    return tunneling_rate_t(bath, delta, t) * sys.coupling


def redfield_superoperator(sys: NLevelSystem, kernel: np.ndarray) -> Superoperator:
    """Second-order dissipator for a given convolution operator.

    Assembles the four Kronecker terms of
    K rho q - q K rho + q rho K^+ - rho K^+ q.
    """
    q = sys.coupling.astype(complex)
    n = sys.n_levels
    if kernel.shape != (n, n):
        raise ValueError(
            f"kernel shape {kernel.shape} does not match {n}-level system"
        )
    kd = kernel.conj().T
    eye = np.eye(n)
    mat = (
        np.kron(kernel, q.T)
        - np.kron(q @ kernel, eye)
        + np.kron(q, kd.T)
        - np.kron(eye, (kd @ q).T)
    )
    return Superoperator(mat, kind="redfield")


def redfield_superoperator_t(
    sys: NLevelSystem, bath: BathSpec, t: float
) -> Superoperator:
    """Time-dependent dissipator built from the finite-time kernel."""
    sop = redfield_superoperator(sys, convolution_operator_t(sys, bath, t))
    return Superoperator(sop.matrix, kind="redfield_t")


def unitary_liouvillian(sys: NLevelSystem) -> Superoperator:
    """-i [H, .] as a superoperator."""
    h = hamiltonian_matrix(sys).astype(complex)
    eye = np.eye(sys.n_levels)
    mat = -1.0j * (np.kron(h, eye) - np.kron(eye, h.T))
    return Superoperator(mat, kind="unitary")


def liouvillian(sys: NLevelSystem, bath: BathSpec, secular: bool = True) -> Superoperator:
    """Full Redfield generator -i[H, .] + R, optionally secularised."""
    r = redfield_superoperator(sys, convolution_operator(sys, bath))
    if secular:
        r = secularize(r, sys)
    mat = unitary_liouvillian(sys).matrix + r.matrix
    return Superoperator(mat, kind="composite")


def secularize(
    sop: Superoperator, sys: NLevelSystem, tol: float = SECULAR_TOL
) -> Superoperator:
    """Zero all elements coupling unequal Bohr-frequency sectors.

    Element ((n,m),(k,l)) survives only if |d_nm - d_kl| <= tol.
    """
    n = sys.n_levels
    if sop.dim != n:
        raise ValueError(f"superoperator dim {sop.dim} does not match system {n}")
    delta = bohr_frequencies(sys).reshape(-1)
    keep = np.abs(delta[:, None] - delta[None, :]) <= tol
    return Superoperator(np.where(keep, sop.matrix, 0.0), kind=sop.kind)


def steady_state(sop: Superoperator, tol: float = 1e-9) -> np.ndarray:
    """Unit-trace null vector of a generator, as a density matrix.

    Uses the eigenvector of the eigenvalue closest to zero; raises if
    that eigenvalue is not numerically zero relative to the generator
    scale, or if the null vector is traceless.
    """
    vals, vecs = np.linalg.eig(sop.matrix)
    idx = int(np.argmin(np.abs(vals)))
    scale = max(1.0, float(np.max(np.abs(sop.matrix))))
    if abs(vals[idx]) > tol * scale:
        raise ValueError(
            f"no numeric null vector: smallest |eigenvalue| = {abs(vals[idx]):.3e}"
        )
    null_count = int(np.sum(np.abs(vals) <= tol * scale))
    if null_count > 1:
        raise ValueError(
            f"steady state not unique: {null_count}-dimensional null space "
            "(no dissipation?)"
        )
    rho = unvec(vecs[:, idx])
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise ValueError("null vector is traceless; generator has no steady state")
    return rho / tr
