"""Dense complex-matrix kernel: Hermitian eigendecompositions, trace norms,
tensor products and partial traces for finite-dimensional quantum states.

Matrices are plain complex ``numpy`` arrays in row-major order.  All
operations are pure functions of their inputs and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITICITY_TOL = 1e-9
PSD_TOL = 1e-9
TRACE_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got an array of shape {a.shape}")
    return a


def require_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian.

    The error message names the entry with the largest deviation from the
    conjugate transpose.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix of shape {a.shape} is not square")
    dev = np.abs(a - a.conj().T)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    if dev[i, j] > tol:
        raise ValueError(
            f"matrix is not Hermitian: entry ({i},{j}) deviates from its "
            f"conjugate by {dev[i, j]:.3e}"
        )
    return a


def herm_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns, so that ``V @ diag(w) @ V.conj().T``
    reconstructs the input.
    """
    a = require_hermitian(m)
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return np.ascontiguousarray(w[::-1]), np.ascontiguousarray(v[:, ::-1])


def herm_eigvals(m) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending."""
    a = require_hermitian(m)
    w = np.linalg.eigvalsh((a + a.conj().T) / 2)
    return np.ascontiguousarray(w[::-1])


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(herm_eigvals(m))))


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(m, dims: tuple[int, int], keep: str = "first") -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``dims[0] * dims[1]``.

    ``keep`` selects the surviving factor, ``"first"`` or ``"second"``.
    """
    a = as_matrix(m)
    d1, d2 = dims
    if d1 < 1 or d2 < 1 or a.shape != (d1 * d2, d1 * d2):
        raise ValueError(
            f"operator of dimension {a.shape[0]} does not factor as {d1}x{d2}"
        )
    t = a.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ikjk->ij", t)
    if keep == "second":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'first' or 'second', got {keep!r}")


_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def pauli_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return _PAULI_X.copy(), _PAULI_Y.copy(), _PAULI_Z.copy()


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace operator.

    Eigenvalues in ``[-PSD_TOL, 0)`` are accepted as numerically zero at
    validation; the stored matrix is never altered.
    """

    matrix: np.ndarray

    def __post_init__(self):
        a = require_hermitian(self.matrix)
        object.__setattr__(self, "matrix", a)
        tr = complex(np.trace(a))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr:.12g} is not 1")
        w = np.linalg.eigvalsh(a)
        if w[0] < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return herm_eigvals(self.matrix)


@dataclass(frozen=True)
class QubitState:
    """Qubit parametrized by purity ``r`` and a unit Bloch vector."""

    purity: float
    bloch: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        if not 0.0 <= self.purity <= 1.0:
            raise ValueError(f"purity {self.purity} outside [0, 1]")
        v = np.asarray(self.bloch, dtype=float)
        if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("bloch must be a unit 3-vector")
        object.__setattr__(self, "bloch", v)

    def density(self) -> np.ndarray:
        """(1 + r v.sigma)/2; eigenvalues (1 +- r)/2."""
        r, v = self.purity, self.bloch
        return (
            np.eye(2, dtype=complex)
            + r * (v[0] * _PAULI_X + v[1] * _PAULI_Y + v[2] * _PAULI_Z)
        ) / 2
