#!/usr/bin/env python3
"""
Dense complex linear algebra and standard operators on small Hilbert spaces.

Operators, kets and density matrices are plain ``numpy`` complex arrays.
Qubit operators use the basis order (|e>, |g>), so sigma_z = diag(+1, -1)
and sigma_minus = |g><e| has its single nonzero entry at row 1, column 0.
Superoperators act on column-stacked (Fortran order) density matrices.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm
from scipy.stats import unitary_group

from .config import BetadyneConfig
from .exceptions import ConfigError, DimensionError, HermiticityError, NonFiniteError, StateError

Operator = NDArray[np.complex128]
Ket = NDArray[np.complex128]
DensityMatrix = NDArray[np.complex128]
SuperOperator = NDArray[np.complex128]

QUBIT_EXCITED = 0
QUBIT_GROUND = 1


class OperatorKind(str, Enum):
    """Constructors understood by standard_operators"""

    PAULI_X = "pauli_x"
    PAULI_Y = "pauli_y"
    PAULI_Z = "pauli_z"
    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"
    IDENTITY = "identity"
    ANNIHILATION = "annihilation"
    NUMBER = "number"
    PROJECTOR = "projector"


_QUBIT_KINDS = {
    OperatorKind.PAULI_X,
    OperatorKind.PAULI_Y,
    OperatorKind.PAULI_Z,
    OperatorKind.SIGMA_PLUS,
    OperatorKind.SIGMA_MINUS,
}


def as_operator(A, dim: Optional[int] = None) -> Operator:
    """Coerce to a square complex matrix, optionally of a given dimension"""
    array = np.asarray(A, dtype=np.complex128)
    if array.ndim != 2 or array.shape[0] != array.shape[1]:
        raise DimensionError(f"Operator must be square, got shape {array.shape}")
    if dim is not None and array.shape[0] != dim:
        raise DimensionError(f"Operator dimension {array.shape[0]} != expected {dim}")
    return array


def as_ket(psi, dim: Optional[int] = None) -> Ket:
    """Coerce to a complex column vector stored as a 1-D array"""
    array = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if dim is not None and array.shape[0] != dim:
        raise DimensionError(f"Ket dimension {array.shape[0]} != expected {dim}")
    return array


def _check_same_dim(A: Operator, B: Operator) -> None:
    if A.shape != B.shape:
        raise DimensionError(f"Dimension mismatch: {A.shape} vs {B.shape}")


def standard_operators(kind, dim: int, i: Optional[int] = None, j: Optional[int] = None) -> Operator:
    """Conventional operator of the requested kind on a dim-dimensional space"""
    try:
        kind = OperatorKind(kind)
    except ValueError as exc:
        raise ConfigError(f"Unknown operator kind {kind!r}") from exc
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise DimensionError(f"dim must be an integer >= 2, got {dim!r}")
    if kind in _QUBIT_KINDS and dim != 2:
        raise DimensionError(f"{kind.value} is a qubit operator, dim must be 2")

    if kind is OperatorKind.PAULI_X:
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if kind is OperatorKind.PAULI_Y:
        return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    if kind is OperatorKind.PAULI_Z:
        return np.diag([1.0, -1.0]).astype(np.complex128)
    if kind is OperatorKind.SIGMA_PLUS:
        # |e><g|
        return projector(QUBIT_EXCITED, QUBIT_GROUND, 2)
    if kind is OperatorKind.SIGMA_MINUS:
        # |g><e|
        return projector(QUBIT_GROUND, QUBIT_EXCITED, 2)
    if kind is OperatorKind.IDENTITY:
        return np.eye(dim, dtype=np.complex128)
    if kind is OperatorKind.ANNIHILATION:
        return np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(np.complex128)
    if kind is OperatorKind.NUMBER:
        return np.diag(np.arange(dim)).astype(np.complex128)

    if i is None or j is None:
        raise DimensionError("projector requires both indices i and j")
    return projector(i, j, dim)


def projector(i: int, j: int, dim: int) -> Operator:
    """|i><j| on a dim-dimensional space"""
    if not (0 <= i < dim and 0 <= j < dim):
        raise DimensionError(f"Projector indices ({i}, {j}) out of range for dim {dim}")
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[i, j] = 1.0
    return out


def identity(dim: int) -> Operator:
    return standard_operators(OperatorKind.IDENTITY, dim)


def sigma_minus() -> Operator:
    return standard_operators(OperatorKind.SIGMA_MINUS, 2)


def sigma_plus() -> Operator:
    return standard_operators(OperatorKind.SIGMA_PLUS, 2)


def pauli_x() -> Operator:
    return standard_operators(OperatorKind.PAULI_X, 2)


def pauli_y() -> Operator:
    return standard_operators(OperatorKind.PAULI_Y, 2)


def pauli_z() -> Operator:
    return standard_operators(OperatorKind.PAULI_Z, 2)


def annihilation(dim: int) -> Operator:
    return standard_operators(OperatorKind.ANNIHILATION, dim)


def basis_ket(dim: int, index: int) -> Ket:
    """Computational basis vector |index>"""
    if not 0 <= index < dim:
        raise DimensionError(f"Basis index {index} out of range for dim {dim}")
    psi = np.zeros(dim, dtype=np.complex128)
    psi[index] = 1.0
    return psi


# === Algebra ===

def adjoint(A) -> Operator:
    """Conjugate transpose"""
    A = as_operator(A)
    return A.conj().T.copy()


def multiply(A, B) -> Operator:
    A, B = as_operator(A), as_operator(B)
    _check_same_dim(A, B)
    return A @ B


def add_scaled(A, c: complex, B) -> Operator:
    """A + c B"""
    A, B = as_operator(A), as_operator(B)
    _check_same_dim(A, B)
    return A + complex(c) * B


def commutator(A: Operator, B: Operator) -> Operator:
    return A @ B - B @ A


def anticommutator(A: Operator, B: Operator) -> Operator:
    return A @ B + B @ A


def matrix_exponential(A, t: float = 1.0) -> Operator:
    """exp(A t) by Pade scaling-and-squaring"""
    A = as_operator(A)
    if not np.all(np.isfinite(A)) or not np.isfinite(t):
        raise NonFiniteError("matrix_exponential requires finite entries")
    return expm(A * t)


# === Vectorization ===

def vectorize(rho) -> NDArray[np.complex128]:
    """Column-stack a matrix: vec(rho)[i + d*j] = rho[i, j]"""
    rho = as_operator(rho)
    return rho.reshape(-1, order="F").copy()


def devectorize(v, dim: Optional[int] = None) -> DensityMatrix:
    """Inverse of vectorize"""
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise DimensionError(f"Vector of length {v.size} is not a vectorized {dim}x{dim} matrix")
    return v.reshape(dim, dim, order="F").copy()


def kron(A, B) -> Operator:
    """Kronecker product; vec(A X B) = kron(B^T, A) vec(X) under column stacking"""
    return np.kron(as_operator(A), as_operator(B))


# === States ===

def normalize(psi) -> Ket:
    psi = as_ket(psi)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise DimensionError("Cannot normalize the zero vector")
    return psi / norm


def ket_projector(psi) -> DensityMatrix:
    """|psi><psi|"""
    psi = as_ket(psi)
    return np.outer(psi, psi.conj())


def is_hermitian(A, tol: float = BetadyneConfig.HERMITIAN_TOL) -> bool:
    A = as_operator(A)
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= tol)


def is_unitary(U, tol: float = BetadyneConfig.UNITARY_TOL) -> bool:
    U = as_operator(U)
    return bool(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])), initial=0.0) <= tol)


def validate_density_matrix(rho, tol: float = BetadyneConfig.STRUCTURAL_TOL) -> DensityMatrix:
    """Return rho if it is Hermitian, unit-trace and positive within tol"""
    rho = as_operator(rho)
    if not is_hermitian(rho, tol):
        raise HermiticityError("Density matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1.0) > tol:
        raise StateError(f"Density matrix trace {trace.real:.3e} != 1")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise StateError("Density matrix has negative eigenvalues")
    return rho


def expectation(A, rho) -> complex:
    """Tr(A rho)"""
    return complex(np.trace(as_operator(A) @ as_operator(rho)))


def populations(rho) -> NDArray[np.float64]:
    return np.real(np.diag(as_operator(rho))).copy()


def bloch_vector(rho) -> Tuple[float, float, float]:
    """(<sigma_x>, <sigma_y>, <sigma_z>) of a qubit in (e, g) order"""
    rho = as_operator(rho, 2)
    return (
        expectation(pauli_x(), rho).real,
        expectation(pauli_y(), rho).real,
        expectation(pauli_z(), rho).real,
    )


def trace_distance(rho, sigma) -> float:
    """(1/2) sum |eigenvalues of rho - sigma|"""
    rho, sigma = as_operator(rho), as_operator(sigma)
    _check_same_dim(rho, sigma)
    difference = rho - sigma
    difference = 0.5 * (difference + difference.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(difference))))


# === Random instances (seeded) ===

def random_operator(dim: int, rng: np.random.Generator, scale: float = 1.0) -> Operator:
    return scale * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> Operator:
    A = random_operator(dim, rng, scale)
    return 0.5 * (A + A.conj().T)


def random_density_matrix(dim: int, rng: np.random.Generator) -> DensityMatrix:
    A = random_operator(dim, rng)
    rho = A @ A.conj().T
    return rho / np.trace(rho)


def random_unitary(dim: int, rng: np.random.Generator) -> Operator:
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng).astype(np.complex128)
