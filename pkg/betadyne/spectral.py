#!/usr/bin/env python3
"""
Spectral analysis of small non-Hermitian matrices.

Eigendecomposition with closed-form 2x2 / 3x3 oracles, a scalar coalescence
measure that is zero exactly at an exceptional point (eigenvalues AND
eigenvectors coalesce), branch tracking along parameter sweeps, and a
multistart Nelder-Mead search for exceptional points with continuation of
the EP displacement along a second parameter.

Eigenvalues are reported in descending real part, then descending imaginary
part. Near a defective matrix LAPACK residuals degrade to about sqrt(eps);
EP detection relies on the coalescence measure, not on residual quality.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize

from .config import BetadyneConfig
from .exceptions import BetadyneError, ConfigError, DimensionError, SpectralError
from .quantum_core import Ket, Operator, as_ket, as_operator

logger = logging.getLogger(__name__)

Parameter = Union[complex, float]
OperatorFamily = Callable[[Parameter], Operator]


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues and normalized right eigenvectors (columns of ``vectors``)"""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def right_vectors(self) -> List[Ket]:
        return [self.vectors[:, k] for k in range(self.dim)]

    def residuals(self) -> np.ndarray:
        """||A v_j - E_j v_j|| for each j"""
        return np.linalg.norm(self.matrix @ self.vectors - self.vectors * self.eigenvalues, axis=0)


@dataclass(frozen=True)
class CoalescenceReport:
    """Pairwise eigenvalue gaps and eigenvector overlaps of one matrix"""

    min_gap: float
    max_overlap: float
    measure: float
    pair: Tuple[int, int]
    eigensystem: EigenSystem


@dataclass(frozen=True)
class EPSearchResult:
    location: Parameter
    report: CoalescenceReport
    converged: bool
    iterations: int
    evaluations: int = 0


@dataclass(frozen=True)
class BranchSet:
    """Eigenvalue branches along a sweep; order[k, b] indexes sweep[k]'s eigenvalues"""

    values: np.ndarray
    order: np.ndarray


def _sort_order(eigenvalues: np.ndarray) -> np.ndarray:
    return np.lexsort((-eigenvalues.imag, -eigenvalues.real))


def _normalized_columns(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=0)
    norms[norms == 0.0] = 1.0
    return vectors / norms


def _build_eigensystem(A: Operator, eigenvalues: np.ndarray, vectors: np.ndarray) -> EigenSystem:
    order = _sort_order(eigenvalues)
    return EigenSystem(
        eigenvalues=eigenvalues[order],
        vectors=_normalized_columns(vectors[:, order]),
        matrix=A,
    )


def eigendecompose(A) -> EigenSystem:
    """General dense eigensolver (LAPACK geev)"""
    A = as_operator(A)
    if A.shape[0] > BetadyneConfig.MAX_DIM:
        logger.warning("Eigendecomposition of a %dx%d matrix exceeds the dense target", *A.shape)
    if not np.all(np.isfinite(A)):
        raise SpectralError("Matrix has non-finite entries")
    try:
        eigenvalues, vectors = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"Eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(eigenvalues)) and np.all(np.isfinite(vectors))):
        raise SpectralError("Eigensolver returned non-finite values")
    return _build_eigensystem(A, eigenvalues, vectors)


def eig2_closed(A) -> EigenSystem:
    """Quadratic-formula eigensystem of a 2x2 matrix [[a, b], [c, d]]

    E = (2d + a~ +- sqrt(a~^2 + 4bc)) / 2 with a~ = a - d, eigenvectors
    (a~ +- sqrt(...), 2c); falls back to (b, E - a) when c vanishes.
    """
    A = as_operator(A, 2)
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    shifted = a - d
    root = np.sqrt(shifted * shifted + 4.0 * b * c)
    eigenvalues = np.array([(2.0 * d + shifted + root) / 2.0, (2.0 * d + shifted - root) / 2.0])
    columns = []
    for sign, E in zip((1.0, -1.0), eigenvalues):
        primary = np.array([shifted + sign * root, 2.0 * c])
        fallback = np.array([b, E - a])
        vector = primary if np.linalg.norm(primary) >= np.linalg.norm(fallback) else fallback
        if np.linalg.norm(vector) == 0.0:
            vector = np.array([1.0, 0.0]) if sign > 0 else np.array([0.0, 1.0])
        columns.append(vector)
    return _build_eigensystem(A, eigenvalues, np.array(columns, dtype=np.complex128).T)


def characteristic_coefficients(A) -> Tuple[complex, complex, complex]:
    """(a, b, c) of det(lambda - A) = lambda^3 + a lambda^2 + b lambda + c"""
    A = as_operator(A, 3)
    trace = np.trace(A)
    return (
        complex(-trace),
        complex(0.5 * (trace * trace - np.trace(A @ A))),
        complex(-np.linalg.det(A)),
    )


def cubic_discriminant(a: complex, b: complex, c: complex) -> complex:
    """Discriminant of lambda^3 + a lambda^2 + b lambda + c"""
    return 18 * a * b * c - 4 * a ** 3 * c + a ** 2 * b ** 2 - 4 * b ** 3 - 27 * c ** 2


def _cubic_roots(a: complex, b: complex, c: complex) -> np.ndarray:
    delta0 = a * a - 3 * b
    delta1 = 2 * a ** 3 - 9 * a * b + 27 * c
    root = np.sqrt(complex(delta1 * delta1 - 4 * delta0 ** 3))
    # larger |C| avoids cancellation
    candidates = [(delta1 + root) / 2, (delta1 - root) / 2]
    inner = max(candidates, key=abs)
    if abs(inner) == 0.0:
        return np.full(3, -a / 3, dtype=np.complex128)
    C = complex(inner) ** (1.0 / 3.0)
    xi = complex(-0.5, np.sqrt(3.0) / 2.0)
    roots = []
    for k in range(3):
        Ck = C * xi ** k
        roots.append(-(a + Ck + delta0 / Ck) / 3)
    return np.array(roots, dtype=np.complex128)


def _polish_root(root: complex, a: complex, b: complex, c: complex) -> complex:
    value = ((root + a) * root + b) * root + c
    slope = (3 * root + 2 * a) * root + b
    if abs(slope) > 1e-8 * max(1.0, abs(root) ** 2):
        return root - value / slope
    return root


def _null_vector3(M: np.ndarray) -> np.ndarray:
    """Null vector of a rank-deficient 3x3 matrix from the largest row cross product"""
    products = [np.cross(M[i], M[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    best = max(products, key=np.linalg.norm)
    if np.linalg.norm(best) < 1e-300:
        _, _, vh = np.linalg.svd(M)
        return vh[-1].conj()
    return best


def eig3_closed(A) -> EigenSystem:
    """Cardano eigensystem of a 3x3 matrix, roots polished by one Newton step"""
    A = as_operator(A, 3)
    a, b, c = characteristic_coefficients(A)
    roots = np.array([_polish_root(r, a, b, c) for r in _cubic_roots(a, b, c)])
    vectors = np.array([_null_vector3(A - r * np.eye(3)) for r in roots], dtype=np.complex128).T
    return _build_eigensystem(A, roots, vectors)


def overlap(u, v) -> float:
    """|<u|v>| / (||u|| ||v||)"""
    u, v = as_ket(u), as_ket(v)
    if u.shape != v.shape:
        raise DimensionError(f"Ket dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    norms = np.linalg.norm(u) * np.linalg.norm(v)
    if norms == 0.0:
        raise DimensionError("Overlap with a zero vector")
    return float(min(1.0, abs(np.vdot(u, v)) / norms))


def coalescence_from_eigensystem(system: EigenSystem) -> CoalescenceReport:
    """min over pairs of |E_i - E_j| / s + (1 - |<Psi_i|Psi_j>|), s = max(1, spectral radius)"""
    if system.dim < 2:
        raise DimensionError("Coalescence needs at least two eigenvalues")
    scale = max(1.0, float(np.max(np.abs(system.eigenvalues))))
    min_gap, max_overlap = np.inf, 0.0
    best_measure, best_pair = np.inf, (0, 1)
    for i, j in itertools.combinations(range(system.dim), 2):
        gap = float(abs(system.eigenvalues[i] - system.eigenvalues[j]))
        ov = overlap(system.vectors[:, i], system.vectors[:, j])
        min_gap = min(min_gap, gap)
        max_overlap = max(max_overlap, ov)
        measure = gap / scale + (1.0 - ov)
        if measure < best_measure:
            best_measure, best_pair = measure, (i, j)
    return CoalescenceReport(
        min_gap=min_gap,
        max_overlap=max_overlap,
        measure=max(0.0, best_measure),
        pair=best_pair,
        eigensystem=system,
    )


def coalescence(A) -> CoalescenceReport:
    return coalescence_from_eigensystem(eigendecompose(A))


def scan_coalescence(family: OperatorFamily, points: Sequence[Parameter], workers: int = 1) -> List[CoalescenceReport]:
    """Coalescence reports along a list of parameter values, in input order"""
    def evaluate(x):
        return coalescence(family(x))

    if workers <= 1:
        return [evaluate(x) for x in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, points))


# === Branch tracking ===

def _best_assignment(cost: np.ndarray) -> np.ndarray:
    """assignment[b] = column matched to row b, minimizing total cost"""
    d = cost.shape[0]
    if d <= 3:
        best, best_cost = None, np.inf
        for perm in itertools.permutations(range(d)):
            total = sum(cost[b, perm[b]] for b in range(d))
            if total < best_cost:
                best, best_cost = perm, total
        return np.array(best)
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(d, dtype=int)
    assignment[rows] = cols
    return assignment


def track_branches(sweep: Sequence[EigenSystem]) -> BranchSet:
    """Match eigenvalues between consecutive sweep points into continuous branches

    Each step is matched against a linear extrapolation of the branches so
    that crossings keep their slopes.
    """
    if len(sweep) < 2:
        raise DimensionError("Branch tracking needs at least two sweep points")
    d = sweep[0].dim
    if any(system.dim != d for system in sweep):
        raise DimensionError("All eigensystems along a sweep must share one dimension")

    values = np.empty((len(sweep), d), dtype=np.complex128)
    order = np.empty((len(sweep), d), dtype=int)
    values[0] = sweep[0].eigenvalues
    order[0] = np.arange(d)
    for k in range(1, len(sweep)):
        prediction = values[k - 1] if k == 1 else 2 * values[k - 1] - values[k - 2]
        candidates = sweep[k].eigenvalues
        cost = np.abs(prediction[:, None] - candidates[None, :])
        assignment = _best_assignment(cost)
        order[k] = assignment
        values[k] = candidates[assignment]
    return BranchSet(values=values, order=order)


# === Exceptional-point search ===

def _objective(family: OperatorFamily, is_complex: bool) -> Callable[[np.ndarray], float]:
    def measure(x: np.ndarray) -> float:
        parameter = complex(x[0], x[1]) if is_complex else float(x[0])
        try:
            return coalescence(family(parameter)).measure
        except (BetadyneError, ValueError):
            return 1e6

    return measure


def _start_points(x0: Parameter, is_complex: bool, box, points: int) -> Tuple[List[np.ndarray], float]:
    start = np.array([x0.real, x0.imag]) if is_complex else np.array([float(np.real(x0))])
    if box is None:
        return [start], 0.05
    if is_complex:
        (re_min, re_max), (im_min, im_max) = box
        re_axis = np.linspace(re_min, re_max, points)
        im_axis = np.linspace(im_min, im_max, points)
        grid = [np.array([re, im]) for im in im_axis for re in re_axis]
        step = max(re_max - re_min, im_max - im_min) / max(points - 1, 1)
    else:
        low, high = box
        grid = [np.array([x]) for x in np.linspace(low, high, points)]
        step = (high - low) / max(points - 1, 1)
    return [start] + grid, max(step / 2.0, 1e-6)


def find_ep(
    family: OperatorFamily,
    x0: Parameter,
    tol: float = BetadyneConfig.EP_SEARCH_TOL,
    box=None,
    points: int = BetadyneConfig.MULTISTART_POINTS,
    workers: int = 1,
) -> EPSearchResult:
    """Minimize the coalescence measure of ``family`` by multistart Nelder-Mead

    A complex ``x0`` searches the complex plane (box = ((re_min, re_max),
    (im_min, im_max))); a real ``x0`` searches the real line (box = (min,
    max)). Starts are x0 followed by a points (x points) grid over the box.
    """
    if not tol > 0:
        raise ConfigError("tol must be positive")
    is_complex = isinstance(x0, complex)
    objective = _objective(family, is_complex)
    starts, step = _start_points(x0, is_complex, box, points)

    def run(start: np.ndarray):
        simplex = [start] + [start + step * unit for unit in np.eye(start.size)]
        return minimize(
            objective,
            start,
            method="Nelder-Mead",
            options={
                "initial_simplex": np.array(simplex),
                "xatol": 1e-14,
                "fatol": tol * 1e-3,
                "maxiter": BetadyneConfig.NELDER_MEAD_MAXITER,
                "maxfev": 2 * BetadyneConfig.NELDER_MEAD_MAXITER,
            },
        )

    if workers <= 1:
        outcomes = [run(start) for start in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, starts))

    # ties resolved by start index
    best_index = min(range(len(outcomes)), key=lambda k: (outcomes[k].fun, k))
    best = outcomes[best_index]
    location: Parameter = complex(best.x[0], best.x[1]) if is_complex else float(best.x[0])
    report = coalescence(family(location))
    converged = report.measure <= tol
    if not converged:
        logger.warning("EP search did not converge: best measure %.3e at %s", report.measure, location)
    return EPSearchResult(
        location=location,
        report=report,
        converged=converged,
        iterations=int(best.nit),
        evaluations=int(sum(outcome.nfev for outcome in outcomes)),
    )


def cubic_ep_condition(family: OperatorFamily, beta: Parameter) -> complex:
    """Discriminant of the characteristic cubic of family(beta); zero iff two eigenvalues coincide"""
    return cubic_discriminant(*characteristic_coefficients(family(beta)))


@dataclass(frozen=True)
class EPLocusPoint:
    """EP displacement found at one value of the swept parameter"""

    param: Parameter
    result: EPSearchResult

    @property
    def beta(self) -> complex:
        return complex(self.result.location)


def trace_ep_locus(
    family2: Callable[[Parameter, complex], Operator],
    xs: Sequence[Parameter],
    beta0: complex,
    tol: float = BetadyneConfig.EP_SEARCH_TOL,
) -> List[EPLocusPoint]:
    """Follow the EP displacement of family2(x, beta) along xs

    Each search starts at the last converged location, beta0 for the first.
    Unconverged points are kept in the result and do not move the start.
    """
    start = complex(beta0)
    locus: List[EPLocusPoint] = []
    for x in xs:
        result = find_ep(lambda beta, x=x: family2(x, beta), start, tol=tol)
        locus.append(EPLocusPoint(param=x, result=result))
        if result.converged:
            start = complex(result.location)
    missed = sum(not point.result.converged for point in locus)
    if missed:
        logger.warning("EP locus: %d of %d points did not converge", missed, len(locus))
    return locus
