#!/usr/bin/env python3
"""
Invariance property suite.

Checks that the beta-dyne and channel-mixing transforms leave the Liouvillian
unchanged, that the two effective-Hamiltonian paths agree, that the Kraus
step is trace preserving to second order, and that the closed-form oracles
agree with the general eigensolver. All random cases derive from one seed.
"""

import logging
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel

from .config import BetadyneConfig
from .exceptions import BetadyneError
from .model import (
    JumpChannel,
    LindbladModel,
    UnravelingSpec,
    apply_unraveling,
    betadyne,
    kraus_residual,
    kraus_step,
    lindblad_rhs,
    liouvillian_matrix,
    mix_channels,
    nhh,
    nhh_beta,
)
from .quantum_core import random_density_matrix, random_hermitian, random_operator, random_unitary
from .scenarios import (
    DrivenQubitParams,
    KerrParams,
    KERR_REFERENCE_BETA,
    build_driven_qubit,
    build_kerr,
    driven_qubit_eigenvalues,
    kerr_nhh_closed,
)
from .spectral import eig2_closed, eig3_closed, eigendecompose

logger = logging.getLogger(__name__)

INVARIANCE_TOL = 1e-9
CLOSED_FORM_TOL = 1e-12
ORACLE_TOL = 1e-9
ORDER_TOL = 0.1


class PropertyResult(BaseModel):
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""


class ValidationReport(BaseModel):
    seed: int
    cases: int
    properties: List[PropertyResult]

    @property
    def passed(self) -> bool:
        return all(prop.passed for prop in self.properties)

    @property
    def failures(self) -> List[str]:
        return [prop.name for prop in self.properties if not prop.passed]


def random_model(rng: np.random.Generator, dim: Optional[int] = None, channels: Optional[int] = None) -> LindbladModel:
    dim = dim or int(rng.integers(2, 5))
    channels = channels if channels is not None else int(rng.integers(1, 4))
    return LindbladModel(
        hamiltonian=random_hermitian(dim, rng),
        channels=[
            JumpChannel(rate=float(rng.uniform(0.1, 2.0)), operator=random_operator(dim, rng, 0.5))
            for _ in range(channels)
        ],
    )


def random_betas(rng: np.random.Generator, count: int) -> List[complex]:
    return list(rng.standard_normal(count) + 1j * rng.standard_normal(count))


def _result(name: str, residual: float, tolerance: float, detail: str = "") -> PropertyResult:
    passed = bool(np.isfinite(residual) and residual <= tolerance)
    return PropertyResult(name=name, passed=passed, residual=float(residual), tolerance=tolerance, detail=detail)


# === Properties ===

def check_betadyne_invariance(models: List[LindbladModel], rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    for model in models:
        spec = UnravelingSpec(betas=random_betas(rng, len(model.channels)))
        transformed = betadyne(model, spec)
        worst = max(worst, float(np.max(np.abs(liouvillian_matrix(model) - liouvillian_matrix(transformed)))))
    return _result("betadyne_liouvillian_invariance", worst, INVARIANCE_TOL)


def check_mixing_invariance(models: List[LindbladModel], rng: np.random.Generator) -> PropertyResult:
    """Mixing keeps both the Liouvillian and the effective Hamiltonian"""
    worst = 0.0
    for model in models:
        mixed = mix_channels(model, random_unitary(len(model.channels), rng))
        worst = max(
            worst,
            float(np.max(np.abs(liouvillian_matrix(model) - liouvillian_matrix(mixed)))),
            float(np.max(np.abs(nhh(model) - nhh(mixed)))),
        )
    return _result("mixing_invariance", worst, INVARIANCE_TOL)


def check_unraveling_invariance(models: List[LindbladModel], rng: np.random.Generator) -> PropertyResult:
    """Mixing followed by displacement keeps the Liouvillian"""
    worst = 0.0
    for model in models:
        count = len(model.channels)
        spec = UnravelingSpec(betas=random_betas(rng, count), mixing=random_unitary(count, rng))
        transformed = apply_unraveling(model, spec)
        worst = max(worst, float(np.max(np.abs(liouvillian_matrix(model) - liouvillian_matrix(transformed)))))
    return _result("unraveling_liouvillian_invariance", worst, INVARIANCE_TOL)


def check_nhh_paths(models: List[LindbladModel], rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    for model in models:
        spec = UnravelingSpec(betas=random_betas(rng, len(model.channels)))
        worst = max(worst, float(np.max(np.abs(nhh(betadyne(model, spec)) - nhh_beta(model, spec)))))
    return _result("nhh_two_path_equality", worst, INVARIANCE_TOL)


def check_trace_preservation(models: List[LindbladModel], rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    for model in models:
        drho = lindblad_rhs(model, random_density_matrix(model.dim, rng))
        worst = max(worst, abs(np.trace(drho)), float(np.max(np.abs(drho - drho.conj().T))))
    return _result("lindblad_trace_and_hermiticity", worst, INVARIANCE_TOL)


def check_kraus_order(models: List[LindbladModel], rng: np.random.Generator) -> PropertyResult:
    """Residual of sum K^dag K - 1 scales as dt^2"""
    worst = 0.0
    for model in models:
        coarse = kraus_residual(kraus_step(model, 2e-3))
        fine = kraus_residual(kraus_step(model, 1e-3))
        if fine == 0.0:
            continue
        worst = max(worst, abs(np.log2(coarse / fine) - 2.0))
    return _result("kraus_cptp_order", worst, ORDER_TOL, "measured order deviation from 2")


def check_kerr_closed_form(rng: np.random.Generator) -> PropertyResult:
    worst = 0.0
    drives = [0.1, 0.3 + 0.2j] + list(0.5 * (rng.standard_normal(3) + 1j * rng.standard_normal(3)))
    betas = [0.0, KERR_REFERENCE_BETA] + random_betas(rng, 3)
    for drive, beta in zip(drives, betas):
        params = KerrParams(kerr=2.0, gamma=1.0, drive=drive, truncation=3)
        generic = nhh_beta(build_kerr(params), UnravelingSpec(betas=[beta]))
        worst = max(worst, float(np.max(np.abs(generic - kerr_nhh_closed(params, beta)))))
    return _result("kerr_closed_form", worst, CLOSED_FORM_TOL)


def check_driven_qubit_closed_form() -> PropertyResult:
    worst = 0.0
    for omega in np.linspace(0.1, 2.0, 20):
        params = DrivenQubitParams(omega=float(omega), gamma_minus=1.0)
        model = build_driven_qubit(params)
        for y in np.linspace(-1.0, 1.0, 20):
            beta = 1j * float(y)
            generic = eigendecompose(nhh_beta(model, UnravelingSpec(betas=[beta]))).eigenvalues
            closed = driven_qubit_eigenvalues(params, beta)
            worst = max(worst, _spectrum_distance(closed, generic))
    return _result("driven_qubit_closed_form", worst, ORACLE_TOL)


def _spectrum_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Worst nearest-neighbour distance in both directions"""
    distances = np.abs(a[:, None] - b[None, :])
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def check_oracles(rng: np.random.Generator, cases: int) -> List[PropertyResult]:
    results = []
    for dim, solver in ((2, eig2_closed), (3, eig3_closed)):
        worst = 0.0
        for _ in range(cases):
            A = random_operator(dim, rng)
            worst = max(worst, _spectrum_distance(solver(A).eigenvalues, eigendecompose(A).eigenvalues))
        results.append(_result(f"closed_form_eigensolver_{dim}x{dim}", worst, ORACLE_TOL))
    return results


def _guarded(name: str, check: Callable[[], PropertyResult]) -> PropertyResult:
    try:
        return check()
    except BetadyneError as exc:
        logger.error("❌ Property %s raised %s", name, exc)
        return PropertyResult(name=name, passed=False, residual=float("inf"), tolerance=0.0, detail=str(exc))


def run_validation_suite(seed: int = BetadyneConfig.DEFAULT_SEED, cases: int = 100) -> ValidationReport:
    """Run every property on seeded random and scenario cases"""
    rng = np.random.default_rng(seed)
    models = [random_model(rng) for _ in range(cases)]
    properties = [
        _guarded("betadyne_liouvillian_invariance", lambda: check_betadyne_invariance(models, rng)),
        _guarded("mixing_invariance", lambda: check_mixing_invariance(models, rng)),
        _guarded("unraveling_liouvillian_invariance", lambda: check_unraveling_invariance(models, rng)),
        _guarded("nhh_two_path_equality", lambda: check_nhh_paths(models, rng)),
        _guarded("lindblad_trace_and_hermiticity", lambda: check_trace_preservation(models, rng)),
        _guarded("kraus_cptp_order", lambda: check_kraus_order(models, rng)),
        _guarded("kerr_closed_form", lambda: check_kerr_closed_form(rng)),
        _guarded("driven_qubit_closed_form", check_driven_qubit_closed_form),
    ]
    properties.extend(check_oracles(rng, 10 * cases))
    report = ValidationReport(seed=seed, cases=cases, properties=properties)
    for prop in properties:
        logger.info("%s %s residual=%.3e tol=%.1e", "✅" if prop.passed else "❌", prop.name, prop.residual, prop.tolerance)
    return report


def validate_model(model: LindbladModel, spec: UnravelingSpec, seed: int = BetadyneConfig.DEFAULT_SEED) -> List[PropertyResult]:
    """Per-model subset of the suite for a user-supplied model and unraveling"""
    rng = np.random.default_rng(seed)
    results = [
        _result(
            "model_unraveling_invariance",
            float(np.max(np.abs(liouvillian_matrix(model) - liouvillian_matrix(apply_unraveling(model, spec))))),
            INVARIANCE_TOL,
        ),
        check_trace_preservation([model], rng),
    ]
    if model.channels:
        results.append(check_kraus_order([model], rng))
    if spec.mixing is None:
        results.append(
            _result(
                "model_nhh_two_path_equality",
                float(np.max(np.abs(nhh(betadyne(model, spec)) - nhh_beta(model, spec)))),
                INVARIANCE_TOL,
            )
        )
    return results
