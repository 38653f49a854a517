#!/usr/bin/env python3
"""
Prebuilt models with analytic oracles.

- gain-loss qubit: (omega/2) sigma_z with decay sqrt(gamma_-) sigma_- and gain sqrt(gamma_+) sigma_+
- three-level emitter: driven g-f transition cascading through e; realizes the gain-loss qubit
- Kerr resonator: driven nonlinear cavity with photon loss, truncated Fock space
- driven qubit: (omega/2) sigma_x with decay
- decay qubit: (omega/2) sigma_z with decay only

Builders return plain LindbladModels; all physics flows through the generic
model, spectral and dynamics modules.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Type

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .config import BetadyneConfig
from .exceptions import ConfigError
from .model import JumpChannel, LindbladModel, UnravelingSpec, nhh_beta
from .quantum_core import (
    Operator,
    annihilation,
    pauli_x,
    pauli_z,
    projector,
    sigma_minus,
    sigma_plus,
)
from .spectral import coalescence

logger = logging.getLogger(__name__)

# Three-level basis order
LEVEL_G, LEVEL_E, LEVEL_F = 0, 1, 2

KERR_REFERENCE_BETA = complex(-0.5275, -0.078)


def _as_complex(value) -> complex:
    if isinstance(value, dict):
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    return complex(value)


# === Parameter records ===

class GainLossQubitParams(BaseModel):
    omega: float = 1.0
    gamma_minus: float = Field(default=1.0, ge=0.0)
    gamma_plus: float = Field(default=0.5, ge=0.0)


class ThreeLevelParams(BaseModel):
    """Level energies 0, omega, 2 omega + delta_omega; the drive couples g and f"""

    omega: float = 1.0
    delta_omega: float = 0.0
    Omega: float = 0.05
    gamma_eg: float = Field(default=0.01, ge=0.0)
    gamma_fe: float = Field(default=1.0, gt=0.0)
    drive_detuning: float = 0.0

    @property
    def gamma_eff(self) -> float:
        """Gain rate after eliminating |f>: 4 Omega^2 / gamma_fe"""
        return 4.0 * self.Omega ** 2 / self.gamma_fe

    @property
    def photon_frequencies(self) -> Dict[str, float]:
        """Photon energies emitted by the decay (e -> g) and gain (f -> e) jumps"""
        return {"decay": self.omega, "gain": self.omega + self.delta_omega}


class KerrParams(BaseModel):
    detuning: float = 0.0
    kerr: float = 2.0
    drive: Any = 0.1
    gamma: float = Field(default=1.0, ge=0.0)
    truncation: int = Field(default=3, ge=3)

    @field_validator("drive", mode="before")
    @classmethod
    def _coerce_drive(cls, value):
        return _as_complex(value)


class DrivenQubitParams(BaseModel):
    omega: float = 1.0
    gamma_minus: float = Field(default=1.0, ge=0.0)


class DecayQubitParams(BaseModel):
    omega: float = 0.0
    gamma: float = Field(default=1.0, ge=0.0)


# === Gain/loss qubit ===

def build_gain_loss_qubit(p: GainLossQubitParams) -> LindbladModel:
    return LindbladModel(
        hamiltonian=0.5 * p.omega * pauli_z(),
        channels=[
            JumpChannel(rate=p.gamma_minus, operator=sigma_minus()),
            JumpChannel(rate=p.gamma_plus, operator=sigma_plus()),
        ],
    )


def gain_loss_ep_candidates(p: GainLossQubitParams) -> List[complex]:
    """+-c and +-c* with c = (2 omega + i (gamma_- - gamma_+)) / (4 sqrt(gamma_- gamma_+))

    Only +-c coalesce; the conjugates are returned so callers can check.
    """
    product = p.gamma_minus * p.gamma_plus
    if product <= 0.0:
        raise ConfigError("EP candidates need both gain and loss rates to be positive")
    c = complex(2.0 * p.omega, p.gamma_minus - p.gamma_plus) / (4.0 * np.sqrt(product))
    return [c, -c, c.conjugate(), -c.conjugate()]


def gain_loss_ep_locations(p: GainLossQubitParams, tol: float = BetadyneConfig.EP_SEARCH_TOL) -> List[complex]:
    """Candidates at which the equal-displacement NHH actually has an EP"""
    model = build_gain_loss_qubit(p)
    locations = []
    for beta in gain_loss_ep_candidates(p):
        measure = coalescence(nhh_beta(model, UnravelingSpec.uniform(beta, 2))).measure
        if measure <= tol:
            locations.append(beta)
    return locations


# === Three-level emitter ===

def build_three_level(p: ThreeLevelParams) -> LindbladModel:
    """Interaction-picture model on (|g>, |e>, |f>)

    The drive frame removes the f energy; |e> carries no coherent coupling,
    so its energy drops out as well. omega and delta_omega only label the
    emitted photons.
    """
    H = -p.drive_detuning * projector(LEVEL_F, LEVEL_F, 3)
    H = H + p.Omega * (projector(LEVEL_G, LEVEL_F, 3) + projector(LEVEL_F, LEVEL_G, 3))
    return LindbladModel(
        hamiltonian=H,
        channels=[
            JumpChannel(rate=p.gamma_eg, operator=projector(LEVEL_G, LEVEL_E, 3)),
            JumpChannel(rate=p.gamma_fe, operator=projector(LEVEL_E, LEVEL_F, 3)),
        ],
    )


def build_effective_two_level(p: ThreeLevelParams) -> LindbladModel:
    """Gain-loss qubit left after eliminating |f>: gamma_- = gamma_eg, gamma_+ = gamma_eff"""
    if p.gamma_fe < 10.0 * max(p.Omega, p.gamma_eg):
        logger.warning("⚠️ gamma_fe=%.3g is not much larger than Omega and gamma_eg", p.gamma_fe)
    return build_gain_loss_qubit(
        GainLossQubitParams(omega=p.omega, gamma_minus=p.gamma_eg, gamma_plus=p.gamma_eff)
    )


# === Kerr resonator ===

def build_kerr(p: KerrParams) -> LindbladModel:
    """-Delta a^dag a + U a^dag^2 a^2 - i (alpha a^dag - alpha* a), loss gamma D[a]"""
    a = annihilation(p.truncation)
    ad = a.conj().T
    alpha = p.drive
    H = -p.detuning * (ad @ a) + p.kerr * (ad @ ad @ a @ a) - 1j * (alpha * ad - np.conj(alpha) * a)
    return LindbladModel(hamiltonian=H, channels=[JumpChannel(rate=p.gamma, operator=a)])


def kerr_nhh_closed(p: KerrParams, beta: complex) -> Operator:
    """Two-photon displaced NHH written out entrywise"""
    alpha, g, U = p.drive, p.gamma, p.kerr
    bc = np.conj(beta)
    r2 = np.sqrt(2.0)
    H = np.array(
        [
            [0.0, 1j * np.conj(alpha) - 1j * g * bc, 0.0],
            [-1j * alpha, -0.5j * g - p.detuning, 1j * r2 * (np.conj(alpha) - g * bc)],
            [0.0, -1j * r2 * alpha, -1j * g + 2.0 * U - 2.0 * p.detuning],
        ],
        dtype=np.complex128,
    )
    return H - 0.5j * g * abs(beta) ** 2 * np.eye(3)


# === Driven qubit ===

def build_driven_qubit(p: DrivenQubitParams) -> LindbladModel:
    return LindbladModel(
        hamiltonian=0.5 * p.omega * pauli_x(),
        channels=[JumpChannel(rate=p.gamma_minus, operator=sigma_minus())],
    )


def driven_qubit_eigenvalues(p: DrivenQubitParams, beta: complex = 0.0) -> np.ndarray:
    """(-i gamma +- sqrt(4 omega^2 - gamma^2 - 8 i gamma omega beta*)) / 4 - i gamma |beta|^2 / 2"""
    g, w = p.gamma_minus, p.omega
    root = np.sqrt(complex(4.0 * w * w - g * g - 8j * g * w * np.conj(beta)))
    shift = -0.5j * g * abs(beta) ** 2
    values = np.array([(-1j * g + root) / 4.0 + shift, (-1j * g - root) / 4.0 + shift])
    return values[np.lexsort((-values.imag, -values.real))]


def driven_qubit_ep_beta(p: DrivenQubitParams) -> complex:
    """i (4 omega^2 - gamma^2) / (8 gamma omega)"""
    if p.omega == 0.0 or p.gamma_minus == 0.0:
        raise ConfigError("EP displacement needs nonzero omega and gamma_minus")
    return 1j * (4.0 * p.omega ** 2 - p.gamma_minus ** 2) / (8.0 * p.gamma_minus * p.omega)


def driven_qubit_ep_omega(gamma_minus: float, beta: complex) -> float:
    """EP drive strength for a purely imaginary displacement i y: gamma (y + sqrt(y^2 + 1/4))"""
    beta = complex(beta)
    if abs(beta.real) > BetadyneConfig.STRUCTURAL_TOL:
        raise ConfigError("Closed-form EP drive needs a purely imaginary displacement")
    y = beta.imag
    return gamma_minus * (y + np.sqrt(y * y + 0.25))


# === Decay qubit ===

def build_decay_qubit(p: DecayQubitParams) -> LindbladModel:
    return LindbladModel(
        hamiltonian=0.5 * p.omega * pauli_z(),
        channels=[JumpChannel(rate=p.gamma, operator=sigma_minus())],
    )


# === Registry ===

@dataclass(frozen=True)
class Scenario:
    name: str
    params: Type[BaseModel]
    build: Callable[[Any], LindbladModel]
    description: str


SCENARIOS: Dict[str, Scenario] = {
    scenario.name: scenario
    for scenario in (
        Scenario("gain-loss-qubit", GainLossQubitParams, build_gain_loss_qubit, "qubit with decay and gain"),
        Scenario("three-level", ThreeLevelParams, build_three_level, "driven three-level emitter"),
        Scenario("kerr", KerrParams, build_kerr, "driven Kerr resonator with photon loss"),
        Scenario("driven-qubit", DrivenQubitParams, build_driven_qubit, "resonantly driven decaying qubit"),
        Scenario("decay-qubit", DecayQubitParams, build_decay_qubit, "qubit with spontaneous decay"),
    )
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ConfigError(f"Unknown scenario '{name}'; choose from {', '.join(sorted(SCENARIOS))}") from None


def build_scenario(name: str, params: Optional[Dict[str, Any]] = None):
    """(validated params, model) for a registered scenario"""
    scenario = get_scenario(name)
    record = scenario.params(**(params or {}))
    return record, scenario.build(record)
