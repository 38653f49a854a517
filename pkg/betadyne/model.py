#!/usr/bin/env python3
"""
Lindblad models and their unravelings.

A model is a Hermitian Hamiltonian plus jump channels (rate, operator). The
beta-dyne transform displaces every jump operator by a complex constant and
compensates in the Hamiltonian; channel mixing applies a unitary to the
rate-weighted jump operators. Both leave the master equation unchanged, only
the beta-dyne transform changes the effective non-Hermitian Hamiltonian.
"""

import logging
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import BetadyneConfig
from .exceptions import DimensionError, GridError, HermiticityError, UnitarityError
from .quantum_core import (
    DensityMatrix,
    Operator,
    SuperOperator,
    anticommutator,
    as_operator,
    commutator,
    devectorize,
    identity,
    is_hermitian,
    is_unitary,
)

logger = logging.getLogger(__name__)


def _frozen_array(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.complex128)
    array.flags.writeable = False
    return array


class JumpChannel(BaseModel):
    """One dissipation channel gamma * D[J]"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rate: float = Field(ge=0.0)
    operator: np.ndarray

    @field_validator("operator", mode="before")
    @classmethod
    def _coerce_operator(cls, value):
        return _frozen_array(as_operator(value))

    @property
    def dim(self) -> int:
        return self.operator.shape[0]


class LindbladModel(BaseModel):
    """Hermitian Hamiltonian plus a list of jump channels"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    hamiltonian: np.ndarray
    channels: Tuple[JumpChannel, ...] = ()

    @field_validator("hamiltonian", mode="before")
    @classmethod
    def _coerce_hamiltonian(cls, value):
        return _frozen_array(as_operator(value))

    @field_validator("channels", mode="before")
    @classmethod
    def _coerce_channels(cls, value):
        return tuple(value)

    @model_validator(mode="after")
    def _check_structure(self):
        if not is_hermitian(self.hamiltonian, BetadyneConfig.HERMITIAN_TOL):
            deviation = np.max(np.abs(self.hamiltonian - self.hamiltonian.conj().T))
            raise HermiticityError(f"Hamiltonian is not Hermitian (max deviation {deviation:.3e})")
        dim = self.hamiltonian.shape[0]
        if dim > BetadyneConfig.MAX_DIM:
            logger.warning("Model dimension %d exceeds the dense target of %d", dim, BetadyneConfig.MAX_DIM)
        for index, channel in enumerate(self.channels):
            if channel.dim != dim:
                raise DimensionError(f"Channel {index} has dimension {channel.dim}, model has {dim}")
        return self

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def rates(self) -> List[float]:
        return [channel.rate for channel in self.channels]

    @property
    def max_jump_rate(self) -> float:
        """max_mu gamma_mu ||J_mu||^2 (spectral norm), bounds jump probabilities per unit time"""
        if not self.channels:
            return 0.0
        return max(channel.rate * np.linalg.norm(channel.operator, 2) ** 2 for channel in self.channels)


class UnravelingSpec(BaseModel):
    """Per-channel displacements beta_mu and an optional channel-mixing unitary"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    betas: Tuple[Any, ...] = ()
    mixing: Optional[np.ndarray] = None

    @field_validator("betas", mode="before")
    @classmethod
    def _coerce_betas(cls, value):
        return tuple(complex(beta) for beta in np.atleast_1d(value)) if value is not None else ()

    @field_validator("mixing", mode="before")
    @classmethod
    def _coerce_mixing(cls, value):
        if value is None:
            return None
        mixing = _frozen_array(as_operator(value))
        if not is_unitary(mixing, BetadyneConfig.UNITARY_TOL):
            raise UnitarityError("Mixing matrix is not unitary")
        return mixing

    @model_validator(mode="after")
    def _check_lengths(self):
        if self.mixing is not None and self.mixing.shape[0] != len(self.betas):
            raise DimensionError(
                f"Mixing matrix side {self.mixing.shape[0]} != number of betas {len(self.betas)}"
            )
        return self

    @classmethod
    def uniform(cls, beta: complex, channels: int) -> "UnravelingSpec":
        """Same displacement on every channel"""
        return cls(betas=[beta] * channels)


def _check_state(model: LindbladModel, rho) -> DensityMatrix:
    rho = as_operator(rho)
    if rho.shape[0] != model.dim:
        raise DimensionError(f"State dimension {rho.shape[0]} != model dimension {model.dim}")
    return rho


def _check_betas(model: LindbladModel, spec: UnravelingSpec) -> None:
    if len(spec.betas) != len(model.channels):
        raise DimensionError(
            f"Unraveling has {len(spec.betas)} displacements for {len(model.channels)} channels"
        )


# === Master equation ===

def dissipator_apply(channel: JumpChannel, rho) -> Operator:
    """gamma (J rho J^dag - {J^dag J, rho} / 2)"""
    rho = as_operator(rho)
    J = channel.operator
    if rho.shape != J.shape:
        raise DimensionError(f"State dimension {rho.shape[0]} != channel dimension {channel.dim}")
    Jd = J.conj().T
    return channel.rate * (J @ rho @ Jd - 0.5 * anticommutator(Jd @ J, rho))


def lindblad_rhs(model: LindbladModel, rho) -> Operator:
    """-i[H, rho] + sum_mu gamma_mu D[J_mu] rho"""
    rho = _check_state(model, rho)
    out = -1j * commutator(model.hamiltonian, rho)
    for channel in model.channels:
        out = out + dissipator_apply(channel, rho)
    return out


def liouvillian_matrix(model: LindbladModel) -> SuperOperator:
    """Matrix of the Lindblad generator acting on column-stacked states"""
    d = model.dim
    eye = np.eye(d, dtype=np.complex128)
    H = model.hamiltonian
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for channel in model.channels:
        J = channel.operator
        JdJ = J.conj().T @ J
        L = L + channel.rate * (
            np.kron(J.conj(), J) - 0.5 * np.kron(eye, JdJ) - 0.5 * np.kron(JdJ.T, eye)
        )
    return L


def liouvillian_spectrum(model: LindbladModel) -> np.ndarray:
    """Liouvillian eigenvalues, descending real part then descending imaginary part"""
    eigenvalues = np.linalg.eigvals(liouvillian_matrix(model))
    order = np.lexsort((-eigenvalues.imag, -eigenvalues.real))
    return eigenvalues[order]


def steady_state(model: LindbladModel) -> DensityMatrix:
    """A stationary state from the Liouvillian eigenvector closest to zero"""
    eigenvalues, vectors = np.linalg.eig(liouvillian_matrix(model))
    index = int(np.argmin(np.abs(eigenvalues)))
    rho = devectorize(vectors[:, index], model.dim)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


# === Effective Hamiltonians ===

def nhh(model: LindbladModel) -> Operator:
    """H - (i/2) sum_mu gamma_mu J_mu^dag J_mu"""
    H_eff = model.hamiltonian.astype(np.complex128)
    for channel in model.channels:
        J = channel.operator
        H_eff = H_eff - 0.5j * channel.rate * (J.conj().T @ J)
    return H_eff


def betadyne(model: LindbladModel, spec: UnravelingSpec) -> LindbladModel:
    """Displace jump operators J -> J + beta and compensate in the Hamiltonian

    Rates are kept; only operators move.
    """
    _check_betas(model, spec)
    eye = identity(model.dim)
    hamiltonian = model.hamiltonian.astype(np.complex128)
    channels = []
    for channel, beta in zip(model.channels, spec.betas):
        J = channel.operator
        hamiltonian = hamiltonian - 0.5j * channel.rate * (np.conj(beta) * J - beta * J.conj().T)
        channels.append(JumpChannel(rate=channel.rate, operator=J + beta * eye))
    return LindbladModel(hamiltonian=hamiltonian, channels=channels)


def nhh_beta(model: LindbladModel, spec: UnravelingSpec) -> Operator:
    """Effective Hamiltonian of the beta-dyne unraveling, expanded per channel

    H - i sum gamma beta* J - (i/2) sum gamma J^dag J - (i/2) sum gamma |beta|^2
    """
    _check_betas(model, spec)
    eye = identity(model.dim)
    H_eff = model.hamiltonian.astype(np.complex128)
    for channel, beta in zip(model.channels, spec.betas):
        J = channel.operator
        H_eff = (
            H_eff
            - 1j * channel.rate * np.conj(beta) * J
            - 0.5j * channel.rate * (J.conj().T @ J)
            - 0.5j * channel.rate * abs(beta) ** 2 * eye
        )
    return H_eff


def mix_channels(model: LindbladModel, R) -> LindbladModel:
    """J'_mu = sum_nu R[mu, nu] sqrt(gamma_nu) J_nu with unit output rates"""
    R = as_operator(R)
    count = len(model.channels)
    if R.shape[0] != count:
        raise DimensionError(f"Mixing matrix side {R.shape[0]} != channel count {count}")
    if not is_unitary(R, BetadyneConfig.UNITARY_TOL):
        raise UnitarityError("Mixing matrix is not unitary")
    weighted = [np.sqrt(channel.rate) * channel.operator for channel in model.channels]
    channels = [
        JumpChannel(rate=1.0, operator=sum(R[mu, nu] * weighted[nu] for nu in range(count)))
        for mu in range(count)
    ]
    return LindbladModel(hamiltonian=model.hamiltonian, channels=channels)


def apply_unraveling(model: LindbladModel, spec: UnravelingSpec) -> LindbladModel:
    """Mix channels (if requested) and then displace them"""
    _check_betas(model, spec)
    if spec.mixing is not None:
        model = mix_channels(model, spec.mixing)
    return betadyne(model, spec)


# === Kraus picture ===

def kraus_step(model: LindbladModel, dt: float) -> List[Operator]:
    """[1 - i H_eff dt, sqrt(gamma_1 dt) J_1, ...]"""
    if not dt > 0:
        raise GridError(f"dt must be positive, got {dt}")
    operators = [identity(model.dim) - 1j * dt * nhh(model)]
    for channel in model.channels:
        operators.append(np.sqrt(channel.rate * dt) * channel.operator)
    return operators


def kraus_residual(kraus_ops: Sequence[Operator]) -> float:
    """Frobenius norm of sum K^dag K - 1"""
    total = sum(K.conj().T @ K for K in kraus_ops)
    return float(np.linalg.norm(total - np.eye(total.shape[0])))


def kraus_apply(kraus_ops: Sequence[Operator], rho) -> DensityMatrix:
    rho = as_operator(rho)
    return sum(K @ rho @ K.conj().T for K in kraus_ops)
