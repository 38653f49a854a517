#!/usr/bin/env python3
"""
Master-equation integration and quantum-jump trajectories.

Trajectories use fixed-step Bernoulli jump sampling: per step the jump
probabilities are p_mu = gamma_mu dt <psi|J_mu^dag J_mu|psi>; without a jump
the state is updated with 1 - i H_eff dt and renormalized, otherwise the
chosen jump operator acts. Per-trajectory random streams come from
``numpy.random.SeedSequence(master_seed).spawn(n)``, and each trajectory
draws all its uniforms up front, so a trajectory is identical whether it runs
alone or inside any batch of an ensemble.
"""

import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import BetadyneConfig
from .exceptions import ConfigError, DimensionError, EmptySampleError, GridError, StateError, StepSizeError
from .model import LindbladModel, liouvillian_matrix, lindblad_rhs, nhh
from .quantum_core import (
    DensityMatrix,
    Ket,
    Operator,
    as_ket,
    devectorize,
    ket_projector,
    matrix_exponential,
    validate_density_matrix,
    vectorize,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t0 .. t1 in ``steps`` steps, recording every ``record_every`` steps"""

    t0: float
    t1: float
    steps: int
    record_every: int = 1

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise GridError(f"steps must be a positive integer, got {self.steps}")
        if not self.t1 > self.t0:
            raise GridError(f"t1 ({self.t1}) must exceed t0 ({self.t0})")
        if self.record_every < 1 or self.steps % self.record_every != 0:
            raise GridError(f"record_every={self.record_every} must divide steps={self.steps}")

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.steps

    @property
    def record_steps(self) -> np.ndarray:
        return np.arange(0, self.steps + 1, self.record_every)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.record_steps * self.dt

    @property
    def n_records(self) -> int:
        return self.steps // self.record_every + 1

    def step_bound(self, model: LindbladModel) -> float:
        """dt * max_mu gamma_mu ||J_mu||^2, an upper bound on per-step jump probability"""
        bound = self.dt * model.max_jump_rate
        if bound > BetadyneConfig.JUMP_PROBABILITY_WARN:
            logger.warning(
                "⚠️ Time step %.3g gives jump probabilities up to %.3f per step (> %.2f); "
                "first-order jump sampling is inaccurate",
                self.dt, bound, BetadyneConfig.JUMP_PROBABILITY_WARN,
            )
        return bound


@dataclass(frozen=True)
class TrajectoryRecord:
    """States at the recorded times; ``survival`` is held constant from the first jump on"""

    times: np.ndarray
    states: np.ndarray
    jumps: List[Tuple[float, int]]
    survival: np.ndarray
    seed: int

    @property
    def first_jump_time(self) -> Optional[float]:
        return self.jumps[0][0] if self.jumps else None

    def jumped_by(self, t: float, dt: float) -> bool:
        first = self.first_jump_time
        return first is not None and first <= t + 0.5 * dt


@dataclass(frozen=True)
class EnsembleStats:
    times: np.ndarray
    mean_state: np.ndarray
    nojump_fraction: np.ndarray
    trajectory_count: int
    conditional_state: np.ndarray
    nojump_count: np.ndarray
    survival: np.ndarray = field(default=None)


@dataclass(frozen=True)
class PostselectionResult:
    times: np.ndarray
    conditional_states: np.ndarray
    fraction: np.ndarray
    counts: np.ndarray

    @property
    def empty(self) -> np.ndarray:
        return self.counts == 0

    def state_at(self, index: int) -> DensityMatrix:
        if self.counts[index] == 0:
            raise EmptySampleError(f"No trajectory survived postselection up to t={self.times[index]:.6g}")
        return self.conditional_states[index]


def _check_ket(model_dim: int, psi0) -> Ket:
    psi0 = as_ket(psi0, model_dim)
    if abs(np.linalg.norm(psi0) - 1.0) > BetadyneConfig.STRUCTURAL_TOL:
        raise StateError("Initial state must be normalized")
    return psi0


# === Master equation ===

def integrate_master(model: LindbladModel, rho0, grid: TimeGrid) -> List[DensityMatrix]:
    """Fourth-order Runge-Kutta on the Lindblad right-hand side"""
    rho = validate_density_matrix(rho0)
    if rho.shape[0] != model.dim:
        raise DimensionError(f"State dimension {rho.shape[0]} != model dimension {model.dim}")
    grid.step_bound(model)
    dt = grid.dt
    states = [rho.copy()]
    for step in range(1, grid.steps + 1):
        k1 = lindblad_rhs(model, rho)
        k2 = lindblad_rhs(model, rho + 0.5 * dt * k1)
        k3 = lindblad_rhs(model, rho + 0.5 * dt * k2)
        k4 = lindblad_rhs(model, rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if step % grid.record_every == 0:
            states.append(rho.copy())
    return states


def evolve_master_exact(model: LindbladModel, rho0, grid: TimeGrid) -> List[DensityMatrix]:
    """Propagation with the exact step propagator exp(L dt)"""
    rho = validate_density_matrix(rho0)
    propagator = matrix_exponential(liouvillian_matrix(model), grid.dt * grid.record_every)
    vector = vectorize(rho)
    states = [rho.copy()]
    for _ in range(grid.n_records - 1):
        vector = propagator @ vector
        states.append(devectorize(vector, model.dim))
    return states


def propagate_nhh(H_eff: Operator, psi0, grid: TimeGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Unnormalized no-jump kets exp(-i H_eff (t - t0)) psi0 and survival ||psi(t)||^2"""
    H_eff = np.asarray(H_eff, dtype=np.complex128)
    psi = _check_ket(H_eff.shape[0], psi0)
    step = matrix_exponential(-1j * H_eff, grid.dt * grid.record_every)
    kets = [psi.copy()]
    for _ in range(grid.n_records - 1):
        psi = step @ psi
        kets.append(psi.copy())
    kets = np.array(kets)
    survival = np.sum(np.abs(kets) ** 2, axis=1)
    return kets, survival


# === Trajectories ===

def derive_seeds(master_seed: int, count: int) -> List[int]:
    """Per-trajectory seeds: child k of SeedSequence(master_seed), as a 64-bit integer"""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def _model_arrays(model: LindbladModel):
    H_eff = nhh(model)
    if model.channels:
        jumps = np.array([channel.operator for channel in model.channels])
    else:
        jumps = np.zeros((0, model.dim, model.dim), dtype=np.complex128)
    rates = np.array(model.rates, dtype=float)
    return H_eff, jumps, rates


@dataclass
class _BatchResult:
    """Lockstep batch output; sums run over the batch at the recorded times"""

    states: Optional[np.ndarray]
    events: List[List[Tuple[float, int]]]
    survival: np.ndarray
    projector_sum: np.ndarray
    nojump_sum: np.ndarray
    nojump_count: np.ndarray
    shadow_survival: np.ndarray


def _simulate_batch(H_eff, jumps, rates, psi0, grid: TimeGrid, seeds: Sequence[int], keep_states: bool) -> _BatchResult:
    """Run len(seeds) trajectories in lockstep

    ``survival`` is per trajectory: the product of (1 - sum_mu p_mu) over the
    steps before its first jump, constant afterwards. ``shadow_survival``
    follows one never-jumping state and is the same for every batch.
    """
    batch = len(seeds)
    d = psi0.shape[0]
    dt = grid.dt
    uniforms = np.array([np.random.default_rng(seed).random(grid.steps) for seed in seeds])
    no_jump_step = np.eye(d, dtype=np.complex128) - 1j * dt * H_eff
    weights = rates * dt

    states = np.tile(psi0, (batch, 1))
    jumped = np.zeros(batch, dtype=bool)
    events: List[List[Tuple[float, int]]] = [[] for _ in range(batch)]
    survival_now = np.ones(batch)

    shadow = psi0.copy()
    shadow_now = 1.0

    n_records = grid.n_records
    kept = np.empty((batch, n_records, d), dtype=np.complex128) if keep_states else None
    survival = np.ones((batch, n_records))
    projector_sum = np.zeros((n_records, d, d), dtype=np.complex128)
    nojump_sum = np.zeros((n_records, d, d), dtype=np.complex128)
    nojump_count = np.zeros(n_records, dtype=np.int64)
    shadow_survival = np.ones(n_records)

    def record(index: int):
        if keep_states:
            kept[:, index] = states
        survival[:, index] = survival_now
        projector_sum[index] = np.einsum("bi,bj->ij", states, states.conj())
        alive = states[~jumped]
        nojump_sum[index] = np.einsum("bi,bj->ij", alive, alive.conj())
        nojump_count[index] = alive.shape[0]
        shadow_survival[index] = shadow_now

    record(0)
    for k in range(grid.steps):
        jumped_states = np.einsum("mij,bj->bmi", jumps, states)
        probabilities = weights[None, :] * np.sum(np.abs(jumped_states) ** 2, axis=2)
        total = probabilities.sum(axis=1)
        if np.any(total > BetadyneConfig.JUMP_PROBABILITY_MAX):
            raise StepSizeError(
                f"Jump probability {total.max():.3f} per step exceeds "
                f"{BetadyneConfig.JUMP_PROBABILITY_MAX}; refine the time grid"
            )

        r = uniforms[:, k]
        jump = r < total
        new_states = states @ no_jump_step.T
        if np.any(jump):
            cumulative = np.cumsum(probabilities, axis=1)
            channel = np.argmax(r[:, None] < cumulative, axis=1)
            rows = np.nonzero(jump)[0]
            new_states[rows] = jumped_states[rows, channel[rows]]
            t_jump = grid.t0 + (k + 1) * dt
            for b in rows:
                events[b].append((t_jump, int(channel[b])))
        # frozen from the first jump on
        still_quiet = ~(jumped | jump)
        survival_now[still_quiet] *= 1.0 - total[still_quiet]
        jumped |= jump
        states = new_states / np.linalg.norm(new_states, axis=1, keepdims=True)

        shadow_probability = float(np.sum(weights * np.sum(np.abs(jumps @ shadow) ** 2, axis=1)))
        shadow_now *= 1.0 - shadow_probability
        shadow = no_jump_step @ shadow
        shadow = shadow / np.linalg.norm(shadow)

        if (k + 1) % grid.record_every == 0:
            record((k + 1) // grid.record_every)

    return _BatchResult(
        states=kept,
        events=events,
        survival=survival,
        projector_sum=projector_sum,
        nojump_sum=nojump_sum,
        nojump_count=nojump_count,
        shadow_survival=shadow_survival,
    )


def mc_trajectory(model: LindbladModel, psi0, grid: TimeGrid, seed: int) -> TrajectoryRecord:
    """One quantum-jump trajectory of an already unraveled model"""
    return mc_trajectories(model, psi0, grid, [seed])[0]


def mc_trajectories(model: LindbladModel, psi0, grid: TimeGrid, seeds: Sequence[int]) -> List[TrajectoryRecord]:
    """Many trajectories with explicit seeds, identical to mc_trajectory per seed"""
    psi0 = _check_ket(model.dim, psi0)
    grid.step_bound(model)
    H_eff, jumps, rates = _model_arrays(model)
    seeds = list(seeds)
    result = _simulate_batch(H_eff, jumps, rates, psi0, grid, seeds, True)
    return [
        TrajectoryRecord(
            times=grid.times,
            states=result.states[b],
            jumps=result.events[b],
            survival=result.survival[b],
            seed=int(seed),
        )
        for b, seed in enumerate(seeds)
    ]


def _ensemble_batch(job):
    H_eff, jumps, rates, psi0, grid, seeds = job
    result = _simulate_batch(H_eff, jumps, rates, psi0, grid, seeds, False)
    return result.projector_sum, result.nojump_sum, result.nojump_count, result.shadow_survival


def ensemble_average(
    model: LindbladModel,
    psi0,
    grid: TimeGrid,
    n: int,
    master_seed: int,
    workers: int = 1,
    batch_size: Optional[int] = None,
) -> EnsembleStats:
    """Average n trajectories; bit-for-bit reproducible for fixed (n, master_seed, grid)

    Batches are a fixed partition of the seed list and partial sums are
    merged in batch order, so the worker count does not change the result.
    """
    if n < 1:
        raise ConfigError("Ensemble size must be at least 1")
    psi0 = _check_ket(model.dim, psi0)
    grid.step_bound(model)
    H_eff, jumps, rates = _model_arrays(model)
    seeds = derive_seeds(master_seed, n)
    size = batch_size or BetadyneConfig.BATCH_SIZE
    jobs = [(H_eff, jumps, rates, psi0, grid, seeds[i:i + size]) for i in range(0, n, size)]
    logger.debug("Running %d trajectories in %d batches on %d workers", n, len(jobs), workers)

    if workers > 1 and len(jobs) > 1:
        with Pool(processes=min(workers, len(jobs))) as pool:
            partials = pool.map(_ensemble_batch, jobs)
    else:
        partials = [_ensemble_batch(job) for job in jobs]

    projector_sum = sum(partial[0] for partial in partials)
    nojump_sum = sum(partial[1] for partial in partials)
    nojump_count = sum(partial[2] for partial in partials)
    survival = partials[0][3]

    with np.errstate(invalid="ignore", divide="ignore"):
        conditional = nojump_sum / nojump_count[:, None, None]
    conditional[nojump_count == 0] = np.nan
    empty = int(np.sum(nojump_count == 0))
    if empty:
        logger.warning("No trajectory survived postselection at %d of %d output times", empty, grid.n_records)

    return EnsembleStats(
        times=grid.times,
        mean_state=projector_sum / n,
        nojump_fraction=nojump_count / n,
        trajectory_count=n,
        conditional_state=conditional,
        nojump_count=nojump_count,
        survival=survival,
    )


def postselect_no_jump(records: Sequence[TrajectoryRecord], grid: TimeGrid) -> PostselectionResult:
    """Average only trajectories without a jump in [t0, t] at each recorded t"""
    if not records:
        raise EmptySampleError("Postselection needs a nonempty ensemble")
    times = grid.times
    d = records[0].states.shape[1]
    conditional = np.full((times.size, d, d), np.nan, dtype=np.complex128)
    counts = np.zeros(times.size, dtype=np.int64)
    for index, t in enumerate(times):
        survivors = [record.states[index] for record in records if not record.jumped_by(t, grid.dt)]
        counts[index] = len(survivors)
        if survivors:
            stacked = np.array(survivors)
            conditional[index] = np.einsum("bi,bj->ij", stacked, stacked.conj()) / len(survivors)
    if np.any(counts == 0):
        logger.warning("Postselected sample is empty at %d output times", int(np.sum(counts == 0)))
    return PostselectionResult(
        times=times,
        conditional_states=conditional,
        fraction=counts / len(records),
        counts=counts,
    )


def conditional_nhh_states(kets: np.ndarray) -> np.ndarray:
    """Normalized no-jump density matrices from propagate_nhh kets"""
    return np.array([ket_projector(ket / np.linalg.norm(ket)) for ket in kets])
