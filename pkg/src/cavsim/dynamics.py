"""Lindblad relaxation with the two-step split integrator.

Each step first applies the exact unitary ``rho -> U rho U^dagger`` with
``U = exp(-i H(t_k) dt)``, then one explicit Euler increment of the
dissipator, ``rho -> rho + dt L(rho)``. ``H`` is sampled at the left endpoint
of every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import kernels, model, qmath
from .errors import ConfigError, IntegrationError, ValidationError
from .model import BasisLabel, ModelParams, MoleculeParams

# max(rate) * dt must stay below this for the Euler dissipator step
EULER_GUARD = 0.1
DEFAULT_GAMMA_OUT = 0.1


@dataclass(frozen=True)
class LindbladChannel:
    operator: NDArray[np.complex128]
    rate: float

    def __post_init__(self):
        op = qmath.as_matrix(self.operator, "jump operator")
        if not math.isfinite(self.rate) or self.rate < 0:
            raise ValidationError(f"channel rate must be finite and >= 0, got {self.rate}")
        object.__setattr__(self, "operator", op)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 0.01
    iterations: int = 6000
    record_stride: int = 10

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValidationError(f"iterations must be an integer >= 1, got {self.iterations}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValidationError(f"record_stride must be an integer >= 1, got {self.record_stride}")

    @property
    def n_records(self) -> int:
        return self.iterations // self.record_stride + 1


@dataclass(frozen=True)
class Trajectory:
    """Recorded populations and diagnostics.

    ``probabilities`` has one column per entry of ``labels``. For the
    six-level model these are the basis states; for the molecule model they
    are the atomic readout states ``|0>|O>, |1>|O>, |0>|H>, |1>|H>``.
    ``hermiticity`` is ``max|rho - rho^dagger|`` and ``min_eig`` the smallest
    eigenvalue of ``rho`` at each record.
    """

    times: NDArray[np.float64]
    probabilities: NDArray[np.float64]
    trace: NDArray[np.float64]
    purity: NDArray[np.float64]
    hermiticity: NDArray[np.float64]
    min_eig: NDArray[np.float64]
    sector_populations: NDArray[np.float64]
    labels: tuple[str, ...]
    model: str = "six_level"

    def __len__(self) -> int:
        return self.times.size

    def column(self, label: str) -> NDArray[np.float64]:
        return self.probabilities[:, self.labels.index(label)]


# ---------------------------------------------------------------------------
# dissipator


def _check_channels(channels: Sequence[LindbladChannel], dim: int) -> None:
    for ch in channels:
        if ch.operator.shape != (dim, dim):
            raise ValidationError(
                f"jump operator shape {ch.operator.shape} does not match system dim {dim}"
            )


def lindblad_dissipator(rho: ArrayLike, channels: Sequence[LindbladChannel]) -> NDArray[np.complex128]:
    """``sum_j rate_j (A rho A^dagger - (rho A^dagger A + A^dagger A rho) / 2)``."""
    r = qmath.as_matrix(rho, "rho")
    _check_channels(channels, r.shape[0])
    out = np.zeros_like(r)
    for ch in channels:
        a = ch.operator
        ad = a.conj().T
        ada = ad @ a
        out += ch.rate * (a @ r @ ad - 0.5 * (r @ ada + ada @ r))
    return out


def _guard(channels: Sequence[LindbladChannel], dt: float) -> None:
    top = max((ch.rate for ch in channels), default=0.0)
    if top * dt > EULER_GUARD:
        raise ConfigError(
            f"max rate * dt = {top * dt:.3g} exceeds {EULER_GUARD}; "
            f"use dt <= {EULER_GUARD / top:.3g}",
            key="dt",
        )


def step(
    rho: ArrayLike, h: ArrayLike, channels: Sequence[LindbladChannel], dt: float
) -> NDArray[np.complex128]:
    """One split step: exact unitary conjugation, then an Euler dissipator increment.

    Raises:
        ConfigError: when ``max(rate) * dt`` exceeds the Euler guard.
    """
    _guard(channels, dt)
    rho1 = qmath.conjugate(rho, qmath.unitary_propagator(h, dt))
    if not channels:
        return rho1
    return rho1 + dt * lindblad_dissipator(rho1, channels)


# ---------------------------------------------------------------------------
# channels


def photon_lowering_six_level() -> NDArray[np.complex128]:
    """``sum_{el,nuc} |0 el nuc><1 el nuc|`` restricted to the six-state basis."""
    a = np.zeros((6, 6), dtype=np.complex128)
    a[BasisLabel(0, 0, 0).index, BasisLabel(1, 0, 0).index] = 1.0
    a[BasisLabel(0, 0, 1).index, BasisLabel(1, 0, 1).index] = 1.0
    return a


def photon_lowering_molecule() -> NDArray[np.complex128]:
    """Photon annihilation ``a x I`` in the ``|n>|Psi_el>`` basis."""
    return np.kron(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2)).astype(np.complex128)


def thermal_photon_channels(lowering: ArrayLike, gamma_out: float, mu: float) -> list[LindbladChannel]:
    """Loss through ``lowering`` at ``gamma_out`` and pump through its adjoint at ``mu * gamma_out``.

    The pump is omitted when ``mu == 0``.
    """
    if not (math.isfinite(gamma_out) and gamma_out > 0):
        raise ValidationError(f"gamma_out must be > 0, got {gamma_out}")
    if not 0 <= mu < 1:
        raise ValidationError(f"mu must lie in [0, 1), got {mu}")
    lower = np.asarray(lowering, dtype=np.complex128)
    channels = [LindbladChannel(lower, gamma_out)]
    if mu > 0:
        channels.append(LindbladChannel(lower.conj().T.copy(), mu * gamma_out))
    return channels


def default_channels(
    params: ModelParams | MoleculeParams, gamma_out: float = DEFAULT_GAMMA_OUT
) -> list[LindbladChannel]:
    """Photon loss at ``gamma_out`` plus photon pump at ``mu * gamma_out``.

    The molecule model carries no ``mu`` and only gets the loss channel.
    """
    if isinstance(params, MoleculeParams):
        return thermal_photon_channels(photon_lowering_molecule(), gamma_out, 0.0)
    return thermal_photon_channels(photon_lowering_six_level(), gamma_out, params.mu)


# ---------------------------------------------------------------------------
# trajectories

InitialState = Union[str, BasisLabel, ArrayLike]


def _initial_density(params, initial: InitialState) -> NDArray[np.complex128]:
    if isinstance(params, MoleculeParams):
        if isinstance(initial, str):
            return qmath.projector(model.molecule_state(params, initial))
        rho = np.asarray(initial, dtype=np.complex128)
        return qmath.as_density_matrix(rho, "initial state")
    if isinstance(initial, (str, BasisLabel)):
        return qmath.pure_state(BasisLabel.parse(initial).index, 6)
    return qmath.as_density_matrix(initial, "initial state")


def _propagators(params, cfg: IntegratorConfig) -> NDArray[np.complex128]:
    if isinstance(params, MoleculeParams):
        return qmath.unitary_propagator(model.build_molecule_hamiltonian(params), cfg.dt)[None]
    schedule = params.schedule
    if schedule.decay_rate == 0:
        return qmath.unitary_propagator(model.build_six_level_hamiltonian(params, 0.0), cfg.dt)[None]
    times = np.arange(cfg.iterations) * cfg.dt
    hs = model.six_level_hamiltonians(params, times)
    bad = np.flatnonzero(~np.all(np.isfinite(hs), axis=(1, 2)))
    if bad.size:
        raise IntegrationError("Hamiltonian has non-finite entries", iteration=int(bad[0]))
    return qmath.unitary_propagators(hs, cfg.dt)


def _pack_channels(channels: Sequence[LindbladChannel], dim: int):
    if not channels:
        empty = np.zeros((0, dim, dim), dtype=np.complex128)
        return empty, empty, empty, np.zeros(0)
    ops = np.stack([ch.operator for ch in channels])
    ops_dag = np.conj(np.swapaxes(ops, 1, 2))
    return ops, ops_dag, ops_dag @ ops, np.array([ch.rate for ch in channels], dtype=np.float64)


def trajectory_from_states(
    times: NDArray[np.float64], states: NDArray[np.complex128], params
) -> Trajectory:
    """Diagnostics and readout populations for a stack of density matrices."""
    herm = np.max(np.abs(states - np.conj(np.swapaxes(states, 1, 2))), axis=(1, 2))
    hermitian_part = 0.5 * (states + np.conj(np.swapaxes(states, 1, 2)))
    min_eig = np.linalg.eigvalsh(hermitian_part)[:, 0]
    trace = np.einsum("kii->k", states).real
    pur = np.einsum("kij,kji->k", states, states).real
    diag = np.einsum("kii->ki", states).real
    if isinstance(params, MoleculeParams):
        r = model.molecule_readout_basis(params)
        probs = np.einsum("ia,kij,ja->ka", r, states, r).real
        sectors, labels, kind = model.MOLECULE_SECTORS, model.MOLECULE_LABELS, "molecule_4level"
    else:
        probs = diag.copy()
        sectors, labels, kind = model.SIX_LEVEL_SECTORS, model.SIX_LEVEL_LABELS, "six_level"
    sector_pop = np.stack([diag[:, list(s)].sum(axis=1) for s in sectors], axis=1)
    return Trajectory(
        times=np.asarray(times, dtype=np.float64),
        probabilities=probs,
        trace=trace,
        purity=pur,
        hermiticity=herm,
        min_eig=min_eig,
        sector_populations=sector_pop,
        labels=tuple(labels),
        model=kind,
    )


def _run(props, channels, rho0, cfg: IntegratorConfig) -> NDArray[np.complex128]:
    dim = rho0.shape[0]
    _check_channels(channels, dim)
    _guard(channels, cfg.dt)
    ops, ops_dag, ops_dd, rates = _pack_channels(channels, dim)
    states, failed = kernels.propagate(
        props, rho0, ops, ops_dag, ops_dd, rates, cfg.dt, cfg.iterations, cfg.record_stride
    )
    if failed >= 0:
        raise IntegrationError("density matrix became non-finite", iteration=int(failed))
    return states


def _record_times(cfg: IntegratorConfig) -> NDArray[np.float64]:
    return np.arange(cfg.n_records) * (cfg.record_stride * cfg.dt)


def evolve_operator(
    h: ArrayLike, channels: Sequence[LindbladChannel], rho0: ArrayLike, cfg: IntegratorConfig
) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Split-step evolution under a fixed Hamiltonian of any dimension.

    Returns ``(times, states)`` with ``states`` of shape ``(n_records, d, d)``.
    """
    rho = qmath.as_density_matrix(rho0, "rho0")
    hm = qmath.as_hermitian(h, "H")
    if hm.shape != rho.shape:
        raise ValidationError(f"H {hm.shape} and rho0 {rho.shape} differ in shape")
    props = qmath.unitary_propagator(hm, cfg.dt)[None]
    return _record_times(cfg), _run(props, channels, rho, cfg)


def evolve(
    params: ModelParams | MoleculeParams,
    channels: Sequence[LindbladChannel],
    initial: InitialState,
    cfg: IntegratorConfig,
) -> Trajectory:
    """Integrate the master equation and record every ``cfg.record_stride`` steps.

    ``params`` selects the model: :class:`ModelParams` for the six-level
    model (``H`` rebuilt at ``t = k * dt`` each step) or
    :class:`MoleculeParams` for the time-independent four-level model. The
    initial state is a basis label (``"010"`` or ``"0O"``) or a density
    matrix in the simulation basis.

    Raises:
        ConfigError: if the Euler guard is violated.
        IntegrationError: if the state becomes non-finite; carries the step index.
    """
    dim = 4 if isinstance(params, MoleculeParams) else 6
    rho0 = _initial_density(params, initial)
    if rho0.shape != (dim, dim):
        raise ValidationError(f"initial state must be {dim}x{dim}, got {rho0.shape}")
    _check_channels(channels, dim)
    _guard(channels, cfg.dt)
    states = _run(_propagators(params, cfg), channels, rho0, cfg)
    return trajectory_from_states(_record_times(cfg), states, params)


def reaction_channel_probabilities(traj: Trajectory) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Populations of bound (``nuc = 0``) and dissociated (``nuc = 1``) states."""
    if traj.model != "six_level":
        raise ValidationError("reaction channels are defined for the six-level model only")
    p = traj.probabilities
    bound = [i for i, lab in enumerate(traj.labels) if lab[2] == "0"]
    free = [i for i, lab in enumerate(traj.labels) if lab[2] == "1"]
    return p[:, bound].sum(axis=1), p[:, free].sum(axis=1)


def oscillation_amplitude(traj: Trajectory) -> float:
    """``max - min`` of the bound-channel probability over the last half of the run."""
    bound, _ = reaction_channel_probabilities(traj)
    tail = bound[len(bound) // 2:]
    return float(tail.max() - tail.min())
