"""Hamiltonians and physical parameter records for the OH+ cavity model.

Units: hbar = K = 1 throughout, so frequencies are energies.

Six-level basis: states ``|n el nuc>`` with photon number ``n``, electron
orbital ``el`` (0 bonding, 1 antibonding) and nuclear state ``nuc`` (0 close,
1 far). Only ``n + el <= 1`` is kept, in the order
``|000>, |001>, |010>, |011>, |100>, |101>``, so the canonical index is
``4 n + 2 el + nuc``.

Four-level molecule basis (photon x molecular orbital):
``|0>|Psi0>, |0>|Psi1>, |1>|Psi0>, |1>|Psi1>``. The atomic readout basis is
``|0>|O>, |1>|O>, |0>|H>, |1>|H>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from . import qmath
from .errors import ValidationError

SIX_LEVEL_LABELS = ("000", "001", "010", "011", "100", "101")
MOLECULE_LABELS = ("0O", "1O", "0H", "1H")

# excitation sectors n + el = 0 and n + el = 1
SIX_LEVEL_SECTORS = ((0, 1), (2, 3, 4, 5))
# n + el = 0, 1, 2 for the molecule model
MOLECULE_SECTORS = ((0,), (1, 2), (3,))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValidationError(msg)


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


class BasisLabel(NamedTuple):
    """One of the six basis states ``|n el nuc>``."""

    n: int
    el: int
    nuc: int

    @classmethod
    def parse(cls, text: str | BasisLabel) -> BasisLabel:
        """Accept ``"010"``, ``"|010>"``, ``"|010⟩"`` or a label instance."""
        if isinstance(text, BasisLabel):
            label = text
        else:
            digits = str(text).strip().strip("|>⟩ ")
            if len(digits) != 3 or any(c not in "01" for c in digits):
                raise ValidationError(f"bad basis label {text!r}; expected three binary digits")
            label = cls(int(digits[0]), int(digits[1]), int(digits[2]))
        if any(v not in (0, 1) for v in label):
            raise ValidationError(f"basis label entries must be 0 or 1, got {tuple(label)}")
        if label.n + label.el > 1:
            raise ValidationError(f"|{label}> is outside the six-state basis (n + el must be <= 1)")
        return label

    @classmethod
    def from_index(cls, index: int) -> BasisLabel:
        return cls.parse(SIX_LEVEL_LABELS[index])

    @property
    def index(self) -> int:
        return 4 * self.n + 2 * self.el + self.nuc

    def __str__(self) -> str:
        return f"{self.n}{self.el}{self.nuc}"


@dataclass(frozen=True)
class CouplingSchedule:
    """Coupling strengths of the six-level model.

    ``g_c(el, t) = amplitude(el) * exp(-decay_rate * t)``; the electron-field
    couplings ``g_el(nuc)`` are constant. ``g0`` and ``m_ev`` describe the
    phonon bath that sets the excited-orbital amplitude (see
    :func:`effective_phonon_coupling`); they are carried for bookkeeping and
    sweeps and do not enter the Hamiltonian directly.

    The strong-ordering ``g_el_0 >> g_el_1 > g_c1 >> g_c0`` is enforced with
    ``>>`` meaning a ratio of at least ``ratio_threshold``.
    """

    g_el_0: float = 6e7
    g_el_1: float = 6e4
    g_c1_amplitude: float = 4e3
    g_c0_amplitude: float = 4.0
    decay_rate: float = 0.1
    g0: float = 4.0
    m_ev: float = 1e6
    ratio_threshold: float = 100.0

    def __post_init__(self):
        _require(
            _finite(self.g_el_0, self.g_el_1, self.g_c1_amplitude, self.g_c0_amplitude,
                    self.decay_rate, self.g0, self.m_ev, self.ratio_threshold),
            "coupling schedule entries must be finite",
        )
        _require(self.g_c0_amplitude >= 0 and self.g_el_1 > 0, "couplings must be nonnegative, g_el_1 > 0")
        _require(self.decay_rate >= 0, "decay_rate must be >= 0")
        _require(self.g0 >= 0 and self.m_ev >= 0, "g0 and m_ev must be >= 0")
        _require(self.ratio_threshold >= 1, "ratio_threshold must be >= 1")
        k = self.ratio_threshold
        _require(
            self.g_el_0 >= k * self.g_el_1,
            f"ordering violated: need g_el_0 >= {k:g} * g_el_1 ({self.g_el_0:g} vs {self.g_el_1:g})",
        )
        _require(
            self.g_el_1 > self.g_c1_amplitude,
            f"ordering violated: need g_el_1 > g_c1_amplitude ({self.g_el_1:g} vs {self.g_c1_amplitude:g})",
        )
        _require(
            self.g_c1_amplitude >= k * self.g_c0_amplitude,
            f"ordering violated: need g_c1_amplitude >= {k:g} * g_c0_amplitude "
            f"({self.g_c1_amplitude:g} vs {self.g_c0_amplitude:g})",
        )

    @property
    def bath_coupling(self) -> float:
        """``g0 * sqrt(m_ev)``, the phonon coupling implied by the bath fields."""
        return effective_phonon_coupling(self.g0, self.m_ev)


@dataclass(frozen=True)
class ModelParams:
    omega_el: float
    omega_c: float
    mu: float = 0.4
    schedule: CouplingSchedule = field(default_factory=CouplingSchedule)
    hbar: float = 1.0

    def __post_init__(self):
        _require(_finite(self.omega_el, self.omega_c, self.mu), "model parameters must be finite")
        _require(self.omega_el > 0, f"omega_el must be > 0, got {self.omega_el}")
        _require(self.omega_c > 0, f"omega_c must be > 0, got {self.omega_c}")
        _require(0 <= self.mu < 1, f"mu must lie in [0, 1), got {self.mu}")
        _require(self.hbar == 1.0, "only hbar = 1 units are supported")

    @classmethod
    def from_electron_frequency(cls, omega_el: float, **kwargs) -> ModelParams:
        """Build with the phonon frequency set to ``omega_el / 2``."""
        return cls(omega_el=omega_el, omega_c=omega_el / 2, **kwargs)


@dataclass(frozen=True)
class TunnelingParams:
    a: float
    g: float

    def __post_init__(self):
        _require(_finite(self.a, self.g), "tunneling parameters must be finite")
        _require(self.a > 0, f"a must be > 0, got {self.a}")
        _require(self.g > 0, f"g must be > 0, got {self.g}")


@dataclass(frozen=True)
class MoleculeParams:
    """Parameters of the four-level molecule model.

    ``alpha`` and ``beta`` are rescaled on construction so that
    ``alpha**2 + beta**2 == 1``.
    """

    omega: float
    g_mol: float
    alpha: float
    beta: float

    def __post_init__(self):
        _require(_finite(self.omega, self.g_mol, self.alpha, self.beta), "molecule parameters must be finite")
        _require(self.omega > 0, f"omega must be > 0, got {self.omega}")
        _require(self.g_mol >= 0, f"g_mol must be >= 0, got {self.g_mol}")
        _require(self.beta >= 0, f"beta must be >= 0, got {self.beta}")
        _require(self.alpha > self.beta, f"need alpha > beta, got {self.alpha} <= {self.beta}")
        norm = math.hypot(self.alpha, self.beta)
        object.__setattr__(self, "alpha", self.alpha / norm)
        object.__setattr__(self, "beta", self.beta / norm)

    @classmethod
    def from_alpha_squared(cls, omega: float, g_mol: float, alpha_sq: float) -> MoleculeParams:
        _require(0.5 < alpha_sq <= 1, f"alpha^2 must lie in (0.5, 1], got {alpha_sq}")
        return cls(omega, g_mol, math.sqrt(alpha_sq), math.sqrt(1 - alpha_sq))

    @classmethod
    def from_distance(cls, omega: float, distance: float, alpha: float, beta: float) -> MoleculeParams:
        """``g_mol = 1 / distance``."""
        _require(distance > 0, f"distance must be > 0, got {distance}")
        return cls(omega, 1.0 / distance, alpha, beta)


# ---------------------------------------------------------------------------
# electron orbitals


def tunneling_hamiltonian(p: TunnelingParams) -> NDArray[np.complex128]:
    """``(a/2)(I - sigma_z) - g sigma_x`` in the ``(|O>, |H>)`` basis."""
    return np.array([[0.0, -p.g], [-p.g, p.a]], dtype=np.complex128)


def orbital_gap(p: TunnelingParams) -> float:
    return math.sqrt(p.a**2 + 4 * p.g**2)


def molecular_orbitals(p: TunnelingParams) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Bonding and antibonding orbitals as ``(O, H)`` amplitude pairs.

    The bonding orbital sits mostly on oxygen and the antibonding one mostly on
    hydrogen. Phases are chosen so that the O amplitude of the bonding orbital
    and the H amplitude of the antibonding one are positive.
    """
    vals, vecs = qmath.hermitian_eigendecompose(tunneling_hamiltonian(p))
    if vals[1] - vals[0] <= 0:
        raise RuntimeError("degenerate tunneling spectrum")
    ground = vecs[:, 0].real.copy()
    excited = vecs[:, 1].real.copy()
    ground *= np.sign(ground[0])
    excited *= np.sign(excited[1])
    if not (abs(ground[0]) > abs(ground[1]) and abs(excited[0]) < abs(excited[1])):
        raise RuntimeError(f"orbital amplitude ordering failed for {p}")
    return ground, excited


def cavity_coupling(omega: float, volume: float, field_amplitude: float, dipole: float) -> float:
    """Electron-field coupling ``sqrt(omega / V) * E(x) * d01``."""
    _require(
        omega > 0 and volume > 0 and field_amplitude > 0 and dipole > 0,
        "cavity_coupling inputs must all be positive",
    )
    return math.sqrt(omega / volume) * field_amplitude * dipole


def effective_phonon_coupling(g0: float, m_ev: float) -> float:
    """Nucleus-phonon coupling with the phonon number replaced by its mean."""
    _require(g0 >= 0 and m_ev >= 0, f"g0 and m_ev must be >= 0, got {g0}, {m_ev}")
    return g0 * math.sqrt(m_ev)


def coupling_schedule_eval(s: CouplingSchedule, t: float) -> tuple[float, float, float, float]:
    """Return ``(g_c0, g_c1, g_el0, g_el1)`` at time ``t``."""
    _require(t >= 0, f"t must be >= 0, got {t}")
    decay = math.exp(-s.decay_rate * t)
    return s.g_c0_amplitude * decay, s.g_c1_amplitude * decay, s.g_el_0, s.g_el_1


# ---------------------------------------------------------------------------
# Hamiltonians


def build_jc_hamiltonian(omega: float, g: float, include_strong: bool = False) -> NDArray[np.complex128]:
    """Single-mode Jaynes-Cummings Hamiltonian with photon number truncated at 1.

    Basis ``|n s>`` = ``|00>, |01>, |10>, |11>`` (photon, atom). Without the
    counter-rotating term the matrix conserves ``n + s``.
    """
    _require(omega > 0, f"omega must be > 0, got {omega}")
    _require(g >= 0, f"g must be >= 0, got {g}")
    h = np.diag([0.0, omega, omega, 2 * omega]).astype(np.complex128)
    h[1, 2] = h[2, 1] = g  # sigma+ a + sigma a+
    if include_strong:
        h[0, 3] = h[3, 0] = g  # sigma+ a+ + sigma a
    return h


def excitation_number_operator() -> NDArray[np.complex128]:
    return np.diag([0.0, 1.0, 1.0, 2.0]).astype(np.complex128)


def _six_level_couplings(p: ModelParams, g_c0, g_c1, g_el0, g_el1) -> NDArray[np.complex128]:
    w_el, w_c = p.omega_el, p.omega_c
    shape = np.shape(g_c0)
    h = np.zeros(shape + (6, 6), dtype=np.complex128)
    h[..., range(6), range(6)] = (0.0, w_c, w_el, w_el + w_c, w_el, w_el + w_c)
    for (i, j), v in (((0, 1), g_c0), ((2, 3), g_c1), ((2, 4), g_el0), ((3, 5), g_el1), ((4, 5), g_c0)):
        h[..., i, j] = v
        h[..., j, i] = v
    return h


def build_six_level_hamiltonian(p: ModelParams, t: float) -> NDArray[np.complex128]:
    """The 6x6 Hamiltonian at time ``t``.

    Nonzero off-diagonal couplings::

        <000|H|001> = g_c(0)    <010|H|011> = g_c(1)    <100|H|101> = g_c(0)
        <010|H|100> = g_el(0)   <011|H|101> = g_el(1)
    """
    return _six_level_couplings(p, *coupling_schedule_eval(p.schedule, t))


def six_level_hamiltonians(p: ModelParams, times: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Stack of :func:`build_six_level_hamiltonian` over ``times``, shape ``(m, 6, 6)``."""
    times = np.asarray(times, dtype=np.float64)
    _require(bool(np.all(times >= 0)), "times must be >= 0")
    s = p.schedule
    decay = np.exp(-s.decay_rate * times)
    const = np.ones_like(times)
    return _six_level_couplings(
        p, s.g_c0_amplitude * decay, s.g_c1_amplitude * decay, s.g_el_0 * const, s.g_el_1 * const
    )


def build_molecule_hamiltonian(p: MoleculeParams) -> NDArray[np.complex128]:
    """Four-level molecule Hamiltonian in the ``|n>|Psi_el>`` basis (RWA)."""
    return build_jc_hamiltonian(p.omega, p.g_mol, include_strong=False)


def molecule_readout_basis(p: MoleculeParams) -> NDArray[np.float64]:
    """Columns are ``|0>|O>, |1>|O>, |0>|H>, |1>|H>`` in the ``|n>|Psi_el>`` basis.

    Uses ``|O> = alpha|Psi0> - beta|Psi1>`` and ``|H> = beta|Psi0> + alpha|Psi1>``.
    """
    a, b = p.alpha, p.beta
    r = np.zeros((4, 4))
    # rows: |0Psi0>, |0Psi1>, |1Psi0>, |1Psi1>
    r[:, 0] = (a, -b, 0, 0)  # |0>|O>
    r[:, 1] = (0, 0, a, -b)  # |1>|O>
    r[:, 2] = (b, a, 0, 0)  # |0>|H>
    r[:, 3] = (0, 0, b, a)  # |1>|H>
    return r


def molecule_state(p: MoleculeParams, label: str) -> NDArray[np.complex128]:
    """State vector (``|n>|Psi_el>`` basis) for an atomic label such as ``"0O"``."""
    key = str(label).strip().strip("|>⟩ ")
    if key not in MOLECULE_LABELS:
        raise ValidationError(f"bad molecule label {label!r}; expected one of {MOLECULE_LABELS}")
    return molecule_readout_basis(p)[:, MOLECULE_LABELS.index(key)].astype(np.complex128)


# ---------------------------------------------------------------------------
# thermal bath


def temperature_from_ratio(mu: float, omega_c: float) -> float:
    """Temperature for which ``exp(-omega_c / T) == mu``; 0 for ``mu <= 0``."""
    _require(omega_c > 0, f"omega_c must be > 0, got {omega_c}")
    _require(mu < 1, f"mu must be < 1, got {mu}")
    if mu <= 0:
        return 0.0
    return omega_c / math.log(1 / mu)


def gibbs_state(mu: float, levels: int) -> NDArray[np.complex128]:
    """Truncated thermal state with populations proportional to ``mu**n``."""
    _require(0 <= mu < 1, f"mu must lie in [0, 1), got {mu}")
    _require(int(levels) == levels and levels >= 1, f"levels must be a positive integer, got {levels}")
    weights = mu ** np.arange(int(levels), dtype=np.float64)
    return np.diag(weights / weights.sum()).astype(np.complex128)
