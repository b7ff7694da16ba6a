"""Closed-form solution of the four-level molecule model.

The electron starts on oxygen with no photon, ``|0>|O> = alpha|0>|Psi0> -
beta|0>|Psi1>``. ``|0>|Psi0>`` is an exact zero-energy eigenstate; the
``|0>|Psi1>`` part splits over the one-excitation eigenpairs
``E = omega -/+ g_mol``. The functions here are independent of the numerical
integrator and serve as its oracle.

Amplitudes and probabilities broadcast over array-valued ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ValidationError
from .model import MoleculeParams

_S = 1 / np.sqrt(2)


@dataclass(frozen=True)
class JCEigensystem:
    """Eigenpairs in the ``|n>|Psi_el>`` basis.

    ``vectors`` columns are ordered (E0, E1, E2, E3) where ``E0 = 0`` belongs
    to ``|0>|Psi0>``.
    """

    E0: float
    E1: float
    E2: float
    E3: float
    vectors: NDArray[np.float64]

    @property
    def energies(self) -> NDArray[np.float64]:
        return np.array([self.E0, self.E1, self.E2, self.E3])


def jc_eigensystem(p: MoleculeParams) -> JCEigensystem:
    vecs = np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, _S, _S, 0.0],
            [0.0, -_S, _S, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return JCEigensystem(0.0, p.omega - p.g_mol, p.omega + p.g_mol, 2 * p.omega, vecs)


def _times(t: ArrayLike) -> NDArray[np.float64]:
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValidationError("t must be finite and >= 0")
    return t


def evolve_closed_form(p: MoleculeParams, t: ArrayLike) -> NDArray[np.complex128]:
    """Amplitudes on ``|0>|O>, |1>|O>, |0>|H>, |1>|H>`` at time ``t``.

    The result has shape ``t.shape + (4,)``.
    """
    t = _times(t)
    es = jc_eigensystem(p)
    a, b = p.alpha, p.beta
    e1 = np.exp(-1j * es.E1 * t)
    e2 = np.exp(-1j * es.E2 * t)
    plus = 0.5 * (e1 + e2)
    minus = 0.5 * (e1 - e2)
    return np.stack(
        [
            a * a + b * b * plus,
            a * b * minus,
            a * b - a * b * plus,
            b * b * minus,
        ],
        axis=-1,
    )


def p_oxygen(p: MoleculeParams, t: ArrayLike) -> NDArray[np.float64] | float:
    """Probability of finding the electron on oxygen, summed over photon number.

    Uses the modulus-squared form
    ``(|2a^2 + b^2 (e1 + e2)|^2 + a^2 b^2 |e1 - e2|^2) / (4 (a^2 + b^2)^2)``.
    """
    t = _times(t)
    es = jc_eigensystem(p)
    a2, b2 = p.alpha**2, p.beta**2
    e1 = np.exp(-1j * es.E1 * t)
    e2 = np.exp(-1j * es.E2 * t)
    num = np.abs(2 * a2 + b2 * (e1 + e2)) ** 2 + a2 * b2 * np.abs(e1 - e2) ** 2
    out = num / (4 * (a2 + b2) ** 2)
    return float(out) if out.ndim == 0 else out


def p_oxygen_expanded(p: MoleculeParams, t: ArrayLike) -> NDArray[np.float64] | float:
    """Same probability written as a sum of cosines.

    ``C + b^2 (b^2 - a^2)/2 cos(2 g t) + 2 a^2 b^2 cos(omega t) cos(g t)`` with
    ``C = a^4 + b^4/2 + a^2 b^2/2`` and ``a^2 + b^2 = 1``.
    """
    t = _times(t)
    a2, b2, g, w = p.alpha**2, p.beta**2, p.g_mol, p.omega
    out = (
        mean_p_oxygen(p)
        + b2 * (b2 - a2) / 2 * np.cos(2 * g * t)
        + 2 * a2 * b2 * np.cos(w * t) * np.cos(g * t)
    )
    return float(out) if np.ndim(out) == 0 else out


def mean_p_oxygen(p: MoleculeParams) -> float:
    """Long-time average of :func:`p_oxygen` without photon leakage."""
    a2, b2 = p.alpha**2, p.beta**2
    return a2 * a2 + b2 * b2 / 2 + a2 * b2 / 2


def asymptotic_p_oxygen(p: MoleculeParams) -> float:
    """Long-time limit of the oxygen probability once photons leak out: ``alpha^2``."""
    return p.alpha**2
