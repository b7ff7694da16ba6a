"""Dense complex matrix kernel.

Hermitian eigendecomposition, exact unitary propagators and density-matrix
diagnostics. Matrices here are tiny (dim <= 8), so everything is plain dense
numpy ``complex128``; operators and states are passed around as ndarrays and
validated at the boundaries.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ValidationError

HERMITIAN_RTOL = 1e-12
TRACE_TOL = 1e-9
PSD_TOL = 1e-8
UNITARY_TOL = 1e-10

# eigenvalues closer than this (relative to the spectral scale) are a tie
_DEGENERACY_RTOL = 1e-10
# components below this magnitude don't count as "first nonzero"
_PHASE_ATOL = 1e-12


class EigenDecomposition(NamedTuple):
    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.complex128]


def as_matrix(m: ArrayLike, name: str = "matrix") -> NDArray[np.complex128]:
    """Coerce to a finite square complex matrix or raise ``ValidationError``."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def hermiticity_error(m: NDArray) -> float:
    """Return ``max|M - M^dagger|``."""
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: NDArray, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermiticity_error(m) <= rtol * float(np.max(np.abs(m)))


def as_hermitian(m: ArrayLike, name: str = "operator") -> NDArray[np.complex128]:
    arr = as_matrix(m, name)
    if not is_hermitian(arr):
        raise ValidationError(
            f"{name} is not Hermitian (max |M - M^dagger| = {hermiticity_error(arr):.3e})"
        )
    return arr


def as_density_matrix(rho: ArrayLike, name: str = "rho") -> NDArray[np.complex128]:
    """Validate Hermiticity, unit trace and positive semidefiniteness."""
    arr = as_hermitian(rho, name)
    tr = np.trace(arr).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} has trace {tr!r}, expected 1")
    lo = np.linalg.eigvalsh(arr)[0]
    if lo < -PSD_TOL:
        raise ValidationError(f"{name} has negative eigenvalue {lo:.3e}")
    return arr


def pure_state(index: int, dim: int) -> NDArray[np.complex128]:
    """Projector onto the computational basis vector ``index``."""
    if not 0 <= index < dim:
        raise ValidationError(f"basis index {index} out of range for dim {dim}")
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[index, index] = 1.0
    return rho


def projector(vec: ArrayLike) -> NDArray[np.complex128]:
    v = np.asarray(vec, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def _fix_phases(vecs: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # first component above _PHASE_ATOL made real positive, column-wise
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > _PHASE_ATOL)
        if nz.size:
            c = col[nz[0]]
            out[:, j] = col * (abs(c) / c)
    return out


def _order_ties(vals: NDArray[np.float64], vecs: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # inside a degenerate cluster, order columns by the magnitude profile
    # (descending, lexicographic) so the output does not depend on LAPACK's pick
    scale = max(float(np.max(np.abs(vals))), 1.0)
    n = vals.size
    start = 0
    out = vecs.copy()
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[start] <= _DEGENERACY_RTOL * scale:
            stop += 1
        if stop - start > 1:
            block = out[:, start:stop]
            keys = [tuple(-np.round(np.abs(block[:, j]), 12)) for j in range(block.shape[1])]
            order = sorted(range(block.shape[1]), key=keys.__getitem__)
            out[:, start:stop] = block[:, order]
        start = stop
    return out


def hermitian_eigendecompose(h: ArrayLike) -> EigenDecomposition:
    """Eigendecompose a Hermitian matrix.

    Eigenvalues come back ascending. Each eigenvector column has its first
    nonzero component made real positive, and columns within a degenerate
    cluster are put in a deterministic order.

    Raises:
        ValidationError: if ``h`` is not square, finite and Hermitian.
    """
    arr = as_hermitian(h, "H")
    vals, vecs = np.linalg.eigh(arr)
    vecs = _order_ties(vals, vecs)
    return EigenDecomposition(vals, _fix_phases(vecs))


def unitary_propagator(h: ArrayLike, dt: float) -> NDArray[np.complex128]:
    """Return ``exp(-i H dt)`` built from the eigendecomposition of ``H``."""
    if not np.isfinite(dt):
        raise ValidationError(f"dt must be finite, got {dt!r}")
    vals, vecs = hermitian_eigendecompose(h)
    return (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T


def unitary_propagators(hs: NDArray[np.complex128], dt: float) -> NDArray[np.complex128]:
    """Batched ``exp(-i H_k dt)`` for a stack of Hermitian matrices ``(m, d, d)``.

    Skips phase fixing, which does not change the propagator.
    """
    hs = np.asarray(hs, dtype=np.complex128)
    if hs.ndim != 3 or hs.shape[1] != hs.shape[2]:
        raise ValidationError(f"expected a (m, d, d) stack, got shape {hs.shape}")
    if not np.all(np.isfinite(hs)):
        raise ValidationError("Hamiltonian stack has non-finite entries")
    vals, vecs = np.linalg.eigh(hs)
    phases = np.exp(-1j * vals * dt)
    return (vecs * phases[:, None, :]) @ np.conj(np.swapaxes(vecs, 1, 2))


def unitarity_error(u: NDArray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def conjugate(rho: ArrayLike, u: ArrayLike) -> NDArray[np.complex128]:
    """Return ``U rho U^dagger``.

    Raises:
        ValidationError: on shape mismatch or if ``U`` is not unitary to 1e-10.
    """
    r = as_matrix(rho, "rho")
    um = as_matrix(u, "U")
    if r.shape != um.shape:
        raise ValidationError(f"dimension mismatch: rho {r.shape} vs U {um.shape}")
    if unitarity_error(um) > UNITARY_TOL:
        raise ValidationError("U is not unitary")
    return um @ r @ um.conj().T


def purity(rho: NDArray) -> float:
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def density_diagnostics(rho: ArrayLike) -> tuple[float, float, float]:
    """Return ``(trace, purity, min_eig)`` of a square Hermitian matrix."""
    r = as_hermitian(rho, "rho")
    return float(np.trace(r).real), purity(r), float(np.linalg.eigvalsh(r)[0])
