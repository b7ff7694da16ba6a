"""Split-step integrator loop: exact unitary conjugation, then one Euler
increment of the Lindblad dissipator.

Two implementations with the same signature live here. ``propagate_numba`` is
an explicit-loop ``@njit`` kernel; ``propagate_numpy`` is the pure-numpy
reference. ``propagate`` points at whichever one ``CAVSIM_BACKEND`` selects.
Results agree to rounding, not bit for bit.
"""

from __future__ import annotations

import numpy as np

from ._backend import USE_NUMBA, njit


def _n_records(iterations: int, stride: int) -> int:
    return iterations // stride + 1


def propagate_numpy(props, rho0, ops, ops_dag, ops_dd, rates, dt, iterations, stride):
    """Run ``iterations`` split steps from ``rho0``.

    Args:
        props: ``(m, d, d)`` propagators; ``m == 1`` means time independent,
            otherwise ``props[k]`` is used at step ``k``.
        rho0: ``(d, d)`` initial density matrix.
        ops, ops_dag, ops_dd: ``(K, d, d)`` jump operators ``A``, ``A^dagger``
            and ``A^dagger A``.
        rates: ``(K,)`` nonnegative rates.
        dt: time step.
        iterations: number of steps.
        stride: record every ``stride`` steps (plus the initial state).

    Returns:
        ``(records, failed)``: ``records`` is ``(iterations // stride + 1, d, d)``;
        ``failed`` is the first step whose output had a non-finite trace, or -1.
    """
    d = rho0.shape[0]
    records = np.zeros((_n_records(iterations, stride), d, d), dtype=np.complex128)
    rho = rho0.astype(np.complex128, copy=True)
    records[0] = rho
    single = props.shape[0] == 1
    r = 1
    for k in range(iterations):
        u = props[0] if single else props[k]
        rho = u @ rho @ u.conj().T
        if rates.shape[0]:
            lind = np.zeros_like(rho)
            for j in range(rates.shape[0]):
                dd = ops_dd[j]
                lind += rates[j] * (ops[j] @ rho @ ops_dag[j] - 0.5 * (rho @ dd + dd @ rho))
            rho = rho + dt * lind
        if not np.isfinite(np.trace(rho)):
            return records[:r].copy(), k
        if (k + 1) % stride == 0:
            records[r] = rho
            r += 1
    return records, -1


@njit(cache=True)
def _mm(a, b, out):
    d = a.shape[0]
    for i in range(d):
        for j in range(d):
            acc = 0j
            for m in range(d):
                acc += a[i, m] * b[m, j]
            out[i, j] = acc


@njit(cache=True)
def _mm_dag(a, b, out):
    # out = a @ b^dagger
    d = a.shape[0]
    for i in range(d):
        for j in range(d):
            acc = 0j
            for m in range(d):
                acc += a[i, m] * np.conj(b[j, m])
            out[i, j] = acc


@njit(cache=True)
def propagate_numba(props, rho0, ops, ops_dag, ops_dd, rates, dt, iterations, stride):
    d = rho0.shape[0]
    n_rec = iterations // stride + 1
    records = np.zeros((n_rec, d, d), dtype=np.complex128)
    rho = rho0.astype(np.complex128)
    records[0] = rho
    tmp = np.empty((d, d), dtype=np.complex128)
    tmp2 = np.empty((d, d), dtype=np.complex128)
    lind = np.empty((d, d), dtype=np.complex128)
    single = props.shape[0] == 1
    n_ch = rates.shape[0]
    r = 1
    for k in range(iterations):
        u = props[0] if single else props[k]
        _mm(u, rho, tmp)
        _mm_dag(tmp, u, rho)
        if n_ch > 0:
            lind[:, :] = 0j
            for c in range(n_ch):
                g = rates[c]
                _mm(ops[c], rho, tmp)
                _mm(tmp, ops_dag[c], tmp2)
                for i in range(d):
                    for j in range(d):
                        lind[i, j] += g * tmp2[i, j]
                _mm(rho, ops_dd[c], tmp)
                _mm(ops_dd[c], rho, tmp2)
                for i in range(d):
                    for j in range(d):
                        lind[i, j] -= 0.5 * g * (tmp[i, j] + tmp2[i, j])
            for i in range(d):
                for j in range(d):
                    rho[i, j] += dt * lind[i, j]
        tr = 0j
        for i in range(d):
            tr += rho[i, i]
        if not np.isfinite(tr.real) or not np.isfinite(tr.imag):
            return records[:r].copy(), k
        if (k + 1) % stride == 0:
            records[r] = rho
            r += 1
    return records, -1


def propagate(props, rho0, ops, ops_dag, ops_dd, rates, dt, iterations, stride):
    fn = propagate_numba if USE_NUMBA else propagate_numpy
    return fn(
        np.ascontiguousarray(props, dtype=np.complex128),
        np.ascontiguousarray(rho0, dtype=np.complex128),
        np.ascontiguousarray(ops, dtype=np.complex128),
        np.ascontiguousarray(ops_dag, dtype=np.complex128),
        np.ascontiguousarray(ops_dd, dtype=np.complex128),
        np.ascontiguousarray(rates, dtype=np.float64),
        float(dt),
        int(iterations),
        int(stride),
    )
