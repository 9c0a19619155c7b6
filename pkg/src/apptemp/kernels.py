"""Hot numeric loops, each with a numba and a numpy implementation.

The public functions dispatch on ``backend`` (``None`` picks the default
chosen in :mod:`apptemp._accel`).  Both implementations of a kernel are
kept numerically equivalent and are cross-checked in the test-suite.

Conventions: superoperators act on row-major vectorised matrices,
``vec(X)[i*d + j] == X[i, j]``; composite indices of ``S (x) R`` are
``s*dR + r``.
"""
import numpy as np

from ._accel import HAS_NUMBA, njit, resolve_backend

__all__ = [
    "rk4_integrate",
    "superop_sweep",
    "kraus_sweep",
    "collision_superops",
]


# --------------------------------------------------------------------------
# fixed-step RK4 on dv/dt = L v

def _rk4_numpy(L, v0, dt, n_steps, stride):
    n_rec = n_steps // stride
    out = np.empty((n_rec + 1, v0.shape[0]), dtype=np.complex128)
    v = v0.astype(np.complex128).copy()
    out[0] = v
    half = 0.5 * dt
    for k in range(1, n_steps + 1):
        k1 = L @ v
        k2 = L @ (v + half * k1)
        k3 = L @ (v + half * k2)
        k4 = L @ (v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if k % stride == 0:
            out[k // stride] = v
    return out


@njit(cache=True)
def _rk4_numba(L, v0, dt, n_steps, stride):
    # matvecs go through numba's BLAS binding; the stage updates are fused loops
    m = v0.shape[0]
    n_rec = n_steps // stride
    out = np.empty((n_rec + 1, m), dtype=np.complex128)
    v = v0.copy()
    tmp = np.empty(m, dtype=np.complex128)
    out[0, :] = v
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(1, n_steps + 1):
        k1 = np.dot(L, v)
        for i in range(m):
            tmp[i] = v[i] + half * k1[i]
        k2 = np.dot(L, tmp)
        for i in range(m):
            tmp[i] = v[i] + half * k2[i]
        k3 = np.dot(L, tmp)
        for i in range(m):
            tmp[i] = v[i] + dt * k3[i]
        k4 = np.dot(L, tmp)
        for i in range(m):
            v[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if k % stride == 0:
            out[k // stride, :] = v
    return out


def rk4_integrate(L, v0, dt, n_steps, stride=1, backend=None):
    """Integrate ``dv/dt = L v`` with classical RK4.

    Returns the states at steps ``0, stride, 2*stride, ...``; ``n_steps``
    must be a multiple of ``stride``.
    """
    if n_steps % stride:
        raise ValueError("n_steps must be a multiple of stride")
    L = np.ascontiguousarray(L, dtype=np.complex128)
    v0 = np.ascontiguousarray(v0, dtype=np.complex128)
    if resolve_backend(backend) == "numba":
        return _rk4_numba(L, v0, float(dt), int(n_steps), int(stride))
    return _rk4_numpy(L, v0, float(dt), int(n_steps), int(stride))


# --------------------------------------------------------------------------
# sequential application of a stack of superoperators

def _sweep_numpy(M, v0):
    v = v0.copy()
    for i in range(M.shape[0]):
        v = M[i] @ v
    return v


@njit(cache=True)
def _sweep_numba(M, v0):
    m = v0.shape[0]
    v = v0.copy()
    w = np.empty(m, dtype=np.complex128)
    for n in range(M.shape[0]):
        for i in range(m):
            acc = 0j
            for j in range(m):
                acc += M[n, i, j] * v[j]
            w[i] = acc
        v[:] = w
    return v


def superop_sweep(M, v0, backend=None):
    """Apply ``M[0]``, then ``M[1]``, ... to the vector ``v0``."""
    M = np.ascontiguousarray(M, dtype=np.complex128)
    v0 = np.ascontiguousarray(v0, dtype=np.complex128)
    if resolve_backend(backend) == "numba":
        return _sweep_numba(M, v0)
    return _sweep_numpy(M, v0)


# --------------------------------------------------------------------------
# repeated Kraus map  rho -> sum_a K_a rho K_a^dag

def _kraus_numpy(K, rho0, n_steps, stride):
    n_rec = n_steps // stride
    d = rho0.shape[0]
    out = np.empty((n_rec + 1, d, d), dtype=np.complex128)
    Kh = np.conj(np.transpose(K, (0, 2, 1)))
    rho = rho0.copy()
    out[0] = rho
    for k in range(1, n_steps + 1):
        rho = np.einsum("aij,jk,akl->il", K, rho, Kh, optimize=True)
        if k % stride == 0:
            out[k // stride] = rho
    return out


@njit(cache=True)
def _kraus_numba(K, rho0, n_steps, stride):
    n_rec = n_steps // stride
    n_k, d, _ = K.shape
    out = np.empty((n_rec + 1, d, d), dtype=np.complex128)
    Kh = np.empty_like(K)
    for a in range(n_k):
        Kh[a] = np.ascontiguousarray(np.conj(K[a].T))
    rho = rho0.copy()
    out[0] = rho
    for k in range(1, n_steps + 1):
        new = np.zeros((d, d), dtype=np.complex128)
        for a in range(n_k):
            new += np.dot(np.dot(K[a], rho), Kh[a])
        rho = new
        if k % stride == 0:
            out[k // stride] = rho
    return out


def kraus_sweep(K, rho0, n_steps, stride=1, backend=None):
    """Iterate a fixed Kraus channel; returns every ``stride``-th state."""
    if n_steps % stride:
        raise ValueError("n_steps must be a multiple of stride")
    K = np.ascontiguousarray(K, dtype=np.complex128)
    rho0 = np.ascontiguousarray(rho0, dtype=np.complex128)
    if resolve_backend(backend) == "numba":
        return _kraus_numba(K, rho0, int(n_steps), int(stride))
    return _kraus_numpy(K, rho0, int(n_steps), int(stride))


# --------------------------------------------------------------------------
# per-collision reduced superoperators

def _collision_numpy(U, ancillas, pre, post, dS, dR):
    n = U.shape[0]
    U5 = U.reshape(n, dS, dR, dS, dR)
    # blocks[n, a, b] = <a| U |b> restricted to S, dressed by the frame rotations
    blocks = np.transpose(U5, (0, 2, 4, 1, 3))
    Q = np.einsum("nij,nabjk,nkl->nabil", post, blocks, pre, optimize=True)
    S = np.einsum("nbc,nabij,nackl->nikjl", ancillas, Q, np.conj(Q), optimize=True)
    return S.reshape(n, dS * dS, dS * dS)


@njit(cache=True)
def _collision_numba(U, ancillas, pre, post, dS, dR):
    n = U.shape[0]
    m = dS * dS
    out = np.zeros((n, m, m), dtype=np.complex128)
    Q = np.empty((dR, dR, dS, dS), dtype=np.complex128)
    blk = np.empty((dS, dS), dtype=np.complex128)
    for t in range(n):
        for a in range(dR):
            for b in range(dR):
                for s in range(dS):
                    for s2 in range(dS):
                        blk[s, s2] = U[t, s * dR + a, s2 * dR + b]
                Q[a, b] = np.dot(np.dot(post[t], blk), pre[t])
        for a in range(dR):
            for b in range(dR):
                for c in range(dR):
                    w = ancillas[t, b, c]
                    if w == 0:
                        continue
                    for i in range(dS):
                        for j in range(dS):
                            qij = w * Q[a, b, i, j]
                            for k in range(dS):
                                for l in range(dS):
                                    out[t, i * dS + k, j * dS + l] += qij * np.conj(Q[a, c, k, l])
    return out


def collision_superops(U, ancillas, pre, post, dS, dR, backend=None):
    """Superoperators of ``X -> post Tr_R[U (pre X pre^dag (x) rho_R) U^dag] post^dag``.

    All inputs are stacks over collisions: ``U`` is ``(n, dS*dR, dS*dR)``,
    ``ancillas`` ``(n, dR, dR)``, ``pre`` and ``post`` ``(n, dS, dS)``.
    """
    args = [np.ascontiguousarray(a, dtype=np.complex128) for a in (U, ancillas, pre, post)]
    if resolve_backend(backend) == "numba":
        return _collision_numba(*args, int(dS), int(dR))
    return _collision_numpy(*args, int(dS), int(dR))


def backends():
    return ("numba", "numpy") if HAS_NUMBA else ("numpy",)
