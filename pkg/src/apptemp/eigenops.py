"""Bohr frequencies and ladder (eigen)operators of a coupling observable.

A coupling ``P`` is split as ``P = sum_w A(w)`` with ``[H, A(w)] = -w A(w)``
and ``A(-w) = A(w)^dag``.  Eigenvalue differences closer than the cluster
tolerance are treated as one frequency (single-linkage on the sorted
differences); the representative of a cluster is the mean weighted by
the coupling weight ``|<i|P|j>|^2`` of each contributing eigenvector pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FrequencyNotInSpectrum, DimensionMismatch
from .operators import (
    HermitianOperator,
    as_hermitian,
    dagger,
    matrix_from_json,
    matrix_to_json,
)

TOL_LADDER = 1e-9
# eigenvalues that agree to this (relative) precision are exactly degenerate
DEGENERACY_FLOOR = 1e-10


def _effective_tolerance(eigenvalues, cluster_tolerance):
    scale = max(1.0, float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 1.0)
    return max(float(cluster_tolerance), DEGENERACY_FLOOR * scale)


@dataclass(frozen=True)
class _Cluster:
    omega: float
    members: tuple[tuple[int, int], ...]  # (i, j) with eps_j - eps_i in the cluster


def _clusters(eigenvalues, weights, cluster_tolerance):
    """Cluster all differences ``eps_j - eps_i`` (i != j)."""
    d = eigenvalues.size
    tol = _effective_tolerance(eigenvalues, cluster_tolerance)
    ii, jj = np.nonzero(~np.eye(d, dtype=bool))
    diffs = eigenvalues[jj] - eigenvalues[ii]
    if diffs.size == 0:
        return []
    order = np.argsort(diffs, kind="stable")
    sd = diffs[order]
    breaks = np.nonzero(np.diff(sd) > tol)[0] + 1
    groups = np.split(order, breaks)
    out = []
    for g in groups:
        lo, hi = diffs[g].min(), diffs[g].max()
        if lo <= 0.0 <= hi or (abs(lo) <= tol and abs(hi) <= tol):
            omega = 0.0
        else:
            w = weights[ii[g], jj[g]] if weights is not None else np.ones(g.size)
            if not np.any(w > 0):
                w = np.ones(g.size)
            omega = float(np.sum(w * diffs[g]) / np.sum(w))
        out.append(_Cluster(omega, tuple(zip(ii[g].tolist(), jj[g].tolist()))))
    # enforce exact closure under negation: positive clusters define negative ones
    pos = {round(c.omega, 15): c for c in out if c.omega > 0}
    fixed = []
    for c in out:
        if c.omega < 0:
            mirror = min(pos.values(), key=lambda p: abs(p.omega + c.omega)) if pos else None
            if mirror is not None and abs(mirror.omega + c.omega) <= tol:
                c = _Cluster(-mirror.omega, c.members)
        fixed.append(c)
    return fixed


@dataclass(frozen=True)
class BohrSpectrum:
    frequencies: tuple[float, ...]
    cluster_tolerance: float

    def __contains__(self, omega):
        return self.find(omega) is not None

    def find(self, omega, tol=None):
        tol = max(self.cluster_tolerance, 1e-9 * max(1.0, abs(omega))) if tol is None else tol
        best = None
        for w in self.frequencies:
            if abs(w - omega) <= tol and (best is None or abs(w - omega) < abs(best - omega)):
                best = w
        return best

    def positive(self):
        return tuple(w for w in self.frequencies if w > 0)


def bohr_frequencies(H, cluster_tolerance: float = 0.0) -> BohrSpectrum:
    """All Bohr frequencies of ``H``, clustered.

    ``w = 0`` appears only if ``H`` has degenerate eigenvalues.
    """
    if cluster_tolerance < 0:
        raise ValueError("cluster_tolerance must be >= 0")
    eps = as_hermitian(H).eigenvalues
    cl = _clusters(np.asarray(eps), None, cluster_tolerance)
    return BohrSpectrum(tuple(sorted(c.omega for c in cl)), float(cluster_tolerance))


@dataclass(frozen=True)
class LadderOperator:
    """``A(w)``: lowers the energy by ``w``."""

    frequency: float
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dag(self) -> "LadderOperator":
        return LadderOperator(-self.frequency, dagger(self.matrix))

    def ladder_residual(self, H) -> float:
        h = np.asarray(as_hermitian(H).data)
        a = self.matrix
        return float(np.max(np.abs(h @ a - a @ h + self.frequency * a)))

    def raising(self) -> np.ndarray:
        """``A A^dag``."""
        return self.matrix @ dagger(self.matrix)

    def lowering(self) -> np.ndarray:
        """``A^dag A``."""
        return dagger(self.matrix) @ self.matrix


def _pair_weights(H, P):
    v = H.eigenvectors
    p_eig = dagger(v) @ np.asarray(P.data) @ v
    return v, p_eig, np.abs(p_eig) ** 2


def _assemble(v, p_eig, members):
    mask = np.zeros(p_eig.shape, dtype=bool)
    if members:
        i, j = zip(*members)
        mask[list(i), list(j)] = True
    return v @ np.where(mask, p_eig, 0) @ dagger(v)


def ladder_operator(H, P, omega: float, cluster_tolerance: float = 0.0) -> LadderOperator:
    """``A(w) = sum pi_e P pi_e'`` over eigenvalue pairs with ``e' - e`` in the ``w`` cluster."""
    H, P = as_hermitian(H), as_hermitian(P)
    if H.dim != P.dim:
        raise DimensionMismatch("H and P act on different spaces")
    v, p_eig, wts = _pair_weights(H, P)
    clusters = _clusters(np.asarray(H.eigenvalues), wts, cluster_tolerance)
    tol = max(_effective_tolerance(np.asarray(H.eigenvalues), cluster_tolerance), 1e-9 * max(1.0, abs(omega)))
    match = [c for c in clusters if abs(c.omega - omega) <= tol]
    if not match:
        raise FrequencyNotInSpectrum(omega)
    c = min(match, key=lambda c: abs(c.omega - omega))
    return LadderOperator(c.omega, _assemble(v, p_eig, c.members))


@dataclass(frozen=True)
class EigenoperatorSet:
    hamiltonian: HermitianOperator
    coupling: HermitianOperator
    operators: dict  # omega -> LadderOperator, ascending

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(self.operators)

    def __getitem__(self, omega) -> LadderOperator:
        w = self.find(omega)
        if w is None:
            raise FrequencyNotInSpectrum(omega)
        return self.operators[w]

    def find(self, omega, tol=1e-9):
        for w in self.operators:
            if abs(w - omega) <= tol * max(1.0, abs(omega)):
                return w
        return None

    def positive(self):
        return {w: a for w, a in self.operators.items() if w > 0}

    def completeness_residual(self) -> float:
        total = sum((a.matrix for a in self.operators.values()), np.zeros((self.coupling.dim,) * 2, complex))
        return float(np.max(np.abs(total - np.asarray(self.coupling.data))))

    def max_ladder_residual(self) -> float:
        return max((a.ladder_residual(self.hamiltonian) for a in self.operators.values()), default=0.0)

    def conjugation_residual(self) -> float:
        worst = 0.0
        for w, a in self.operators.items():
            m = self.find(-w)
            if m is None:
                return float("inf")
            worst = max(worst, float(np.max(np.abs(self.operators[m].matrix - dagger(a.matrix)))))
        return worst

    def to_json(self) -> dict:
        return {
            "frequencies": [float(w) for w in self.operators],
            "operators": [{"omega": float(w), "matrix": matrix_to_json(a.matrix)} for w, a in self.operators.items()],
        }

    @staticmethod
    def operators_from_json(obj) -> dict:
        return {float(o["omega"]): LadderOperator(float(o["omega"]), matrix_from_json(o["matrix"]))
                for o in obj["operators"]}


def eigenoperator_decomposition(H, P, cluster_tolerance: float = 0.0, drop_tol: float = 1e-12) -> EigenoperatorSet:
    """Full decomposition of ``P`` into ladder operators of ``H``.

    Components whose matrix vanishes (max entry below ``drop_tol`` times the
    scale of ``P``) are left out, so only channels that ``P`` actually
    drives are listed.
    """
    H, P = as_hermitian(H), as_hermitian(P)
    if H.dim != P.dim:
        raise DimensionMismatch("H and P act on different spaces")
    v, p_eig, wts = _pair_weights(H, P)
    clusters = _clusters(np.asarray(H.eigenvalues), wts, cluster_tolerance)
    scale = max(1.0, float(np.max(np.abs(P.data))) if P.dim else 1.0)
    ops = {}
    diag = [(i, i) for i in range(H.dim)]
    for c in sorted(clusters, key=lambda c: c.omega):
        members = c.members + (tuple(diag) if c.omega == 0.0 else ())
        a = _assemble(v, p_eig, members)
        if np.max(np.abs(a)) <= drop_tol * scale:
            continue
        ops[c.omega] = LadderOperator(c.omega, a)
    if not any(c.omega == 0.0 for c in clusters):
        a0 = _assemble(v, p_eig, diag)
        if np.max(np.abs(a0)) > drop_tol * scale:
            ops[0.0] = LadderOperator(0.0, a0)
    ops = dict(sorted(ops.items()))
    return EigenoperatorSet(H, P, ops)
