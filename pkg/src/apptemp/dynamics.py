"""GKSL generators, their integration and steady states, and a collisional simulator.

Superoperators act on row-major vectorised matrices, so that
``vec(A X B) = kron(A, B.T) @ vec(X)``.  Dissipators are stored in the
canonical form ``rate * (A rho A^dag - 1/2 {A^dag A, rho})``.
"""
from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .eigenops import EigenoperatorSet, eigenoperator_decomposition
from .errors import (
    DimensionMismatch,
    DimensionTooLarge,
    InvalidCollisionSpec,
    InvalidDensityMatrix,
    MissingSpectralValue,
    NegativeRate,
    NoPhysicalSteadyState,
    PositivityLost,
    StepTooLarge,
)
from .operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    TOL_PSD,
    DensityMatrix,
    HilbertSpace,
    as_hermitian,
    dagger,
    embed,
    expectation,
    matrix_to_json,
    partial_trace,
)
from .thermo import SpectralDensity, apparent_beta, spectral_density_collisional

log = logging.getLogger(__name__)

TOL_GEN = 1e-12
TOL_SS = 1e-9
KERNEL_RTOL = 1e-10
STEP_LIMIT = 0.1
# exact 2-norm up to this superoperator size, power iteration above
_EXACT_NORM_MAX = 1024


def canonical_rate(coefficient, convention: str = "rate") -> float:
    """Convert a printed dissipator coefficient to a canonical rate.

    ``"rate"``: already canonical (a spectral density value ``G(w)``).
    ``"gamma"``: ``Gamma (A rho A^dag - A^dag A rho) + h.c.``; the rate is
    ``2 Re Gamma`` (``Im Gamma`` is a level shift, not a rate).
    ``"front"``: ``g (2 A rho A^dag - A^dag A rho - rho A^dag A)``; the rate is ``2 g``.
    """
    if convention == "rate":
        return float(np.real(coefficient))
    if convention == "gamma":
        return 2.0 * float(np.real(coefficient))
    if convention == "front":
        return 2.0 * float(np.real(coefficient))
    raise ValueError(f"unknown rate convention {convention!r}")


def _vec(x):
    return np.asarray(x, dtype=np.complex128).reshape(-1)


def _unvec(v, d):
    return np.asarray(v).reshape(d, d)


def commutator_superop(H):
    """Superoperator of ``-i [H, .]``."""
    H = np.asarray(H, dtype=np.complex128)
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(H, eye) - np.kron(eye, H.T))


def dissipator_superop(A, rate=1.0):
    A = np.asarray(A, dtype=np.complex128)
    eye = np.eye(A.shape[0])
    ada = dagger(A) @ A
    return rate * (np.kron(A, A.conj()) - 0.5 * np.kron(ada, eye) - 0.5 * np.kron(eye, ada.T))


class LindbladGenerator:
    """``L rho = -i[H, rho] + sum_k rate_k D[A_k] rho``; the superoperator is built on demand."""

    def __init__(self, space: HilbertSpace, dissipators: Sequence, hamiltonian_part=None):
        self.space = space
        d = space.dimension
        dis = []
        for A, rate in dissipators:
            A = np.array(A, dtype=np.complex128)
            if A.shape != (d, d):
                raise DimensionMismatch(f"jump operator has shape {A.shape}, space is {d}")
            rate = float(rate)
            if rate < 0:
                raise NegativeRate(f"rate {rate} is negative")
            A.flags.writeable = False
            dis.append((A, rate))
        self.dissipators = tuple(dis)
        if hamiltonian_part is not None:
            hamiltonian_part = np.array(as_hermitian(hamiltonian_part).data)
            if hamiltonian_part.shape != (d, d):
                raise DimensionMismatch("Hamiltonian part does not match the space")
            hamiltonian_part.flags.writeable = False
        self.hamiltonian_part = hamiltonian_part
        self._superop = None

    @property
    def dim(self):
        return self.space.dimension

    @property
    def superoperator(self) -> np.ndarray:
        if self._superop is None:
            d = self.dim
            M = np.zeros((d * d, d * d), dtype=np.complex128)
            if self.hamiltonian_part is not None:
                M += commutator_superop(self.hamiltonian_part)
            for A, rate in self.dissipators:
                if rate:
                    M += dissipator_superop(A, rate)
            M.flags.writeable = False
            self._superop = M
        return self._superop

    def trace_residual(self):
        """How far the generator is from annihilating the trace functional."""
        d = self.dim
        return float(np.max(np.abs(_vec(np.eye(d)) @ self.superoperator)))

    def to_json(self):
        return {"dim": self.dim, "superoperator": matrix_to_json(self.superoperator)}

    def __add__(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("generators act on different spaces")
        h = [x for x in (self.hamiltonian_part, other.hamiltonian_part) if x is not None]
        return LindbladGenerator(self.space, self.dissipators + other.dissipators, sum(h) if h else None)


def build_generator(eigenops_S, G: SpectralDensity, shifts=None) -> LindbladGenerator:
    """Generator ``sum_w G(w) D[A(w)] - i[shifts, .]`` of one or several eigenoperator sets."""
    sets = [eigenops_S] if isinstance(eigenops_S, EigenoperatorSet) else list(eigenops_S)
    if not sets:
        raise ValueError("need at least one eigenoperator set")
    space = sets[0].hamiltonian.space
    dis = []
    for es in sets:
        for w, a in es.operators.items():
            if w not in G:
                raise MissingSpectralValue(w)
            rate = G(w)
            if rate < 0:
                raise NegativeRate(f"G({w}) = {rate}")
            dis.append((a.matrix, canonical_rate(rate, "rate")))
    return LindbladGenerator(space, dis, shifts)


def apply_generator(L: LindbladGenerator, rho) -> np.ndarray:
    """``d rho / dt`` evaluated directly from the jump operators."""
    r = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if r.shape != (L.dim, L.dim):
        raise DimensionMismatch(f"state {r.shape} vs generator dimension {L.dim}")
    out = np.zeros_like(r, dtype=np.complex128)
    if L.hamiltonian_part is not None:
        h = L.hamiltonian_part
        out += -1j * (h @ r - r @ h)
    for A, rate in L.dissipators:
        if not rate:
            continue
        ada = dagger(A) @ A
        out += rate * (A @ r @ dagger(A) - 0.5 * (ada @ r + r @ ada))
    return out


# -- time evolution ----------------------------------------------------------

def generator_norm(L: LindbladGenerator, n_iter=60, seed=0) -> float:
    """Spectral norm of the superoperator (power iteration above a size cut-off)."""
    M = L.superoperator
    if M.shape[0] <= _EXACT_NORM_MAX:
        return float(np.linalg.norm(M, 2))
    rng = np.random.default_rng(seed)
    v = rng.normal(size=M.shape[0]) + 1j * rng.normal(size=M.shape[0])
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(n_iter):
        w = dagger(M) @ (M @ v)
        s = np.linalg.norm(w)
        v = w / s
    # power iteration approaches from below; keep a margin
    return 1.1 * math.sqrt(s)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple

    def __len__(self):
        return len(self.states)

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]

    def to_csv(self, H=None, ladder=None, header_lines=()) -> str:
        """Rows ``t, energy, beta_apparent, populations...`` (energy/beta blank without ``H``/``ladder``)."""
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        d = self.states[0].dim
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "energy", "beta_apparent"] + [f"p{i}" for i in range(d)])
        h = None if H is None else np.asarray(as_hermitian(H).data)
        for t, rho in zip(self.times, self.states):
            e = "" if h is None else f"{expectation(h, rho).real:.17g}"
            b = "" if ladder is None else str(apparent_beta(rho, ladder))
            pops = [f"{p:.17g}" for p in np.real(np.diag(rho.data))]
            w.writerow([f"{t:.17g}", e, b] + pops)
        return buf.getvalue()


def evolve(L: LindbladGenerator, rho0, t_final, dt, record_every=1, backend=None) -> Trajectory:
    """Fixed-step RK4 on the vectorised generator.

    Steps until ``t >= t_final``; every ``record_every``-th state (and the
    last) is validated and returned.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    nrm = generator_norm(L)
    if dt * nrm > STEP_LIMIT:
        raise StepTooLarge(f"dt * ||L|| = {dt * nrm:.3g} exceeds {STEP_LIMIT}")
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    n_steps = max(1, int(math.ceil(t_final / dt - 1e-9)))
    stride = max(1, int(record_every))
    n_steps = int(math.ceil(n_steps / stride)) * stride
    vs = kernels.rk4_integrate(L.superoperator, _vec(rho0.data), dt, n_steps, stride, backend=backend)
    d = L.dim
    states = []
    for k, v in enumerate(vs):
        m = _unvec(v, d)
        lam = float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])
        if lam < -10 * TOL_PSD:
            raise PositivityLost(f"eigenvalue {lam:.3e} at t = {k * stride * dt:.6g}")
        try:
            states.append(DensityMatrix(m, rho0.space))
        except InvalidDensityMatrix as exc:
            raise PositivityLost(str(exc)) from exc
    times = np.arange(len(states)) * stride * dt
    return Trajectory(times, tuple(states))


# -- steady states -----------------------------------------------------------

@dataclass(frozen=True)
class SteadyStateReport:
    state: DensityMatrix
    nullspace_dimension: int
    conserved_values: tuple
    residual: float


def _conserved_basis(U0, d):
    """Orthonormal left-kernel functionals with the trace functional first when present."""
    tr = _vec(np.eye(d)) / math.sqrt(d)
    coef = dagger(U0) @ tr
    if np.linalg.norm(U0 @ coef - tr) < 1e-8:
        others = U0 - np.outer(tr, tr.conj() @ U0)
        q, r = np.linalg.qr(others)
        keep = np.abs(np.diag(r)) > 1e-8 if r.size else np.zeros(0, bool)
        rest = q[:, : U0.shape[1]][:, keep[: U0.shape[1]]] if keep.size else q[:, :0]
        basis = np.column_stack([tr, rest[:, : U0.shape[1] - 1]])
        labels = ["trace"] + [f"conserved_{k}" for k in range(1, basis.shape[1])]
        return basis, labels
    return U0, [f"conserved_{k}" for k in range(U0.shape[1])]


def steady_state(L: LindbladGenerator, rho0, tol_ss=TOL_SS) -> SteadyStateReport:
    """Stationary state reached from ``rho0``.

    The right kernel of the superoperator spans the stationary states and
    the left kernel the conserved functionals.  The returned state is the
    kernel element on which every conserved functional takes its value at
    ``rho0``.
    """
    rho0 = rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(rho0)
    d = L.dim
    M = np.asarray(L.superoperator)
    U, s, Vh = np.linalg.svd(M)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    null = s <= KERNEL_RTOL * smax
    k = int(np.count_nonzero(null))
    if k == 0:
        raise NoPhysicalSteadyState("generator has a trivial kernel")
    K = dagger(Vh[null])            # right kernel, columns
    basis, labels = _conserved_basis(U[:, null], d)
    x0 = _vec(rho0.data)
    targets = dagger(basis) @ x0
    coeffs, *_ = np.linalg.lstsq(dagger(basis) @ K, targets, rcond=None)
    x = K @ coeffs
    m = _unvec(x, d)
    m = 0.5 * (m + dagger(m))
    tr = np.trace(m).real
    if abs(tr) < 1e-14:
        raise NoPhysicalSteadyState("kernel element has zero trace")
    try:
        state = DensityMatrix(m / tr, rho0.space)
    except InvalidDensityMatrix as exc:
        raise NoPhysicalSteadyState(str(exc)) from exc
    residual = float(np.max(np.abs(apply_generator(L, state))))
    if residual > tol_ss:
        raise NoPhysicalSteadyState(f"residual {residual:.3e} exceeds {tol_ss:g}")
    vals = []
    for lab, t in zip(labels, targets):
        if lab == "trace":
            t = t * math.sqrt(d)     # report Tr(rho0) itself
        vals.append((lab, float(t.real) if abs(t.imag) <= 1e-12 else complex(t)))
    return SteadyStateReport(state, k, tuple(vals), residual)


# -- collisional model ---------------------------------------------------------

@dataclass(frozen=True)
class CollisionSpec:
    """Repeated brief collisions of ``S`` with fresh copies of an ancilla ``R``.

    ``tau_jitter`` spreads collision durations uniformly over
    ``tau * [1 - j, 1 + j]``; it defaults to 0 (all collisions equal).
    """

    H_S: object
    H_R: object
    P_S: object
    P_R: object
    lam: float
    tau: float
    r: float
    rho_R: object
    phase_randomization: bool = True
    seed: int = 0
    tau_jitter: float = 0.0

    def __post_init__(self):
        for name in ("H_S", "H_R", "P_S", "P_R"):
            object.__setattr__(self, name, as_hermitian(getattr(self, name)))
        rho_R = self.rho_R if isinstance(self.rho_R, DensityMatrix) else DensityMatrix(self.rho_R)
        object.__setattr__(self, "rho_R", rho_R)
        if self.H_S.dim != self.P_S.dim or self.H_R.dim != self.P_R.dim or rho_R.dim != self.H_R.dim:
            raise InvalidCollisionSpec("operator dimensions are inconsistent")
        if self.tau <= 0 or self.r <= 0:
            raise InvalidCollisionSpec("tau and r must be positive")
        if not 0 <= self.tau_jitter < 1:
            raise InvalidCollisionSpec("tau_jitter must lie in [0, 1)")
        if abs(self.lam) * self.tau_max > 0.1 + 1e-12:
            raise InvalidCollisionSpec(f"|lambda| tau = {abs(self.lam) * self.tau_max:.3g} exceeds 0.1")
        if self.r * self.tau_max > 1 + 1e-12:
            raise InvalidCollisionSpec(f"r tau = {self.r * self.tau_max:.3g} exceeds 1")

    @property
    def tau_max(self):
        return self.tau * (1 + self.tau_jitter)

    @property
    def tau_sq_mean(self):
        return self.tau ** 2 * (1 + self.tau_jitter ** 2 / 3)

    @property
    def dS(self):
        return self.H_S.dim

    @property
    def dR(self):
        return self.H_R.dim

    def with_lambda(self, lam):
        return CollisionSpec(self.H_S, self.H_R, self.P_S, self.P_R, lam, self.tau, self.r, self.rho_R,
                             self.phase_randomization, self.seed, self.tau_jitter)

    def total_hamiltonian(self):
        eS, eR = np.eye(self.dS), np.eye(self.dR)
        return (np.kron(self.H_S.data, eR) + np.kron(eS, self.H_R.data)
                + self.lam * np.kron(self.P_S.data, self.P_R.data))

    def analytic_generator(self) -> LindbladGenerator:
        """Secular second-order generator with rates ``r lam^2 <tau^2> <A_R A_R^dag>``."""
        es_S = eigenoperator_decomposition(self.H_S, self.P_S)
        es_R = eigenoperator_decomposition(self.H_R, self.P_R)
        G = spectral_density_collisional(self.rho_R, es_R, self.r, self.lam, self.tau, tau_sq_mean=self.tau_sq_mean)
        vals = {w: (G(w) if w in G else 0.0) for w in es_S.frequencies}
        return build_generator(es_S, SpectralDensity(vals, G.source))


def _level_indices(H_R):
    eps, v = H_R.eigh()
    steps = np.diff(eps) > 1e-10 * np.maximum(1.0, np.abs(eps[1:]))
    return np.concatenate([[0], np.cumsum(steps)]).astype(float), v


def _level_phases(H_R, phi):
    """``U_phi = sum_k exp(-i phi k) pi_k`` over the distinct energy levels of ``H_R``.

    ``phi`` may be an array, giving a stack of unitaries.
    """
    k, v = _level_indices(H_R)
    ph = np.exp(-1j * np.outer(np.atleast_1d(phi), k))
    out = np.einsum("ij,nj,kj->nik", v, ph, v.conj(), optimize=True)
    return out if np.ndim(phi) else out[0]


def _propagators(H, times):
    eps, v = np.linalg.eigh(H)
    ph = np.exp(-1j * np.outer(times, eps))
    return np.einsum("ij,nj,kj->nik", v, ph, v.conj(), optimize=True)


def collide_once(spec: CollisionSpec, rho_S, phase: float = 0.0, tau=None) -> DensityMatrix:
    """One exact collision, Schrodinger picture.

    The ancilla enters as ``U_phi rho_R U_phi^dag`` with level phases set by ``phase``.
    """
    tau = spec.tau if tau is None else tau
    r_S = rho_S.data if isinstance(rho_S, DensityMatrix) else np.asarray(rho_S)
    U = _propagators(spec.total_hamiltonian(), [tau])[0]
    up = _level_phases(spec.H_R, phase)
    rho_R = up @ spec.rho_R.data @ dagger(up)
    joint = U @ np.kron(r_S, rho_R) @ dagger(U)
    return partial_trace(DensityMatrix(joint, HilbertSpace(spec.dS * spec.dR, factors=(spec.dS, spec.dR))), 0)


@dataclass(frozen=True)
class CoarseGrainResult:
    generator: np.ndarray          # empirical superoperator, per unit time
    standard_error: np.ndarray     # complex-magnitude standard error per entry
    rho_S_final: DensityMatrix
    n_collisions: int
    t_final: float
    samples: np.ndarray = field(repr=False)   # per-collision (M_i - I), used for odd-part estimates


def _schedule(spec: CollisionSpec, n, rng):
    tau = spec.tau * (1 + spec.tau_jitter * rng.uniform(-1, 1, size=n)) if spec.tau_jitter else np.full(n, spec.tau)
    gap_mean = 1.0 / spec.r - spec.tau
    gaps = rng.exponential(gap_mean, size=n) if gap_mean > 0 else np.zeros(n)
    starts = np.concatenate([[0.0], np.cumsum(tau + gaps)[:-1]])
    phases = rng.uniform(0, 2 * np.pi, size=n) if spec.phase_randomization else None
    return starts, tau, phases


def collision_maps(spec: CollisionSpec, n, rng=None, backend=None):
    """Interaction-picture superoperators of ``n`` collisions and their schedule."""
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    starts, taus, phases = _schedule(spec, n, rng)
    U = _propagators(spec.total_hamiltonian(), taus)
    eS, vS = spec.H_S.eigh()
    pre = np.einsum("ij,nj,kj->nik", vS, np.exp(-1j * np.outer(starts, eS)), vS.conj(), optimize=True)
    post = np.einsum("ij,nj,kj->nik", vS, np.exp(1j * np.outer(starts + taus, eS)), vS.conj(), optimize=True)
    if spec.phase_randomization:
        # a random level phase replaces the clock-locked free evolution of R
        ups = _level_phases(spec.H_R, phases)
    else:
        eR, vR = spec.H_R.eigh()
        ups = np.einsum("ij,nj,kj->nik", vR, np.exp(-1j * np.outer(starts, eR)), vR.conj(), optimize=True)
    anc = ups @ spec.rho_R.data @ dagger(ups)
    M = kernels.collision_superops(U, anc, pre, post, spec.dS, spec.dR, backend=backend)
    return M, starts, taus


def collisional_coarse_grain(spec: CollisionSpec, rho_S, n_collisions, backend=None) -> CoarseGrainResult:
    """Run ``n_collisions`` exact collisions and estimate the coarse-grained generator.

    The estimate is ``r * mean_i (M_i - I)`` where ``M_i`` is the
    interaction-picture map of collision ``i`` expressed on the basis
    ``|j><k|`` (every basis probe at once).  The final state is returned in
    the Schrodinger picture.
    """
    if n_collisions < 1:
        raise ValueError("need at least one collision")
    rho_S = rho_S if isinstance(rho_S, DensityMatrix) else DensityMatrix(rho_S)
    M, starts, taus = collision_maps(spec, n_collisions, backend=backend)
    m = spec.dS ** 2
    dev = M - np.eye(m)[None]
    gen = spec.r * dev.mean(axis=0)
    if n_collisions > 1:
        se = spec.r * np.sqrt(np.sum(np.abs(dev - dev.mean(axis=0)) ** 2, axis=0) / (n_collisions - 1)) / math.sqrt(n_collisions)
    else:
        se = np.full((m, m), np.inf)
    v = kernels.superop_sweep(M, _vec(rho_S.data), backend=backend)
    t_end = float(starts[-1] + taus[-1])
    eS, vS = spec.H_S.eigh()
    rot = vS @ np.diag(np.exp(-1j * eS * t_end)) @ dagger(vS)
    final = rot @ _unvec(v, spec.dS) @ dagger(rot)
    final = 0.5 * (final + dagger(final))
    return CoarseGrainResult(gen, se, DensityMatrix(final / np.trace(final).real, rho_S.space), n_collisions, t_end, dev)


def work_term(spec: CollisionSpec, n_collisions, backend=None) -> np.ndarray:
    """First-order (odd in ``lam``) part of the empirical generator.

    Both signs of the coupling are run on identical random schedules, so
    the even orders cancel exactly and only the unitary ``O(lam tau)``
    contribution (plus ``O(lam^3)``) survives.
    """
    Mp, _, _ = collision_maps(spec, n_collisions, backend=backend)
    Mm, _, _ = collision_maps(spec.with_lambda(-spec.lam), n_collisions, backend=backend)
    return spec.r * 0.5 * (Mp - Mm).mean(axis=0)


def collision_kraus(spec: CollisionSpec) -> np.ndarray:
    """Kraus operators of one collision of duration ``tau`` in the frame co-rotating with ``H_S``.

    Collision phases are irrelevant here when ``rho_R`` has no coherence
    between different energy levels.
    """
    U = _propagators(spec.total_hamiltonian(), [spec.tau])[0]
    dS, dR = spec.dS, spec.dR
    p, w = np.linalg.eigh(spec.rho_R.data)
    eS, vS = spec.H_S.eigh()
    post = vS @ np.diag(np.exp(1j * eS * spec.tau)) @ dagger(vS)
    U4 = U.reshape(dS, dR, dS, dR)
    ks = []
    for a in range(dR):
        for b in range(dR):
            if p[b] <= 1e-15:
                continue
            # <a| U |w_b>, an operator on S
            blk = np.einsum("ijb,b->ij", U4[:, a, :, :], w[:, b])
            ks.append(math.sqrt(p[b]) * post @ blk)
    return np.array(ks)


# -- Dicke atoms ------------------------------------------------------------------

def _pair_coupling(omega_pairs, N):
    if omega_pairs is None:
        return {}
    if isinstance(omega_pairs, Mapping):
        return {tuple(sorted(k)): float(v) for k, v in omega_pairs.items()}
    return {(i, j): float(omega_pairs) for i, j in itertools.combinations(range(N), 2)}


def collective_operators(N):
    sm = [embed(SIGMA_MINUS, i, N) for i in range(N)]
    return sm, sum(sm)


def dicke_liouvillian(N, omega, g, n_bath, omega_L=0.0, omega_pairs=None, mode="collective") -> LindbladGenerator:
    """Interaction-picture generator of ``N`` two-level atoms in a common bath.

    ``collective``: jump operators ``S^-``, ``S^+`` with rates ``2g(n+1)``,
    ``2gn`` plus the Lamb shift and the pairwise exchange shifts.
    ``independent``: each ``sigma_i^-``, ``sigma_i^+`` with the same rates and
    the Lamb shift only.  ``omega`` fixes nothing in the interaction
    picture but is kept for the record.
    """
    if not 1 <= N <= 6:
        raise DimensionTooLarge(f"N = {N} outside [1, 6]")
    if g <= 0 or n_bath < 0:
        raise ValueError("need g > 0 and n_bath >= 0")
    sm, S = collective_operators(N)
    down = canonical_rate(g * (n_bath + 1), "front")
    up = canonical_rate(g * n_bath, "front")
    H = omega_L * sum(dagger(s) @ s for s in sm)
    if mode == "collective":
        dis = [(S, down), (dagger(S), up)]
        for (i, j), om in _pair_coupling(omega_pairs, N).items():
            H = H + om * (dagger(sm[i]) @ sm[j] + dagger(sm[j]) @ sm[i])
    elif mode == "independent":
        dis = [(s, down) for s in sm] + [(dagger(s), up) for s in sm]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    space = HilbertSpace(2 ** N, factors=(2,) * N)
    gen = LindbladGenerator(space, dis, H)
    gen.omega = omega
    return gen


def pair_basis():
    """Columns ``psi_0, psi_+, psi_-, psi_1`` of two atoms (``|0> = g``)."""
    s2 = 1 / math.sqrt(2)
    B = np.zeros((4, 4), dtype=np.complex128)
    B[0, 0] = 1                      # |gg>
    B[1, 1] = B[2, 1] = s2           # psi_+ = (|ge> + |eg>)/sqrt2
    B[1, 2], B[2, 2] = s2, -s2       # psi_- = (|ge> - |eg>)/sqrt2
    B[3, 3] = 1                      # |ee>
    return B


def population_rate_matrix(L: LindbladGenerator, basis) -> np.ndarray:
    """``R[i, j] = <b_i| L(|b_j><b_j|) |b_i>``: population dynamics in a basis."""
    B = np.asarray(basis)
    n = B.shape[1]
    R = np.zeros((n, n))
    for j in range(n):
        out = apply_generator(L, np.outer(B[:, j], B[:, j].conj()))
        R[:, j] = np.real(np.einsum("ki,kl,li->i", B.conj(), out, B))
    return R
