"""Apparent temperatures, hotter/colder predicates, spectral densities, heat flows.

Inverse temperatures are the primitive.  For a ladder operator ``A`` of
frequency ``w`` and state ``rho`` the apparent inverse temperature is

    beta = ln(<A A^dag> / <A^dag A>) / w

with the limits ``+inf`` (only ``<A A^dag>`` nonzero, T -> 0+), ``-inf``
(only ``<A^dag A>`` nonzero, T -> 0-) and *undefined* (both vanish, no
heat can flow through the channel).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .eigenops import TOL_LADDER, EigenoperatorSet, LadderOperator
from .errors import (
    FrequencyMismatch,
    MissingSpectralValue,
    NegativeBranch,
    NegativeValue,
    NonLadderInput,
    ShapeMismatch,
    UndefinedComparison,
    ZeroFrequency,
)
from .operators import TOL_IMAG, TOL_PSD, dagger, expectation

TOL_EXP = 1e-12
TOL_RATIO = 1e-10
TOL_FLOW = 1e-10
TOL_KMS = 1e-10


class BetaKind(str, enum.Enum):
    FINITE = "finite"
    PLUS_INF = "+inf"
    MINUS_INF = "-inf"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class ExtendedInverseTemperature:
    kind: BetaKind
    beta: float | None = None

    @classmethod
    def finite(cls, beta):
        return cls(BetaKind.FINITE, float(beta))

    @classmethod
    def plus_infinity(cls):
        return cls(BetaKind.PLUS_INF)

    @classmethod
    def minus_infinity(cls):
        return cls(BetaKind.MINUS_INF)

    @classmethod
    def undefined(cls):
        return cls(BetaKind.UNDEFINED)

    @property
    def is_finite(self):
        return self.kind is BetaKind.FINITE

    @property
    def is_defined(self):
        return self.kind is not BetaKind.UNDEFINED

    def as_float(self) -> float:
        """``beta`` on the extended real line; NaN when undefined."""
        return {
            BetaKind.FINITE: self.beta,
            BetaKind.PLUS_INF: math.inf,
            BetaKind.MINUS_INF: -math.inf,
            BetaKind.UNDEFINED: math.nan,
        }[self.kind]

    @property
    def temperature(self) -> float:
        b = self.as_float()
        if math.isnan(b):
            return math.nan
        if b == 0:
            return math.inf
        return 1.0 / b

    def boltzmann(self, omega) -> float:
        """``exp(-omega * beta)`` for ``omega > 0``."""
        b = self.as_float()
        if math.isnan(b):
            raise UndefinedComparison("undefined temperature has no Boltzmann factor")
        if math.isinf(b):
            return 0.0 if b > 0 else math.inf
        return math.exp(-omega * b)

    def hotter_than(self, other: "ExtendedInverseTemperature") -> bool:
        """Hotter means smaller beta; any negative temperature beats any positive one."""
        a, b = self.as_float(), other.as_float()
        if math.isnan(a) or math.isnan(b):
            raise UndefinedComparison("undefined apparent temperature compares with nothing")
        return a < b

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "beta": self.beta if self.is_finite else None}

    @classmethod
    def from_json(cls, obj):
        kind = BetaKind(obj["kind"])
        return cls(kind, float(obj["beta"]) if kind is BetaKind.FINITE else None)

    def __str__(self):
        return f"{self.beta:.17g}" if self.is_finite else self.kind.value


Beta = ExtendedInverseTemperature


def beta_from_ratio(up: float, down: float, omega: float, tol_exp: float = TOL_EXP) -> Beta:
    """``ln(up/down)/omega`` with the extended-value conventions."""
    u_pos, d_pos = up > tol_exp, down > tol_exp
    if u_pos and d_pos:
        return Beta.finite(math.log(up / down) / omega)
    if u_pos:
        return Beta.plus_infinity() if omega > 0 else Beta.minus_infinity()
    if d_pos:
        return Beta.minus_infinity() if omega > 0 else Beta.plus_infinity()
    return Beta.undefined()


def _raw(x):
    return x.data if hasattr(x, "data") and not isinstance(x, np.ndarray) else np.asarray(x)


def _pos_expectation(op, rho, what):
    val = expectation(op, rho)
    scale = max(1.0, abs(val.real))
    if abs(val.imag) > TOL_IMAG * scale:
        raise NegativeValue(f"{what} has imaginary part {val.imag:.3e}")
    if val.real < -TOL_PSD:
        raise NegativeValue(f"{what} = {val.real:.3e} is negative")
    return max(val.real, 0.0)


def ladder_expectations(rho, A) -> tuple[float, float]:
    """``(<A A^dag>, <A^dag A>)`` in ``rho``."""
    a = A.matrix if isinstance(A, LadderOperator) else np.asarray(A)
    ah = dagger(a)
    return _pos_expectation(a @ ah, rho, "<A A^dag>"), _pos_expectation(ah @ a, rho, "<A^dag A>")


def apparent_beta(rho, A: LadderOperator, hamiltonian=None, tol_ladder: float = TOL_LADDER) -> Beta:
    """Apparent inverse temperature of ``rho`` seen through the channel ``A``.

    When ``hamiltonian`` is given, ``A`` is first checked to be a ladder
    operator of it (``NonLadderInput`` otherwise).
    """
    if A.frequency == 0:
        raise ZeroFrequency("apparent temperature needs a nonzero Bohr frequency")
    if hamiltonian is not None:
        res = A.ladder_residual(hamiltonian)
        if res > tol_ladder:
            raise NonLadderInput(f"[H, A] + wA residual {res:.3e}")
    up, down = ladder_expectations(rho, A)
    return beta_from_ratio(up, down, A.frequency)


# -- single-frequency systems with degenerate levels ----------------------

def level_sums(rho, levels: Sequence[Sequence[int]]):
    """Per-level population sums ``rho_n`` and internal-coherence sums ``c_n``.

    ``levels[n]`` lists the basis indices of the degenerate states with
    energy ``n*w``.
    """
    r = _raw(rho)
    pops, cohs = [], []
    for idx in levels:
        block = r[np.ix_(idx, idx)]
        p = np.trace(block).real
        pops.append(p)
        cohs.append(float(np.sum(block).real - p))
    return np.array(pops), np.array(cohs)


def _degenerate_sums(populations, coherence_sums, degeneracies):
    p = np.asarray(populations, float)
    c = np.zeros_like(p) if coherence_sums is None else np.asarray(coherence_sums, float)
    l = np.asarray(degeneracies, float)
    if not (p.shape == c.shape == l.shape) or p.ndim != 1 or p.size < 2:
        raise ShapeMismatch("populations, coherences and degeneracies need equal length >= 2")
    if np.any(l < 1):
        raise ValueError("degeneracies must be >= 1")
    up = float(np.sum(l[1:] * (p[:-1] + c[:-1])))
    down = float(np.sum(l[:-1] * (p[1:] + c[1:])))
    return up, down


def apparent_beta_degenerate(populations, coherence_sums, degeneracies, omega) -> Beta:
    """Apparent inverse temperature of an equally spaced ladder with degenerate levels.

    All transition amplitudes are taken equal, so only the level population
    sums and the sums of coherences inside each degenerate level enter.
    """
    up, down = _degenerate_sums(populations, coherence_sums, degeneracies)
    if up < -TOL_EXP or down < -TOL_EXP:
        raise NegativeBranch(f"aggregate sums ({up:.3e}, {down:.3e}) must be nonnegative")
    return beta_from_ratio(up, down, omega)


def coherence_totals(coherence_sums, degeneracies) -> tuple[float, float]:
    """``(C+, C-)`` = ``(sum l_{n-1} c_n, sum l_n c_{n-1})``."""
    c = np.asarray(coherence_sums, float)
    l = np.asarray(degeneracies, float)
    return float(np.sum(l[:-1] * c[1:])), float(np.sum(l[1:] * c[:-1]))


def lambda_coherence_totals(c0: float) -> tuple[float, float]:
    """``(C+, C-)`` of a Lambda system: two degenerate lower states below one level."""
    return coherence_totals([c0, 0.0], [2, 1])


def apparent_beta_general_coefficients(rho, alphas, levels, omega) -> Beta:
    """Apparent inverse temperature for arbitrary transition amplitudes.

    ``alphas[n-1]`` is the ``(l_{n-1}, l_n)`` array of amplitudes
    ``<n-1, g| P |n, g'>``; ``levels`` lists basis indices per level.
    """
    r = _raw(rho)
    if len(alphas) != len(levels) - 1:
        raise ShapeMismatch("need one amplitude block per adjacent level pair")
    up = down = 0.0
    for n in range(1, len(levels)):
        a = np.asarray(alphas[n - 1], dtype=complex)
        lo, hi = list(levels[n - 1]), list(levels[n])
        if a.shape != (len(lo), len(hi)):
            raise ShapeMismatch(f"amplitude block {n} has shape {a.shape}, expected {(len(lo), len(hi))}")
        r_lo = r[np.ix_(lo, lo)]
        r_hi = r[np.ix_(hi, hi)]
        # sum_{g,j} <n-1,j|rho|n-1,g> sum_g' a[g,g'] a*[j,g']
        gram_lo = a @ a.conj().T
        up += float(np.sum(r_lo.T * gram_lo).real)
        # sum_{g,j} <n,g|rho|n,j> sum_g' a[g',g] a*[g',j]
        gram_hi = a.T @ a.conj()
        down += float(np.sum(r_hi * gram_hi).real)
    return beta_from_ratio(up, down, omega)


def ladder_from_coefficients(alphas, levels, dim) -> np.ndarray:
    """The matrix ``A = sum a[g,g'] |n-1,g><n,g'|``."""
    A = np.zeros((dim, dim), dtype=complex)
    for n in range(1, len(levels)):
        a = np.asarray(alphas[n - 1], dtype=complex)
        for gi, i in enumerate(levels[n - 1]):
            for gj, j in enumerate(levels[n]):
                A[i, j] = a[gi, gj]
    return A


# -- many-body (collective) systems --------------------------------------

@dataclass(frozen=True)
class CollectiveTemperature:
    """Result of a collective channel; unpacks as ``(beta, c_cor, c_coh)``."""

    beta: Beta
    c_cor: float
    c_coh: float
    local_up: float
    local_down: float
    omega: float

    @property
    def c(self):
        return self.c_cor + self.c_coh

    @property
    def beta_uncorrelated(self) -> Beta:
        """Same state seen through independent local channels (no cross terms)."""
        return beta_from_ratio(self.local_up, self.local_down, self.omega)

    def __iter__(self):
        return iter((self.beta, self.c_cor, self.c_coh))


def apparent_beta_collective(rho, locals_: Sequence[LadderOperator], omega: float | None = None) -> CollectiveTemperature:
    """Collective channel ``A = sum_i A_i`` split into local, correlation and coherence parts."""
    if not locals_:
        raise ValueError("need at least one local ladder operator")
    omega = locals_[0].frequency if omega is None else omega
    for a in locals_:
        if abs(a.frequency - omega) > 1e-12 * max(1.0, abs(omega)):
            raise FrequencyMismatch(f"local frequency {a.frequency} differs from {omega}")
    r = _raw(rho)
    mats = [a.matrix for a in locals_]
    means = [expectation(m, r) for m in mats]
    up = down = 0.0
    for m in mats:
        u, d = ladder_expectations(r, m)
        up += u
        down += d
    c_cor = 0.0
    c_coh = 0.0
    for i, mi in enumerate(mats):
        for j, mj in enumerate(mats):
            if i == j:
                continue
            cross = expectation(mi @ dagger(mj), r)
            prod = means[i] * np.conj(means[j])
            c_cor += (cross - prod).real
            c_coh += prod.real
    c = c_cor + c_coh
    return CollectiveTemperature(beta_from_ratio(up + c, down + c, omega), c_cor, c_coh, up, down, omega)


def apparent_beta_local(rho, locals_: Sequence[LadderOperator]) -> Beta:
    """Distinguishable subsystems: only the local terms ``sum <A_i A_i^dag>`` enter."""
    return apparent_beta_collective(rho, locals_).beta_uncorrelated


# -- hotter / colder predicates ------------------------------------------

class Shift(str, enum.Enum):
    HOTTER = "hotter"
    COLDER = "colder"
    UNCHANGED = "unchanged"


def _require_finite(beta0):
    if not beta0.is_finite:
        raise UndefinedComparison("reference temperature must be finite")


def coherence_shift(c_plus: float, c_minus: float, beta0: Beta, omega: float, tol: float = TOL_EXP) -> Shift:
    """Effect of internal coherences on the apparent temperature.

    Hotter iff ``C+ > C- exp(-w beta0)``, ``beta0`` being the coherence-free
    apparent inverse temperature.
    """
    _require_finite(beta0)
    gap = c_plus - c_minus * math.exp(-omega * beta0.beta)
    if abs(gap) <= tol:
        return Shift.UNCHANGED
    return Shift.HOTTER if gap > 0 else Shift.COLDER


def correlation_shift(c: float, beta0: Beta, omega: float, tol: float = TOL_EXP) -> Shift:
    """Effect of correlations ``c`` on the apparent temperature: sign of ``c (e^{w beta0} - 1)``."""
    _require_finite(beta0)
    s = c * math.expm1(omega * beta0.beta)
    if abs(s) <= tol:
        return Shift.UNCHANGED
    return Shift.HOTTER if s > 0 else Shift.COLDER


def compare(beta: Beta, beta0: Beta, tol: float = 1e-12) -> Shift:
    """Direct verdict: is ``beta`` hotter, colder or equal to ``beta0``?"""
    a, b = beta.as_float(), beta0.as_float()
    if math.isnan(a) or math.isnan(b):
        raise UndefinedComparison("undefined apparent temperature compares with nothing")
    if a == b or (math.isfinite(a) and math.isfinite(b) and abs(a - b) <= tol * max(1.0, abs(b))):
        return Shift.UNCHANGED
    return Shift.HOTTER if a < b else Shift.COLDER


# -- spectral densities ---------------------------------------------------

def _key(omega):
    return float(omega)


@dataclass(frozen=True)
class SpectralDensity:
    """Rates ``G(w) >= 0`` on a finite set of signed frequencies."""

    values: Mapping[float, float]
    source: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        vals = {}
        for w, g in self.values.items():
            if g < 0:
                raise NegativeValue(f"G({w}) = {g} is negative")
            vals[_key(w)] = float(g)
        object.__setattr__(self, "values", dict(sorted(vals.items())))

    def lookup(self, omega, tol=1e-9):
        best = None
        for w in self.values:
            if abs(w - omega) <= tol * max(1.0, abs(omega)) and (best is None or abs(w - omega) < abs(best - omega)):
                best = w
        return best

    def __call__(self, omega) -> float:
        w = self.lookup(omega)
        if w is None:
            raise MissingSpectralValue(omega)
        return self.values[w]

    def __contains__(self, omega):
        return self.lookup(omega) is not None

    def apparent_beta(self, omega) -> Beta:
        """Inverse temperature of the source as seen at ``w > 0``: ``ln(G(w)/G(-w))/w``."""
        return beta_from_ratio(self(omega), self(-omega), omega)

    def kms_residual(self, beta) -> float:
        worst = 0.0
        for w, g in self.values.items():
            if w > 0 and -w in self:
                worst = max(worst, abs(self(-w) - math.exp(-beta * w) * g))
        return worst


def spectral_density_collisional(rho_R, eigenops_R: EigenoperatorSet, r, lam, tau, *, tau_sq_mean=None) -> SpectralDensity:
    """``G(w) = r lam^2 tau^2 <A_R(w) A_R^dag(w)>`` of a repeatedly colliding ancilla.

    ``tau_sq_mean`` replaces ``tau**2`` by the mean squared duration when
    collision lengths vary.
    """
    if r <= 0 or tau <= 0:
        raise ValueError("rate and duration must be positive")
    t2 = tau * tau if tau_sq_mean is None else float(tau_sq_mean)
    vals = {}
    for w, a in eigenops_R.operators.items():
        ev = expectation(a.raising(), rho_R)
        if ev.real < -TOL_PSD:
            raise NegativeValue(f"<A A^dag> = {ev.real:.3e} at w = {w}")
        vals[w] = r * lam * lam * t2 * max(ev.real, 0.0)
    return SpectralDensity(vals, {"kind": "collisional", "r": r, "lambda": lam, "tau": tau, "tau_sq_mean": t2})


def bose_occupation(beta, omega) -> float:
    if math.isinf(beta):
        return 0.0 if beta > 0 else -1.0
    return 1.0 / math.expm1(beta * omega)


def thermal_bath_spectral_density(beta, omegas, g) -> SpectralDensity:
    """``G(w) = 2g(n+1)``, ``G(-w) = 2g n`` with Bose occupation ``n(w)``."""
    if g <= 0:
        raise ValueError("base rate must be positive")
    vals = {}
    for w in omegas:
        w = abs(float(w))
        if w == 0:
            raise ZeroFrequency("thermal bath rates are undefined at w = 0")
        n = bose_occupation(beta, w)
        vals[w] = 2 * g * (n + 1)
        vals[-w] = 2 * g * n
    return SpectralDensity(vals, {"kind": "thermal", "beta": beta, "g": g})


def kms_spectral_density(beta, omegas, rate) -> SpectralDensity:
    """Emission-normalised thermal rates: ``G(w) = rate``, ``G(-w) = rate e^{-beta w}``.

    Same detailed balance as :func:`thermal_bath_spectral_density` but
    finite at ``beta = 0``.
    """
    vals = {}
    for w in omegas:
        w = abs(float(w))
        if w == 0:
            raise ZeroFrequency("thermal bath rates are undefined at w = 0")
        vals[w] = float(rate)
        vals[-w] = float(rate) * math.exp(-beta * w)
    return SpectralDensity(vals, {"kind": "kms", "beta": beta, "rate": rate})


# -- heat flow -------------------------------------------------------------

@dataclass(frozen=True)
class ChannelHeatFlow:
    omega: float
    flow: float
    prefactor: float
    g_plus: float
    g_minus: float
    beta_S: Beta
    beta_R: Beta

    def bracket_flow(self) -> float:
        """``prefactor * [e^{-w beta_R} - e^{-w beta_S}]``; needs both temperatures defined."""
        if self.prefactor == 0:
            return 0.0
        return self.prefactor * (self.beta_R.boltzmann(self.omega) - self.beta_S.boltzmann(self.omega))

    def csv_row(self):
        return (self.omega, self.g_plus, self.g_minus, self.beta_S.as_float(), self.beta_R.as_float(), self.flow)


CHANNEL_CSV_HEADER = ("omega", "G_plus", "G_minus", "beta_S", "beta_R", "flow")


def heat_flow(rho_S, eigenops_S: EigenoperatorSet, G: SpectralDensity):
    """Heat flowing from the source into ``S``.

    Returns the total ``-sum_w w G(w) <A^dag(w) A(w)>`` over the signed
    spectrum and the per-channel decomposition over ``w > 0``.
    """
    total = 0.0
    for w, a in eigenops_S.operators.items():
        if w == 0:
            continue
        d = _pos_expectation(a.lowering(), rho_S, "<A^dag A>")
        total -= w * G(w) * d
    channels = []
    for w, a in eigenops_S.positive().items():
        gp, gm = G(w), G(-w)
        up, down = ladder_expectations(rho_S, a)
        flow = w * (gm * up - gp * down)
        channels.append(ChannelHeatFlow(
            omega=w,
            flow=flow,
            prefactor=w * gp * up,
            g_plus=gp,
            g_minus=gm,
            beta_S=beta_from_ratio(up, down, w),
            beta_R=beta_from_ratio(gp, gm, w),
        ))
    return total, channels


def virtual_temperature(p_i, p_j, e_i, e_j) -> Beta:
    """Inverse virtual temperature ``ln(p_j/p_i)/(e_i - e_j)`` of a level pair."""
    if e_i == e_j:
        raise ZeroFrequency("level pair must be non-degenerate")
    if p_i < 0 or p_j < 0:
        raise NegativeValue("populations must be nonnegative")
    return beta_from_ratio(p_j, p_i, e_i - e_j)
