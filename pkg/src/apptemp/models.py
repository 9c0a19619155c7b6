"""Concrete systems and their closed-form reference quantities.

Qubits use the basis ``(g, e)``; multi-atom registers are Kronecker
products with atom 0 leftmost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigenops import LadderOperator, eigenoperator_decomposition
from .errors import DimensionTooLarge, InvalidDensityMatrix, InvalidState, TruncationInsufficient
from .operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    DensityMatrix,
    HermitianOperator,
    HilbertSpace,
    as_hermitian,
    dagger,
    embed,
)
from .thermo import Beta, apparent_beta, beta_from_ratio, ladder_expectations

TRUNCATION_TOL = 1e-6


def thermal_state(H, beta) -> DensityMatrix:
    """Gibbs state ``exp(-beta H)/Z`` computed in the eigenbasis of ``H``."""
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")
    H = as_hermitian(H)
    eps, v = H.eigh()
    w = np.exp(-beta * (eps - eps.min()))
    w /= w.sum()
    return DensityMatrix((v * w) @ dagger(v), H.space)


@dataclass(frozen=True)
class ModelInstance:
    name: str
    space: HilbertSpace
    H: HermitianOperator
    couplings: tuple
    reference_values: dict = field(default_factory=dict)
    ladders: dict = field(default_factory=dict)   # named ladder operators of interest
    # frequencies closer than this are one channel (quasi-degenerate transitions)
    cluster_tolerance: float = 0.0

    def __post_init__(self):
        for c in self.couplings:
            if c.dim != self.H.dim:
                raise ValueError("couplings and Hamiltonian act on different spaces")

    def eigenoperators(self, k=0, cluster_tolerance=None):
        tol = self.cluster_tolerance if cluster_tolerance is None else cluster_tolerance
        return eigenoperator_decomposition(self.H, self.couplings[k], tol)


def qubit(omega=1.0) -> ModelInstance:
    H = HermitianOperator(0.5 * omega * SIGMA_Z, HilbertSpace(2, ("g", "e")))
    return ModelInstance("qubit", H.space, H, (HermitianOperator(SIGMA_X, H.space),),
                         {"omega": omega}, {"sigma_minus": LadderOperator(omega, SIGMA_MINUS)})


# -- two-atom register ---------------------------------------------------------

def pair_operators():
    sm1, sm2 = embed(SIGMA_MINUS, 0, 2), embed(SIGMA_MINUS, 1, 2)
    return sm1, sm2


def pair_amplitudes(rho):
    """``rho_g, rho_e, rho_d, rho_nd`` of a two-atom state.

    ``rho_d`` is the mean single-excitation population and ``rho_nd`` the
    mean exchange coherence.
    """
    r = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    gg, ge, eg, ee = 0, 1, 2, 3
    return {
        "rho_g": r[gg, gg].real,
        "rho_e": r[ee, ee].real,
        "rho_d": 0.5 * (r[eg, eg] + r[ge, ge]).real,
        "rho_nd": 0.5 * (r[ge, eg] + r[eg, ge]).real,
        "diag_asymmetry": abs(r[eg, eg] - r[ge, ge]),
        "offdiag_asymmetry": abs(r[ge, eg] - r[eg, ge]),
    }


def pair_beta_closed_form(rho, omega) -> Beta:
    """``ln[(rho_g + rho_d + rho_nd)/(rho_e + rho_d + rho_nd)] / omega``."""
    a = pair_amplitudes(rho)
    return beta_from_ratio(a["rho_g"] + a["rho_d"] + a["rho_nd"], a["rho_e"] + a["rho_d"] + a["rho_nd"], omega)


def dillenschneider_pair(lam_int, beta, omega=1.0):
    """Thermal state of two atoms with flip-flop exchange ``lam_int``.

    ``H = (omega/2)(sz1 + sz2) + lam_int (s1+ s2- + s1- s2+)``; returns the
    model and its Gibbs state.  Reference values: the exchange coherence
    ``-sinh(lam_int beta)/Z`` with ``Z = 2 cosh(beta omega) + 2 cosh(beta lam_int)``,
    and the closed-form apparent inverse temperature of the collective
    channel.  The exchange splits the atomic line into ``omega +- lam_int``;
    the model resolves frequencies only to ``2 |lam_int|`` so that both
    transitions form the single channel ``S^-`` at ``omega``; this needs
    ``|lam_int|`` well below ``omega / 5`` so that no other transitions merge.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    sm1, sm2 = pair_operators()
    sz = embed(SIGMA_Z, 0, 2) + embed(SIGMA_Z, 1, 2)
    H = 0.5 * omega * sz + lam_int * (dagger(sm1) @ sm2 + dagger(sm2) @ sm1)
    space = HilbertSpace(4, ("gg", "ge", "eg", "ee"), (2, 2))
    H = HermitianOperator(H, space)
    S = sm1 + sm2
    coupling = HermitianOperator(S + dagger(S), space)
    rho = thermal_state(H, beta)
    Z = 2 * math.cosh(beta * omega) + 2 * math.cosh(beta * lam_int)
    c = -math.sinh(lam_int * beta) / Z
    bcf = pair_beta_closed_form(rho, omega)
    refs = {
        "c": c,
        "c_collective": 2 * c,
        "rho_nd": c,
        "beta_at": bcf.as_float(),
        "beta_uncorrelated": _uncorrelated_pair_beta(rho, omega),
    }
    model = ModelInstance("dillenschneider-pair", space, H, (coupling,), refs,
                          {"S_minus": LadderOperator(omega, S)}, 2.5 * abs(lam_int))
    return model, rho


def _uncorrelated_pair_beta(rho, omega):
    a = pair_amplitudes(rho)
    return beta_from_ratio(a["rho_g"] + a["rho_d"], a["rho_e"] + a["rho_d"], omega).as_float()


# -- Lambda system ---------------------------------------------------------------

LAMBDA_LABELS = ("b", "c", "a")


def lambda_ladder():
    A = np.zeros((3, 3), dtype=np.complex128)
    A[0, 2] = A[1, 2] = 1.0    # |b><a| + |c><a|
    return A


def phaseonium_beta_closed_form(rho_aa, rho_bb, rho_cc, rho_bc, omega=1.0) -> Beta:
    """``ln[(rho_bb + rho_cc + 2 Re rho_bc) / (2 rho_aa)] / omega``."""
    return beta_from_ratio(rho_bb + rho_cc + 2 * complex(rho_bc).real, 2 * rho_aa, omega)


def phaseonium(rho_aa, rho_bb, rho_cc, rho_bc, omega=1.0):
    """Lambda atom: degenerate lower states ``b, c`` and upper state ``a`` at ``omega``."""
    if abs(rho_aa + rho_bb + rho_cc - 1) > 1e-10:
        raise InvalidState("populations must sum to 1")
    rho_bc = complex(rho_bc)
    m = np.array([[rho_bb, rho_bc, 0], [np.conj(rho_bc), rho_cc, 0], [0, 0, rho_aa]], dtype=np.complex128)
    space = HilbertSpace(3, LAMBDA_LABELS)
    try:
        rho = DensityMatrix(m, space)
    except InvalidDensityMatrix as exc:
        raise InvalidState(str(exc)) from exc
    H = HermitianOperator(np.diag([0.0, 0.0, omega]), space)
    A = lambda_ladder()
    coupling = HermitianOperator(A + dagger(A), space)
    b = phaseonium_beta_closed_form(rho_aa, rho_bb, rho_cc, rho_bc, omega)
    refs = {"beta_ph": b.as_float(), "beta_coherence_free": phaseonium_beta_closed_form(rho_aa, rho_bb, rho_cc, 0, omega).as_float()}
    if b.is_finite and b.beta > 0:
        refs["photon_number"] = 1.0 / math.expm1(omega * b.beta)
    return ModelInstance("lambda", space, H, (coupling,), refs, {"A": LadderOperator(omega, A)}), rho


def phaseonium_photon_fixed_point(rho_aa, rho_bb, rho_cc, rho_bc):
    """Zero of ``2 rho_aa (n+1) - (rho_bb + rho_cc + 2 Re rho_bc) n``.

    This is the mean-photon-number balance of a cavity pumped by Lambda
    atoms; it is solved as a linear equation.
    """
    bright = rho_bb + rho_cc + 2 * complex(rho_bc).real
    a = np.array([[bright - 2 * rho_aa]])
    return float(np.linalg.solve(a, np.array([2 * rho_aa]))[0])


# -- bosonic mode ----------------------------------------------------------------

def annihilation(n_fock):
    return np.diag(np.sqrt(np.arange(1, n_fock)), 1).astype(np.complex128)


def bosonic_mode(omega, n_fock) -> ModelInstance:
    """Harmonic mode truncated to ``n_fock`` Fock levels, coupled through ``d + d^dag``.

    On the truncated space ``[H, d] = -omega d`` still holds; only the
    commutator ``[d, d^dag]`` deviates from 1, in the top Fock level.
    """
    if n_fock < 2:
        raise ValueError("n_fock must be >= 2")
    space = HilbertSpace(n_fock)
    H = HermitianOperator(omega * np.diag(np.arange(n_fock, dtype=float)), space)
    d = annihilation(n_fock)
    return ModelInstance("mode", space, H, (HermitianOperator(d + dagger(d), space),),
                         {"omega": omega, "n_fock": n_fock}, {"d": LadderOperator(omega, d)})


def truncation_weight(rho, top=2) -> float:
    """Population of the ``top`` highest Fock levels."""
    r = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.sum(np.real(np.diag(r))[-top:]))


def check_truncation(rho, tol=TRUNCATION_TOL):
    w = truncation_weight(rho)
    if w >= tol:
        raise TruncationInsufficient(f"top two Fock levels hold {w:.3e} >= {tol:g}")
    return w


def thermal_mode_occupation(beta, omega, n_fock):
    """``<d^dag d>`` of the truncated thermal mode."""
    n = np.arange(n_fock)
    w = np.exp(-beta * omega * n)
    return float(np.sum(n * w) / np.sum(w))


# -- Dicke pair ------------------------------------------------------------------

def dicke_pair_reference(beta_B, omega=1.0):
    """Steady energies of an indistinguishable and a distinguishable pair, and their ratio."""
    if beta_B < 0:
        raise ValueError("beta_B must be >= 0")
    x = math.exp(-omega * beta_B)
    Z = 1 + x + x * x
    e_ind = omega * x * (1 + 2 * x) / Z
    e_dis = 2 * omega * x / (1 + x)
    return e_ind, e_dis, e_ind / e_dis


def dicke_pair_steady_state(beta_B, omega=1.0):
    """Closed-form stationary state of the collective pair started in its ground state."""
    from .dynamics import pair_basis

    x = math.exp(-omega * beta_B)
    B = pair_basis()
    p = np.array([1.0, x, 0.0, x * x]) / (1 + x + x * x)
    return DensityMatrix((B * p) @ dagger(B), HilbertSpace(4, factors=(2, 2)))


def dicke_model(N, omega=1.0) -> ModelInstance:
    """``N`` atoms with ``H = omega sum s+ s-`` and collective coupling ``S_x``."""
    if N > 10:
        raise DimensionTooLarge("full register limited to N <= 10")
    sm = [embed(SIGMA_MINUS, i, N) for i in range(N)]
    S = sum(sm)
    space = HilbertSpace(2 ** N, factors=(2,) * N)
    H = HermitianOperator(omega * sum(dagger(s) @ s for s in sm), space)
    return ModelInstance("dicke", space, H, (HermitianOperator(S + dagger(S), space),), {"N": N},
                         {"S_minus": LadderOperator(omega, S)})


# -- temperature jumps after absorbing one photon --------------------------------

def single_excitation_states(N):
    """``(mixed, symmetric)``: the incoherent mixture of ``|1_i>`` and the symmetric ``W`` state."""
    d = 2 ** N
    idx = [1 << (N - 1 - i) for i in range(N)]
    mixed = np.zeros((d, d), dtype=np.complex128)
    psi = np.zeros(d, dtype=np.complex128)
    for k in idx:
        mixed[k, k] = 1.0 / N
        psi[k] = 1 / math.sqrt(N)
    space = HilbertSpace(d, factors=(2,) * N)
    return DensityMatrix(mixed, space), DensityMatrix(np.outer(psi, psi.conj()), space)


def dicke_lowering(N):
    """Collective ``S^-`` on the symmetric states ``|J, M>``, ``J = N/2``, ordered by ``M`` ascending."""
    J = N / 2
    M = np.arange(-J, J + 1)
    d = M.size
    S = np.zeros((d, d))
    for k in range(1, d):
        m = M[k]
        S[k - 1, k] = math.sqrt((J + m) * (J - m + 1))
    return S.astype(np.complex128)


def temperature_jump_closed_form(N, kind, omega=1.0) -> Beta:
    if N < 2:
        raise ValueError("N must be >= 2")
    if kind == "distinguishable":
        return Beta.finite(math.log(N - 1) / omega)
    if kind == "indistinguishable":
        return Beta.finite(math.log(2 * (1 - 1 / N)) / omega)
    raise ValueError(f"unknown kind {kind!r}")


def temperature_jump(N, kind, omega=1.0, full_register_max=10):
    """Apparent inverse temperature of ``N`` ground-state atoms after one absorption.

    Returns ``(closed_form, computed)``.  The computed value comes from
    :func:`apparent_beta` on the explicitly built state: the mixed
    single-excitation state for distinguishable atoms, the symmetric one
    for indistinguishable atoms.  Registers larger than
    ``full_register_max`` atoms use the symmetric (Dicke) subspace, or the
    local sums for distinguishable atoms.
    """
    closed = temperature_jump_closed_form(N, kind, omega)
    if N <= full_register_max:
        model = dicke_model(N, omega)
        es = model.eigenoperators()
        S = es[omega]
        mixed, sym = single_excitation_states(N)
        if kind == "distinguishable":
            # independent channels: only local terms enter
            locals_ = [LadderOperator(omega, embed(SIGMA_MINUS, i, N)) for i in range(N)]
            up = down = 0.0
            for a in locals_:
                u, d = ladder_expectations(mixed, a)
                up += u
                down += d
            computed = beta_from_ratio(up, down, omega)
        else:
            computed = apparent_beta(sym, S, model.H)
    else:
        if kind == "distinguishable":
            # every atom: p_e = 1/N
            computed = beta_from_ratio(N * (1 - 1 / N), N * (1 / N), omega)
        else:
            S = dicke_lowering(N)
            d = S.shape[0]
            rho = np.zeros((d, d), dtype=np.complex128)
            rho[1, 1] = 1.0
            H = omega * np.diag(np.arange(d, dtype=float))
            computed = apparent_beta(DensityMatrix(rho), LadderOperator(omega, S), H)
    return closed, computed
