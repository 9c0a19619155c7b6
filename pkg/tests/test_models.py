import math

import numpy as np
import pytest

from apptemp.errors import DimensionTooLarge, InvalidState, TruncationInsufficient
from apptemp.models import (
    bosonic_mode,
    check_truncation,
    dicke_lowering,
    dicke_model,
    dicke_pair_reference,
    dillenschneider_pair,
    pair_amplitudes,
    pair_beta_closed_form,
    phaseonium,
    phaseonium_beta_closed_form,
    phaseonium_photon_fixed_point,
    qubit,
    single_excitation_states,
    temperature_jump,
    thermal_mode_occupation,
    thermal_state,
)
from apptemp.operators import SIGMA_MINUS, DensityMatrix
from apptemp.thermo import BetaKind, apparent_beta, apparent_beta_collective, bose_occupation
from apptemp.eigenops import LadderOperator, eigenoperator_decomposition
from apptemp.operators import embed


def test_thermal_state_examples():
    q = qubit()
    assert np.allclose(thermal_state(q.H, 0.0).data, np.eye(2) / 2)
    rho = thermal_state(q.H, math.log(3))
    assert rho.data[1, 1].real == pytest.approx(0.25, abs=1e-15)
    b = apparent_beta(rho, q.ladders["sigma_minus"], q.H)
    assert b.beta == pytest.approx(math.log(3), abs=1e-12)
    with pytest.raises(ValueError):
        thermal_state(q.H, math.inf)


def test_thermal_state_large_beta_stable():
    rho = thermal_state(np.diag([0.0, 1.0, 2.0]), 800.0)
    assert rho.data[0, 0].real == pytest.approx(1.0)


# -- Dillenschneider pair ----------------------------------------------------------

def test_uncorrelated_limit():
    model, rho = dillenschneider_pair(0.0, 1.5)
    refs = model.reference_values
    assert refs["c"] == 0.0
    assert refs["beta_at"] == pytest.approx(1.5, abs=1e-12)
    t = thermal_state(np.diag([0.0, 1.0]), 1.5).data
    assert np.allclose(rho.data, np.kron(t, t), atol=1e-14)


def test_negative_correlations_cool():
    lam, beta = 0.1, 10.0                  # lam * beta = 1
    model, rho = dillenschneider_pair(lam, beta)
    refs = model.reference_values
    Z = 2 * math.cosh(beta) + 2 * math.cosh(lam * beta)
    assert refs["c"] == pytest.approx(-math.sinh(1) / Z)
    assert refs["c"] <= 0
    amps = pair_amplitudes(rho)
    assert amps["rho_nd"] == pytest.approx(refs["c"], abs=1e-14)
    # colder: the apparent inverse temperature is larger than without correlations
    assert refs["beta_at"] >= refs["beta_uncorrelated"]


@pytest.mark.parametrize("lam", [-0.1, -0.02, 0.03, 0.1])
def test_pair_closed_form_equals_pipeline(lam):
    for beta in (0.3, 1.0, 4.0, 10.0):
        model, rho = dillenschneider_pair(lam, beta)
        es = model.eigenoperators()
        assert es.completeness_residual() < 1e-12
        b = apparent_beta(rho, es[1.0])
        assert abs(b.beta - model.reference_values["beta_at"]) <= 1e-10


def test_pair_symmetric_family():
    for lam in (-0.1, 0.05):
        _, rho = dillenschneider_pair(lam, 2.0)
        a = pair_amplitudes(rho)
        # both atoms alike: single-excitation populations and exchange coherences are symmetric
        assert a["diag_asymmetry"] < 1e-15 and a["offdiag_asymmetry"] < 1e-15


def test_pair_ladder_spans_split_lines():
    model, rho = dillenschneider_pair(0.05, 1.0)
    es = model.eigenoperators()
    S = embed(SIGMA_MINUS, 0, 2) + embed(SIGMA_MINUS, 1, 2)
    assert np.allclose(es[1.0].matrix, S, atol=1e-12)
    # resolved finely, the line splits at 1 +- lam
    fine = eigenoperator_decomposition(model.H, model.couplings[0], 0.0)
    assert {round(w, 12) for w in fine.positive()} == {0.95, 1.05}


def test_pair_collective_matches_correlation():
    model, rho = dillenschneider_pair(-0.08, 3.0)
    locals_ = [LadderOperator(1.0, embed(SIGMA_MINUS, i, 2)) for i in range(2)]
    res = apparent_beta_collective(rho, locals_)
    assert res.c == pytest.approx(model.reference_values["c_collective"], abs=1e-14)
    assert res.beta.hotter_than(res.beta_uncorrelated)


def test_pair_closed_form_general_state(rng):
    from apptemp.operators import random_density_matrix

    m = dicke_model(2)
    S = m.eigenoperators()[1.0]
    for _ in range(10):
        rho = DensityMatrix(random_density_matrix(4, rng))
        assert pair_beta_closed_form(rho, 1.0).beta == pytest.approx(apparent_beta(rho, S, m.H).beta, abs=1e-12)


# -- Lambda system ---------------------------------------------------------------------

def test_phaseonium_reference():
    model, rho = phaseonium(0.2, 0.4, 0.4, 0.0)
    assert model.reference_values["beta_ph"] == pytest.approx(math.log(2))
    assert model.reference_values["beta_ph"] == model.reference_values["beta_coherence_free"]
    hot, _ = phaseonium(0.2, 0.4, 0.4, -0.15)
    assert hot.reference_values["beta_ph"] < hot.reference_values["beta_coherence_free"]
    assert hot.reference_values["beta_ph"] == pytest.approx(math.log(0.5 / 0.4))


def test_phaseonium_pipeline(rng):
    for _ in range(20):
        p = rng.dirichlet(np.ones(3))
        bc = math.sqrt(p[1] * p[2]) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        model, rho = phaseonium(p[0], p[1], p[2], bc)
        b = apparent_beta(rho, model.eigenoperators()[1.0], model.H)
        assert b.beta == pytest.approx(model.reference_values["beta_ph"], abs=1e-10)


def test_phaseonium_invalid():
    with pytest.raises(InvalidState):
        phaseonium(0.2, 0.4, 0.4, 0.5)
    with pytest.raises(InvalidState):
        phaseonium(0.3, 0.4, 0.4, 0.0)


def test_photon_fixed_point(rng):
    for _ in range(50):
        p = rng.dirichlet(np.ones(3))
        p = np.array([min(p[0], 0.3), *p[1:]])
        p /= p.sum()
        bc = math.sqrt(p[1] * p[2]) * rng.uniform(-1, 1) * 0.9
        beta = phaseonium_beta_closed_form(p[0], p[1], p[2], bc)
        if not (beta.is_finite and beta.beta > 0):
            continue
        n = phaseonium_photon_fixed_point(p[0], p[1], p[2], bc)
        assert n == pytest.approx(bose_occupation(beta.beta, 1.0), rel=1e-12)


# -- bosonic mode ---------------------------------------------------------------------------

def test_two_level_mode_is_qubit():
    m = bosonic_mode(1.0, 2)
    assert np.allclose(m.ladders["d"].matrix, SIGMA_MINUS)
    assert np.allclose(m.eigenoperators()[1.0].matrix, SIGMA_MINUS)


def test_mode_truncation_edge():
    m = bosonic_mode(1.0, 8)
    d = m.ladders["d"].matrix
    H = m.H.data
    assert np.max(np.abs(H @ d - d @ H + d)) < 1e-15
    defect = d @ d.conj().T - d.conj().T @ d - np.eye(8)
    # only the top corner deviates
    mask = np.zeros((8, 8), bool)
    mask[-1, -1] = True
    assert np.max(np.abs(defect[~mask])) < 1e-14 and abs(defect[-1, -1]) > 1


def test_thermal_mode_occupation():
    beta, n_fock = 0.7, 12
    n = np.arange(n_fock)
    w = np.exp(-beta * n)
    assert thermal_mode_occupation(beta, 1.0, n_fock) == pytest.approx(np.sum(n * w) / np.sum(w))
    assert thermal_mode_occupation(beta, 1.0, 200) == pytest.approx(bose_occupation(beta, 1.0))


def test_truncation_flag():
    rho = np.zeros((5, 5))
    rho[0, 0], rho[4, 4] = 1 - 1e-5, 1e-5
    with pytest.raises(TruncationInsufficient):
        check_truncation(rho)
    rho[0, 0], rho[4, 4] = 1 - 1e-8, 1e-8
    assert check_truncation(rho) == pytest.approx(1e-8)
    with pytest.raises(ValueError):
        bosonic_mode(1.0, 1)


# -- Dicke pair references ----------------------------------------------------------------

def test_dicke_reference_limits():
    e_ind, e_dis, ratio = dicke_pair_reference(0.0)
    assert (e_ind, e_dis, ratio) == (1.0, 1.0, 1.0)
    assert abs(dicke_pair_reference(10.0)[2] - 0.5) < 1e-4
    ratios = [dicke_pair_reference(b)[2] for b in np.arange(0, 10.01, 0.1)]
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))


def test_dicke_model_limit():
    with pytest.raises(DimensionTooLarge):
        dicke_model(11)


# -- temperature jumps -----------------------------------------------------------------------

def test_jump_examples():
    assert temperature_jump(2, "distinguishable")[1].beta == pytest.approx(0.0, abs=1e-15)
    assert temperature_jump(2, "indistinguishable")[1].beta == pytest.approx(0.0, abs=1e-15)
    closed, computed = temperature_jump(100, "indistinguishable")
    assert computed.temperature == pytest.approx(1 / math.log(1.98), rel=1e-12)
    assert 1 / math.log(2) < computed.temperature < 1.47


@pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
def test_jumps_small_registers(N):
    for kind in ("distinguishable", "indistinguishable"):
        closed, computed = temperature_jump(N, kind)
        assert abs(closed.beta - computed.beta) <= 1e-12


def test_jump_large_register_paths_agree():
    # the Dicke-subspace path and the full register give the same answer
    for kind in ("distinguishable", "indistinguishable"):
        full = temperature_jump(6, kind)[1]
        reduced = temperature_jump(6, kind, full_register_max=2)[1]
        assert abs(full.beta - reduced.beta) < 1e-12


def test_dicke_lowering_matches_register():
    N = 3
    S = dicke_lowering(N)
    # symmetric W state: M = -J + 1
    assert S[0, 1] == pytest.approx(math.sqrt(3))
    _, sym = single_excitation_states(N)
    Sfull = sum(embed(SIGMA_MINUS, i, N) for i in range(N))
    up = np.trace(sym.data @ Sfull @ Sfull.conj().T).real
    rho = np.zeros((4, 4))
    rho[1, 1] = 1
    assert np.trace(rho @ S @ S.conj().T).real == pytest.approx(up)


def test_jump_kinds():
    with pytest.raises(ValueError):
        temperature_jump(3, "other")
    with pytest.raises(ValueError):
        temperature_jump(1, "distinguishable")
    mixed, sym = single_excitation_states(4)
    assert np.trace(mixed.data).real == pytest.approx(1)
    assert np.linalg.matrix_rank(sym.data) == 1
