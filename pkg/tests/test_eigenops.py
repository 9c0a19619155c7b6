import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apptemp.eigenops import (
    EigenoperatorSet,
    bohr_frequencies,
    eigenoperator_decomposition,
    ladder_operator,
)
from apptemp.errors import FrequencyNotInSpectrum
from apptemp.models import dicke_model, lambda_ladder
from apptemp.operators import SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, embed, random_hermitian


def test_qubit_spectrum():
    spec = bohr_frequencies(np.diag([0.0, 1.0]))
    assert spec.frequencies == (-1.0, 1.0)
    assert 0.0 not in spec


def test_lambda_spectrum_has_zero():
    spec = bohr_frequencies(np.diag([0.0, 0.0, 1.0]))
    assert spec.frequencies == (-1.0, 0.0, 1.0)


def test_quasi_degenerate_merge():
    H = np.kron(np.diag([0, 1.0]), np.eye(2)) + np.kron(np.eye(2), np.diag([0, 1.0 + 1e-9]))
    merged = bohr_frequencies(H, 1e-6)
    pos = merged.positive()
    assert len(pos) == 2         # 1 (two gaps merged) and 2 (both excited)
    assert pos[0] == pytest.approx(1.0, abs=1e-8)
    assert len(bohr_frequencies(H, 0.0).positive()) > len(pos)


def test_negative_tolerance_rejected():
    with pytest.raises(ValueError):
        bohr_frequencies(np.eye(2), -1)


def test_qubit_ladder():
    A = ladder_operator(np.diag([0.0, 1.0]), SIGMA_X, 1.0)
    assert np.allclose(A.matrix, SIGMA_MINUS)
    assert np.allclose(A.dag.matrix, SIGMA_PLUS)
    assert A.dag.frequency == -1.0


def test_lambda_ladder():
    A0 = lambda_ladder()
    A = ladder_operator(np.diag([0.0, 0.0, 1.0]), A0 + A0.conj().T, 1.0)
    # |b><a| + |c><a|
    assert np.allclose(A.matrix, A0)


def test_pair_collective_ladder():
    m = dicke_model(2)
    A = ladder_operator(m.H, m.couplings[0], 1.0)
    S = embed(SIGMA_MINUS, 0, 2) + embed(SIGMA_MINUS, 1, 2)
    assert np.allclose(A.matrix, S)


def test_frequency_not_in_spectrum():
    with pytest.raises(FrequencyNotInSpectrum):
        ladder_operator(np.diag([0.0, 1.0]), SIGMA_X, 0.5)


def test_qubit_decomposition():
    es = eigenoperator_decomposition(np.diag([0.0, 1.0]), SIGMA_X)
    assert es.frequencies == (-1.0, 1.0)
    assert np.allclose(es[1.0].matrix, SIGMA_MINUS)
    assert np.allclose(es[-1.0].matrix, SIGMA_PLUS)
    assert es.completeness_residual() < 1e-15


def test_equally_spaced_ladder():
    d = 4
    H = np.diag(np.arange(d, dtype=float))
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    es = eigenoperator_decomposition(H, a + a.T)
    assert es.frequencies == (-1.0, 1.0)
    assert np.allclose(es[1.0].matrix, a)     # nonzero only just above the diagonal
    assert np.allclose(np.tril(es[-1.0].matrix, -1), es[-1.0].matrix)


def test_dicke_pair_with_dark_sector():
    m = dicke_model(2)
    es = m.eigenoperators()
    assert es.frequencies == (-1.0, 1.0)
    S = embed(SIGMA_MINUS, 0, 2) + embed(SIGMA_MINUS, 1, 2)
    assert np.allclose(es[1.0].matrix, S)
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(es[1.0].matrix @ singlet, 0)
    assert es.max_ladder_residual() < 1e-12 and es.completeness_residual() < 1e-12


def test_zero_frequency_block_kept():
    # P couples the degenerate pair b, c: the w = 0 component is nonzero
    H = np.diag([0.0, 0.0, 1.0])
    P = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=complex)
    es = eigenoperator_decomposition(H, P)
    assert es.frequencies == (-1.0, 0.0, 1.0)
    assert es.completeness_residual() < 1e-14


def test_diagonal_coupling_gives_zero_frequency():
    es = eigenoperator_decomposition(np.diag([0.0, 1.0]), np.diag([1.0, -1.0]))
    assert es.frequencies == (0.0,)


def test_json_roundtrip():
    es = eigenoperator_decomposition(np.diag([0.0, 1.0, 3.0]), random_hermitian(3, np.random.default_rng(0)))
    obj = es.to_json()
    ops = EigenoperatorSet.operators_from_json(obj)
    assert sorted(ops) == obj["frequencies"]
    for w, a in ops.items():
        assert np.allclose(a.matrix, es[w].matrix)


def test_merging_invariance(rng):
    # a generic spectrum: any tolerance below the smallest gap between Bohr
    # frequencies yields the same operators
    for _ in range(10):
        H = random_hermitian(5, rng)
        P = random_hermitian(5, rng)
        freqs = np.array(bohr_frequencies(H).frequencies)
        gap = np.min(np.diff(freqs))
        a = eigenoperator_decomposition(H, P, 0.0)
        b = eigenoperator_decomposition(H, P, 0.5 * gap)
        assert a.frequencies == pytest.approx(b.frequencies)
        for w in a.frequencies:
            assert np.max(np.abs(a[w].matrix - b[w].matrix)) < 1e-14


def test_merged_cluster_sums_pieces(rng):
    H = np.diag([0.0, 1.0, 2.0 + 1e-7])
    P = random_hermitian(3, rng)
    fine = eigenoperator_decomposition(H, P, 0.0)
    coarse = eigenoperator_decomposition(H, P, 1e-5)
    pieces = [w for w in fine.frequencies if abs(w - 1) < 1e-5]
    assert len(pieces) == 2
    total = sum(fine[w].matrix for w in pieces)
    assert np.allclose(coarse[coarse.find(1.0, 1e-5)].matrix, total)
    # the merged operator is only approximately a ladder operator
    assert coarse.completeness_residual() < 1e-12


def _closed_under_negation(freqs):
    return all(any(abs(w + v) < 1e-12 for v in freqs) for w in freqs)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 16), st.integers(0, 2 ** 31 - 1), st.booleans())
def test_decomposition_invariants(d, seed, degenerate):
    g = np.random.default_rng(seed)
    H = random_hermitian(d, g)
    if degenerate:
        # integer spectrum with repeated levels
        levels = g.integers(0, 4, size=d).astype(float)
        v = np.linalg.qr(random_hermitian(d, g))[0]
        H = v @ np.diag(levels) @ v.conj().T
    P = random_hermitian(d, g)
    es = eigenoperator_decomposition(H, P)
    assert es.max_ladder_residual() <= 1e-9
    assert es.completeness_residual() <= 1e-9
    assert es.conjugation_residual() <= 1e-12
    assert _closed_under_negation(es.frequencies)
    spec = bohr_frequencies(H)
    assert _closed_under_negation(spec.frequencies)
