import json

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from numpy.testing import assert_allclose

from phasebell.chsh_core import TSIRELSON, SettingsQuad, canonical_settings
from phasebell.circular_stats import TWO_PI, Uniform, WrappedGaussian, sample_phases
from phasebell.estimator_pipeline import (
    APPENDIX_FIRST_HARMONIC,
    SECOND_HARMONIC,
    GammaEstimate,
    LocalStats,
    analyze_record,
    chsh_raw,
    chsh_reduced,
    chsh_reduced_gaussian,
    correlator_timeavg,
    demodulate_pair,
    dichotomic,
    estimate_gamma,
    estimate_local,
    estimate_to_json,
    extract_phase,
    gamma_from_deltas,
    reduced_chsh,
    split_segments,
)
from phasebell.exceptions import ConfigurationError, InsufficientDataError
from phasebell.record_synth import (
    ClassicalDeterministic,
    ClassicalSharedLambda,
    PairedPhaseRecord,
    QuantumLocked,
    VoltageRecord,
    modulate,
    synth_pair,
)

N_WIN = 100_000


def locked(sigma, windows=N_WIN, seed=0):
    return synth_pair(QuantumLocked(sigma), windows, 0.25, seed)


def circ_diff(a, b):
    return np.angle(np.exp(1j * (a - b)))


def local(factor):
    return LocalStats(np.linspace(0, TWO_PI, 17), np.full(16, 1 / 16), 0j, 0.0, factor)


# --- phase extraction -------------------------------------------------------

@pytest.mark.parametrize("phi0", [0.0, np.pi / 2])
def test_extract_pure_tone(phi0):
    dt, f = 0.01, 7.3
    t = np.arange(6400) * dt
    rec = VoltageRecord(dt, np.cos(TWO_PI * f * t + phi0), f)
    out = extract_phase(rec, window=64)
    assert np.max(np.abs(circ_diff(out.phi, phi0))) < 1e-9
    assert out.dt == pytest.approx(0.64)


def test_extract_window_too_short():
    rec = VoltageRecord(0.01, np.zeros(1000), 1.0)
    with pytest.raises(ConfigurationError):
        extract_phase(rec, window=64)


def test_demodulation_round_trip():
    rec = synth_pair(QuantumLocked(0.5), 2000, 1 / 64, 4)
    v1, v2 = modulate(rec, carrier=8.0, amplitude=1.0, noise=0.01, seed=4)
    pair = demodulate_pair(v1, v2, window=64)
    for got, truth in ((pair.phi1, rec.phi1[::64]), (pair.phi2, rec.phi2[::64])):
        assert np.sqrt(np.mean(circ_diff(got, truth) ** 2)) < 0.05


# --- local statistics -------------------------------------------------------

def test_local_uniform():
    stats = estimate_local(sample_phases(Uniform(), N_WIN, 1))
    assert abs(stats.m) < 0.01 and stats.factor > 0.99995
    assert abs(stats.weights.sum() - 1) < 1e-12 and stats.weights.size == 64


def test_local_constant_phase():
    stats = estimate_local(np.full(500, 0.7))
    assert_allclose(abs(stats.m), 1, atol=1e-15)
    assert stats.factor == 0


def test_local_wrapped_gaussian():
    stats = estimate_local(sample_phases(WrappedGaussian(0.5), N_WIN, 2))
    assert abs(abs(stats.m) - 0.60653) < 0.01


def test_local_preconditions():
    with pytest.raises(InsufficientDataError):
        estimate_local(np.zeros(99))
    with pytest.raises(ConfigurationError):
        estimate_local(np.zeros(200), bins=8)


# --- gamma ------------------------------------------------------------------

@pytest.mark.parametrize("convention", [SECOND_HARMONIC, APPENDIX_FIRST_HARMONIC])
def test_gamma_perfect_lock(convention):
    g = estimate_gamma(locked(0.0, 200), convention)
    assert g.value == 1 and g.se == 0


@pytest.mark.parametrize("convention,expected", [(SECOND_HARMONIC, np.exp(-0.5)),
                                                 (APPENDIX_FIRST_HARMONIC, np.exp(-0.125))])
def test_gamma_gaussian_lock(convention, expected):
    g = estimate_gamma(locked(0.5), convention)
    assert abs(abs(g.value) - expected) < 0.01
    assert abs(abs(g.value) - expected) < 4 * g.se
    assert g.n_windows == N_WIN


def test_gamma_se_counts_windows_not_samples():
    # 4 identical samples per window carry no extra information
    g = estimate_gamma(locked(0.5, 10_000), SECOND_HARMONIC)
    rec = locked(0.5, 10_000)
    once = np.exp(2j * (rec.phi1 - rec.phi2))[::rec.window]
    assert_allclose(g.se, np.real(once * np.exp(-1j * np.angle(once.mean()))).std(ddof=1) / 100,
                    rtol=1e-10)


def test_gamma_requires_windows():
    with pytest.raises(InsufficientDataError):
        estimate_gamma(locked(0.5, 50))
    with pytest.raises(ConfigurationError):
        estimate_gamma(locked(0.5, 200), "third-harmonic")


def test_gamma_from_deltas_appendix_se():
    d = np.random.default_rng(0).normal(0, 0.8, 500)
    g = gamma_from_deltas(d)
    assert_allclose(g.value, np.exp(1j * d).mean())
    assert_allclose(g.se, np.cos(2 * d).std(ddof=1) / np.sqrt(500))


# --- correlators and raw CHSH -----------------------------------------------

def test_dichotomic_bounded():
    x = dichotomic(np.linspace(-10, 10, 1001), 0.3)
    assert np.all(np.abs(x) <= 1)


def test_timeavg_deterministic_exact():
    rec = synth_pair(ClassicalDeterministic(0.3, 1.2), 100, 0.25, 0)
    e, se = correlator_timeavg(rec, 0.1, -0.4)
    assert_allclose(e, np.cos(2 * 0.2) * np.cos(2 * 1.6), atol=1e-14)
    assert se < 1e-15


@pytest.mark.parametrize("sigma,expected", [(0.0, 0.5), (0.5, 0.5 * np.exp(-0.5))])
def test_timeavg_common_phase_halves_visibility(sigma, expected):
    e, se = correlator_timeavg(locked(sigma), 0.2, 0.2)
    assert abs(e - expected) <= 3 * se


def test_raw_deterministic_root_two():
    rec = synth_pair(ClassicalDeterministic(0.0, 0.0), 100, 0.25, 0)
    est = chsh_raw(rec)
    assert_allclose(est.s, np.sqrt(2), atol=1e-14)
    assert est.kind == "raw-record"


def test_raw_locked_half_visibility():
    est = chsh_raw(locked(0.0))
    assert abs(est.s - np.sqrt(2)) <= 3 * max(est.se, 1e-12)
    assert_allclose(sum(est.correlators[:3]) - est.correlators[3], est.s)


def test_raw_shared_lambda_respects_bound():
    est = chsh_raw(synth_pair(ClassicalSharedLambda(), N_WIN, 0.25, 7))
    assert abs(est.s) <= 2 + 4 * est.se


def test_raw_settings_rotation_covariance():
    rec = locked(0.6, 1000)
    delta = 0.77
    rot = PairedPhaseRecord(rec.dt, rec.phi1 + delta, rec.phi2 + delta, rec.window)
    st_ = canonical_settings()
    shifted = SettingsQuad(*(x + delta for x in st_))
    assert abs(chsh_raw(rot, shifted).s - chsh_raw(rec, st_).s) < 1e-12


@hsettings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.lists(st.floats(0, np.pi), min_size=4, max_size=4))
def test_raw_pointwise_bound(seed, angles):
    rng = np.random.default_rng(seed)
    rec = PairedPhaseRecord(0.1, rng.uniform(0, TWO_PI, 400), rng.uniform(0, TWO_PI, 400), 2)
    est = chsh_raw(rec, SettingsQuad(*angles))
    assert abs(est.s) <= 2 + 1e-12


# --- reduced CHSH -----------------------------------------------------------

@pytest.mark.parametrize("factor,gamma,expected", [
    (1.0, 1.0, TSIRELSON), (1.0, 1 / np.sqrt(2), 2.0), (0.0, 0.9, 0.0),
])
def test_reduced_examples(factor, gamma, expected):
    g = GammaEstimate(gamma, 0.0, SECOND_HARMONIC, 100)
    est = chsh_reduced(local(factor), local(1.0), g)
    assert_allclose(est.s, expected, atol=1e-14)
    assert est.kind == "reduced-phase"
    assert_allclose(est.correlators[0], factor * gamma * np.cos(np.pi / 4), atol=1e-15)


def test_reduced_from_constant_record_is_zero():
    rec = synth_pair(ClassicalDeterministic(0.3, 1.2), 200, 0.25, 0)
    res = analyze_record(rec, bias_control=False)
    assert res.reduced.s == 0


def test_reduced_locked_matches_visibility_prediction():
    rec = locked(0.5)
    res = analyze_record(rec, bias_control=False)
    assert abs(res.reduced.s - TSIRELSON * np.exp(-0.5)) <= 3 * res.reduced.se + 0.01


def test_reduced_gaussian_sweep_point():
    est = chsh_reduced_gaussian(0.0, 500, seed=1)
    assert_allclose(est.s, TSIRELSON, atol=1e-12)
    est = chsh_reduced_gaussian(1.0, 100_000, seed=1)
    assert abs(est.s - TSIRELSON * np.exp(-0.5)) < 4 * est.se
    with pytest.raises(InsufficientDataError):
        chsh_reduced_gaussian(1.0, 1)


def test_reduced_se_scales_with_gamma_se():
    est = reduced_chsh(0.5, GammaEstimate(0.8, 0.02, SECOND_HARMONIC, 100))
    assert_allclose(est.se, TSIRELSON * 0.5 * 0.02)


# --- bias control -----------------------------------------------------------

@pytest.mark.parametrize("n,k,lengths", [(10, 2, [5, 5]), (11, 2, [5, 5]), (10, 3, [3, 3, 3])])
def test_split_lengths(n, k, lengths):
    rec = PairedPhaseRecord(0.1, np.arange(n) * 0.1, np.arange(n) * 0.2)
    parts = split_segments(rec, k)
    assert [len(p) for p in parts] == lengths
    assert np.array_equal(parts[0].phi1, rec.phi1[:lengths[0]])


def test_split_errors():
    rec = PairedPhaseRecord(0.1, np.zeros(3), np.zeros(3))
    with pytest.raises(InsufficientDataError):
        split_segments(rec, 2)
    with pytest.raises(ConfigurationError):
        split_segments(rec, 1)


def test_bias_control_agrees_with_full_record():
    rec = locked(0.5)
    split = analyze_record(rec, bias_control=True).reduced
    full = analyze_record(rec, bias_control=False).reduced
    assert abs(split.s - full.s) <= 3 * np.hypot(split.se, full.se)


def test_json_payload():
    est = chsh_raw(locked(0.2, 200))
    payload = json.loads(estimate_to_json(est, model="quantum"))
    assert payload["kind"] == "raw-record" and payload["model"] == "quantum"
    assert payload["n_windows"] == 200
