"""CHSH estimation from continuous phase records.

Pipeline: demodulate voltage traces into phases, estimate the local
second-harmonic moments and the phase-difference coherence, build the
bounded observables cos(2(phi - A)), and form either

* the raw time-averaged CHSH value (bounded by 2 for every record), or
* the reduced-phase value S = 2*sqrt(2) * kappa * |gamma|.

Standard errors of record-level quantities are batched: one batch per
coherence window of the record.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chsh_core import CHSHEstimate, SettingsQuad, TSIRELSON, canonical_settings, chsh_combine
from .circular_stats import TWO_PI, empirical_harmonic_moment, wrap
from .exceptions import ConfigurationError, InsufficientDataError
from .record_synth import PairedPhaseRecord, VoltageRecord
from .reduced_subspace import local_factor

__all__ = [
    "SECOND_HARMONIC",
    "APPENDIX_FIRST_HARMONIC",
    "CONVENTIONS",
    "PhaseRecord",
    "LocalStats",
    "GammaEstimate",
    "extract_phase",
    "demodulate_pair",
    "dichotomic",
    "estimate_local",
    "estimate_gamma",
    "gamma_from_deltas",
    "correlator_timeavg",
    "chsh_raw",
    "reduced_chsh",
    "chsh_reduced",
    "chsh_reduced_gaussian",
    "split_segments",
    "analyze_record",
    "estimate_to_json",
]

SECOND_HARMONIC = "second-harmonic"
APPENDIX_FIRST_HARMONIC = "appendix-first-harmonic"
CONVENTIONS = (SECOND_HARMONIC, APPENDIX_FIRST_HARMONIC)
MIN_WINDOWS = 100


@dataclass(frozen=True, eq=False)
class PhaseRecord:
    """Single-channel phase series, one value per demodulation window."""

    dt: float
    phi: np.ndarray


class LocalStats(NamedTuple):
    edges: np.ndarray
    weights: np.ndarray
    m: complex
    m_se: float
    factor: float


class GammaEstimate(NamedTuple):
    value: complex
    se: float
    convention: str
    n_windows: int


# ---------------------------------------------------------------------------
# (i) phase extraction


def extract_phase(record: VoltageRecord, carrier: float | None = None,
                  window: int = 64) -> PhaseRecord:
    """Quadrature demodulation against a fixed reference, one phase per window.

    Each window is least-squares fitted to I*cos(wt) + Q*sin(wt), so pure tones
    are recovered exactly even when the window does not hold an integer
    number of carrier periods. The phase is atan2(-Q, I).
    """
    f = record.carrier if carrier is None else carrier
    if window * f * record.dt < 2.0:
        raise ConfigurationError("demodulation window must span at least 2 carrier periods")
    n_win = record.samples.size // window
    if n_win < 1:
        raise ConfigurationError("record shorter than one demodulation window")
    n = n_win * window
    t = record.t[:n]
    c = np.cos(TWO_PI * f * t).reshape(n_win, window)
    s = np.sin(TWO_PI * f * t).reshape(n_win, window)
    v = record.samples[:n].reshape(n_win, window)
    scc, sss, scs = (c * c).sum(1), (s * s).sum(1), (c * s).sum(1)
    vc, vs = (v * c).sum(1), (v * s).sum(1)
    det = scc * sss - scs**2
    i_comp = (vc * sss - vs * scs) / det
    q_comp = (vs * scc - vc * scs) / det
    return PhaseRecord(record.dt * window, wrap(np.arctan2(-q_comp, i_comp)))


def demodulate_pair(v1: VoltageRecord, v2: VoltageRecord, window: int = 64,
                    carrier: float | None = None, batch: int = 1) -> PairedPhaseRecord:
    p1 = extract_phase(v1, carrier, window)
    p2 = extract_phase(v2, carrier, window)
    return PairedPhaseRecord(p1.dt, p1.phi, p2.phi, batch)


# ---------------------------------------------------------------------------
# (ii)-(iii) local and nonlocal statistics


def _phases(record) -> np.ndarray:
    if isinstance(record, PhaseRecord):
        return record.phi
    return np.asarray(record, dtype=float).ravel()


def estimate_local(record, bins: int = 64) -> LocalStats:
    """Histogram, second-harmonic moment and per-side factor sqrt(1-|m|^2).

    The moment comes from the raw samples, never from the histogram.
    """
    phi = _phases(record)
    if phi.size < 100:
        raise InsufficientDataError(f"local statistics need >= 100 samples, got {phi.size}")
    if bins < 16:
        raise ConfigurationError("use at least 16 histogram bins")
    counts, edges = np.histogram(wrap(phi), bins=bins, range=(0.0, TWO_PI))
    m = empirical_harmonic_moment(phi, 2)
    factor = local_factor(m.value)
    return LocalStats(edges, counts / counts.sum(), m.value, m.se, factor)


def _batch_means(values: np.ndarray, window: int) -> np.ndarray:
    """Per-window means; a trailing partial window is its own batch."""
    n = values.size
    full = n // window
    means = values[: full * window].reshape(full, window).mean(axis=1) if full else np.empty(0)
    if n > full * window:
        means = np.append(means, values[full * window:].mean())
    return means


def _batched_se(values: np.ndarray, window: int) -> float:
    b = _batch_means(values, window)
    if b.size < 2:
        return 0.0
    return float(b.std(ddof=1) / np.sqrt(b.size))


def _check_windows(record: PairedPhaseRecord, minimum: int = MIN_WINDOWS):
    if record.n_windows < minimum:
        raise InsufficientDataError(
            f"need >= {minimum} decorrelated windows, record has {record.n_windows}"
        )


def _harmonic(convention: str) -> int:
    if convention == SECOND_HARMONIC:
        return 2
    if convention == APPENDIX_FIRST_HARMONIC:
        return 1
    raise ConfigurationError(f"unknown convention {convention!r}; choose from {CONVENTIONS}")


def estimate_gamma(record: PairedPhaseRecord, convention: str = SECOND_HARMONIC) -> GammaEstimate:
    """Mean of exp(i*h*(phi1 - phi2)), h = 2 (second-harmonic) or 1 (appendix).

    SE: contributions are rotated onto the direction of the mean and the
    real parts are batched per coherence window.
    """
    h = _harmonic(convention)
    _check_windows(record)
    z = np.exp(1j * h * (record.phi1 - record.phi2))
    mean = z.mean()
    rot = np.exp(-1j * np.angle(mean)) if abs(mean) > 0 else 1.0
    se = _batched_se(np.real(z * rot), record.window)
    return GammaEstimate(complex(mean), se, convention, record.n_windows)


def gamma_from_deltas(deltas, convention: str = APPENDIX_FIRST_HARMONIC) -> GammaEstimate:
    """gamma-hat from i.i.d. phase-difference draws.

    The appendix convention averages exp(i*delta) but reports the SE of
    Re exp(2i*delta), as that convention's sweep does. The second-harmonic
    convention averages exp(2i*delta) with the rotated delta-method SE.
    """
    h = _harmonic(convention)
    d = np.asarray(deltas, dtype=float).ravel()
    if d.size < 2:
        raise InsufficientDataError("need at least 2 phase differences")
    mean = np.exp(1j * h * d).mean()
    if convention == APPENDIX_FIRST_HARMONIC:
        se = float(np.real(np.exp(2j * d)).std(ddof=1) / np.sqrt(d.size))
    else:
        se = empirical_harmonic_moment(d, 2).se
    return GammaEstimate(complex(mean), se, convention, int(d.size))


# ---------------------------------------------------------------------------
# (iv)-(vi) correlators and CHSH


def dichotomic(phi, setting: float) -> np.ndarray:
    """X(t; A) = cos(2(phi(t) - A)), bounded in [-1, 1]."""
    return np.cos(2.0 * (np.asarray(phi, dtype=float) - setting))


def correlator_timeavg(record: PairedPhaseRecord, a: float, b: float):
    """Time average of X1(t; A) X2(t; B) and its window-batched SE."""
    _check_windows(record)
    prod = dichotomic(record.phi1, a) * dichotomic(record.phi2, b)
    return float(prod.mean()), _batched_se(prod, record.window)


def chsh_raw(record: PairedPhaseRecord, settings: SettingsQuad | None = None) -> CHSHEstimate:
    """Raw time-averaged CHSH value.

    The SE of S is batched on the per-sample CHSH combination, so correlations
    between the four correlators are accounted for.
    """
    settings = settings or canonical_settings()
    _check_windows(record)
    x1 = {a: dichotomic(record.phi1, a) for a in (settings.a, settings.a_prime)}
    x2 = {b: dichotomic(record.phi2, b) for b in (settings.b, settings.b_prime)}
    prods = [x1[a] * x2[b] for a, b in settings.pairs()]
    corr = tuple(float(p.mean()) for p in prods)
    corr_se = tuple(_batched_se(p, record.window) for p in prods)
    per_sample = chsh_combine(*prods)
    return CHSHEstimate(float(chsh_combine(*corr)), _batched_se(per_sample, record.window),
                        corr, corr_se, settings, "raw-record", None, record.n_windows,
                        record.seed)


def reduced_chsh(kappa: float, gamma: GammaEstimate,
                 settings: SettingsQuad | None = None, seed=None) -> CHSHEstimate:
    """S = 2*sqrt(2) * kappa * |gamma|, SE scaled from the SE of gamma.

    Stored correlators are the visibility form kappa*|gamma|*cos(2(A-B)).
    """
    settings = settings or canonical_settings()
    v = kappa * abs(gamma.value)
    corr = tuple(float(v * np.cos(2 * (a - b))) for a, b in settings.pairs())
    corr_se = tuple(float(kappa * gamma.se * abs(np.cos(2 * (a - b)))) for a, b in settings.pairs())
    return CHSHEstimate(float(TSIRELSON * v), float(TSIRELSON * kappa * gamma.se), corr,
                        corr_se, settings, "reduced-phase", gamma.convention,
                        gamma.n_windows, seed)


def chsh_reduced(local_a: LocalStats, local_b: LocalStats, gamma: GammaEstimate,
                 settings: SettingsQuad | None = None, seed=None) -> CHSHEstimate:
    """Reduced-phase CHSH from measured local statistics and gamma-hat."""
    return reduced_chsh(local_a.factor * local_b.factor, gamma, settings, seed)


def chsh_reduced_gaussian(sigma_l: float, n_samples: int = 500, seed=0, kappa: float = 1.0,
                          convention: str = APPENDIX_FIRST_HARMONIC) -> CHSHEstimate:
    """Reduced-phase CHSH from delta ~ Normal(0, sigma_L^2) draws."""
    if n_samples < 2:
        raise InsufficientDataError("need n_samples >= 2")
    rng = np.random.default_rng(seed)
    deltas = rng.normal(0.0, sigma_l, size=n_samples)
    return reduced_chsh(kappa, gamma_from_deltas(deltas, convention), seed=seed)


# ---------------------------------------------------------------------------
# bias control


def split_segments(record: PairedPhaseRecord, k: int = 2) -> list:
    """``k`` contiguous equal-length sub-records; the remainder is dropped."""
    if k < 2:
        raise ConfigurationError("split into at least 2 segments")
    seg = len(record) // k
    if seg < 2:
        raise InsufficientDataError(f"record of length {len(record)} is too short for {k} segments")
    return [
        PairedPhaseRecord(record.dt, record.phi1[i * seg:(i + 1) * seg],
                          record.phi2[i * seg:(i + 1) * seg], record.window,
                          record.model, record.seed)
        for i in range(k)
    ]


def _concat(records) -> PairedPhaseRecord:
    first = records[0]
    return PairedPhaseRecord(first.dt, np.concatenate([r.phi1 for r in records]),
                             np.concatenate([r.phi2 for r in records]), first.window,
                             first.model, first.seed)


class RecordAnalysis(NamedTuple):
    raw: CHSHEstimate
    reduced: CHSHEstimate
    local_a: LocalStats
    local_b: LocalStats
    gamma: GammaEstimate


def analyze_record(record: PairedPhaseRecord, settings: SettingsQuad | None = None,
                   convention: str = SECOND_HARMONIC, bias_control: bool = True,
                   segments: int = 2, bins: int = 64) -> RecordAnalysis:
    """Raw and reduced CHSH estimates for one record.

    With ``bias_control`` the calibration quantities (histograms, kappa,
    gamma) come from the first segment and the correlators from the rest.
    """
    settings = settings or canonical_settings()
    if bias_control:
        parts = split_segments(record, segments)
        calib, evaluation = parts[0], _concat(parts[1:])
    else:
        calib = evaluation = record
    local_a = estimate_local(calib.phi1, bins)
    local_b = estimate_local(calib.phi2, bins)
    gamma = estimate_gamma(calib, convention)
    raw = chsh_raw(evaluation, settings)
    reduced = chsh_reduced(local_a, local_b, gamma, settings, record.seed)
    return RecordAnalysis(raw, reduced, local_a, local_b, gamma)


def estimate_to_json(estimate: CHSHEstimate, **extra) -> str:
    payload = estimate.to_dict()
    payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=True)
