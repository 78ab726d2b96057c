"""Synthetic paired phase records and their voltage-trace modulation.

Phases are piecewise constant over coherence windows of length ``tau_c``, so
the number of independent draws in a record is duration / tau_c. Randomness
for every record comes from ``numpy.random.default_rng([seed, stream])`` with
one stream per random quantity; a record is therefore a pure function of
(model, duration, dt, seed).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .circular_stats import TWO_PI, PhaseModel, Uniform, sample_phases, wrap
from .exceptions import ConfigurationError, InvalidModelError

__all__ = [
    "QuantumLocked",
    "ClassicalSharedLambda",
    "ClassicalDeterministic",
    "PhaseDiffusion",
    "PairedPhaseRecord",
    "VoltageRecord",
    "identity_map",
    "detuned_map",
    "tabulated_map",
    "synth_pair",
    "modulate",
    "write_record_csv",
    "read_record_csv",
]

# RNG stream ids; fixed so records never change when a model gains a stream
_STREAM_COMMON, _STREAM_DIFF, _STREAM_LAMBDA, _STREAM_WALK1, _STREAM_WALK2 = range(5)
_STREAM_NOISE = 16


@dataclass(frozen=True)
class QuantumLocked:
    """Uniform common phase, Gaussian phase difference, both redrawn per window."""

    sigma_l: float
    tau_c: float = 1.0

    def __post_init__(self):
        if self.sigma_l < 0:
            raise InvalidModelError("sigma_L must be nonnegative")
        if self.tau_c <= 0:
            raise InvalidModelError("tau_c must be positive")


def identity_map(lam):
    return lam


def detuned_map(offset: float) -> Callable:
    def response(lam):
        return lam + offset
    response.__name__ = f"detuned({offset:g})"
    return response


def tabulated_map(xs, ys) -> Callable:
    """Periodic piecewise-linear response interpolating (xs, ys) over one turn."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)

    def response(lam):
        return np.interp(wrap(lam), xs, ys, period=TWO_PI)
    return response


@dataclass(frozen=True, eq=False)
class ClassicalSharedLambda:
    """Local deterministic responses phi_k = g_k(lambda) to a shared hidden variable."""

    lambda_dist: PhaseModel = field(default_factory=Uniform)
    map1: Callable = identity_map
    map2: Callable = identity_map
    tau_c: float = 1.0

    def __post_init__(self):
        if self.tau_c <= 0:
            raise InvalidModelError("tau_c must be positive")

    def __repr__(self):
        names = [getattr(f, "__name__", "map") for f in (self.map1, self.map2)]
        return (f"ClassicalSharedLambda(lambda_dist={self.lambda_dist!r}, map1={names[0]}, "
                f"map2={names[1]}, tau_c={self.tau_c!r})")


@dataclass(frozen=True)
class ClassicalDeterministic:
    """Constant phases on both sides."""

    phi1: float
    phi2: float
    tau_c: float = 1.0


@dataclass(frozen=True)
class PhaseDiffusion:
    """Shared uniform start phase, then independent Wiener phase diffusion.

    ``diffusion`` D is in rad^2/s: each phase has variance growth 2*D*t.
    ``tau_c`` only sets the batching window for standard errors.
    """

    diffusion: float
    tau_c: float = 1.0

    def __post_init__(self):
        if self.diffusion < 0:
            raise InvalidModelError("diffusion rate must be nonnegative")
        if self.tau_c <= 0:
            raise InvalidModelError("tau_c must be positive")


RecordModel = Union[QuantumLocked, ClassicalSharedLambda, ClassicalDeterministic, PhaseDiffusion]


@dataclass(frozen=True, eq=False)
class PairedPhaseRecord:
    """Synchronized phase series phi1(t), phi2(t) sampled every ``dt`` seconds.

    ``window`` is the number of samples per coherence window and defines the
    batches used for standard errors downstream.
    """

    dt: float
    phi1: np.ndarray
    phi2: np.ndarray
    window: int = 1
    model: object = None
    seed: object = None

    def __post_init__(self):
        phi1 = wrap(np.asarray(self.phi1, dtype=float))
        phi2 = wrap(np.asarray(self.phi2, dtype=float))
        if phi1.shape != phi2.shape or phi1.ndim != 1:
            raise ConfigurationError("phase series must be 1-D and of equal length")
        if phi1.size < 2:
            raise ConfigurationError("a record needs at least 2 samples")
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if self.window < 1:
            raise ConfigurationError("window must be >= 1 sample")
        object.__setattr__(self, "phi1", phi1)
        object.__setattr__(self, "phi2", phi2)

    def __len__(self):
        return self.phi1.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt

    @property
    def n_windows(self) -> int:
        return -(-len(self) // self.window)


@dataclass(frozen=True, eq=False)
class VoltageRecord:
    dt: float
    samples: np.ndarray
    carrier: float
    amplitude: float = 1.0
    noise: float = 0.0

    def __post_init__(self):
        if self.carrier * self.dt >= 0.5:
            raise ConfigurationError("carrier frequency violates the sampling theorem (f_c*dt >= 0.5)")

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt


def _rng(seed, stream):
    return np.random.default_rng([int(seed), stream])


def _hold(values, window, n):
    return np.repeat(values, window)[:n]


def synth_pair(model: RecordModel, duration: float, dt: float, seed: int = 0) -> PairedPhaseRecord:
    """Generate a paired phase record of ``duration`` seconds."""
    if dt <= 0 or duration <= 0:
        raise ConfigurationError("duration and dt must be positive")
    tau_c = model.tau_c
    if dt > tau_c / 4 * (1 + 1e-12):
        raise ConfigurationError(f"dt={dt} exceeds tau_c/4={tau_c / 4}")
    if isinstance(model, QuantumLocked) and duration < 10 * tau_c * (1 - 1e-12):
        raise ConfigurationError("QuantumLocked needs duration >= 10 * tau_c")
    n = int(round(duration / dt))
    window = int(round(tau_c / dt))
    n_win = -(-n // window)
    if n < 2:
        raise ConfigurationError("record would have fewer than 2 samples")

    if isinstance(model, QuantumLocked):
        theta = _rng(seed, _STREAM_COMMON).uniform(0.0, TWO_PI, n_win)
        diff = model.sigma_l * _rng(seed, _STREAM_DIFF).standard_normal(n_win)
        phi1 = _hold(theta + 0.5 * diff, window, n)
        phi2 = _hold(theta - 0.5 * diff, window, n)
    elif isinstance(model, ClassicalSharedLambda):
        lam = sample_phases(model.lambda_dist, n_win, _rng(seed, _STREAM_LAMBDA))
        phi1 = _hold(np.asarray(model.map1(lam), dtype=float), window, n)
        phi2 = _hold(np.asarray(model.map2(lam), dtype=float), window, n)
    elif isinstance(model, ClassicalDeterministic):
        phi1 = np.full(n, float(model.phi1))
        phi2 = np.full(n, float(model.phi2))
    elif isinstance(model, PhaseDiffusion):
        start = _rng(seed, _STREAM_COMMON).uniform(0.0, TWO_PI)
        step = np.sqrt(2.0 * model.diffusion * dt)
        walk1 = np.cumsum(step * _rng(seed, _STREAM_WALK1).standard_normal(n))
        walk2 = np.cumsum(step * _rng(seed, _STREAM_WALK2).standard_normal(n))
        phi1 = start + walk1 - walk1[0]
        phi2 = start + walk2 - walk2[0]
    else:
        raise InvalidModelError(f"unknown record model {model!r}")
    return PairedPhaseRecord(dt, phi1, phi2, window, model, seed)


def modulate(record: PairedPhaseRecord, carrier: float, amplitude: float = 1.0,
             noise: float = 0.0, seed: int = 0):
    """Voltage traces amplitude*cos(2 pi f_c t + phi_k(t)) plus white Gaussian noise."""
    if carrier * record.dt >= 0.5:
        raise ConfigurationError("carrier frequency violates the sampling theorem (f_c*dt >= 0.5)")
    t = record.t
    out = []
    for k, phi in enumerate((record.phi1, record.phi2)):
        v = amplitude * np.cos(TWO_PI * carrier * t + phi)
        if noise > 0:
            v = v + noise * _rng(seed, _STREAM_NOISE + k).standard_normal(t.size)
        out.append(VoltageRecord(record.dt, v, carrier, amplitude, noise))
    return out[0], out[1]


def write_record_csv(record: PairedPhaseRecord, path=None) -> str:
    """Serialize as ``t,phi1,phi2`` with 17 significant digits.

    Returns the CSV text; also writes it when ``path`` is given.
    """
    buf = io.StringIO()
    buf.write("t,phi1,phi2\n")
    for row in zip(record.t, record.phi1, record.phi2):
        buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_record_csv(source, window: int = 1) -> PairedPhaseRecord:
    """Parse a ``t,phi1,phi2`` CSV (path or text). ``dt`` is taken from the time column."""
    text = Path(source).read_text() if isinstance(source, Path) or "\n" not in str(source) else source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["t", "phi1", "phi2"]:
        raise ConfigurationError("record CSV must start with header t,phi1,phi2")
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.shape[0] < 2:
        raise ConfigurationError("record CSV has fewer than 2 samples")
    dt = float(data[1, 0] - data[0, 0])
    return PairedPhaseRecord(dt, data[:, 1], data[:, 2], window)
