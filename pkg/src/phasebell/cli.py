"""Command-line front end.

Subcommands
-----------
sweep    sigma_L sweep of the statevector oracle vs the reduced-phase estimator
         (CSV + SVG + JSON manifest).
null     classical null suite: raw CHSH on every classical record model.
records  synthesize one record, write it as CSV and its raw/reduced estimates as JSON.

Exit codes: 0 success, 1 null-suite validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .chsh_core import CLASSICAL_BOUND, canonical_settings
from .circular_stats import TWO_PI, WrappedGaussian
from .estimator_pipeline import (
    APPENDIX_FIRST_HARMONIC,
    CONVENTIONS,
    SECOND_HARMONIC,
    analyze_record,
    chsh_raw,
    chsh_reduced_gaussian,
)
from .exceptions import ConfigurationError, PhaseBellError
from .quantum_oracle import chsh_traditional
from .record_synth import (
    ClassicalDeterministic,
    ClassicalSharedLambda,
    PhaseDiffusion,
    QuantumLocked,
    detuned_map,
    synth_pair,
    write_record_csv,
)
from .svgplot import sweep_svg

logger = logging.getLogger(__name__)

CSV_HEADER = "sigma_L,S_oracle,S_oracle_se,S_reduced,S_reduced_se,kappa,gamma_abs"
EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG = 0, 1, 2


def fmt17(x: float) -> str:
    return f"{float(x):.17g}"


# ---------------------------------------------------------------------------
# sweep


@dataclass
class SweepConfig:
    sigma_min: float = 0.0
    sigma_max: float = 2.4
    steps: int = 100
    n_samples: int = 500
    seed: int = 7
    kappa: float = 1.0
    convention: str = APPENDIX_FIRST_HARMONIC
    shots: int | None = None
    workers: int = 1
    out_csv: str | None = None
    out_svg: str | None = None
    out_manifest: str | None = None

    def validate(self):
        if not self.sigma_min <= self.sigma_max:
            raise ConfigurationError("sigma_min must not exceed sigma_max")
        if self.sigma_min < 0:
            raise ConfigurationError("sigma_min must be nonnegative")
        if self.steps < 2:
            raise ConfigurationError("steps must be >= 2")
        if self.n_samples < 2:
            raise ConfigurationError("n_samples must be >= 2")
        if not 0.0 <= self.kappa <= 1.0:
            raise ConfigurationError("kappa must lie in [0, 1]")
        if self.convention not in CONVENTIONS:
            raise ConfigurationError(f"convention must be one of {CONVENTIONS}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        return self

    @property
    def sigmas(self) -> np.ndarray:
        return np.linspace(self.sigma_min, self.sigma_max, self.steps)


class SweepPoint(NamedTuple):
    sigma_l: float
    s_oracle: float
    s_oracle_se: float
    s_reduced: float
    s_reduced_se: float
    kappa: float
    gamma_abs: float


@dataclass
class SweepResult:
    config: SweepConfig
    points: list = field(default_factory=list)
    wall_time: float = 0.0

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])

    @property
    def crossing_oracle(self):
        return first_downcrossing(self.column("sigma_l"), self.column("s_oracle"))

    @property
    def crossing_reduced(self):
        return first_downcrossing(self.column("sigma_l"), self.column("s_reduced"))

    def csv_text(self) -> str:
        lines = [CSV_HEADER]
        lines += [",".join(fmt17(v) for v in p) for p in self.points]
        return "\n".join(lines) + "\n"

    def svg_text(self) -> str:
        return sweep_svg(self.column("sigma_l"), self.column("s_oracle"), self.column("s_reduced"))

    def manifest(self) -> dict:
        return {
            "config": asdict(self.config),
            "version": __version__,
            "wall_time_s": self.wall_time,
            "crossing_oracle": self.crossing_oracle,
            "crossing_reduced": self.crossing_reduced,
            "points": [p._asdict() for p in self.points],
        }


def first_downcrossing(x, y, level: float = CLASSICAL_BOUND):
    """Linear-interpolated x where y first drops from >= level to < level."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for i in range(len(y) - 1):
        if y[i] >= level > y[i + 1]:
            return float(x[i] + (y[i] - level) * (x[i + 1] - x[i]) / (y[i] - y[i + 1]))
    return None


def _sweep_point(config: SweepConfig, sigma: float, stream) -> SweepPoint:
    # oracle and estimator share the point's substream: same normal draws, rescaled
    oracle = chsh_traditional(sigma, config.n_samples, stream, shot_noise=config.shots)
    reduced = chsh_reduced_gaussian(sigma, config.n_samples, stream, config.kappa,
                                    config.convention)
    gamma_abs = reduced.s / (2 * np.sqrt(2) * config.kappa) if config.kappa > 0 else 0.0
    return SweepPoint(float(sigma), oracle.s, oracle.se, reduced.s, reduced.se,
                      float(config.kappa), float(gamma_abs))


def run_sweep(config: SweepConfig) -> SweepResult:
    """Compute all sweep points; each owns the substream spawn(seed)[index]."""
    config.validate()
    start = time.perf_counter()
    streams = np.random.SeedSequence(config.seed).spawn(config.steps)
    sigmas = config.sigmas
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        points = list(pool.map(lambda i: _sweep_point(config, sigmas[i], streams[i]),
                               range(config.steps)))
    return SweepResult(config, points, time.perf_counter() - start)


def cmd_sweep(config: SweepConfig) -> SweepResult:
    """Run the sweep and write whichever outputs are configured."""
    result = run_sweep(config)
    try:
        if config.out_csv:
            Path(config.out_csv).write_text(result.csv_text())
        if config.out_svg:
            Path(config.out_svg).write_text(result.svg_text())
        if config.out_manifest:
            Path(config.out_manifest).write_text(json.dumps(result.manifest(), indent=2))
    except OSError as exc:
        raise ConfigurationError(f"cannot write output: {exc}") from exc
    return result


# ---------------------------------------------------------------------------
# classical null suite


def classical_variants(rng: np.random.Generator) -> dict:
    """One instance of every classical record model, randomized by ``rng``."""
    return {
        "deterministic": ClassicalDeterministic(*rng.uniform(0.0, TWO_PI, 2)),
        "shared-lambda-identity": ClassicalSharedLambda(),
        "shared-lambda-detuned": ClassicalSharedLambda(map2=detuned_map(rng.uniform(0.0, np.pi))),
        "shared-lambda-concentrated": ClassicalSharedLambda(
            lambda_dist=WrappedGaussian(rng.uniform(0.2, 1.0), rng.uniform(0.0, TWO_PI))),
        "phase-diffusion": PhaseDiffusion(rng.uniform(0.01, 0.5)),
    }


class NullReport(NamedTuple):
    max_abs_s: dict
    failures: list
    trials: int
    n_windows: int

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self):
        out = [f"{name:28s} max|S| = {s:.6f}" for name, s in self.max_abs_s.items()]
        out.append("PASS" if self.passed else f"FAIL ({len(self.failures)} trials above 2 + 4*SE)")
        return out


def cmd_null_suite(trials: int = 100, seed: int = 0, n_windows: int = 10_000,
                   samples_per_window: int = 4) -> NullReport:
    """Raw CHSH at canonical settings on every classical model, ``trials`` times each."""
    if trials < 10:
        raise ConfigurationError("run at least 10 trials")
    settings = canonical_settings()
    dt = 1.0 / samples_per_window
    max_abs, failures = {}, []
    for trial in range(trials):
        trial_seq = np.random.SeedSequence([seed, trial])
        variants = classical_variants(np.random.default_rng(trial_seq))
        rec_seed = int(trial_seq.generate_state(1)[0])
        for name, model in variants.items():
            record = synth_pair(model, n_windows * model.tau_c, dt * model.tau_c, rec_seed)
            est = chsh_raw(record, settings)
            max_abs[name] = max(max_abs.get(name, 0.0), abs(est.s))
            if abs(est.s) > CLASSICAL_BOUND + 4 * est.se:
                failures.append((name, trial, est.s, est.se))
    return NullReport(max_abs, failures, trials, n_windows)


# ---------------------------------------------------------------------------
# records


_MODEL_KINDS = {
    "quantum": QuantumLocked,
    "deterministic": ClassicalDeterministic,
    "diffusion": PhaseDiffusion,
}


def parse_model(text: str):
    """Parse ``kind:key=value,...``.

    Kinds: quantum (sigma_l, tau_c), deterministic (phi1, phi2),
    diffusion (diffusion, tau_c), lambda (offset, tau_c; identity map for
    phi1, phi1 + offset for phi2).
    """
    kind, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigurationError(f"bad model parameter {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError as exc:
            raise ConfigurationError(f"parameter {key} must be numeric") from exc
    try:
        if kind == "lambda":
            offset = params.pop("offset", 0.0)
            return ClassicalSharedLambda(map2=detuned_map(offset), **params)
        if kind in _MODEL_KINDS:
            return _MODEL_KINDS[kind](**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {kind}: {exc}") from exc
    raise ConfigurationError(f"unknown model kind {kind!r}")


def cmd_records(model, duration: float, dt: float, seed: int = 0, out_csv=None,
                out_json=None, convention: str = SECOND_HARMONIC, bias_control: bool = True):
    """Synthesize a record, write CSV and JSON, return (record, analysis)."""
    label = model if isinstance(model, str) else repr(model)
    if isinstance(model, str):
        model = parse_model(model)
    record = synth_pair(model, duration, dt, seed)
    analysis = analyze_record(record, canonical_settings(), convention, bias_control)
    payload = {
        "model": label,
        "bias_control": bias_control,
        "raw": analysis.raw._replace(convention=convention, seed=seed).to_dict(),
        "reduced": analysis.reduced._replace(seed=seed).to_dict(),
    }
    try:
        if out_csv:
            write_record_csv(record, out_csv)
        if out_json:
            Path(out_json).write_text(json.dumps(payload, indent=2))
    except OSError as exc:
        raise ConfigurationError(f"cannot write output: {exc}") from exc
    return record, analysis, payload


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phasebell", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="oracle vs reduced-phase sweep over sigma_L")
    sw.add_argument("--config", help="JSON file with SweepConfig fields; flags override it")
    sw.add_argument("--sigma-min", type=float)
    sw.add_argument("--sigma-max", type=float)
    sw.add_argument("--steps", type=int)
    sw.add_argument("--samples", dest="n_samples", type=int)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--kappa", type=float)
    sw.add_argument("--convention", choices=CONVENTIONS)
    sw.add_argument("--shots", type=int)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--out-csv")
    sw.add_argument("--out-svg")
    sw.add_argument("--out-manifest")

    nl = sub.add_parser("null", help="classical null suite")
    nl.add_argument("--trials", type=int, default=100)
    nl.add_argument("--seed", type=int, default=0)
    nl.add_argument("--windows", type=int, default=10_000)

    rc = sub.add_parser("records", help="synthesize a record and estimate CHSH")
    rc.add_argument("--model", required=True,
                    help="e.g. quantum:sigma_l=0.3,tau_c=1 or deterministic:phi1=0.3,phi2=1.2")
    rc.add_argument("--duration", type=float, default=1e5)
    rc.add_argument("--dt", type=float, default=0.25)
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--convention", choices=CONVENTIONS, default=SECOND_HARMONIC)
    rc.add_argument("--no-bias-control", action="store_true")
    rc.add_argument("--out-csv")
    rc.add_argument("--out-json")
    return parser


def sweep_config_from_args(args) -> SweepConfig:
    values = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
    known = {f.name for f in fields(SweepConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    for name in known:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return SweepConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "sweep":
            result = cmd_sweep(sweep_config_from_args(args))
            print(f"points: {len(result.points)}  crossing(oracle) = {result.crossing_oracle}  "
                  f"crossing(reduced) = {result.crossing_reduced}")
            if not result.config.out_csv:
                sys.stdout.write(result.csv_text())
            return EXIT_OK
        if args.command == "null":
            report = cmd_null_suite(args.trials, args.seed, args.windows)
            print("\n".join(report.lines()))
            return EXIT_OK if report.passed else EXIT_VALIDATION
        if args.command == "records":
            _, _, payload = cmd_records(args.model, args.duration, args.dt, args.seed,
                                        args.out_csv, args.out_json, args.convention,
                                        not args.no_bias_control)
            if not args.out_json:
                print(json.dumps(payload, indent=2))
            else:
                print(f"raw S = {payload['raw']['S']:.6f}  reduced S = {payload['reduced']['S']:.6f}")
            return EXIT_OK
    except PhaseBellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
