"""Convergence studies of 1-D Gaussian quadrature rules in Hermite spaces.

For each ``N = 2**j`` the selected rule is built, its truncated worst-case
error is evaluated, and a log-log slope is fitted on the upper half of the
range. Results go to CSV with the full configuration as ``#`` comments.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._backend import BACKEND
from .nets import DirectionNumberError, InsufficientDimensionsError
from .rules import GAUSS_HERMITE_MAX_NODES, RULE_FAMILIES, build_rule
from .wce import DEFAULT_TRUNCATION, wce_hermite_1d

CI_TRUNCATION = 10**5
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
CSV_HEADER = "N,wce,bias,tail_bound,seconds"


class ConfigError(ValueError):
    """Invalid study configuration."""


class NumericFailure(RuntimeError):
    """A worst-case error evaluation produced a non-finite result."""


@dataclass(frozen=True)
class StudyConfig:
    alpha: int
    rule_family: str
    log2n_min: int
    log2n_max: int
    truncation: int = CI_TRUNCATION
    interlace: str = "alpha"
    direction_file: str = "embedded"
    output: str | None = None
    workers: int = 1
    threads: int = 1
    record_time: bool = False

    def validate(self):
        if not 1 <= self.alpha <= 3:
            raise ConfigError(f"alpha must be 1, 2 or 3, got {self.alpha}")
        if self.rule_family not in RULE_FAMILIES:
            raise ConfigError(f"unknown rule family {self.rule_family!r}; choose from {RULE_FAMILIES}")
        if self.log2n_min > self.log2n_max:
            raise ConfigError(f"empty range: log2n-min {self.log2n_min} > log2n-max {self.log2n_max}")
        lowest = 0 if self.rule_family == "gauss-hermite" else 1
        if self.log2n_min < lowest:
            raise ConfigError(f"log2n-min must be >= {lowest} for {self.rule_family}")
        if self.rule_family == "gauss-hermite" and 2**self.log2n_max > GAUSS_HERMITE_MAX_NODES:
            raise ConfigError(f"Gauss-Hermite rules are limited to {GAUSS_HERMITE_MAX_NODES} nodes")
        if self.rule_family != "gauss-hermite" and self.log2n_max > 26:
            raise ConfigError("log2n-max above 26 is not supported")
        if self.truncation < 1:
            raise ConfigError(f"truncation must be >= 1, got {self.truncation}")
        if self.interlace not in ("alpha", "2a1"):
            raise ConfigError(f"interlace must be 'alpha' or '2a1', got {self.interlace!r}")
        if self.workers < 1 or self.threads < 1:
            raise ConfigError("workers and threads must be positive")
        return self

    @property
    def interlace_factor(self) -> int:
        return self.alpha if self.interlace == "alpha" else 2 * self.alpha + 1

    def metadata(self):
        """Settings that determine the CSV contents (worker counts excluded)."""
        return {
            "alpha": self.alpha,
            "rule": self.rule_family,
            "log2n_min": self.log2n_min,
            "log2n_max": self.log2n_max,
            "truncation": self.truncation,
            "interlace": self.interlace,
            "interlace_factor": self.interlace_factor,
            "direction_file": self.direction_file,
            "backend": BACKEND,
            "version": __version__,
        }


@dataclass(frozen=True)
class StudyRow:
    N: int
    wce: float
    bias: float
    tail_bound: float
    seconds: float


@dataclass
class ConvergenceStudy:
    config: StudyConfig
    rows: list = field(default_factory=list)
    slope: float = math.nan


def fit_slope(log2n, values) -> float:
    """Least-squares slope of ``log2 e`` against ``log2 N`` over the last ``ceil(n/2)`` rows.

    At least two rows are used; a single row gives ``nan``.
    """
    log2n = np.asarray(log2n, dtype=float)
    values = np.asarray(values, dtype=float)
    n = log2n.size
    if n < 2:
        return math.nan
    keep = max(2, -(-n // 2))
    x = log2n[n - keep:]
    y = np.log2(values[n - keep:])
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def _evaluate(config: StudyConfig, j: int) -> StudyRow:
    t0 = time.perf_counter()
    try:
        rule = build_rule(config.rule_family, config.alpha, j, config.interlace_factor,
                          config.direction_file)
        report = wce_hermite_1d(config.alpha, rule, config.truncation, config.threads)
    except FloatingPointError as exc:
        raise NumericFailure(f"{config.rule_family} N=2^{j}: {exc}") from exc
    except (DirectionNumberError, InsufficientDimensionsError, OSError) as exc:
        raise ConfigError(f"{config.rule_family} N=2^{j}: {exc}") from exc
    return StudyRow(N=2**j, wce=report.value, bias=report.bias_term,
                    tail_bound=report.tail_bound, seconds=time.perf_counter() - t0)


def run_study(config: StudyConfig) -> ConvergenceStudy:
    """Evaluate every ``N`` in the configured range; rows are kept in ``N`` order."""
    config.validate()
    js = list(range(config.log2n_min, config.log2n_max + 1))
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda j: _evaluate(config, j), js))
    else:
        rows = [_evaluate(config, j) for j in js]
    study = ConvergenceStudy(config=config, rows=rows)
    if rows:
        with np.errstate(divide="ignore", invalid="ignore"):
            study.slope = fit_slope([math.log2(r.N) for r in rows], [r.wce for r in rows])
        if len(rows) >= 2 and not math.isfinite(study.slope):
            raise NumericFailure(f"slope fit is not finite ({study.slope})")
    return study


def _fmt(v: float) -> str:
    return format(v, ".17g")


def emit_csv(study: ConvergenceStudy, sink) -> None:
    """Write the header, one row per ``N``, then ``#`` metadata and the slope."""
    sink.write(CSV_HEADER + "\n")
    for r in study.rows:
        seconds = _fmt(r.seconds) if study.config.record_time else "nan"
        sink.write(f"{r.N},{_fmt(r.wce)},{_fmt(r.bias)},{_fmt(r.tail_bound)},{seconds}\n")
    for key, value in study.config.metadata().items():
        sink.write(f"# {key}={value}\n")
    sink.write(f"# slope={_fmt(study.slope)}\n")


def study_csv(study: ConvergenceStudy) -> str:
    buf = io.StringIO()
    emit_csv(study, buf)
    return buf.getvalue()


def parse_study_csv(text: str):
    """Return ``(rows, metadata)`` from :func:`emit_csv` output."""
    rows, meta = [], {}
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing study CSV header")
    for line in lines[1:]:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif line:
            n, *vals = line.split(",")
            rows.append(StudyRow(int(n), *(float(v) for v in vals)))
    return rows, meta


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hermite-qmc",
        description="Worst-case error convergence study for 1-D Gaussian quadrature rules",
    )
    ap.add_argument("--alpha", type=int, required=True, help="smoothness of the Hermite space (1..3)")
    ap.add_argument("--rule", required=True, choices=RULE_FAMILIES, help="rule family")
    ap.add_argument("--log2n-min", type=int, required=True, help="smallest log2 N")
    ap.add_argument("--log2n-max", type=int, required=True, help="largest log2 N")
    ap.add_argument("--truncation", type=float, default=None,
                    help=f"series truncation m (default {CI_TRUNCATION:.0e})")
    ap.add_argument("--full", action="store_true",
                    help=f"use the full truncation m={DEFAULT_TRUNCATION:.0e}")
    ap.add_argument("--interlace", choices=("alpha", "2a1"), default="alpha",
                    help="interlacing factor: alpha or 2*alpha+1")
    ap.add_argument("--direction-file", default="embedded",
                    help="Joe-Kuo direction-number file, or 'embedded'")
    ap.add_argument("--output", default=None, help="CSV path (default: stdout)")
    ap.add_argument("--workers", type=int, default=1, help="N values evaluated concurrently")
    ap.add_argument("--threads", type=int, default=1, help="OpenMP threads per evaluation")
    ap.add_argument("--record-time", action="store_true",
                    help="write wall times to the seconds column (breaks byte-identical reruns)")
    return ap


def config_from_args(args) -> StudyConfig:
    if args.full and args.truncation is not None:
        raise ConfigError("--full and --truncation are mutually exclusive")
    if args.full:
        m = DEFAULT_TRUNCATION
    elif args.truncation is None:
        m = CI_TRUNCATION
    else:
        if not (math.isfinite(args.truncation) and args.truncation == int(args.truncation)):
            raise ConfigError(f"truncation must be an integer, got {args.truncation}")
        m = int(args.truncation)
    return StudyConfig(alpha=args.alpha, rule_family=args.rule, log2n_min=args.log2n_min,
                       log2n_max=args.log2n_max, truncation=m, interlace=args.interlace,
                       direction_file=args.direction_file, output=args.output,
                       workers=args.workers, threads=args.threads,
                       record_time=args.record_time).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        study = run_study(config)
    except ConfigError as exc:
        print(f"hermite-qmc: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"hermite-qmc: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = study_csv(study)
    if config.output:
        try:
            with open(config.output, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"hermite-qmc: cannot write {config.output}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
