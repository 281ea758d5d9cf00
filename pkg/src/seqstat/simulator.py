"""Monte Carlo harness for the sequential and fixed-length classifiers.

Every trial draws fresh training sequences and its own test stream.  Trial
``t`` of an ``M``-class experiment owns ``M + 1`` Philox streams, keyed by
``(master_seed, t * (M + 1) + role)`` with roles ``0 .. M-1`` for the
training sequences and role ``M`` for the test stream.  Outcomes therefore
depend only on the configuration, never on scheduling: ``estimate`` reduces
per-trial summaries in trial-index order and returns identical reports for
any worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .classifiers import (
    GutmanConfig,
    SequentialConfig,
    TrialTrace,
    Verdict,
    _SequentialEngine,
    _trace_from,
    gutman_binary,
    gutman_multiclass,
)
from .divergence import gjs
from .exponents import bayes_multiclass_gutman, gutman_bayes_exponent
from .errors import (
    AlphabetMismatch,
    InsufficientErrors,
    NoSolution,
    SizeMismatch,
    ValidationError,
)
from .fixedpoint import solve_fixed_point
from .probability import (
    Distribution,
    EmpiricalType,
    SeedSpec,
    bit_generator,
    sample_indices,
)

# Test symbols are drawn from the stream generator in blocks of this size.
STREAM_CHUNK = 128
# Two-sided normal quantile used for the 95% confidence half-widths.
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one Monte Carlo experiment."""

    distributions: tuple[Distribution, ...]
    gamma: float
    train_len: int
    trials: int
    master_seed: int
    true_class: int | None = None
    cap: int | None = None
    priors: tuple[float, ...] | None = None
    test_kind: str = "sequential"
    n_test: int | None = None
    gutman_lambda: float | None = None
    gutman_mode: str = "raw"

    def __post_init__(self) -> None:
        m = len(self.distributions)
        if m < 2:
            raise SizeMismatch("an experiment needs at least two distributions")
        alphabet = self.distributions[0].alphabet
        for d in self.distributions[1:]:
            if d.alphabet != alphabet:
                raise AlphabetMismatch("experiment distributions share one alphabet")
        if self.trials < 1:
            raise SizeMismatch(f"trials must be >= 1, got {self.trials}")
        SeedSpec(self.master_seed)
        if self.true_class is not None and not (0 <= self.true_class < m):
            raise SizeMismatch(f"true_class {self.true_class} out of range")
        if self.priors is not None:
            if len(self.priors) != m:
                raise SizeMismatch("one prior per distribution")
            if any(p < 0 for p in self.priors):
                raise ValidationError("priors must be nonnegative")
            if abs(math.fsum(self.priors) - 1.0) > 1e-9:
                raise ValidationError("priors must sum to 1")
        if self.test_kind not in ("sequential", "gutman"):
            raise ValidationError(f"unknown test kind {self.test_kind!r}")
        if self.test_kind == "gutman":
            if self.n_test is None or self.n_test < 1:
                raise SizeMismatch("a fixed-length run needs n_test >= 1")
            if self.gutman_lambda is None:
                raise ValidationError("a fixed-length run needs a threshold")
        # constructing the config validates gamma / train_len / cap
        self.sequential_config()

    def sequential_config(self) -> SequentialConfig:
        return SequentialConfig(self.gamma, self.train_len, self.cap)

    @property
    def num_classes(self) -> int:
        return len(self.distributions)

    @property
    def effective_cap(self) -> int:
        return self.sequential_config().cap

    @property
    def effective_priors(self) -> tuple[float, ...]:
        if self.priors is not None:
            return self.priors
        m = self.num_classes
        return tuple(1.0 / m for _ in range(m))


@dataclass(frozen=True)
class HypothesisReport:
    """Aggregate outcome of all trials under one true class."""

    hypothesis: int
    trials: int
    errors: int
    nodecisions: int
    error_rate: float
    error_half_width: float
    mean_T: float
    stddev_T: float
    mean_T_half_width: float
    min_T: int
    max_T: int
    predicted_mean_T: float
    nodecision_rate: float


@dataclass(frozen=True)
class SimulationReport:
    rows: tuple[HypothesisReport, ...]
    bayes_error_rate: float | None
    master_seed: int
    wall_time: float


@dataclass(frozen=True)
class ProbeRow:
    train_len: int
    trials: int
    errors: int
    error_rate: float
    mean_T: float
    exponent_per_sample: float
    exponent_per_train: float
    usable: bool


@dataclass(frozen=True)
class ProbeReport:
    """Error decay against training length, with a regression slope."""

    rows: tuple[ProbeRow, ...]
    slope: float


def _stream_indices(dist: Distribution, seed: SeedSpec, limit: int) -> Iterator[int]:
    """Lazy iid index stream; the draw pattern depends only on the seed."""
    rng = bit_generator(seed)
    cdf = np.cumsum(dist.as_array())
    top = len(cdf) - 1
    produced = 0
    while produced < limit:
        block = min(STREAM_CHUNK, limit - produced)
        uniforms = rng.random(block)
        indices = np.minimum(np.searchsorted(cdf, uniforms, side="right"), top)
        for value in indices:
            yield int(value)
        produced += block


def _training_types(cfg: ExperimentConfig, trial_index: int) -> list[EmpiricalType]:
    alphabet = cfg.distributions[0].alphabet
    k = alphabet.size
    base = trial_index * (cfg.num_classes + 1)
    types = []
    for role, dist in enumerate(cfg.distributions):
        idx = sample_indices(dist, cfg.train_len, SeedSpec(cfg.master_seed, base + role))
        counts = np.bincount(idx, minlength=k)
        types.append(EmpiricalType(alphabet, tuple(int(c) for c in counts)))
    return types


def _run_one(
    cfg: ExperimentConfig, trial_index: int, record: bool
) -> tuple[int, Verdict, tuple[int | None, ...], list[list[float]] | None]:
    if cfg.true_class is None:
        raise ValidationError("run_trial needs a configured true class")
    types = _training_types(cfg, trial_index)
    test_seed = SeedSpec(
        cfg.master_seed, trial_index * (cfg.num_classes + 1) + cfg.num_classes
    )
    source = cfg.distributions[cfg.true_class]
    if cfg.test_kind == "gutman":
        n_test = cfg.n_test
        idx = sample_indices(source, n_test, test_seed)
        counts = np.bincount(idx, minlength=source.alphabet.size)
        ty = EmpiricalType(source.alphabet, tuple(int(c) for c in counts))
        gcfg = GutmanConfig(cfg.train_len / n_test, cfg.gutman_lambda, cfg.gutman_mode)
        if cfg.num_classes == 2:
            verdict = gutman_binary(types[0], ty, gcfg)
        else:
            verdict = gutman_multiclass(types, ty, gcfg)
        ty_dist = ty.as_distribution()
        row = [gjs(t.as_distribution(), ty_dist, gcfg.alpha) for t in types]
        crossed = tuple(
            n_test if value > gcfg.raw_threshold else None for value in row
        )
        return n_test, verdict, crossed, ([row] if record else None)
    engine = _SequentialEngine(types, cfg.sequential_config())
    stream = _stream_indices(source, test_seed, cfg.effective_cap)
    rule = "smaller" if cfg.num_classes == 2 else "none"
    return engine.run(stream, rule, record=record)


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialTrace:
    """Run one fully traced trial; deterministic in ``(config, index)``."""
    stopping_time, verdict, crossed, rows = _run_one(cfg, trial_index, record=True)
    return _trace_from(rows, stopping_time, verdict, crossed, cfg.num_classes)


def _summaries_serial(
    cfg: ExperimentConfig, indices: range
) -> list[tuple[int, str, int | None]]:
    out = []
    for trial_index in indices:
        stopping_time, verdict, _, _ = _run_one(cfg, trial_index, record=False)
        out.append((stopping_time, verdict.kind, verdict.index))
    return out


def _summary_batch(args) -> list[tuple[int, str, int | None]]:
    cfg, start, stop = args
    return _summaries_serial(cfg, range(start, stop))


def _collect_summaries(
    cfg: ExperimentConfig, workers: int
) -> list[tuple[int, str, int | None]]:
    trials = cfg.trials
    if workers <= 1 or trials < 4 * workers:
        return _summaries_serial(cfg, range(trials))
    block = max(1, -(-trials // (workers * 4)))
    spans = [
        (cfg, start, min(start + block, trials)) for start in range(0, trials, block)
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        batches = list(pool.map(_summary_batch, spans))
    out: list[tuple[int, str, int | None]] = []
    for batch in batches:
        out.extend(batch)
    return out


def _predicted_mean_t(cfg: ExperimentConfig, hypothesis: int) -> float:
    if cfg.test_kind == "gutman":
        return float(cfg.n_test)
    # the test waits for every competitor score to cross, so the
    # smallest root (the slowest crossing) sets the expected length
    slowest = math.inf
    source = cfg.distributions[hypothesis]
    for j, other in enumerate(cfg.distributions):
        if j == hypothesis:
            continue
        try:
            root = solve_fixed_point(other, source, cfg.gamma).theta_star
        except NoSolution:
            continue
        slowest = min(slowest, root)
    return cfg.train_len / slowest if math.isfinite(slowest) else math.nan


def _aggregate(
    cfg: ExperimentConfig,
    hypothesis: int,
    summaries: list[tuple[int, str, int | None]],
) -> HypothesisReport:
    trials = len(summaries)
    errors = 0
    nodecisions = 0
    total_t = 0
    total_t_sq = 0
    min_t = None
    max_t = None
    for stopping_time, kind, index in summaries:
        correct = kind == "class" and index == hypothesis
        if not correct:
            errors += 1
        if kind != "class":
            nodecisions += 1
        total_t += stopping_time
        total_t_sq += stopping_time * stopping_time
        min_t = stopping_time if min_t is None else min(min_t, stopping_time)
        max_t = stopping_time if max_t is None else max(max_t, stopping_time)
    rate = errors / trials
    mean_t = total_t / trials
    if trials > 1:
        variance = max(0.0, (total_t_sq - trials * mean_t * mean_t) / (trials - 1))
    else:
        variance = 0.0
    stddev = math.sqrt(variance)
    return HypothesisReport(
        hypothesis=hypothesis,
        trials=trials,
        errors=errors,
        nodecisions=nodecisions,
        error_rate=rate,
        error_half_width=_Z95 * math.sqrt(rate * (1.0 - rate) / trials),
        mean_T=mean_t,
        stddev_T=stddev,
        mean_T_half_width=_Z95 * stddev / math.sqrt(trials),
        min_T=min_t,
        max_T=max_t,
        predicted_mean_T=_predicted_mean_t(cfg, hypothesis),
        nodecision_rate=nodecisions / trials,
    )


def estimate(cfg: ExperimentConfig, workers: int = 1) -> SimulationReport:
    """Estimate error rates and stopping times over all configured trials.

    With ``true_class`` unset, every hypothesis is swept with the same trial
    budget and the prior-weighted error rate is reported alongside.
    """
    start = time.perf_counter()
    if cfg.true_class is None:
        hypotheses = list(range(cfg.num_classes))
    else:
        hypotheses = [cfg.true_class]
    rows = []
    for hypothesis in hypotheses:
        cfg_h = replace(cfg, true_class=hypothesis)
        summaries = _collect_summaries(cfg_h, workers)
        rows.append(_aggregate(cfg_h, hypothesis, summaries))
    bayes = None
    if len(hypotheses) == cfg.num_classes:
        priors = cfg.effective_priors
        bayes = math.fsum(priors[r.hypothesis] * r.error_rate for r in rows)
    return SimulationReport(
        rows=tuple(rows),
        bayes_error_rate=bayes,
        master_seed=cfg.master_seed,
        wall_time=time.perf_counter() - start,
    )


def gutman_reference_run(
    cfg: ExperimentConfig, n_test: int, workers: int = 1
) -> SimulationReport:
    """Fixed-length benchmark on the same harness, stopping at ``n_test``.

    When the configuration carries no threshold the balanced one is used:
    the crossing point that equalizes the two Bayes error exponents at
    ``alpha = train_len / n_test``.
    """
    lam = cfg.gutman_lambda
    mode = cfg.gutman_mode
    if lam is None:
        alpha = cfg.train_len / n_test
        if cfg.num_classes == 2:
            lam = gutman_bayes_exponent(alpha, *cfg.distributions)
        else:
            lam = bayes_multiclass_gutman(list(cfg.distributions), alpha)
        mode = "scaled"
    fixed = replace(
        cfg, test_kind="gutman", n_test=n_test, gutman_lambda=lam, gutman_mode=mode
    )
    return estimate(fixed, workers=workers)


def exponent_probe(
    cfg: ExperimentConfig, n_grid: list[int], workers: int = 1
) -> ProbeReport:
    """Measure the error-rate decay of the sequential test across ``n_grid``.

    For each training length the error rate and its two normalized
    exponents are reported: per expected test sample and per training
    sample.  Lengths with zero observed errors are kept in the table but
    flagged unusable; the regression slope of ``-ln(rate)`` against the
    training length uses the usable rows only and needs at least two.
    """
    if cfg.true_class is None:
        raise ValidationError("the probe needs a configured true class")
    rows = []
    for train_len in n_grid:
        cfg_n = replace(cfg, train_len=train_len, cap=None)
        report = estimate(cfg_n, workers=workers).rows[0]
        usable = report.errors > 0
        if usable:
            neg_log = -math.log(report.error_rate)
            per_sample = neg_log / report.mean_T
            per_train = neg_log / train_len
        else:
            per_sample = math.nan
            per_train = math.nan
        rows.append(
            ProbeRow(
                train_len=train_len,
                trials=report.trials,
                errors=report.errors,
                error_rate=report.error_rate,
                mean_T=report.mean_T,
                exponent_per_sample=per_sample,
                exponent_per_train=per_train,
                usable=usable,
            )
        )
    points = [(r.train_len, -math.log(r.error_rate)) for r in rows if r.usable]
    if len(points) < 2:
        raise InsufficientErrors(
            "fewer than two training lengths produced any errors"
        )
    xs = np.array([p[0] for p in points])
    ys = np.array([p[1] for p in points])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return ProbeReport(rows=tuple(rows), slope=slope)
