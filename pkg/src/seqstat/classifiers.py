"""Fixed-length and sequential classifiers driven by empirical types.

Both families score a test sequence against each training sequence with the
weighted divergence ``n * gjs(T_train, T_test, N / n)`` where ``N`` is the
training length and ``n`` the number of test symbols seen so far.  The
fixed-length rule thresholds the score once at a fixed ``n``; the sequential
rule feeds symbols one at a time and stops as soon as all but one class has
been ruled out, declaring the survivor.

Scores are recomputed from integer counts at every step.  The per-class
score decomposes over symbols as

    sum_x [ N * t(x) * ln(t(x) / m(x)) + c(x) * ln(p(x) / m(x)) ]

with ``t`` the training frequencies, ``c`` the test counts, ``p = c / n``
and ``m(x) = (C(x) + c(x)) / (N + n)`` built from raw counts, so a test
type identical to the training type scores exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    Infeasible,
    LengthMismatch,
    NegativeAlpha,
    NonPositiveGamma,
    SizeMismatch,
    SteppedAfterStop,
    StreamExhausted,
)
from .probability import Alphabet, EmpiricalType, Symbol, empirical_type
from .divergence import gjs

_CLASS = "class"
_REJECT = "reject"
_NO_DECISION = "no_decision"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a classification rule."""

    kind: str
    index: int | None = None

    @classmethod
    def of_class(cls, index: int) -> "Verdict":
        return cls(_CLASS, index)

    @classmethod
    def rejected(cls) -> "Verdict":
        return cls(_REJECT)

    @classmethod
    def undecided(cls) -> "Verdict":
        return cls(_NO_DECISION)

    @property
    def is_class(self) -> bool:
        return self.kind == _CLASS

    @property
    def is_reject(self) -> bool:
        return self.kind == _REJECT

    @property
    def is_no_decision(self) -> bool:
        return self.kind == _NO_DECISION

    def label(self) -> str:
        if self.is_class:
            return f"class_{self.index + 1}"
        return self.kind


@dataclass(frozen=True)
class GutmanConfig:
    """Fixed-length test parameters.

    ``threshold_mode`` selects whether ``lam`` is compared to the raw score
    ``gjs(T_train, T_test, alpha)`` or to its ``1/alpha``-scaled version;
    scaled mode with ``lam`` equals raw mode with ``lam * alpha``.
    """

    alpha: float
    lam: float
    threshold_mode: str = "raw"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise NegativeAlpha(f"alpha must be finite and > 0, got {self.alpha}")
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise Infeasible(f"threshold must be finite and >= 0, got {self.lam}")
        if self.threshold_mode not in ("raw", "scaled"):
            raise Infeasible(f"unknown threshold mode {self.threshold_mode!r}")

    @property
    def raw_threshold(self) -> float:
        if self.threshold_mode == "raw":
            return self.lam
        return self.lam * self.alpha


@dataclass(frozen=True)
class SequentialConfig:
    """Sequential test parameters; ``cap`` defaults to ``train_len ** 2``."""

    gamma: float
    train_len: int
    cap: int | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise NonPositiveGamma(f"gamma must be finite and > 0, got {self.gamma}")
        if self.train_len < 1:
            raise SizeMismatch(f"training length must be >= 1, got {self.train_len}")
        if self.cap is None:
            object.__setattr__(self, "cap", self.train_len * self.train_len)
        if self.cap < self.train_len:
            raise SizeMismatch(f"cap {self.cap} is below the training length")

    @property
    def threshold(self) -> float:
        """Stopping threshold gamma * N on the score scale."""
        return self.gamma * self.train_len


@dataclass(frozen=True)
class TrialTrace:
    """Complete record of one sequential run."""

    scores: np.ndarray
    stopping_time: int
    verdict: Verdict
    crossing_times: tuple[int | None, ...]


def score(t_train: EmpiricalType, t_test: EmpiricalType) -> float:
    """Test statistic ``n * gjs(T_train, T_test, N / n)`` from two types."""
    if t_train.alphabet != t_test.alphabet:
        raise AlphabetMismatch("types live on different alphabets")
    n = t_test.total
    big_n = t_train.total
    freqs = tuple(c / big_n for c in t_train.counts)
    return _score_one(t_train.counts, freqs, t_test.counts, n, big_n)


def _score_one(
    train_counts: Sequence[int],
    train_freqs: Sequence[float],
    counts: Sequence[int],
    n: int,
    big_n: int,
) -> float:
    total = big_n + n
    inv_n = 1.0 / n
    s = 0.0
    for big_c, t, c in zip(train_counts, train_freqs, counts):
        if big_c == 0 and c == 0:
            continue
        m = (big_c + c) / total
        if big_c:
            s += big_n * t * math.log(t / m)
        if c:
            s += c * math.log(c * inv_n / m)
    return s


class _SequentialEngine:
    """Shared scorer and stopping logic for the sequential tests.

    ``simultaneous`` picks the verdict when the final step rules out every
    class at once: ``"smaller"`` (binary rule) declares the class with the
    strictly smaller score and gives up on an exact tie, ``"none"`` gives up
    outright.
    """

    def __init__(self, train_types: Sequence[EmpiricalType], config: SequentialConfig):
        big_n = config.train_len
        for t in train_types:
            if t.total != big_n:
                raise LengthMismatch(
                    f"training sequence of length {t.total}, expected {big_n}"
                )
        self.config = config
        self.big_n = big_n
        self.threshold = config.threshold
        self.num_classes = len(train_types)
        self.k = train_types[0].alphabet.size
        self.train_counts = [t.counts for t in train_types]
        self.train_freqs = [tuple(c / big_n for c in t.counts) for t in train_types]
        self.counts = [0] * self.k
        self.n = 0
        self.scores = [0.0] * self.num_classes
        self.crossed: list[int | None] = [None] * self.num_classes

    def step(self, symbol_index: int) -> list[float]:
        self.counts[symbol_index] += 1
        self.n += 1
        n = self.n
        self.scores = [
            _score_one(bc, tf, self.counts, n, self.big_n)
            for bc, tf in zip(self.train_counts, self.train_freqs)
        ]
        for i, s in enumerate(self.scores):
            if self.crossed[i] is None and s >= self.threshold:
                self.crossed[i] = n
        return self.scores

    def ruled_out(self) -> int:
        return sum(1 for c in self.crossed if c is not None)

    def resolve(self, simultaneous: str) -> Verdict:
        """Verdict once at least ``num_classes - 1`` classes have crossed."""
        survivors = [i for i, c in enumerate(self.crossed) if c is None]
        if len(survivors) == 1:
            return Verdict.of_class(survivors[0])
        if simultaneous == "smaller" and self.num_classes == 2:
            s0, s1 = self.scores
            if s0 < s1:
                return Verdict.of_class(0)
            if s1 < s0:
                return Verdict.of_class(1)
        return Verdict.undecided()

    def run(
        self,
        stream: Iterator[int],
        simultaneous: str,
        record: bool = False,
    ) -> tuple[int, Verdict, tuple[int | None, ...], list[list[float]] | None]:
        rows: list[list[float]] | None = [] if record else None
        cap = self.config.cap
        while True:
            try:
                idx = next(stream)
            except StopIteration:
                partial = _trace_from(rows, self.n, Verdict.undecided(), self.crossed, self.num_classes)
                raise StreamExhausted(
                    f"test stream ended after {self.n} symbols, before a verdict",
                    trace=partial,
                ) from None
            scores = self.step(idx)
            if record:
                rows.append(list(scores))
            if self.ruled_out() >= self.num_classes - 1:
                return self.n, self.resolve(simultaneous), tuple(self.crossed), rows
            if self.n >= cap:
                return self.n, Verdict.undecided(), tuple(self.crossed), rows


def _trace_from(
    rows: list[list[float]] | None,
    stopping_time: int,
    verdict: Verdict,
    crossed: Sequence[int | None],
    num_classes: int,
) -> TrialTrace:
    if rows is None:
        matrix = np.zeros((0, num_classes))
    else:
        matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), num_classes)
    return TrialTrace(matrix, stopping_time, verdict, tuple(crossed))


# --------------------------------------------------------------------------
# fixed-length rules
# --------------------------------------------------------------------------

def gutman_binary(t1: EmpiricalType, ty: EmpiricalType, cfg: GutmanConfig) -> Verdict:
    """Accept class 1 iff its score is at or below the threshold."""
    if t1.alphabet != ty.alphabet:
        raise AlphabetMismatch("types live on different alphabets")
    value = gjs(t1.as_distribution(), ty.as_distribution(), cfg.alpha)
    if value <= cfg.raw_threshold:
        return Verdict.of_class(0)
    return Verdict.of_class(1)


def gutman_multiclass(
    types: Sequence[EmpiricalType], ty: EmpiricalType, cfg: GutmanConfig
) -> Verdict:
    """Declare the unique class scoring at or below the threshold, else reject."""
    if len(types) < 2:
        raise SizeMismatch("need at least two training types")
    ty_dist = ty.as_distribution()
    threshold = cfg.raw_threshold
    accepted = []
    for i, t in enumerate(types):
        if t.alphabet != ty.alphabet:
            raise AlphabetMismatch("types live on different alphabets")
        if gjs(t.as_distribution(), ty_dist, cfg.alpha) <= threshold:
            accepted.append(i)
    if len(accepted) == 1:
        return Verdict.of_class(accepted[0])
    return Verdict.rejected()


# --------------------------------------------------------------------------
# sequential rules
# --------------------------------------------------------------------------

@dataclass
class SequentialState:
    """Mutable state of the binary sequential test between steps."""

    config: SequentialConfig
    alphabet: Alphabet
    engine: _SequentialEngine = field(repr=False)
    verdict: Verdict | None = None

    @property
    def n(self) -> int:
        return self.engine.n

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(self.engine.scores)

    @property
    def crossed(self) -> tuple[int | None, ...]:
        return tuple(self.engine.crossed)


def seq_binary_start(
    x1: Sequence[Symbol],
    x2: Sequence[Symbol],
    cfg: SequentialConfig,
    alphabet: Alphabet,
) -> SequentialState:
    """Initialize the binary sequential test from two training sequences."""
    if len(x1) != cfg.train_len or len(x2) != cfg.train_len:
        raise LengthMismatch(
            f"training lengths ({len(x1)}, {len(x2)}) != configured {cfg.train_len}"
        )
    types = (empirical_type(x1, alphabet), empirical_type(x2, alphabet))
    engine = _SequentialEngine(types, cfg)
    return SequentialState(config=cfg, alphabet=alphabet, engine=engine)


def seq_binary_step(
    state: SequentialState, y: Symbol
) -> tuple[SequentialState, Verdict | None]:
    """Feed one test symbol; returns the verdict once the test stops.

    At the first step where a score reaches ``gamma * N`` the crossed class
    is ruled out and the other one declared.  When both cross on the same
    step the one with the strictly smaller score wins; an exact tie, or
    reaching the cap without a crossing, yields no decision.
    """
    if state.verdict is not None:
        raise SteppedAfterStop("the sequential test already delivered a verdict")
    engine = state.engine
    idx = state.alphabet.index_of(y)
    engine.step(idx)
    verdict: Verdict | None = None
    if engine.ruled_out() >= 1:
        verdict = engine.resolve("smaller")
    elif engine.n >= state.config.cap:
        verdict = Verdict.undecided()
    if verdict is not None:
        state.verdict = verdict
    return state, verdict


def seq_multiclass_run(
    train_sequences: Sequence[Sequence[Symbol]],
    stream: Iterable[Symbol],
    cfg: SequentialConfig,
    alphabet: Alphabet,
) -> TrialTrace:
    """Run the multiclass sequential test over a symbol stream.

    Classes are ruled out once their score has ever reached ``gamma * N``;
    the test stops when at most one class survives (or at the cap) and
    declares the survivor.  An empty survivor set or a cap hit yields no
    decision.  If the stream ends first, :class:`StreamExhausted` is raised
    with the partial trace attached.
    """
    if len(train_sequences) < 2:
        raise SizeMismatch("need at least two training sequences")
    types = [empirical_type(seq, alphabet) for seq in train_sequences]
    for seq in train_sequences:
        if len(seq) != cfg.train_len:
            raise LengthMismatch(
                f"training length {len(seq)} != configured {cfg.train_len}"
            )
    engine = _SequentialEngine(types, cfg)
    indexed = (alphabet.index_of(sym) for sym in stream)
    stopping_time, verdict, crossed, rows = engine.run(indexed, "none", record=True)
    return _trace_from(rows, stopping_time, verdict, crossed, engine.num_classes)
