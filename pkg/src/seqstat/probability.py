"""Finite-alphabet distributions, empirical types, and reproducible sampling.

All logarithms in this package are natural, so every information quantity is
reported in nats.  Distributions are immutable: weights are validated once at
construction and the stored tuple is never mutated afterwards.

Sampling is counter-based.  Each stream is a Philox4x64 generator keyed by
``(master_seed, stream_index)``, and symbols are produced by inverse-CDF
lookup on the cumulative weights.  Two calls with the same :class:`SeedSpec`
therefore produce bit-identical output on any platform, and the draws of one
stream never depend on how many other streams exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    BadSeed,
    EmptySequence,
    NegativeWeight,
    NotNormalized,
    SizeMismatch,
    UnknownSymbol,
)

# Input weights may miss exact normalization by this much before rejection.
NORMALIZATION_TOLERANCE = 1e-9
# After renormalization the stored weights sum to 1 within this bound.
STORED_SUM_TOLERANCE = 1e-12
# A distribution is "interior" iff every stored weight is at least this.
INTERIOR_FLOOR = 1e-9

_UINT64_MAX = 2**64 - 1

Symbol = str | int


@dataclass(frozen=True)
class Alphabet:
    """Ordered collection of distinct symbol labels."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self) -> None:
        if len(self.symbols) == 0:
            raise SizeMismatch("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise SizeMismatch("alphabet symbols must be distinct")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index_of(self, symbol: Symbol) -> int:
        try:
            return _index_map(self.symbols)[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} is not in the alphabet") from None


_INDEX_CACHE: dict[tuple[Symbol, ...], dict[Symbol, int]] = {}


def _index_map(symbols: tuple[Symbol, ...]) -> dict[Symbol, int]:
    table = _INDEX_CACHE.get(symbols)
    if table is None:
        table = {s: i for i, s in enumerate(symbols)}
        _INDEX_CACHE[symbols] = table
    return table


@dataclass(frozen=True)
class Distribution:
    """Probability vector over an :class:`Alphabet`.

    Construction renormalizes inputs whose sum is within
    ``NORMALIZATION_TOLERANCE`` of 1 and rejects anything farther off.
    """

    alphabet: Alphabet
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != self.alphabet.size:
            raise SizeMismatch(
                f"{len(self.weights)} weights for an alphabet of size {self.alphabet.size}"
            )
        ws = [float(w) for w in self.weights]
        for w in ws:
            if w < 0.0:
                raise NegativeWeight(f"weight {w} is negative")
        total = math.fsum(ws)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise NotNormalized(f"weights sum to {total}, not 1")
        if total != 1.0:
            ws = [w / total for w in ws]
        object.__setattr__(self, "weights", tuple(ws))
        assert abs(math.fsum(self.weights) - 1.0) <= STORED_SUM_TOLERANCE

    @property
    def interior(self) -> bool:
        return min(self.weights) >= INTERIOR_FLOOR

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)


@dataclass(frozen=True)
class EmpiricalType:
    """Symbol counts of a finite sequence, kept exact as integers."""

    alphabet: Alphabet
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != self.alphabet.size:
            raise SizeMismatch(
                f"{len(self.counts)} counts for an alphabet of size {self.alphabet.size}"
            )
        cs = tuple(int(c) for c in self.counts)
        for c in cs:
            if c < 0:
                raise NegativeWeight(f"count {c} is negative")
        if sum(cs) == 0:
            raise EmptySequence("empirical type of an empty sequence")
        object.__setattr__(self, "counts", cs)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_distribution(self) -> Distribution:
        n = self.total
        return Distribution(self.alphabet, tuple(c / n for c in self.counts))


@dataclass(frozen=True)
class SeedSpec:
    """Key of one reproducible random stream."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed <= _UINT64_MAX):
            raise BadSeed(f"master_seed {self.master_seed} outside the 64-bit range")
        if not (0 <= self.stream_index <= _UINT64_MAX):
            raise BadSeed(f"stream_index {self.stream_index} outside the 64-bit range")


def make_distribution(weights: Sequence[float], alphabet: Alphabet) -> Distribution:
    """Validate and normalize a weight vector over ``alphabet``."""
    return Distribution(alphabet, tuple(weights))


def empirical_type(sequence: Iterable[Symbol], alphabet: Alphabet) -> EmpiricalType:
    """Count symbol occurrences of ``sequence`` under ``alphabet``."""
    table = _index_map(alphabet.symbols)
    counts = [0] * alphabet.size
    n = 0
    for sym in sequence:
        try:
            counts[table[sym]] += 1
        except KeyError:
            raise UnknownSymbol(f"symbol {sym!r} is not in the alphabet") from None
        n += 1
    if n == 0:
        raise EmptySequence("cannot build the empirical type of an empty sequence")
    return EmpiricalType(alphabet, tuple(counts))


def entropy(p: Distribution) -> float:
    """Shannon entropy in nats; zero-weight terms contribute nothing."""
    return -math.fsum(w * math.log(w) for w in p.weights if w > 0.0)


def kl(p: Distribution, q: Distribution) -> float:
    """Relative entropy D(p || q) in nats.

    Returns ``inf`` when ``p`` puts mass outside the support of ``q``.
    """
    if p.alphabet != q.alphabet:
        raise AlphabetMismatch("distributions live on different alphabets")
    acc = []
    for pw, qw in zip(p.weights, q.weights):
        if pw == 0.0:
            continue
        if qw == 0.0:
            return math.inf
        acc.append(pw * math.log(pw / qw))
    return math.fsum(acc)


def bit_generator(seed: SeedSpec) -> np.random.Generator:
    """Philox4x64 generator keyed by ``(master_seed, stream_index)``."""
    key = np.array([seed.master_seed, seed.stream_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_indices(p: Distribution, n: int, seed: SeedSpec) -> np.ndarray:
    """Draw ``n`` iid symbol indices from ``p`` on the stream ``seed``."""
    if n < 0:
        raise SizeMismatch(f"cannot draw {n} samples")
    rng = bit_generator(seed)
    return _indices_from_uniforms(p.as_array(), rng.random(n))


def _indices_from_uniforms(weights: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(weights)
    idx = np.searchsorted(cdf, uniforms, side="right")
    # the top of the cdf can land a hair under 1.0
    return np.minimum(idx, len(weights) - 1)


def sample_iid(p: Distribution, n: int, seed: SeedSpec) -> list[Symbol]:
    """Draw ``n`` iid symbols from ``p``, deterministically given ``seed``."""
    symbols = p.alphabet.symbols
    return [symbols[i] for i in sample_indices(p, n, seed)]
