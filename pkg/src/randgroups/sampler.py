"""Sampling random presentations in the Gromov density model.

A random presentation of density d at length l over rank n has
max(1, floor((2n-1)^(d*l))) relators, each drawn uniformly and
independently (with replacement) from the reduced words of length l.
Draws that are not cyclically reduced are rejected and redrawn, since
relators live on diagram faces as cyclic words; the resampling count is
logged at DEBUG level.

Randomness comes from numpy's counter-based Philox generator.  Streams
are derived with SeedSequence(entropy=seed, spawn_key=path), so disjoint
(cell, trial) paths give independent, reproducible streams.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .words import Word, Presentation, is_cyclically_reduced

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DensityParams:
    rank: int
    density: Fraction
    length: int
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "density", Fraction(self.density))
        if self.rank < 2:
            raise ValueError("rank must be >= 2")
        if not (0 <= self.density <= 1):
            raise ValueError("density must lie in [0, 1]")
        if self.length < 1:
            raise ValueError("length must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")


def stream(seed: int, *path: int) -> np.random.Generator:
    """Philox stream for a (seed, path) pair; disjoint paths are independent."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


def reduced_word_count(n: int, l: int) -> int:
    """|S_l| = 2n * (2n-1)^(l-1), the number of reduced words of length l."""
    if n < 2 or l < 1:
        raise ValueError("need n >= 2 and l >= 1")
    return 2 * n * (2 * n - 1) ** (l - 1)


def _floor_root(x: int, k: int) -> int:
    """floor(x**(1/k)) for nonnegative integers, by binary search."""
    if x < 0 or k < 1:
        raise ValueError("need x >= 0 and k >= 1")
    if x in (0, 1) or k == 1:
        return x
    hi = 1 << (x.bit_length() // k + 1)
    lo = 0
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid**k <= x:
            lo = mid
        else:
            hi = mid
    return lo


def relator_count(params: DensityParams) -> int:
    """max(1, floor((2n-1)^(d*l))), in exact integer arithmetic.

    For d*l = p/q the value is floor(((2n-1)^p)^(1/q)), computed with an
    exact integer k-th root, so no floating point is involved even when
    the exponent is not an integer.
    """
    base = 2 * params.rank - 1
    e = params.density * params.length
    p, q = e.numerator, e.denominator
    return max(1, _floor_root(base**p, q))


def sample_reduced_word(n: int, l: int, rng: np.random.Generator) -> Word:
    """A uniform element of S_l: first letter uniform over 2n signed
    generators, each next letter uniform over the 2n-1 that do not cancel."""
    if n < 2 or l < 1:
        raise ValueError("need n >= 2 and l >= 1")
    # signed alphabet laid out as 1..n, -1..-n
    signed = list(range(1, n + 1)) + list(range(-1, -n - 1, -1))
    position = {g: i for i, g in enumerate(signed)}
    first = int(rng.integers(0, 2 * n))
    draws = rng.integers(0, 2 * n - 1, size=l - 1) if l > 1 else []
    out = [signed[first]]
    for t in range(l - 1):
        choice = int(draws[t])
        # skip the inverse of the previous letter
        if choice >= position[-out[-1]]:
            choice += 1
        out.append(signed[choice])
    return Word(out)


def sample_presentation(params: DensityParams, rng: np.random.Generator | None = None) -> Presentation:
    """A random presentation for the given density parameters.

    Deterministic in params (including seed); an explicit rng stream may
    be supplied for derived per-trial sampling.  Words that are freely
    but not cyclically reduced are redrawn.
    """
    if rng is None:
        rng = stream(params.seed)
    count = relator_count(params)
    relators = []
    resamples = 0
    while len(relators) < count:
        w = sample_reduced_word(params.rank, params.length, rng)
        if params.length >= 2 and not is_cyclically_reduced(w):
            resamples += 1
            continue
        relators.append(w)
    if resamples:
        log.debug(
            "resampled %d non-cyclically-reduced words (rank=%d length=%d seed=%d)",
            resamples, params.rank, params.length, params.seed,
        )
    return Presentation(params.rank, relators, params.length)
