"""Piece detection, C'(lambda) verification, and Dehn's algorithm.

The symmetrized set of a presentation is the closure of its relators
under cyclic rotation and inversion.  A piece is a word occurring at two
distinct cyclic occurrences (relator, reading direction, cyclic start);
reading the same stretch of the same relator from a rotated start is the
same occurrence and does not count.  C'(lambda) holds when every piece
is strictly shorter than lambda * length.

Dehn's algorithm repeatedly replaces a subword u with |u| > l/2 of some
symmetrized element r = u v by v^-1.  On C'(1/6) presentations this
decides the word problem (Greendlinger).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .sampler import relator_count, DensityParams
from .words import Word, Presentation, free_reduce, invert, rotate


class Occurrence(NamedTuple):
    """A cyclic occurrence: relator index, reading direction, cyclic start."""

    relator: int
    direction: int  # +1 reads the relator, -1 its inverse
    start: int


@dataclass(frozen=True)
class SymmetrizedSet:
    """All distinct rotations of the relators and their inverses."""

    elements: tuple[Word, ...]
    origin: dict  # element -> (relator index, rotation, inverted?)

    def __len__(self) -> int:
        return len(self.elements)


@lru_cache(maxsize=256)
def symmetrize(p: Presentation) -> SymmetrizedSet:
    elements: list[Word] = []
    origin: dict[Word, tuple[int, int, bool]] = {}
    for j, r in enumerate(p.relators):
        for inverted, base in ((False, r), (True, invert(r))):
            for k in range(len(base)):
                w = rotate(base, k)
                if w not in origin:
                    origin[w] = (j, k, inverted)
                    elements.append(w)
    return SymmetrizedSet(tuple(elements), origin)


@dataclass
class PieceReport:
    max_piece_length: int
    witnesses: list[tuple[Word, Occurrence, Occurrence]]


def _readings(p: Presentation) -> list[tuple[Occurrence, tuple[int, ...]]]:
    """Doubled cyclic readings; subwords of length <= l starting in [0, l)
    of reading (j, e) are exactly the cyclic occurrences."""
    out = []
    for j, r in enumerate(p.relators):
        for e, base in ((1, tuple(r)), (-1, tuple(invert(r)))):
            out.append((Occurrence(j, e, 0), base + base))
    return out


def _pieces_of_length(p: Presentation, k: int) -> dict[tuple[int, ...], list[Occurrence]]:
    """All length-k words with >= 2 distinct cyclic occurrences."""
    l = p.length
    seen: dict[tuple[int, ...], list[Occurrence]] = {}
    for (occ0, doubled) in _readings(p):
        for s in range(l):
            seen.setdefault(doubled[s : s + k], []).append(occ0._replace(start=s))
    return {w: occs for w, occs in seen.items() if len(occs) >= 2}


def max_piece_length(p: Presentation) -> PieceReport:
    """Exact maximum piece length with witnesses, 0 if no piece exists.

    Piece lengths are downward closed (a prefix of a piece is a piece at
    the same occurrences), so the maximum is found by binary search over
    k, hashing all cyclic k-grams at each step.
    """
    if not p.relators:
        return PieceReport(0, [])
    l = p.length
    if not _pieces_of_length(p, 1):
        return PieceReport(0, [])
    lo, hi = 1, l  # piece of length lo exists; none of length hi+1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _pieces_of_length(p, mid):
            lo = mid
        else:
            hi = mid - 1
    witnesses = [
        (Word(w), occs[0], occs[1]) for w, occs in sorted(_pieces_of_length(p, lo).items())
    ]
    return PieceReport(lo, witnesses)


def satisfies_cprime(p: Presentation, lam) -> bool:
    """True iff every piece is strictly shorter than lam * length.

    A presentation with no relators satisfies every C'(lambda).
    """
    lam = Fraction(lam)
    if not p.relators:
        return True
    return max_piece_length(p).max_piece_length < lam * p.length


@lru_cache(maxsize=256)
def _cprime_sixth(p: Presentation) -> bool:
    return satisfies_cprime(p, Fraction(1, 6))


class NotSmallCancellation(ValueError):
    pass


def _require_sixth(p: Presentation) -> None:
    if not _cprime_sixth(p):
        raise NotSmallCancellation("not C'(1/6)")


class DehnStep(NamedTuple):
    position: int          # start of the replaced subword in the current word
    element: Word          # the symmetrized element r = u * v that was used
    origin: tuple          # (relator index, rotation, inverted?) of element
    removed: int           # |u|, the length of the replaced subword


@lru_cache(maxsize=256)
def _dehn_index(p: Presentation):
    """Map each symmetrized element's half-plus-one prefix to candidates."""
    sym = symmetrize(p)
    half = p.length // 2 + 1
    index: dict[tuple[int, ...], list[Word]] = {}
    for el in sym.elements:
        index.setdefault(tuple(el[:half]), []).append(el)
    return half, index, sym.origin


def _dehn_step(w: Word, p: Presentation):
    """Leftmost, then longest subword u with |u| > l/2 extending to an
    element u*v; returns (position, element, |u|) or None."""
    half, index, _ = _dehn_index(p)
    tw = tuple(w)
    n = len(tw)
    for i in range(n - half + 1):
        candidates = index.get(tw[i : i + half])
        if not candidates:
            continue
        best = None
        for el in candidates:
            k = half
            m = min(len(el), n - i)
            while k < m and el[k] == tw[i + k]:
                k += 1
            if best is None or k > best[1]:
                best = (el, k)
        el, k = best
        return i, el, k
    return None


def dehn_reduce(w: Word, p: Presentation) -> tuple[Word, list[DehnStep]]:
    """Run Dehn's algorithm to a fixpoint; returns the final word and trace.

    Requires C'(1/6).  Each step strictly decreases the length, scanning
    for the leftmost, then longest, more-than-half subword of a
    symmetrized element.
    """
    _require_sixth(p)
    _, _, origin = _dehn_index(p) if p.relators else (0, {}, {})
    cur = free_reduce(w)
    trace: list[DehnStep] = []
    while p.relators:
        hit = _dehn_step(cur, p)
        if hit is None:
            break
        i, el, k = hit
        v = Word(el[k:])
        trace.append(DehnStep(i, el, origin[el], k))
        cur = free_reduce(Word(cur[:i]).concat(invert(v)).concat(Word(cur[i + k :])))
    return cur, trace


def is_trivial(w: Word, p: Presentation) -> bool:
    """Whether w = 1 in the presented group; complete on C'(1/6) input."""
    final, _ = dehn_reduce(w, p)
    return len(final) == 0


def equal_in_group(u: Word, v: Word, p: Presentation) -> bool:
    return is_trivial(u.concat(invert(v)), p)


def first_moment_piece_bound(n: int, d, l: int, lam) -> float:
    """N^2 * l^2 * (2n-1)^(-ceil(lam*l)) with N the relator count: a
    Markov-style estimate for the expected number of forbidden shared
    subwords, used as a statistical oracle."""
    d = Fraction(d)
    lam = Fraction(lam)
    N = relator_count(DensityParams(n, d, l, 0))
    k = -(-(lam * l).numerator // (lam * l).denominator)  # ceil
    return float(Fraction(N * N * l * l, (2 * n - 1) ** k))
