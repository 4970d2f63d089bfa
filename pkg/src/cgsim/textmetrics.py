"""Pairwise string and vector similarity primitives.

All functions are pure. Strings are expected in canonical form (see
graph.canonical_name); tokenization is plain whitespace splitting with no
stemming or stop-word removal, since variable names are short phrases.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

from .errors import InvalidNameError, VectorDimensionError, ZeroVectorError

Vector = Sequence[float]


def tokenize(name: str) -> tuple[str, ...]:
    return tuple(name.split())


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance with unit insert/delete/substitute costs."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,          # delete from a
                current[j - 1] + 1,       # insert into a
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def fuzzy_ratio(a: str, b: str) -> float:
    """1 - levenshtein(a, b) / max(|a|, |b|); 1 when both strings are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Sequence[str], reference: Sequence[str]) -> float:
    """Sentence-level n-gram overlap score in [0, 1].

    Geometric mean of modified n-gram precisions for n = 1..min(4, |candidate|)
    with uniform weights, times a brevity penalty exp(1 - |ref|/|cand|) applied
    only when the candidate is shorter. Zero-match precisions for n >= 2 are
    smoothed by adding 1 to numerator and denominator; the score is defined 0
    whenever the unigram precision is 0.
    """
    if not candidate or not reference:
        raise InvalidNameError("token sequences must be non-empty")
    max_n = min(4, len(candidate))
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand_counts = _ngram_counts(candidate, n)
        ref_counts = _ngram_counts(reference, n)
        matches = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        total = sum(cand_counts.values())
        if matches == 0:
            if n == 1:
                return 0.0
            matches, total = 1, total + 1
        log_sum += math.log(matches / total)
    brevity = 1.0
    if len(candidate) < len(reference):
        brevity = math.exp(1.0 - len(reference) / len(candidate))
    return brevity * math.exp(log_sum / max_n)


def _check_dims(u: Vector, v: Vector) -> None:
    if len(u) != len(v):
        raise VectorDimensionError(f"dimension mismatch: {len(u)} vs {len(v)}")


def cosine(u: Vector, v: Vector) -> float:
    """cos of the angle between u and v, clamped into [-1, 1]."""
    _check_dims(u, v)
    dot = math.fsum(x * y for x, y in zip(u, v))
    nu = math.sqrt(math.fsum(x * x for x in u))
    nv = math.sqrt(math.fsum(y * y for y in v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("cosine is undefined for zero-norm vectors")
    return max(-1.0, min(1.0, dot / (nu * nv)))


def neg_euclidean(u: Vector, v: Vector) -> float:
    """Negated straight-line distance; 0 only when u == v."""
    _check_dims(u, v)
    return -math.sqrt(math.fsum((x - y) ** 2 for x, y in zip(u, v)))
