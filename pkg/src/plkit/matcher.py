"""Term similarity and requirement-to-feature matching.

The term-level score knows five cases: identical terms, homonyms (scored
1-a), a hyponym of the other term (1-b), a hyperonym of it (b), anything
else 0. Bag-level scores are the adapted Dice, Jaccard and Cosine ratios
over best-match sums; each sum walks one bag and takes, per term, the best
score against the other bag with the walked term as first argument.

All scores are exact rationals except Cosine over bags whose size product
is not a perfect square, which falls back to float (>= 12 significant
digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .model import FeatureModel
from .terms import TermBag


class EmptyTermBagError(ValueError):
    """A bag participating in matching has no terms."""


@dataclass(frozen=True)
class Lexicon:
    """Term-relation store with the homonym/hyponym weights a and b."""

    a: Fraction = Fraction(1, 10)
    b: Fraction = Fraction(1, 4)
    homonyms: frozenset = frozenset()     # of frozenset({t1, t2})
    hyponym_of: frozenset = frozenset()   # of (child, parent)

    def __post_init__(self):
        for name, value in (("a", self.a), ("b", self.b)):
            if not (0 < value < 1):
                raise ValueError(f"parameter {name} must lie strictly between 0 and 1, got {value}")
        for child, parent in self.hyponym_of:
            if frozenset((child, parent)) in self.homonyms:
                raise ValueError(f"{child}/{parent} cannot be both homonyms and hyponyms")


def sim(t1: str, t2: str, lexicon: Lexicon) -> Fraction:
    """Similarity of two normalized terms under the lexicon."""
    if t1 == t2:
        return Fraction(1)
    if frozenset((t1, t2)) in lexicon.homonyms:
        return 1 - lexicon.a
    if (t1, t2) in lexicon.hyponym_of:
        return 1 - lexicon.b
    if (t2, t1) in lexicon.hyponym_of:
        return lexicon.b
    return Fraction(0)


def _require_bags(a: TermBag, b: TermBag):
    if not a or not b:
        raise EmptyTermBagError("similarity ratios need non-empty term bags")


def _best_match_sum(walked: TermBag, other: TermBag, lexicon: Lexicon) -> Fraction:
    return sum((max(sim(t, u, lexicon) for u in other) for t in walked), Fraction(0))


def dice(a: TermBag, b: TermBag, lexicon: Lexicon) -> Fraction:
    _require_bags(a, b)
    total = _best_match_sum(a, b, lexicon) + _best_match_sum(b, a, lexicon)
    return total / (len(a) + len(b))


def _mean_match(a: TermBag, b: TermBag, lexicon: Lexicon) -> Fraction:
    return (_best_match_sum(a, b, lexicon) + _best_match_sum(b, a, lexicon)) / 2


def jaccard(a: TermBag, b: TermBag, lexicon: Lexicon) -> Fraction:
    _require_bags(a, b)
    m = _mean_match(a, b, lexicon)
    return m / (len(a) + len(b) - m)


def cosine(a: TermBag, b: TermBag, lexicon: Lexicon):
    """Mean best-match sum over sqrt(|A|*|B|); exact when the product is a
    perfect square, float otherwise. May exceed 1 for lopsided bags; the raw
    value is reported unclamped."""
    _require_bags(a, b)
    m = _mean_match(a, b, lexicon)
    product = len(a) * len(b)
    root = math.isqrt(product)
    if root * root == product:
        return m / root
    return float(m) / math.sqrt(product)


METRICS = {"dice": dice, "jaccard": jaccard, "cosine": cosine}


@dataclass(frozen=True)
class MatchEntry:
    requirement: str
    feature: str
    metric: str
    score: object  # Fraction, or float for inexact cosine


@dataclass(frozen=True)
class Classification:
    kind: str  # "matched" | "ambiguous" | "unmatched"
    features: tuple = ()


@dataclass(frozen=True)
class MatchReport:
    model: str
    metric: str
    a: Fraction
    b: Fraction
    threshold: Fraction
    gap: Fraction
    entries: tuple = ()
    classification: dict = field(default_factory=dict)

    def sorted_entries(self):
        """Entries ordered by (requirement, score descending, feature)."""
        return sorted(self.entries, key=lambda e: (e.requirement, -e.score, e.feature))

    def capitalization_candidates(self):
        """Requirement ids the product line does not cover yet."""
        return [rid for rid, c in self.classification.items() if c.kind == "unmatched"]


def match(requirements, model: FeatureModel, lexicon: Lexicon, metric: str = "dice",
          threshold_match: Fraction = Fraction(1, 2),
          threshold_gap: Fraction = Fraction(1, 10)) -> MatchReport:
    """Score every requirement against every feature and classify each
    requirement as matched, ambiguous, or unmatched (a capitalization
    candidate).

    Matched needs the best score to reach the match threshold and to exceed
    the runner-up by at least the gap; several features strictly within the
    gap of the best make the requirement ambiguous.
    """
    if not (0 <= threshold_match <= 1) or not (0 <= threshold_gap <= 1):
        raise ValueError("thresholds must lie in [0, 1]")
    try:
        score_fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of: " + ", ".join(METRICS)) from None
    for f in model.features:
        if not f.terms:
            raise EmptyTermBagError(f"feature {f.id} has an empty term bag; add a `terms` directive")

    entries = []
    classification = {}
    for req in requirements:
        scores = []
        for f in model.features:
            score = score_fn(req.terms, f.terms, lexicon)
            scores.append((f.id, score))
            entries.append(MatchEntry(req.id, f.id, metric, score))
        best = max(score for _, score in scores)
        if best < threshold_match:
            classification[req.id] = Classification("unmatched")
            continue
        contenders = tuple(fid for fid, score in scores if best - score < threshold_gap)
        if len(contenders) == 1:
            classification[req.id] = Classification("matched", contenders)
        else:
            classification[req.id] = Classification("ambiguous", contenders)
    return MatchReport(
        model=model.name, metric=metric, a=lexicon.a, b=lexicon.b,
        threshold=Fraction(threshold_match), gap=Fraction(threshold_gap),
        entries=tuple(entries), classification=classification,
    )
