"""Positive/negative sentiment aggregation and 1-5 star scaling.

Love and Wow count as positive, Sad and Angry as negative; Haha is excluded
as uncertain (it is used both genuinely and sarcastically), and Like and
Thankful never enter these sums.  Each post's positive and negative masses
are normalized over the four polar reactions, their difference is min-max
scaled onto [1, 5] using the training range, and the star value is also
snapped to the nearest 0.5 bin.  The resulting 4-component vectors
[positive, negative, star_disc, star_cont] feed the shared lexicon engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateRange, NonPositiveSigma, ZeroReactionTotal

POLARITY = {
    "love": "positive",
    "wow": "positive",
    "haha": "uncertain",
    "sad": "negative",
    "angry": "negative",
}

POSITIVE_REACTIONS = ("love", "wow")
NEGATIVE_REACTIONS = ("sad", "angry")
POLAR_REACTIONS = POSITIVE_REACTIONS + NEGATIVE_REACTIONS

STAR_MIN = 1.0
STAR_MAX = 5.0
STAR_BIN = 0.5


@dataclass(frozen=True)
class StarSentiment:
    """Per-entry sentiment record: masses, aggregate, and star values.

    ``positive + negative == 1`` by construction, ``aggregate`` lies in
    [-1, 1], ``star`` in [1, 5], and ``star_disc`` is a multiple of 0.5.
    """

    positive: float
    negative: float
    aggregate: float
    star: float
    star_disc: float

    def vector(self) -> tuple[float, float, float, float]:
        """Components in the star4 schema order."""
        return (self.positive, self.negative, self.star_disc, self.star)


def star_normalize(counts) -> tuple[float, float]:
    """Positive and negative masses normalized over the four polar reactions."""
    love = counts.love
    wow = counts.wow
    sad = counts.sad
    angry = counts.angry
    total = love + wow + sad + angry
    if total <= 0:
        raise ZeroReactionTotal("no positive count among love/wow/sad/angry")
    return (love + wow) / total, (sad + angry) / total


def aggregate_sentiment(counts) -> float:
    """Positive minus negative mass, in [-1, 1]."""
    positive, negative = star_normalize(counts)
    return positive - negative


def star_scale(aggregate: float, corpus_min: float, corpus_max: float) -> float:
    """Min-max scale an aggregate sentiment onto [1, 5].

    The range comes from the training set; values outside it (test entries)
    are clamped so the result stays in [1, 5].
    """
    if corpus_max <= corpus_min:
        raise DegenerateRange(
            f"aggregate range [{corpus_min}, {corpus_max}] has zero width"
        )
    star = 4.0 * (aggregate - corpus_min) / (corpus_max - corpus_min) + 1.0
    return min(STAR_MAX, max(STAR_MIN, star))


def discretize_star(star: float) -> float:
    """Snap a star value in [1, 5] to the nearest 0.5; midpoints round up."""
    if not STAR_MIN <= star <= STAR_MAX:
        raise ValueError(f"star value {star} outside [1, 5]")
    snapped = STAR_MIN + STAR_BIN * math.floor((star - STAR_MIN) / STAR_BIN + 0.5)
    return min(STAR_MAX, snapped)


def star_sentiment(counts, corpus_min: float, corpus_max: float) -> StarSentiment:
    """Full sentiment record for one entry, scaled against a training range."""
    positive, negative = star_normalize(counts)
    star = star_scale(positive - negative, corpus_min, corpus_max)
    return StarSentiment(positive, negative, positive - negative, star, discretize_star(star))


def build_star_vectors(
    train_counts: Sequence,
) -> tuple[list[StarSentiment], float, float]:
    """Sentiment records for a training set plus its aggregate range.

    Requires at least two entries with distinct aggregates, otherwise the
    min-max scaling is undefined (DegenerateRange).
    """
    aggregates = [aggregate_sentiment(c) for c in train_counts]
    if not aggregates:
        raise DegenerateRange("empty training set")
    corpus_min = min(aggregates)
    corpus_max = max(aggregates)
    if corpus_max <= corpus_min:
        raise DegenerateRange("all training aggregates are equal")
    records = []
    for counts, aggregate in zip(train_counts, aggregates):
        positive, negative = star_normalize(counts)
        star = star_scale(aggregate, corpus_min, corpus_max)
        records.append(
            StarSentiment(positive, negative, aggregate, star, discretize_star(star))
        )
    return records, corpus_min, corpus_max


def gaussian_similarity(predicted: float, actual: float, sigma: float = 1.0) -> float:
    """Gaussian kernel similarity in (0, 1]; 1 at zero distance."""
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be positive, got {sigma}")
    d = predicted - actual
    return math.exp(-(d * d) / (2.0 * sigma * sigma))
