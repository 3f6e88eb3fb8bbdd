"""Min-overlap evaluation metrics and the multi-split experiment runner.

Because actual and predicted reaction vectors are both unit-sum
distributions, per-reaction accuracy is their overlap ``min(N_r, M_r)``.
Recall divides the overlap by the actual mass and precision by the
predicted mass (each defined as 1 when its denominator is zero, so perfect
agreement on absence scores 1 and a one-sided miss scores 0 through F1).

``run_experiment`` repeats seeded random train/test partitions for every
requested train fraction, builds a lexicon on the train side, predicts the
test side, averages the per-entry metrics within a run, then averages
across runs.  The star model reports its positive/negative masses through
the same overlap metrics, plus a star-rating row whose accuracy is a
Gaussian kernel similarity and whose recall/precision/F1 are exact 0.5-bin
matches of the discretized star.
"""

from __future__ import annotations

import csv
import io
import json
import random
import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .engine import (
    STAR_SCHEMA,
    build_lexicon,
    get_schema,
    normalize,
    predict,
)
from .errors import DegenerateRange, EmptySide, SchemaMismatch, ZeroReactionTotal
from .star import discretize_star, gaussian_similarity, star_normalize, star_scale

METRICS = ("accuracy", "recall", "precision", "f1")
MODELS = ("core", "all", "star")
STAR_ROWS = ("positive", "negative", "star_rating")

DEFAULT_FRACTIONS = (0.95, 0.90, 0.80, 0.70, 0.50)


@dataclass(frozen=True)
class EntryMetrics:
    """Per-component accuracy/recall/precision/F1 for one test entry."""

    accuracy: tuple[float, ...]
    recall: tuple[float, ...]
    precision: tuple[float, ...]
    f1: tuple[float, ...]


def _overlap(actual: float, predicted: float) -> tuple[float, float, float, float]:
    a = min(actual, predicted)
    r = a / actual if actual > 0 else 1.0
    p = a / predicted if predicted > 0 else 1.0
    f1 = 0.0 if r + p == 0 else 2.0 * r * p / (r + p)
    return a, r, p, f1


def entry_metrics(
    actual: Sequence[float], predicted: Sequence[float]
) -> EntryMetrics:
    """Overlap metrics for one (actual, predicted) distribution pair."""
    if len(actual) != len(predicted):
        raise SchemaMismatch(
            f"vectors have different sizes: {len(actual)} vs {len(predicted)}"
        )
    accuracy, recall, precision, f1 = [], [], [], []
    for n, m in zip(actual, predicted):
        a, r, p, f = _overlap(n, m)
        accuracy.append(a)
        recall.append(r)
        precision.append(p)
        f1.append(f)
    return EntryMetrics(tuple(accuracy), tuple(recall), tuple(precision), tuple(f1))


def split(corpus: Sequence, train_fraction: float, seed: int) -> tuple[list, list]:
    """Seeded uniform random partition into (train, test).

    Deterministic for a given (seed, corpus order); the train size is
    ``train_fraction * len(corpus)`` rounded half-up.  Raises EmptySide if
    either partition would be empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")
    n = len(corpus)
    n_train = int(train_fraction * n + 0.5)
    if n_train == 0 or n_train == n:
        raise EmptySide(
            f"fraction {train_fraction} on {n} entries leaves an empty side"
        )
    indices = list(range(n))
    random.Random(seed).shuffle(indices)
    train = [corpus[i] for i in indices[:n_train]]
    test = [corpus[i] for i in indices[n_train:]]
    return train, test


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "core"
    train_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    runs: int = 5
    seed: int = 0
    sigma: float = 1.0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        object.__setattr__(self, "train_fractions", tuple(self.train_fractions))
        if not self.train_fractions:
            raise ValueError("at least one train fraction is required")
        for f in self.train_fractions:
            if not 0.0 < f < 1.0:
                raise ValueError(f"train fraction {f} outside (0, 1)")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def split_label(fraction: float) -> str:
    return format(fraction * 100.0, "g")


@dataclass
class EvalReport:
    """Averaged metrics per (split, reaction), with per-run raw values."""

    model: str
    seed: int
    runs: int
    sigma: float
    reactions: tuple[str, ...]
    split_labels: tuple[str, ...]
    mean: dict = field(default_factory=dict)
    per_run: dict = field(default_factory=dict)
    manifest: str | None = None

    def value(self, split: str, reaction: str, metric: str) -> float:
        return self.mean[split][reaction][metric]


def _unique_words(words) -> tuple[str, ...]:
    # Interned, deduplicated tuple: far lighter than a frozenset of fresh
    # strings when millions of entries are held for splitting.
    return tuple({sys.intern(w) for w in words})


def _prepare_distribution(entries, schema):
    prepared = []
    for words, counts in entries:
        try:
            vector = normalize(counts, schema)
        except ZeroReactionTotal:
            continue
        prepared.append((_unique_words(words), vector))
    return prepared


def _prepare_star(entries):
    prepared = []
    for words, counts in entries:
        try:
            positive, negative = star_normalize(counts)
        except ZeroReactionTotal:
            continue
        prepared.append((_unique_words(words), positive, negative, positive - negative))
    return prepared


def _mean_rows(sums: list[list[float]], count: int) -> list[list[float]]:
    return [[s / count for s in row] for row in sums]


def _run_distribution(prepared, schema, fraction, seed):
    """One split/build/predict pass; returns per-reaction metric means."""
    train, test = split(prepared, fraction, seed)
    lexicon = build_lexicon(train, schema)
    k = schema.size
    sums = [[0.0] * 4 for _ in range(k)]
    for words, actual in test:
        predicted, _ = predict(words, lexicon)
        for i in range(k):
            a, r, p, f = _overlap(actual[i], predicted[i])
            row = sums[i]
            row[0] += a
            row[1] += r
            row[2] += p
            row[3] += f
    return _mean_rows(sums, len(test))


def _run_star(prepared, fraction, seed, sigma):
    """One star-model pass; rows are positive, negative, star_rating."""
    train, test = split(prepared, fraction, seed)
    aggregates = [entry[3] for entry in train]
    lo, hi = min(aggregates), max(aggregates)
    if hi <= lo:
        raise DegenerateRange("all training aggregates are equal")
    training = []
    for words, positive, negative, aggregate in train:
        star = star_scale(aggregate, lo, hi)
        training.append((words, (positive, negative, discretize_star(star), star)))
    lexicon = build_lexicon(training, STAR_SCHEMA)
    sums = [[0.0] * 4 for _ in range(3)]
    for words, positive, negative, aggregate in test:
        star = star_scale(aggregate, lo, hi)
        star_bin = discretize_star(star)
        predicted, _ = predict(words, lexicon)
        for i, (n, m) in enumerate(((positive, predicted[0]), (negative, predicted[1]))):
            a, r, p, f = _overlap(n, m)
            row = sums[i]
            row[0] += a
            row[1] += r
            row[2] += p
            row[3] += f
        match = 1.0 if discretize_star(predicted[2]) == star_bin else 0.0
        row = sums[2]
        row[0] += gaussian_similarity(predicted[3], star, sigma)
        row[1] += match
        row[2] += match
        row[3] += match
    return _mean_rows(sums, len(test))


def run_experiment(
    entries: Sequence[tuple[Iterable[str], object]], config: ExperimentConfig
) -> EvalReport:
    """Evaluate one model over every (train fraction, run) combination.

    ``entries`` are (words, reaction_counts) pairs from a cleaned corpus.
    Entries whose schema total is zero are excluded up front.  Each run uses
    seed ``config.seed + run_index`` for its shuffle, so runs are
    independent partitions while the whole experiment stays reproducible.
    """
    if config.model == "star":
        prepared = _prepare_star(entries)
        reactions = STAR_ROWS
    else:
        schema = get_schema(config.model)
        prepared = _prepare_distribution(entries, schema)
        reactions = schema.reactions
    report = EvalReport(
        model=config.model,
        seed=config.seed,
        runs=config.runs,
        sigma=config.sigma,
        reactions=tuple(reactions),
        split_labels=tuple(split_label(f) for f in config.train_fractions),
    )
    for fraction in config.train_fractions:
        label = split_label(fraction)
        run_values = [[[] for _ in METRICS] for _ in reactions]
        for run in range(config.runs):
            seed = config.seed + run
            try:
                if config.model == "star":
                    means = _run_star(prepared, fraction, seed, config.sigma)
                else:
                    means = _run_distribution(prepared, schema, fraction, seed)
            except (EmptySide, DegenerateRange) as exc:
                raise type(exc)(f"{exc} (split {label}%, run {run})") from exc
            for i in range(len(reactions)):
                for j in range(len(METRICS)):
                    run_values[i][j].append(means[i][j])
        report.mean[label] = {}
        report.per_run[label] = {}
        for i, reaction in enumerate(reactions):
            report.mean[label][reaction] = {}
            report.per_run[label][reaction] = {}
            for j, metric in enumerate(METRICS):
                values = run_values[i][j]
                report.mean[label][reaction][metric] = sum(values) / len(values)
                report.per_run[label][reaction][metric] = values
    return report


def report_emit(report: EvalReport, format: str = "json") -> str:
    """Serialize a report deterministically as JSON or plotting-ready CSV."""
    if format == "json":
        payload = {
            "model": report.model,
            "seed": report.seed,
            "runs": report.runs,
            "sigma": report.sigma,
            "reactions": list(report.reactions),
            "split_labels": list(report.split_labels),
            "manifest": report.manifest,
            "splits": {
                label: {
                    reaction: {
                        metric: {
                            "mean": report.mean[label][reaction][metric],
                            "per_run": report.per_run[label][reaction][metric],
                        }
                        for metric in METRICS
                    }
                    for reaction in report.reactions
                }
                for label in report.split_labels
            },
        }
        return json.dumps(payload, indent=2) + "\n"
    if format == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            ["model", "split_percent", "reaction", "metric", "value", "runs", "seed"]
        )
        for label in report.split_labels:
            for reaction in report.reactions:
                for metric in METRICS:
                    writer.writerow(
                        [
                            report.model,
                            label,
                            reaction,
                            metric,
                            format_float(report.mean[label][reaction][metric]),
                            report.runs,
                            report.seed,
                        ]
                    )
        return out.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def format_float(value: float) -> str:
    return format(value, ".17g")


def report_from_json(text: str) -> EvalReport:
    payload = json.loads(text)
    report = EvalReport(
        model=payload["model"],
        seed=payload["seed"],
        runs=payload["runs"],
        sigma=payload["sigma"],
        reactions=tuple(payload["reactions"]),
        split_labels=tuple(payload["split_labels"]),
        manifest=payload.get("manifest"),
    )
    for label, reactions in payload["splits"].items():
        report.mean[label] = {}
        report.per_run[label] = {}
        for reaction, metrics in reactions.items():
            report.mean[label][reaction] = {
                metric: metrics[metric]["mean"] for metric in METRICS
            }
            report.per_run[label][reaction] = {
                metric: list(metrics[metric]["per_run"]) for metric in METRICS
            }
    return report
