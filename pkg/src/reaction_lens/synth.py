"""Deterministic synthetic corpus generator with latent word affinities.

Every vocabulary word gets a latent affinity distribution over the five
core reactions (Dirichlet-sampled, or a fixed vector for degenerate
setups).  A message samples words uniformly, and its core reaction counts
are a multinomial draw around the mean affinity of its words, so the
word -> reaction signal strength is tunable through the Dirichlet
concentration.  Like counts are attached per row with a noisy odds ratio
whose expectation matches the requested like-dominance fraction, which
makes the like share realistic in aggregate while varying row to row.

Generation is chunked numpy sampling from a single seeded generator, so a
given spec always produces byte-identical output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .corpus_io import CORE_NAMES, REACTION_NAMES
from .errors import InvalidSpec

_CHUNK = 10_000


@dataclass(frozen=True)
class SynthSpec:
    rows: int
    vocab_size: int = 2000
    affinity_concentration: float = 0.5
    fixed_affinity: tuple[float, ...] | None = None
    length_min: int = 3
    length_max: int = 12
    reaction_scale: float = 20.0
    like_dominance: float = 0.95
    like_variability: float = 0.8
    thankful_rate: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.rows < 1:
            raise InvalidSpec(f"rows must be >= 1, got {self.rows}")
        if self.vocab_size < 1:
            raise InvalidSpec(f"vocab_size must be >= 1, got {self.vocab_size}")
        if self.affinity_concentration <= 0:
            raise InvalidSpec("affinity_concentration must be positive")
        if self.fixed_affinity is not None:
            affinity = tuple(float(v) for v in self.fixed_affinity)
            if len(affinity) != len(CORE_NAMES):
                raise InvalidSpec(
                    f"fixed_affinity needs {len(CORE_NAMES)} components"
                )
            if any(v < 0 for v in affinity) or sum(affinity) <= 0:
                raise InvalidSpec("fixed_affinity must be non-negative, total > 0")
            total = sum(affinity)
            object.__setattr__(
                self, "fixed_affinity", tuple(v / total for v in affinity)
            )
        if not 1 <= self.length_min <= self.length_max:
            raise InvalidSpec(
                f"need 1 <= length_min <= length_max, got "
                f"[{self.length_min}, {self.length_max}]"
            )
        if self.reaction_scale <= 0:
            raise InvalidSpec("reaction_scale must be positive")
        if not 0.0 <= self.like_dominance < 1.0:
            raise InvalidSpec("like_dominance must be in [0, 1)")
        if self.like_variability <= 0:
            raise InvalidSpec("like_variability must be positive")
        if not 0.0 <= self.thankful_rate <= 1.0:
            raise InvalidSpec("thankful_rate must be in [0, 1]")


def vocabulary(spec: SynthSpec) -> list[str]:
    width = max(4, len(str(spec.vocab_size - 1)))
    return [f"w{i:0{width}d}" for i in range(spec.vocab_size)]


def word_affinities(spec: SynthSpec) -> np.ndarray:
    """Latent per-word core-reaction affinities, shape (vocab, 5)."""
    rng = np.random.default_rng(spec.seed)
    if spec.fixed_affinity is not None:
        return np.tile(np.asarray(spec.fixed_affinity), (spec.vocab_size, 1))
    alpha = np.full(len(CORE_NAMES), spec.affinity_concentration)
    return rng.dirichlet(alpha, size=spec.vocab_size)


def _multinomial_rows(rng, totals: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Exact multinomial sampling with per-row probabilities (stick-breaking)."""
    m, k = probs.shape
    counts = np.zeros((m, k), dtype=np.int64)
    remaining = totals.astype(np.int64).copy()
    remaining_p = np.ones(m)
    for j in range(k - 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            pj = np.where(remaining_p > 0, probs[:, j] / remaining_p, 0.0)
        counts[:, j] = rng.binomial(remaining, np.clip(pj, 0.0, 1.0))
        remaining -= counts[:, j]
        remaining_p = np.maximum(remaining_p - probs[:, j], 0.0)
    counts[:, k - 1] = remaining
    return counts


def iter_rows(spec: SynthSpec) -> Iterator[tuple[str, tuple[int, ...]]]:
    """Yield (message, reaction_counts_tuple) rows in REACTION_NAMES order."""
    vocab = np.array(vocabulary(spec))
    affinities = word_affinities(spec)
    # word_affinities consumed draws from its own generator; generation below
    # re-seeds so the affinity matrix and the rows stay independent and the
    # whole corpus remains a pure function of the spec.
    rng = np.random.default_rng(spec.seed + 1)
    like_col = REACTION_NAMES.index("like")
    thankful_col = REACTION_NAMES.index("thankful")
    core_cols = [REACTION_NAMES.index(name) for name in CORE_NAMES]
    odds_mean = (
        spec.like_dominance / (1.0 - spec.like_dominance)
        if spec.like_dominance > 0
        else 0.0
    )
    gamma_shape = 1.0 / (spec.like_variability * spec.like_variability)
    produced = 0
    while produced < spec.rows:
        m = min(_CHUNK, spec.rows - produced)
        lengths = rng.integers(spec.length_min, spec.length_max + 1, size=m)
        word_ids = rng.integers(0, spec.vocab_size, size=int(lengths.sum()))
        offsets = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        probs = np.add.reduceat(affinities[word_ids], offsets[:-1], axis=0)
        probs /= lengths[:, None]
        core_totals = np.maximum(1, rng.poisson(spec.reaction_scale, size=m))
        core_counts = _multinomial_rows(rng, core_totals, probs)
        if odds_mean > 0:
            odds = rng.gamma(gamma_shape, odds_mean / gamma_shape, size=m)
            likes = rng.poisson(core_totals * odds)
        else:
            likes = np.zeros(m, dtype=np.int64)
        if spec.thankful_rate > 0:
            thankfuls = rng.binomial(1, spec.thankful_rate, size=m)
        else:
            thankfuls = np.zeros(m, dtype=np.int64)
        row = np.zeros(len(REACTION_NAMES), dtype=np.int64)
        for i in range(m):
            words = vocab[word_ids[offsets[i] : offsets[i + 1]]]
            row[:] = 0
            row[like_col] = likes[i]
            row[thankful_col] = thankfuls[i]
            row[core_cols] = core_counts[i]
            yield " ".join(words), tuple(int(v) for v in row)
        produced += m


def write_corpus(
    spec: SynthSpec, output, format: str = "csv", truth_path=None
) -> dict:
    """Write the corpus plus a ground-truth affinity file next to it.

    Returns a summary with the row count, per-reaction totals, and the
    aggregate like share actually realized.
    """
    output = Path(output)
    if truth_path is None:
        truth_path = output.with_name(output.name + ".affinities.json")
    totals = dict.fromkeys(REACTION_NAMES, 0)
    rows = 0
    with open(output, "w", encoding="utf-8", newline="") as fh:
        if format == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("message",) + REACTION_NAMES)
            for message, counts in iter_rows(spec):
                writer.writerow((message,) + counts)
                rows += 1
                for name, value in zip(REACTION_NAMES, counts):
                    totals[name] += value
        elif format == "jsonl":
            for message, counts in iter_rows(spec):
                obj = {"message": message}
                obj.update(zip(REACTION_NAMES, counts))
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
                rows += 1
                for name, value in zip(REACTION_NAMES, counts):
                    totals[name] += value
        else:
            raise ValueError(f"unknown corpus format {format!r}")
    affinities = word_affinities(spec)
    truth = {
        "spec": asdict(spec),
        "reactions": list(CORE_NAMES),
        "affinities": {
            word: [float(v) for v in row]
            for word, row in zip(vocabulary(spec), affinities)
        },
    }
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2)
        fh.write("\n")
    grand = sum(totals.values())
    return {
        "rows": rows,
        "totals": totals,
        "like_share": totals["like"] / grand if grand else 0.0,
        "truth_path": str(truth_path),
    }
