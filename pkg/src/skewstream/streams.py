"""Synthetic two-class streams with controlled concept drift.

Two generators are provided:

* SINE1 — features (x, y) uniform on [0, 1]^2, positive class below the curve
  y = sin(x) (points on or above it are negative). The positive region can be
  flipped to build boundary-swap drifts.
* SEA   — features (x1, x2, x3) uniform on [0, 10]^3, positive class where
  x1 + x2 <= threshold; x3 is irrelevant noise.

Class priors are enforced by label-first sampling: the label is drawn from the
concept's prior, then features are rejection-sampled until they satisfy the
label rule. Optional conditional-skew rules reshape one class's feature
density (e.g. "negatives fall at x < 0.5 with probability 0.9") by first
drawing the side of the split, then sampling within it.

Drift is a per-step Bernoulli choice between the old and the new concept whose
new-concept probability ramps linearly from 0 to 1 across the transition
window (a step function for abrupt drift).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .labels import NEG, POS

SINE1 = "SINE1"
SEA = "SEA"

_REJECTION_CAP = 10_000


class StreamExhausted(Exception):
    """Raised when a generator is asked for examples past total_steps."""


class InfeasibleConceptError(RuntimeError):
    """Rejection sampling failed to satisfy a concept's constraints."""


def sine1_label(x: float, y: float) -> int:
    """+1 iff the point lies strictly below y = sin(x)."""
    return POS if y < math.sin(x) else NEG


def sea_label(x1: float, x2: float, threshold: float) -> int:
    """+1 iff x1 + x2 <= threshold (boundary inclusive)."""
    return POS if x1 + x2 <= threshold else NEG


@dataclass(frozen=True)
class Example:
    t: int
    features: tuple[float, ...]
    label: int


@dataclass(frozen=True)
class Skew:
    """Conditional feature-density rule for one class.

    With probability ``prob`` an example of class ``label`` has
    features[feature] < split; otherwise it falls on or above the split.
    """

    label: int
    feature: int
    split: float
    prob: float

    def __post_init__(self) -> None:
        if self.label not in (POS, NEG):
            raise ValueError(f"unknown class label {self.label!r}")
        if not 0.0 < self.prob < 1.0:
            raise ValueError(f"skew probability must be in (0, 1), got {self.prob}")


@dataclass(frozen=True)
class ConceptSpec:
    """One stationary concept: generator geometry, prior and optional skew."""

    generator: str
    positive_prior: float
    threshold: float = 7.0  # SEA boundary; unused for SINE1
    invert: bool = False  # SINE1 only: positive region becomes y >= sin(x)
    skew: Skew | None = None

    def __post_init__(self) -> None:
        if self.generator not in (SINE1, SEA):
            raise ValueError(f"unknown generator {self.generator!r}")
        if not 0.0 < self.positive_prior < 1.0:
            raise ValueError(
                f"positive prior must be in (0, 1), got {self.positive_prior}"
            )
        if self.generator == SEA and not 0.0 < self.threshold < 20.0:
            raise ValueError(
                f"SEA threshold must keep both classes reachable, got {self.threshold}"
            )

    @property
    def n_features(self) -> int:
        return 2 if self.generator == SINE1 else 3

    @property
    def feature_high(self) -> float:
        return 1.0 if self.generator == SINE1 else 10.0

    def label_of(self, features) -> int:
        if self.generator == SINE1:
            raw = sine1_label(features[0], features[1])
            return -raw if self.invert else raw
        return sea_label(features[0], features[1], self.threshold)


@dataclass(frozen=True)
class DriftSchedule:
    """Old/new concept pair plus the timing of the transition."""

    old: ConceptSpec
    new: ConceptSpec
    drift_start: int = 1501
    drift_duration: int = 0  # 0 = abrupt
    total_steps: int = 3000

    def __post_init__(self) -> None:
        if self.drift_duration < 0:
            raise ValueError("drift_duration must be >= 0")
        if self.drift_start < 1 or self.total_steps < 1:
            raise ValueError("drift_start and total_steps must be >= 1")
        if self.drift_start + self.drift_duration > self.total_steps + 1:
            raise ValueError("drift must complete within the stream")
        if self.old.n_features != self.new.n_features:
            raise ValueError("old and new concepts must share a feature space")

    @property
    def drift_end(self) -> int:
        """First step at which only the new concept is sampled."""
        return self.drift_start + self.drift_duration


def mixture_weight(t: int, schedule: DriftSchedule) -> float:
    """Probability of drawing from the new concept at step t."""
    if t < schedule.drift_start:
        return 0.0
    if schedule.drift_duration == 0:
        return 1.0
    return min(1.0, (t - schedule.drift_start) / schedule.drift_duration)


def stationary_schedule(concept: ConceptSpec, total_steps: int) -> DriftSchedule:
    """A drift-free schedule: the concept holds for the whole stream."""
    return DriftSchedule(
        old=concept,
        new=concept,
        drift_start=total_steps + 1,
        drift_duration=0,
        total_steps=total_steps,
    )


class StreamGenerator:
    """Seeded example source following a drift schedule.

    The same (seed, schedule) pair always reproduces the identical example
    sequence. Iterating yields exactly total_steps examples; calling
    next_example past the end raises StreamExhausted.
    """

    def __init__(self, schedule: DriftSchedule, seed):
        self.schedule = schedule
        self.rng = np.random.default_rng(seed)
        self.t = 0

    def next_example(self) -> Example:
        if self.t >= self.schedule.total_steps:
            raise StreamExhausted(f"stream ended at step {self.schedule.total_steps}")
        self.t += 1
        w = mixture_weight(self.t, self.schedule)
        if w >= 1.0:
            concept = self.schedule.new
        elif w <= 0.0:
            concept = self.schedule.old
        else:
            concept = self.schedule.new if self.rng.random() < w else self.schedule.old
        features, label = self._sample(concept)
        return Example(t=self.t, features=features, label=label)

    def __iter__(self):
        while self.t < self.schedule.total_steps:
            yield self.next_example()

    def _sample(self, concept: ConceptSpec) -> tuple[tuple[float, ...], int]:
        rng = self.rng
        high = concept.feature_high
        label = POS if rng.random() < concept.positive_prior else NEG

        low_side = None
        skew = concept.skew
        if skew is not None and skew.label == label:
            low_side = rng.random() < skew.prob

        for _ in range(_REJECTION_CAP):
            feats = rng.uniform(0.0, high, size=concept.n_features)
            if low_side is not None:
                # sample the constrained feature directly within its side
                if low_side:
                    feats[skew.feature] = rng.uniform(0.0, skew.split)
                else:
                    feats[skew.feature] = rng.uniform(skew.split, high)
            if concept.label_of(feats) == label:
                return tuple(float(v) for v in feats), label
        raise InfeasibleConceptError(
            f"no example of class {label} found in {_REJECTION_CAP} attempts "
            f"for {concept!r}"
        )
