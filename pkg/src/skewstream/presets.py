"""Named stream presets: the benchmark drift scenarios.

Twelve presets = {SINE1, SEA} x {prior drift, class-conditional drift,
boundary drift} x {abrupt, gradual}. Names are lowercase, e.g. "sine1-py" or
"seag-pyx"; the trailing "g" on the generator part marks the gradual variant
(500-step transition instead of an abrupt switch at step 1501).

Drift families:

* py  — class prior changes, feature geometry fixed. SINE1 flips the positive
        prior 0.1 -> 0.9; SEA shrinks it 0.5 -> 0.1.
* pxy — priors fixed at 1:9 (positive minority); the negative class's feature
        density shifts from one side of a split to the other.
* pyx — decision boundary changes, priors fixed at 1:9. SINE1 swaps the
        positive/negative regions; SEA moves the threshold 7 -> 13.
"""
from __future__ import annotations

from .labels import NEG
from .streams import SEA, SINE1, ConceptSpec, DriftSchedule, Skew

DRIFT_START = 1501
GRADUAL_DURATION = 500
TOTAL_STEPS = 3000


def _schedule(old: ConceptSpec, new: ConceptSpec, gradual: bool) -> DriftSchedule:
    return DriftSchedule(
        old=old,
        new=new,
        drift_start=DRIFT_START,
        drift_duration=GRADUAL_DURATION if gradual else 0,
        total_steps=TOTAL_STEPS,
    )


def _build(generator: str, family: str, gradual: bool) -> DriftSchedule:
    if family == "py":
        if generator == SINE1:
            old = ConceptSpec(SINE1, positive_prior=0.1)
            new = ConceptSpec(SINE1, positive_prior=0.9)
        else:
            old = ConceptSpec(SEA, positive_prior=0.5, threshold=7.0)
            new = ConceptSpec(SEA, positive_prior=0.1, threshold=7.0)
    elif family == "pxy":
        if generator == SINE1:
            old = ConceptSpec(
                SINE1, 0.1, skew=Skew(label=NEG, feature=0, split=0.5, prob=0.9)
            )
            new = ConceptSpec(
                SINE1, 0.1, skew=Skew(label=NEG, feature=0, split=0.5, prob=0.1)
            )
        else:
            old = ConceptSpec(
                SEA, 0.1, threshold=7.0,
                skew=Skew(label=NEG, feature=0, split=5.0, prob=0.9),
            )
            new = ConceptSpec(
                SEA, 0.1, threshold=7.0,
                skew=Skew(label=NEG, feature=0, split=5.0, prob=0.1),
            )
    elif family == "pyx":
        if generator == SINE1:
            old = ConceptSpec(SINE1, 0.1)
            new = ConceptSpec(SINE1, 0.1, invert=True)
        else:
            old = ConceptSpec(SEA, 0.1, threshold=7.0)
            new = ConceptSpec(SEA, 0.1, threshold=13.0)
    else:
        raise ValueError(f"unknown drift family {family!r}")
    return _schedule(old, new, gradual)


def _all_presets() -> dict[str, DriftSchedule]:
    out: dict[str, DriftSchedule] = {}
    for generator, stem in ((SINE1, "sine1"), (SEA, "sea")):
        for family in ("py", "pxy", "pyx"):
            for gradual in (False, True):
                name = f"{stem}{'g' if gradual else ''}-{family}"
                out[name] = _build(generator, family, gradual)
    return out


PRESETS: dict[str, DriftSchedule] = _all_presets()


def preset_schedule(name: str) -> DriftSchedule:
    """Look up a preset by name (case-insensitive)."""
    key = name.strip().lower()
    if key not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown stream preset {name!r}; known presets: {known}")
    return PRESETS[key]
