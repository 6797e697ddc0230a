"""Active drift detectors and scoring of their alarms.

Three detectors share one verdict interface (`step(...) -> Verdict`):

* RecallDropDetector — tracks the time-decayed recall of the current minority
  class and fires when it falls 2 (warning) or 3 (drift) dispersion units
  below its running best, the classic error-monitoring construction applied
  to minority recall.
* FourRatesDetector — tracks decayed TPR/TNR/PPV/NPV and compares each,
  whenever it updates, against Monte Carlo null quantiles for its current
  update count; any detect-level violation is a drift.
* AucDropDetector — prequential AUC over a recent-score window fed to a
  Page-Hinkley accumulator on the decrease direction.

All three re-arm themselves (reset to the freshly initialized state) upon
emitting Drift. Warnings are informational only.

`score_detections` turns per-run alarm logs into the usual detection scores:
true-detection rate, false alarms per run, and mean delay to the first
post-drift alarm.
"""
from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .labels import NEG, POS
from .metrics import ScoreWindow, prequential_auc


class Verdict(Enum):
    NORMAL = "normal"
    WARNING = "warning"
    DRIFT = "drift"


class DriftDetector:
    """Interface: feed one prequential observation, get a verdict back."""

    def step(
        self,
        truth: int,
        predicted: int,
        score: float | None = None,
        minority: int | None = None,
    ) -> Verdict:
        raise NotImplementedError

    def reset(self) -> None:
        raise NotImplementedError


class RecallDropDetector(DriftDetector):
    """Decayed minority-recall monitor with 2s/3s drop bounds.

    Only examples whose true class is the current minority update the decayed
    recall R. R is the ratio of a decayed hit sum to a decayed count, so it
    is an unbiased level estimate from the first update on rather than a
    zero-anchored accumulator that spends hundreds of rare minority examples
    climbing toward the true level. Its dispersion is
    s = sqrt(max(R(1-R), floor) / min(n, n_eff)) with
    n_eff = (1+decay)/(1-decay), the decayed estimator's variance-matched
    effective sample count (the number of equally-weighted draws giving the
    same variance; the weight-sum count 1/(1-decay) overstates the variance
    roughly twofold and would push the 3s bound out to ~4 true standard
    deviations). The variance floor is the one-pseudocount value
    n_eff/(n_eff+1) * 1/(n_eff+1), so a spotless streak (R = 1, nominal
    variance 0) cannot produce zero-width bounds. The best R seen since
    (re)arm and the dispersion at that best define the drop bounds. Verdicts
    and best-tracking start after ``min_updates`` monitored examples so a
    lucky first few observations cannot pin an unbeatable best.

    The default decay keeps the monitor's horizon at a couple dozen minority
    examples: long enough for stable bounds, short enough that a recall dip
    lasting tens of minority examples (a few hundred stream steps at one-in-
    ten imbalance) registers before it heals.

    A drift verdict additionally requires the 3s violation to hold on
    ``confirm`` consecutive monitored updates. A single minority example
    moves the decayed estimate by up to (1-decay), so one unlucky example
    can clip the bound for exactly one update and bounce straight back; a
    real drop keeps the estimate below the bound across updates. The
    confirmation step filters those one-update clips (each of which would
    otherwise reset the paired model and blind the pipeline) at the price of
    ``confirm - 1`` extra monitored examples of detection delay.
    """

    def __init__(
        self,
        decay: float = 0.92,
        warn_scale: float = 2.0,
        drift_scale: float = 3.0,
        min_updates: int = 30,
        confirm: int = 2,
    ):
        if not 0.0 < decay < 1.0:
            raise ValueError("decay must be in (0, 1)")
        self.decay = decay
        self.warn_scale = warn_scale
        self.drift_scale = drift_scale
        self.min_updates = int(min_updates)
        self.confirm = int(confirm)
        self.n_eff = (1.0 + decay) / (1.0 - decay)
        q = self.n_eff / (self.n_eff + 1.0)
        self._var_floor = q * (1.0 - q)
        self.reset()

    def reset(self) -> None:
        self.recall = 0.0
        self.best = 0.0
        self.best_s = 0.0
        self.n = 0
        self._num = 0.0
        self._den = 0.0
        self._streak = 0

    def _dispersion(self, r: float) -> float:
        var = max(r * (1.0 - r), self._var_floor)
        return math.sqrt(var / min(self.n, self.n_eff))

    def step(self, truth, predicted, score=None, minority=None) -> Verdict:
        if minority is None:
            minority = POS
        if truth != minority:
            return Verdict.NORMAL
        self.n += 1
        gain = 1.0 - self.decay
        self._num = self.decay * self._num + gain * float(predicted == truth)
        self._den = self.decay * self._den + gain
        self.recall = self._num / self._den
        if self.n < self.min_updates:
            return Verdict.NORMAL
        if self.recall >= self.best:
            self.best = self.recall
            self.best_s = self._dispersion(self.recall)
        if self.recall < self.best - self.drift_scale * self.best_s:
            self._streak += 1
            if self._streak >= self.confirm:
                self.reset()
                return Verdict.DRIFT
            return Verdict.WARNING
        self._streak = 0
        if self.recall < self.best - self.warn_scale * self.best_s:
            return Verdict.WARNING
        return Verdict.NORMAL


# ---------------------------------------------------------------------------
# Four-rates detector and its Monte Carlo bound table
# ---------------------------------------------------------------------------

_TPR, _TNR, _PPV, _NPV = 0, 1, 2, 3
_RATE_NAMES = ("tpr", "tnr", "ppv", "npv")


class BoundTable:
    """Null quantiles of a decayed-vs-cumulative deviation, indexed by (p, n).

    Under the null, a rate's indicator stream is i.i.d. Bernoulli(p); the
    decayed statistic follows R_n = decay*R_{n-1} + (1-decay)*B_n from
    R_0 = 0.5 and the cumulative estimate is p_hat_n = (successes+0.5)/(n+1).
    The monitored deviation is D_n = R_n - p_hat_n. Tabulating D rather than
    R alone matters: both estimates are computed from the same indicators,
    so they are strongly correlated (nearly identical at moderate n) and the
    deviation has far less spread than R itself — bounds on R at a
    data-estimated center would be wildly conservative. The table holds
    Monte Carlo quantiles of D_n on a grid of underlying rates p and a
    ladder of update counts n (saturating at max_n, past which the
    distribution is stationary), at four tail levels: detect-low, warn-low,
    warn-high, detect-high. Queries interpolate bilinearly and clamp outside
    the grid.

    Built once per parameter set from a fixed seed and cached on disk, so
    bounds are reproducible across processes.
    """

    CACHE_ENV = "SKEWSTREAM_CACHE"

    def __init__(
        self,
        decay: float = 0.99,
        warn_level: float = 0.01,
        detect_level: float = 0.001,
        n_paths: int = 25000,
        max_n: int = 1000,
        seed: int = 20240605,
    ):
        self.decay = decay
        self.warn_level = warn_level
        self.detect_level = detect_level
        self.n_paths = n_paths
        self.max_n = max_n
        self.seed = seed
        self.p_grid = np.unique(
            np.concatenate(
                [np.linspace(0.01, 0.99, 25), [0.02, 0.03, 0.05, 0.95, 0.97, 0.98]]
            )
        )
        self.n_grid = np.unique(
            np.rint(np.geomspace(1, max_n, 40)).astype(int)
        )
        self.levels = np.array(
            [detect_level / 2, warn_level / 2, 1 - warn_level / 2, 1 - detect_level / 2]
        )
        cached = self._load_cache()
        if cached is not None:
            self.table = cached
        else:
            self.table = self._simulate()
            self._store_cache()

    # -- cache ---------------------------------------------------------------

    def _cache_path(self) -> Path:
        key = repr(
            (
                "deviation-v1",
                self.decay,
                self.warn_level,
                self.detect_level,
                self.n_paths,
                self.max_n,
                self.seed,
                self.p_grid.tolist(),
                self.n_grid.tolist(),
            )
        ).encode()
        digest = hashlib.sha256(key).hexdigest()[:16]
        root = os.environ.get(self.CACHE_ENV)
        if root is None:
            xdg = os.environ.get("XDG_CACHE_HOME", str(Path.home() / ".cache"))
            root = str(Path(xdg) / "skewstream")
        return Path(root) / f"rate_bounds_{digest}.npz"

    def _load_cache(self) -> np.ndarray | None:
        path = self._cache_path()
        if not path.exists():
            return None
        try:
            with np.load(path) as data:
                table = data["table"]
        except Exception:
            return None
        expected = (len(self.p_grid), len(self.n_grid), 4)
        return table if table.shape == expected else None

    def _store_cache(self) -> None:
        path = self._cache_path()
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp.npz")
            np.savez(tmp, table=self.table)
            tmp.replace(path)
        except OSError:
            pass  # cache is an optimization only

    # -- construction --------------------------------------------------------

    def _simulate(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        n_p = len(self.p_grid)
        paths = np.full((n_p, self.n_paths), 0.5)
        successes = np.zeros((n_p, self.n_paths))
        p_col = self.p_grid[:, None]
        table = np.empty((n_p, len(self.n_grid), 4))
        record = {n: i for i, n in enumerate(self.n_grid)}
        gain = 1.0 - self.decay
        for n in range(1, self.max_n + 1):
            # one shared uniform vector per step: marginals per p stay exact
            hit = rng.random(self.n_paths)[None, :] < p_col
            paths *= self.decay
            np.add(paths, gain, out=paths, where=hit)
            np.add(successes, 1.0, out=successes, where=hit)
            i = record.get(n)
            if i is not None:
                deviation = paths - (successes + 0.5) / (n + 1.0)
                table[:, i, :] = np.quantile(deviation, self.levels, axis=1).T
        if not (np.diff(table, axis=2) >= 0).all():
            raise AssertionError("bound quantiles must be nested")
        return table

    # -- queries -------------------------------------------------------------

    def bounds(self, p: float, n: int) -> np.ndarray:
        """(detect_low, warn_low, warn_high, detect_high) deviation quantiles
        for underlying rate p after n updates."""
        p = min(max(p, self.p_grid[0]), self.p_grid[-1])
        n = min(max(n, 1), self.max_n)
        pi = np.searchsorted(self.p_grid, p)
        pi = min(max(pi, 1), len(self.p_grid) - 1)
        p0, p1 = self.p_grid[pi - 1], self.p_grid[pi]
        fp = (p - p0) / (p1 - p0)
        ni = np.searchsorted(self.n_grid, n)
        ni = min(max(ni, 1), len(self.n_grid) - 1)
        n0, n1 = self.n_grid[ni - 1], self.n_grid[ni]
        fn = (n - n0) / (n1 - n0) if n1 > n0 else 0.0
        row0 = (1 - fn) * self.table[pi - 1, ni - 1] + fn * self.table[pi - 1, ni]
        row1 = (1 - fn) * self.table[pi, ni - 1] + fn * self.table[pi, ni]
        return (1 - fp) * row0 + fp * row1


_default_tables: dict[tuple, BoundTable] = {}


def default_bound_table(
    decay: float = 0.99, warn_level: float = 0.01, detect_level: float = 0.001
) -> BoundTable:
    """Process-wide shared bound table for the given parameters."""
    key = (decay, warn_level, detect_level)
    if key not in _default_tables:
        _default_tables[key] = BoundTable(
            decay=decay, warn_level=warn_level, detect_level=detect_level
        )
    return _default_tables[key]


class FourRatesDetector(DriftDetector):
    """Monitors decayed TPR, TNR, PPV and NPV against null deviation bounds.

    Each step updates exactly two of the four rates (one row rate picked by
    the true class, one column rate picked by the predicted class). A rate is
    tested only when it has just updated, has accumulated ``min_updates``
    updates since (re)arm, and its history holds at least one hit and one
    miss: a pure streak is the extreme trajectory consistent with an
    underlying rate of 1 (or 0), so it carries no evidence of change, and
    comparing that boundary trajectory against interpolated quantiles would
    false-alarm on interpolation error alone. The tested statistic is the
    deviation of the decayed rate from the cumulative estimate
    p_hat = (successes + 0.5)/(count + 1): the decayed side reacts to a rate
    change within ~1/(1-decay) updates while the cumulative side lags, so a
    change opens a gap that the null quantiles (tabulated for exactly this
    deviation) flag. Any detect-level violation re-arms the detector.
    ``checks`` counts bound comparisons cumulatively across re-arms, giving
    null-calibration measurements their denominator.

    With ``auto_rearm=False`` the detector still emits Drift verdicts but
    keeps its state (free-running mode). Violations of the slowly-moving
    deviation statistic come in multi-step episodes; re-arming collapses
    each episode into a single alarm, so measuring the per-comparison
    false-alarm probability against the configured detect level requires
    counting every violating comparison, not one per episode.
    """

    def __init__(
        self,
        decay: float = 0.99,
        warn_level: float = 0.01,
        detect_level: float = 0.001,
        min_updates: int = 20,
        auto_rearm: bool = True,
        table: BoundTable | None = None,
    ):
        if table is None:
            table = default_bound_table(decay, warn_level, detect_level)
        self.table = table
        self.decay = decay
        self.min_updates = int(min_updates)
        self.auto_rearm = bool(auto_rearm)
        self.checks = 0
        self.reset()

    def reset(self) -> None:
        self.rates = [0.5, 0.5, 0.5, 0.5]
        self.successes = [0, 0, 0, 0]
        self.counts = [0, 0, 0, 0]

    def _update_rate(self, idx: int, indicator: bool) -> None:
        self.rates[idx] = self.decay * self.rates[idx] + (1.0 - self.decay) * float(
            indicator
        )
        self.successes[idx] += int(indicator)
        self.counts[idx] += 1

    def _check_rate(self, idx: int) -> Verdict:
        n = self.counts[idx]
        if n < self.min_updates:
            return Verdict.NORMAL
        if self.successes[idx] in (0, n):
            return Verdict.NORMAL
        self.checks += 1
        p_hat = (self.successes[idx] + 0.5) / (n + 1.0)
        lo_d, lo_w, hi_w, hi_d = self.table.bounds(p_hat, n)
        d = self.rates[idx] - p_hat
        if d < lo_d or d > hi_d:
            return Verdict.DRIFT
        if d < lo_w or d > hi_w:
            return Verdict.WARNING
        return Verdict.NORMAL

    def step(self, truth, predicted, score=None, minority=None) -> Verdict:
        if truth == POS:
            self._update_rate(_TPR, predicted == POS)
            touched = [_TPR]
        else:
            self._update_rate(_TNR, predicted == NEG)
            touched = [_TNR]
        if predicted == POS:
            self._update_rate(_PPV, truth == POS)
            touched.append(_PPV)
        else:
            self._update_rate(_NPV, truth == NEG)
            touched.append(_NPV)
        verdict = Verdict.NORMAL
        for idx in touched:
            v = self._check_rate(idx)
            if v is Verdict.DRIFT:
                if self.auto_rearm:
                    self.reset()
                return Verdict.DRIFT
            if v is Verdict.WARNING:
                verdict = Verdict.WARNING
        return verdict


class AucDropDetector(DriftDetector):
    """Page-Hinkley test on decreases of windowed prequential AUC.

    Every step pushes (score, truth label) into the window; once the window
    holds ``min_fill`` examples the AUC series feeds the accumulator
    m += (running mean AUC) - AUC - delta, and drift fires when m exceeds its
    running minimum by more than ``threshold``. Warning at half the gap.

    The AUC series over an overlapping window is autocorrelated on the
    window's timescale, so below-mean stretches persist for hundreds of
    steps and the accumulator's null excursions are orders of magnitude
    larger than single-step noise. delta is therefore a dip-depth filter,
    not a per-step noise margin: it must exceed both stationary AUC noise
    (sd ~0.02 at window 500) and the transient dent a still-learnable
    boundary shift leaves in the ranking. threshold then separates dip
    *budgets* (depth x persistence): a gradual concept changeover, whose
    mixed-label phase degrades the ranking mildly for a few hundred steps,
    accumulates at most a few units of gap even past delta, while a genuine
    ranking collapse (windowed AUC falling toward or below 0.5) accumulates
    a deficit of several tenths per step and blows through tens of units
    within a window's turnover. The defaults keep a stationary stream at
    roughly zero false alarms per 3,000 steps, sit ~3x above the worst
    gradual-changeover excursion observed across the bundled presets, and
    ~5x below a true collapse's gap.
    """

    def __init__(
        self,
        window: int = 500,
        delta: float = 0.10,
        threshold: float = 20.0,
        min_fill: int = 100,
    ):
        self.capacity = int(window)
        self.delta = delta
        self.threshold = threshold
        self.min_fill = int(min_fill)
        self.window = ScoreWindow(self.capacity)
        self.reset()

    def reset(self) -> None:
        self.window.clear()
        self.m = 0.0
        self.m_min = 0.0
        self.auc_mean = 0.0
        self.auc_count = 0

    def step(self, truth, predicted=None, score=None, minority=None) -> Verdict:
        if score is None:
            raise ValueError("AucDropDetector needs the classifier score")
        self.window.push(score, truth)
        if len(self.window) < self.min_fill:
            return Verdict.NORMAL
        auc = prequential_auc(self.window)
        self.auc_count += 1
        self.auc_mean += (auc - self.auc_mean) / self.auc_count
        self.m += self.auc_mean - auc - self.delta
        if self.m < self.m_min:
            self.m_min = self.m
        gap = self.m - self.m_min
        if gap > self.threshold:
            self.reset()
            return Verdict.DRIFT
        if gap > self.threshold / 2.0:
            return Verdict.WARNING
        return Verdict.NORMAL


# ---------------------------------------------------------------------------
# Alarm scoring
# ---------------------------------------------------------------------------


@dataclass
class DetectionLog:
    """Drift-alarm time steps for one run, in increasing order."""

    run: int
    seed: int
    alarms: list[int]


@dataclass(frozen=True)
class DetectorScore:
    """tdr: fraction of runs with a post-drift alarm; fa: mean false alarms
    per run; dod: mean delay of the first post-drift alarm (None if no run
    detected)."""

    tdr: float
    fa: float
    dod: float | None


def score_detections(
    logs: list[DetectionLog], drift_start: int, n_runs: int | None = None
) -> DetectorScore:
    """Score alarm logs against a known drift time.

    Alarms before drift_start are false; from drift_start on, the first alarm
    in each run is the true detection and any further ones are false.
    """
    if n_runs is None:
        n_runs = len(logs)
    if n_runs < 1:
        raise ValueError("need at least one run")
    if len(logs) > n_runs:
        raise ValueError(f"{len(logs)} logs for {n_runs} runs")
    detected = 0
    false_alarms = 0
    delays = []
    for log in logs:
        alarms = sorted(log.alarms)
        pre = [t for t in alarms if t < drift_start]
        post = [t for t in alarms if t >= drift_start]
        false_alarms += len(pre)
        if post:
            detected += 1
            delays.append(post[0] - drift_start)
            false_alarms += len(post) - 1
    return DetectorScore(
        tdr=detected / n_runs,
        fa=false_alarms / n_runs,
        dod=float(np.mean(delays)) if delays else None,
    )
