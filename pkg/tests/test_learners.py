"""Learner tests: MLP gradients and training, Poisson resampling, ensembles."""
from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from skewstream.imbalance import ClassSizeTracker
from skewstream.labels import NEG, POS
from skewstream.learners import (
    MlpBank,
    MlpModel,
    OnlineEnsemble,
    default_hidden_size,
    poisson_k,
)


def test_hidden_size_rule():
    assert default_hidden_size(2) == 2  # (2 + 2) / 2
    assert default_hidden_size(3) == 3  # (3 + 2) / 2 rounded half up
    assert default_hidden_size(6) == 4
    assert MlpModel(3, seed=0).hidden == 3
    assert MlpBank(3, [[0]], hidden=5).hidden == 5


def test_predict_is_a_distribution():
    rng = np.random.default_rng(0)
    model = MlpModel(4, seed=9)
    for _ in range(50):
        p_pos, p_neg = model.predict(rng.uniform(0, 1, 4))
        assert 0.0 <= p_pos <= 1.0 and 0.0 <= p_neg <= 1.0
        assert p_pos + p_neg == pytest.approx(1.0, abs=1e-12)


def test_zero_learning_rate_leaves_weights_unchanged():
    model = MlpModel(2, seed=3, lr=0.0)
    before = model.get_flat().copy()
    for _ in range(20):
        model.train_one([0.2, 0.7], POS)
    assert np.array_equal(model.get_flat(), before)


def test_predict_has_no_side_effects():
    model = MlpModel(2, seed=5)
    before = model.get_flat().copy()
    for _ in range(10):
        model.predict([0.5, 0.5])
    assert np.array_equal(model.get_flat(), before)


def test_gradient_matches_central_differences():
    h = 1e-5
    for seed in range(3):
        rng = np.random.default_rng(seed)
        model = MlpModel(3, seed=seed)
        x = rng.uniform(0, 1, 3)
        y = POS if seed % 2 else NEG
        analytic = model.gradient(x, y)
        base = model.get_flat().copy()
        for idx in rng.choice(base.size, size=8, replace=False):
            bumped = base.copy()
            bumped[idx] += h
            model.set_flat(bumped)
            up = model.loss(x, y)
            bumped[idx] -= 2 * h
            model.set_flat(bumped)
            down = model.loss(x, y)
            model.set_flat(base)
            numeric = (up - down) / (2 * h)
            denom = max(abs(numeric), abs(analytic[idx]), 1e-8)
            assert abs(numeric - analytic[idx]) / denom < 1e-4


def test_learns_separable_blobs():
    rng = np.random.default_rng(8)
    model = MlpModel(2, seed=8)
    xs, ys = [], []
    for _ in range(1500):
        if rng.random() < 0.5:
            x, y = rng.normal([0.25, 0.25], 0.08), POS
        else:
            x, y = rng.normal([0.75, 0.75], 0.08), NEG
        model.train_one(x, y)
        xs.append(x)
        ys.append(y)
    recent = list(zip(xs[-500:], ys[-500:]))
    correct = sum(
        (model.predict(x)[0] >= 0.5) == (y == POS) for x, y in recent
    )
    assert correct / len(recent) > 0.95


def test_training_reduces_loss_on_average():
    rng = np.random.default_rng(21)
    model = MlpModel(2, seed=21)
    drops = 0
    trials = 200
    for _ in range(trials):
        x = rng.uniform(0, 1, 2)
        y = POS if rng.random() < 0.5 else NEG
        before = model.loss(x, y)
        model.train_one(x, y)
        drops += model.loss(x, y) < before
    assert drops / trials > 0.9


# ---------------------------------------------------------------------------
# Poisson sampling
# ---------------------------------------------------------------------------


def test_poisson_zero_lambda_always_zero():
    rng = np.random.default_rng(1)
    assert all(poisson_k(0.0, rng) == 0 for _ in range(100))
    with pytest.raises(ValueError):
        poisson_k(-1.0, rng)
    with pytest.raises(ValueError):
        poisson_k(float("inf"), rng)


def test_poisson_monte_carlo_moments():
    rng = np.random.default_rng(2)
    draws = np.array([poisson_k(1.0, rng) for _ in range(100_000)])
    assert abs(np.mean(draws == 0) - np.exp(-1.0)) < 0.01
    assert abs(draws.mean() - 1.0) < 0.01
    draws9 = rng.poisson(9.0, 100_000)
    assert abs(draws9.mean() - 9.0) < 0.1


def test_balanced_tracker_degenerates_to_plain_bagging():
    tracker = ClassSizeTracker()  # starts perfectly even
    for sampler in ("OB", "OOB", "UOB"):
        ens = OnlineEnsemble(2, tracker, sampler=sampler, n_members=3, seed=0)
        assert ens.sampling_rate(POS) == 1.0
        assert ens.sampling_rate(NEG) == 1.0
    # and k ~ Poisson(1): chi-square over 10,000 draws at alpha = 0.01
    rng = np.random.default_rng(3)
    draws = rng.poisson(1.0, 10_000)
    kmax = 6
    observed = np.bincount(np.minimum(draws, kmax), minlength=kmax + 1)
    pmf = stats.poisson.pmf(np.arange(kmax), 1.0)
    expected = np.append(pmf, 1.0 - pmf.sum()) * draws.size
    assert stats.chisquare(observed, expected).pvalue > 0.01


def test_adaptive_rates_match_size_ratios():
    tracker = ClassSizeTracker()
    tracker.w = {POS: 0.1, NEG: 0.9}
    oob = OnlineEnsemble(2, tracker, sampler="OOB", n_members=2, seed=0)
    assert oob.sampling_rate(POS) == pytest.approx(9.0)
    assert oob.sampling_rate(NEG) == pytest.approx(1.0)
    uob = OnlineEnsemble(2, tracker, sampler="UOB", n_members=2, seed=0)
    assert uob.sampling_rate(NEG) == pytest.approx(1.0 / 9.0)
    assert uob.sampling_rate(POS) == pytest.approx(1.0)
    ob = OnlineEnsemble(2, tracker, sampler="OB", n_members=2, seed=0)
    assert ob.sampling_rate(POS) == ob.sampling_rate(NEG) == 1.0
    with pytest.raises(ValueError):
        OnlineEnsemble(2, tracker, sampler="SMOTE")


# ---------------------------------------------------------------------------
# ensemble behavior
# ---------------------------------------------------------------------------


def test_single_member_ensemble_equals_that_member():
    tracker = ClassSizeTracker()
    ens = OnlineEnsemble(2, tracker, sampler="OB", n_members=1, seed=42)
    solo = MlpModel(2, seed=[42, 0, 0])
    x = np.array([0.3, 0.6])
    assert ens.predict(x)[1] == pytest.approx(solo.predict(x)[0], abs=1e-15)


def test_tie_score_goes_positive():
    tracker = ClassSizeTracker()
    ens = OnlineEnsemble(2, tracker, n_members=3, seed=0)
    ens._bank.W2[:] = 0.0
    ens._bank.b2[:] = 0.0
    label, score = ens.predict([0.1, 0.9])
    assert score == 0.5
    assert label == POS


def test_batched_rounds_equal_sequential_member_training():
    seeds = [[7, 0, i] for i in range(3)]
    bank = MlpBank(2, seeds)
    solos = [MlpModel(2, seed=s) for s in seeds]
    rng = np.random.default_rng(11)
    for _ in range(30):
        x = rng.uniform(0, 1, 2)
        y = POS if rng.random() < 0.4 else NEG
        ks = rng.integers(0, 4, size=3)
        bank.train_rounds(x, y, ks)
        for solo, k in zip(solos, ks):
            for _ in range(k):
                solo.train_one(x, y)
    x = np.array([0.5, 0.25])
    stacked = bank.positive_scores(x)
    for i, solo in enumerate(solos):
        assert stacked[i] == pytest.approx(solo.predict(x)[0], abs=0.0)


def test_full_training_is_deterministic():
    def run():
        tracker = ClassSizeTracker()
        ens = OnlineEnsemble(2, tracker, sampler="OOB", n_members=5, seed=99)
        rng = np.random.default_rng(1234)
        outputs = []
        for _ in range(300):
            x = rng.uniform(0, 1, 2)
            y = POS if rng.random() < 0.2 else NEG
            outputs.append(ens.predict(x))
            tracker.update(y)
            ens.train_one(x, y)
        return outputs

    assert run() == run()


def test_reset_reinitializes_from_derived_seeds():
    tracker = ClassSizeTracker()
    a = OnlineEnsemble(2, tracker, n_members=4, seed=5)
    b = OnlineEnsemble(2, tracker, n_members=4, seed=5)
    for _ in range(50):
        a.train_one([0.2, 0.8], POS)
    trained = a._bank.get_flat().copy()
    a.reset()
    assert a.reset_count == 1
    assert not np.array_equal(a._bank.get_flat(), trained)
    b.reset()
    assert np.array_equal(a._bank.get_flat(), b._bank.get_flat())
    # fresh weights differ from the initial (reset 0) generation
    c = OnlineEnsemble(2, tracker, n_members=4, seed=5)
    assert not np.array_equal(a._bank.get_flat(), c._bank.get_flat())


def test_checkpoint_round_trip(tmp_path):
    tracker = ClassSizeTracker()
    ens = OnlineEnsemble(2, tracker, n_members=3, seed=1)
    for _ in range(20):
        ens.train_one([0.4, 0.1], NEG)
    path = tmp_path / "weights.npz"
    ens.save_weights(path)
    restored = OnlineEnsemble(2, tracker, n_members=3, seed=2)
    restored.load_weights(path)
    x = [0.3, 0.9]
    assert restored.predict(x) == ens.predict(x)
