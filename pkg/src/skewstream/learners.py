"""Online learners: incremental MLP base models and Poisson-resampling ensembles.

The base learner is a one-hidden-layer MLP (sigmoid hidden units, softmax
output, cross-entropy loss) trained by one stochastic-gradient step per
presented example. The ensembles follow online bagging: every incoming
example is shown to each member k times with k ~ Poisson(lambda), where

    OB   lambda = 1
    OOB  lambda = w_max / w_label   (oversamples the minority class)
    UOB  lambda = w_min / w_label   (undersamples the majority class)

and the w's are the tracker's time-decayed class sizes; while the tracker
reports the stream as balanced, all three collapse to plain OB.

For speed the members' weights are stored stacked along a leading member axis
and updated in lockstep "rounds": in round j every member whose k exceeds j
takes one gradient step. Because members are independent, this is exactly
sequential per-member training, but each round costs one numpy call instead
of fifteen.
"""
from __future__ import annotations

import math

import numpy as np

from .imbalance import ClassSizeTracker
from .labels import NEG, POS

OB = "OB"
OOB = "OOB"
UOB = "UOB"
SAMPLERS = (OB, OOB, UOB)

N_CLASSES = 2
_CLASS_INDEX = {POS: 0, NEG: 1}


def default_hidden_size(n_features: int) -> int:
    """Half the total of input and output widths, rounded half up."""
    return int(math.floor((n_features + N_CLASSES) / 2.0 + 0.5))


def poisson_k(lam: float, rng: np.random.Generator) -> int:
    """One Poisson-distributed replication count."""
    if lam < 0 or not math.isfinite(lam):
        raise ValueError(f"lambda must be finite and >= 0, got {lam}")
    return int(rng.poisson(lam))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


class MlpBank:
    """``m`` independent one-hidden-layer nets with stacked weights.

    Weight shapes: W1 (m, h, d), b1 (m, h), W2 (m, 2, h), b2 (m, 2); member i
    is initialized from its own seeded generator with all entries uniform on
    [-0.5, 0.5].
    """

    def __init__(self, n_features, member_seeds, lr=0.1, hidden=None):
        self.n_features = int(n_features)
        self.hidden = int(hidden) if hidden else default_hidden_size(n_features)
        self.lr = float(lr)
        self.n_members = len(member_seeds)
        self.init_weights(member_seeds)

    def init_weights(self, member_seeds) -> None:
        if len(member_seeds) != self.n_members:
            raise ValueError("seed count must match member count")
        m, h, d = self.n_members, self.hidden, self.n_features
        self.W1 = np.empty((m, h, d))
        self.b1 = np.empty((m, h))
        self.W2 = np.empty((m, N_CLASSES, h))
        self.b2 = np.empty((m, N_CLASSES))
        for i, seed in enumerate(member_seeds):
            rng = np.random.default_rng(seed)
            self.W1[i] = rng.uniform(-0.5, 0.5, (h, d))
            self.b1[i] = rng.uniform(-0.5, 0.5, h)
            self.W2[i] = rng.uniform(-0.5, 0.5, (N_CLASSES, h))
            self.b2[i] = rng.uniform(-0.5, 0.5, N_CLASSES)

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-member (hidden activations, class probabilities) for one input."""
        m, h = self.n_members, self.hidden
        z1 = (self.W1.reshape(m * h, self.n_features) @ x).reshape(m, h) + self.b1
        a1 = _sigmoid(z1)
        z2 = (self.W2 @ a1[:, :, None])[:, :, 0] + self.b2
        z2 -= z2.max(axis=1, keepdims=True)
        e = np.exp(z2)
        probs = e / e.sum(axis=1, keepdims=True)
        return a1, probs

    def positive_scores(self, x: np.ndarray) -> np.ndarray:
        """Per-member positive-class probabilities (side-effect free)."""
        return self.forward(x)[1][:, _CLASS_INDEX[POS]]

    def train_rounds(self, x: np.ndarray, label: int, ks: np.ndarray) -> None:
        """Give member i ``ks[i]`` sequential gradient steps on (x, label)."""
        if x.shape[0] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} features, got {x.shape[0]}"
            )
        cls = _CLASS_INDEX[label]
        max_k = int(ks.max()) if len(ks) else 0
        for j in range(max_k):
            active = ks > j
            a1, probs = self.forward(x)
            dz2 = probs  # dL/dz2 = probs - onehot(cls)
            dz2[:, cls] -= 1.0
            dz2 *= self.lr * active[:, None]
            da1 = (self.W2.transpose(0, 2, 1) @ dz2[:, :, None])[:, :, 0]
            self.W2 -= dz2[:, :, None] * a1[:, None, :]
            self.b2 -= dz2
            dz1 = da1 * a1 * (1.0 - a1)
            self.W1 -= dz1[:, :, None] * x[None, None, :]
            self.b1 -= dz1

    # -- flat parameter access (diagnostics / checkpointing) ------------------

    def get_flat(self) -> np.ndarray:
        return np.concatenate(
            [self.W1.ravel(), self.b1.ravel(), self.W2.ravel(), self.b2.ravel()]
        )

    def set_flat(self, vec: np.ndarray) -> None:
        parts = (self.W1, self.b1, self.W2, self.b2)
        offset = 0
        for arr in parts:
            arr.flat[:] = vec[offset : offset + arr.size]
            offset += arr.size
        if offset != vec.size:
            raise ValueError("flat vector length mismatch")


class MlpModel:
    """A single online MLP (the ensemble member contract, standalone)."""

    def __init__(self, n_features, seed=0, lr=0.1, hidden=None):
        self._seed = seed
        self._bank = MlpBank(n_features, [seed], lr=lr, hidden=hidden)

    @property
    def hidden(self) -> int:
        return self._bank.hidden

    def predict(self, features) -> tuple[float, float]:
        """(P(+1), P(-1)); sums to 1, no side effects."""
        x = np.asarray(features, dtype=float)
        probs = self._bank.forward(x)[1][0]
        return float(probs[_CLASS_INDEX[POS]]), float(probs[_CLASS_INDEX[NEG]])

    def train_one(self, features, label) -> None:
        """One stochastic-gradient step on the example."""
        x = np.asarray(features, dtype=float)
        self._bank.train_rounds(x, label, np.array([1]))

    def reset(self) -> None:
        self._bank.init_weights([self._seed])

    # -- gradient diagnostics -------------------------------------------------

    def loss(self, features, label) -> float:
        """Cross-entropy of the true class."""
        x = np.asarray(features, dtype=float)
        probs = self._bank.forward(x)[1][0]
        return float(-np.log(probs[_CLASS_INDEX[label]]))

    def gradient(self, features, label) -> np.ndarray:
        """Analytic d(loss)/d(params) as one flat vector (params unchanged)."""
        bank = self._bank
        x = np.asarray(features, dtype=float)
        cls = _CLASS_INDEX[label]
        a1, probs = bank.forward(x)
        dz2 = probs.copy()
        dz2[:, cls] -= 1.0
        dW2 = dz2[:, :, None] * a1[:, None, :]
        da1 = (bank.W2.transpose(0, 2, 1) @ dz2[:, :, None])[:, :, 0]
        dz1 = da1 * a1 * (1.0 - a1)
        dW1 = dz1[:, :, None] * x[None, None, :]
        return np.concatenate(
            [dW1.ravel(), dz1.ravel(), dW2.ravel(), dz2.ravel()]
        )

    def get_flat(self) -> np.ndarray:
        return self._bank.get_flat()

    def set_flat(self, vec: np.ndarray) -> None:
        self._bank.set_flat(vec)


class OnlineEnsemble:
    """Online bagging over MLP members with tracker-adaptive Poisson rates."""

    def __init__(
        self,
        n_features: int,
        tracker: ClassSizeTracker,
        sampler: str = OB,
        n_members: int = 15,
        seed: int = 0,
        lr: float = 0.1,
        hidden: int | None = None,
        designation_threshold: float = 1.5,
    ):
        if sampler not in SAMPLERS:
            raise ValueError(f"sampler must be one of {SAMPLERS}, got {sampler!r}")
        if n_members < 1:
            raise ValueError("need at least one member")
        self.sampler = sampler
        self.tracker = tracker
        self.designation_threshold = designation_threshold
        self.seed = seed
        self.reset_count = 0
        self._poisson_rng = np.random.default_rng([seed, 1])
        self._bank = MlpBank(
            n_features, self._member_seeds(n_members), lr=lr, hidden=hidden
        )

    def _member_seeds(self, n_members=None):
        n = self._bank.n_members if n_members is None else n_members
        return [[self.seed, self.reset_count, i] for i in range(n)]

    @property
    def n_members(self) -> int:
        return self._bank.n_members

    def sampling_rate(self, label: int) -> float:
        """The Poisson lambda this ensemble would use for an example of ``label``."""
        if self.sampler == OB:
            return 1.0
        status = self.tracker.status(self.designation_threshold)
        if status.minority is None:
            return 1.0
        w = self.tracker.w
        ref = status.majority if self.sampler == OOB else status.minority
        return w[ref] / w[label]

    def predict(self, features) -> tuple[int, float]:
        """(label, score): score is the mean positive-class probability.

        Ties at 0.5 go to the positive class.
        """
        x = np.asarray(features, dtype=float)
        score = float(self._bank.positive_scores(x).mean())
        return (POS if score >= 0.5 else NEG), score

    def train_one(self, features, label) -> None:
        """Poisson-replicated bagging update; the tracker must already have
        absorbed this example's label."""
        x = np.asarray(features, dtype=float)
        lam = self.sampling_rate(label)
        ks = self._poisson_rng.poisson(lam, self.n_members)
        if ks.any():
            self._bank.train_rounds(x, label, ks)

    def reset(self) -> None:
        """Fresh member weights from seeds derived off (seed, reset count)."""
        self.reset_count += 1
        self._bank.init_weights(self._member_seeds())

    # -- checkpointing (debug surface; format internal) -----------------------

    def save_weights(self, path) -> None:
        np.savez(
            path,
            W1=self._bank.W1,
            b1=self._bank.b1,
            W2=self._bank.W2,
            b2=self._bank.b2,
            reset_count=self.reset_count,
        )

    def load_weights(self, path) -> None:
        data = np.load(path)
        for name in ("W1", "b1", "W2", "b2"):
            arr = getattr(self._bank, name)
            if data[name].shape != arr.shape:
                raise ValueError(f"checkpoint shape mismatch for {name}")
            setattr(self._bank, name, data[name].copy())
        self.reset_count = int(data["reset_count"])
