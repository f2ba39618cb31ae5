"""Min/mean multi-target loss kernel and a desk-scale trainer.

One training example carries several equally valid target grids. Adversarial
terms are averaged over all targets so the critic sees every drawing style,
while the regression term takes the minimum over targets so the generator
commits to a single style instead of regressing to their blend. The trainer
here is a per-pixel logistic model, just big enough to show that behaviour.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

GAN_VARIANTS = ("original", "non_saturating")


@dataclass(frozen=True)
class LossConfig:
    """Weighting and numerical guards for the combined loss.

    gan_weight 0 turns the loss into plain L1 regression. epsilon_log clamps
    discriminator outputs away from {0, 1} before logs.
    """

    gan_weight: float = 0.0
    epsilon_log: float = 1e-12
    gan_variant: str = "original"

    def __post_init__(self):
        if self.gan_weight < 0:
            raise ValueError("gan_weight must be non-negative")
        if not 0.0 < self.epsilon_log < 1e-6:
            raise ValueError("epsilon_log must lie in (0, 1e-6)")
        if self.gan_variant not in GAN_VARIANTS:
            raise ValueError(f"gan_variant must be one of {GAN_VARIANTS}")


@dataclass(frozen=True)
class TargetSet:
    """The alternative target grids attached to one training input."""

    targets: np.ndarray  # (m, h, w)

    def __post_init__(self):
        arr = np.asarray(self.targets, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[0] < 1:
            raise ValueError("targets must be a non-empty stack of 2-D grids")
        if not np.isfinite(arr).all():
            raise ValueError("targets must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "targets", arr)

    @property
    def m(self) -> int:
        return self.targets.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.targets.shape[1:]


@dataclass(frozen=True)
class LossBreakdown:
    gan_terms: tuple[float, ...]
    l1_terms: tuple[float, ...]
    argmin_index: int
    total: float


class DiscriminatorOracle(ABC):
    """Abstract critic: a score in (0,1) plus the generator-side log gradient.

    Stands in for a trained discriminator; conditioning on the input image is
    folded into the oracle's own state.
    """

    @abstractmethod
    def value(self, fake: np.ndarray) -> float:
        """D(fake), clamped into [epsilon_log, 1 - epsilon_log] by the caller's config."""

    @abstractmethod
    def generator_log_grad(self, fake: np.ndarray, cfg: LossConfig) -> np.ndarray:
        """Gradient wrt fake of log(1 - D) (original) or -log(D) (non-saturating)."""


class LogisticPixelDiscriminator(DiscriminatorOracle):
    """Toy critic D(y) = sigmoid(<w, y> + b); enough structure for gradient checks."""

    def __init__(self, weights: np.ndarray, bias: float = 0.0):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)

    def value(self, fake: np.ndarray) -> float:
        a = float(np.sum(self.weights * fake)) + self.bias
        return 1.0 / (1.0 + math.exp(-a))

    def generator_log_grad(self, fake: np.ndarray, cfg: LossConfig) -> np.ndarray:
        d = self.value(fake)
        if not cfg.epsilon_log <= d <= 1.0 - cfg.epsilon_log:
            return np.zeros_like(self.weights)  # inside the clamp: the log term is flat
        if cfg.gan_variant == "original":
            return -d * self.weights  # d/dy log(1 - sigmoid(a)) = -sigmoid(a) * w
        return -(1.0 - d) * self.weights  # d/dy -log(sigmoid(a)) = -(1 - sigmoid(a)) * w


def l1_term(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean absolute difference over pixels."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    return float(np.mean(np.abs(pred - target)))


def gan_generator_term(d_fake: float, cfg: LossConfig) -> float:
    """Generator-side adversarial term for one discriminator score."""
    d = min(max(d_fake, cfg.epsilon_log), 1.0 - cfg.epsilon_log)
    if cfg.gan_variant == "original":
        return math.log(1.0 - d)
    return -math.log(d)


def combine_terms(
    gan_terms: "list[float] | tuple[float, ...]",
    l1_terms: "list[float] | tuple[float, ...]",
    cfg: LossConfig,
) -> tuple[float, int]:
    """Mean-aggregate the adversarial terms, min-aggregate the regression terms.

    Returns (total, argmin index); ties pick the lowest index.
    """
    if len(gan_terms) != len(l1_terms) or not l1_terms:
        raise ValueError("need one gan term and one l1 term per target")
    m = len(l1_terms)
    argmin = min(range(m), key=lambda j: (l1_terms[j], j))
    total = (cfg.gan_weight / m) * math.fsum(gan_terms) + l1_terms[argmin]
    return total, argmin


def mm_loss_eval(
    pred: np.ndarray, ts: TargetSet, gan_terms: "list[float] | tuple[float, ...]", cfg: LossConfig
) -> LossBreakdown:
    """Per-target terms and the combined value for one training example."""
    if len(gan_terms) != ts.m:
        raise ValueError(f"expected {ts.m} gan terms, got {len(gan_terms)}")
    pred = np.asarray(pred, dtype=np.float64)
    if pred.shape != ts.shape:
        raise ValueError(f"prediction shape {pred.shape} does not match targets {ts.shape}")
    l1s = [l1_term(pred, ts.targets[j]) for j in range(ts.m)]
    total, argmin = combine_terms(list(gan_terms), l1s, cfg)
    return LossBreakdown(tuple(float(g) for g in gan_terms), tuple(l1s), argmin, total)


def mm_loss_grad(
    pred: np.ndarray, ts: TargetSet, gan_grad: np.ndarray, cfg: LossConfig
) -> np.ndarray:
    """Subgradient of the combined loss wrt the prediction.

    Only the current argmin target feeds the regression part; sign(0) is 0.
    ``gan_grad`` is the oracle's generator-side log gradient, shared by every
    target, so its mean over targets is itself.
    """
    pred = np.asarray(pred, dtype=np.float64)
    gan_grad = np.asarray(gan_grad, dtype=np.float64)
    if pred.shape != ts.shape or gan_grad.shape != pred.shape:
        raise ValueError("prediction, targets, and gan gradient must share one shape")
    l1s = [l1_term(pred, ts.targets[j]) for j in range(ts.m)]
    argmin = min(range(ts.m), key=lambda j: (l1s[j], j))
    n = pred.size
    return cfg.gan_weight * gan_grad + np.sign(pred - ts.targets[argmin]) / n


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class TinyModel:
    """Per-pixel logistic model: one parameter grid per discrete input index."""

    params: dict[int, np.ndarray]

    def predict(self, input_index: int) -> np.ndarray:
        return _sigmoid(self.params[input_index])


def train_toy(
    examples: "list[tuple[int, TargetSet]]",
    mode: str,
    steps: int = 3000,
    learning_rate: float = 150.0,
    seed: int = 0,
) -> TinyModel:
    """Full-batch subgradient descent on min- or mean-aggregated L1 (no GAN term).

    mode="min" trains on min_j L1(pred, target_j); mode="mean" trains on the
    naive 1-to-many flattening, (1/m) sum_j L1. Deterministic given the seed.
    """
    if mode not in ("min", "mean"):
        raise ValueError('mode must be "min" or "mean"')
    if steps <= 0:
        raise ValueError("steps must be positive")
    if not examples:
        raise ValueError("no training examples")
    shapes = {ts.shape for _, ts in examples}
    if len(shapes) != 1:
        raise ValueError("all target sets must share one grid shape")
    shape = shapes.pop()

    rng = np.random.default_rng(seed)
    params: dict[int, np.ndarray] = {}
    for idx, _ in examples:
        if idx not in params:
            params[idx] = rng.normal(0.0, 0.01, size=shape)

    n = shape[0] * shape[1]
    for _ in range(steps):
        grads = {idx: np.zeros(shape) for idx in params}
        for idx, ts in examples:
            pred = _sigmoid(params[idx])
            if mode == "min":
                l1s = [l1_term(pred, ts.targets[j]) for j in range(ts.m)]
                j = min(range(ts.m), key=lambda k: (l1s[k], k))
                dpred = np.sign(pred - ts.targets[j]) / n
            else:
                dpred = np.zeros(shape)
                for j in range(ts.m):
                    dpred += np.sign(pred - ts.targets[j]) / n
                dpred /= ts.m
            grads[idx] += dpred * pred * (1.0 - pred)  # chain through the logistic
        for idx in params:
            params[idx] -= learning_rate * grads[idx]
    return TinyModel(params)


def three_line_fixture(size: int = 10, rows: tuple[int, ...] = (2, 5, 8)) -> TargetSet:
    """Targets that disagree maximally: one full horizontal line each.

    The pointwise median over the three targets is blank everywhere, so a
    mean-style regression is forced to output (near) nothing, while committing
    to any single target reproduces one clean line.
    """
    targets = np.zeros((len(rows), size, size))
    for j, r in enumerate(rows):
        targets[j, r, :] = 1.0
    return TargetSet(targets)
