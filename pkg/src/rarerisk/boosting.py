"""Cost-weighted stochastic gradient boosting on binary predictors.

The loss is the weighted negative Bernoulli log-likelihood where positive
observations carry weight `cost_ratio` and negatives weight 1. Each
iteration fits a depth-limited regression tree to the working residuals on
a random bag of rows. Splits are chosen to maximize the exact reduction in
weighted deviance, with each candidate child evaluated at its own optimal
log-odds increment; final leaf values are then refit as the exact per-leaf
minimizers over all training rows they contain. Because every leaf value
minimizes the convex per-leaf loss, a shrunken step can never increase the
training deviance, so the recorded deviance curve is non-increasing by
construction.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .dataset import DataSet
from .errors import FitError, StratificationError

__all__ = [
    "BoostConfig",
    "RegressionTree",
    "BoostModel",
    "ConfusionTable",
    "fit_boost",
    "fit_boost_cv",
    "cv_deviance_curve",
    "cv_select_trees",
    "predict_risk",
    "predict_margin",
    "confusion",
    "in_sample_importance",
    "partial_dependence",
    "save_model",
    "load_model",
]

# Leaf log-odds increments are clipped to this magnitude; pure leaves would
# otherwise diverge. exp(12) ~ 1.6e5 on the odds scale, far past saturation.
GAMMA_CLIP = 12.0
_STEP_CLIP = 4.0
_MARGIN_CLIP = 36.0  # sigmoid(36) is within 2e-16 of 1


@dataclass(frozen=True)
class BoostConfig:
    """Tuning constants for the boosted ensemble.

    cost_ratio multiplies the loss weight of positive-class observations;
    interaction_depth is the maximum number of splits along any
    root-to-leaf path.
    """

    cost_ratio: float = 10.0
    interaction_depth: int = 10
    shrinkage: float = 0.1
    bag_fraction: float = 0.5
    min_node: int = 10
    max_trees: int = 3000
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.cost_ratio <= 0:
            raise FitError("cost_ratio must be positive")
        if self.interaction_depth < 1:
            raise FitError("interaction_depth must be at least 1")
        if self.shrinkage <= 0:
            raise FitError("shrinkage must be positive")
        if not 0.0 < self.bag_fraction <= 1.0:
            raise FitError("bag_fraction must be in (0, 1]")
        if self.min_node < 1:
            raise FitError("min_node must be at least 1")
        if self.max_trees < 0:
            raise FitError("max_trees must be non-negative")
        if self.cv_folds < 2:
            raise FitError("cv_folds must be at least 2")
        if self.seed < 0:
            raise FitError("seed must be a non-negative integer")


@dataclass(frozen=True)
class RegressionTree:
    """Flat-array binary tree over {0,1} predictors.

    feature[k] is the split predictor of node k, or -1 for a leaf. A row
    goes left when the split predictor is 0 and right when it is 1.
    value[k] holds the (unshrunken) log-odds increment of leaf k.
    deviance_reduction[j] is the total exact deviance reduction credited
    to splits on predictor j while this tree was grown.
    """

    feature: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    deviance_reduction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "feature", np.asarray(self.feature, np.int32))
        object.__setattr__(self, "left", np.asarray(self.left, np.int32))
        object.__setattr__(self, "right", np.asarray(self.right, np.int32))
        object.__setattr__(self, "value", np.asarray(self.value, np.float64))
        object.__setattr__(
            self,
            "deviance_reduction",
            np.asarray(self.deviance_reduction, np.float64),
        )
        leaves = self.feature < 0
        if not np.all(np.isfinite(self.value[leaves])):
            raise FitError("leaf values must be finite")
        if np.any(self.deviance_reduction < 0):
            raise FitError("deviance reductions must be non-negative")

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf value per row of X."""
        return self.value[self.leaf_index(X)]

    def leaf_index(self, X: np.ndarray) -> np.ndarray:
        n = X.shape[0]
        idx = np.zeros(n, dtype=np.int32)
        while True:
            f = self.feature[idx]
            internal = f >= 0
            if not internal.any():
                return idx
            cols = np.where(internal, f, 0)
            xv = X[np.arange(n), cols]
            nxt = np.where(xv == 1, self.right[idx], self.left[idx])
            idx = np.where(internal, nxt, idx)


@dataclass(frozen=True)
class BoostModel:
    """Additive log-odds ensemble: intercept + shrinkage * sum of trees."""

    intercept: float
    trees: tuple[RegressionTree, ...]
    shrinkage: float
    n_trees_used: int
    config: BoostConfig
    n_predictors: int
    train_deviance: np.ndarray = field(default_factory=lambda: np.empty(0))
    cv_curve: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if self.n_predictors < 1:
            raise FitError("n_predictors must be at least 1")
        if not 0 <= self.n_trees_used <= len(self.trees):
            raise FitError("n_trees_used must be between 0 and the tree count")
        if self.cv_curve is not None and len(self.cv_curve) != len(self.trees):
            raise FitError("cv_curve length must equal the tree count")
        for tree in self.trees:
            if len(tree.deviance_reduction) != self.n_predictors:
                raise FitError("tree bookkeeping disagrees with n_predictors")

    @property
    def p(self) -> int:
        return self.n_predictors

    def margin(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X)
        if X.ndim != 2:
            raise FitError("X must be a 2-d matrix")
        if X.shape[1] != self.p:
            raise FitError(
                f"X has {X.shape[1]} columns, model expects {self.p}"
            )
        total = np.full(X.shape[0], self.intercept, dtype=np.float64)
        for tree in self.trees[: self.n_trees_used]:
            total += self.shrinkage * tree.apply(X)
        return total

    def predict(self, X: np.ndarray) -> np.ndarray:
        return expit(self.margin(X))


# ---------------------------------------------------------------------------
# Loss helpers


def _loss_terms(y: np.ndarray, F: np.ndarray) -> np.ndarray:
    # Per-point negative log-likelihood log(1+e^F) - y*F, stable for any F.
    return np.logaddexp(0.0, F) - y * F


def weighted_deviance(y: np.ndarray, w: np.ndarray, F: np.ndarray) -> float:
    """Weighted mean Bernoulli deviance (-2 log-likelihood per unit weight)."""
    return float(2.0 * np.sum(w * _loss_terms(y, F)) / np.sum(w))


def _deviance_sum(y: np.ndarray, w: np.ndarray, F: np.ndarray) -> float:
    return float(2.0 * np.sum(w * _loss_terms(y, F)))


def _leaf_optimum(y: np.ndarray, w: np.ndarray, F: np.ndarray) -> float:
    """Exact minimizer of the leaf's weighted loss over a clipped interval.

    Damped Newton iteration; the returned gamma never increases the leaf
    loss relative to gamma = 0.
    """
    gamma = 0.0
    for _ in range(80):
        p = expit(F + gamma)
        g = float(np.sum(w * (y - p)))
        h = float(np.sum(w * p * (1.0 - p)))
        if h <= 1e-300:
            break
        step = min(max(g / h, -_STEP_CLIP), _STEP_CLIP)
        new = min(max(gamma + step, -GAMMA_CLIP), GAMMA_CLIP)
        if abs(new - gamma) < 1e-12:
            gamma = new
            break
        gamma = new
    if gamma != 0.0:
        base = _deviance_sum(y, w, F)
        for _ in range(60):
            if _deviance_sum(y, w, F + gamma) <= base:
                break
            gamma *= 0.5
        else:
            gamma = 0.0
    return gamma


def _weights(y: np.ndarray, cost_ratio: float) -> np.ndarray:
    return np.where(y == 1, cost_ratio, 1.0)


# ---------------------------------------------------------------------------
# Tree growing


def _candidate_split(
    Xs: np.ndarray,
    ys: np.ndarray,
    ws: np.ndarray,
    Fs: np.ndarray,
    min_node: int,
):
    """Evaluate every predictor as a split of this node.

    Returns (gains, gamma0, gamma1, valid): per-predictor exact deviance
    reduction relative to the node's own optimal constant, the optimal
    log-odds increments of both children, and a mask of splits whose
    children both meet the minimum node size. Invalid candidates get a
    gain of -inf.
    """
    m, p = Xs.shape
    n1 = Xs.sum(axis=0, dtype=np.int64)
    valid = (n1 >= min_node) & (m - n1 >= min_node)
    if not valid.any():
        return None
    Xv = Xs[:, valid].astype(np.float64)
    wcol = ws[:, None]

    # sigma(F+gamma) is formed as E*t/(1+E*t) with E = exp(F) cached, so the
    # per-candidate Newton iterations below are exp-free in the data
    # dimension. Clipping F only matters past sigmoid saturation.
    Fc = np.clip(Fs, -_MARGIN_CLIP, _MARGIN_CLIP)
    E = np.exp(Fc)
    p0 = E / (1.0 + E)
    wy = ws * ys
    wp = ws * p0
    wh = wp * (1.0 - p0)
    wy1 = wy @ Xv
    wy0 = wy.sum() - wy1
    wp1 = wp @ Xv
    wp0 = wp.sum() - wp1
    h1 = wh @ Xv
    h0 = wh.sum() - h1

    # Warm start from one aggregate Newton step, then damped Newton on all
    # (candidate, side) pairs at once until the increments converge.
    g0 = np.clip((wy0 - wp0) / np.maximum(h0, 1e-300), -_STEP_CLIP, _STEP_CLIP)
    g1 = np.clip((wy1 - wp1) / np.maximum(h1, 1e-300), -_STEP_CLIP, _STEP_CLIP)
    Ecol = E[:, None]
    for _ in range(40):
        T = np.exp(g0)[None, :] + (np.exp(g1) - np.exp(g0))[None, :] * Xv
        S = Ecol * T
        P = S / (1.0 + S)
        WP = wcol * P
        wp1 = np.einsum("ij,ij->j", WP, Xv)
        wp0 = WP.sum(axis=0) - wp1
        H = WP * (1.0 - P)
        h1 = np.einsum("ij,ij->j", H, Xv)
        h0 = H.sum(axis=0) - h1
        step0 = np.clip((wy0 - wp0) / np.maximum(h0, 1e-300), -_STEP_CLIP, _STEP_CLIP)
        step1 = np.clip((wy1 - wp1) / np.maximum(h1, 1e-300), -_STEP_CLIP, _STEP_CLIP)
        g0 = np.clip(g0 + step0, -GAMMA_CLIP, GAMMA_CLIP)
        g1 = np.clip(g1 + step1, -GAMMA_CLIP, GAMMA_CLIP)
        if max(np.abs(step0).max(), np.abs(step1).max()) < 1e-9:
            break

    # Exact post-split deviance at the optima. With S = exp(Fc + gamma),
    # the per-point loss log(1+e^z) - y*z equals log1p(S) - y*(Fc+gamma).
    Z = (Fc[:, None] + g0[None, :]) + (g1 - g0)[None, :] * Xv
    S = Ecol * (np.exp(g0)[None, :] + (np.exp(g1) - np.exp(g0))[None, :] * Xv)
    L = wcol * (np.log1p(S) - ys[:, None] * Z)
    dev1 = 2.0 * np.einsum("ij,ij->j", L, Xv)
    dev0 = 2.0 * L.sum(axis=0) - dev1

    # Parent-as-leaf baseline, same stable formulation for consistency.
    parent_gamma = _leaf_optimum(ys, ws, Fs)
    zp = Fc + parent_gamma
    parent_dev = 2.0 * float(np.sum(ws * (np.log1p(E * math.exp(parent_gamma)) - ys * zp)))

    gains = np.full(p, -np.inf)
    gains[valid] = parent_dev - (dev0 + dev1)
    gamma0 = np.zeros(p)
    gamma1 = np.zeros(p)
    gamma0[valid] = g0
    gamma1[valid] = g1
    return gains, gamma0, gamma1, valid


def _grow_tree(
    Xb: np.ndarray,
    yb: np.ndarray,
    wb: np.ndarray,
    Fb: np.ndarray,
    config: BoostConfig,
    p: int,
):
    """Grow one tree on the bag; leaf values are provisional (bag optima)."""
    feature: list[int] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []
    reduction = np.zeros(p)

    def new_node() -> int:
        feature.append(-1)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    # (node id, row indices into the bag, depth)
    root = new_node()
    stack = [(root, np.arange(len(yb)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        ys, ws, Fs = yb[rows], wb[rows], Fb[rows]
        split = None
        if depth < config.interaction_depth and len(rows) >= 2 * config.min_node:
            split = _candidate_split(Xb[rows], ys, ws, Fs, config.min_node)
        if split is not None:
            gains, g0, g1, _ = split
            j = int(np.argmax(gains))
            if gains[j] > 1e-12:
                reduction[j] += gains[j]
                feature[node] = j
                mask = Xb[rows, j] == 1
                lid, rid = new_node(), new_node()
                left[node], right[node] = lid, rid
                value[lid], value[rid] = float(g0[j]), float(g1[j])
                stack.append((lid, rows[~mask], depth + 1))
                stack.append((rid, rows[mask], depth + 1))
                continue
        value[node] = _leaf_optimum(ys, ws, Fs)

    return RegressionTree(
        np.array(feature, np.int32),
        np.array(left, np.int32),
        np.array(right, np.int32),
        np.array(value, np.float64),
        reduction,
    )


def _refit_leaves(
    tree: RegressionTree,
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    F: np.ndarray,
) -> tuple[RegressionTree, np.ndarray]:
    """Refit every leaf value as the exact optimum over the full training
    rows it receives. Returns the updated tree and each row's leaf value."""
    idx = tree.leaf_index(X)
    values = tree.value.copy()
    for leaf in np.unique(idx):
        rows = idx == leaf
        values[leaf] = _leaf_optimum(y[rows], w[rows], F[rows])
    refit = dataclasses.replace(tree, value=values)
    return refit, values[idx]


def fit_boost(train: DataSet, config: BoostConfig) -> BoostModel:
    """Fit the cost-weighted boosted ensemble on the training data."""
    y = train.y.astype(np.float64)
    if y.min() == y.max():
        raise FitError("response contains a single class; cannot boost")
    if config.min_node > train.n:
        raise FitError(
            f"min_node={config.min_node} exceeds the {train.n} training rows"
        )

    X = train.X
    w = _weights(y, config.cost_ratio)
    wsum = float(w.sum())
    wmean = float(np.dot(w, y) / wsum)
    intercept = math.log(wmean / (1.0 - wmean))

    rng = np.random.default_rng(config.seed)
    F = np.full(train.n, intercept)
    n_bag = max(1, int(config.bag_fraction * train.n))
    trees: list[RegressionTree] = []
    train_dev = np.empty(config.max_trees)

    for t in range(config.max_trees):
        if n_bag < train.n:
            bag = np.sort(rng.choice(train.n, size=n_bag, replace=False))
        else:
            bag = np.arange(train.n)
        tree = _grow_tree(X[bag], y[bag], w[bag], F[bag], config, train.p)
        tree, row_values = _refit_leaves(tree, X, y, w, F)
        F = F + config.shrinkage * row_values
        trees.append(tree)
        train_dev[t] = 2.0 * float(np.sum(w * _loss_terms(y, F))) / wsum

    return BoostModel(
        intercept=intercept,
        trees=tuple(trees),
        shrinkage=config.shrinkage,
        n_trees_used=len(trees),
        config=config,
        n_predictors=train.p,
        train_deviance=train_dev,
    )


# ---------------------------------------------------------------------------
# Cross-validation


def _stratified_folds(y: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Fold label per row; every fold receives both classes."""
    pos = np.flatnonzero(y == 1)
    neg = np.flatnonzero(y == 0)
    if len(pos) < k or len(neg) < k:
        raise StratificationError(
            f"cannot stratify {len(pos)} positives / {len(neg)} negatives "
            f"into {k} folds"
        )
    folds = np.empty(len(y), dtype=np.int32)
    folds[rng.permutation(pos)] = np.arange(len(pos)) % k
    folds[rng.permutation(neg)] = np.arange(len(neg)) % k
    return folds


def _staged_deviance_sums(
    model: BoostModel, X: np.ndarray, y: np.ndarray, w: np.ndarray
) -> np.ndarray:
    """Total weighted deviance on (X, y) after each successive tree."""
    F = np.full(X.shape[0], model.intercept)
    out = np.empty(len(model.trees))
    for t, tree in enumerate(model.trees):
        F += model.shrinkage * tree.apply(X)
        out[t] = 2.0 * float(np.sum(w * _loss_terms(y, F)))
    return out


def cv_deviance_curve(train: DataSet, config: BoostConfig) -> np.ndarray:
    """Mean held-out weighted deviance after each boosting iteration.

    Folds are stratified by class; fold assignment and the per-fold refits
    all derive deterministically from config.seed.
    """
    if config.max_trees < 1:
        raise FitError("cross-validation needs max_trees >= 1")
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.cv_folds + 1)
    fold_rng = np.random.default_rng(children[0])
    folds = _stratified_folds(train.y, config.cv_folds, fold_rng)

    dev_total = np.zeros(config.max_trees)
    weight_total = 0.0
    for k in range(config.cv_folds):
        held = folds == k
        sub = train.take(np.flatnonzero(~held))
        fold_seed = int(children[k + 1].generate_state(1, np.uint64)[0])
        fold_cfg = dataclasses.replace(config, seed=fold_seed)
        model = fit_boost(sub, fold_cfg)
        yk = train.y[held].astype(np.float64)
        wk = _weights(yk, config.cost_ratio)
        dev_total += _staged_deviance_sums(model, train.X[held], yk, wk)
        weight_total += float(wk.sum())
    return dev_total / weight_total


def cv_select_trees(train: DataSet, config: BoostConfig) -> int:
    """Iteration count minimizing mean held-out deviance (ties: fewer)."""
    curve = cv_deviance_curve(train, config)
    return int(np.argmin(curve)) + 1


def fit_boost_cv(train: DataSet, config: BoostConfig) -> BoostModel:
    """Fit on all training rows with the CV-selected iteration count."""
    curve = cv_deviance_curve(train, config)
    n_sel = int(np.argmin(curve)) + 1
    model = fit_boost(train, config)
    return dataclasses.replace(model, n_trees_used=n_sel, cv_curve=curve)


# ---------------------------------------------------------------------------
# Prediction and summaries


def predict_margin(model: BoostModel, X: np.ndarray) -> np.ndarray:
    """Log-odds scores: intercept + shrinkage * sum of used tree outputs."""
    return model.margin(X)


def predict_risk(model: BoostModel, X: np.ndarray) -> np.ndarray:
    """Predicted event probabilities, one per row of X."""
    return model.predict(X)


def _rate(num: float, den: float) -> float:
    return num / den if den > 0 else math.nan


@dataclass(frozen=True)
class ConfusionTable:
    """Counts of a thresholded classifier; rows = actual, columns = forecast.

    Classification errors are row-wise misclassification rates; forecasting
    errors are column-wise wrong-forecast rates. Degenerate denominators
    yield NaN.
    """

    tn: int
    fp: int
    fn: int
    tp: int
    threshold: float = 0.5

    @property
    def classification_error_neg(self) -> float:
        return _rate(self.fp, self.tn + self.fp)

    @property
    def classification_error_pos(self) -> float:
        return _rate(self.fn, self.fn + self.tp)

    @property
    def forecast_error_neg(self) -> float:
        return _rate(self.fn, self.tn + self.fn)

    @property
    def forecast_error_pos(self) -> float:
        return _rate(self.fp, self.fp + self.tp)

    @property
    def achieved_cost_ratio(self) -> float:
        """Realized false-positive to false-negative ratio."""
        if self.fn == 0:
            return math.nan if self.fp == 0 else math.inf
        return self.fp / self.fn

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "tp": self.tp,
            "classification_error_neg": self.classification_error_neg,
            "classification_error_pos": self.classification_error_pos,
            "forecast_error_neg": self.forecast_error_neg,
            "forecast_error_pos": self.forecast_error_pos,
            "achieved_cost_ratio": self.achieved_cost_ratio,
        }


def confusion(
    model: BoostModel, ds: DataSet, threshold: float = 0.5
) -> ConfusionTable:
    """Confusion counts at the given probability threshold.

    A row is forecast positive iff its predicted probability is strictly
    greater than the threshold; exact ties classify negative.
    """
    probs = model.predict(ds.X)
    pred = probs > threshold
    actual = ds.y == 1
    return ConfusionTable(
        tn=int(np.sum(~actual & ~pred)),
        fp=int(np.sum(~actual & pred)),
        fn=int(np.sum(actual & ~pred)),
        tp=int(np.sum(actual & pred)),
        threshold=threshold,
    )


def in_sample_importance(model: BoostModel) -> np.ndarray:
    """Per-predictor share of total deviance reduction, summing to 100.

    Predictors never chosen by any split score exactly zero. An
    intercept-only model has no reductions; the result is all zeros with
    a warning.
    """
    total = np.zeros(model.p)
    for tree in model.trees[: model.n_trees_used]:
        total += tree.deviance_reduction
    grand = total.sum()
    if grand <= 0.0:
        warnings.warn(
            "no deviance reduction recorded; importance is all zeros",
            RuntimeWarning,
            stacklevel=2,
        )
        return total
    return 100.0 * total / grand


def partial_dependence(
    model: BoostModel, ds: DataSet, j: int
) -> tuple[float, float, float]:
    """Mean predicted risk with predictor j forced off and on.

    Returns (p0, p1, delta) where delta = p1 - p0.
    """
    if not 0 <= j < ds.p:
        raise FitError(f"predictor index {j} out of range for p={ds.p}")
    X = np.array(ds.X)
    X[:, j] = 0
    p0 = float(model.predict(X).mean())
    X[:, j] = 1
    p1 = float(model.predict(X).mean())
    return p0, p1, p1 - p0


# ---------------------------------------------------------------------------
# Serialization

_FORMAT = "rarerisk.boost_model"
_VERSION = 1


def model_to_dict(model: BoostModel) -> dict:
    return {
        "format": _FORMAT,
        "version": _VERSION,
        "intercept": model.intercept,
        "shrinkage": model.shrinkage,
        "n_trees_used": model.n_trees_used,
        "n_predictors": model.n_predictors,
        "config": dataclasses.asdict(model.config),
        "train_deviance": model.train_deviance.tolist(),
        "cv_curve": None if model.cv_curve is None else model.cv_curve.tolist(),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": t.value.tolist(),
                "deviance_reduction": t.deviance_reduction.tolist(),
            }
            for t in model.trees
        ],
    }


def model_from_dict(data: dict) -> BoostModel:
    if data.get("format") != _FORMAT:
        raise FitError(f"not a boost model document: {data.get('format')!r}")
    if data.get("version") != _VERSION:
        raise FitError(f"unsupported model version {data.get('version')!r}")
    trees = tuple(
        RegressionTree(
            np.array(t["feature"], np.int32),
            np.array(t["left"], np.int32),
            np.array(t["right"], np.int32),
            np.array(t["value"], np.float64),
            np.array(t["deviance_reduction"], np.float64),
        )
        for t in data["trees"]
    )
    cv = data.get("cv_curve")
    return BoostModel(
        intercept=float(data["intercept"]),
        trees=trees,
        shrinkage=float(data["shrinkage"]),
        n_trees_used=int(data["n_trees_used"]),
        config=BoostConfig(**data["config"]),
        n_predictors=int(data["n_predictors"]),
        train_deviance=np.array(data["train_deviance"], np.float64),
        cv_curve=None if cv is None else np.array(cv, np.float64),
    )


def save_model(model: BoostModel, path: str | Path) -> None:
    """Write the model as JSON; floats round-trip bit-exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)
        fh.write("\n")


def load_model(path: str | Path) -> BoostModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
