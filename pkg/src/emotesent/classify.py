"""From-scratch ternary sentiment classifiers over sparse count vectors.

Algorithms: multinomial Naive Bayes (Laplace alpha=1), maximum entropy
(multinomial logistic regression, batch gradient descent, L2), linear SVM
(Pegasos-style SGD, one-vs-rest), and a random forest (Gini, bootstrap,
one-vs-rest) with mean-decrease-in-impurity feature importances.

Prediction ties are broken by the fixed class order negative < neutral <
positive (the earlier class wins).
"""

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .corpus import CLASS_INDEX, CLASS_ORDER, SentimentLabel
from .errors import EvaluationError, TrainingError
from .features import FeatureKind

MODEL_FORMAT_VERSION = 1


def to_dense(vectors, n_features):
    X = np.zeros((len(vectors), n_features), dtype=np.float64)
    for row, vec in enumerate(vectors):
        for idx, count in vec.items():
            X[row, idx] = count
    return X


def _labels_to_indices(labels):
    return np.array([CLASS_INDEX[lab] for lab in labels], dtype=np.int64)


# ---------------------------------------------------------------------------
# Naive Bayes
# ---------------------------------------------------------------------------

class NaiveBayes:
    """Multinomial NB with Laplace smoothing, natively multiclass."""

    def __init__(self, alpha=1.0):
        self.alpha = alpha
        self.log_prior = None     # (3,), -inf for absent classes
        self.log_lik = None       # (3, F)
        self.n_features = 0

    def fit(self, vectors, labels, n_features):
        self.n_features = n_features
        y = _labels_to_indices(labels)
        class_counts = np.bincount(y, minlength=3).astype(np.float64)
        feat_counts = np.zeros((3, n_features), dtype=np.float64)
        for vec, ci in zip(vectors, y):
            for idx, count in vec.items():
                feat_counts[ci, idx] += count
        with np.errstate(divide="ignore"):
            self.log_prior = np.log(class_counts / len(vectors))
        totals = feat_counts.sum(axis=1, keepdims=True)
        self.log_lik = np.log(feat_counts + self.alpha) - np.log(totals + self.alpha * n_features)
        return self

    def scores(self, vec):
        s = self.log_prior.copy()
        for idx, count in vec.items():
            s += count * self.log_lik[:, idx]
        return s

    def to_json_dict(self):
        return {"alpha": self.alpha, "n_features": self.n_features,
                "log_prior": self.log_prior.tolist(),
                "log_lik": self.log_lik.tolist()}

    @classmethod
    def from_json_dict(cls, blob):
        m = cls(alpha=blob["alpha"])
        m.n_features = blob["n_features"]
        m.log_prior = np.array(blob["log_prior"])
        m.log_lik = np.array(blob["log_lik"])
        return m


# ---------------------------------------------------------------------------
# Maximum entropy (multinomial logistic regression)
# ---------------------------------------------------------------------------

def softmax_loss_and_grad(W, b, X, Y, l2):
    """Mean cross-entropy + L2 penalty on W (not b), with analytic gradients.

    W: (3, F), b: (3,), X: (n, F), Y: one-hot (n, 3).
    """
    n = X.shape[0]
    logits = X @ W.T + b
    logits -= logits.max(axis=1, keepdims=True)
    expz = np.exp(logits)
    probs = expz / expz.sum(axis=1, keepdims=True)
    logp = logits - np.log(expz.sum(axis=1, keepdims=True))
    loss = -np.sum(Y * logp) / n + 0.5 * l2 * np.sum(W * W)
    diff = (probs - Y) / n
    grad_W = diff.T @ X + l2 * W
    grad_b = diff.sum(axis=0)
    return loss, grad_W, grad_b


class MaxEnt:
    """Softmax regression trained by full-batch gradient descent."""

    def __init__(self, l2=1e-4, lr=0.5, tol=1e-6, max_epochs=1000):
        self.l2 = l2
        self.lr = lr
        self.tol = tol
        self.max_epochs = max_epochs
        self.W = None
        self.b = None
        self.n_features = 0

    def fit(self, vectors, labels, n_features):
        self.n_features = n_features
        X = to_dense(vectors, n_features)
        y = _labels_to_indices(labels)
        Y = np.zeros((len(y), 3))
        Y[np.arange(len(y)), y] = 1.0
        self.W = np.zeros((3, n_features))
        self.b = np.zeros(3)
        prev_loss = None
        for _ in range(self.max_epochs):
            loss, gW, gb = softmax_loss_and_grad(self.W, self.b, X, Y, self.l2)
            self.W -= self.lr * gW
            self.b -= self.lr * gb
            if prev_loss is not None and abs(prev_loss - loss) < self.tol:
                break
            prev_loss = loss
        return self

    def scores(self, vec):
        s = self.b.copy()
        for idx, count in vec.items():
            s += count * self.W[:, idx]
        return s

    def to_json_dict(self):
        return {"l2": self.l2, "lr": self.lr, "n_features": self.n_features,
                "W": self.W.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_json_dict(cls, blob):
        m = cls(l2=blob["l2"], lr=blob["lr"])
        m.n_features = blob["n_features"]
        m.W = np.array(blob["W"])
        m.b = np.array(blob["b"])
        return m


# ---------------------------------------------------------------------------
# Linear SVM (Pegasos, one-vs-rest)
# ---------------------------------------------------------------------------

class LinearSVM:
    """One-vs-rest linear SVM trained with Pegasos-style SGD.

    lambda = 1 / (n * C); the bias is updated alongside the weights but not
    regularized. Scores are raw margins.
    """

    def __init__(self, C=1.0, epochs=100, seed=0):
        self.C = C
        self.epochs = epochs
        self.seed = seed
        self.W = None  # (3, F); rows of absent classes stay zero
        self.b = None
        self.present = None  # bool (3,)
        self.n_features = 0

    def fit(self, vectors, labels, n_features):
        self.n_features = n_features
        X = to_dense(vectors, n_features)
        y = _labels_to_indices(labels)
        n = len(y)
        lam = 1.0 / (n * self.C)
        self.W = np.zeros((3, n_features))
        self.b = np.zeros(3)
        self.present = np.zeros(3, dtype=bool)
        for ci in range(3):
            if not np.any(y == ci):
                continue
            self.present[ci] = True
            target = np.where(y == ci, 1.0, -1.0)
            rng = np.random.default_rng([self.seed, ci])
            # bias handled as a regularized constant feature; an unregularized
            # bias at step size 1/(lam*t) is unstable early on
            w = np.zeros(n_features + 1)
            Xb = np.hstack([X, np.ones((n, 1))])
            t = 0
            for _ in range(self.epochs):
                for i in rng.permutation(n):
                    t += 1
                    eta = 1.0 / (lam * t)
                    margin = target[i] * (Xb[i] @ w)
                    w *= (1.0 - eta * lam)
                    if margin < 1.0:
                        w += eta * target[i] * Xb[i]
            self.W[ci] = w[:-1]
            self.b[ci] = w[-1]
        return self

    def scores(self, vec):
        s = self.b.copy()
        for idx, count in vec.items():
            s += count * self.W[:, idx]
        s[~self.present] = -np.inf
        return s

    def to_json_dict(self):
        return {"C": self.C, "epochs": self.epochs, "seed": self.seed,
                "n_features": self.n_features, "W": self.W.tolist(),
                "b": self.b.tolist(), "present": self.present.tolist()}

    @classmethod
    def from_json_dict(cls, blob):
        m = cls(C=blob["C"], epochs=blob["epochs"], seed=blob["seed"])
        m.n_features = blob["n_features"]
        m.W = np.array(blob["W"])
        m.b = np.array(blob["b"])
        m.present = np.array(blob["present"], dtype=bool)
        return m


# ---------------------------------------------------------------------------
# Random forest (one-vs-rest binary forests)
# ---------------------------------------------------------------------------

def _gini(pos, total):
    if total == 0:
        return 0.0
    p = pos / total
    return 2.0 * p * (1.0 - p)


class _Tree:
    """A single binary classification tree (labels 0/1) stored as parallel
    node arrays built depth-first."""

    __slots__ = ("feature", "threshold", "left", "right", "pos_frac",
                 "importance", "_n_root")

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.pos_frac = []
        self.importance = {}

    def _new_node(self):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.pos_frac.append(0.0)
        return len(self.feature) - 1

    def fit(self, X, y, rng, max_features, max_depth, min_leaf, n_root):
        self._n_root = n_root
        self._build(X, y, np.arange(len(y)), rng, max_features, max_depth,
                    min_leaf, depth=0)
        return self

    def _build(self, X, y, idx, rng, max_features, max_depth, min_leaf, depth):
        node = self._new_node()
        sub_y = y[idx]
        pos = int(sub_y.sum())
        total = len(idx)
        self.pos_frac[node] = pos / total
        impurity = _gini(pos, total)
        if (impurity == 0.0 or total < 2 * min_leaf
                or (max_depth is not None and depth >= max_depth)):
            return node
        n_feat = X.shape[1]
        feats = rng.choice(n_feat, size=min(max_features, n_feat), replace=False)
        best = None  # (weighted_impurity, feature, threshold, left_mask)
        for f in feats:
            col = X[idx, f]
            order = np.argsort(col, kind="stable")
            col_sorted = col[order]
            y_sorted = sub_y[order]
            distinct = np.nonzero(col_sorted[1:] > col_sorted[:-1])[0]
            if len(distinct) == 0:
                continue
            pos_cum = np.cumsum(y_sorted)
            for cut in distinct:
                n_l = cut + 1
                n_r = total - n_l
                if n_l < min_leaf or n_r < min_leaf:
                    continue
                pos_l = pos_cum[cut]
                pos_r = pos - pos_l
                w_imp = (n_l * _gini(pos_l, n_l) + n_r * _gini(pos_r, n_r)) / total
                if best is None or w_imp < best[0]:
                    thr = 0.5 * (col_sorted[cut] + col_sorted[cut + 1])
                    best = (w_imp, f, thr)
        if best is None:
            return node
        w_imp, f, thr = best
        decrease = (total / self._n_root) * (impurity - w_imp)
        self.importance[f] = self.importance.get(f, 0.0) + decrease
        self.feature[node] = int(f)
        self.threshold[node] = float(thr)
        left_idx = idx[X[idx, f] <= thr]
        right_idx = idx[X[idx, f] > thr]
        self.left[node] = self._build(X, y, left_idx, rng, max_features,
                                      max_depth, min_leaf, depth + 1)
        self.right[node] = self._build(X, y, right_idx, rng, max_features,
                                       max_depth, min_leaf, depth + 1)
        return node

    def predict_pos_frac(self, x):
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return self.pos_frac[node]

    def to_json_dict(self):
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left, "right": self.right,
                "pos_frac": self.pos_frac,
                "importance": {str(k): v for k, v in self.importance.items()}}

    @classmethod
    def from_json_dict(cls, blob):
        t = cls()
        t.feature = list(blob["feature"])
        t.threshold = list(blob["threshold"])
        t.left = list(blob["left"])
        t.right = list(blob["right"])
        t.pos_frac = list(blob["pos_frac"])
        t.importance = {int(k): v for k, v in blob["importance"].items()}
        return t


class RandomForest:
    """One-vs-rest forest: one binary forest per class present in training.

    Every tree derives its RNG stream from (seed, class, tree index), so the
    forest is identical regardless of how many workers build it.
    """

    def __init__(self, n_trees=100, max_depth=None, min_leaf=1,
                 max_features="sqrt", seed=0, n_jobs=1):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.seed = seed
        self.n_jobs = n_jobs
        self.forests = {}  # class index -> list[_Tree]
        self.n_features = 0

    def _resolve_max_features(self, n_features):
        if self.max_features == "sqrt":
            return max(1, math.ceil(math.sqrt(n_features)))
        if self.max_features is None:
            return n_features
        return int(self.max_features)

    def fit(self, vectors, labels, n_features):
        self.n_features = n_features
        X = to_dense(vectors, n_features)
        y = _labels_to_indices(labels)
        mf = self._resolve_max_features(n_features)

        def build_tree(ci, target, t):
            rng = np.random.default_rng([self.seed, ci, t])
            boot = rng.integers(0, len(target), size=len(target))
            return _Tree().fit(X[boot], target[boot], rng, mf,
                               self.max_depth, self.min_leaf, len(target))

        for ci in range(3):
            if not np.any(y == ci):
                continue
            target = (y == ci).astype(np.int64)
            if self.n_jobs > 1:
                with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                    trees = list(pool.map(lambda t: build_tree(ci, target, t),
                                          range(self.n_trees)))
            else:
                trees = [build_tree(ci, target, t) for t in range(self.n_trees)]
            self.forests[ci] = trees
        return self

    def scores(self, vec):
        """Per-class positive vote fraction; absent classes score -inf."""
        x = np.zeros(self.n_features)
        for idx, count in vec.items():
            x[idx] = count
        s = np.full(3, -np.inf)
        for ci, trees in self.forests.items():
            votes = sum(1 for t in trees if t.predict_pos_frac(x) > 0.5)
            s[ci] = votes / len(trees)
        return s

    def head_importances(self):
        """Per one-vs-rest head: normalized mean-decrease-in-impurity."""
        out = {}
        for ci, trees in self.forests.items():
            imp = np.zeros(self.n_features)
            for t in trees:
                for f, v in t.importance.items():
                    imp[f] += v
            total = imp.sum()
            if total > 0:
                imp /= total
            out[ci] = imp
        return out

    def to_json_dict(self):
        return {"n_trees": self.n_trees, "max_depth": self.max_depth,
                "min_leaf": self.min_leaf, "max_features": self.max_features,
                "seed": self.seed, "n_features": self.n_features,
                "forests": {str(ci): [t.to_json_dict() for t in trees]
                            for ci, trees in self.forests.items()}}

    @classmethod
    def from_json_dict(cls, blob):
        m = cls(n_trees=blob["n_trees"], max_depth=blob["max_depth"],
                min_leaf=blob["min_leaf"], max_features=blob["max_features"],
                seed=blob["seed"])
        m.n_features = blob["n_features"]
        m.forests = {int(ci): [_Tree.from_json_dict(t) for t in trees]
                     for ci, trees in blob["forests"].items()}
        return m


# ---------------------------------------------------------------------------
# Unified training / prediction surface
# ---------------------------------------------------------------------------

ALGORITHMS = ("NB", "ME", "SVM", "RF")

_MODEL_CLASSES = {"NB": NaiveBayes, "ME": MaxEnt, "SVM": LinearSVM,
                  "RF": RandomForest}


@dataclass
class TrainedModel:
    algorithm: str
    model: object
    n_features: int
    seed: int
    vocab_hash: str = ""


def train(algorithm, data, n_features, seed=0, hyperparams=None,
          vocab_hash=""):
    """Train one of NB/ME/SVM/RF on (sparse vector, label) pairs."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm: {algorithm}")
    if not data:
        raise TrainingError("empty training set")
    vectors = [d[0] for d in data]
    labels = [d[1] for d in data]
    if len(set(labels)) < 2:
        raise TrainingError("training data contains a single class")
    hp = dict(hyperparams or {})
    if algorithm == "NB":
        model = NaiveBayes(**hp)
    elif algorithm == "ME":
        model = MaxEnt(**hp)
    elif algorithm == "SVM":
        model = LinearSVM(seed=seed, **hp)
    else:
        model = RandomForest(seed=seed, **hp)
    model.fit(vectors, labels, n_features)
    return TrainedModel(algorithm=algorithm, model=model,
                        n_features=n_features, seed=seed,
                        vocab_hash=vocab_hash)


def predict(model, vec):
    """Returns (label, {label: score}); argmax with negative < neutral <
    positive tie-break (the earlier class wins on equal score)."""
    scores = model.model.scores(vec)
    best = 0
    for ci in range(1, 3):
        if scores[ci] > scores[best]:
            best = ci
    return CLASS_ORDER[best], {lab: float(scores[i])
                               for i, lab in enumerate(CLASS_ORDER)}


def model_to_json_dict(model):
    return {"version": MODEL_FORMAT_VERSION, "algorithm": model.algorithm,
            "n_features": model.n_features, "seed": model.seed,
            "vocab_hash": model.vocab_hash,
            "params": model.model.to_json_dict()}


def model_from_json_dict(blob):
    cls = _MODEL_CLASSES[blob["algorithm"]]
    return TrainedModel(algorithm=blob["algorithm"],
                        model=cls.from_json_dict(blob["params"]),
                        n_features=blob["n_features"], seed=blob["seed"],
                        vocab_hash=blob.get("vocab_hash", ""))


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_json_dict(model), f)


def load_model(path):
    with open(path, encoding="utf-8") as f:
        return model_from_json_dict(json.load(f))


# ---------------------------------------------------------------------------
# Importances and evaluation
# ---------------------------------------------------------------------------

@dataclass
class ImportanceReport:
    """Gini importances per one-vs-rest head, plus kind-level cumulative
    sums. `per_class` maps label -> list of (feature_name, FeatureKind,
    importance) sorted by importance descending."""

    per_class: dict = field(default_factory=dict)
    kind_totals: dict = field(default_factory=dict)  # label -> {kind: sum}
    kind_average: dict = field(default_factory=dict)  # kind -> mean over heads


def gini_importances(model, vocab=None):
    if model.algorithm != "RF":
        raise TrainingError("Gini importances require an RF model")
    head_imps = model.model.head_importances()
    if vocab is not None:
        names = [" ".join(ng) for ng in vocab.ngrams]
        kinds = list(vocab.kinds)
    else:
        names = [str(i) for i in range(model.n_features)]
        kinds = [FeatureKind.OTHER] * model.n_features
    report = ImportanceReport()
    for ci, imp in head_imps.items():
        label = CLASS_ORDER[ci]
        ranked = sorted(((names[f], kinds[f], float(imp[f]))
                         for f in range(len(imp))),
                        key=lambda t: (-t[2], t[0]))
        report.per_class[label] = ranked
        totals = {k: 0.0 for k in FeatureKind}
        for _, kind, v in ranked:
            totals[kind] += v
        report.kind_totals[label] = totals
    n_heads = len(report.kind_totals)
    report.kind_average = {
        k: sum(t[k] for t in report.kind_totals.values()) / n_heads
        for k in FeatureKind}
    return report


@dataclass
class EvalReport:
    accuracy: float
    precision: dict
    recall: dict
    f1: dict
    confusion: list  # [true][pred] in CLASS_ORDER
    n: int


def evaluate(model, test):
    """Accuracy, per-class precision/recall/F1, and the confusion matrix."""
    if not test:
        raise EvaluationError("empty test set")
    confusion = [[0, 0, 0] for _ in range(3)]
    correct = 0
    for vec, label in test:
        pred, _ = predict(model, vec)
        confusion[CLASS_INDEX[label]][CLASS_INDEX[pred]] += 1
        if pred == label:
            correct += 1
    precision, recall, f1 = {}, {}, {}
    for i, lab in enumerate(CLASS_ORDER):
        tp = confusion[i][i]
        pred_total = sum(confusion[r][i] for r in range(3))
        true_total = sum(confusion[i])
        p = tp / pred_total if pred_total else 0.0
        r = tp / true_total if true_total else 0.0
        precision[lab] = p
        recall[lab] = r
        f1[lab] = 2 * p * r / (p + r) if (p + r) else 0.0
    return EvalReport(accuracy=correct / len(test), precision=precision,
                      recall=recall, f1=f1, confusion=confusion, n=len(test))
