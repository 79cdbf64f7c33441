"""Two-stage LOOVE classifier.

Stage one is any frozen text classifier (CLF1), possibly trained on a
non-Twitch dataset. Stage two pools the pseudo-dictionary valences of the
message's emotes into a handful of statistics, concatenates them with CLF1's
predicted label (one-hot), and feeds the result to a small fusion classifier
(CLF2, random forest by default).

Fusion layout (8 features):
    [clf1=neg, clf1=neu, clf1=pos, mean, min, max, count, present]
The two edge cases drop one side: stats-only fusion uses the 5 stat features
and no CLF1; the no-stats case is just CLF1's raw prediction. CLF1 is never
retrained or mutated by LOOVE.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import classify
from .corpus import CLASS_INDEX, SentimentLabel
from .errors import TrainingError
from .pseudodict import PseudoDictEntry
from .tokenizer import TokenKind, tokenize

LOOVE_FORMAT_VERSION = 1

FUSION_FEATURE_NAMES = ("clf1=negative", "clf1=neutral", "clf1=positive",
                        "emote_mean", "emote_min", "emote_max",
                        "emote_count", "emote_present")
STAT_FEATURE_NAMES = FUSION_FEATURE_NAMES[3:]


@dataclass(frozen=True)
class EmoteStats:
    mean: float = 0.0
    min: float = 0.0
    max: float = 0.0
    count: int = 0
    present: bool = False


def _valence_of(entry):
    return entry.valence if isinstance(entry, PseudoDictEntry) else float(entry)


def extract_emote_stats(tokens, pdict):
    """Pool the pseudo-dictionary valences of a message's emote tokens.

    With no dictionary-covered emotes all stats are zero and present=False,
    which keeps "no emotes" distinguishable from "neutral emotes"."""
    valences = [_valence_of(pdict[tok.text]) for tok in tokens
                if tok.kind is TokenKind.EMOTE and tok.text in pdict]
    if not valences:
        return EmoteStats()
    return EmoteStats(mean=float(np.mean(valences)),
                      min=float(min(valences)), max=float(max(valences)),
                      count=len(valences), present=True)


def fusion_vector(clf1_label, stats):
    """Dense fusion features; either side may be disabled (None), not both."""
    if clf1_label is None and stats is None:
        raise ValueError("at least one of CLF1 and emote stats must be enabled")
    parts = []
    if clf1_label is not None:
        onehot = [0.0, 0.0, 0.0]
        onehot[CLASS_INDEX[clf1_label]] = 1.0
        parts.extend(onehot)
    if stats is not None:
        parts.extend([stats.mean, stats.min, stats.max, float(stats.count),
                      1.0 if stats.present else 0.0])
    return np.array(parts)


@dataclass
class LooveModel:
    clf1: object                 # TextPipeline or None (stats-only edge case)
    pdict: dict                  # emote -> PseudoDictEntry (or valence)
    clf2: classify.TrainedModel
    emotes: object               # EmoteDictionary for tokenization
    use_stats: bool = True
    clf1_dataset: str = "none"
    seed: int = 0

    @property
    def fusion_size(self):
        n = 0
        if self.clf1 is not None:
            n += 3
        if self.use_stats:
            n += 5
        return n

    def fusion_names(self):
        names = []
        if self.clf1 is not None:
            names.extend(FUSION_FEATURE_NAMES[:3])
        if self.use_stats:
            names.extend(STAT_FEATURE_NAMES)
        return tuple(names)


def _fusion_for_text(text, clf1, pdict, emotes, use_stats):
    label = clf1.predict_text(text)[0] if clf1 is not None else None
    stats = None
    if use_stats:
        stats = extract_emote_stats(tokenize(text, emotes), pdict)
    return fusion_vector(label, stats), stats


def _to_sparse(vec):
    return {i: float(v) for i, v in enumerate(vec) if v != 0.0}


def train_loove(examples, clf1, pdict, emotes, clf2_algorithm="RF", seed=0,
                use_stats=True, clf2_hyperparams=None):
    """Train the fusion classifier on labeled examples. CLF1 stays frozen.

    clf2_algorithm must handle real-valued features (RF/ME/SVM)."""
    if clf1 is None and not use_stats:
        raise ValueError("cannot disable both CLF1 and emote stats")
    if clf2_algorithm == "NB":
        raise ValueError("NB cannot consume real-valued fusion features")
    if not examples:
        raise TrainingError("no training examples")
    data = []
    for ex in examples:
        vec, _ = _fusion_for_text(ex.text, clf1, pdict, emotes, use_stats)
        data.append((_to_sparse(vec), ex.label))
    n_features = (3 if clf1 is not None else 0) + (5 if use_stats else 0)
    clf2 = classify.train(clf2_algorithm, data, n_features=n_features,
                          seed=seed, hyperparams=clf2_hyperparams)
    return LooveModel(clf1=clf1, pdict=pdict, clf2=clf2, emotes=emotes,
                      use_stats=use_stats, seed=seed)


def predict_loove(model, text):
    """Returns (label, fusion vector, EmoteStats) for auditability."""
    vec, stats = _fusion_for_text(text, model.clf1, model.pdict, model.emotes,
                                  model.use_stats)
    label, _ = classify.predict(model.clf2, _to_sparse(vec))
    return label, vec, stats


def evaluate_loove(model, examples):
    data = []
    for ex in examples:
        vec, _ = _fusion_for_text(ex.text, model.clf1, model.pdict,
                                  model.emotes, model.use_stats)
        data.append((_to_sparse(vec), ex.label))
    return classify.evaluate(model.clf2, data)


def feature_importance_loove(model):
    """Gini importances of the fusion features (CLF2 must be RF)."""
    report = classify.gini_importances(model.clf2)
    names = model.fusion_names()
    renamed = {}
    for label, ranked in report.per_class.items():
        renamed[label] = sorted(((names[int(f)], kind, v)
                                 for f, kind, v in ranked),
                                key=lambda t: (-t[2], t[0]))
    report.per_class = renamed
    return report


def save_loove(model, directory):
    """Bundle directory: clf1.json/clf1_vocab.json, pseudodict files,
    clf2.json, manifest.json."""
    from pathlib import Path

    from .manifest import file_sha256
    from .pipeline import save_pipeline
    from .pseudodict import save_pseudodict

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if model.clf1 is not None:
        save_pipeline(model.clf1, directory / "clf1.json",
                      directory / "clf1_vocab.json")
    save_pseudodict(model.pdict, directory / "pseudodict.tsv",
                    directory / "pseudodict.json")
    classify.save_model(model.clf2, directory / "clf2.json")
    manifest = {"version": LOOVE_FORMAT_VERSION,
                "use_stats": model.use_stats,
                "has_clf1": model.clf1 is not None,
                "clf1_dataset": model.clf1_dataset,
                "seed": model.seed,
                "hashes": {p.name: file_sha256(p)
                           for p in sorted(directory.glob("*.json"))
                           if p.name != "manifest.json"}}
    with open(directory / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)


def load_loove(directory, emotes):
    from pathlib import Path

    from .pipeline import load_pipeline
    from .pseudodict import load_pseudodict

    directory = Path(directory)
    with open(directory / "manifest.json", encoding="utf-8") as f:
        manifest = json.load(f)
    clf1 = None
    if manifest["has_clf1"]:
        clf1 = load_pipeline(directory / "clf1.json",
                             directory / "clf1_vocab.json", emotes)
    pdict = load_pseudodict(directory / "pseudodict.json")
    clf2 = classify.load_model(directory / "clf2.json")
    return LooveModel(clf1=clf1, pdict=pdict, clf2=clf2, emotes=emotes,
                      use_stats=manifest["use_stats"],
                      clf1_dataset=manifest.get("clf1_dataset", "none"),
                      seed=manifest.get("seed", 0))
