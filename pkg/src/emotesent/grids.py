"""Experiment grids: the processing x classifier x ngram baseline table and
the LOOVE variants table (datasets x algorithms plus the two edge cases)."""

import csv
import io

from . import classify, loove
from .pipeline import evaluate_pipeline, train_text_pipeline
from .tokenizer import ProcessingLevel

BASELINE_LEVELS = (ProcessingLevel.P1, ProcessingLevel.P2, ProcessingLevel.P3)
BASELINE_ALGOS = ("NB", "ME", "SVM", "RF")
BASELINE_ORDERS = (1, 2)

LOOVE_ALGOS = ("ME", "SVM", "RF")


def run_baseline_grid(train_examples, test_examples, emotes, seed=0,
                      stopwords=None, lemmas=None, hyperparams=None):
    """Accuracy for {P1,P2,P3} x {NB,ME,SVM,RF} x {1,2}-grams (24 cells).

    Returns {(level, algo, order): accuracy}.
    """
    results = {}
    for level in BASELINE_LEVELS:
        for algo in BASELINE_ALGOS:
            for order in BASELINE_ORDERS:
                hp = (hyperparams or {}).get(algo)
                pipe = train_text_pipeline(train_examples, emotes, level=level,
                                           order=order, algorithm=algo,
                                           seed=seed, hyperparams=hp,
                                           stopwords=stopwords, lemmas=lemmas)
                report = evaluate_pipeline(pipe, test_examples)
                results[(level.value, algo, order)] = report.accuracy
    return results


def baseline_grid_csv(results):
    """Rows = classifier.order, columns = processing level."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["model"] + [lv.value for lv in BASELINE_LEVELS])
    for algo in BASELINE_ALGOS:
        for order in BASELINE_ORDERS:
            row = [f"{algo}.{order}"]
            for level in BASELINE_LEVELS:
                row.append(f"{results[(level.value, algo, order)]:.4f}")
            writer.writerow(row)
    return buf.getvalue()


def run_loove_grid(datasets, ec_train, ec_test, emotes, pdict, seed=0,
                   algorithms=LOOVE_ALGOS, clf2_algorithm="RF"):
    """LOOVE accuracy grid: (len(datasets)+1) x (len(algorithms)+1) cells.

    Rows are CLF1 training datasets plus a "none" row (the stats-only edge
    case, where the column algorithm is used for CLF2 instead). The extra
    "no_stats" column is the raw-CLF1 edge case, evaluated with the last
    algorithm in `algorithms` as CLF1. Cells that make no sense ("none" row
    x "no_stats" column) are None.
    """
    grid = {}
    clf1_cache = {}
    for tag, examples in datasets.items():
        for algo in algorithms:
            clf1 = train_text_pipeline(examples, emotes, algorithm=algo,
                                       seed=seed)
            clf1_cache[(tag, algo)] = clf1
            model = loove.train_loove(ec_train, clf1, pdict, emotes,
                                      clf2_algorithm=clf2_algorithm, seed=seed)
            model.clf1_dataset = tag
            grid[(tag, algo)] = loove.evaluate_loove(model, ec_test).accuracy
        # no-stats column: raw CLF1 accuracy on the EC test set
        raw_algo = algorithms[-1]
        pipe = clf1_cache[(tag, raw_algo)]
        grid[(tag, "no_stats")] = evaluate_pipeline(pipe, ec_test).accuracy
    # stats-only row: no CLF1, the column algorithm trains CLF2
    for algo in algorithms:
        model = loove.train_loove(ec_train, None, pdict, emotes,
                                  clf2_algorithm=algo if algo != "NB" else "RF",
                                  seed=seed)
        grid[("none", algo)] = loove.evaluate_loove(model, ec_test).accuracy
    grid[("none", "no_stats")] = None
    return grid


def loove_grid_csv(grid, datasets, algorithms=LOOVE_ALGOS):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["clf1_dataset"] + list(algorithms) + ["no_stats"])
    for tag in list(datasets) + ["none"]:
        row = [tag]
        for algo in list(algorithms) + ["no_stats"]:
            v = grid.get((tag, algo))
            row.append("" if v is None else f"{v:.4f}")
        writer.writerow(row)
    return buf.getvalue()
