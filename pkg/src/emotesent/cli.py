"""Multi-subcommand CLI tying the library into reproducible pipelines.

All randomness flows from one global --seed; every output directory gets a
manifest.json with the effective config and input hashes. Exit codes: 0 ok,
2 usage error, 3 data error, 4 internal error.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, analyze, classify, grids, loove as loove_mod
from .corpus import (SentimentLabel, SplitSpec, load_chat_log,
                     load_emote_dictionary, load_labeled_tsv, load_lexicon,
                     stratified_split)
from .embed import EmbedConfig, EmbeddingStore, train_embeddings
from .errors import EmotesentError
from .features import build_vocab
from .manifest import verify_manifest, write_manifest
from .pipeline import (evaluate_pipeline, load_pipeline, save_pipeline,
                       train_text_pipeline)
from .pseudodict import (PseudoDictConfig, build_pseudodict,
                         evaluate_pseudodict, infer_word_valences,
                         load_pseudodict, save_pseudodict)
from .tokenizer import (ProcessingLevel, load_lemmas, load_stopwords, process,
                        tokenize)

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def _load_config(path):
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _setting(args, config, key, default=None):
    """Flag value wins over config-file value wins over default."""
    v = getattr(args, key.replace("-", "_"), None)
    if v is not None:
        return v
    return config.get(key, default)


def _emotes(args, config):
    paths = _setting(args, config, "emotes", [])
    if not paths:
        raise SystemExit2("no emote dictionary given (--emotes)")
    return load_emote_dictionary(paths)


class SystemExit2(Exception):
    """Usage-level error that should exit with code 2."""


def _read_tokenized_jsonl(path, emotes, level=None, stopwords=None,
                          lemmas=None):
    messages, _ = load_chat_log(path)
    out = []
    for msg in messages:
        toks = tokenize(msg.text, emotes)
        if level is not None:
            toks = process(toks, level, stopwords=stopwords, lemmas=lemmas)
        out.append(toks)
    return out


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_corpus(args, config):
    if args.action == "stats":
        messages, skipped = load_chat_log(args.input)
        print(f"messages: {len(messages)}  skipped: {skipped}")
    elif args.action == "split":
        data, skipped = load_labeled_tsv(args.input)
        spec = SplitSpec(train_fraction=args.train_fraction, seed=args.seed)
        train, test = stratified_split(data, spec)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, split in (("train.tsv", train), ("test.tsv", test)):
            with open(out / name, "w", encoding="utf-8") as f:
                for ex in split:
                    f.write(f"{ex.text}\t{ex.label.name.lower()}\n")
        write_manifest(out, {"command": "corpus split",
                             "train_fraction": args.train_fraction},
                       args.seed, [args.input])
        print(f"train: {len(train)}  test: {len(test)}  skipped: {skipped}")
    elif args.action == "verify":
        problems = verify_manifest(args.input)
        for p in problems:
            print(f"WARNING: {p}")
        print("ok" if not problems else f"{len(problems)} problem(s)")
        return EXIT_DATA if problems else 0
    return 0


def cmd_tokenize(args, config):
    emotes = _emotes(args, config)
    level = ProcessingLevel(args.level) if args.level else None
    stopwords = load_stopwords(args.stopwords) if args.stopwords else None
    lemmas = load_lemmas(args.lemmas) if args.lemmas else None
    corpus = _read_tokenized_jsonl(args.input, emotes, level, stopwords, lemmas)
    with open(args.out, "w", encoding="utf-8") as f:
        for toks in corpus:
            f.write(json.dumps([[t.text, t.kind.value] for t in toks],
                               ensure_ascii=False) + "\n")
    print(f"tokenized {len(corpus)} messages -> {args.out}")
    return 0


def cmd_features(args, config):
    emotes = _emotes(args, config)
    level = ProcessingLevel(args.level)
    corpus = _read_tokenized_jsonl(args.input, emotes, level)
    vocab = build_vocab(corpus, order=args.order, min_count=args.min_count)
    vocab.save(args.out)
    fracs = vocab.kind_fractions()
    print(f"vocab: {len(vocab)} features  "
          + "  ".join(f"{k.value}={v:.4f}" for k, v in fracs.items()))
    return 0


def cmd_train(args, config):
    emotes = _emotes(args, config)
    examples, _ = load_labeled_tsv(args.data)
    pipe = train_text_pipeline(examples, emotes,
                               level=ProcessingLevel(args.level),
                               order=args.order, algorithm=args.algorithm,
                               min_count=args.min_count, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_pipeline(pipe, out / "model.json", out / "vocab.json")
    write_manifest(out, {"command": "train", "algorithm": args.algorithm,
                         "level": args.level, "order": args.order},
                   args.seed, [args.data] + list(args.emotes or []))
    print(f"trained {args.algorithm} on {len(examples)} examples -> {out}")
    return 0


def cmd_eval(args, config):
    emotes = _emotes(args, config)
    model_dir = Path(args.model)
    pipe = load_pipeline(model_dir / "model.json", model_dir / "vocab.json",
                         emotes)
    examples, _ = load_labeled_tsv(args.data)
    report = evaluate_pipeline(pipe, examples)
    print(f"accuracy: {report.accuracy:.4f}  n={report.n}")
    for lab in SentimentLabel:
        print(f"  {lab.name.lower():9s} P={report.precision[lab]:.4f} "
              f"R={report.recall[lab]:.4f} F1={report.f1[lab]:.4f}")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["metric", "value"])
            w.writerow(["accuracy", f"{report.accuracy:.6f}"])
    return 0


def cmd_embed(args, config):
    if args.action == "train":
        emotes = _emotes(args, config)
        corpus = _read_tokenized_jsonl(args.input, emotes)
        cfg = EmbedConfig(dim=args.dim, window=args.window,
                          min_count=args.min_count, epochs=args.epochs,
                          negatives=args.negatives, seed=args.seed)
        store = train_embeddings(corpus, cfg)
        store.save(args.out)
        print(f"trained {len(store)} embeddings (d={store.dim}) -> {args.out}")
    elif args.action == "nn":
        store = EmbeddingStore.load(args.store)
        for tok, sim, kind in store.nearest(args.token, args.k):
            print(f"{tok}\t{sim:.4f}\t{kind.value}")
    elif args.action == "analogy":
        store = EmbeddingStore.load(args.store)
        result = store.analogy(args.positive, args.negative or [], args.k)
        for tok, sim, kind in result:
            print(f"{tok}\t{sim:.4f}\t{kind.value}")
    return 0


def _load_reference_lexicon(args):
    lex, _, _ = load_lexicon(args.lexicon, format=args.lexicon_format)
    return lex


def cmd_pseudodict(args, config):
    if args.action == "build":
        store = EmbeddingStore.load(args.store)
        lex = _load_reference_lexicon(args)
        cfg = PseudoDictConfig(k=args.k, search_cap=args.search_cap)
        pdict = build_pseudodict(store, lex, cfg)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_pseudodict(pdict, out / "pseudodict.tsv", out / "pseudodict.json")
        write_manifest(out, {"command": "pseudodict build", "k": args.k,
                             "search_cap": args.search_cap},
                       args.seed, [args.store, args.lexicon])
        print(f"pseudo-dictionary: {len(pdict)} emotes -> {out}")
    elif args.action == "eval":
        store = EmbeddingStore.load(args.store)
        lex = _load_reference_lexicon(args)
        cfg = PseudoDictConfig(k=args.k, search_cap=args.search_cap)
        inferred = infer_word_valences(store, lex, cfg)
        rmse = evaluate_pseudodict(inferred, lex.entries)
        print(f"leave-one-out RMSE vs reference lexicon: {rmse:.4f} "
              f"({len(inferred)} tokens)")
    elif args.action == "lookup":
        pdict = load_pseudodict(Path(args.dict) / "pseudodict.json")
        entry = pdict.get(args.emote)
        if entry is None:
            print(f"{args.emote}: not in pseudo-dictionary")
            return EXIT_DATA
        print(f"{entry.emote}\t{entry.valence:.4f}")
        for tok, sim, val in entry.evidence:
            print(f"  {tok}\t{sim:.4f}\t{val:+.3f}")
    return 0


def cmd_loove(args, config):
    emotes = _emotes(args, config)
    if args.action == "train":
        ec_train, _ = load_labeled_tsv(args.data)
        pdict = load_pseudodict(Path(args.pseudodict) / "pseudodict.json")
        clf1 = None
        if args.clf1:
            d = Path(args.clf1)
            clf1 = load_pipeline(d / "model.json", d / "vocab.json", emotes)
        model = loove_mod.train_loove(ec_train, clf1, pdict, emotes,
                                      clf2_algorithm=args.clf2,
                                      seed=args.seed,
                                      use_stats=not args.no_stats)
        loove_mod.save_loove(model, args.out)
        write_manifest(args.out, {"command": "loove train",
                                  "clf2": args.clf2,
                                  "use_stats": not args.no_stats},
                       args.seed, [args.data])
        print(f"LOOVE model -> {args.out}")
    elif args.action == "predict":
        model = loove_mod.load_loove(args.model, emotes)
        label, vec, stats = loove_mod.predict_loove(model, args.text)
        print(f"label: {label.name.lower()}")
        print(f"fusion: {[round(float(v), 4) for v in vec]}")
        print(f"stats: {stats}")
    elif args.action == "eval":
        model = loove_mod.load_loove(args.model, emotes)
        examples, _ = load_labeled_tsv(args.data)
        report = loove_mod.evaluate_loove(model, examples)
        print(f"accuracy: {report.accuracy:.4f}  n={report.n}")
    elif args.action == "importance":
        model = loove_mod.load_loove(args.model, emotes)
        report = loove_mod.feature_importance_loove(model)
        for label, ranked in report.per_class.items():
            print(label.name.lower())
            for name, _, v in ranked:
                print(f"  {name}\t{v:.4f}")
    return 0


def cmd_analyze(args, config):
    emotes = _emotes(args, config)
    if args.action == "tokens":
        corpus = _read_tokenized_jsonl(args.input, emotes)
        stats = analyze.token_type_stats(corpus)
        for kind, row in stats.items():
            print(f"{kind.value}\t{row['unique']}\t{row['fraction']:.4f}")
    elif args.action == "zipf":
        corpus = _read_tokenized_jsonl(args.input, emotes)
        from collections import Counter
        freqs = Counter()
        kind_filter = args.kind
        for toks in corpus:
            for t in toks:
                if kind_filter in (None, t.kind.value):
                    freqs[t.text] += 1
        fit = analyze.zipf_fit(freqs, kind=kind_filter or "all")
        print(f"exponent: {fit.exponent:.4f}  r2: {fit.r_squared:.4f}  "
              f"ranks: {fit.rank_range}")
    elif args.action == "neighbors":
        store = EmbeddingStore.load(args.store)
        rows = analyze.neighbor_type_distribution(store, per_kind=args.per_kind,
                                                  k=args.k)
        header = [k.value for k in analyze.KINDS]
        print("kind\t" + "\t".join(header))
        for kind, frac in rows.items():
            print(kind.value + "\t" + "\t".join(f"{v:.4f}" for v in frac))
    elif args.action == "senthist":
        store = EmbeddingStore.load(args.store)
        lex = _load_reference_lexicon(args)
        hists = analyze.sentiment_neighborhood_histogram(
            store, lex.entries, bins=args.bins, neighbors=args.neighbors)
        for cls, (edges, counts) in hists.items():
            print(cls + "\t" + "\t".join(str(int(c)) for c in counts))
    elif args.action == "features":
        model = classify.load_model(Path(args.model) / "model.json")
        from .features import NgramVocab
        vocab = NgramVocab.load(Path(args.model) / "vocab.json")
        report = classify.gini_importances(model, vocab)
        hist = analyze.top_feature_rank_histogram(report, top_n=args.top_n)
        print(json.dumps(hist.summary(), indent=2))
    elif args.action == "export-vectors":
        store = EmbeddingStore.load(args.store)
        rows = analyze.export_vectors(store, per_kind=args.per_kind)
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["token", "kind", "freq", "vector"])
            for token, kind, freq, vec in rows:
                w.writerow([token, kind, freq,
                            " ".join(f"{v:.6f}" for v in vec)])
        print(f"exported {len(rows)} vectors -> {args.out}")
    return 0


def cmd_grid(args, config):
    emotes = _emotes(args, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.action == "baseline":
        data, _ = load_labeled_tsv(args.data)
        train, test = stratified_split(
            data, SplitSpec(train_fraction=args.train_fraction,
                            seed=args.seed))
        results = grids.run_baseline_grid(train, test, emotes, seed=args.seed)
        csv_text = grids.baseline_grid_csv(results)
        (out / "baseline_grid.csv").write_text(csv_text, encoding="utf-8")
        write_manifest(out, {"command": "grid baseline",
                             "train_fraction": args.train_fraction},
                       args.seed, [args.data] + list(args.emotes or []))
        print(csv_text)
    elif args.action == "loove":
        ec, _ = load_labeled_tsv(args.data)
        ec_train, ec_test = stratified_split(
            ec, SplitSpec(train_fraction=args.train_fraction, seed=args.seed))
        datasets = {}
        for spec in args.datasets or []:
            tag, path = spec.split("=", 1)
            datasets[tag], _ = load_labeled_tsv(path)
        pdict = load_pseudodict(Path(args.pseudodict) / "pseudodict.json")
        grid = grids.run_loove_grid(datasets, ec_train, ec_test, emotes,
                                    pdict, seed=args.seed)
        csv_text = grids.loove_grid_csv(grid, datasets)
        (out / "loove_grid.csv").write_text(csv_text, encoding="utf-8")
        write_manifest(out, {"command": "grid loove"}, args.seed, [args.data])
        print(csv_text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="emotesent",
        description="Twitch chat sentiment toolkit (emotes, embeddings, LOOVE)")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0,
                        help="global random seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap for parallel stages")
    parser.add_argument("--config", default=None,
                        help="JSON config file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_emotes(p):
        p.add_argument("--emotes", nargs="+", default=None,
                       help="emote dictionary files (one code per line)")

    p = sub.add_parser("corpus", help="load/validate/split datasets")
    p.add_argument("action", choices=["stats", "split", "verify"])
    p.add_argument("--input", required=True)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--out", default="out")

    p = sub.add_parser("tokenize", help="tokenize a chat log")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--level", choices=["P1", "P2", "P3"], default=None)
    p.add_argument("--stopwords", default=None)
    p.add_argument("--lemmas", default=None)
    add_emotes(p)

    p = sub.add_parser("features", help="build an n-gram vocabulary")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--level", choices=["P1", "P2", "P3"], default="P1")
    p.add_argument("--order", type=int, choices=[1, 2], default=2)
    p.add_argument("--min-count", type=int, default=1)
    add_emotes(p)

    p = sub.add_parser("train", help="train a baseline classifier")
    p.add_argument("--data", required=True, help="labeled TSV")
    p.add_argument("--out", required=True)
    p.add_argument("--algorithm", choices=classify.ALGORITHMS, default="RF")
    p.add_argument("--level", choices=["P1", "P2", "P3"], default="P1")
    p.add_argument("--order", type=int, choices=[1, 2], default=2)
    p.add_argument("--min-count", type=int, default=1)
    add_emotes(p)

    p = sub.add_parser("eval", help="evaluate a trained classifier")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default=None)
    add_emotes(p)

    p = sub.add_parser("embed", help="train/query embeddings")
    p.add_argument("action", choices=["train", "nn", "analogy"])
    p.add_argument("--input", help="chat log for training")
    p.add_argument("--out", help="embedding output path")
    p.add_argument("--store", help="embedding store path for queries")
    p.add_argument("--token")
    p.add_argument("--positive", nargs="+")
    p.add_argument("--negative", nargs="*")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--min-count", type=int, default=30)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    add_emotes(p)

    p = sub.add_parser("pseudodict", help="build/eval/query the emote "
                                          "pseudo-dictionary")
    p.add_argument("action", choices=["build", "eval", "lookup"])
    p.add_argument("--store")
    p.add_argument("--lexicon")
    p.add_argument("--lexicon-format", choices=["vader_tsv", "json"],
                   default="vader_tsv")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--search-cap", type=int, default=1000)
    p.add_argument("--out", default="pseudodict_out")
    p.add_argument("--dict", help="pseudodict directory for lookup")
    p.add_argument("--emote")

    p = sub.add_parser("loove", help="train/use the two-stage classifier")
    p.add_argument("action", choices=["train", "predict", "eval",
                                      "importance"])
    p.add_argument("--data")
    p.add_argument("--clf1", help="trained CLF1 model directory (optional)")
    p.add_argument("--pseudodict")
    p.add_argument("--clf2", choices=["ME", "SVM", "RF"], default="RF")
    p.add_argument("--no-stats", action="store_true")
    p.add_argument("--model")
    p.add_argument("--text")
    p.add_argument("--out", default="loove_out")
    add_emotes(p)

    p = sub.add_parser("analyze", help="corpus/model analyses")
    p.add_argument("action", choices=["tokens", "zipf", "neighbors",
                                      "senthist", "features",
                                      "export-vectors"])
    p.add_argument("--input")
    p.add_argument("--store")
    p.add_argument("--model")
    p.add_argument("--lexicon")
    p.add_argument("--lexicon-format", choices=["vader_tsv", "json"],
                   default="vader_tsv")
    p.add_argument("--kind", default=None)
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--per-kind", type=int, default=1000)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--neighbors", type=int, default=1000)
    p.add_argument("--top-n", type=int, default=100)
    p.add_argument("--out", default="analysis.csv")
    add_emotes(p)

    p = sub.add_parser("grid", help="run the baseline and fusion experiment "
                                    "grids")
    p.add_argument("action", choices=["baseline", "loove"])
    p.add_argument("--data", required=True, help="EC-style labeled TSV")
    p.add_argument("--datasets", nargs="*",
                   help="external datasets as tag=path.tsv")
    p.add_argument("--pseudodict")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--out", default="grid_out")
    add_emotes(p)

    return parser


_HANDLERS = {"corpus": cmd_corpus, "tokenize": cmd_tokenize,
             "features": cmd_features, "train": cmd_train, "eval": cmd_eval,
             "embed": cmd_embed, "pseudodict": cmd_pseudodict,
             "loove": cmd_loove, "analyze": cmd_analyze, "grid": cmd_grid}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return _HANDLERS[args.command](args, config) or 0
    except SystemExit2 as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (EmotesentError, FileNotFoundError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # pragma: no cover
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
