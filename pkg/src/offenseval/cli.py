"""Command-line interface: ``offenseval train | predict | evaluate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields

from . import corpus, modelfile
from .evaluation import evaluate
from .pipeline import LINEAR_MODELS, NEURAL_MODELS, FEATURES, RunConfig, train
from .textprep import CleanConfig

log = logging.getLogger("offenseval")

# CLI dest -> RunConfig field, where they differ.
_RENAMES = {"train": "train_path", "val": "val_path", "out": "model_out",
            "history": "history_out", "lexicon": "lexicon_path", "stopwords": "stopwords_path",
            "l2": "l2_lambda", "lr": "learning_rate", "dropout": "dropout_p",
            "filters": "n_filters"}


def _train_parser(sub):
    p = sub.add_parser("train", help="fit a model and write a model file",
                       argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="JSON file of option values (flags override it)")
    p.add_argument("--task", choices=sorted(corpus.TASK_LABELS))
    p.add_argument("--model", choices=LINEAR_MODELS + NEURAL_MODELS)
    p.add_argument("--features", choices=FEATURES)
    p.add_argument("--balance", action="store_true", help="random-draw class balancing")
    p.add_argument("--binary-features", action="store_true",
                   help="presence (0/1) instead of counts for bow/tfidf")
    p.add_argument("--seed", type=int)
    p.add_argument("--train", help="OLID training TSV")
    p.add_argument("--val", help="OLID-format validation TSV")
    p.add_argument("--out", help="model file to write")
    p.add_argument("--history", help="per-epoch history CSV (neural models)")
    p.add_argument("--vocab-union", metavar="TSV",
                   help="also build the bow/tfidf vocabulary from this file's tweets")
    p.add_argument("--vocab-size", type=int, help="0 keeps every token")
    p.add_argument("--max-len", type=int)
    p.add_argument("--lexicon", help="abbreviation lexicon (key<TAB>replacement)")
    p.add_argument("--stopwords", help="stopword list, one per line")
    for f in fields(CleanConfig):
        p.add_argument("--" + f.name.replace("_", "-"), dest=f.name,
                       action=argparse.BooleanOptionalAction)
    g = p.add_argument_group("linear models")
    g.add_argument("--l2", type=float, help="L2 strength (all models)")
    g.add_argument("--lr", type=float, help="learning rate (all models)")
    g.add_argument("--max-epochs", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--alpha", type=float, help="naive Bayes smoothing")
    g = p.add_argument_group("neural models")
    g.add_argument("--epochs", type=int)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--optimizer", choices=("sgd", "adam"))
    g.add_argument("--dropout", type=float)
    g.add_argument("--patience", type=int, help="0 disables early stopping")
    g.add_argument("--emb-dim", type=int)
    g.add_argument("--hidden", type=int)
    g.add_argument("--filters", type=int)
    g.add_argument("--window", type=int)
    p.set_defaults(func=cmd_train)


def run_config_from(options: dict) -> RunConfig:
    """Build a RunConfig from a flat mapping of CLI dests / config-file keys."""
    known = {f.name for f in fields(RunConfig)}
    clean_keys = {f.name for f in fields(CleanConfig)}
    kwargs, clean = {}, {}
    for key, value in options.items():
        key = key.replace("-", "_")
        key = _RENAMES.get(key, key)
        if key in clean_keys:
            clean[key] = value
        elif key in known:
            kwargs[key] = value
        else:
            raise ValueError(f"unknown option {key!r}")
    cfg = RunConfig(**kwargs)
    cfg.clean = {**cfg.clean, **clean}
    return cfg


def cmd_train(args) -> int:
    options = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            options.update(json.load(fh))
    skip = ("func", "config", "command", "verbose")
    options.update({k: v for k, v in vars(args).items() if k not in skip})
    cfg = run_config_from(options).resolved()
    if not cfg.model_out:
        raise ValueError("--out is required")
    result = train(cfg)
    modelfile.save(result.pipeline, cfg.model_out)
    if result.history is not None and cfg.history_out:
        with open(cfg.history_out, "w", encoding="utf-8", newline="") as fh:
            fh.write(result.history.to_csv())
    print(f"{result.report_split} metrics (task {cfg.task}, {cfg.model}+{cfg.features}"
          f"{' +RD' if cfg.balance else ''}):")
    print(result.report.table())
    return 0


def cmd_predict(args) -> int:
    pipe = modelfile.load(args.model)
    rows = corpus.load_tweets_tsv(args.data)
    labels = pipe.predict([t for _, t in rows])
    corpus.write_label_csv(args.out, [(i, y) for (i, _), y in zip(rows, labels)])
    print(f"wrote {len(labels)} predictions to {args.out}")
    return 0


def _infer_classes(labels):
    present = set(labels)
    for task in ("A", "B", "C"):
        if present <= set(corpus.TASK_LABELS[task]):
            return corpus.TASK_LABELS[task]
    return tuple(sorted(present))


def cmd_evaluate(args) -> int:
    pred = dict(corpus.read_label_csv(args.pred))
    gold_rows = corpus.read_label_csv(args.gold)
    gold = dict(gold_rows)
    if set(pred) != set(gold):
        missing, extra = len(set(gold) - set(pred)), len(set(pred) - set(gold))
        raise ValueError(f"id sets differ: {missing} gold ids without a prediction, "
                         f"{extra} predicted ids not in gold")
    ids = [i for i, _ in gold_rows]
    g = [gold[i] for i in ids]
    p = [pred[i] for i in ids]
    classes = corpus.TASK_LABELS[args.task] if args.task else _infer_classes(g + p)
    report = evaluate(g, p, classes)
    print(report.table())
    if args.report_csv:
        with open(args.report_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(report.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="offenseval", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _train_parser(sub)
    p = sub.add_parser("predict", help="label tweets with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="TSV with 'id' and 'tweet' columns")
    p.add_argument("--out", required=True, help="output CSV (id,label)")
    p.set_defaults(func=cmd_predict)
    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--task", choices=sorted(corpus.TASK_LABELS),
                   help="label set for macro averaging (inferred if omitted)")
    p.add_argument("--report-csv")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, FloatingPointError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"offenseval: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
