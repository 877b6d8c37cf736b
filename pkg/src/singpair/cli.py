"""Command-line front end: oracle -> candidates -> featurize -> train -> score
-> select -> evaluate.

Exit status is 0 on success, 1 on usage or validation errors and 2 on I/O
errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from functools import partial
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .baselines import BASELINES, BaselineConfig, klsum, lead, lexrank, sumbasic
from .candidates import downsample, label_candidates, read_instances, write_instances
from .corpus import CorpusError, CorpusRecord, load_corpus
from .evaluate import aggregate_reports, evaluate_rouge_run, evaluate_selection, write_report_tsv
from .oracle import OracleConfig, StatsCounter, derive_all, read_oracle, record_source_document, record_stats, write_oracle
from .pipeline import PROFILES, Profile, featurize_record, parallel_map, record_candidates, score_record, select_record
from .ranker import RankerError, RankingDataset, TrainConfig, load_external_scores, load_model, save_model, train_lambdamart, write_scores
from .rouge import RougeConfig
from .selection import SelectionResult, read_selections, write_selections
from .textproc import StopwordList, default_stopwords, load_stopwords
from .vsm import FEATURE_NAMES, IdfTable, fit_idf

logger = logging.getLogger("singpair")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for I/O failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --------------------------------------------------------------------------
# shared setup


def _stopwords(args) -> StopwordList:
    return load_stopwords(args.stopwords) if args.stopwords else default_stopwords()


def _profile(args) -> Profile:
    return PROFILES[args.profile].override(
        n_instances=args.n_instances,
        word_cap=args.word_cap,
        top_k=args.top_k,
        max_per_doc=args.max_per_doc,
        max_sentences=args.max_sentences,
    )


def _corpus(args, require_summary: bool = False) -> list[CorpusRecord]:
    records = load_corpus(args.corpus, require_summary=require_summary)
    if not records:
        raise CorpusError(f"{args.corpus}: no records")
    return records


def _idf(args, records, stopwords) -> IdfTable:
    """Load ``--idf`` if given, else fit on the corpus (and save to ``--save-idf``)."""
    if getattr(args, "idf", None):
        return IdfTable.load(args.idf, stopwords)
    idf = fit_idf(records, stopwords=stopwords)
    if getattr(args, "save_idf", None):
        idf.save(args.save_idf)
    return idf


# --------------------------------------------------------------------------
# subcommands


def cmd_oracle(args) -> None:
    sw, prof = _stopwords(args), _profile(args)
    records = _corpus(args, require_summary=True)
    cfg = OracleConfig(stemming=args.stemming, max_per_doc=prof.max_per_doc)
    sets = parallel_map(partial(derive_all, stopwords=sw, config=cfg), records, args.jobs)
    write_oracle(((r.record_id, s) for r, s in zip(records, sets)), args.out)
    if args.stats:
        counters = parallel_map(partial(record_stats, stopwords=sw, config=cfg), records, args.jobs)
        _write_json(_merge_stats(counters).to_json(), args.stats)


def _merge_stats(counters):
    total = StatsCounter()
    for c in counters:
        total.merge(c)
    return total.finish()


def cmd_stats(args) -> None:
    sw, prof = _stopwords(args), _profile(args)
    records = _corpus(args, require_summary=True)
    cfg = OracleConfig(stemming=args.stemming, max_per_doc=prof.max_per_doc)
    counters = parallel_map(partial(record_stats, stopwords=sw, config=cfg), records, args.jobs)
    stats = _merge_stats(counters).to_json()
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["table", "key", "value"])
        for table in (
            "size_histogram",
            "primary_position_histogram",
            "secondary_position_histogram",
            "fusion_rate_by_summary_position",
        ):
            for key, val in stats[table].items():
                w.writerow([table, key, repr(val)])
        w.writerow(["summary", "empty_fraction", repr(stats["empty_fraction"])])
        w.writerow(["summary", "num_summary_sentences", stats["num_summary_sentences"]])


def cmd_candidates(args) -> None:
    prof = _profile(args)
    records = _corpus(args)
    gt = read_oracle(args.oracle) if args.oracle else None
    rows = []
    for rec in records:
        sets = []
        if gt is not None:
            if rec.record_id not in gt:
                raise CorpusError(f"oracle file has no entry for record {rec.record_id!r}")
            sets = gt[rec.record_id]
        labeled = label_candidates(record_candidates(rec, prof), sets, rec.record_id)
        if gt is not None and args.ratio:
            labeled = downsample(labeled, args.ratio, args.seed)
        rows.extend(labeled)
    write_instances(rows, args.out)


def _featurize_group(item, idf, prof):
    rec, instances = item
    return featurize_record(rec, instances, idf, prof)


def cmd_featurize(args) -> None:
    sw, prof = _stopwords(args), _profile(args)
    records = _corpus(args)
    by_id = {r.record_id: r for r in records}
    labeled = read_instances(args.instances)
    # group rows by query, remembering where each row goes in the output
    groups: dict[str, list[int]] = {}
    for i, li in enumerate(labeled):
        if li.query_id not in by_id:
            raise CorpusError(f"instance row {i + 1}: unknown record {li.query_id!r}")
        groups.setdefault(li.query_id, []).append(i)
    for qid, idxs in groups.items():
        lookup = by_id[qid].sentence_lookup()
        for i in idxs:
            missing = [r for r in labeled[i].instance.refs if r not in lookup]
            if missing:
                raise CorpusError(f"instance row {i + 1}: unknown sentence {missing[0]}")
    idf = _idf(args, records, sw)
    items = [(by_id[q], [labeled[i].instance for i in idxs]) for q, idxs in groups.items()]
    blocks = parallel_map(partial(_featurize_group, idf=idf, prof=prof), items, args.jobs)
    feats = np.zeros((len(labeled), len(FEATURE_NAMES)))
    for idxs, block in zip(groups.values(), blocks):
        feats[idxs] = block
    with open(args.out, "wb") as fh:
        np.save(fh, feats, allow_pickle=False)


def _load_features(path, n_rows: int) -> np.ndarray:
    with open(path, "rb") as fh:
        try:
            X = np.load(fh, allow_pickle=False)
        except ValueError as exc:
            raise CorpusError(f"{path}: not a feature matrix ({exc})") from exc
    if X.ndim != 2 or X.shape[0] != n_rows:
        raise CorpusError(f"{path}: expected {n_rows} feature rows, found shape {X.shape}")
    return X


def cmd_train(args) -> None:
    labeled = read_instances(args.instances)
    X = _load_features(args.features, len(labeled))
    data = RankingDataset.from_rows(X, [li.label for li in labeled], [li.query_id for li in labeled])
    config = TrainConfig(
        num_trees=args.trees,
        learning_rate=args.learning_rate,
        max_leaves=args.max_leaves,
        min_samples_leaf=args.min_leaf,
        ndcg_k=args.ndcg_k,
        seed=args.seed,
        query_subsample=args.query_subsample,
    )
    save_model(train_lambdamart(data, config), args.model)


def cmd_score(args) -> None:
    sw, prof = _stopwords(args), _profile(args)
    records = _corpus(args)
    model = load_model(args.model)
    idf = _idf(args, records, sw)
    per_record = parallel_map(partial(score_record, model, idf=idf, profile=prof), records, args.jobs)
    write_scores(
        [(r.record_id, iid, s) for r, scores in zip(records, per_record) for iid, s in scores.items()],
        args.out,
    )


def _select_one(item, idf, prof, lam, singletons_only):
    rec, scores = item
    return select_record(rec, scores, idf, prof, lam, singletons_only)


def cmd_select(args) -> None:
    sw, prof = _stopwords(args), _profile(args)
    records = _corpus(args)
    idf = _idf(args, records, sw)
    if args.scorer == "lambdamart":
        if not args.model:
            raise UsageError("--scorer lambdamart needs --model")
        model = load_model(args.model)
        per_record = parallel_map(partial(score_record, model, idf=idf, profile=prof), records, args.jobs)
    else:
        if not args.scores:
            raise UsageError("--scorer external-scores needs --scores")
        ext = load_external_scores(args.scores)
        per_record = [{} for _ in records]
        index = {r.record_id: i for i, r in enumerate(records)}
        for (qid, iid), s in ext.items():
            if qid not in index:
                raise CorpusError(f"{args.scores}: unknown record {qid!r}")
            per_record[index[qid]][iid] = s
    work = partial(_select_one, idf=idf, prof=prof, lam=args.lam, singletons_only=args.singletons_only)
    results = parallel_map(work, list(zip(records, per_record)), args.jobs)
    for rec, res in zip(records, results):
        if not res.selected:
            logger.warning("record %s: no scored candidates, empty selection", rec.record_id)
    write_selections(((r.record_id, res) for r, res in zip(records, results)), args.out)


def _baseline_one(rec: CorpusRecord, method, n, stopwords, idf, config, max_per_doc):
    doc = record_source_document(rec, OracleConfig(max_per_doc=max_per_doc))
    if method == "lead":
        sel = lead(doc, n)
    elif method == "sumbasic":
        sel = sumbasic(doc, n, stopwords)
    elif method == "klsum":
        sel = klsum(doc, n, stopwords, config.klsum_epsilon)
    else:
        sel = lexrank(doc, n, idf, config)
    return SelectionResult(selected=sel)


def cmd_baseline(args) -> None:
    sw, prof = _stopwords(args), _profile(args)
    records = _corpus(args)
    idf = _idf(args, records, sw) if args.method == "lexrank" else None
    config = BaselineConfig(n_sentences=prof.n_instances)
    work = partial(
        _baseline_one,
        method=args.method,
        n=prof.n_instances,
        stopwords=sw,
        idf=idf,
        config=config,
        max_per_doc=prof.max_per_doc,
    )
    results = parallel_map(work, records, args.jobs)
    write_selections(((r.record_id, res) for r, res in zip(records, results)), args.out)


def cmd_eval_selection(args) -> None:
    gt = read_oracle(args.oracle)
    selections = read_selections(args.selections)
    reports = []
    for rid, instances in selections.items():
        if rid not in gt:
            raise CorpusError(f"selection refers to record {rid!r} missing from the oracle file")
        reports.append(evaluate_selection(instances, gt[rid]))
    if not reports:
        raise CorpusError(f"{args.selections}: no selections")
    total = aggregate_reports(reports)
    _write_json(total.to_json(), args.out)
    if args.tsv:
        write_report_tsv([(args.name or Path(args.selections).stem, total)], args.tsv)


def cmd_eval_rouge(args) -> None:
    prof = _profile(args)
    records = _corpus(args, require_summary=True)
    selections = read_selections(args.selections)
    config = RougeConfig(stemming=not args.no_stemming, word_limit=prof.word_cap)
    _write_json(evaluate_rouge_run(selections, records, config).to_json(), args.out)


# --------------------------------------------------------------------------
# argument parsing


def _shared() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--profile", choices=sorted(PROFILES), default="cnndm")
    g.add_argument("--stopwords", help="stopword file, one word per line")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
    g.add_argument("--n-instances", type=int, help="override the profile's instance budget")
    g.add_argument("--word-cap", type=int, help="override the profile's word cap")
    g.add_argument("--top-k", type=int, help="override per-document pool size (multi-doc)")
    g.add_argument("--max-per-doc", type=int, help="override mega-document sentences per document")
    g.add_argument("--max-sentences", type=int, help="override the single-document candidate cap")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="singpair", description="Sentence singleton/pair selection for summarization.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    shared = _shared()

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[shared], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("oracle", cmd_oracle, "derive ground-truth singleton/pair sets")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stats", help="also write oracle statistics as JSON")
    p.add_argument("--stemming", action="store_true", help="stem before alignment")

    p = add("stats", cmd_stats, "oracle statistics as CSV for plotting")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stemming", action="store_true")

    p = add("candidates", cmd_candidates, "enumerate (and label) candidate instances")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--oracle", help="oracle file; without it every label is 0")
    p.add_argument("--ratio", type=int, default=1, help="negatives per positive; 0 keeps everything")

    p = add("featurize", cmd_featurize, "dense features for an instance file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--instances", required=True)
    p.add_argument("--out", required=True, help="feature matrix (.npy format)")
    p.add_argument("--idf", help="IDF table to use instead of fitting one")
    p.add_argument("--save-idf", help="write the fitted IDF table here")

    p = add("train", cmd_train, "train a LambdaMART ranker")
    p.add_argument("--instances", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, help="output model file")
    d = TrainConfig()
    p.add_argument("--trees", type=int, default=d.num_trees)
    p.add_argument("--learning-rate", type=float, default=d.learning_rate)
    p.add_argument("--max-leaves", type=int, default=d.max_leaves)
    p.add_argument("--min-leaf", type=int, default=d.min_samples_leaf)
    p.add_argument("--ndcg-k", type=int, default=d.ndcg_k)
    p.add_argument("--query-subsample", type=float, default=d.query_subsample)

    p = add("score", cmd_score, "score every candidate with a trained model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="TSV query_id, instance_id, score")
    p.add_argument("--idf")

    p = add("select", cmd_select, "MMR selection of instances")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scorer", choices=("lambdamart", "external-scores"), default="lambdamart")
    p.add_argument("--model")
    p.add_argument("--scores", help="external TSV scores")
    p.add_argument("--idf")
    p.add_argument("--lam", type=float, default=0.6, help="importance weight")
    p.add_argument("--singletons-only", action="store_true")

    p = add("baseline", cmd_baseline, "classical extractive baselines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=BASELINES, required=True)
    p.add_argument("--idf")

    p = add("eval-selection", cmd_eval_selection, "primary/secondary/all P, R, F")
    p.add_argument("--oracle", required=True)
    p.add_argument("--selections", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tsv", help="also write a one-row TSV")
    p.add_argument("--name", help="system name for the TSV row")
    p.add_argument("--corpus", help="unused; accepted for symmetry")

    p = add("eval-rouge", cmd_eval_rouge, "ROUGE of the extracts built from selections")
    p.add_argument("--corpus", required=True)
    p.add_argument("--selections", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-stemming", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.jobs is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"singpair: {exc}", file=sys.stderr)
        return 2
    except (CorpusError, RankerError, ValueError) as exc:
        print(f"singpair: {exc}", file=sys.stderr)
        return 1
    return 0
