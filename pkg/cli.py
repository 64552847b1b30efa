# cli.py
"""
intentsec command line.

    python cli.py extract  --manifests DIR --labels labels.csv --out OUT
    python cli.py analyze  --features OUT/features.csv --k 10 --out OUT
    python cli.py train    --features OUT/features.csv [--config configs/best_e2e.json] --out MODEL
    python cli.py sweep    --plan plans/full_grid.json --features OUT/features.csv --out SWEEP
    python cli.py predict  --model MODEL --manifests DIR --out SCORES
    python cli.py synth    --out CORPUS [--n-mal 200 --n-ben 200 ...]
    python cli.py archive  --run MODEL [--upload] | --verify ZIP --sha256 HEX

Exit codes: 0 success, 2 toolkit or usage error, 1 unexpected failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import DEFAULT_SEED, DEFAULT_WORKERS, LOG_LEVEL, RUNS_DIR, SYNTH, TOOL_NAME, TOOL_VERSION
from errors import ConfigError, IntentSecError
from logsetup import configure_logging

logger = logging.getLogger("CLI")

FEATURES_FILE = "features.csv"
VOCABULARY_FILE = "vocabulary.json"


def _out_dir(args) -> Path:
    out = Path(args.out) if args.out else Path(RUNS_DIR) / args.command
    out.mkdir(parents=True, exist_ok=True)
    return out


def _seed(args, fallback: int = DEFAULT_SEED) -> int:
    return fallback if args.seed is None else args.seed


def _load_features(path: str):
    from features import FeatureMatrix
    return FeatureMatrix.from_csv(path)


# ============================================
# extract
# ============================================

def cmd_extract(args) -> int:
    from artifacts import RunManifest
    from features import build_vocabulary, split_train_validation, vectorize
    from ingest import load_corpus
    from pipeline import PipelineConfig

    out = _out_dir(args)
    cfg = PipelineConfig.load(args.config, seed=args.seed) if args.config else PipelineConfig.from_dict({}, seed=args.seed)
    binarize = cfg.binarize and not args.no_binarize
    manifest = RunManifest(command="extract", seed=cfg.seed,
                           config={"binarize": binarize, "split": args.split,
                                   "train_fraction": cfg.train_fraction})

    with manifest.timed("ingest"):
        corpus = load_corpus(args.manifests, args.labels, workers=args.workers)
    manifest.add_input("corpus", corpus.fingerprint)

    with manifest.timed("vectorize"):
        vocab = build_vocabulary(corpus)
        matrix = vectorize(corpus, vocab, binarize=binarize)
        if args.split:
            matrix = split_train_validation(matrix, cfg.train_fraction, cfg.seed)

    matrix.to_csv(out / FEATURES_FILE)
    vocab.save(out / VOCABULARY_FILE)
    manifest.record_outputs(out, [FEATURES_FILE, VOCABULARY_FILE])
    manifest.write(out)
    logger.info(f"{matrix.n_rows} apps x {matrix.n_features} intents -> {out / FEATURES_FILE}")
    return 0


# ============================================
# analyze
# ============================================

def cmd_analyze(args) -> int:
    from artifacts import RunManifest, hash_file
    from ingest import load_corpus
    from stats import RankBy, class_counts, class_counts_from_matrix, top_k, write_stats_csv

    if args.k < 1:
        raise ConfigError("k must be >= 1", k=args.k)
    out = _out_dir(args)
    manifest = RunManifest(command="analyze", config={"k": args.k})

    if args.features:
        matrix = _load_features(args.features)
        stats = class_counts_from_matrix(matrix)
        manifest.add_input("features", hash_file(args.features))
    elif args.manifests and args.labels:
        corpus = load_corpus(args.manifests, args.labels, workers=args.workers)
        stats = class_counts(corpus)
        manifest.add_input("corpus", corpus.fingerprint)
    else:
        raise ConfigError("analyze needs --features or --manifests with --labels")

    tables = {
        "top_malicious.csv": RankBy.COUNT_MAL,
        "top_benign.csv": RankBy.COUNT_BEN,
        "top_norm_diff.csv": RankBy.NORM_DIFF_MAL,
    }
    for name, rank_by in tables.items():
        write_stats_csv(top_k(stats, rank_by, args.k), out / name)
    write_stats_csv(stats, out / "intent_stats.csv")

    manifest.record_outputs(out, list(tables) + ["intent_stats.csv"])
    manifest.write(out)
    return 0


# ============================================
# train
# ============================================

def cmd_train(args) -> int:
    from artifacts import RunManifest, hash_file
    from autoencoder import build_sae, encode, train_ae
    from classifier import build_mlp, predict, train_mlp
    from evaluation import evaluate, plot_roc
    from features import Split, Vocabulary, split_train_validation
    from pipeline import PipelineConfig

    cfg = PipelineConfig.load(args.config, seed=args.seed) if args.config else PipelineConfig.best(seed=args.seed)
    features = _load_features(args.features)
    out = _out_dir(args)

    vocab_path = Path(args.vocab) if args.vocab else Path(args.features).with_name(VOCABULARY_FILE)
    if vocab_path.is_file():
        vocab = Vocabulary.load(vocab_path)
        if vocab.labels != [k.label for k in features.keys]:
            raise ConfigError("Vocabulary does not match the feature columns", vocab=str(vocab_path))
    else:
        vocab = Vocabulary(keys=features.keys, frozen_from=hash_file(args.features))

    manifest = RunManifest(command="train", seed=cfg.seed, config={
        **cfg.to_dict(),
        "features": {"binarized": features.binarized, "n_features": features.n_features},
    })
    manifest.add_input("features", hash_file(args.features))
    manifest.add_input("vocabulary", vocab.frozen_from)

    if not features.is_split:
        features = split_train_validation(features, cfg.train_fraction, cfg.seed)

    with manifest.timed("autoencoder"):
        ae = build_sae(features.n_features, cfg.ae)
        ae, ae_history = train_ae(ae, features, cfg.ae)
        embeddings = encode(ae, features)

    with manifest.timed("classifier"):
        mlp = build_mlp(embeddings.embedding_dim, cfg.mlp)
        mlp, mlp_history = train_mlp(mlp, embeddings, cfg.mlp)
        scores = predict(mlp, embeddings)

    with manifest.timed("evaluate"):
        validation = scores.subset(features.mask(Split.VALIDATION))
        report, curve = evaluate(validation, meta={"config": cfg.name, "conf_id": cfg.conf_id,
                                                   "split": features.split_counts()})

    ae.save(out / "ae.json")
    mlp.save(out / "mlp.json")
    vocab.save(out / VOCABULARY_FILE)
    ae_history.to_csv(out / "history_ae.csv")
    mlp_history.to_csv(out / "history_mlp.csv")
    embeddings.to_csv(out / "embeddings.csv")
    scores.to_csv(out / "train_scores.csv")
    curve.to_csv(out / "roc.csv")
    report.save(out / "report.json")
    written = ["ae.json", "mlp.json", VOCABULARY_FILE, "history_ae.csv", "history_mlp.csv",
               "embeddings.csv", "train_scores.csv", "roc.csv", "report.json"]
    if not args.no_plot:
        plot_roc(curve, out / "roc.png", title=f"ROC: {cfg.name}")
        written.append("roc.png")

    manifest.record_outputs(out, written)
    manifest.write(out)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


# ============================================
# sweep
# ============================================

def cmd_sweep(args) -> int:
    from artifacts import RunManifest, hash_file
    from features import split_train_validation
    from sweep import SweepPlan, run_sweep, stage_filter, write_results_csv

    plan = SweepPlan.load(args.plan)
    seed = _seed(args, plan.seed)
    features = _load_features(args.features)
    out = _out_dir(args)

    manifest = RunManifest(command="sweep", seed=seed, config=plan.to_dict())
    manifest.add_input("plan", hash_file(args.plan))
    manifest.add_input("features", hash_file(args.features))

    if not features.is_split:
        features = split_train_validation(features, plan.train_fraction, seed)

    selected = plan.only(args.stage, seed) if args.stage else plan.rows(seed)

    with manifest.timed("sweep"):
        rows = run_sweep(selected, features, workers=args.workers, runs_dir=out / "runs")
    write_results_csv(rows, out / "sweep_results.csv")

    survivors = {}
    for stage in dict.fromkeys(r.stage for r in rows):
        kept = stage_filter(rows, delta=args.delta, stage=stage)
        survivors[stage] = [r.conf_id for r in kept]
    with open(out / "survivors.json", "w", encoding="utf-8") as f:
        json.dump({"criterion": f"MLP AUC within {args.delta} of stage best", "stages": survivors},
                  f, indent=2, sort_keys=True)

    manifest.record_outputs(out, ["sweep_results.csv", "survivors.json"])
    manifest.write(out)
    failed = [r.conf_id for r in rows if not r.ok]
    if failed:
        logger.warning(f"Failed conf ids: {failed}")
    return 0


# ============================================
# predict
# ============================================

def cmd_predict(args) -> int:
    from artifacts import RunManifest
    from autoencoder import encode
    from classifier import ScoreVector, predict
    from features import Vocabulary, vectorize
    from ingest import load_unlabeled
    from nn import Network

    model_dir = Path(args.model)
    for name in ("ae.json", "mlp.json", VOCABULARY_FILE):
        if not (model_dir / name).is_file():
            raise ConfigError(f"Model bundle is missing {name}", model=str(model_dir))
    out = _out_dir(args)

    trained = RunManifest.load(model_dir)
    binarize = trained.config.get("features", {}).get("binarized", True)
    vocab = Vocabulary.load(model_dir / VOCABULARY_FILE)
    ae = Network.load(model_dir / "ae.json")
    mlp = Network.load(model_dir / "mlp.json")

    manifest = RunManifest(command="predict", seed=trained.seed,
                           config={"model": str(model_dir), "binarize": binarize})
    manifest.add_input("model", trained.config_fingerprint)

    corpus = load_unlabeled(args.manifests, workers=args.workers)
    manifest.add_input("manifests", corpus.fingerprint)
    if len(corpus) == 0:
        logger.warning(f"No manifests found in {args.manifests}")
        scores = ScoreVector(app_ids=[], scores=[])
    else:
        matrix = vectorize(corpus, vocab, binarize=binarize)
        scores = predict(mlp, encode(ae, matrix))

    scores.to_csv(out / "scores.csv")
    manifest.record_outputs(out, ["scores.csv"])
    manifest.write(out)
    logger.info(f"Scored {len(scores)} app(s) -> {out / 'scores.csv'}")
    return 0


# ============================================
# synth
# ============================================

def cmd_synth(args) -> int:
    from artifacts import RunManifest
    from synth import GeneratorSpec, generate_corpus

    seed = _seed(args)
    spec = GeneratorSpec.contrastive(
        n_mal=args.n_mal, n_ben=args.n_ben, vocab_size=args.vocab_size,
        n_informative=args.n_informative, gap=args.gap, base_rate=args.base_rate,
        seed=seed, max_repeat=args.max_repeat,
    )
    out = _out_dir(args)
    manifest = RunManifest(command="synth", seed=seed, config=spec.to_dict())
    with manifest.timed("generate"):
        generated = generate_corpus(spec, out)
    manifest.record_outputs(out, ["labels.csv", "ground_truth.json"])
    manifest.write(out)
    logger.info(f"Manifests in {generated.manifest_dir}, labels in {generated.labels_file}")
    return 0


# ============================================
# archive
# ============================================

def cmd_archive(args) -> int:
    from artifacts import RunArchiver

    archiver = RunArchiver(output_dir=args.archive_dir) if args.archive_dir else RunArchiver()
    if args.verify:
        if not args.sha256:
            raise ConfigError("--verify needs --sha256")
        return 0 if archiver.verify(args.verify, args.sha256) else 2
    if not args.run:
        raise ConfigError("archive needs --run or --verify")

    archive = archiver.build(args.run)
    if args.upload:
        archiver.upload(archive)
    print(json.dumps(archive.to_dict(), indent=2, sort_keys=True))
    return 0


# ============================================
# parser
# ============================================

COMMANDS = {
    "extract": cmd_extract,
    "analyze": cmd_analyze,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "predict": cmd_predict,
    "synth": cmd_synth,
    "archive": cmd_archive,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"Random seed (default: config file seed or {DEFAULT_SEED})")
    common.add_argument("--out", default=None, help=f"Output directory (default: {RUNS_DIR}/<command>)")
    common.add_argument("--workers", type=int, default=DEFAULT_WORKERS,
                        help="Worker processes for parsing and sweeps")
    common.add_argument("--log-level", default=LOG_LEVEL, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--error-json", action="store_true",
                        help="Print errors as JSON on stderr")

    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Android implicit-Intent malware detection: extract, analyze, train, sweep, predict.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="Manifests + labels -> feature CSV + vocabulary")
    p.add_argument("--manifests", required=True, help="Directory of <app_id>.xml manifests")
    p.add_argument("--labels", required=True, help="CSV with header app_id,label")
    p.add_argument("--config", help="Pipeline config JSON (binarize, train_fraction, seed)")
    p.add_argument("--no-binarize", action="store_true", help="Keep occurrence counts instead of presence")
    p.add_argument("--split", action="store_true", help="Assign the Train/Validation split now")

    p = sub.add_parser("analyze", parents=[common], help="Per-class intent frequency tables")
    p.add_argument("--features", help="Feature CSV from extract")
    p.add_argument("--manifests", help="Manifest directory (with --labels) instead of --features")
    p.add_argument("--labels")
    p.add_argument("--k", type=int, default=10, help="Rows per top-k table (default: 10)")

    p = sub.add_parser("train", parents=[common], help="Train AE + MLP and evaluate")
    p.add_argument("--features", required=True)
    p.add_argument("--config", help="Pipeline config JSON (default: best end-to-end settings)")
    p.add_argument("--vocab", help="Vocabulary JSON (default: next to the feature file)")
    p.add_argument("--no-plot", action="store_true", help="Skip roc.png")

    p = sub.add_parser("sweep", parents=[common], help="Run a configuration grid")
    p.add_argument("--plan", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--stage", action="append", help="Run only this stage (repeatable)")
    p.add_argument("--delta", type=float, default=None, help="AUC tolerance for stage survivors")

    p = sub.add_parser("predict", parents=[common], help="Score new manifests with a trained bundle")
    p.add_argument("--model", required=True, help="Output directory of a train run")
    p.add_argument("--manifests", required=True)

    p = sub.add_parser("synth", parents=[common], help="Generate a synthetic labeled corpus")
    p.add_argument("--n-mal", type=int, default=SYNTH["n_mal"])
    p.add_argument("--n-ben", type=int, default=SYNTH["n_ben"])
    p.add_argument("--vocab-size", type=int, default=SYNTH["vocab_size"])
    p.add_argument("--n-informative", type=int, default=SYNTH["n_informative"])
    p.add_argument("--gap", type=float, default=SYNTH["gap"])
    p.add_argument("--base-rate", type=float, default=SYNTH["base_rate"])
    p.add_argument("--max-repeat", type=int, default=SYNTH["max_repeat"])

    p = sub.add_parser("archive", parents=[common], help="Zip a run directory (and optionally upload)")
    p.add_argument("--run", help="Run directory containing run_manifest.json")
    p.add_argument("--archive-dir", help="Where archives are written")
    p.add_argument("--upload", action="store_true", help="Upload to R2/S3 when configured")
    p.add_argument("--verify", help="Archive ZIP to verify")
    p.add_argument("--sha256", help="Expected SHA-256 for --verify")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if getattr(args, "delta", 0) is None:
        from config import STAGE_AUC_DELTA
        args.delta = STAGE_AUC_DELTA

    try:
        return COMMANDS[args.command](args)
    except IntentSecError as e:
        if args.error_json:
            print(json.dumps(e.to_dict(), sort_keys=True, default=str), file=sys.stderr)
        else:
            logger.error(f"{e.code}: {e}")
        return 2
    except Exception as e:
        if args.error_json:
            print(json.dumps({"error": type(e).__name__, "message": str(e), "context": {}}), file=sys.stderr)
        logger.exception("Unexpected failure")
        return 1


if __name__ == '__main__':
    sys.exit(main())
