from config import (BALANCE, DATA_DIR, DELTA, EPOCHS, FOLDS, INCLUDE_TAGS, NDCG_K, OUT_DIR, REGULARIZATION,
                    SAMPLES, SEED, STOP_PROBABILITY, THREADS)
from functions.commands import argument, on_command
from functions.pipeline import ExperimentConfig, render_report, run_experiment


@on_command("run-all", help="cross-validated feature extraction, matrix export and baseline scoring", arguments=(
    argument("--data-dir", default=DATA_DIR),
    argument("--out", default=OUT_DIR),
    argument("--folds", type=int, default=FOLDS),
    argument("--seed", type=int, default=SEED),
    argument("--delta", type=int, default=DELTA),
    argument("--samples", type=int, default=SAMPLES),
    argument("--balance", type=float, default=BALANCE),
    argument("--stop-probability", type=float, default=STOP_PROBABILITY),
    argument("--k", type=int, default=NDCG_K),
    argument("--regularization", type=float, default=REGULARIZATION),
    argument("--epochs", type=int, default=EPOCHS),
    argument("--threads", type=int, default=THREADS),
    argument("--strict-39", action="store_true"),
    argument("--keep-discarded", action="store_true"),
    argument("--content-only", action="store_true"),
    argument("--whole-stream-cliques", action="store_true"),
    argument("--exclude-tags", action="store_true", default=not INCLUDE_TAGS),
))
def run_all_handler(_, args):
    config = ExperimentConfig(
        data_dir=args.data_dir,
        out_dir=args.out,
        folds=args.folds,
        seed=args.seed,
        delta=args.delta,
        samples=args.samples,
        balance=args.balance,
        stop_probability=args.stop_probability,
        strict_39=args.strict_39,
        keep_discarded=args.keep_discarded,
        content_only=args.content_only,
        whole_stream_cliques=args.whole_stream_cliques,
        include_tags=not args.exclude_tags,
        regularization=args.regularization,
        epochs=args.epochs,
        ndcg_k=args.k,
        threads=max(1, args.threads),
    )
    report = run_experiment(config)
    print(render_report(report), end="")
