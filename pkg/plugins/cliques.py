from config import BALANCE, DATA_DIR, DELTA, INCLUDE_TAGS, SAMPLES, SEED, STOP_PROBABILITY, THREADS
from functions.cliques import sample_balanced_max_cliques, write_cliques
from functions.commands import argument, on_command
from plugins.stream import dataset_stream
from translation import Translation


@on_command("cliques", help="sample maximal balanced cliques of the whole-dataset link stream", arguments=(
    argument("--data-dir", default=DATA_DIR),
    argument("--delta", type=int, default=DELTA),
    argument("--samples", type=int, default=SAMPLES),
    argument("--balance", type=float, default=BALANCE),
    argument("--stop-probability", type=float, default=STOP_PROBABILITY),
    argument("--seed", type=int, default=SEED),
    argument("--threads", type=int, default=THREADS),
    argument("--out", required=True),
    argument("--exclude-tags", action="store_true", default=not INCLUDE_TAGS),
))
def cliques_handler(_, args):
    stream = dataset_stream(args.data_dir, args.delta, not args.exclude_tags)
    cliques = sample_balanced_max_cliques(stream, args.samples, args.balance, args.seed,
                                          args.stop_probability, max(1, args.threads))
    write_cliques(cliques, args.out)
    print(Translation.CLIQUES_WRITTEN.format(count=len(cliques), balance=args.balance, samples=args.samples,
                                             seed=args.seed, path=args.out))
