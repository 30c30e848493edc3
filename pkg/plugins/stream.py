from config import DATA_DIR, DELTA, INCLUDE_TAGS
from database.store import write_stream
from functions.commands import argument, on_command
from functions.ingest import load_dataset
from functions.linkstream import build_stream, data_span
from translation import Translation


def dataset_stream(data_dir: str, delta: int, include_tags: bool):
    dataset = load_dataset(data_dir, include_tags)
    events = dataset.events if include_tags else dataset.ratings
    return build_stream(events, delta, data_span(events, delta))


@on_command("stream", help="dump the whole-dataset link stream as 'user item begin end' lines", arguments=(
    argument("--data-dir", default=DATA_DIR),
    argument("--delta", type=int, default=DELTA),
    argument("--out", required=True),
    argument("--exclude-tags", action="store_true", default=not INCLUDE_TAGS),
))
def stream_handler(_, args):
    stream = dataset_stream(args.data_dir, args.delta, not args.exclude_tags)
    write_stream(stream, args.out)
    print(Translation.STREAM_WRITTEN.format(links=stream.n_links, users=len(stream.users),
                                            items=len(stream.items), delta=args.delta, path=args.out))
