from config import DATA_DIR, INCLUDE_TAGS
from functions.commands import argument, on_command
from functions.ingest import dataset_report, load_dataset
from translation import Translation


@on_command("ingest", help="parse the MovieLens files and report the dataset shape", arguments=(
    argument("--data-dir", default=DATA_DIR),
    argument("--report", action="store_true"),
    argument("--exclude-tags", action="store_true", default=not INCLUDE_TAGS),
))
def ingest_handler(_, args):
    dataset = load_dataset(args.data_dir, include_tags=not args.exclude_tags)
    if args.report:
        print(Translation.DATASET_REPORT.format(data_dir=args.data_dir, **dataset_report(dataset)))
