import asyncio

from config import DATA_DIR, ML20M_URL
from functions.commands import argument, on_command
from functions.downloader import fetch_dataset


@on_command("download", help="fetch and unpack the MovieLens 20M archive", arguments=(
    argument("--data-dir", default=DATA_DIR),
    argument("--url", default=ML20M_URL),
))
def download_handler(_, args):
    asyncio.run(fetch_dataset(args.data_dir, args.url))
