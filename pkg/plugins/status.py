import shutil

import psutil

from config import THREADS
from functions.commands import on_command
from functions.progress import humanbytes
from translation import Translation


@on_command("status", help="CPU, RAM and disk usage of this machine")
def status_handler(_, args):
    total, used, free = shutil.disk_usage(".")
    print(Translation.STATUS_TEXT.format(
        total=humanbytes(total),
        used=humanbytes(used),
        free=humanbytes(free),
        disk=psutil.disk_usage('.').percent,
        cpu=psutil.cpu_percent(),
        ram=psutil.virtual_memory().percent,
        threads=THREADS,
    ))
