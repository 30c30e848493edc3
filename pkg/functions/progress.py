import math
import time

from translation import Translation

BYTE_UNITS = ("B", "KB", "MB", "GB", "TB")


def progress_line(current, total, start) -> str:
    now = time.time()
    diff = max(now - start, 1e-9)
    percentage = current * 100 / total if total else 100.0
    speed = current / diff
    time_to_completion = round((total - current) / speed) * 1000 if speed and total else 0
    bar = "[{0}{1}]".format(
        ''.join([Translation.DOWNLOAD_PROGRESS for i in range(math.floor(percentage / 5))]),
        ''.join([Translation.DOWNLOAD_PENDING for i in range(20 - math.floor(percentage / 5))])
    )
    return bar + " " + Translation.PROGRESS.format(
        round(percentage, 2),
        humanbytes(current) or "0 B",
        humanbytes(total) or "?",
        humanbytes(speed) or "0 B",
        TimeFormatter(milliseconds=time_to_completion) or "0s"
    )


def humanbytes(size) -> str:
    # 0 -> ""
    if not size:
        return ""
    unit = 0
    while size > 1024 and unit < len(BYTE_UNITS) - 1:
        size /= 1024
        unit += 1
    return f"{round(size, 2)} {BYTE_UNITS[unit]}"


def TimeFormatter(milliseconds: int) -> str:
    seconds, milliseconds = divmod(int(milliseconds), 1000)
    minutes, seconds = divmod(seconds, 60)
    hours, minutes = divmod(minutes, 60)
    days, hours = divmod(hours, 24)
    parts = zip((days, hours, minutes, seconds, milliseconds), ("d", "h", "m", "s", "ms"))
    return ", ".join(f"{value}{unit}" for value, unit in parts if value)


def ReadableTime(seconds) -> str:
    """Elapsed time as "1d2h3m4s"; zero units dropped except seconds."""
    days, rest = divmod(int(seconds), 86400)
    hours, rest = divmod(rest, 3600)
    minutes, seconds = divmod(rest, 60)
    units = "".join(f"{value}{unit}" for value, unit in ((days, "d"), (hours, "h"), (minutes, "m")) if value)
    return f"{units}{seconds}s"
