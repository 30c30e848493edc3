import asyncio
import logging
import os
import time
import zipfile

import aiofiles
import aiohttp
import requests

from functions.errors import StreamRecError
from functions.progress import ReadableTime, humanbytes, progress_line
from translation import Translation

LOGGER = logging.getLogger(__name__)

CHUNK_SIZE = 1024 * 1024
PROCESS_MAX_TIMEOUT = 3600
PROGRESS_EVERY = 5.0


async def download_coroutine(session: aiohttp.ClientSession, url: str, file_name: str, start: float) -> int:
    downloaded = 0
    last = 0.0
    timeout = aiohttp.ClientTimeout(total=PROCESS_MAX_TIMEOUT)
    async with session.get(url, timeout=timeout) as response:
        response.raise_for_status()
        total_length = int(response.headers.get("Content-Length", 0))
        LOGGER.info(Translation.DOWNLOAD_START.format(url=url, size=humanbytes(total_length) or "unknown"))
        async with aiofiles.open(file_name, "wb") as f_handle:
            while True:
                chunk = await response.content.read(CHUNK_SIZE)
                if not chunk:
                    break
                await f_handle.write(chunk)
                downloaded += len(chunk)
                now = time.time()
                if now - last >= PROGRESS_EVERY or downloaded == total_length:
                    LOGGER.info(progress_line(downloaded, total_length, start))
                    last = now
    return downloaded


def _download_with_requests(url: str, file_name: str, start: float) -> int:
    downloaded = 0
    with requests.get(url, allow_redirects=True, stream=True, timeout=PROCESS_MAX_TIMEOUT) as r:
        r.raise_for_status()
        total_size = int(r.headers.get("content-length", 0))
        with open(file_name, "wb") as fd:
            for chunk in r.iter_content(chunk_size=CHUNK_SIZE):
                if chunk:
                    fd.write(chunk)
                    downloaded += len(chunk)
        LOGGER.info(progress_line(downloaded, total_size or downloaded, start))
    return downloaded


def extract_dataset(archive: str, data_dir: str) -> int:
    """Unpacks the archive's csv files into data_dir, dropping the archive's top folder."""
    os.makedirs(data_dir, exist_ok=True)
    count = 0
    with zipfile.ZipFile(archive) as zf:
        for member in zf.infolist():
            name = os.path.basename(member.filename)
            if member.is_dir() or not name.endswith(".csv"):
                continue
            with zf.open(member) as src, open(os.path.join(data_dir, name), "wb") as dst:
                while True:
                    block = src.read(CHUNK_SIZE)
                    if not block:
                        break
                    dst.write(block)
            count += 1
    return count


async def fetch_dataset(data_dir: str, url: str) -> str:
    """
    Downloads the MovieLens archive at url and extracts it into data_dir.

    Args:
        data_dir: target directory for ratings.csv, movies.csv and tags.csv
        url: archive address

    Returns:
        data_dir
    """
    os.makedirs(data_dir, exist_ok=True)
    archive = os.path.join(data_dir, os.path.basename(url) or "dataset.zip")
    start = time.time()
    try:
        async with aiohttp.ClientSession() as session:
            size = await download_coroutine(session, url, archive, start)
    except (aiohttp.ClientError, asyncio.TimeoutError) as e:
        LOGGER.warning(f"aiohttp download failed ({e}); retrying with requests")
        try:
            size = await asyncio.to_thread(_download_with_requests, url, archive, start)
        except requests.RequestException as err:
            raise StreamRecError(f"could not download {url}: {err}") from err
    try:
        files = extract_dataset(archive, data_dir)
    except zipfile.BadZipFile as e:
        raise StreamRecError(f"{archive} is not a zip archive: {e}") from e
    LOGGER.info(Translation.DOWNLOAD_DONE.format(size=humanbytes(size), path=archive,
                                                 elapsed=ReadableTime(time.time() - start),
                                                 files=files, target=data_dir))
    return data_dir
