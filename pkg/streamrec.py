import logging
import sys
import time
from typing import List, Optional

from functions.commands import build_parser, load_plugins
from functions.errors import PipelineError, StreamRecError
from functions.progress import ReadableTime
from translation import Translation

LOGGER = logging.getLogger(__name__)


class StreamRec:

    def __init__(self, plugins: Optional[dict] = None):
        plugins = plugins or {"root": "plugins"}
        self.plugins = load_plugins(plugins["root"])
        self.parser = build_parser()

    def run(self, argv: Optional[List[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        start = time.time()
        LOGGER.info(Translation.START_TEXT.format(command=args.command,
                                                  data_dir=getattr(args, "data_dir", "-"),
                                                  out_dir=getattr(args, "out", "-")))
        try:
            args.handler(self, args)
        except PipelineError as e:
            LOGGER.error(str(e))
            print(Translation.ERROR_TEXT.format(command=args.command, error=e), file=sys.stderr)
            return 2
        except StreamRecError as e:
            LOGGER.error(str(e))
            print(Translation.ERROR_TEXT.format(command=args.command, error=e), file=sys.stderr)
            return 1
        LOGGER.info(Translation.DONE_TEXT.format(command=args.command, elapsed=ReadableTime(time.time() - start)))
        return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        app = StreamRec()
    except StreamRecError as e:
        print(f"streamrec: {e}", file=sys.stderr)
        return 1
    return app.run(argv)


if __name__ == "__main__":
    sys.exit(main())
