import argparse
import importlib
import logging
import pkgutil
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

LOGGER = logging.getLogger(__name__)


@dataclass
class Command:
    name: str
    help: str
    handler: Callable
    arguments: List[Tuple[tuple, dict]] = field(default_factory=list)


COMMANDS: Dict[str, Command] = {}


def argument(*flags, **kwargs) -> Tuple[tuple, dict]:
    return flags, kwargs


def on_command(name: str, help: str = "", arguments=()):
    """Registers handler(app, args) as the sub-command `name`."""
    def decorator(handler: Callable) -> Callable:
        if name in COMMANDS and COMMANDS[name].handler is not handler:
            LOGGER.warning(f"command {name} registered twice; keeping {handler.__module__}")
        COMMANDS[name] = Command(name, help, handler, list(arguments))
        return handler
    return decorator


def load_plugins(root: str = "plugins") -> List[str]:
    package = importlib.import_module(root)
    loaded = []
    for module in sorted(m.name for m in pkgutil.iter_modules(package.__path__)):
        importlib.import_module(f"{root}.{module}")
        loaded.append(module)
    LOGGER.info(f"loaded {len(loaded)} plugins from {root}: {', '.join(loaded)}")
    return loaded


def build_parser(prog: str = "streamrec") -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=prog, description="Link-stream features for rating prediction.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(COMMANDS):
        command = COMMANDS[name]
        cmd = sub.add_parser(name, help=command.help)
        for flags, kwargs in command.arguments:
            cmd.add_argument(*flags, **kwargs)
        cmd.set_defaults(handler=command.handler)
    return parser
