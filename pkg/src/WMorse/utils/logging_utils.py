# src/WMorse/utils/logging_utils.py
from __future__ import annotations

import sys
from typing import Callable, Optional

from colorama import Fore, Style, init as colorama_init

LogFn = Callable[[str], None]

_LEVEL_COLOURS = {
    "[ERROR]": Fore.RED,
    "[WARN]": Fore.YELLOW,
    "[DONE]": Fore.GREEN,
    "[INFO]": Fore.CYAN,
}


def safe_log(log: Optional[LogFn], msg: str) -> None:
    """Log without ever raising (works with any callback or plain print)."""
    try:
        (log or (lambda *_: None))(msg)
    except Exception:
        pass


def console_log(msg: str) -> None:
    """Coloured stderr logger used by the CLI; stdout stays free for data."""
    colour = next((c for prefix, c in _LEVEL_COLOURS.items() if msg.startswith(prefix)), "")
    print(f"{colour}{msg}{Style.RESET_ALL if colour else ''}", file=sys.stderr)


def init_console() -> None:
    colorama_init()
