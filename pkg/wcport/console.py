from contextlib import contextmanager

from rich.console import Console
from rich.progress import (
    Progress,
    BarColumn,
    TimeElapsedColumn,
    SpinnerColumn,
    TextColumn,
)
from rich.theme import Theme

console = Console(
    theme=Theme(
        {
            "info": "cyan",
            "success": "green",
            "error": "bold red",
            "warn": "yellow",
        }
    ),
    highlight=False,
)

_state = {"quiet": False}


def set_quiet(flag: bool):
    _state["quiet"] = bool(flag)


def info(msg, **kwargs):
    if not _state["quiet"]:
        console.print(msg, style="info", **kwargs)


def success(msg, **kwargs):
    console.print(msg, style="success", **kwargs)


def warn(msg, **kwargs):
    console.print(msg, style="warn", **kwargs)


def error(msg, **kwargs):
    console.print(msg, style="error", **kwargs)


@contextmanager
def progress_bar(description: str, total: int, enabled: bool = True):
    """Yield an `advance(n=1)` callable backed by a rich progress bar.

    With `enabled=False` (or in quiet mode) the callable is a no-op, so hot
    loops do not need to branch on it.
    """
    if not enabled or _state["quiet"]:
        yield lambda n=1: None
        return

    with Progress(
        SpinnerColumn(),
        TextColumn("{task.description}"),
        BarColumn(),
        "[progress.percentage]{task.percentage:>3.0f}%",
        TimeElapsedColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(description, total=total)
        yield lambda n=1: progress.advance(task, n)
