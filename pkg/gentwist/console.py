"""
gentwist console library.

Logging and terminal rendering on top of Rich. The report goes to stdout, everything else to stderr.

References
----------
* https://rich.readthedocs.io/en/stable/logging.html

"""

__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"


import logging
from typing import Any

from rich import print_json
from rich.console import Console
from rich.logging import RichHandler
from rich.traceback import install
from rich.tree import Tree

from .types import RenderTarget

install()

log = logging.getLogger("rich")

console = Console()
logConsole = Console(stderr=True)

logging.basicConfig(
    level="INFO", format="%(message)s", datefmt="[%X]", handlers=[RichHandler(console=logConsole, markup=True)]
)


class Styles:
    """Custom styles."""

    section = "bold bright_blue"
    highlight = "bold magenta"
    passed = "bold green"
    failed = "bold red"
    skipped = "dim"
    key = "italic green"


def set_verbosity(verbose: bool) -> None:
    """Switch between INFO and DEBUG logging."""
    log.setLevel(logging.DEBUG if verbose else logging.INFO)


def _stylize_key(key: str) -> str:
    """Stylize key."""
    return f"[{Styles.key}]{key}[/{Styles.key}]:"


def _parse_tree_branch(tree: Tree, data: dict[str, Any]) -> None:
    """Render tree branch."""
    for key, node in data.items():
        if isinstance(node, dict):
            _parse_tree_branch(tree.add(_stylize_key(key)), node)
        elif isinstance(node, list) and len(node) > 1:
            branch = tree.add(_stylize_key(key))
            for item in node:
                branch.add(str(item))
        else:
            tree.add(f"{_stylize_key(key)} {node}")


def render_as(data: dict[str, Any], target: RenderTarget = RenderTarget.TREE, title: str = "") -> None:
    """Render data to console."""
    if target == RenderTarget.JSON:
        print_json(data=data)
        return

    tree = Tree(f"[{Styles.section}]{title}", guide_style=Styles.section)
    _parse_tree_branch(tree, data)
    console.print(tree)
