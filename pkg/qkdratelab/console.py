# Copyright 2024 qkdratelab contributors

"""console rendering of point breakdowns and series differences"""

import sys
from difflib import SequenceMatcher
from html import escape
from typing import Iterable, List, Mapping, Tuple

from prompt_toolkit import HTML
from prompt_toolkit import print_formatted_text as print_ft
from prompt_toolkit.styles import Style

from .common import QrlError
from .compare import RowDifference, SeriesComparer
from .model import ROW_ATTRIBUTES

STYLE = Style.from_dict(
    {
        "data": "bold",
        "info": "italic",
    }
)


def _markup(data: str, markup: str) -> str:
    return f"<{markup}>{data}</{markup}>"


def _text(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return escape(str(value))


def _print(markup: str):
    print_ft(HTML(markup), style=STYLE, file=sys.stdout)


# inspired by https://stackoverflow.com/a/788780
def _highlight_diff(old: str, new: str) -> Tuple[str, str]:
    diff_sequencer = SequenceMatcher(None, old, new)
    old_ft, new_ft = [], []
    for opcode, old0, old1, new0, new1 in diff_sequencer.get_opcodes():
        if opcode == "equal":
            old_ft.append(escape(old[old0:old1]))
            new_ft.append(escape(old[old0:old1]))
        elif opcode == "insert":
            new_ft.append(_markup(escape(new[new0:new1]), "ansigreen"))
        elif opcode == "delete":
            old_ft.append(_markup(escape(old[old0:old1]), "ansired"))
        elif opcode == "replace":
            old_ft.append(_markup(escape(old[old0:old1]), "ansired"))
            new_ft.append(_markup(escape(new[new0:new1]), "ansigreen"))
        else:
            raise QrlError(f"SequenceMatcher opcode: {opcode}")
    return "".join(old_ft), "".join(new_ft)


def print_breakdown(title: str, values: Mapping[str, object]):
    """one aligned `name : value` line per field"""
    _print(_markup(escape(title), "data"))
    width = max((len(name) for name in values), default=0)
    for name, value in values.items():
        _print(f"  <info>{name:<{width}} : </info>{_markup(_text(value), 'data')}")


def _print_rows(kind: str, rows: Iterable[RowDifference]):
    for row in rows:
        _print(f"  <info>{kind} </info>{_markup(escape(row.key), 'data')}")


def _print_changes(rows: List[RowDifference]):
    for row in rows:
        _print(f"  <info>changed </info>{_markup(escape(row.key), 'data')}")
        for attr in [attr for attr in ROW_ATTRIBUTES if attr in (row.changed or set())]:
            old, new = _highlight_diff(str(row.old.get(attr) or ""), str(row.new.get(attr) or ""))
            _print(f"      <info>{attr:<14}: </info>{old}<info> -> </info>{new}")


def print_comparison(comparer: SeriesComparer):
    """lists added, removed and changed rows with highlighted value differences"""
    _print_rows("added  ", comparer.added)
    _print_rows("removed", comparer.removed)
    _print_changes(comparer.changed)
    _print(
        f"<info>{len(comparer.unchanged)} unchanged, {len(comparer.added)} added, "
        f"{len(comparer.removed)} removed, {len(comparer.changed)} changed</info>"
    )
