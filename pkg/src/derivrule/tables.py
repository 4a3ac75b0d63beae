"""Plain CSV tables with ``#`` metadata lines, written atomically."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from typing import Iterable, Optional, Sequence

from .numerics import format_number

__all__ = ["render_table", "write_table", "read_table", "cell"]


def cell(value, digits: int) -> str:
    """Numbers in scientific notation, strings and None (blank) verbatim."""
    if value is None:
        return ""
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        return str(value)
    return format_number(value, digits)


def render_table(header: Sequence[str], rows: Iterable[Sequence], digits: int,
                 meta: Optional[dict] = None) -> str:
    buf = io.StringIO()
    for key, val in (meta or {}).items():
        buf.write(f"# {key}: {val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([cell(v, digits) for v in row])
    return buf.getvalue()


def write_table(path, header, rows, digits: int, meta: Optional[dict] = None) -> str:
    """Render and write to ``path`` via a temporary file and rename; returns the text."""
    text = render_table(header, rows, digits, meta)
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return text


def read_table(source) -> tuple[dict, list[str], list[list[str]]]:
    """Parse text or a path into (meta, header, rows of strings)."""
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(":")
            meta[key.strip()] = val.strip()
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]
