"""JSON/CSV artifact plumbing: canonical serialization and atomic writes."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction

from .exactlin import DimensionError, Subspace, format_rational, parse_rational

SCHEMA_VERSION = 1


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "), ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rows_to_json(v: Subspace) -> list:
    """Sparse row-lists: each row is ``[[column, "p/q"], ...]``."""
    return [[[c, format_rational(x)] for c, x in row] for row in v.rows]


def rows_from_json(rows, ambient_dim: int, *, canonical: bool = True) -> Subspace:
    vecs = []
    for row in rows:
        vec = {}
        for c, x in row:
            c = int(c)
            if not 0 <= c < ambient_dim:
                raise DimensionError(f"column {c} outside ambient {ambient_dim}")
            vec[c] = parse_rational(str(x))
        vecs.append(vec)
    if not canonical:
        return Subspace.span(vecs, ambient_dim)
    stored = Subspace(ambient_dim, tuple(tuple(sorted((c, v) for c, v in vec.items() if v)) for vec in vecs))
    return stored


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_rational(x) if isinstance(x, Fraction) else x for x in r])
    return buf.getvalue()
