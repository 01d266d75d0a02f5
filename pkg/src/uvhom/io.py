"""Readers and writers for the plain-text file formats.

points (.csv)        one point per row, fixed number of real columns
distance matrix      (.matrix / .dist) n rows of n reals, comma separated
relation (.rel)      one "i j" pair per line, diagonal implicit
subset               one point index per line
complex (.cx)        one maximal simplex per line, whitespace separated
vertex map (.map)    one "i j" line per source vertex

Blank lines and lines starting with ``#`` are ignored everywhere.
"""
from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Iterable

import numpy as np

from .complex import SimplicialComplex, load_complex
from .errors import InputError
from .space import Entourage, MetricCloud

log = logging.getLogger(__name__)


def _lines(path):
    try:
        with open(path) as fh:
            text = fh.read().splitlines()
    except OSError as e:
        raise InputError(str(e)) from None
    for lineno, line in enumerate(text, 1):
        s = line.strip()
        if s and not s.startswith("#"):
            yield lineno, s


def _reals(path):
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                cells = [c.strip() for c in row]
                if not cells or not any(cells) or cells[0].startswith("#"):
                    continue
                try:
                    rows.append([float(c) for c in cells])
                except ValueError:
                    raise InputError(f"{path}:{lineno}: non-numeric entry") from None
    except OSError as e:
        raise InputError(str(e)) from None
    if rows and len({len(r) for r in rows}) != 1:
        raise InputError(f"{path}: rows have differing lengths")
    return rows


def read_points(path) -> MetricCloud:
    rows = _reals(path)
    if not rows:
        raise InputError(f"{path}: no points")
    return MetricCloud.from_coords(np.array(rows))


def read_distance_matrix(path) -> MetricCloud:
    rows = _reals(path)
    if len(rows) != (len(rows[0]) if rows else 0):
        raise InputError(f"{path}: expected a square matrix")
    return MetricCloud.from_matrix(np.array(rows))


def _int_fields(path, lineno, text, count=None):
    try:
        vals = [int(t) for t in text.split()]
    except ValueError:
        raise InputError(f"{path}:{lineno}: expected integers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise InputError(f"{path}:{lineno}: expected {count} integers, got {len(vals)}")
    if any(v < 0 for v in vals):
        raise InputError(f"{path}:{lineno}: negative index")
    return vals


def read_relation(path, n: int | None = None) -> Entourage:
    """Relation file; asymmetric input is symmetrised with a warning."""
    pairs = [tuple(_int_fields(path, ln, s, 2)) for ln, s in _lines(path)]
    size = max((max(p) for p in pairs), default=-1) + 1
    if n is not None:
        if size > n:
            raise InputError(f"{path}: index {size - 1} out of range for {n} points")
        size = n
    given = set(pairs)
    if any((j, i) not in given for i, j in given if i != j):
        log.warning("%s: relation is not symmetric; symmetrising", path)
    return Entourage.from_pairs(size, pairs)


def read_subset(path, n: int | None = None) -> frozenset:
    out = set()
    for ln, s in _lines(path):
        (v,) = _int_fields(path, ln, s, 1)
        if n is not None and v >= n:
            raise InputError(f"{path}:{ln}: index {v} out of range for {n} points")
        out.add(v)
    return frozenset(out)


def read_complex(path) -> SimplicialComplex:
    return load_complex(_int_fields(path, ln, s) for ln, s in _lines(path))


def write_complex(cx: SimplicialComplex, path=None) -> str:
    text = "".join(" ".join(map(str, s)) + "\n" for s in cx.maximal_simplices())
    if path is not None:
        Path(path).write_text(text)
    return text


def read_map(path, n: int | None = None) -> list[int]:
    table: dict[int, int] = {}
    for ln, s in _lines(path):
        i, j = _int_fields(path, ln, s, 2)
        if i in table:
            raise InputError(f"{path}:{ln}: vertex {i} mapped twice")
        table[i] = j
    size = n if n is not None else len(table)
    missing = [i for i in range(size) if i not in table]
    if missing:
        raise InputError(f"{path}: no image for vertices {missing[:5]}")
    return [table[i] for i in range(size)]


def write_map(images: Iterable[int], path) -> None:
    Path(path).write_text("".join(f"{i} {j}\n" for i, j in enumerate(images)))


def write_points(cloud: MetricCloud, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if cloud.coords is not None:
            w.writerows([repr(float(x)) for x in row] for row in cloud.coords)
        else:
            w.writerows([repr(float(x)) for x in row] for row in cloud.distances)


def read_input(path, n: int | None = None):
    """Dispatch on extension: .csv points, .matrix/.dist distances, .rel relation, .cx complex."""
    ext = Path(path).suffix.lower()
    if ext == ".csv":
        return read_points(path)
    if ext in (".matrix", ".dist"):
        return read_distance_matrix(path)
    if ext == ".rel":
        return read_relation(path, n)
    if ext in (".cx", ".complex"):
        return read_complex(path)
    raise InputError(f"cannot infer input kind from extension {ext!r} (csv|matrix|rel|cx)")


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
