"""Line-oriented text formats for posets, matchings and rays, plus JSON output.

Poset files start with ``finite`` or ``periodic``::

    finite
    cell v 0
    cell e 1
    cover e v

    periodic
    cell v 0            # quotient cells
    arc e v 1           # e@i covers v@(i+1)
    prefixcell c 0
    prefixcover fa c
    glue fa a@1
    start 1

Matching files use ``match <upper> <lower>``, ``matcharc <upper> <lower>
<shift> [phase]`` and ``period <p>``. A ray is one line such as
``ray prefix c; cycle v@0 e@0 v@1; phase 3`` where the last cycle entry
closes the loop and so carries the shift. Tail elements are written
``cell@row``; ``#`` starts a comment.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import MorseError, ParseError
from .matching import MorseMatching, build_matching
from .poset import (FinitePoset, build_finite_poset, build_pattern, build_periodic_poset,
                    format_elem, parse_elem)
from .rays import Ray


def _tokens(text: str):
    """Yield ``(line_no, [(column, token), ...])`` for non-blank lines."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = []
        col = 0
        for part in line.split():
            col = line.index(part, col)
            toks.append((col + 1, part))
            col += len(part)
        if toks:
            yield no, toks


def _int(tok, no, what):
    col, s = tok
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected an integer {what}, got {s!r}", no, col) from None


def _arity(toks, no, n, usage):
    if len(toks) != n:
        col = toks[min(len(toks), n) - 1][0] if toks else 1
        raise ParseError(f"expected `{usage}`", no, col)


# posets


def parse_poset(text: str):
    lines = list(_tokens(text))
    if not lines:
        raise ParseError("empty poset file", 1, 1)
    no, toks = lines[0]
    kind = toks[0][1]
    if kind not in ("finite", "periodic") or len(toks) != 1:
        raise ParseError("first line must be `finite` or `periodic`", no, toks[0][0])
    try:
        if kind == "finite":
            return _parse_finite(lines[1:])
        return _parse_periodic(lines[1:])
    except ParseError:
        raise
    except MorseError:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _parse_finite(lines):
    cells, degrees, covers = [], {}, []
    for no, toks in lines:
        key = toks[0][1]
        if key == "cell":
            _arity(toks, no, 3, "cell <id> <degree>")
            x = toks[1][1]
            if x in degrees:
                raise ParseError(f"duplicate cell {x}", no, toks[1][0])
            cells.append(x)
            degrees[x] = _int(toks[2], no, "degree")
        elif key == "cover":
            _arity(toks, no, 3, "cover <upper> <lower>")
            covers.append((toks[1][1], toks[2][1]))
        else:
            raise ParseError(f"unknown directive {key!r} in a finite poset", no, toks[0][0])
    return build_finite_poset(cells, covers, degrees)


def _parse_periodic(lines):
    qcells, arcs = [], []
    prefix, pdeg, pcovers, glue = [], {}, [], []
    start = None
    for no, toks in lines:
        key = toks[0][1]
        if key == "cell":
            _arity(toks, no, 3, "cell <qcell> <degree>")
            qcells.append((toks[1][1], _int(toks[2], no, "degree")))
        elif key == "arc":
            _arity(toks, no, 4, "arc <upper> <lower> <shift>")
            arcs.append((toks[1][1], toks[2][1], _int(toks[3], no, "shift")))
        elif key == "prefixcell":
            _arity(toks, no, 3, "prefixcell <id> <degree>")
            x = parse_elem(toks[1][1])
            prefix.append(x)
            pdeg[x] = _int(toks[2], no, "degree")
        elif key == "prefixcover":
            _arity(toks, no, 3, "prefixcover <upper> <lower>")
            pcovers.append((parse_elem(toks[1][1]), parse_elem(toks[2][1])))
        elif key == "glue":
            _arity(toks, no, 3, "glue <upper> <lower>")
            glue.append((parse_elem(toks[1][1]), parse_elem(toks[2][1])))
        elif key == "start":
            _arity(toks, no, 2, "start <row>")
            start = _int(toks[1], no, "row")
        else:
            raise ParseError(f"unknown directive {key!r} in a periodic poset", no, toks[0][0])
    pattern = build_pattern(qcells, arcs)
    return build_periodic_poset(pattern, prefix, glue, start, pcovers, pdeg)


def serialize_poset(poset) -> str:
    if isinstance(poset, FinitePoset):
        out = ["finite"]
        out += [f"cell {x} {poset.degree(x)}" for x in poset.elements]
        out += [f"cover {format_elem(x)} {format_elem(y)}" for x, y in poset.covers()]
        return "\n".join(out) + "\n"
    pat = poset.pattern
    out = ["periodic"]
    out += [f"cell {q} {pat.qdegree[q]}" for q in pat.qcells]
    out += [f"arc {u} {v} {s}" for u, v, s in pat.arcs]
    out += [f"prefixcell {format_elem(x)} {poset.degree(x)}" for x in poset.prefix]
    out += [f"prefixcover {format_elem(x)} {format_elem(y)}" for x, y in poset.prefix_covers]
    out += [f"glue {format_elem(x)} {format_elem(y)}" for x, y in poset.glue]
    out.append(f"start {poset.start}")
    return "\n".join(out) + "\n"


def same_poset(a, b) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, FinitePoset):
        return (a.elements == b.elements and sorted(map(repr, a.covers())) == sorted(map(repr, b.covers()))
                and all(a.degree(x) == b.degree(x) for x in a.elements))
    return (a.pattern == b.pattern and a.prefix == b.prefix and a.start == b.start
            and set(a.prefix_covers) == set(b.prefix_covers) and set(a.glue) == set(b.glue))


# matchings


def parse_matching(text: str, poset) -> MorseMatching:
    pairs, selection = [], []
    period = 1
    for no, toks in _tokens(text):
        key = toks[0][1]
        if key == "match":
            _arity(toks, no, 3, "match <upper> <lower>")
            pairs.append((parse_elem(toks[1][1]), parse_elem(toks[2][1])))
        elif key == "matcharc":
            if len(toks) not in (4, 5):
                _arity(toks, no, 4, "matcharc <upper> <lower> <shift> [phase]")
            entry = (toks[1][1], toks[2][1], _int(toks[3], no, "shift"))
            if len(toks) == 5:
                entry += (_int(toks[4], no, "phase"),)
            selection.append(entry)
        elif key == "period":
            _arity(toks, no, 2, "period <p>")
            period = _int(toks[1], no, "period")
        else:
            raise ParseError(f"unknown directive {key!r} in a matching", no, toks[0][0])
    return build_matching(poset, pairs, selection, period)


def serialize_matching(m: MorseMatching) -> str:
    out = []
    if m.period != 1:
        out.append(f"period {m.period}")
    out += [f"match {format_elem(x)} {format_elem(y)}" for x, y in m.pairs]
    out += [f"matcharc {u} {v} {s} {ph}" for u, v, s, ph in m.selection]
    return "\n".join(out) + "\n"


# rays


def parse_ray(text: str) -> Ray:
    lines = list(_tokens(text))
    if len(lines) != 1:
        raise ParseError("a ray file holds exactly one `ray ...` line", lines[1][0] if len(lines) > 1 else 1, 1)
    no, toks = lines[0]
    if toks[0][1] != "ray":
        raise ParseError("expected `ray`", no, toks[0][0])
    stem, cycle, phase = [], None, None
    section, sec_col = None, None
    for col, tok in toks[1:]:
        for piece in _split_semis(tok):
            if piece == ";":
                section = None
                continue
            if section is None:
                if piece not in ("prefix", "cycle", "phase"):
                    raise ParseError(f"expected prefix, cycle or phase, got {piece!r}", no, col)
                section, sec_col = piece, col
                if piece == "cycle":
                    cycle = []
                continue
            if section == "prefix":
                stem.append(parse_elem(piece))
            elif section == "cycle":
                q, at, d = piece.rpartition("@")
                if not at or not q:
                    raise ParseError(f"cycle entries look like cell@offset, got {piece!r}", no, col)
                cycle.append((q, _int((col, d), no, "offset")))
            else:
                if phase is not None:
                    raise ParseError("phase given twice", no, col)
                phase = _int((col, piece), no, "phase")
    if not cycle or len(cycle) < 2:
        raise ParseError("a ray needs `cycle` with at least two entries (the last one closes the loop)", no, sec_col or 1)
    if cycle[-1][0] != cycle[0][0]:
        raise ParseError("the last cycle entry must repeat the first cell", no, sec_col or 1)
    if phase is None:
        raise ParseError("missing `phase`", no, toks[-1][0])
    loop = cycle[:-1]
    d0 = loop[0][1]
    return Ray(tuple((q, d - d0) for q, d in loop), cycle[-1][1] - d0, phase + d0, tuple(stem))


def _split_semis(tok: str):
    cur = ""
    for ch in tok:
        if ch == ";":
            if cur:
                yield cur
            yield ";"
            cur = ""
        else:
            cur += ch
    if cur:
        yield cur


def serialize_ray(r: Ray) -> str:
    return r.encoding() + "\n"


# files and JSON


def read_poset(path) -> object:
    return parse_poset(Path(path).read_text(encoding="utf-8"))


def read_matching(path, poset) -> MorseMatching:
    return parse_matching(Path(path).read_text(encoding="utf-8"), poset)


def read_ray(path) -> Ray:
    return parse_ray(Path(path).read_text(encoding="utf-8"))


def dumps(report: dict) -> str:
    """Stable JSON text: fixed indentation, insertion-ordered keys."""
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
