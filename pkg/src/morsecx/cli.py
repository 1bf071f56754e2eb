"""Command line front end.

Exit status: 0 success, 2 validation failure, 3 multiray or infinitely many
ray classes, 4 parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .errors import InfinitelyManyClasses, MorseError, MultirayPresent, NotRayless, ParseError
from .examples import NAMES, get_example
from .homology import homology
from .matching import MorseMatching
from .morse_complex import morse_complex, rayless_matching, synthesize_morse_function, verify_morse_function
from .report import (analysis_report, complex_dict, homology_dict, multiray_exit, poset_summary,
                     validation_report, matching_summary)
from .rays import make_rayless, reverse_ray

EXIT_OK, EXIT_INVALID, EXIT_MULTIRAY, EXIT_PARSE = 0, 2, 3, 4


def _load(args):
    poset = io.read_poset(args.poset)
    if getattr(args, "matching", None):
        return poset, io.read_matching(args.matching, poset)
    return poset, MorseMatching(poset)


def _emit(report: dict, args) -> None:
    text = io.dumps(report)
    if args.json:
        Path(args.json).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    _, m = _load(args)
    report = validation_report(m)
    _emit(report, args)
    return EXIT_OK if report["matching"]["acyclic"] else EXIT_INVALID


def cmd_analyze(args) -> int:
    _, m = _load(args)
    report, code = analysis_report(m, backend=args.backend, timing=args.timing, synth_window=args.window)
    _emit(report, args)
    if code == EXIT_MULTIRAY:
        print("error: " + report["error"], file=sys.stderr)
    return code


def cmd_reverse(args) -> int:
    _, m = _load(args)
    if args.ray:
        r = io.read_ray(args.ray)
        new = reverse_ray(m, r)
        steps = [{"ray": r.as_dict(), "critical": io.format_elem(r.element(0))}]
    else:
        new, st = make_rayless(m)
        steps = [s.as_dict() for s in st]
    report = {"reversal": steps, "poset": poset_summary(new.poset), "matching": matching_summary(new)}
    if args.out:
        Path(args.out + ".poset").write_text(io.serialize_poset(new.poset), encoding="utf-8")
        Path(args.out + ".match").write_text(io.serialize_matching(new), encoding="utf-8")
    _emit(report, args)
    return EXIT_OK


def cmd_morse(args) -> int:
    _, m = _load(args)
    cx = morse_complex(m, budget=args.budget)
    _emit({"morse_complex": complex_dict(cx)}, args)
    return EXIT_OK


def cmd_homology(args) -> int:
    poset, m = _load(args)
    report = {}
    if args.matching:
        report["morse_homology"] = homology_dict(homology(morse_complex(m, budget=args.budget), args.backend))
    if not poset.is_periodic:
        report["cellular_homology"] = homology_dict(homology(morse_complex(MorseMatching(poset)), args.backend))
    elif not args.matching:
        raise NotRayless("a periodic poset needs a matching to reduce to a finite complex")
    _emit(report, args)
    return EXIT_OK


def cmd_synth(args) -> int:
    _, m = _load(args)
    steps = []
    if args.reverse_first:
        m, st = rayless_matching(m)
        steps = [s.as_dict() for s in st]
    f = synthesize_morse_function(m, args.window, args.budget)
    rep = verify_morse_function(f, m.poset, matching=m)
    if args.out:
        Path(args.out).write_text("\n".join(f.lines()) + "\n", encoding="utf-8")
    report = {"reversal": steps, "count": len(f.window), "values": f.lines(), "verification": rep.as_dict()}
    _emit(report, args)
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_example(args) -> int:
    ex = get_example(args.name)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "poset": out / f"{ex.name}.poset",
        "matching": out / f"{ex.name}.match",
        "expected": out / f"{ex.name}.expected.json",
    }
    files["poset"].write_text(f"# {ex.description}\n" + io.serialize_poset(ex.poset), encoding="utf-8")
    files["matching"].write_text(io.serialize_matching(ex.matching), encoding="utf-8")
    files["expected"].write_text(io.dumps({"name": ex.name, "description": ex.description, **ex.expected}),
                                 encoding="utf-8")
    summary = {"name": ex.name, "files": {k: str(v) for k, v in files.items()}, "poset": poset_summary(ex.poset)}
    _emit(summary, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morsecx", description="Discrete Morse complexes of finite and periodic posets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, matching=True, optional_matching=False):
        p.add_argument("poset", help="poset file")
        if matching:
            p.add_argument("matching", nargs="?" if optional_matching else None, help="matching file")
        p.add_argument("--json", metavar="OUT", help="write the JSON report here instead of stdout")
        p.add_argument("--budget", type=int, help="step budget for descent and flow computations")
        p.add_argument("--window", type=int, help="last tail row to materialize (default: 3 rows past the prefix)")
        p.add_argument("--backend", choices=["numba", "numpy", "exact"], help="integer elimination backend")
        p.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")

    p = sub.add_parser("validate", help="gradedness, matching validity, acyclicity, raylessness")
    common(p)
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("analyze", help="full pipeline: rays, reversal, Morse complex, homology, inequalities")
    common(p)
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("reverse", help="reverse one ray (--ray) or all ray classes")
    common(p)
    p.add_argument("--ray", help="ray file; default reverses every class")
    p.add_argument("--out", help="write <OUT>.poset and <OUT>.match")
    p.set_defaults(func=cmd_reverse)
    p = sub.add_parser("morse", help="Morse complex as JSON")
    common(p)
    p.set_defaults(func=cmd_morse)
    p = sub.add_parser("homology", help="Morse homology, and cellular homology for finite posets")
    common(p, optional_matching=True)
    p.set_defaults(func=cmd_homology)
    p = sub.add_parser("synth", help="self-indexing discrete Morse function")
    common(p)
    p.add_argument("--reverse-first", action="store_true", help="make the matching rayless first")
    p.add_argument("--out", help="write `cell value` lines here")
    p.set_defaults(func=cmd_synth)
    p = sub.add_parser("example", help="write a built-in example: " + ", ".join(NAMES))
    p.add_argument("name")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--json", metavar="OUT", help="write the JSON summary here instead of stdout")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MultirayPresent, InfinitelyManyClasses) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, MultirayPresent):
            sys.stdout.write(io.dumps(multiray_exit(exc)))
        return EXIT_MULTIRAY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MorseError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
