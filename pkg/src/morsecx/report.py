"""JSON-ready pipeline reports shared by the CLI and the acceptance tests."""

from __future__ import annotations

import time
from contextlib import contextmanager

from .errors import MultirayPresent
from .homology import homology, morse_inequalities
from .incidence import compute_incidence
from .matching import MorseMatching, critical_cells, is_acyclic, is_rayless
from .morse_complex import morse_complex, pm_cell_counts, synthesize_morse_function, verify_morse_function
from .poset import format_elem, is_cellular
from .rays import enumerate_rays, make_rayless


class Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.times: dict = {}

    @contextmanager
    def __call__(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            if self.enabled:
                self.times[name] = round(time.perf_counter() - t0, 6)


def poset_summary(poset) -> dict:
    if not poset.is_periodic:
        by = poset.by_degree()
        return {"kind": "finite", "elements": len(poset), "max_degree": poset.max_degree,
                "cells_by_degree": [len(by.get(d, ())) for d in range(poset.max_degree + 1)]}
    pat = poset.pattern
    return {"kind": "periodic", "quotient_cells": len(pat.qcells), "arcs": len(pat.arcs),
            "prefix_elements": len(poset.prefix), "start": poset.start, "max_degree": poset.max_degree}


def matching_summary(m: MorseMatching) -> dict:
    acyc = is_acyclic(m)
    out = {"acyclic": acyc.acyclic,
           "witness": None if acyc.witness is None else [format_elem(x) for x in acyc.witness]}
    ray = is_rayless(m)
    out["rayless"] = ray.rayless
    out["ray_witness"] = ray.as_dict()["witness"]
    out["critical"] = critical_cells(m).as_dict()
    if m.poset.is_periodic:
        out["period"] = m.period
    return out


def validation_report(m: MorseMatching) -> dict:
    return {"poset": poset_summary(m.poset), "matching": matching_summary(m)}


def complex_dict(cx) -> dict:
    return {
        "generators": {str(n): [dict(id=format_elem(x), **cx.provenance.get(x, {})) for x in xs]
                       for n, xs in sorted(cx.generators.items())},
        "ranks": list(cx.rank_vector()),
        "boundaries": {str(n): {"shape": list(mat.shape), "triples": [list(t) for t in mat.triples()]}
                       for n, mat in sorted(cx.boundaries.items())},
    }


def homology_dict(h) -> dict:
    return dict(h.as_dict(), groups=[f"H_{n} = {h.group(n)}" for n in range(len(h.betti))])


def analysis_report(m: MorseMatching, *, backend: str | None = None, timing: bool = False,
                    synth_window: int | None = None, with_oracle: bool = True) -> tuple[dict, int]:
    """Full pipeline. Returns the report and the exit status (0 or 3)."""
    clock = Timer(timing)
    report = validation_report(m)
    if not report["matching"]["acyclic"]:
        report["error"] = "matching is not acyclic"
        return report, 2
    with clock("incidence"):
        inc = compute_incidence(m.poset)
    with clock("rays"):
        classes = enumerate_rays(m, check=False)
    report["rays"] = classes.as_dict()
    report["rays"]["by_degree"] = list(classes.counts())
    if classes.multiray is not None:
        report["error"] = classes.multiray.message
        if timing:
            report["timing"] = clock.times
        return report, 3
    with clock("reversal"):
        rayless, steps = make_rayless(m) if len(classes) else (m, [])
    report["reversal"] = [s.as_dict() for s in steps]
    with clock("morse_complex"):
        cx = morse_complex(rayless, inc)
    report["morse_complex"] = complex_dict(cx)
    with clock("homology"):
        h = homology(cx, backend)
    report["homology"] = homology_dict(h)
    counts = pm_cell_counts(m)
    report["cell_counts"] = counts.as_dict()
    report["inequalities"] = morse_inequalities(counts.critical, counts.rays, h).as_dict()
    if with_oracle and not m.poset.is_periodic and m.poset.max_degree <= 3:
        with clock("oracle"):
            full = homology(morse_complex(MorseMatching(m.poset), inc), backend)
        report["oracle"] = {"cellular_homology": homology_dict(full), "agrees": full == h}
    if synth_window is not None or not m.poset.is_periodic:
        f = synthesize_morse_function(rayless, synth_window)
        rep = verify_morse_function(f, rayless.poset, matching=rayless)
        report["morse_function"] = {"values": f.lines(), "verification": rep.as_dict()}
    if timing:
        report["timing"] = clock.times
    return report, 0


def multiray_exit(exc: MultirayPresent) -> dict:
    cert = exc.certificate
    return {"error": str(exc), "certificate": None if cert is None else cert.as_dict()}


def cellularity_dict(poset, window=None) -> dict:
    return is_cellular(poset, window).as_dict()
