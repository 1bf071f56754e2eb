from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morsecx import _kernels
from morsecx.homology import smith_normal_form

matrices = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-20, 20), min_size=n, max_size=n), min_size=1, max_size=6))


def test_flag_selects_the_numpy_path(monkeypatch):
    monkeypatch.setenv("MORSECX_DISABLE_NUMBA", "1")
    assert _kernels.backend_name() == "numpy"
    assert _kernels.diagonal([[2, 0], [0, 3]])[1] == "numpy"
    monkeypatch.setenv("MORSECX_DISABLE_NUMBA", "0")
    assert _kernels.backend_name() == ("numba" if _kernels.diagonalize_numba is not None else "numpy")


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_paths_agree_with_smith_form(rows):
    want = smith_normal_form(rows).divisors
    for backend in ("numpy", "numba", "exact"):
        assert _kernels.diagonal(rows, backend)[0] == want


def test_numba_kernel_matches_python_loops():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = rng.integers(-4, 5, size=(7, 9)).astype(np.int64)
        py, ok1 = _kernels._diagonalize_loops(a.copy())
        if _kernels.diagonalize_numba is None:
            pytest.skip("numba not installed")
        nb, ok2 = _kernels.diagonalize_numba(a.copy())
        assert ok1 and ok2
        assert py.tolist() == nb.tolist()


def test_overflow_is_reported_then_handled():
    a = np.array([[1 << 33, 1], [1, 0]], dtype=np.int64)
    _, ok = _kernels.diagonalize_numpy(a.copy())
    assert not ok
    factors, path = _kernels.diagonal(a.tolist(), "numpy")
    assert path == "exact" and factors == [1, 1]


def test_huge_python_ints_go_exact():
    factors, path = _kernels.diagonal([[1 << 70, 0], [0, 2]], "numba")
    assert path == "exact"
    assert factors == [2, 1 << 70]


def test_invariant_factor_normalization():
    assert _kernels.invariant_factors([4, 6, 0, -1]) == [1, 2, 12]


def test_benchmark_script_runs(tmp_path):
    import runpy
    from pathlib import Path

    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    bench = runpy.run_path(str(script))
    out = tmp_path / "bench.json"
    assert bench["main"](["--rows", "4", "--repeat", "1", "--json", str(out)]) == 0
    assert out.exists()
