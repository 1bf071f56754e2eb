"""Integer diagonalization kernels used for homology ranks and torsion.

Two interchangeable int64 paths compute a diagonal form of an integer
matrix by unimodular row/column operations:

* a numba ``@njit`` kernel (default when numba imports), and
* a pure-numpy path with vectorized row updates.

Set ``MORSECX_DISABLE_NUMBA=1`` to force the numpy path. Both paths refuse to
let any entry exceed 2**31 in magnitude; when that happens they report
overflow and the caller switches to exact Python integers, so results never
depend on which path ran.
"""

from __future__ import annotations

import os
from math import gcd

import numpy as np

BOUND = 1 << 31

try:  # pragma: no cover - exercised implicitly
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False


def numba_enabled() -> bool:
    flag = os.environ.get("MORSECX_DISABLE_NUMBA", "").strip().lower()
    return _HAVE_NUMBA and flag in ("", "0", "false", "no")


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"


# numpy path


def diagonalize_numpy(a: np.ndarray) -> tuple[np.ndarray, bool]:
    """Diagonalize ``a`` (int64, modified in place).

    Returns the absolute values of the nonzero pivots and a success flag;
    the flag is False when an entry would leave ``[-BOUND, BOUND]``.
    """
    m, n = a.shape
    if m == 0 or n == 0:
        return np.zeros(0, dtype=np.int64), True
    if np.abs(a).max() > BOUND:
        return np.zeros(0, dtype=np.int64), False
    out = []
    t = 0
    for j in range(n):
        if t >= m:
            break
        col = a[t:, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        piv = t + nz[np.argmin(np.abs(col[nz]))]
        if piv != t:
            a[[t, piv], :] = a[[piv, t], :]
        if j != t:
            a[:, [t, j]] = a[:, [j, t]]
        while True:
            below = np.flatnonzero(a[t + 1 :, t])
            if below.size:
                rows = t + 1 + below
                q = a[rows, t] // a[t, t]
                a[rows, t:] -= np.outer(q, a[t, t:])
                if np.abs(a[rows, t:]).max() > BOUND:
                    return np.zeros(0, dtype=np.int64), False
                rem = np.flatnonzero(a[t + 1 :, t])
                if rem.size:
                    r = t + 1 + rem[np.argmin(np.abs(a[t + 1 + rem, t]))]
                    a[[t, r], :] = a[[r, t], :]
                    continue
            # column t is now zero below the pivot, so a column operation
            # only touches row t
            right = t + 1 + np.flatnonzero(a[t, t + 1 :])
            if right.size:
                a[t, right] -= (a[t, right] // a[t, t]) * a[t, t]
                rem = right[a[t, right] != 0]
                if rem.size:
                    c = rem[np.argmin(np.abs(a[t, rem]))]
                    a[:, [t, c]] = a[:, [c, t]]
                    continue
            break
        out.append(abs(int(a[t, t])))
        t += 1
    return np.asarray(out, dtype=np.int64), True


# numba path


def _diagonalize_loops(a):
    m, n = a.shape
    out = np.zeros(min(m, n), dtype=np.int64)
    for i in range(m):
        for k in range(n):
            if abs(a[i, k]) > BOUND:
                return out[:0], False
    t = 0
    for j in range(n):
        if t >= m:
            break
        piv = -1
        best = 0
        for i in range(t, m):
            v = abs(a[i, j])
            if v != 0 and (piv < 0 or v < best):
                piv = i
                best = v
                if best == 1:
                    break
        if piv < 0:
            continue
        if piv != t:
            for k in range(n):
                tmp = a[t, k]
                a[t, k] = a[piv, k]
                a[piv, k] = tmp
        if j != t:
            for i in range(m):
                tmp = a[i, t]
                a[i, t] = a[i, j]
                a[i, j] = tmp
        while True:
            p = a[t, t]
            piv = -1
            best = 0
            for i in range(t + 1, m):
                if a[i, t] != 0:
                    q = a[i, t] // p
                    for k in range(t, n):
                        v = a[i, k] - q * a[t, k]
                        if v > BOUND or v < -BOUND:
                            return out[:0], False
                        a[i, k] = v
                    r = abs(a[i, t])
                    if r != 0 and (piv < 0 or r < best):
                        piv = i
                        best = r
            if piv >= 0:
                for k in range(n):
                    tmp = a[t, k]
                    a[t, k] = a[piv, k]
                    a[piv, k] = tmp
                continue
            piv = -1
            best = 0
            for k in range(t + 1, n):
                if a[t, k] != 0:
                    a[t, k] -= (a[t, k] // p) * p
                    r = abs(a[t, k])
                    if r != 0 and (piv < 0 or r < best):
                        piv = k
                        best = r
            if piv >= 0:
                for i in range(m):
                    tmp = a[i, t]
                    a[i, t] = a[i, piv]
                    a[i, piv] = tmp
                continue
            break
        out[t] = abs(a[t, t])
        t += 1
    return out[:t], True


if _HAVE_NUMBA:
    diagonalize_numba = numba.njit(cache=True)(_diagonalize_loops)
else:  # pragma: no cover
    diagonalize_numba = None


# exact path


def diagonalize_exact(rows: list[list[int]]) -> list[int]:
    """Same elimination on Python integers; never overflows."""
    a = [list(map(int, r)) for r in rows]
    m = len(a)
    n = len(a[0]) if m else 0
    out = []
    t = 0
    for j in range(n):
        if t >= m:
            break
        cand = [i for i in range(t, m) if a[i][j]]
        if not cand:
            continue
        piv = min(cand, key=lambda i: abs(a[i][j]))
        a[t], a[piv] = a[piv], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    ri, rt = a[i], a[t]
                    for k in range(t, n):
                        if rt[k]:
                            ri[k] -= q * rt[k]
            rem = [i for i in range(t + 1, m) if a[i][t]]
            if rem:
                r = min(rem, key=lambda i: abs(a[i][t]))
                a[t], a[r] = a[r], a[t]
                continue
            rt = a[t]
            for k in range(t + 1, n):
                if rt[k]:
                    rt[k] -= (rt[k] // p) * p
            rem = [k for k in range(t + 1, n) if rt[k]]
            if rem:
                c = min(rem, key=lambda k: abs(rt[k]))
                for row in a:
                    row[t], row[c] = row[c], row[t]
                continue
            break
        out.append(abs(a[t][t]))
        t += 1
    return out


def invariant_factors(diag) -> list[int]:
    """Turn the nonzero entries of any diagonal form into d1 | d2 | ... ."""
    d = sorted(abs(int(x)) for x in diag if x)
    k = len(d)
    for i in range(k):
        for j in range(i + 1, k):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return d


def diagonal(rows, backend: str | None = None) -> tuple[list[int], str]:
    """Invariant factors of an integer matrix given as a dense 2-d array-like.

    Returns the factors and the name of the path that produced them
    (``numba``, ``numpy`` or ``exact``).
    """
    if backend is None:
        backend = backend_name()
    if backend == "exact":
        return invariant_factors(diagonalize_exact(rows)), "exact"
    try:
        a = np.array(rows, dtype=np.int64)
    except OverflowError:
        return invariant_factors(diagonalize_exact(rows)), "exact"
    if a.ndim != 2 or a.size == 0:
        return [], backend
    if backend == "numba" and diagonalize_numba is not None:
        diag, ok = diagonalize_numba(a)
    else:
        backend = "numpy"
        diag, ok = diagonalize_numpy(a)
    if not ok:
        return invariant_factors(diagonalize_exact(rows)), "exact"
    return invariant_factors(diag.tolist()), backend
