"""Pure numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable or when
``FROLOV_PURE_PYTHON=1`` is set. Both backends visit candidates in the same
order; ``box_points`` results agree after the caller's exact filter and
``min_abs_product`` values agree up to rounding in the row sums.
"""
from __future__ import annotations

import numpy as np

# relative slack for the last-coordinate interval; exact filtering happens later
_SLACK = 1e-9
_CHUNK = 1 << 18


def index_bounds(Ginv, lo, hi, offset):
    """Integer bounding box of ``Ginv @ ([lo, hi] - offset)``, widened by one."""
    a = lo - offset
    b = hi - offset
    pos = np.clip(Ginv, 0, None)
    neg = np.clip(Ginv, None, 0)
    mn = pos @ a + neg @ b
    mx = pos @ b + neg @ a
    return np.floor(mn).astype(np.int64) - 1, np.ceil(mx).astype(np.int64) + 1


def box_points(G, offset, lo, hi, mlo, mhi):
    """Integer vectors ``m`` in ``[mlo, mhi]`` with ``G @ m + offset`` near ``[lo, hi]``.

    Loops over the leading ``d-1`` coordinates and solves each row's
    inequality for the last one. The result is a lexicographically ordered
    superset (by a relative slack of 1e-9) of the exact answer.
    """
    G = np.asarray(G, dtype=float)
    d = G.shape[0]
    if d == 1:
        heads = np.zeros((1, 0), dtype=np.int64)
        return _solve_last(G, offset, lo, hi, mlo, mhi, heads)
    ranges = [np.arange(mlo[i], mhi[i] + 1, dtype=np.int64) for i in range(d - 1)]
    if any(r.size == 0 for r in ranges):
        return np.zeros((0, d), dtype=np.int64)
    # chunk along the first coordinate to bound memory
    inner = int(np.prod([r.size for r in ranges[1:]])) if d > 2 else 1
    per_chunk = max(1, _CHUNK // max(inner, 1))
    out = []
    first = ranges[0]
    for s in range(0, first.size, per_chunk):
        grids = np.meshgrid(first[s:s + per_chunk], *ranges[1:], indexing="ij")
        heads = np.stack([g.ravel() for g in grids], axis=1)
        pts = _solve_last(G, offset, lo, hi, mlo, mhi, heads)
        if pts.size:
            out.append(pts)
    if not out:
        return np.zeros((0, d), dtype=np.int64)
    return np.concatenate(out, axis=0)


def _solve_last(G, offset, lo, hi, mlo, mhi, heads):
    d = G.shape[0]
    k = heads.shape[0]
    part = heads.astype(float) @ G[:, : d - 1].T + offset  # (k, d)
    a = np.full(k, float(mlo[d - 1]))
    b = np.full(k, float(mhi[d - 1]))
    alive = np.ones(k, dtype=bool)
    for j in range(d):
        g = G[j, d - 1]
        low = lo[j] - part[:, j]
        high = hi[j] - part[:, j]
        if g == 0.0:
            tol = _SLACK * (1.0 + np.abs(part[:, j]))
            alive &= (low <= tol) & (high >= -tol)
            continue
        t1 = low / g
        t2 = high / g
        tl = np.minimum(t1, t2)
        th = np.maximum(t1, t2)
        a = np.maximum(a, tl - _SLACK * (1.0 + np.abs(tl)))
        b = np.minimum(b, th + _SLACK * (1.0 + np.abs(th)))
    first = np.ceil(a).astype(np.int64)
    last = np.floor(b).astype(np.int64)
    counts = np.where(alive, np.maximum(last - first + 1, 0), 0)
    total = int(counts.sum())
    if total == 0:
        return np.zeros((0, d), dtype=np.int64)
    rep = np.repeat(np.arange(k), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    last_coord = first[rep] + (np.arange(total) - starts)
    return np.concatenate([heads[rep], last_coord[:, None]], axis=1)


def min_abs_product(B, R):
    """Minimum of ``|prod_j (B m)_j|`` over ``0 < ||m||_inf <= R`` and a minimiser.

    Only half of the cube is scanned: ``m`` and ``-m`` give the same value.
    """
    B = np.asarray(B, dtype=float)
    d = B.shape[0]
    R = int(R)
    best = np.inf
    arg = None
    side = np.arange(-R, R + 1, dtype=np.int64)
    if d == 1:
        m = side[side > 0][:, None]
        vals = np.abs(m @ B.T).prod(axis=1)
        i = int(np.argmin(vals))
        return float(vals[i]), m[i].copy()
    inner = np.stack(np.meshgrid(*([side] * (d - 1)), indexing="ij"), -1).reshape(-1, d - 1)
    for m0 in range(0, R + 1):
        rows = inner
        if m0 == 0:
            # lexicographically positive half of the hyperplane m0 = 0
            nz = rows != 0
            has = nz.any(axis=1)
            firstnz = np.argmax(nz, axis=1)
            sign = rows[np.arange(rows.shape[0]), firstnz]
            rows = rows[has & (sign > 0)]
            if rows.size == 0:
                continue
        m = np.concatenate([np.full((rows.shape[0], 1), m0, dtype=np.int64), rows], axis=1)
        vals = np.abs(m.astype(float) @ B.T).prod(axis=1)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            arg = m[i].copy()
    return best, arg
