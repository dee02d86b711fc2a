"""Compiled inner loops shared by the estimator modules.

Every kernel is a pure function of its array arguments. Reductions run in a
fixed index order so results do not depend on how callers split work.
"""

import numpy as np
from numba import njit

# Relative slack on separation tests; grid coordinates are exact dyadics but
# differences of non-dyadic positions pick up a few ulps.
_SEP_SLACK = 1e-9


@njit(cache=True, nogil=True)
def holder_ratio_max(values, alpha, n):
    """Max of |v_i - v_j| / ((j - i)/n)**alpha over all pairs of a closed grid."""
    best = 0.0
    m = values.size
    for i in range(m):
        vi = values[i]
        for j in range(i + 1, m):
            ratio = abs(vi - values[j]) / ((j - i) / n) ** alpha
            if ratio > best:
                best = ratio
    return best


@njit(cache=True, nogil=True)
def pack_sorted_1d(positions, r):
    sep = 2.0 * r * (1.0 - _SEP_SLACK)
    count = 0
    last = -np.inf
    for p in positions:
        if p - last >= sep:
            count += 1
            last = p
    return count


@njit(cache=True, nogil=True)
def pack_sorted_indices(indices, gap):
    count = 0
    last = -(1 << 62)
    for i in indices:
        if i - last >= gap:
            count += 1
            last = i
    return count


@njit(cache=True, nogil=True)
def _pack_candidate(x, y, ymin, r, sep, cx, cy, head):
    c = int((y - ymin) / (2.0 * r)) + 1
    slots = cx.shape[1]
    for cc in range(c - 1, c + 2):
        for q in range(slots):
            if x - cx[cc, q] < sep and abs(y - cy[cc, q]) < sep:
                return False
    h = head[c]
    cx[c, h] = x
    cy[c, h] = y
    head[c] = (h + 1) % slots
    return True


@njit(cache=True, nogil=True)
def pack_lex_2d(xs, ys, r):
    """Greedy max-norm packing of points sorted by (x, y).

    Accepted centres are bucketed in horizontal strips of height 2r. At most
    four accepted centres of one strip can lie within 2r of the sweep line,
    so each strip keeps a ring of its four most recent centres.
    """
    if xs.size == 0:
        return 0
    sep = 2.0 * r * (1.0 - _SEP_SLACK)
    ymin = ys.min()
    ncell = int((ys.max() - ymin) / (2.0 * r)) + 3
    cx = np.full((ncell, 4), -np.inf)
    cy = np.zeros((ncell, 4))
    head = np.zeros(ncell, np.int64)
    count = 0
    for i in range(xs.size):
        if _pack_candidate(xs[i], ys[i], ymin, r, sep, cx, cy, head):
            count += 1
    return count


@njit(cache=True, nogil=True)
def pack_polyline(xs, ys, r, substep):
    """Greedy packing of the piecewise-linear curve through (xs, ys).

    Candidates are generated along each segment at max-norm spacing at most
    ``substep * r``; xs must be strictly increasing.
    """
    if xs.size == 0:
        return 0
    sep = 2.0 * r * (1.0 - _SEP_SLACK)
    ymin = ys.min()
    ncell = int((ys.max() - ymin) / (2.0 * r)) + 3
    cx = np.full((ncell, 4), -np.inf)
    cy = np.zeros((ncell, 4))
    head = np.zeros(ncell, np.int64)
    step = substep * r
    count = 0
    last = xs.size - 1
    for i in range(last):
        dx = xs[i + 1] - xs[i]
        dy = ys[i + 1] - ys[i]
        m = int(np.ceil(max(abs(dx), abs(dy)) / step))
        if m < 1:
            m = 1
        for k in range(m):
            if _pack_candidate(xs[i] + dx * k / m, ys[i] + dy * k / m, ymin, r, sep, cx, cy, head):
                count += 1
    if _pack_candidate(xs[last], ys[last], ymin, r, sep, cx, cy, head):
        count += 1
    return count


@njit(cache=True, nogil=True)
def pair_energy_1d(pos, w, s):
    """Off-diagonal Riesz pair sum; returns (value, coincident_flag)."""
    total = 0.0
    n = pos.size
    for i in range(n):
        acc = 0.0
        for j in range(i + 1, n):
            d = abs(pos[i] - pos[j])
            if d == 0.0:
                return np.inf, True
            acc += w[j] * d ** (-s)
        total += w[i] * acc
    return 2.0 * total, False


@njit(cache=True, nogil=True)
def pair_energy_2d(px, py, w, s):
    total = 0.0
    n = px.size
    for i in range(n):
        acc = 0.0
        for j in range(i + 1, n):
            d = max(abs(px[i] - px[j]), abs(py[i] - py[j]))
            if d == 0.0:
                return np.inf, True
            acc += w[j] * d ** (-s)
        total += w[i] * acc
    return 2.0 * total, False


@njit(cache=True, nogil=True)
def fourier_direct(pos, w, xi):
    re = np.zeros(xi.size)
    im = np.zeros(xi.size)
    for k in range(xi.size):
        c = 0.0
        s = 0.0
        for j in range(pos.size):
            a = xi[k] * pos[j]
            c += w[j] * np.cos(a)
            s += w[j] * np.sin(a)
        re[k] = c
        im[k] = s
    return re, im


@njit(cache=True, nogil=True)
def fourier_uniform(pos, w, xi0, dxi, m):
    """Transform at xi0 + k*dxi, k < m, by per-atom phase rotation."""
    re = np.zeros(m)
    im = np.zeros(m)
    for j in range(pos.size):
        zr = np.cos(dxi * pos[j])
        zi = np.sin(dxi * pos[j])
        ar = w[j] * np.cos(xi0 * pos[j])
        ai = w[j] * np.sin(xi0 * pos[j])
        for k in range(m):
            re[k] += ar
            im[k] += ai
            t = ar * zr - ai * zi
            ai = ar * zi + ai * zr
            ar = t
    return re, im


@njit(cache=True, nogil=True)
def _grid_denominators(n, alpha, periodic):
    """sep(k/n)**alpha for index gaps k = 0..n; circle distance when periodic."""
    out = np.empty(n + 1)
    for k in range(n + 1):
        sep = k / n
        if periodic and 1.0 - sep < sep:
            sep = 1.0 - sep
        out[k] = sep ** alpha
    return out


@njit(cache=True, nogil=True)
def _max_dist(values, i, j):
    dist = 0.0
    for k in range(values.shape[1]):
        v = abs(values[i, k] - values[j, k])
        if v > dist:
            dist = v
    return dist


@njit(cache=True, nogil=True)
def biholder_all_pairs(values, alpha, periodic):
    """(min, max, argmin_i, argmin_j) of max-norm ratio over all pairs of the closed grid i/n.

    values has n + 1 rows; pairs at zero separation (the circle's 0 ~ 1) are skipped.
    """
    m = values.shape[0]
    den = _grid_denominators(m - 1, alpha, periodic)
    lo = np.inf
    hi = 0.0
    bi = -1
    bj = -1
    for i in range(m):
        for j in range(i + 1, m):
            dd = den[j - i]
            if dd <= 0.0:
                continue
            ratio = _max_dist(values, i, j) / dd
            if ratio < lo:
                lo = ratio
                bi = i
                bj = j
            if ratio > hi:
                hi = ratio
    return lo, hi, bi, bj


@njit(cache=True, nogil=True)
def biholder_listed_pairs(values, ii, jj, alpha, periodic):
    den = _grid_denominators(values.shape[0] - 1, alpha, periodic)
    lo = np.inf
    hi = 0.0
    bi = -1
    bj = -1
    for p in range(ii.size):
        i = ii[p]
        j = jj[p]
        dd = den[abs(j - i)]
        if dd <= 0.0:
            continue
        ratio = _max_dist(values, i, j) / dd
        if ratio < lo:
            lo = ratio
            bi = i
            bj = j
        if ratio > hi:
            hi = ratio
    return lo, hi, bi, bj
