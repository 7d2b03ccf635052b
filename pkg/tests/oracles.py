"""Slow, independent reference implementations used as test oracles.

Nothing here imports texpyr. Pyramid oracles use exact rational arithmetic;
counting oracles use explicit Python loops over pixels.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

W1 = [Fraction(1, 16), Fraction(4, 16), Fraction(6, 16), Fraction(4, 16), Fraction(1, 16)]


def reflect(i: int, n: int) -> int:
    """Mirror index into [0, n) without repeating the edge sample."""
    if n == 1:
        return 0
    while i < 0 or i >= n:
        if i < 0:
            i = -i
        if i >= n:
            i = 2 * (n - 1) - i
    return i


def naive_reduce(img):
    """img: list of rows. Returns rows of Fractions."""
    h, w = len(img), len(img[0])
    oh, ow = (h + 1) // 2, (w + 1) // 2
    out = []
    for y in range(oh):
        row = []
        for x in range(ow):
            acc = Fraction(0)
            for m in range(-2, 3):
                for n in range(-2, 3):
                    acc += W1[m + 2] * W1[n + 2] * Fraction(img[reflect(2 * y + m, h)][reflect(2 * x + n, w)])
            row.append(acc)
        out.append(row)
    return out


def naive_expand(img, th, tw):
    h, w = len(img), len(img[0])
    up = [[Fraction(0)] * tw for _ in range(th)]
    for y in range(h):
        for x in range(w):
            up[2 * y][2 * x] = Fraction(img[y][x])
    out = []
    for y in range(th):
        row = []
        for x in range(tw):
            acc = Fraction(0)
            for m in range(-2, 3):
                for n in range(-2, 3):
                    acc += 4 * W1[m + 2] * W1[n + 2] * up[reflect(y + m, th)][reflect(x + n, tw)]
            row.append(acc)
        out.append(row)
    return out


def naive_glcm(img, levels, offsets, symmetric=False):
    """Integer pair counts by visiting every pixel."""
    h, w = len(img), len(img[0])
    m = [[0] * levels for _ in range(levels)]
    for dx, dy in offsets:
        for r in range(h):
            for c in range(w):
                r2, c2 = r + dy, c + dx
                if 0 <= r2 < h and 0 <= c2 < w:
                    m[img[r][c]][img[r2][c2]] += 1
    if symmetric:
        m = [[m[i][j] + m[j][i] for j in range(levels)] for i in range(levels)]
    return m


def naive_entropy(values) -> float:
    cnt = Counter(values)
    n = len(values)
    return -sum((c / n) * math.log2(c / n) for c in cnt.values())


def naive_mi(a, b) -> float:
    n = len(a)
    pa, pb, pab = Counter(a), Counter(b), Counter(zip(a, b))
    return sum((c / n) * math.log2((c / n) / ((pa[x] / n) * (pb[y] / n))) for (x, y), c in pab.items())


def naive_taxonomic_pixels(values):
    """Abundance-weighted pair sums by looping over unordered pixel pairs.

    Returns (sum of d over pixel pairs, number of pixel pairs with distinct levels,
    number of unordered pixel pairs).
    """
    n = len(values)
    dsum = 0
    distinct = 0
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(values[i] - values[j])
            dsum += d
            distinct += values[i] != values[j]
    return dsum, distinct, n * (n - 1) // 2


def naive_col_minmax(rows):
    ncol = len(rows[0])
    mins, maxs = [], []
    for c in range(ncol):
        lo = hi = rows[0][c]
        for r in rows[1:]:
            lo = r[c] if r[c] < lo else lo
            hi = r[c] if r[c] > hi else hi
        mins.append(lo)
        maxs.append(hi)
    return mins, maxs


def _h(ps):
    return -sum(p * math.log2(p) for p in ps if p > 0)


def naive_haralick(P):
    """13 Haralick statistics from a normalized matrix (list of lists), by explicit loops, bits."""
    g = len(P)
    px = [sum(P[i][j] for j in range(g)) for i in range(g)]
    py = [sum(P[i][j] for i in range(g)) for j in range(g)]
    psum = [0.0] * (2 * g - 1)
    pdiff = [0.0] * g
    for i in range(g):
        for j in range(g):
            psum[i + j] += P[i][j]
            pdiff[abs(i - j)] += P[i][j]
    mux = sum(i * px[i] for i in range(g))
    muy = sum(j * py[j] for j in range(g))
    sx = math.sqrt(sum((i - mux) ** 2 * px[i] for i in range(g)))
    sy = math.sqrt(sum((j - muy) ** 2 * py[j] for j in range(g)))
    f1 = sum(P[i][j] ** 2 for i in range(g) for j in range(g))
    f2 = sum(n * n * pdiff[n] for n in range(g))
    if sx * sy == 0:
        f3 = 1.0
    else:
        f3 = (sum(i * j * P[i][j] for i in range(g) for j in range(g)) - mux * muy) / (sx * sy)
    f4 = sum((i - mux) ** 2 * P[i][j] for i in range(g) for j in range(g))
    f5 = sum(P[i][j] / (1 + (i - j) ** 2) for i in range(g) for j in range(g))
    f6 = sum(k * psum[k] for k in range(2 * g - 1))
    f7 = sum((k - f6) ** 2 * psum[k] for k in range(2 * g - 1))
    f8 = _h(psum)
    f9 = _h([P[i][j] for i in range(g) for j in range(g)])
    dmean = sum(k * pdiff[k] for k in range(g))
    f10 = sum((k - dmean) ** 2 * pdiff[k] for k in range(g))
    f11 = _h(pdiff)
    hx, hy = _h(px), _h(py)
    hxy1 = -sum(P[i][j] * math.log2(px[i] * py[j]) for i in range(g) for j in range(g) if P[i][j] > 0)
    hxy2 = _h([px[i] * py[j] for i in range(g) for j in range(g)])
    f12 = (f9 - hxy1) / max(hx, hy) if max(hx, hy) > 0 else 0.0
    f13 = math.sqrt(max(0.0, 1 - math.exp(-2 * math.log(2) * (hxy2 - f9))))
    return [f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11, f12, f13]


def naive_glcm_props(P):
    """contrast, dissimilarity, homogeneity, energy, correlation, asm by loops."""
    g = len(P)
    cells = [(i, j, P[i][j]) for i in range(g) for j in range(g)]
    mi = sum(i * p for i, _, p in cells)
    mj = sum(j * p for _, j, p in cells)
    si = math.sqrt(sum((i - mi) ** 2 * p for i, _, p in cells))
    sj = math.sqrt(sum((j - mj) ** 2 * p for _, j, p in cells))
    asm = sum(p * p for *_, p in cells)
    corr = 1.0 if si * sj == 0 else sum((i - mi) * (j - mj) * p for i, j, p in cells) / (si * sj)
    return [
        sum((i - j) ** 2 * p for i, j, p in cells),
        sum(abs(i - j) * p for i, j, p in cells),
        sum(p / (1 + (i - j) ** 2) for i, j, p in cells),
        math.sqrt(asm),
        corr,
        asm,
    ]
