"""Bio-inspired texture (BiT) indices.

A channel is read as an ecosystem: each occupied gray level is a species
and its pixel count is the abundance. Seven biodiversity indices depend
only on the multiset of abundances. Seven taxonomic indices add a
distance between species, here the absolute gray-level difference.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np
from scipy.optimize import brentq

from texpyr.errors import DegenerateAbundance
from texpyr.infotheory import histogram256

ALPHA_MIN = 1e-8
ALPHA_MAX = 1e8


@dataclass(frozen=True)
class AbundanceVector:
    species: np.ndarray  # occupied gray levels, ascending
    counts: np.ndarray  # pixels per species, all >= 1

    @property
    def N(self) -> int:
        return int(self.counts.sum())

    @property
    def S(self) -> int:
        return int(self.counts.size)

    @classmethod
    def from_counts(cls, counts, species=None) -> "AbundanceVector":
        counts = np.asarray(counts, dtype=np.int64)
        if species is None:
            species = np.arange(counts.size)
        species = np.asarray(species, dtype=np.int64)
        keep = counts > 0
        return cls(species=species[keep], counts=counts[keep])


@dataclass(frozen=True)
class BitFeatures:
    margalef: float
    menhinick: float
    berger_parker: float
    fisher_alpha: float
    kempton_taylor_q: float
    mcintosh: float
    shannon_wiener: float
    taxo_diversity: float
    taxo_distinctness: float
    sum_phylo_dist: float
    avg_nn_dist: float
    intensive_quad_entropy: float
    extensive_quad_entropy: float
    total_taxo_distinctness: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def abundance(img: np.ndarray) -> AbundanceVector:
    hist = histogram256(img)
    return AbundanceVector.from_counts(hist)


def _fisher_residual(alpha: float, n: int, s: int) -> float:
    return alpha * math.log1p(n / alpha) - s


def fisher_alpha(n: int, s: int, max_iter: int = 100, tol: float = 1e-10) -> float:
    """Solve ``S = alpha * ln(1 + N / alpha)`` for alpha.

    Newton from ``alpha = S``; bisection-style bracketing on
    ``[ALPHA_MIN, ALPHA_MAX]`` when Newton leaves the domain or stalls.
    ``S == 1`` gives 0. ``S == N`` has no finite root and returns ALPHA_MAX.
    """
    if s <= 1:
        return 0.0
    if s >= n:
        return ALPHA_MAX
    alpha = float(s)
    for _ in range(max_iter):
        f = _fisher_residual(alpha, n, s)
        if abs(f) < tol:
            return alpha
        slope = math.log1p(n / alpha) - n / (alpha + n)
        if slope <= 0.0:
            break
        step = f / slope
        nxt = alpha - step
        if not (ALPHA_MIN < nxt < ALPHA_MAX) or not math.isfinite(nxt):
            break
        if abs(step) <= 1e-15 * alpha:
            return nxt
        alpha = nxt
    if _fisher_residual(ALPHA_MAX, n, s) < 0:
        return ALPHA_MAX
    return brentq(_fisher_residual, ALPHA_MIN, ALPHA_MAX, args=(n, s), xtol=1e-14, rtol=1e-15, maxiter=500)


def kempton_taylor_q(counts: np.ndarray) -> float:
    """Half the species count over the log ratio of upper and lower quartile abundances.

    Zero when fewer than four species are present or the quartiles coincide.
    """
    s = counts.size
    if s < 4:
        return 0.0
    ranked = np.sort(counts)
    lo = int(math.ceil(s * 0.25))
    hi = int(s * 0.75)
    ratio = ranked[hi] / ranked[lo]
    if ratio <= 1.0:
        return 0.0
    return (s / 2.0) / math.log(ratio)


def biodiversity_indices(a: AbundanceVector) -> np.ndarray:
    """margalef, menhinick, berger_parker, fisher_alpha, kempton_taylor_q, mcintosh, shannon_wiener."""
    n, s = a.N, a.S
    if n < 2:
        raise DegenerateAbundance(f"biodiversity indices need N >= 2, got N={n}")
    c = a.counts.astype(np.float64)
    p = c / n
    u = math.sqrt(float(np.sum(c * c)))
    return np.array(
        [
            (s - 1) / math.log(n),
            s / math.sqrt(n),
            float(c.max()) / n,
            fisher_alpha(n, s),
            kempton_taylor_q(a.counts),
            (n - u) / (n - math.sqrt(n)),
            max(0.0, float(-np.sum(p * np.log(p)))),
        ],
        dtype=np.float64,
    )


def taxonomic_indices(a: AbundanceVector) -> np.ndarray:
    """taxo_diversity, taxo_distinctness, sum_phylo_dist, avg_nn_dist,
    intensive/extensive quadratic entropy, total_taxo_distinctness."""
    s, n = a.S, a.N
    if s < 2:
        return np.zeros(7, dtype=np.float64)
    lv = a.species.astype(np.float64)
    x = a.counts.astype(np.float64)
    d = np.abs(lv[:, None] - lv[None, :])

    weighted_pairs = 0.5 * float(x @ d @ x)
    abundance_pairs = 0.5 * (n * n - float(x @ x))
    all_d = float(d.sum())  # ordered pairs i != j; diagonal is zero

    d_off = d + np.diag(np.full(s, np.inf))
    return np.array(
        [
            weighted_pairs / (n * (n - 1) / 2.0),
            weighted_pairs / abundance_pairs,
            all_d / 2.0,
            float(d_off.min(axis=1).mean()),
            all_d / (s * s),
            all_d / s,
            float(d.sum(axis=1).sum()) / (s - 1),
        ],
        dtype=np.float64,
    )


def bit_block(img: np.ndarray) -> BitFeatures:
    a = abundance(img)
    vals = np.concatenate([biodiversity_indices(a), taxonomic_indices(a)])
    return BitFeatures(*map(float, vals))
