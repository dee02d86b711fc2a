"""Snowflake (bi-Hölder) embeddings of [0, 1] and their numerical certificates."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .functions import (PeriodicGenerator, WeierstrassParams, _series_float,
                        _series_rational, trig_generator)

FULL_SCAN_MAX_N = 2 ** 12
RANDOM_PAIRS = 10 ** 6


@dataclass(frozen=True)
class SnowflakeEmbedding:
    """Map [0,1] -> R^d with exponent alpha and optional bi-Hölder constants.

    ``periodic`` embeddings are defined on the circle R/Z; their certificates
    measure separations with the circle distance. ``c2_bound`` is an analytic
    upper Hölder constant in the max norm when one is known.
    """

    evaluator: Callable = field(compare=False, repr=False)
    d: int
    alpha: float
    c1_estimate: Optional[float] = None
    c2_estimate: Optional[float] = None
    resolution_floor: Optional[float] = None
    description: str = ""
    periodic: bool = False
    c2_bound: Optional[float] = None
    rational: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("embedding dimension must be >= 1")
        if self.c1_estimate is not None and self.c2_estimate is not None and self.c1_estimate > self.c2_estimate:
            raise ValueError("c1 must not exceed c2")

    def __call__(self, x) -> np.ndarray:
        """Return an array of shape (len(x), d)."""
        x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        return np.asarray(self.evaluator(x), dtype=float).reshape(x.size, self.d)

    def at_rationals(self, num, den: int) -> np.ndarray:
        num = np.atleast_1d(np.asarray(num, dtype=np.int64)).ravel()
        if self.rational is not None:
            return self.rational(num, int(den))
        return self(num / den)

    def holder_bound(self) -> Optional[float]:
        return self.c2_bound if self.c2_bound is not None else self.c2_estimate


def embedding_from_callable(func: Callable, d: int, alpha: float, description: str = "custom",
                            periodic: bool = False, c2_bound: Optional[float] = None) -> SnowflakeEmbedding:
    """Wrap ``func`` (array of x -> array of shape (len(x), d)) as an embedding."""
    return SnowflakeEmbedding(lambda x: np.asarray(func(x), dtype=float).reshape(x.size, d), d, alpha,
                              description=description, periodic=periodic, c2_bound=c2_bound)


def identity_embedding(alpha: float = 1.0) -> SnowflakeEmbedding:
    return SnowflakeEmbedding(lambda x: x[:, None], 1, alpha, description="identity", c2_bound=1.0)


def helix_embedding(alpha: float = 0.5) -> SnowflakeEmbedding:
    """(cos x, sin x): Lipschitz, hence not alpha-bi-Hölder for alpha < 1."""
    return SnowflakeEmbedding(lambda x: np.column_stack([np.cos(x), np.sin(x)]), 2, alpha,
                              description="helix", c2_bound=1.0)


# ---------------------------------------------------------------------------
# lacunary trigonometric construction


def lacunary_depth(lam: int, delta: float) -> int:
    """Least K >= 0 with lam**K >= 1/delta."""
    k = 0
    while lam ** k * delta < 1.0:
        k += 1
    return k


def build_lacunary(alpha: float, lam: int = 4, delta: float = 2.0 ** -12, max_dim: int = 64) -> SnowflakeEmbedding:
    """Scaled circle coordinates at frequencies lam**k, k = 0..K, plus a scaled affine coordinate."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if int(lam) != lam or lam < 2:
        raise ValueError("lambda must be an integer >= 2")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    lam = int(lam)
    K = lacunary_depth(lam, delta)
    d = 2 * (K + 1) + 1
    if d > max_dim:
        raise ValueError(f"resolution {delta} needs dimension {d} > ceiling {max_dim}")
    weights = float(lam) ** (-alpha * np.arange(K + 1))
    affine = float(lam) ** (-alpha * (K + 1))

    def assemble(phases, x):
        out = np.empty((x.size, d))
        out[:, 0:2 * (K + 1):2] = np.cos(phases) * weights
        out[:, 1:2 * (K + 1):2] = np.sin(phases) * weights
        out[:, -1] = affine * x
        return out

    def evaluator(x):
        freqs = float(lam) ** np.arange(K + 1)
        return assemble(2.0 * np.pi * ((x[:, None] * freqs) % 1.0), x)

    def rational(num, den):
        res = np.empty((num.size, K + 1), dtype=np.int64)
        r = num % den
        for k in range(K + 1):
            res[:, k] = r
            r = (r * lam) % den
        return assemble(2.0 * np.pi * (res / den), num / den)

    return SnowflakeEmbedding(evaluator, d, alpha, resolution_floor=delta,
                              description=f"lacunary(alpha={alpha}, lambda={lam}, delta={delta})",
                              c2_bound=(2.0 * np.pi + 1.0) / (1.0 - lam ** (-alpha)), rational=rational)


# ---------------------------------------------------------------------------
# generalised Koch curve


def koch_parameters(alpha: float) -> Tuple[float, float]:
    """(contraction ratio, bend angle) of the Koch curve with exponent alpha."""
    if not 0.5 < alpha < 1.0:
        raise ValueError("Koch construction needs alpha in (1/2, 1)")
    return 4.0 ** (-alpha), math.acos((4.0 ** alpha - 2.0) / 2.0)


def koch_maps(alpha: float):
    """Offsets and complex multipliers of the four similarities z -> a + m z."""
    r, phi = koch_parameters(alpha)
    up, down = r * np.exp(1j * phi), r * np.exp(-1j * phi)
    return np.array([0.0, r, r + up, 1.0 - r], dtype=complex), np.array([r, up, down, r], dtype=complex)


def build_koch(alpha: float, depth: Optional[int] = None) -> SnowflakeEmbedding:
    """Arc parametrisation of the generalised Koch curve from (0,0) to (1,0).

    x is expanded in base 4 to ``depth`` digits; the remaining fraction is
    placed on the base segment of the innermost piece.
    """
    r, _ = koch_parameters(alpha)
    offsets, mults = koch_maps(alpha)
    D = depth if depth is not None else int(math.ceil(math.log(1e-13) / math.log(r)))

    def evaluator(x):
        u = np.clip(x, 0.0, 1.0)
        A = np.zeros(u.shape, dtype=complex)
        M = np.ones(u.shape, dtype=complex)
        for _ in range(D):
            u = 4.0 * u
            digit = np.minimum(np.floor(u), 3.0).astype(np.int64)
            u = u - digit
            A = A + M * offsets[digit]
            M = M * mults[digit]
        z = A + M * u
        return np.column_stack([z.real, z.imag])

    # Pieces at level k have max-norm diameter r**k; separations in
    # [4**-(k+1), 4**-k] meet at most two adjacent pieces.
    return SnowflakeEmbedding(evaluator, 2, alpha, description=f"koch(alpha={alpha})",
                              c2_bound=2.0 * 4.0 ** alpha)


# ---------------------------------------------------------------------------
# Weierstrass embeddings


@dataclass(frozen=True)
class WeierstrassEmbeddingSpec:
    generators: Tuple[PeriodicGenerator, ...]
    base: int
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(self.generators) < 1:
            raise ValueError("need at least one generator")
        WeierstrassParams(self.base, self.alpha, self.generators[0], 0)

    def to_dict(self) -> dict:
        return {"base": self.base, "alpha": self.alpha, "generators": [g.to_dict() for g in self.generators]}


def build_weierstrass_embedding(spec: WeierstrassEmbeddingSpec, depth: Optional[int] = None) -> SnowflakeEmbedding:
    params = [WeierstrassParams(spec.base, spec.alpha, g, depth) for g in spec.generators]

    def evaluator(x):
        return np.column_stack([_series_float(p, x) for p in params])

    def rational(num, den):
        return np.column_stack([_series_rational(p, num, den) for p in params])

    return SnowflakeEmbedding(evaluator, len(params), spec.alpha,
                              description=f"weierstrass-embedding(m={len(params)}, b={spec.base}, alpha={spec.alpha})",
                              periodic=True, c2_bound=max(p.holder_certificate() for p in params),
                              rational=rational)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class BiHolderCertificate:
    c1: float
    c2: float
    n: int
    pair_count: int
    worst_pair: Tuple[float, float]
    trace: Tuple[Tuple[int, float], ...]
    upper_trace: Tuple[Tuple[int, float], ...] = ()

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "n": self.n, "pair_count": self.pair_count,
                "worst_pair": list(self.worst_pair), "trace": [list(t) for t in self.trace],
                "upper_trace": [list(t) for t in self.upper_trace]}


def _scan_pairs(n: int, rng: np.random.Generator, full_scan_max: int, random_pairs: int):
    """Pairs at every dyadic index separation plus seeded uniform random pairs."""
    ii, jj = [], []
    step = 1
    while step <= n:
        i = np.arange(0, n + 1 - step, dtype=np.int64)
        ii.append(i)
        jj.append(i + step)
        step *= 2
    a = rng.integers(0, n + 1, size=random_pairs)
    b = rng.integers(0, n + 1, size=random_pairs)
    keep = a != b
    ii.append(np.minimum(a, b)[keep])
    jj.append(np.maximum(a, b)[keep])
    return np.concatenate(ii), np.concatenate(jj)


def certify_biholder(emb: SnowflakeEmbedding, alpha: Optional[float] = None, grids: Sequence[int] = (2 ** 10, 2 ** 12),
                     seed: int = 0, full_scan_max: int = FULL_SCAN_MAX_N,
                     random_pairs: int = RANDOM_PAIRS) -> BiHolderCertificate:
    """Scan ratios ||Phi(x) - Phi(y)||_max / sep(x, y)**alpha on closed grids i/n.

    Grids up to ``full_scan_max`` are scanned exhaustively. Finer grids use
    all pairs at dyadic index separations plus ``random_pairs`` seeded random
    pairs. The trace is cumulative: c1 is the running minimum and c2 the
    running maximum over all grids so far.
    """
    grids = sorted(int(n) for n in grids)
    if not grids:
        raise ValueError("grids must be nonempty")
    a = emb.alpha if alpha is None else float(alpha)
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, 0.0
    worst = (float("nan"), float("nan"))
    trace, upper = [], []
    pairs = 0
    for n in grids:
        values = np.ascontiguousarray(emb.at_rationals(np.arange(n + 1), n))
        xs = np.arange(n + 1) / n
        if n <= full_scan_max:
            l, h, bi, bj = _kernels.biholder_all_pairs(values, a, emb.periodic)
            count = n * (n + 1) // 2
        else:
            ii, jj = _scan_pairs(n, rng, full_scan_max, random_pairs)
            l, h, bi, bj = _kernels.biholder_listed_pairs(values, ii, jj, a, emb.periodic)
            count = ii.size
        pairs += count
        if l < lo:
            lo = float(l)
            worst = (float(xs[bi]), float(xs[bj]))
        hi = max(hi, float(h))
        trace.append((n, lo))
        upper.append((n, hi))
    return BiHolderCertificate(lo, hi, grids[-1], pairs, worst, tuple(trace), tuple(upper))


def with_certificate(emb: SnowflakeEmbedding, cert: BiHolderCertificate) -> SnowflakeEmbedding:
    return dataclasses.replace(emb, c1_estimate=cert.c1, c2_estimate=cert.c2, resolution_floor=1.0 / cert.n)


# ---------------------------------------------------------------------------
# reverse-Hölder sets


def reverse_holder_fraction(W, alpha: float, eps: float, x: float, interval: Tuple[float, float],
                            n: int = 4096) -> float:
    """Fraction of I where |W(x) - W(y)| > eps |x - y|**alpha.

    Uses the midpoint rule with n cells on I, so the result estimates the
    Lebesgue proportion of the reverse-Hölder set.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise ValueError("interval must be nonempty")
    if not lo <= x <= hi:
        raise ValueError("x must lie in the interval")
    ys = lo + (np.arange(n) + 0.5) * ((hi - lo) / n)
    wx = float(np.atleast_1d(W(np.array([x])))[0])
    diff = np.abs(np.asarray(W(ys), dtype=float) - wx)
    return float(np.mean(diff > eps * np.abs(ys - x) ** alpha))


# ---------------------------------------------------------------------------
# search over Weierstrass embeddings


@dataclass(frozen=True)
class SearchResult:
    spec: WeierstrassEmbeddingSpec
    certificate: BiHolderCertificate
    trace: Tuple[float, ...]
    coefficients: np.ndarray = field(compare=False, repr=False)

    def __iter__(self):
        return iter((self.spec, self.certificate))


def _normalise(coef: np.ndarray) -> np.ndarray:
    """Scale each generator's (cos, sin) coefficient block to unit Lipschitz bound."""
    k = np.arange(1, coef.shape[1] + 1)
    lip = (2.0 * np.pi * k * np.hypot(coef[:, :, 0], coef[:, :, 1])).sum(axis=1)
    return coef / np.where(lip > 0, lip, 1.0)[:, None, None]


def _specimen_spec(coef: np.ndarray, base: int, alpha: float) -> WeierstrassEmbeddingSpec:
    gens = [trig_generator([(k + 1, float(c[k, 0]), float(c[k, 1])) for k in range(c.shape[0])]) for c in coef]
    return WeierstrassEmbeddingSpec(tuple(gens), base, alpha)


def _basis(base: int, alpha: float, cutoff: int, n: int) -> np.ndarray:
    """Columns C_q, S_q on the closed grid: sums over k of base**(-alpha k) cos/sin(2 pi q base**k x)."""
    cos_gen = WeierstrassParams(base, alpha, trig_generator([(1, 1.0, 0.0)]))
    num = np.arange(n + 1, dtype=np.int64)
    cols = []
    for q in range(1, cutoff + 1):
        c = _series_rational(WeierstrassParams(base, alpha, trig_generator([(q, 1.0, 0.0)]), cos_gen.depth), num, n)
        s = _series_rational(WeierstrassParams(base, alpha, trig_generator([(q, 0.0, 1.0)]), cos_gen.depth), num, n)
        cols.extend([c, s])
    return np.column_stack(cols)


def search_embedding(base: int, alpha: float, m: int, budget: int, seed: int = 0, cutoff: int = 8,
                     working_n: int = 2 ** 10, offspring: int = 4, sigma: float = 0.2, patience: int = 8,
                     grids: Sequence[int] = (2 ** 8, 2 ** 10, 2 ** 12, 2 ** 14)) -> SearchResult:
    """Elitist (1+offspring) evolution strategy maximising certified c1 at ``working_n``.

    Generators are trigonometric polynomials up to frequency ``cutoff`` with
    unit Lipschitz bound. Mutation is seeded Gaussian jitter of relative size
    ``sigma`` on the coefficients; sigma halves after ``patience`` iterations
    without improvement. ``budget`` counts iterations including the initial
    specimen. The best specimen is re-certified on ``grids``.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if m < 1:
        raise ValueError("need at least one generator")
    rng = np.random.default_rng(seed)
    basis = _basis(base, alpha, cutoff, working_n)
    def fitness(coef):
        vals = np.ascontiguousarray(basis @ coef.reshape(m, 2 * cutoff).T)
        return float(_kernels.biholder_all_pairs(vals, alpha, True)[0])

    best = _normalise(rng.standard_normal((m, cutoff, 2)))
    best_fit = fitness(best)
    trace = [best_fit]
    stall = 0
    for _ in range(budget - 1):
        improved = False
        for _ in range(offspring):
            child = _normalise(best + sigma * np.abs(best).max() * rng.standard_normal(best.shape))
            fit = fitness(child)
            if fit > best_fit:
                best, best_fit, improved = child, fit, True
        trace.append(best_fit)
        stall = 0 if improved else stall + 1
        if stall >= patience:
            sigma *= 0.5
            stall = 0
    spec = _specimen_spec(best, base, alpha)
    cert = certify_biholder(build_weierstrass_embedding(spec), alpha, grids, seed=seed)
    return SearchResult(spec, cert, tuple(trace), best)
