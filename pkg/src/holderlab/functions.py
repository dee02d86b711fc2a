"""Hölder functions on [0, 1]: Weierstrass-type series, controls, perturbations.

Functions are immutable value objects wrapping a vectorised evaluator. When an
exact rational path is available (``num/den`` with integer arrays), grid
evaluation reduces ``b**k * x mod 1`` in integer arithmetic, so series terms
are exact up to the final generator call for every integer base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from . import _kernels

DEFAULT_TAIL_TOLERANCE = 2.0 ** -40


def _frac(x):
    x = np.asarray(x, dtype=float)
    return x - np.floor(x)


# ---------------------------------------------------------------------------
# periodic generators


@dataclass(frozen=True)
class PeriodicGenerator:
    """A Z-periodic Lipschitz function with certified bounds.

    ``kind`` is ``"triangle"`` (distance to the integers), ``"cosine"``
    (cos 2πx), ``"trig"`` (finite trigonometric polynomial given by ``terms``
    of ``(frequency, cos_coef, sin_coef)``) or ``"custom"`` (caller-supplied
    periodic callable with caller-supplied bounds). ``phase`` shifts the
    argument: the generator evaluates ``g(x + phase)``.
    """

    kind: str
    lipschitz_bound: float
    sup_bound: float
    terms: Tuple[Tuple[int, float, float], ...] = ()
    phase: float = 0.0
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __call__(self, x):
        y = _frac(np.asarray(x, dtype=float) + self.phase) if self.phase else _frac(x)
        if self.kind == "triangle":
            return np.minimum(y, 1.0 - y)
        if self.kind == "cosine":
            return np.cos(2.0 * np.pi * y)
        if self.kind == "trig":
            out = np.zeros_like(y)
            for k, a, b in self.terms:
                arg = 2.0 * np.pi * _frac(k * y)
                out = out + a * np.cos(arg) + b * np.sin(arg)
            return out
        return np.asarray(self.func(y), dtype=float)

    def shifted(self, phase: float) -> "PeriodicGenerator":
        return PeriodicGenerator(self.kind, self.lipschitz_bound, self.sup_bound,
                                 self.terms, (self.phase + phase) % 1.0, self.func)

    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise ValueError("custom generators are not serialisable")
        out = {"kind": self.kind}
        if self.kind == "trig":
            out["terms"] = [[int(k), float(a), float(b)] for k, a, b in self.terms]
        if self.phase:
            out["phase"] = self.phase
        return out


def triangle_generator() -> PeriodicGenerator:
    return PeriodicGenerator("triangle", 1.0, 0.5)


def cosine_generator() -> PeriodicGenerator:
    return PeriodicGenerator("cosine", 2.0 * np.pi, 1.0)


def trig_generator(terms: Sequence[Sequence[float]]) -> PeriodicGenerator:
    """Trigonometric polynomial sum of a cos 2πkx + b sin 2πkx over (k, a, b)."""
    clean = []
    for k, a, b in terms:
        if int(k) != k or k < 0:
            raise ValueError("trig frequencies must be nonnegative integers")
        clean.append((int(k), float(a), float(b)))
    amps = [math.hypot(a, b) for _, a, b in clean]
    lip = sum(2.0 * np.pi * k * m for (k, _, _), m in zip(clean, amps))
    return PeriodicGenerator("trig", lip, sum(amps), tuple(clean))


def custom_generator(func: Callable, lipschitz_bound: float, sup_bound: float) -> PeriodicGenerator:
    if lipschitz_bound < 0 or sup_bound < 0:
        raise ValueError("generator bounds must be nonnegative")
    return PeriodicGenerator("custom", float(lipschitz_bound), float(sup_bound), func=func)


def generator_from_dict(spec: dict) -> PeriodicGenerator:
    kind = spec.get("kind")
    if kind == "triangle":
        g = triangle_generator()
    elif kind == "cosine":
        g = cosine_generator()
    elif kind == "trig":
        g = trig_generator(spec.get("terms", []))
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    phase = float(spec.get("phase", 0.0))
    return g.shifted(phase) if phase else g


# ---------------------------------------------------------------------------
# Hölder functions


@dataclass(frozen=True)
class HolderFunction:
    """Evaluable map [0,1] -> R with exponent and optional Hölder certificate.

    ``rational`` optionally evaluates at ``num/den`` exactly reduced points;
    grid helpers use it when present.
    """

    evaluator: Callable = field(compare=False, repr=False)
    alpha: float
    holder_constant: Optional[float] = None
    description: str = ""
    rational: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def at_rationals(self, num, den: int):
        num = np.asarray(num, dtype=np.int64)
        if self.rational is not None:
            return self.rational(num, int(den))
        return self.evaluator(num / den)

    def on_grid(self, n: int):
        """Values at the closed grid i/n, i = 0..n."""
        return self.at_rationals(np.arange(n + 1, dtype=np.int64), n)

    def at_midpoints(self, n: int):
        """Values at (i + 1/2)/n, i = 0..n-1."""
        return self.at_rationals(2 * np.arange(n, dtype=np.int64) + 1, 2 * n)


@dataclass(frozen=True)
class WeierstrassParams:
    base: int
    alpha: float
    generator: PeriodicGenerator
    depth: Optional[int] = None

    def __post_init__(self):
        if int(self.base) != self.base or self.base < 2:
            raise ValueError("base must be an integer >= 2")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.depth is None:
            object.__setattr__(self, "depth", default_depth(self.generator.sup_bound, self.base, self.alpha))
        elif self.depth < 0:
            raise ValueError("depth must be >= 0")

    def scales(self):
        return float(self.base) ** (-self.alpha * np.arange(self.depth + 1))

    def holder_certificate(self) -> float:
        """Hölder constant valid for every partial sum and the full series."""
        b, a, g = self.base, self.alpha, self.generator
        return g.lipschitz_bound / (1.0 - b ** (a - 1.0)) + 2.0 * g.sup_bound / (1.0 - b ** (-a))


def _tail(sup, base, alpha, depth):
    q = float(base) ** (-alpha)
    return sup * q ** (depth + 1) / (1.0 - q)


def default_depth(sup: float, base: int, alpha: float, tol: float = DEFAULT_TAIL_TOLERANCE) -> int:
    if sup <= 0:
        return 0
    k = max(0, int(math.ceil(math.log(tol * (1.0 - base ** (-alpha)) / sup) / (-alpha * math.log(base)) - 1.0)))
    while k > 0 and _tail(sup, base, alpha, k - 1) <= tol:
        k -= 1
    while _tail(sup, base, alpha, k) > tol:
        k += 1
    return k


def tail_bound(params: WeierstrassParams) -> float:
    return _tail(params.generator.sup_bound, params.base, params.alpha, params.depth)


def _series_float(params: WeierstrassParams, x):
    y = _frac(x)
    g = params.generator
    b = float(params.base)
    scales = params.scales()
    total = np.zeros_like(y)
    for k, s in enumerate(scales):
        if not y.any():
            total += g(np.zeros(1))[0] * scales[k:].sum()
            break
        total += s * g(y)
        y = (b * y) % 1.0
    return total


def _series_rational(params: WeierstrassParams, num, den):
    r = np.asarray(num, dtype=np.int64) % den
    g = params.generator
    scales = params.scales()
    total = np.zeros(r.shape)
    for k, s in enumerate(scales):
        if not r.any():
            total += g(np.zeros(1))[0] * scales[k:].sum()
            break
        total += s * g(r / den)
        r = (r * params.base) % den
    return total


def eval_weierstrass(params: WeierstrassParams, x):
    """Partial sum over k <= depth of base**(-alpha k) g(base**k x)."""
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("x must lie in [0, 1]")
    out = _series_float(params, np.atleast_1d(arr))
    return float(out[0]) if arr.ndim == 0 else out


def weierstrass_function(params: WeierstrassParams, description: str = "") -> HolderFunction:
    label = description or f"weierstrass(b={params.base}, alpha={params.alpha}, g={params.generator.kind})"
    return HolderFunction(
        evaluator=lambda x: _series_float(params, np.atleast_1d(x)).reshape(np.shape(x)),
        alpha=params.alpha,
        holder_constant=params.holder_certificate(),
        description=label,
        rational=lambda num, den: _series_rational(params, num, den),
    )


def takagi(alpha: float, base: int = 2, depth: Optional[int] = None) -> HolderFunction:
    return weierstrass_function(WeierstrassParams(base, alpha, triangle_generator(), depth),
                                f"takagi(b={base}, alpha={alpha})")


def weierstrass_cosine(alpha: float, base: int, depth: Optional[int] = None) -> HolderFunction:
    return weierstrass_function(WeierstrassParams(base, alpha, cosine_generator(), depth),
                                f"weierstrass-cosine(b={base}, alpha={alpha})")


def constant_function(value: float = 0.0, alpha: float = 0.5) -> HolderFunction:
    return HolderFunction(lambda x: np.full(np.shape(x), float(value)), alpha, 0.0, f"constant({value})")


def linear_function(slope: float = 1.0, intercept: float = 0.0, alpha: float = 0.5) -> HolderFunction:
    """x -> slope*x + intercept; on [0,1] its Hölder constant is |slope| for every alpha <= 1."""
    return HolderFunction(lambda x: slope * np.asarray(x, dtype=float) + intercept, alpha, abs(slope),
                          f"linear({slope}, {intercept})")


def sampled_function(xs, ys, alpha: float, holder_constant: Optional[float] = None,
                     description: str = "sampled") -> HolderFunction:
    """Piecewise-linear interpolant of samples; xs must be increasing and cover [0,1]."""
    xs = np.asarray(xs, dtype=float).copy()
    ys = np.asarray(ys, dtype=float).copy()
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need matching 1-D sample arrays with at least two points")
    if np.any(np.diff(xs) <= 0) or xs[0] > 0 or xs[-1] < 1:
        raise ValueError("sample abscissae must increase and cover [0, 1]")
    return HolderFunction(lambda x: np.interp(x, xs, ys), alpha, holder_constant, description)


# ---------------------------------------------------------------------------
# perturbations


@dataclass(frozen=True)
class Perturbation:
    t: Tuple[float, ...]
    embedding: object  # SnowflakeEmbedding

    def __post_init__(self):
        t = tuple(float(v) for v in np.atleast_1d(np.asarray(self.t, dtype=float)))
        object.__setattr__(self, "t", t)
        if len(t) != self.embedding.d:
            raise ValueError(f"perturbation has {len(t)} coordinates, embedding has d={self.embedding.d}")


def perturb(f: HolderFunction, p: Perturbation) -> HolderFunction:
    """x -> f(x) + <t, Phi(x)>.

    The exponent is the smaller of the two unless t = 0. The certificate uses the l1 norm of t, the dual of the max norm in which
    embedding constants are measured.
    """
    t = np.asarray(p.t)
    emb = p.embedding
    c_phi = emb.holder_bound()
    cert = None
    if f.holder_constant is not None and c_phi is not None:
        cert = f.holder_constant + float(np.abs(t).sum()) * c_phi

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        return (np.atleast_1d(f(flat)) + emb(flat) @ t).reshape(x.shape)

    def rational(num, den):
        return f.at_rationals(num, den) + emb.at_rationals(num, den) @ t

    alpha = f.alpha if not t.any() else min(f.alpha, emb.alpha)
    return HolderFunction(evaluator, alpha, cert, f"{f.description} + <t, {emb.description}>", rational)


def shear(f: HolderFunction, theta: float) -> HolderFunction:
    """x -> f(x) + x cot(theta), so sin(theta) times it is the projection of (x, f(x))."""
    if not 0.0 < theta < np.pi:
        raise ValueError("theta must lie strictly inside (0, pi)")
    cot = 0.0 if theta == math.pi / 2 else math.cos(theta) / math.sin(theta)
    cert = None if f.holder_constant is None else f.holder_constant + abs(cot)

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        return f(x) + x * cot

    def rational(num, den):
        return f.at_rationals(num, den) + (np.asarray(num) / den) * cot

    return HolderFunction(evaluator, f.alpha, cert, f"shear({f.description}, {theta})", rational)


def estimate_holder_constant(f: HolderFunction, n: int, alpha: Optional[float] = None) -> float:
    """Max of |f(x_i) - f(x_j)| / |x_i - x_j|**alpha over all pairs of the closed grid i/n.

    A lower bound for the true constant; nondecreasing along nested grids.
    Cost is quadratic in n.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    a = f.alpha if alpha is None else alpha
    return float(_kernels.holder_ratio_max(np.ascontiguousarray(f.on_grid(n), dtype=float), float(a), float(n)))
