"""Build functions and embeddings from plain JSON-compatible descriptions."""

from __future__ import annotations

from typing import Optional

from .embeddings import (WeierstrassEmbeddingSpec, build_koch, build_lacunary, build_weierstrass_embedding,
                         helix_embedding, identity_embedding)
from .functions import (HolderFunction, WeierstrassParams, constant_function, generator_from_dict, linear_function,
                        weierstrass_function)

FUNCTION_KINDS = ("takagi", "cosine", "weierstrass", "zero", "linear")
EMBEDDING_KINDS = ("lacunary", "koch", "weierstrass", "identity", "helix")


def weierstrass_params(spec: dict, alpha: float, base: int) -> WeierstrassParams:
    kind = spec.get("kind", "takagi")
    gen = {"takagi": {"kind": "triangle"}, "cosine": {"kind": "cosine"}}.get(kind, spec.get("generator"))
    if gen is None:
        raise ValueError("weierstrass functions need a generator")
    return WeierstrassParams(int(base), float(alpha), generator_from_dict(gen), spec.get("depth"))


def function_from_spec(spec: dict, alpha: float, base: int) -> HolderFunction:
    """``spec["kind"]`` is one of takagi, cosine, weierstrass (with generator), zero, linear.

    The zero and linear controls are Lipschitz and carry exponent 1.
    """
    kind = spec.get("kind", "takagi")
    if kind in ("takagi", "cosine", "weierstrass"):
        p = weierstrass_params(spec, alpha, base)
        return weierstrass_function(p, f"{kind}(b={p.base}, alpha={p.alpha})")
    if kind == "zero":
        return constant_function(0.0, alpha=1.0)
    if kind == "linear":
        return linear_function(float(spec.get("slope", 1.0)), float(spec.get("intercept", 0.0)), alpha=1.0)
    raise ValueError(f"unknown function kind {kind!r}")


def embedding_from_spec(spec: dict, alpha: float, base: Optional[int] = None):
    kind = spec.get("kind", "lacunary")
    if kind == "lacunary":
        return build_lacunary(float(alpha), int(spec.get("lambda", 4)), float(spec.get("delta", 2.0 ** -20)),
                              int(spec.get("max_dim", 64)))
    if kind == "koch":
        return build_koch(float(alpha), spec.get("depth"))
    if kind == "weierstrass":
        gens = tuple(generator_from_dict(g) for g in spec["generators"])
        b = int(spec.get("base", base if base is not None else 2))
        return build_weierstrass_embedding(WeierstrassEmbeddingSpec(gens, b, float(alpha)), spec.get("depth"))
    if kind == "identity":
        return identity_embedding(float(alpha))
    if kind == "helix":
        return helix_embedding(float(alpha))
    raise ValueError(f"unknown embedding kind {kind!r}")
