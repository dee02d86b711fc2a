"""Numerical tools for level sets and graphs of Hölder functions.

Weierstrass-type functions with exact grid evaluation, snowflake embeddings
with bi-Hölder certificates, discrete measures with Fourier, Sobolev and
energy estimators, packing-dimension fits, slicing, and sampled
verification runs over finite-dimensional perturbation families.
"""

from ._version import __version__
from .dimension import (DimensionFit, LevelSetSampler, PointSet, dim_fit, graph_dim, level_dim, level_set,
                        pack_count)
from .embeddings import (BiHolderCertificate, SnowflakeEmbedding, WeierstrassEmbeddingSpec, build_koch,
                         build_lacunary, build_weierstrass_embedding, certify_biholder, helix_embedding,
                         identity_embedding, reverse_holder_fraction, search_embedding)
from .functions import (HolderFunction, PeriodicGenerator, Perturbation, WeierstrassParams, constant_function,
                        cosine_generator, eval_weierstrass, linear_function, perturb, shear, takagi, tail_bound,
                        triangle_generator, trig_generator, weierstrass_cosine, weierstrass_function)
from .measures import (DiscreteMeasure, decay_exponent, density_estimate, energy, fourier, lift_measure,
                       local_dimension, point_mass, project, sobolev_integral, uniform_measure)
from .slicing import band_measure, disintegration_defect, slice_energy

__all__ = [
    "__version__",
    "DimensionFit",
    "LevelSetSampler",
    "PointSet",
    "dim_fit",
    "graph_dim",
    "level_dim",
    "level_set",
    "pack_count",
    "BiHolderCertificate",
    "SnowflakeEmbedding",
    "WeierstrassEmbeddingSpec",
    "build_koch",
    "build_lacunary",
    "build_weierstrass_embedding",
    "certify_biholder",
    "helix_embedding",
    "identity_embedding",
    "reverse_holder_fraction",
    "search_embedding",
    "HolderFunction",
    "PeriodicGenerator",
    "Perturbation",
    "WeierstrassParams",
    "constant_function",
    "cosine_generator",
    "eval_weierstrass",
    "linear_function",
    "perturb",
    "shear",
    "takagi",
    "tail_bound",
    "triangle_generator",
    "trig_generator",
    "weierstrass_cosine",
    "weierstrass_function",
    "DiscreteMeasure",
    "decay_exponent",
    "density_estimate",
    "energy",
    "fourier",
    "lift_measure",
    "local_dimension",
    "point_mass",
    "project",
    "sobolev_integral",
    "uniform_measure",
    "band_measure",
    "disintegration_defect",
    "slice_energy",
]
