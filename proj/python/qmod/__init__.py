"""Conformal moduli of quadrilaterals: exact formulas and adaptive FEM."""

from ._core import (
    AdaptiveOptions,
    ModulusResult,
    Quad,
    bowman_asymptotic,
    bowman_modulus,
    circular_quad,
    circular_quad_modulus,
    compute_modulus,
    elliptic_k,
    hyp2f1,
    inv_mu,
    mu,
    parallelogram,
    parallelogram_modulus,
    quad_from_corners,
    read_polygon,
    trapezoid,
)

__all__ = [
    "AdaptiveOptions",
    "ModulusResult",
    "Quad",
    "bowman_asymptotic",
    "bowman_modulus",
    "circular_quad",
    "circular_quad_modulus",
    "compute_modulus",
    "elliptic_k",
    "hyp2f1",
    "inv_mu",
    "mu",
    "parallelogram",
    "parallelogram_modulus",
    "quad_from_corners",
    "read_polygon",
    "trapezoid",
]
