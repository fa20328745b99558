"""Exact symbolic toolkit for multiparameter quantum supergroups.

Modules, bottom up: ``scalars`` (exponent polynomials and q-scalars),
``cartan`` (super-data and multiparameter matrices), ``realization``,
``deform_data`` (twists and cocycles on matrices and realizations),
``superalg_engine`` (the algebra and its relations), ``hopf``,
``lie_semiclassical``, ``polmp`` (the polynomial form) and ``cli``.
"""

from __future__ import annotations

from .cartan import CartanSuperDatum, MultiparamMatrix, build_datum, generic_matrix, standard_matrix
from .realization import Realization, build_realization, classify, lift
from .scalars import ExponentPoly, ToralScalar

__all__ = [
    "CartanSuperDatum",
    "ExponentPoly",
    "MultiparamMatrix",
    "Realization",
    "ToralScalar",
    "build_datum",
    "build_realization",
    "classify",
    "generic_matrix",
    "lift",
    "standard_matrix",
]

__version__ = "0.1.0"
