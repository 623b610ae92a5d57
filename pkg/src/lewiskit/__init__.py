"""Toolkit for Lewis's variably strict conditional logics.

Modules: ``syntax`` (formulas), ``spheres`` (sphere models), ``algebra``
(finite V-algebras), ``duality`` (algebras, selection functions and spheres),
``proofs`` (Hilbert proof checking), ``search`` (bounded countermodels) and
``cli``.
"""

from .algebra import VAlgebra, check_axioms, check_variety, enumerate_v_algebras, load_algebra
from .duality import AlphaModel, SphereStructure, alpha_from_algebra, algebra_from_alpha
from .proofs import Calculus, Proof, check_proof
from .search import Logic, search_countermodel
from .spheres import ModelClass, SphereModel, global_consequence, local_consequence
from .syntax import Formula, parse, to_text

__version__ = "0.1.0"

__all__ = [
    "VAlgebra", "check_axioms", "check_variety", "enumerate_v_algebras", "load_algebra",
    "AlphaModel", "SphereStructure", "alpha_from_algebra", "algebra_from_alpha",
    "Calculus", "Proof", "check_proof", "Logic", "search_countermodel",
    "ModelClass", "SphereModel", "global_consequence", "local_consequence",
    "Formula", "parse", "to_text",
]
