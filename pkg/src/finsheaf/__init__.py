"""Executable sheaf-theoretic constructions over finite sites."""

from .category import FiniteCategory, chain, discrete_category, monoid_category, poset_as_category, validate_category
from .coverage import (
    Sieve,
    Topology,
    dense_topology,
    generate_topology,
    sieves_from_names,
    trivial_topology,
    validate_topology,
)
from .errors import FinsheafError, ParseError, ValidationError
from .forcing import Forcing, check_rst_axioms, force
from .formulas import parse_formula, parse_formulas
from .mvs import Mvs, check_generic, enumerate_mvs, minimal_mvs, pullback_mvs, representable_family
from .names import Universe, build_universe
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    SmallnessClass,
    Subpresheaf,
    cover_by_shriek,
    counit,
    forall_along,
    pi_functor,
    pi_shriek,
    pi_star,
    power_object,
    representable,
    shriek_map,
    terminal,
)
from .sheaf import is_locally_surjective, is_separated, is_sheaf, plus, sheaf_power_object, sheafify
from .wtypes import check_initial_algebra, presheaf_wtype, sheaf_wtype

__all__ = [
    "FiniteCategory",
    "chain",
    "discrete_category",
    "monoid_category",
    "poset_as_category",
    "validate_category",
    "Sieve",
    "Topology",
    "dense_topology",
    "generate_topology",
    "sieves_from_names",
    "trivial_topology",
    "validate_topology",
    "FinsheafError",
    "ParseError",
    "ValidationError",
    "Forcing",
    "check_rst_axioms",
    "force",
    "parse_formula",
    "parse_formulas",
    "Mvs",
    "check_generic",
    "enumerate_mvs",
    "minimal_mvs",
    "pullback_mvs",
    "representable_family",
    "Universe",
    "build_universe",
    "Presheaf",
    "PresheafMorphism",
    "SmallnessClass",
    "Subpresheaf",
    "cover_by_shriek",
    "counit",
    "forall_along",
    "pi_functor",
    "pi_shriek",
    "pi_star",
    "power_object",
    "representable",
    "shriek_map",
    "terminal",
    "is_locally_surjective",
    "is_separated",
    "is_sheaf",
    "plus",
    "sheaf_power_object",
    "sheafify",
    "check_initial_algebra",
    "presheaf_wtype",
    "sheaf_wtype",
]
