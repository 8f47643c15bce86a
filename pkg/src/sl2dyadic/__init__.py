"""Filtration subgroups of SL_2 over 2-adic fields and the trace-form
parametrization of their characters, with exhaustive verifiers."""

from .characters import (
    AdditiveCharacter,
    DyadicRotation,
    QuotientCharacter,
    build_character,
    dual_matrix,
    enumerate_characters_oracle,
    equivariance_check,
    eval_psi,
    psi_product_check,
    verify_duality,
)
from .errors import *  # noqa: F401,F403
from .groups import (
    B_n,
    G,
    K,
    K_n,
    K_n_m,
    AdditiveQuotientElem,
    CosetSystem,
    SubgroupDesc,
    conjugate_intersection_check,
    enumerate_cosets,
    membership,
    normality_check,
    theta,
    theta_inverse,
)
from .matrices import LatticeShape, Mat2, closed_form_pair, nondegeneracy_check, trace_pair
from .padic import FieldSpec, FracElem, TruncElem, invert_unit, make_field, q2, sqrt2_field
from .projline import ProjPoint, act, canonicalize_point, points, trivial_action_check, verify_stabilizer
from .report import CheckReport
from .snf import GroupPresentation, smith_normal_form

__version__ = "0.1.0"
