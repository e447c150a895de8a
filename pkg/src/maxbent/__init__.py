"""Exact analysis of vectorial functions x^(2^r) Tr^n_m(L(x)) with the maximal number of bent components."""

__version__ = "0.1.0"

from .field import FieldCtx, TowerCtx, make_field, make_tower
from .linpoly import LinearizedPoly, parse_lambda
from .walsh import BoolFn, ConsistencyError, VectorialFn
from .family import FamilyMember, FamilyProfile, build, profile_direct, profile_via_H
from .certify import CertReport

__all__ = [
    "__version__", "FieldCtx", "TowerCtx", "make_field", "make_tower", "LinearizedPoly",
    "parse_lambda", "BoolFn", "VectorialFn", "ConsistencyError", "FamilyMember", "FamilyProfile",
    "build", "profile_direct", "profile_via_H", "CertReport",
]
