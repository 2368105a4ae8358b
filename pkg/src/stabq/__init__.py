"""Homological invariants of translation-invariant Pauli stabilizer codes."""

from .analysis import CodeAnalyzer
from .charges import NotMobile, charge_module, charge_modules, mobility, momentum_sectors
from .cli import load_code, parse_code
from .code import StabilizerCode, NotIsotropic, ValidationError, code_invariants, make_code
from .ring import LatticeGroup, LaurentPoly

__all__ = [
    "CodeAnalyzer", "StabilizerCode", "LatticeGroup", "LaurentPoly", "NotIsotropic", "NotMobile",
    "ValidationError", "charge_module", "charge_modules", "code_invariants", "load_code",
    "make_code", "mobility", "momentum_sectors", "parse_code",
]
