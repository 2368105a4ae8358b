"""Estimator-style wrapper: configure once, fit on a code, read the fitted attributes."""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .charges import charge_modules, mobility
from .code import StabilizerCode, code_invariants, load_and_validate


class CodeAnalyzer(BaseEstimator):
    """Computes invariants, charge modules and mobility of one code.

    Parameters
    ----------
    degrees : sequence of int or None
        Charge degrees to compute; None means 0..D.
    ell_override : int or None
        Period to certify instead of the one read off the translation action.
    """

    def __init__(self, degrees: Optional[Sequence[int]] = None, ell_override: Optional[int] = None):
        self.degrees = degrees
        self.ell_override = ell_override

    def fit(self, X, y=None):
        code = self._as_code(X)
        load_and_validate(code)
        self.code_ = code
        self.invariants_ = code_invariants(code)
        self.charges_ = charge_modules(code, self.degrees)
        self.mobility_ = mobility(code, self.ell_override)
        return self

    def transform(self, X=None):
        """Invariant factors per degree (None where the module is infinite)."""
        check_is_fitted(self, "charges_")
        return {cm.degree: cm.invariant_factors for cm in self.charges_}

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform()

    @staticmethod
    def _as_code(X) -> StabilizerCode:
        if isinstance(X, StabilizerCode):
            return X
        from .cli import load_code, code_from_json
        if isinstance(X, dict):
            return code_from_json(X)
        return load_code(str(X))
