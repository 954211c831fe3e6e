"""Supersingular (a_p = 0) p-adic Birch--Swinnerton-Dyer machinery.

Finite-precision p-adic arithmetic, truncated power series, logarithm
matrices, Dieudonne-module linear algebra, Bernardi p-adic heights and
regulators, signed p-adic L-functions from numerically integrated modular
symbols, and a verifier checking the order-of-vanishing and
leading-coefficient identities on a database of elliptic-curve fixtures.
"""

from .padics import PadicElement, QuadExt, Valuation, PrecisionError, unit_equal, iwasawa_log
from .series import TruncatedSeries, cyclotomic, half_log, LogMatrix
from .curves import Curve, CurveFixture, count_ap, q_expansion, formal_expansions, real_periods
from .dieudonne import DieudonneData
from .heights import HeightContext, bernardi_sigma, height, regulator, reg_pm, strict_mw
from .msymbols import ModularSymbolEngine
from .lfunction import lp_alpha, lp_beta, signed_decompose, signed_from_level, SignedPair
from .verifier import run_verification, VerificationReport

__all__ = [
    "PadicElement", "QuadExt", "Valuation", "PrecisionError",
    "unit_equal", "iwasawa_log",
    "TruncatedSeries", "cyclotomic", "half_log", "LogMatrix",
    "Curve", "CurveFixture", "count_ap", "q_expansion", "formal_expansions",
    "real_periods",
    "DieudonneData",
    "HeightContext", "bernardi_sigma", "height", "regulator", "reg_pm",
    "strict_mw",
    "ModularSymbolEngine",
    "lp_alpha", "lp_beta", "signed_decompose", "signed_from_level", "SignedPair",
    "run_verification", "VerificationReport",
]

__version__ = "0.1.0"
