"""2^n-th Hilbert symbols over K(mu_{2^n}), K unramified over Q_2."""

from .coeff import CoeffCtx, CoeffElem, coeff_inv, frobenius, ring_new, teichmuller, trace_K
from .kernels import BACKEND
from .knfield import (KnCtx, KnElem, NotPrincipalUnit, eval_at_root, kn_ctx, kn_galois, kn_log,
                      kn_trace, lift_unit)
from .oracle import quad_symbol, quad_symbol_stable
from .scaled import IntegralityError, PrecisionError, ScaledInt
from .series import (Series, SeriesCtx, WindowError, s_D, s_gamma, s_invert, s_Log, s_phi,
                     s_residue, s_Y, series_ctx)
from .symbol import (Certificate, ConsistencyError, Params, SymbolValue, artin_hasse,
                     chi_unit_factor, cup_product, hilbert_symbol, symbol_table, symbol_via_cup,
                     tr_map)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CoeffCtx", "CoeffElem", "coeff_inv", "frobenius", "ring_new", "teichmuller",
    "trace_K", "KnCtx", "KnElem", "NotPrincipalUnit", "eval_at_root", "kn_ctx", "kn_galois",
    "kn_log", "kn_trace", "lift_unit", "quad_symbol", "quad_symbol_stable", "IntegralityError",
    "PrecisionError", "ScaledInt", "Series", "SeriesCtx", "WindowError", "s_D", "s_gamma",
    "s_invert", "s_Log", "s_phi", "s_residue", "s_Y", "series_ctx", "Certificate",
    "ConsistencyError", "Params", "SymbolValue", "artin_hasse", "chi_unit_factor", "cup_product",
    "hilbert_symbol", "symbol_table", "symbol_via_cup", "tr_map",
]
