"""Exact q-series, discriminant forms, Weil representations and lift bookkeeping."""

from qlift.qseries import (
    FracSeries,
    PrecisionError,
    constant_term,
    eisenstein2,
    eta_quotient,
    q_derivative,
    serre_derivative,
    series_add,
    series_mul,
    unary_theta,
)

__version__ = "0.1.0"
