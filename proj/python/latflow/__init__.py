"""Python front end for the latflow C++ core.

Exact quantities come back as :class:`fractions.Fraction`.
"""

import json
from fractions import Fraction

from . import _latflow
from ._latflow import BudgetError, LatflowError, ks_distance, sample_lambda1, segment_minimum, shortest_vector

__all__ = [
    "BudgetError",
    "LatflowError",
    "ks_distance",
    "nearest_residuals",
    "rational_certificate",
    "run",
    "sample_lambda1",
    "segment_minimum",
    "shortest_vector",
    "w2_witness_search",
]


def nearest_residuals(a, b, q):
    p1, p2, r1, r2 = _latflow.nearest_residuals(str(a), str(b), int(q))
    return p1, p2, Fraction(r1), Fraction(r2)


def rational_certificate(a, b):
    return _latflow.rational_certificate(str(a), str(b))


def w2_witness_search(a, b, C, q_max):
    out = []
    for w in _latflow.w2_witness_search(str(a), str(b), str(C), int(q_max)):
        w["residual1"] = Fraction(w["residual1"])
        w["residual2"] = Fraction(w["residual2"])
        out.append(w)
    return out


def run(config):
    """Run a config dict (same keys as a report's "config") and return the report dict."""
    return json.loads(_latflow.run(json.dumps(config)))
