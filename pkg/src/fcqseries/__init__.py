"""Exact q-enumeration of fully commutative elements in classical Coxeter groups.

Four layers:

* :mod:`fcqseries.qlaurent` / :mod:`fcqseries.xseries` -- exact truncated
  bivariate series arithmetic over the rationals;
* :mod:`fcqseries.catalog` -- every named generating function, built from
  its defining sum or closed form;
* :mod:`fcqseries.coxeter` / :mod:`fcqseries.oracle` -- brute-force
  trace-monoid enumeration of fc elements, fc involutions and alternating
  heaps, used as ground truth;
* :mod:`fcqseries.harness` -- the identity / cross-check / periodicity /
  specialization verification suite, also exposed via the CLI.
"""

from .truncation import (
    ContextMismatchError,
    InversionError,
    TruncationContext,
    default_context,
)
from .qlaurent import QLaurent
from .xseries import (
    XSeries,
    geom_factor,
    geometric_x,
    pochhammer,
    q_binomial,
    q_pochhammer,
)

__version__ = "0.1.0"

__all__ = [
    "ContextMismatchError",
    "InversionError",
    "TruncationContext",
    "default_context",
    "QLaurent",
    "XSeries",
    "geom_factor",
    "geometric_x",
    "pochhammer",
    "q_binomial",
    "q_pochhammer",
    "__version__",
]
