"""Jet-scalar kernels with a compiled core and a pure-Python fallback.

The compiled extension (``_cycore``, Cython) and the numpy fallback
(``_pycore``) implement the same scalar type and produce identical
floating-point results.  The active backend is chosen at import time:
the compiled core when available, else the fallback; set
``JACOBIFLOW_KERNELS=python`` or ``=compiled`` to force one.

``use_backend`` swaps the active backend temporarily (used by the tests and
the kernel benchmark); the switch is process-global, so do not swap while
integrations are running on other threads.
"""

from __future__ import annotations

import math
import os
from contextlib import contextmanager

from . import _pycore

try:
    from . import _cycore
except ImportError:  # extension not built; fallback only
    _cycore = None

BACKENDS = {"python": _pycore}
if _cycore is not None:
    BACKENDS["compiled"] = _cycore

_env = os.environ.get("JACOBIFLOW_KERNELS")
if _env:
    if _env not in BACKENDS:
        raise ImportError(
            f"JACOBIFLOW_KERNELS={_env!r} but available backends are "
            f"{sorted(BACKENDS)}"
        )
    _active = _env
else:
    _active = "compiled" if "compiled" in BACKENDS else "python"

_DUAL_TYPES = tuple(mod.Dual2 for mod in BACKENDS.values())


def active_backend_name() -> str:
    return _active


def backend(name: str | None = None):
    """The backend module (active one if ``name`` is None)."""
    return BACKENDS[_active if name is None else name]


def has_compiled() -> bool:
    return "compiled" in BACKENDS


@contextmanager
def use_backend(name: str):
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; have {sorted(BACKENDS)}")
    prev = _active
    _active = name
    try:
        yield BACKENDS[name]
    finally:
        _active = prev


def constant(x: float, m: int, k: int):
    return backend().constant(x, m, k)


def seeded(x: float, m: int, k: int, outer: int | None = None, inner=None):
    return backend().seeded(x, m, k, outer=outer, inner=inner)


def is_dual(x) -> bool:
    return isinstance(x, _DUAL_TYPES)


def value_of(x) -> float:
    """Plain float value of a scalar that may be a jet."""
    return x.value if isinstance(x, _DUAL_TYPES) else float(x)


# Generic elementary functions: dispatch on scalar kind so the same code
# evaluates over plain floats and over jets.


def sin(x):
    return x.sin() if isinstance(x, _DUAL_TYPES) else math.sin(x)


def cos(x):
    return x.cos() if isinstance(x, _DUAL_TYPES) else math.cos(x)


def tan(x):
    return x.tan() if isinstance(x, _DUAL_TYPES) else math.tan(x)


def exp(x):
    return x.exp() if isinstance(x, _DUAL_TYPES) else math.exp(x)


def log(x):
    if isinstance(x, _DUAL_TYPES):
        return x.log()
    if x <= 0.0:
        from ..errors import EvalDomainError

        raise EvalDomainError(f"log of non-positive value {x!r}")
    return math.log(x)


def sqrt(x):
    if isinstance(x, _DUAL_TYPES):
        return x.sqrt()
    if x < 0.0:
        from ..errors import EvalDomainError

        raise EvalDomainError(f"sqrt of negative value {x!r}")
    return math.sqrt(x)


def sinh(x):
    return x.sinh() if isinstance(x, _DUAL_TYPES) else math.sinh(x)


def cosh(x):
    return x.cosh() if isinstance(x, _DUAL_TYPES) else math.cosh(x)


def fabs(x):
    return abs(x)


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sinh": sinh,
    "cosh": cosh,
    "abs": fabs,
}
