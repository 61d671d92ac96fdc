"""Pure-Python (numpy) implementation of the jet scalar.

A ``Dual2`` carries a truncated Taylor expansion of a scalar quantity:
second order in ``m`` outer seed directions, and first order in ``k``
inner seed directions nested below.  Every coefficient is an element of
the inner ring, stored as a length ``K = k + 1`` float vector
``(value, tangent_1, ..., tangent_k)``.

Layout:

* ``val``  -- shape ``(K,)``,        the scalar itself
* ``g``    -- shape ``(m, K)``,      first-order outer coefficients
* ``h``    -- shape ``(m, m, K)``,   second-order outer coefficients

With ``k = 0`` this is a plain multidirectional second-order dual number;
with ``m = 0`` it degenerates to a first-order dual with ``k`` directions.
Seeding every perturbation with zero reproduces ordinary float
arithmetic in ``val[0]``.

The compiled twin in ``_cycore.pyx`` mirrors this module operation for
operation (same evaluation order), so both backends produce identical
floating-point results.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import EvalDomainError

_NUMBER = (int, float, np.floating, np.integer)


def _d1mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in the inner ring, broadcasting over leading axes.

    (x0 + xt·δ)(y0 + yt·δ) = x0·y0 + (x0·yt + y0·xt)·δ
    """
    out = a[..., :1] * b
    if out.shape[-1] > 1:
        out[..., 1:] += b[..., :1] * a[..., 1:]
    return out


class Dual2:
    __slots__ = ("m", "k", "val", "g", "h")

    def __init__(self, m: int, k: int, val: np.ndarray, g: np.ndarray, h: np.ndarray):
        self.m = m
        self.k = k
        self.val = val
        self.g = g
        self.h = h

    # -- accessors ---------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.val[0])

    def coeffs(self):
        """(val, g, h) as fresh arrays."""
        return self.val.copy(), self.g.copy(), self.h.copy()

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.val))
            and np.all(np.isfinite(self.g))
            and np.all(np.isfinite(self.h))
        )

    def __repr__(self):
        return f"Dual2(m={self.m}, k={self.k}, value={self.value!r})"

    # -- ring operations ---------------------------------------------------

    def _like(self, val, g, h):
        return Dual2(self.m, self.k, val, g, h)

    def _check(self, other: "Dual2"):
        if other.m != self.m or other.k != self.k:
            raise ValueError(
                f"mixing jets of different shapes: (m={self.m},k={self.k}) "
                f"vs (m={other.m},k={other.k})"
            )

    def __add__(self, other):
        if isinstance(other, Dual2):
            self._check(other)
            return self._like(self.val + other.val, self.g + other.g, self.h + other.h)
        if isinstance(other, _NUMBER):
            val = self.val.copy()
            val[0] += float(other)
            return self._like(val, self.g.copy(), self.h.copy())
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual2):
            self._check(other)
            return self._like(self.val - other.val, self.g - other.g, self.h - other.h)
        if isinstance(other, _NUMBER):
            val = self.val.copy()
            val[0] -= float(other)
            return self._like(val, self.g.copy(), self.h.copy())
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _NUMBER):
            val = -self.val
            val[0] += float(other)
            return self._like(val, -self.g, -self.h)
        return NotImplemented

    def __neg__(self):
        return self._like(-self.val, -self.g, -self.h)

    def __mul__(self, other):
        if isinstance(other, Dual2):
            self._check(other)
            a, b = self, other
            val = _d1mul(a.val, b.val)
            g = _d1mul(a.val[None, :], b.g) + _d1mul(b.val[None, :], a.g)
            h = (
                _d1mul(a.val[None, None, :], b.h)
                + _d1mul(b.val[None, None, :], a.h)
                + _d1mul(a.g[:, None, :], b.g[None, :, :])
                + _d1mul(b.g[:, None, :], a.g[None, :, :])
            )
            return self._like(val, g, h)
        if isinstance(other, _NUMBER):
            c = float(other)
            return self._like(self.val * c, self.g * c, self.h * c)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual2):
            return self * other._recip()
        if isinstance(other, _NUMBER):
            c = float(other)
            if c == 0.0:
                raise EvalDomainError("division by zero")
            return self * (1.0 / c)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _NUMBER):
            return self._recip() * float(other)
        return NotImplemented

    def _apply_unary(self, f0: float, f1: float, f2: float, f3: float) -> "Dual2":
        """Compose with a scalar function given its derivatives at val[0].

        The inner tangents of the argument promote (f0, f1, f2) to inner-ring
        elements F_j = (f_j, f_{j+1}·ut); the usual second-order chain rule is
        then applied coefficient-wise in the inner ring.
        """
        K = self.k + 1
        ut = self.val[1:]
        F0 = np.empty(K)
        F0[0] = f0
        F0[1:] = f1 * ut
        F1 = np.empty(K)
        F1[0] = f1
        F1[1:] = f2 * ut
        F2 = np.empty(K)
        F2[0] = f2
        F2[1:] = f3 * ut
        g = _d1mul(F1[None, :], self.g)
        h = _d1mul(F1[None, None, :], self.h) + _d1mul(
            F2[None, None, :], _d1mul(self.g[:, None, :], self.g[None, :, :])
        )
        return self._like(F0, g, h)

    def _recip(self) -> "Dual2":
        u0 = self.val[0]
        if u0 == 0.0:
            raise EvalDomainError("division by zero")
        inv = 1.0 / u0
        f0 = inv
        f1 = -inv * inv
        f2 = -2.0 * f1 * inv
        f3 = -3.0 * f2 * inv
        return self._apply_unary(f0, f1, f2, f3)

    # -- power -------------------------------------------------------------

    def __pow__(self, other):
        if isinstance(other, Dual2):
            # a^b = exp(b * log a); requires a > 0
            return (other * self.log()).exp()
        if isinstance(other, _NUMBER):
            return self._powf(float(other))
        return NotImplemented

    def __rpow__(self, other):
        if isinstance(other, _NUMBER):
            base = float(other)
            if base <= 0.0:
                raise EvalDomainError(
                    f"power with non-positive base {base!r} and varying exponent"
                )
            return (self * math.log(base)).exp()
        return NotImplemented

    def _powf(self, p: float) -> "Dual2":
        u0 = self.val[0]
        if p == 0.0:
            K = self.k + 1
            val = np.zeros(K)
            val[0] = 1.0
            return self._like(val, np.zeros_like(self.g), np.zeros_like(self.h))
        if p == 1.0:
            return self._like(self.val.copy(), self.g.copy(), self.h.copy())
        if float(p).is_integer():
            f = _int_pow_derivs(u0, p)
        else:
            if u0 <= 0.0:
                raise EvalDomainError(
                    f"fractional power {p!r} of non-positive base {u0!r}"
                )
            f = _real_pow_derivs(u0, p)
        return self._apply_unary(*f)

    # -- elementary functions ------------------------------------------------

    def sin(self):
        s, c = math.sin(self.val[0]), math.cos(self.val[0])
        return self._apply_unary(s, c, -s, -c)

    def cos(self):
        s, c = math.sin(self.val[0]), math.cos(self.val[0])
        return self._apply_unary(c, -s, -c, s)

    def tan(self):
        t = math.tan(self.val[0])
        s = 1.0 + t * t
        return self._apply_unary(t, s, 2.0 * t * s, 2.0 * s * s + 4.0 * t * t * s)

    def exp(self):
        e = math.exp(self.val[0])
        return self._apply_unary(e, e, e, e)

    def log(self):
        u0 = self.val[0]
        if u0 <= 0.0:
            raise EvalDomainError(f"log of non-positive value {u0!r}")
        inv = 1.0 / u0
        return self._apply_unary(math.log(u0), inv, -inv * inv, 2.0 * inv * inv * inv)

    def sqrt(self):
        u0 = self.val[0]
        if u0 <= 0.0:
            raise EvalDomainError(f"sqrt of non-positive value {u0!r}")
        r = math.sqrt(u0)
        f1 = 0.5 / r
        f2 = -0.5 * f1 / u0
        f3 = -1.5 * f2 / u0
        return self._apply_unary(r, f1, f2, f3)

    def sinh(self):
        s, c = math.sinh(self.val[0]), math.cosh(self.val[0])
        return self._apply_unary(s, c, s, c)

    def cosh(self):
        s, c = math.sinh(self.val[0]), math.cosh(self.val[0])
        return self._apply_unary(c, s, c, s)

    def __abs__(self):
        u0 = self.val[0]
        s = 1.0 if u0 > 0.0 else (-1.0 if u0 < 0.0 else 0.0)
        return self._apply_unary(abs(u0), s, 0.0, 0.0)


def _int_pow_derivs(u0: float, p: float):
    """(f, f', f'', f''') of x^p at u0 for integer p, safe at u0 = 0."""
    out = []
    c = 1.0
    for j in range(4):
        e = p - j
        if c == 0.0:
            out.append(0.0)
        else:
            if u0 == 0.0 and e < 0.0:
                raise EvalDomainError(f"zero raised to negative power {e!r}")
            out.append(c * (u0 ** e if e != 0.0 else 1.0))
        c *= p - j
    return tuple(out)


def _real_pow_derivs(u0: float, p: float):
    f0 = u0 ** p
    f1 = p * u0 ** (p - 1.0)
    f2 = p * (p - 1.0) * u0 ** (p - 2.0)
    f3 = p * (p - 1.0) * (p - 2.0) * u0 ** (p - 3.0)
    return f0, f1, f2, f3


def constant(x: float, m: int, k: int) -> Dual2:
    K = k + 1
    val = np.zeros(K)
    val[0] = float(x)
    return Dual2(m, k, val, np.zeros((m, K)), np.zeros((m, m, K)))


def seeded(x: float, m: int, k: int, outer: int | None = None, inner=None) -> Dual2:
    """A variable with unit outer seed ``outer`` and/or inner tangent row
    ``inner`` (length k)."""
    d = constant(x, m, k)
    if outer is not None:
        d.g[outer, 0] = 1.0
    if inner is not None:
        inner = np.asarray(inner, dtype=float)
        if inner.shape != (k,):
            raise ValueError(f"inner tangent must have shape ({k},)")
        d.val[1:] = inner
    return d
