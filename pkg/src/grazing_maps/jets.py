"""Truncated power series ("jets") in a single deformation variable.

A :class:`JetValue` of order ``K`` holds raw power-series coefficients
``a[0..K]`` of ``a0 + a1*t + ... + aK*t**K``.  The j-th derivative at
``t = 0`` is ``j! * a[j]``.  Arithmetic never reads past index ``K``.

Coefficient 0 of every operation is computed with exactly the same
floating-point operations as the scalar path (``math``/``cmath`` and
:func:`ipow`), so that evaluating an expression on jets reproduces the
plain double evaluation bit for bit in the constant term.

Coefficients may be complex; the Lie engine uses that for complex-step
gradients.
"""
import cmath
import math

import numpy as np


def ipow(base, n):
    """Integer power by repeated squaring; shared by the scalar and jet paths."""
    if n < 0:
        return 1.0 / ipow(base, -n)
    result = None
    square = base
    while n:
        if n & 1:
            result = square if result is None else result * square
        n >>= 1
        if n:
            square = square * square
    if result is None:
        return 1.0 if not isinstance(base, JetValue) else JetValue.constant(1.0, base.order, base.coeffs.dtype)
    return result


def _is_complex(value):
    return isinstance(value, complex) or np.iscomplexobj(value)


class JetValue:
    """Truncated Taylor series of fixed order with numpy coefficient storage."""

    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs)
        if coeffs.dtype.kind not in "fc":
            coeffs = coeffs.astype(float)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("jet coefficients must be a non-empty 1-d array")
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, order, dtype=float):
        c = np.zeros(order + 1, dtype=np.result_type(dtype, type(value)))
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order, slope=1.0):
        """Jet of ``value + slope*t``."""
        dtype = complex if _is_complex(value) or _is_complex(slope) else float
        c = np.zeros(order + 1, dtype=dtype)
        c[0] = value
        if order >= 1:
            c[1] = slope
        return cls(c)

    @property
    def order(self):
        return self.coeffs.size - 1

    def __getitem__(self, j):
        return self.coeffs[j]

    def __len__(self):
        return self.coeffs.size

    def derivatives(self):
        """``j! * a_j`` for j = 0..K."""
        return np.array([math.factorial(j) * a for j, a in enumerate(self.coeffs)])

    def __repr__(self):
        return f"JetValue({self.coeffs.tolist()!r})"

    def __eq__(self, other):
        if isinstance(other, JetValue):
            return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))
        return NotImplemented

    __hash__ = None

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, JetValue):
            if other.order != self.order:
                raise ValueError(f"jet order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return None
        return NotImplemented

    def __neg__(self):
        return JetValue(-self.coeffs)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            c = self.coeffs.astype(np.result_type(self.coeffs, type(other)), copy=True)
            c[0] = self.coeffs[0] + other
            return JetValue(c)
        return JetValue(self.coeffs + o.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            c = self.coeffs.astype(np.result_type(self.coeffs, type(other)), copy=True)
            c[0] = self.coeffs[0] - other
            return JetValue(c)
        return JetValue(self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c = (-self.coeffs).astype(np.result_type(self.coeffs, type(other)), copy=True)
        c[0] = other - self.coeffs[0]
        return JetValue(c)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return JetValue(self.coeffs * other)
        k = self.order
        return JetValue(np.convolve(self.coeffs, o.coeffs)[: k + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return JetValue(self.coeffs / other)
        return _jet_div(self.coeffs, o.coeffs)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        num = np.zeros_like(self.coeffs, dtype=np.result_type(self.coeffs, type(other)))
        num[0] = other
        return _jet_div(num, self.coeffs)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("jets support integer exponents only")
        return ipow(self, int(n))


def _jet_div(a, b):
    if b[0] == 0:
        raise ZeroDivisionError("division by zero")
    dtype = np.result_type(a, b)
    c = np.zeros(a.size, dtype=dtype)
    b0 = b[0]
    for k in range(a.size):
        s = a[k]
        for j in range(1, k + 1):
            s = s - b[j] * c[k - j]
        c[k] = s / b0
    return JetValue(c)


# -- elementary functions -------------------------------------------------
# Each accepts a float, a complex or a JetValue.  Domain violations raise
# ValueError/ZeroDivisionError; callers attach node locations.


def _scalar(fname, z):
    if _is_complex(z):
        return getattr(cmath, fname)(z)
    return getattr(math, fname)(z)


def jexp(a):
    if not isinstance(a, JetValue):
        return _scalar("exp", a)
    x = a.coeffs
    e = np.zeros_like(x)
    e[0] = _scalar("exp", x[0])
    for k in range(1, x.size):
        e[k] = sum(j * x[j] * e[k - j] for j in range(1, k + 1)) / k
    return JetValue(e)


def jlog(a):
    if not isinstance(a, JetValue):
        if a.real <= 0:
            raise ValueError("ln of non-positive argument")
        return _scalar("log", a)
    x = a.coeffs
    if x[0].real <= 0:
        raise ValueError("ln of non-positive argument")
    out = np.zeros_like(x)
    out[0] = _scalar("log", x[0])
    for k in range(1, x.size):
        s = x[k] - sum(j * out[j] * x[k - j] for j in range(1, k)) / k
        out[k] = s / x[0]
    return JetValue(out)


def jsqrt(a):
    if not isinstance(a, JetValue):
        if a.real < 0:
            raise ValueError("sqrt of negative argument")
        return _scalar("sqrt", a)
    x = a.coeffs
    if x[0].real < 0:
        raise ValueError("sqrt of negative argument")
    if x[0] == 0 and x.size > 1:
        raise ValueError("sqrt is not differentiable at 0")
    r = np.zeros_like(x)
    r[0] = _scalar("sqrt", x[0])
    for k in range(1, x.size):
        s = x[k] - sum(r[j] * r[k - j] for j in range(1, k))
        r[k] = s / (2 * r[0])
    return JetValue(r)


def _sincos(a):
    x = a.coeffs
    s = np.zeros_like(x)
    c = np.zeros_like(x)
    s[0] = _scalar("sin", x[0])
    c[0] = _scalar("cos", x[0])
    for k in range(1, x.size):
        s[k] = sum(j * x[j] * c[k - j] for j in range(1, k + 1)) / k
        c[k] = -sum(j * x[j] * s[k - j] for j in range(1, k + 1)) / k
    return JetValue(s), JetValue(c)


def jsin(a):
    if not isinstance(a, JetValue):
        return _scalar("sin", a)
    return _sincos(a)[0]


def jcos(a):
    if not isinstance(a, JetValue):
        return _scalar("cos", a)
    return _sincos(a)[1]


FUNCTIONS = {"sin": jsin, "cos": jcos, "exp": jexp, "ln": jlog, "sqrt": jsqrt}
