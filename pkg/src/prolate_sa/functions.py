"""Concrete functions of the maximal domain, with exact derivatives.

A ``MaxDomainFunction`` carries three vectorized callables: the value, the
first derivative and the Legendre operator ``Mx = -(p x')'`` with
``p(t) = 1 - t**2/a**2``.  Supplying ``Mx`` directly (rather than a second
derivative) keeps the log-singular basis functions accurate near the
endpoints, where ``p x''`` and ``p' x'`` cancel to leading order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Below this argument the exp(-1/x) factors and their derivatives are < 1e-30.
_CUTOFF = 1e-2


@dataclass(frozen=True)
class MaxDomainFunction:
    value: Callable
    derivative: Callable
    apply_m: Callable
    a: float
    name: str = ""

    def __call__(self, t):
        return self.value(t), self.derivative(t)

    def apply_l(self, t):
        t = np.asarray(t, dtype=float)
        return self.apply_m(t) + t**2 * self.value(t)

    def __add__(self, other: "MaxDomainFunction") -> "MaxDomainFunction":
        if not isinstance(other, MaxDomainFunction):
            return NotImplemented
        return MaxDomainFunction(
            lambda t: self.value(t) + other.value(t),
            lambda t: self.derivative(t) + other.derivative(t),
            lambda t: self.apply_m(t) + other.apply_m(t),
            self.a, f"({self.name} + {other.name})")

    def __mul__(self, scalar) -> "MaxDomainFunction":
        c = complex(scalar) if np.iscomplexobj(scalar) else float(scalar)
        return MaxDomainFunction(
            lambda t: c * self.value(t),
            lambda t: c * self.derivative(t),
            lambda t: c * self.apply_m(t),
            self.a, f"{c}*{self.name}")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)


def zero_function(a: float) -> MaxDomainFunction:
    z = lambda t: np.zeros_like(np.asarray(t, dtype=float))
    return MaxDomainFunction(z, z, z, a, "0")


def smooth_function(f, df, d2f, a: float, name: str = "") -> MaxDomainFunction:
    """Wrap a function smooth on [-a, a] given its first two derivatives."""
    def apply_m(t):
        t = np.asarray(t, dtype=float)
        return -((1 - t**2 / a**2) * d2f(t) - 2 * t / a**2 * df(t))
    return MaxDomainFunction(f, df, apply_m, a, name)


def _h(x):
    """exp(-1/x) for x > 0 with its first two derivatives; zero elsewhere."""
    x = np.asarray(x, dtype=float)
    ok = x > _CUTOFF
    xs = np.where(ok, x, 1.0)
    h = np.where(ok, np.exp(-1.0 / xs), 0.0)
    dh = np.where(ok, h / xs**2, 0.0)
    d2h = np.where(ok, h * (1 - 2 * xs) / xs**4, 0.0)
    return h, dh, d2h


def smoothstep(t, a: float):
    """C-infinity transition from 0 (t <= -a/2) to 1 (t >= a/2), with t-derivatives."""
    u = (np.asarray(t, dtype=float) + a / 2) / a
    g, dg, d2g = _h(u)
    k, dk, d2k = _h(1 - u)
    dk, d2k = -dk, d2k
    big = g + k
    dbig = dg + dk
    d2big = d2g + d2k
    s = g / big
    ds = (dg * big - g * dbig) / big**2
    d2s = (d2g / big - 2 * dg * dbig / big**2 - g * d2big / big**2
           + 2 * g * dbig**2 / big**3)
    return s, ds / a, d2s / a**2


def _p(t, a):
    return 1 - t**2 / a**2


def phi_minus(a: float) -> MaxDomainFunction:
    def value(t):
        return 1 - smoothstep(t, a)[0]

    def derivative(t):
        return -smoothstep(t, a)[1]

    def apply_m(t):
        t = np.asarray(t, dtype=float)
        _, ds, d2s = smoothstep(t, a)
        return -2 * t / a**2 * ds + _p(t, a) * d2s
    return MaxDomainFunction(value, derivative, apply_m, a, "phi_-")


def phi_plus(a: float) -> MaxDomainFunction:
    def apply_m(t):
        t = np.asarray(t, dtype=float)
        _, ds, d2s = smoothstep(t, a)
        return 2 * t / a**2 * ds - _p(t, a) * d2s
    return MaxDomainFunction(lambda t: smoothstep(t, a)[0], lambda t: smoothstep(t, a)[1],
                             apply_m, a, "phi_+")


def psi_minus(a: float) -> MaxDomainFunction:
    def value(t):
        t = np.asarray(t, dtype=float)
        s = smoothstep(t, a)[0]
        return np.where(s < 1, np.log(np.where(s < 1, a + t, 1.0)) * (1 - s), 0.0)

    def derivative(t):
        t = np.asarray(t, dtype=float)
        s, ds, _ = smoothstep(t, a)
        lg = np.log(np.where(s < 1, a + t, 1.0))
        return np.where(s < 1, (1 - s) / (a + t) - lg * ds, 0.0)

    def apply_m(t):
        t = np.asarray(t, dtype=float)
        s, ds, d2s = smoothstep(t, a)
        lg = np.log(np.where(s < 1, a + t, 1.0))
        out = ((1 - s) / a**2 + 2 * (a - t) * ds / a**2
               - 2 * t / a**2 * lg * ds + _p(t, a) * lg * d2s)
        return np.where(s < 1, out, 0.0)
    return MaxDomainFunction(value, derivative, apply_m, a, "psi_-")


def psi_plus(a: float) -> MaxDomainFunction:
    def value(t):
        t = np.asarray(t, dtype=float)
        s = smoothstep(t, a)[0]
        return np.where(s > 0, np.log(np.where(s > 0, a - t, 1.0)) * s, 0.0)

    def derivative(t):
        t = np.asarray(t, dtype=float)
        s, ds, _ = smoothstep(t, a)
        lg = np.log(np.where(s > 0, a - t, 1.0))
        return np.where(s > 0, -s / (a - t) + lg * ds, 0.0)

    def apply_m(t):
        t = np.asarray(t, dtype=float)
        s, ds, d2s = smoothstep(t, a)
        lg = np.log(np.where(s > 0, a - t, 1.0))
        out = (s / a**2 + 2 * (a + t) * ds / a**2
               + 2 * t / a**2 * lg * ds - _p(t, a) * lg * d2s)
        return np.where(s > 0, out, 0.0)
    return MaxDomainFunction(value, derivative, apply_m, a, "psi_+")


def boundary_basis(a: float) -> list[MaxDomainFunction]:
    """The functions (phi_-, psi_-, phi_+, psi_+) spanning the boundary space."""
    return [phi_minus(a), psi_minus(a), phi_plus(a), psi_plus(a)]


def bump(center: float, width: float, a: float) -> MaxDomainFunction:
    """``exp(1 - 1/(1 - u**2))`` with ``u = (t - center)/width``; value 1 at the centre."""
    def parts(t):
        u = (np.asarray(t, dtype=float) - center) / width
        q = 1 - u * u
        ok = q > _CUTOFF
        qs = np.where(ok, q, 1.0)
        b = np.where(ok, np.exp(1 - 1 / qs), 0.0)
        db = np.where(ok, b * (-2 * u / qs**2), 0.0)
        d2b = np.where(ok, b * (4 * u * u / qs**4 - 2 / qs**2 - 8 * u * u / qs**3), 0.0)
        return b, db / width, d2b / width**2

    f = smooth_function(lambda t: parts(t)[0], lambda t: parts(t)[1], lambda t: parts(t)[2],
                        a, f"bump({center:g})")
    return f
