"""Convolution kernels with finite value and slope at zero.

Every kernel K here is continuously differentiable on (0, infinity) with a
finite right limit K(0) and right derivative K'(0).  Those two scalars are
what the boundary tests consume; the full time profile is only needed by the
resolvent solver and the simulator.

Built-in variants
-----------------
``ConstantKernel``
    K(t) = level.  The classical (memoryless) case.
``SumOfExponentialsKernel``
    K(t) = sum_n m_n exp(-x_n t) with m_n > 0, x_n >= 0.  Completely
    monotone; the image of the quadrature approximations in ``fracapprox``.
``TruncatedFractionalKernel``
    K(t) = int_0^T exp(-x t) x^(-alpha) dx / (Gamma(alpha) Gamma(1-alpha)),
    the fractional kernel t^(alpha-1)/Gamma(alpha) with its Laplace measure
    cut off at T.  Pointwise values come from adaptive quadrature after the
    substitution u = x^(1-alpha), which removes the endpoint singularity.

User-supplied kernels do not get a spec variant: they enter through
``UserKernel`` as plain callables with asserted K(0), K'(0) and an asserted
complete-monotonicity flag, and the caller owns those assertions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericError

__all__ = [
    "lanczos_gamma",
    "ConstantKernel",
    "SumOfExponentialsKernel",
    "TruncatedFractionalKernel",
    "UserKernel",
    "kernel_from_dict",
    "kernel_to_dict",
]


# Lanczos coefficients, g = 7, 9 terms.  Relative error below 1e-13 on the
# range used here (closed-form constants only need arguments in (0, 10]).
_LANCZOS_G = 7.0
_LANCZOS_COEFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def lanczos_gamma(x: float) -> float:
    """Gamma function for positive real arguments.

    Library-internal implementation so the closed-form kernel constants do
    not depend on the same Gamma routine the tests use as an oracle.
    """
    if x <= 0.0:
        raise ValueError(f"gamma argument must be positive, got {x}")
    if x < 0.5:
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * lanczos_gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_COEFS[0]
    for i, c in enumerate(_LANCZOS_COEFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def _as_time_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("kernel time argument must be nonnegative")
    return arr


@dataclass(frozen=True)
class ConstantKernel:
    """K(t) = level with level > 0."""

    level: float

    def __post_init__(self):
        if not (self.level > 0.0 and math.isfinite(self.level)):
            raise ValueError(f"level must be a positive finite real, got {self.level}")

    @property
    def completely_monotone(self) -> bool:
        return True

    def eval(self, t):
        arr = _as_time_array(t)
        out = np.full_like(arr, self.level)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def eval_deriv(self, t):
        arr = _as_time_array(t)
        out = np.zeros_like(arr)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def k0_kprime0(self):
        return self.level, 0.0


@dataclass(frozen=True)
class SumOfExponentialsKernel:
    """K(t) = sum_n weights[n] * exp(-rates[n] * t).

    Parameters
    ----------
    weights : positive reals (kernel stays completely monotone)
    rates : nonnegative reals, one per weight
    """

    weights: tuple
    rates: tuple

    def __post_init__(self):
        w = tuple(float(v) for v in np.atleast_1d(self.weights))
        r = tuple(float(v) for v in np.atleast_1d(self.rates))
        if len(w) != len(r) or not w:
            raise ValueError("weights and rates must be equal-length, nonempty")
        if any(not (v > 0.0 and math.isfinite(v)) for v in w):
            raise ValueError("all weights must be positive finite reals")
        if any(v < 0.0 or not math.isfinite(v) for v in r):
            raise ValueError("all rates must be nonnegative finite reals")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rates", r)

    @property
    def completely_monotone(self) -> bool:
        return True

    def eval(self, t):
        arr = _as_time_array(t)
        w = np.asarray(self.weights)
        r = np.asarray(self.rates)
        out = np.exp(-np.multiply.outer(arr, r)) @ w
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def eval_deriv(self, t):
        arr = _as_time_array(t)
        w = np.asarray(self.weights)
        r = np.asarray(self.rates)
        out = -(np.exp(-np.multiply.outer(arr, r)) @ (w * r))
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def k0_kprime0(self):
        w = np.asarray(self.weights)
        r = np.asarray(self.rates)
        return float(w.sum()), float(-(w * r).sum())


@dataclass(frozen=True)
class TruncatedFractionalKernel:
    """Fractional kernel with Laplace measure truncated at T.

    K(t) = int_0^T exp(-x t) mu(dx),  mu(dx) = x^(-alpha) dx / (Gamma(alpha)
    Gamma(1-alpha)), for alpha in (0, 1) and T > 0.  As T grows, K increases
    pointwise toward the fractional kernel t^(alpha-1)/Gamma(alpha).

    Closed forms used by the tests:

        K(0)  = T^(1-alpha) / (Gamma(alpha) Gamma(2-alpha))
        K'(0) = -T^(2-alpha) / ((2-alpha) Gamma(alpha) Gamma(1-alpha))
    """

    alpha: float
    T: float

    # relative accuracy target for pointwise quadrature
    _QUAD_RTOL = 1e-10

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ValueError(f"T must be a positive finite real, got {self.T}")

    @property
    def completely_monotone(self) -> bool:
        return True

    def _norm(self) -> float:
        return lanczos_gamma(self.alpha) * lanczos_gamma(1.0 - self.alpha)

    def _quad_scalar(self, t: float, moment: int) -> float:
        # int_0^T x^moment exp(-x t) x^(-alpha) dx after u = x^(1-alpha):
        # 1/(1-alpha) int_0^(T^(1-alpha)) u^(moment/(1-alpha)) exp(-t u^(1/(1-alpha))) du
        a = self.alpha
        upper = self.T ** (1.0 - a)
        inv = 1.0 / (1.0 - a)

        def f(u):
            x = u ** inv
            val = math.exp(-t * x)
            if moment:
                val *= x ** moment
            return val

        val, err = integrate.quad(f, 0.0, upper, epsabs=1e-14, epsrel=1e-12, limit=200)
        val *= inv
        err *= inv
        if err > self._QUAD_RTOL * max(abs(val), 1.0):
            raise NumericError(
                "truncated-fractional quadrature did not reach target accuracy",
                achieved=err,
                target=self._QUAD_RTOL * max(abs(val), 1.0),
                t=t,
            )
        return val / self._norm()

    def eval(self, t):
        arr = _as_time_array(t)
        flat = np.atleast_1d(arr).ravel()
        vals = np.array([self._quad_scalar(float(ti), 0) for ti in flat])
        if np.isscalar(t) or arr.ndim == 0:
            return float(vals[0])
        return vals.reshape(arr.shape)

    def eval_deriv(self, t):
        arr = _as_time_array(t)
        flat = np.atleast_1d(arr).ravel()
        vals = np.array([-self._quad_scalar(float(ti), 1) for ti in flat])
        if np.isscalar(t) or arr.ndim == 0:
            return float(vals[0])
        return vals.reshape(arr.shape)

    def k0_kprime0(self):
        a, T = self.alpha, self.T
        k0 = T ** (1.0 - a) / (lanczos_gamma(a) * lanczos_gamma(2.0 - a))
        kp0 = -(T ** (2.0 - a)) / ((2.0 - a) * lanczos_gamma(a) * lanczos_gamma(1.0 - a))
        return k0, kp0


class UserKernel:
    """Caller-supplied kernel entering through the library API only.

    The caller asserts K(0), K'(0) and (optionally) complete monotonicity;
    nothing is verified beyond basic sanity.  ``deriv`` may be omitted, in
    which case K' is approximated by central differences where needed.
    """

    def __init__(self, func, k0, kprime0, deriv=None, completely_monotone=False):
        if not callable(func):
            raise ValueError("func must be callable")
        if not (k0 > 0.0 and math.isfinite(k0)):
            raise ValueError(f"asserted K(0) must be positive finite, got {k0}")
        if not math.isfinite(kprime0):
            raise ValueError(f"asserted K'(0) must be finite, got {kprime0}")
        self._func = func
        self._deriv = deriv
        self._k0 = float(k0)
        self._kprime0 = float(kprime0)
        self._cm = bool(completely_monotone)

    @property
    def completely_monotone(self) -> bool:
        return self._cm

    def eval(self, t):
        arr = _as_time_array(t)
        out = np.asarray(self._func(arr), dtype=float)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def eval_deriv(self, t):
        arr = _as_time_array(t)
        if self._deriv is not None:
            out = np.asarray(self._deriv(arr), dtype=float)
        else:
            h = 1e-6 * max(1.0, float(np.max(arr)) if arr.size else 1.0)
            lo = np.maximum(arr - h, 0.0)
            hi = arr + h
            out = (np.asarray(self._func(hi), dtype=float) - np.asarray(self._func(lo), dtype=float)) / (hi - lo)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def k0_kprime0(self):
        return self._k0, self._kprime0


_TAGS = {
    "constant": ConstantKernel,
    "sumexp": SumOfExponentialsKernel,
    "truncfrac": TruncatedFractionalKernel,
}


def kernel_to_dict(kernel) -> dict:
    """Tagged plain-data record for configs and reports."""
    if isinstance(kernel, ConstantKernel):
        return {"kind": "constant", "level": kernel.level}
    if isinstance(kernel, SumOfExponentialsKernel):
        return {"kind": "sumexp", "weights": list(kernel.weights), "rates": list(kernel.rates)}
    if isinstance(kernel, TruncatedFractionalKernel):
        return {"kind": "truncfrac", "alpha": kernel.alpha, "T": kernel.T}
    raise ValueError(f"kernel of type {type(kernel).__name__} has no serialized form")


def kernel_from_dict(record: dict):
    """Inverse of :func:`kernel_to_dict`.  Unknown tags or fields are errors."""
    if "kind" not in record:
        raise ValueError("kernel record is missing the 'kind' tag")
    kind = record["kind"]
    fields = {k: v for k, v in record.items() if k != "kind"}
    if kind == "constant":
        allowed = {"level"}
    elif kind == "sumexp":
        allowed = {"weights", "rates"}
    elif kind == "truncfrac":
        allowed = {"alpha", "T"}
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    unknown = set(fields) - allowed
    if unknown:
        raise ValueError(f"unknown kernel field(s) {sorted(unknown)} for kind {kind!r}")
    missing = allowed - set(fields)
    if missing:
        raise ValueError(f"missing kernel field(s) {sorted(missing)} for kind {kind!r}")
    return _TAGS[kind](**fields)
