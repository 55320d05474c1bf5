"""Nonsingular stand-ins for the fractional kernel t**(alpha-1)/Gamma(alpha).

The singular fractional kernel sits outside the scope of the boundary tests,
which need K(0) finite.  Two approximation routes bring it back in:

* truncation: freeze the kernel left of a cap T, i.e. K(t) = K_frac(max(t, T))
  rescaled so the cap point is T**(alpha-1)/Gamma(alpha).  Handled by
  ``TruncatedFractionalKernel`` in :mod:`.kernels`; ``TruncationScheme`` is the
  declarative wrapper used by the study driver and the CLI.

* quadrature: write K_frac as a Laplace transform of the measure
  x**(-alpha)/(Gamma(alpha)Gamma(1-alpha)) dx and apply interval-wise Gauss
  rules on a geometric ladder xi_0 = 0 < xi_1 < xi_1*r < ... < xi_1*r**(N-1).
  Each interval contributes q nodes/masses, and the result is a
  ``SumOfExponentialsKernel``.  The ``geometric_bb2`` weight variant keeps the
  fractional weight only on the first interval and uses the flat weight dx on
  the rest, which changes how K(0) and K'(0) scale with the ladder length.

Gauss rules are built from power moments of the weight on each interval.  The
moments have closed forms, but the Hankel reduction is ill conditioned in
float64 well before q = 12, so the linear algebra runs in mpmath at 60 digits
and only the final nodes and masses are rounded back to float.
"""

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .errors import NumericError
from .kernels import SumOfExponentialsKernel, TruncatedFractionalKernel, lanczos_gamma

__all__ = [
    "TruncationScheme",
    "QuadratureScheme",
    "geometric_nodes",
    "truncation_kernel",
    "gaussian_quadrature_kernel",
    "approximation_error",
]

_WEIGHT_KINDS = ("fractional", "geometric_bb2")
_MAX_NODES_PER_INTERVAL = 12


@dataclass(frozen=True)
class TruncationScheme:
    """Truncate the fractional kernel at lag T; see ``TruncatedFractionalKernel``."""

    alpha: float
    T: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ValueError("truncation lag T must be positive and finite")


@dataclass(frozen=True)
class QuadratureScheme:
    """Interval-wise Gauss discretization of the Laplace representation.

    Parameters
    ----------
    alpha : fractional index in (0, 1).
    nodes : increasing breakpoints xi_0 <= xi_1 <= ... of the rate axis,
        xi_0 >= 0.  Use :func:`geometric_nodes` for the standard ladder.
    q : Gauss nodes per interval, 1 <= q <= 12.
    weight : "fractional" applies the measure x**(-alpha) dx / (Gamma(alpha)
        Gamma(1-alpha)) on every interval; "geometric_bb2" applies it on the
        first interval only and the flat measure dx on the others, and
        requires xi_0 = 0.
    """

    alpha: float
    nodes: tuple
    q: int = 1
    weight: str = "fractional"

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        pts = tuple(float(v) for v in np.atleast_1d(self.nodes))
        if len(pts) < 2:
            raise ValueError("need at least two breakpoints (one interval)")
        if pts[0] < 0.0 or not all(map(math.isfinite, pts)):
            raise ValueError("breakpoints must be finite and nonnegative")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not (1 <= int(self.q) <= _MAX_NODES_PER_INTERVAL):
            raise ValueError("q must be an integer in [1, %d]" % _MAX_NODES_PER_INTERVAL)
        if self.weight not in _WEIGHT_KINDS:
            raise ValueError("weight must be one of %s" % (_WEIGHT_KINDS,))
        if self.weight == "geometric_bb2" and pts[0] != 0.0:
            raise ValueError("geometric_bb2 expects the ladder to start at 0")
        object.__setattr__(self, "nodes", pts)
        object.__setattr__(self, "q", int(self.q))

    @property
    def n_intervals(self):
        return len(self.nodes) - 1


def geometric_nodes(n_intervals, ratio=6.4, xi1=1.0):
    """Breakpoints 0, xi1, xi1*ratio, ..., xi1*ratio**(n_intervals-1).

    The first interval [0, xi1] absorbs the integrable singularity of the
    fractional weight at 0; the remaining ones grow geometrically so the far
    rates (short-time behaviour of the kernel) are covered with few intervals.
    """
    if int(n_intervals) != n_intervals or n_intervals < 1:
        raise ValueError("n_intervals must be a positive integer")
    if not (ratio > 1.0 and math.isfinite(ratio)):
        raise ValueError("ratio must exceed 1")
    if not (xi1 > 0.0 and math.isfinite(xi1)):
        raise ValueError("xi1 must be positive and finite")
    pts = [0.0]
    for n in range(int(n_intervals)):
        pts.append(xi1 * ratio ** n)
    return tuple(pts)


def truncation_kernel(alpha, T=None):
    """Kernel for ``TruncationScheme(alpha, T)``; accepts the scheme itself too."""
    if isinstance(alpha, TruncationScheme):
        scheme = alpha
        return TruncatedFractionalKernel(scheme.alpha, scheme.T)
    if T is None:
        raise ValueError("T is required when alpha is given as a number")
    return TruncatedFractionalKernel(float(alpha), float(T))


def _interval_moments(alpha, lo, hi, count, fractional):
    """Power moments int_lo^hi x**k w(x) dx for k = 0..count-1, as mpf."""
    lo = mp.mpf(lo)
    hi = mp.mpf(hi)
    out = []
    if fractional:
        # w(x) = x**(-alpha) / (Gamma(alpha) Gamma(1-alpha)); the product of
        # gammas is pi / sin(pi alpha).
        norm = mp.sin(mp.pi * mp.mpf(alpha)) / mp.pi
        for k in range(count):
            p = k + 1 - mp.mpf(alpha)
            out.append(norm * (hi ** p - lo ** p) / p)
    else:
        for k in range(count):
            out.append((hi ** (k + 1) - lo ** (k + 1)) / (k + 1))
    return out


def _gauss_rule(mus, lo, hi):
    """q-point Gauss rule from the moments mu_0..mu_2q of a weight on [lo, hi].

    Classical Hankel route: Cholesky of the moment matrix gives the three-term
    recurrence, whose Jacobi matrix is symmetrized and diagonalized.  Nodes are
    the eigenvalues, masses mu_0 times the squared first eigenvector entries.
    """
    q = (len(mus) - 1) // 2
    H = mp.matrix(q + 1, q + 1)
    for i in range(q + 1):
        for j in range(q + 1):
            H[i, j] = mus[i + j]
    try:
        L = mp.cholesky(H)
    except Exception as exc:
        raise NumericError(
            "moment matrix is numerically singular; reduce q or split the interval",
            interval=(float(lo), float(hi)),
            q=q,
        ) from exc
    # recurrence coefficients a_j (diagonal) and b_j (offdiagonal) from L
    a = []
    b = []
    for j in range(q):
        prev = L[j, j - 1] / L[j - 1, j - 1] if j > 0 else mp.mpf(0)
        a.append(L[j + 1, j] / L[j, j] - prev)
        if j > 0:
            b.append(L[j, j] / L[j - 1, j - 1])
    J = mp.matrix(q, q)
    for j in range(q):
        J[j, j] = a[j]
    for j in range(q - 1):
        J[j, j + 1] = b[j]
        J[j + 1, j] = b[j]
    eigvals, eigvecs = mp.eigsy(J)
    nodes = [float(eigvals[i]) for i in range(q)]
    masses = [float(mus[0] * eigvecs[0, i] ** 2) for i in range(q)]
    return nodes, masses


def gaussian_quadrature_kernel(scheme):
    """Sum-of-exponentials kernel carrying the per-interval Gauss rules.

    Raises ``NumericError`` if any mass fails to be strictly positive or a
    node escapes its interval, both of which signal a degenerate moment
    problem rather than a representable kernel.
    """
    if not isinstance(scheme, QuadratureScheme):
        raise TypeError("gaussian_quadrature_kernel expects a QuadratureScheme")
    all_rates = []
    all_weights = []
    with mp.workdps(60):
        for n in range(scheme.n_intervals):
            lo, hi = scheme.nodes[n], scheme.nodes[n + 1]
            fractional = scheme.weight == "fractional" or n == 0
            mus = _interval_moments(scheme.alpha, lo, hi, 2 * scheme.q + 1, fractional)
            nodes, masses = _gauss_rule(mus, lo, hi)
            slack = 1e-12 * (hi - lo)
            for x, m in zip(nodes, masses):
                if not m > 0.0:
                    raise NumericError(
                        "Gauss mass is not positive; reduce q",
                        interval=(lo, hi), node=x, mass=m,
                    )
                if x < lo - slack or x > hi + slack:
                    raise NumericError(
                        "Gauss node escaped its interval; reduce q",
                        interval=(lo, hi), node=x,
                    )
                all_rates.append(min(max(x, lo), hi))
                all_weights.append(m)
    return SumOfExponentialsKernel(weights=tuple(all_weights), rates=tuple(all_rates))


def _kernel_for(scheme):
    if isinstance(scheme, TruncationScheme):
        return truncation_kernel(scheme)
    if isinstance(scheme, QuadratureScheme):
        return gaussian_quadrature_kernel(scheme)
    raise TypeError("scheme must be a TruncationScheme or QuadratureScheme")


def approximation_error(scheme, t_grid):
    """Pointwise comparison against t**(alpha-1)/Gamma(alpha) on a lag grid.

    Returns one row per lag with the approximate value, the exact fractional
    kernel, and absolute/relative errors.  Lags must be strictly positive; the
    fractional kernel has no value at 0.
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.size == 0:
        raise ValueError("t_grid must be nonempty")
    if np.any(~np.isfinite(t)) or np.any(t <= 0.0):
        raise ValueError("lags must be finite and strictly positive")
    kernel = _kernel_for(scheme)
    galpha = lanczos_gamma(scheme.alpha)
    rows = []
    for ti in t:
        approx = kernel.eval(ti)
        exact = ti ** (scheme.alpha - 1.0) / galpha
        err = approx - exact
        rows.append({
            "t": float(ti),
            "approx": float(approx),
            "exact": float(exact),
            "abs_error": float(abs(err)),
            "rel_error": float(abs(err) / abs(exact)),
        })
    return rows
