"""Boundary attainment verdicts for stochastic Volterra equations.

Each test turns scale/test-function limits (from :mod:`.scale`) into a
``BoundaryVerdict``.  The verdict vocabulary:

* ``NoExitAS``: the process a.s. never exits through the stated boundary
  (through either one, when the boundary is ``Both``).
* ``ExitsWithPositiveProb``: exit through the stated boundary happens with
  positive probability.
* ``NecessaryHolds``: the divergence condition that no-exit forces is
  satisfied, which by itself decides nothing.
* ``SupBoundedAS`` / ``InfBoundedAS``: the running supremum (infimum) stays
  a.s. below (above) the stated boundary.
* ``Inconclusive``: the computed limits do not decide, or a strong verdict
  was withheld because the standing hypotheses were not certified.

The strong verdicts (everything except ``NecessaryHolds`` and
``Inconclusive``) are only valid under the standing hypotheses on the kernel:
nonnegative resolvent density and a nonpositive, nondecreasing K' * L.  The
tests certify them in one of two ways: the kernel declares itself completely
monotone, or the caller passes a ``HypothesisReport`` from
:func:`.resolvent.check_hypotheses` that passed.  Without either, a strong
verdict is downgraded to ``Inconclusive`` and the raw limit data stays in
``evidence``; the downgrade is visible as ``hypotheses_unverified`` in
``assumptions_checked``.

Evidence entries are (quantity, value, threshold) triples: the quantity name,
its computed value, and the value it was compared against.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from ._quad import panel_nodes
from .errors import NumericError, PreconditionError
from .fracapprox import QuadratureScheme, gaussian_quadrature_kernel, geometric_nodes, truncation_kernel
from .scale import CIRModel, ScaleContext

__all__ = [
    "Boundary",
    "Verdict",
    "BoundaryVerdict",
    "necessary_test",
    "sufficient_test",
    "bounded_interval_test",
    "sup_inf_test",
    "family_test",
    "fractional_condition_study",
]


class Boundary(str, Enum):
    LEFT = "Left"
    RIGHT = "Right"
    BOTH = "Both"


class Verdict(str, Enum):
    NO_EXIT_AS = "NoExitAS"
    EXITS_WITH_POSITIVE_PROB = "ExitsWithPositiveProb"
    NECESSARY_HOLDS = "NecessaryHolds"
    SUP_BOUNDED_AS = "SupBoundedAS"
    INF_BOUNDED_AS = "InfBoundedAS"
    INCONCLUSIVE = "Inconclusive"


_STRONG = frozenset(
    {
        Verdict.NO_EXIT_AS,
        Verdict.EXITS_WITH_POSITIVE_PROB,
        Verdict.SUP_BOUNDED_AS,
        Verdict.INF_BOUNDED_AS,
    }
)


@dataclass(frozen=True)
class BoundaryVerdict:
    """One conclusion about one boundary (or both at once).

    theorem names the rule that produced the verdict; evidence holds the
    (quantity, value, threshold) triples backing it; assumptions_checked
    records which hypothesis certificates were available.
    """

    boundary: Boundary
    verdict: Verdict
    theorem: str
    evidence: tuple
    assumptions_checked: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "verdict", Verdict(self.verdict))
        object.__setattr__(self, "evidence", tuple(tuple(e) for e in self.evidence))
        object.__setattr__(self, "assumptions_checked", tuple(self.assumptions_checked))


# -- hypothesis gating -------------------------------------------------------


def _hypothesis_flags(kernel, hypotheses):
    flags = []
    if getattr(kernel, "completely_monotone", False):
        flags.append("kernel_completely_monotone")
    if hypotheses is not None:
        flags.append("resolvent_check_passed" if hypotheses.passed else "resolvent_check_failed")
    return tuple(flags)


def _certified(flags):
    return "kernel_completely_monotone" in flags or "resolvent_check_passed" in flags


def _finish(boundary, verdict, theorem, evidence, flags):
    # strong conclusions require a hypothesis certificate; everything else
    # passes through untouched
    verdict = Verdict(verdict)
    assumptions = flags
    if verdict in _STRONG and not _certified(flags):
        verdict = Verdict.INCONCLUSIVE
        assumptions = flags + ("hypotheses_unverified",)
    return BoundaryVerdict(boundary, verdict, theorem, tuple(evidence), assumptions)


def _limit_triple(name, lim, cap=1e12):
    """Collapse a LimitResult into an evidence triple."""
    if "exponent" in lim.evidence:
        return (name + " divergence exponent (divergent iff >= 1)",
                float(lim.evidence["exponent"]), 1.0)
    if lim.kind == "divergent":
        return (name, math.inf, cap)
    value = lim.value if lim.value is not None else math.nan
    return (name, float(value), cap)


def _interval_span(model):
    l, r = model.interval
    if math.isfinite(l) and math.isfinite(r):
        return r - l
    return max(1.0, abs(model.x0))


# -- generic tests -----------------------------------------------------------


def necessary_test(ctx, eps_shift=None, hypotheses=None):
    """Check the divergence condition that almost-sure no-exit forces.

    No exit through the left boundary requires the shifted test function
    v_c( . ; -beta) to diverge there for every beta > x0, and symmetrically
    on the right with gamma < x0.  Both limits are evaluated at the nearly
    optimal shifts beta = x0 + eps_shift and gamma = x0 - eps_shift; the
    shifted v is monotone in the shift, so divergence at these shifts covers
    all more extreme ones up to the eps_shift margin.

    A finite limit refutes the necessary condition: exit through that
    boundary has positive probability (hypotheses permitting).  Divergence on
    both sides yields ``NecessaryHolds``, which decides nothing by itself.
    """
    model = ctx.model
    if eps_shift is None:
        eps_shift = 1e-6 * _interval_span(model)
    if not (eps_shift > 0.0 and math.isfinite(eps_shift)):
        raise ValueError(f"eps_shift must be positive and finite, got {eps_shift}")
    x0 = model.x0
    shifted = ctx.with_shifts(-(x0 + eps_shift), -(x0 - eps_shift))
    left = shifted.boundary_limit("left", target="v")
    right = shifted.boundary_limit("right", target="v")
    flags = _hypothesis_flags(ctx.kernel, hypotheses)
    evidence = [
        _limit_triple("v(left+) with shift -(x0+eps)", left),
        _limit_triple("v(right-) with shift -(x0-eps)", right),
        ("eps_shift", float(eps_shift), 0.0),
    ]
    theorem = "shifted-necessary-limit"
    finite_sides = [k for k, lim in (("left", left), ("right", right)) if lim.kind == "finite"]
    if finite_sides:
        boundary = Boundary.BOTH if len(finite_sides) == 2 else (
            Boundary.LEFT if finite_sides[0] == "left" else Boundary.RIGHT
        )
        return _finish(boundary, Verdict.EXITS_WITH_POSITIVE_PROB, theorem, evidence, flags)
    if left.kind == "divergent" and right.kind == "divergent":
        return BoundaryVerdict(Boundary.BOTH, Verdict.NECESSARY_HOLDS, theorem,
                               tuple(evidence), flags)
    return BoundaryVerdict(Boundary.BOTH, Verdict.INCONCLUSIVE, theorem,
                           tuple(evidence), flags)


def _staged_side(ctx, which, n_stages, cap):
    """Evaluate v at base points marching to one boundary, with matched shifts.

    Stage n sits at x_n (geometric approach for finite boundaries, c -+ 2^n
    for infinite ones) and uses the drift shift -x_n.  Sustained, unbounded
    growth of v across stages is the sufficient condition for no exit through
    that boundary.
    """
    l, r = ctx.model.interval
    boundary = l if which == "left" else r
    c = ctx.c
    vals = []
    evidence = []
    inf_streak = 0
    for n in range(1, n_stages + 1):
        if math.isfinite(boundary):
            x_n = boundary + (c - boundary) * 0.5 ** n
        else:
            x_n = c - 2.0 ** n if which == "left" else c + 2.0 ** n
        shift = -x_n
        try:
            val = ctx.with_shifts(shift, shift).v(x_n)
        except NumericError:
            break
        vals.append(val)
        evidence.append((f"v at stage point {x_n:.6g} with shift {shift:.6g}", val, cap))
        inf_streak = inf_streak + 1 if math.isinf(val) else 0
        if inf_streak >= 2:
            break
    if len(vals) < 2:
        return False, evidence
    grows = all(b >= a * (1.0 - 1e-9) for a, b in zip(vals, vals[1:]))
    return grows and vals[-1] >= cap, evidence


def _sufficient_side(ctx, which, n_stages, cap):
    l, r = ctx.model.interval
    boundary = l if which == "left" else r
    evidence = []
    if math.isfinite(boundary):
        # shortcut: divergence of v with the boundary itself as shift already
        # implies the staged condition
        shifted = ctx.with_shifts(-boundary, -boundary)
        lim = shifted.boundary_limit(which, target="v")
        evidence.append(_limit_triple(f"v({which}) with boundary shift {-boundary:.6g}", lim, cap))
        if lim.kind == "divergent":
            return True, evidence
    staged_ok, staged_ev = _staged_side(ctx, which, n_stages, cap)
    return staged_ok, evidence + staged_ev


def sufficient_test(ctx, n_stages=8, cap=1e12, hypotheses=None):
    """Check the staged divergence condition that guarantees no exit.

    If v evaluated at base points x_n marching to a boundary, with drift
    shifts -x_n, grows without bound, the process a.s. never exits through
    that boundary.  Finite boundaries first try the stronger one-shot
    divergence of v under the boundary shift.  Divergence on both sides rules
    out exit entirely.
    """
    if int(n_stages) != n_stages or n_stages < 2:
        raise ValueError("n_stages must be an integer >= 2")
    if not cap > 0.0:
        raise ValueError("cap must be positive")
    n_stages = int(n_stages)
    left_ok, ev_left = _sufficient_side(ctx, "left", n_stages, cap)
    right_ok, ev_right = _sufficient_side(ctx, "right", n_stages, cap)
    flags = _hypothesis_flags(ctx.kernel, hypotheses)
    evidence = ev_left + ev_right
    theorem = "staged-sufficient-divergence"
    if left_ok and right_ok:
        return _finish(Boundary.BOTH, Verdict.NO_EXIT_AS, theorem, evidence, flags)
    if left_ok:
        return _finish(Boundary.LEFT, Verdict.NO_EXIT_AS, theorem, evidence, flags)
    if right_ok:
        return _finish(Boundary.RIGHT, Verdict.NO_EXIT_AS, theorem, evidence, flags)
    return BoundaryVerdict(Boundary.BOTH, Verdict.INCONCLUSIVE, theorem,
                           tuple(evidence), flags)


def _log_sigma_inv_sq_mass(ctx, n_panels, rel_first):
    l, r = ctx.model.interval
    edges = ctx._edges(l, r, n_panels, rel_first)
    pts, log_half, log_w = panel_nodes(edges, 12)
    with np.errstate(divide="ignore"):
        logf = -ctx._log_sigma_tilde_sq(pts)
    return float(logsumexp(logf + log_w + log_half[:, None]))


def _sigma_inv_sq_integrable(ctx):
    """Numerically decide whether 1/sigma~^2 is integrable over (l, r).

    Integrates on edge-graded panels whose first panel shrinks by three
    orders of magnitude per round; a stable total flags integrability, while
    steady growth flags an endpoint divergence.
    """
    masses = [
        _log_sigma_inv_sq_mass(ctx, 256, rel)
        for rel in (1e-6, 1e-9, 1e-12)
    ]
    integrable = abs(masses[-1] - masses[-2]) <= 1e-3
    return integrable, masses


def bounded_interval_test(ctx, hypotheses=None):
    """Two-sided equivalence test on a bounded state interval.

    When the interval is bounded and 1/sigma~^2 is integrable across it, the
    shift terms drop out of the limits and divergence of v at a boundary is
    equivalent to no exit through it: both divergent means no exit at all,
    while a finite limit means exit through that boundary with positive
    probability.  A kernel with K'(0) = 0 makes the shifts vanish identically,
    so the integrability precondition is waived in that case.

    Raises ``PreconditionError`` on unbounded intervals and on
    non-integrable 1/sigma~^2 with K'(0) < 0.
    """
    l, r = ctx.model.interval
    if not (math.isfinite(l) and math.isfinite(r)):
        raise PreconditionError(
            f"bounded_interval_test needs a bounded interval, got ({l}, {r})"
        )
    evidence = []
    if ctx.kprime0 == 0.0:
        evidence.append(("K'(0)", 0.0, 0.0))
    else:
        integrable, masses = _sigma_inv_sq_integrable(ctx)
        evidence.append(("log integral of 1/sigma~^2 (last deepening increment)",
                         abs(masses[-1] - masses[-2]), 1e-3))
        if not integrable:
            raise PreconditionError(
                "1/sigma~^2 is not integrable over the interval; the two-sided "
                "equivalence needs integrability when K'(0) < 0",
                )
    zctx = ctx.with_shifts(0.0, 0.0)
    left = zctx.boundary_limit("left", target="v")
    right = zctx.boundary_limit("right", target="v")
    flags = _hypothesis_flags(ctx.kernel, hypotheses)
    evidence.append(_limit_triple("v(left+)", left))
    evidence.append(_limit_triple("v(right-)", right))
    theorem = "bounded-interval-equivalence"
    finite_sides = [k for k, lim in (("left", left), ("right", right)) if lim.kind == "finite"]
    if finite_sides:
        boundary = Boundary.BOTH if len(finite_sides) == 2 else (
            Boundary.LEFT if finite_sides[0] == "left" else Boundary.RIGHT
        )
        return _finish(boundary, Verdict.EXITS_WITH_POSITIVE_PROB, theorem, evidence, flags)
    if left.kind == "divergent" and right.kind == "divergent":
        return _finish(Boundary.BOTH, Verdict.NO_EXIT_AS, theorem, evidence, flags)
    return BoundaryVerdict(Boundary.BOTH, Verdict.INCONCLUSIVE, theorem,
                           tuple(evidence), flags)


def sup_inf_test(ctx, hypotheses=None):
    """Scale-function test for an a.s. bounded running supremum or infimum.

    The supremum stays below a finite right boundary r when, under the drift
    shift -r, the scale function is finite at the left boundary and divergent
    at the right one; the infimum version mirrors this with shift -l.  Each
    side needs its boundary finite, except that K'(0) = 0 removes the shift
    terms and lets an infinite boundary through with shift 0.

    Raises ``PreconditionError`` when neither side is testable.
    """
    l, r = ctx.model.interval
    classical = ctx.kprime0 == 0.0
    sup_applicable = math.isfinite(r) or classical
    inf_applicable = math.isfinite(l) or classical
    if not (sup_applicable or inf_applicable):
        raise PreconditionError(
            "sup_inf_test needs a finite boundary on the tested side "
            "(or K'(0) = 0)"
        )
    flags = _hypothesis_flags(ctx.kernel, hypotheses)
    evidence = []
    sup_holds = inf_holds = False
    if sup_applicable:
        shift = -r if math.isfinite(r) else 0.0
        sctx = ctx.with_shifts(shift, shift)
        pl = sctx.boundary_limit("left", target="p")
        pr = sctx.boundary_limit("right", target="p")
        evidence.append(_limit_triple(f"|p|(left+) with shift {shift:.6g}", pl))
        evidence.append(_limit_triple(f"|p|(right-) with shift {shift:.6g}", pr))
        sup_holds = pl.kind == "finite" and pr.kind == "divergent"
    if inf_applicable:
        shift = -l if math.isfinite(l) else 0.0
        ictx = ctx.with_shifts(shift, shift)
        ql = ictx.boundary_limit("left", target="p")
        qr = ictx.boundary_limit("right", target="p")
        evidence.append(_limit_triple(f"|p|(left+) with shift {shift:.6g}", ql))
        evidence.append(_limit_triple(f"|p|(right-) with shift {shift:.6g}", qr))
        inf_holds = ql.kind == "divergent" and qr.kind == "finite"
    if sup_holds:
        return _finish(Boundary.RIGHT, Verdict.SUP_BOUNDED_AS,
                       "scale-function-sup-bound", evidence, flags)
    if inf_holds:
        return _finish(Boundary.LEFT, Verdict.INF_BOUNDED_AS,
                       "scale-function-inf-bound", evidence, flags)
    return BoundaryVerdict(Boundary.BOTH, Verdict.INCONCLUSIVE,
                           "scale-function-bounds", tuple(evidence), flags)


# -- closed-form family arithmetic -------------------------------------------


def _cir_verdicts(model, k0, kp0, emit):
    kappa, theta, sigma, x0 = model.kappa, model.theta, model.sigma, model.x0
    suff = 2.0 * kappa * theta - k0 * sigma**2
    if suff >= 0.0:
        emit(Boundary.LEFT, Verdict.NO_EXIT_AS, "cir-sufficient",
             [("2*kappa*theta - K0*sigma^2", suff, 0.0)])
    if kp0 < 0.0:
        thr = k0**2 / (2.0 * abs(kp0)) * (k0 * sigma**2 - 2.0 * kappa * theta)
        tag = "cir-necessary"
        if x0 >= thr:
            emit(Boundary.LEFT, Verdict.NECESSARY_HOLDS, tag, [("x0", x0, thr)])
        else:
            emit(Boundary.LEFT, Verdict.EXITS_WITH_POSITIVE_PROB, tag, [("x0", x0, thr)])
    elif suff < 0.0:
        # constant-slope kernel: the sufficient condition is an equivalence,
        # and its failure also pins the supremum below any level
        emit(Boundary.LEFT, Verdict.EXITS_WITH_POSITIVE_PROB, "cir-classical-iff",
             [("2*kappa*theta - K0*sigma^2", suff, 0.0)])
        emit(Boundary.RIGHT, Verdict.SUP_BOUNDED_AS, "cir-classical-sup-bound",
             [("2*kappa*theta - K0*sigma^2", suff, 0.0)])


def _jacobi_verdicts(model, k0, kp0, emit):
    a, b = model.a, model.b
    kappa, theta, sigma, x0 = model.kappa, model.theta, model.sigma, model.x0
    width = b - a
    suff_l = 2.0 * kappa * (theta - a) - k0 * sigma**2 * width
    suff_r = 2.0 * kappa * (b - theta) - k0 * sigma**2 * width
    if suff_l >= 0.0:
        emit(Boundary.LEFT, Verdict.NO_EXIT_AS, "jacobi-sufficient",
             [("2*kappa*(theta-a) - K0*sigma^2*(b-a)", suff_l, 0.0)])
    if suff_r >= 0.0:
        emit(Boundary.RIGHT, Verdict.NO_EXIT_AS, "jacobi-sufficient",
             [("2*kappa*(b-theta) - K0*sigma^2*(b-a)", suff_r, 0.0)])
    if kp0 < 0.0:
        scale = k0**2 / (2.0 * abs(kp0))
        thr_l = a + scale * (k0 * sigma**2 * width - 2.0 * kappa * (theta - a))
        thr_r = b - scale * (k0 * sigma**2 * width - 2.0 * kappa * (b - theta))
        if x0 >= thr_l:
            emit(Boundary.LEFT, Verdict.NECESSARY_HOLDS, "jacobi-necessary",
                 [("x0", x0, thr_l)])
        else:
            emit(Boundary.LEFT, Verdict.EXITS_WITH_POSITIVE_PROB, "jacobi-necessary",
                 [("x0", x0, thr_l)])
        if x0 <= thr_r:
            emit(Boundary.RIGHT, Verdict.NECESSARY_HOLDS, "jacobi-necessary",
                 [("x0", x0, thr_r)])
        else:
            emit(Boundary.RIGHT, Verdict.EXITS_WITH_POSITIVE_PROB, "jacobi-necessary",
                 [("x0", x0, thr_r)])
    else:
        if suff_l < 0.0:
            emit(Boundary.LEFT, Verdict.EXITS_WITH_POSITIVE_PROB, "jacobi-classical-iff",
                 [("2*kappa*(theta-a) - K0*sigma^2*(b-a)", suff_l, 0.0)])
        if suff_r < 0.0:
            emit(Boundary.RIGHT, Verdict.EXITS_WITH_POSITIVE_PROB, "jacobi-classical-iff",
                 [("2*kappa*(b-theta) - K0*sigma^2*(b-a)", suff_r, 0.0)])
    # localized bounds: one endpoint repelling strongly enough while the
    # other attracts keeps the extreme of the path short of the far endpoint
    drift_cap = (k0 * sigma**2 - 2.0 * abs(kp0) / k0**2) * width
    if suff_r >= 0.0 and 2.0 * kappa * (theta - a) < drift_cap:
        emit(Boundary.RIGHT, Verdict.SUP_BOUNDED_AS, "jacobi-sup-bound",
             [("2*kappa*(theta-a)", 2.0 * kappa * (theta - a), drift_cap)])
    if suff_l >= 0.0 and 2.0 * kappa * (b - theta) < drift_cap:
        emit(Boundary.LEFT, Verdict.INF_BOUNDED_AS, "jacobi-inf-bound",
             [("2*kappa*(b-theta)", 2.0 * kappa * (b - theta), drift_cap)])


def _power_verdicts(model, k0, kp0, emit):
    alpha, delta = model.alpha, model.delta
    emit(Boundary.LEFT, Verdict.NO_EXIT_AS, "power-no-left-blowup",
         [("alpha", alpha, 1.0)])
    margin = alpha - (1.0 + delta)
    if margin > 0.0:
        emit(Boundary.RIGHT, Verdict.EXITS_WITH_POSITIVE_PROB, "power-right-blowup",
             [("alpha - (1 + delta)", margin, 0.0)])
    else:
        emit(Boundary.RIGHT, Verdict.INCONCLUSIVE, "power-right-blowup",
             [("alpha - (1 + delta)", margin, 0.0)])


def family_test(model, kernel, hypotheses=None):
    """Closed-form verdict list for the built-in model families.

    Evaluates the family's printed inequalities (square-root, bounded-interval
    square-root, superlinear power drift) at the kernel scalars K(0), K'(0)
    and returns every conclusion they support.  Equality counts as satisfied
    for the square-root families; the power blow-up needs a strict margin.
    """
    family = getattr(model, "family", None)
    if family not in ("cir", "jacobi", "power"):
        raise PreconditionError(
            f"family_test covers the cir/jacobi/power families, got {family!r}"
        )
    k0, kp0 = kernel.k0_kprime0()
    if not k0 > 0.0:
        raise ValueError(f"K(0) must be positive, got {k0}")
    if kp0 > 0.0:
        raise ValueError(f"K'(0) must be nonpositive, got {kp0}")
    flags = _hypothesis_flags(kernel, hypotheses)
    out = []

    def emit(boundary, verdict, theorem, evidence):
        out.append(_finish(boundary, verdict, theorem, evidence, flags))

    if family == "cir":
        _cir_verdicts(model, k0, kp0, emit)
    elif family == "jacobi":
        _jacobi_verdicts(model, k0, kp0, emit)
    else:
        _power_verdicts(model, k0, kp0, emit)
    return out


# -- fractional approximation study ------------------------------------------

_STUDY_SCHEMES = ("truncation", "fractional", "geometric_bb2")


def _study_regime(scheme, alpha):
    if scheme == "geometric_bb2":
        return "necessary threshold diverges with ladder length for every alpha"
    grows = "T" if scheme == "truncation" else "ladder length"
    if alpha < 0.5:
        return f"necessary threshold diverges with {grows}"
    if alpha > 0.5:
        return f"necessary threshold vanishes with {grows}"
    return "borderline alpha = 1/2"


def fractional_condition_study(model, alpha, sweep, scheme="truncation",
                               q=1, ratio=6.4, xi1=1.0):
    """Tabulate the square-root-model conditions along a kernel sweep.

    For each sweep value, builds the requested fractional-kernel stand-in
    (``truncation``: sweep over the cap T; ``fractional`` /
    ``geometric_bb2``: sweep over the number of geometric quadrature
    intervals) and reports K(0), K'(0), the necessary-condition threshold

        sigma^2 K(0)^3 / (2 |K'(0)|) - kappa theta K(0)^2 / |K'(0)|

    (the x0 level below which exit through 0 has positive probability) and
    the sufficient-condition gap 2 kappa theta - K(0) sigma^2.  The regime
    column states how the threshold behaves as the sweep grows: it diverges
    for alpha < 1/2 and vanishes for alpha > 1/2 under truncation and the
    fractional-weight quadrature, and diverges for every alpha under the
    geometric_bb2 weighting.
    """
    if not isinstance(model, CIRModel):
        raise PreconditionError("fractional_condition_study needs a square-root model")
    if scheme not in _STUDY_SCHEMES:
        raise ValueError(f"scheme must be one of {_STUDY_SCHEMES}, got {scheme!r}")
    values = list(np.atleast_1d(np.asarray(sweep, dtype=float)))
    if not values:
        raise ValueError("sweep must be nonempty")
    regime = _study_regime(scheme, alpha)
    rows = []
    for value in values:
        if scheme == "truncation":
            kernel = truncation_kernel(alpha, float(value))
        else:
            n_intervals = int(value)
            if n_intervals != value or n_intervals < 1:
                raise ValueError(f"interval counts must be positive integers, got {value}")
            weight = "fractional" if scheme == "fractional" else "geometric_bb2"
            nodes = geometric_nodes(n_intervals, ratio=ratio, xi1=xi1)
            kernel = gaussian_quadrature_kernel(
                QuadratureScheme(alpha, nodes, q=q, weight=weight)
            )
        k0, kp0 = kernel.k0_kprime0()
        gap = 2.0 * model.kappa * model.theta - k0 * model.sigma**2
        if kp0 < 0.0:
            threshold = (model.sigma**2 * k0**3 / 2.0
                         - model.kappa * model.theta * k0**2) / abs(kp0)
        else:
            # no slope: exit does not depend on x0 at all
            threshold = math.inf if gap < 0.0 else -math.inf
        rows.append(
            {
                "sweep": float(value),
                "k0": float(k0),
                "kprime0": float(kp0),
                "necessary_threshold": float(threshold),
                "sufficient_gap": float(gap),
                "regime": regime,
            }
        )
    return rows
