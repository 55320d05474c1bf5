import math

import numpy as np
import pytest
from scipy.integrate import quad

from volterra_feller import (
    CIRModel,
    ConstantKernel,
    CustomModel,
    JacobiModel,
    PowerModel,
    ScaleContext,
    SumOfExponentialsKernel,
)
from volterra_feller.errors import PreconditionError


# ---------------------------------------------------------------- models


def test_cir_model_basics():
    m = CIRModel(kappa=1.0, theta=0.5, sigma=2.0, x0=0.3)
    assert m.interval == (0.0, math.inf)
    assert m.drift(0.25) == pytest.approx(0.25)
    assert m.diffusion(0.25) == pytest.approx(1.0)
    np.testing.assert_array_equal(m.truncate(np.array([-1.0, 0.5])), [0.0, 0.5])


def test_cir_model_validation_names_offending_field():
    with pytest.raises(ValueError, match="kappa"):
        CIRModel(kappa=-1.0, theta=1.0, sigma=1.0, x0=0.5)
    with pytest.raises(ValueError, match="sigma"):
        CIRModel(kappa=1.0, theta=1.0, sigma=0.0, x0=0.5)
    with pytest.raises(ValueError, match="x0"):
        CIRModel(kappa=1.0, theta=1.0, sigma=1.0, x0=-0.5)


def test_jacobi_model_basics_and_validation():
    m = JacobiModel(a=-1.0, b=3.0, kappa=2.0, theta=1.0, sigma=0.5, x0=0.0)
    assert m.interval == (-1.0, 3.0)
    assert m.diffusion(1.0) == pytest.approx(0.5 * math.sqrt(2.0 * 2.0))
    with pytest.raises(ValueError):
        JacobiModel(a=1.0, b=1.0, kappa=1.0, theta=1.0, sigma=1.0, x0=1.0)
    with pytest.raises(ValueError, match="theta"):
        JacobiModel(a=0.0, b=1.0, kappa=1.0, theta=2.0, sigma=1.0, x0=0.5)


def test_power_model_basics_and_validation():
    m = PowerModel(alpha=1.5, delta=0.75, sigma=1.0, x0=2.0)
    assert m.interval == (-math.inf, math.inf)
    assert m.drift(-2.0) == pytest.approx(2.0**1.5)  # b(x) = |x|^alpha
    assert m.diffusion(-3.0) == pytest.approx(3.0**0.375)  # sig |x|^(delta/2)
    with pytest.raises(ValueError, match="alpha"):
        PowerModel(alpha=0.9, delta=0.5, sigma=1.0, x0=0.0)
    with pytest.raises(ValueError, match="delta"):
        PowerModel(alpha=1.5, delta=1.0, sigma=1.0, x0=0.0)


def test_custom_model_wraps_callables():
    m = CustomModel(lambda x: -x, lambda x: np.ones_like(x), (-2.0, 2.0), 0.0)
    assert m.interval == (-2.0, 2.0)
    assert m.drift(1.5) == pytest.approx(-1.5)
    with pytest.raises(ValueError, match="x0"):
        CustomModel(lambda x: x, lambda x: x, (0.0, 1.0), 2.0)


# ---------------------------------------------------------------- context


def test_context_rejects_bad_kernel_scalars(cir_111):
    increasing = SumOfExponentialsKernel([1.0], [1.0])
    object.__setattr__(increasing, "weights", (1.0,))  # keep frozen dataclass happy

    class Rising:
        completely_monotone = False

        def k0_kprime0(self):
            return (1.0, 0.5)

    with pytest.raises(ValueError, match="K'"):
        ScaleContext(cir_111, Rising())


def test_context_defaults_and_immutability(cir_ctx):
    assert cir_ctx.c == 1.0  # defaults to x0
    shifted = cir_ctx.with_shifts(0.2, -0.1)
    assert (shifted.beta, shifted.gamma) == (0.2, -0.1)
    assert (cir_ctx.beta, cir_ctx.gamma) == (0.0, 0.0)
    moved = cir_ctx.with_base(0.5)
    assert moved.c == 0.5 and cir_ctx.c == 1.0


def test_modified_coefficients_with_sloped_kernel(cir_111, sloped_kernel):
    ctx = ScaleContext(cir_111, sloped_kernel, beta=0.3, gamma=-0.2)
    # b~(x) = K0 b(x) + (Kp0/K0) x with K0=1, Kp0=-1
    assert ctx.b_tilde(0.5) == pytest.approx(cir_111.drift(0.5) - 0.5)
    # below c the beta shift applies, above c the gamma shift
    assert ctx.b_tilde_shifted(0.5) == pytest.approx(ctx.b_tilde(0.5) - 0.3)
    assert ctx.b_tilde_shifted(1.5) == pytest.approx(ctx.b_tilde(1.5) + 0.2)
    assert ctx.sigma_tilde_sq(0.25) == pytest.approx(0.25)


# ------------------------------------------------------- scale function p


def test_cir_scale_derivative_closed_form(cir_ctx):
    # CIR(1,1,1), K==1, c=1: p'(x) = x^{-2} e^{2(x-1)}
    for x in [0.25, 0.5, 1.0, 1.7, 3.0]:
        want = x**-2 * math.exp(2.0 * (x - 1.0))
        assert cir_ctx.scale_derivative(x) == pytest.approx(want, rel=1e-12)
    assert cir_ctx.scale_derivative(0.5) == pytest.approx(4.0 / math.e, rel=1e-12)


def test_scale_matches_quad_oracle(cir_ctx):
    for x in [0.3, 0.8, 1.6]:
        want, err = quad(cir_ctx.scale_derivative, 1.0, x)
        assert cir_ctx.scale(x) == pytest.approx(want, rel=1e-8, abs=2.0 * abs(err))
    assert cir_ctx.scale(1.0) == 0.0


def test_scale_strictly_increasing(cir_ctx):
    xs = np.linspace(0.05, 4.0, 40)
    ps = [cir_ctx.scale(x) for x in xs]
    assert all(b > a for a, b in zip(ps, ps[1:]))


def test_jacobi_scale_against_quad_oracle(jacobi_unit, sloped_kernel):
    ctx = ScaleContext(jacobi_unit, sloped_kernel, beta=0.1, gamma=-0.3)
    for x in [0.1, 0.35, 0.62, 0.9]:
        want, err = quad(ctx.scale_derivative, ctx.c, x, limit=200)
        assert ctx.scale(x) == pytest.approx(want, rel=1e-7, abs=2.0 * abs(err))


# ---------------------------------------------------------- test function v


def _v_oracle(ctx, x):
    # v(x) = int_c^x p'(y) int_c^y 2 / (p' sig~^2) dz dy by nested quadrature
    def inner(y):
        val, _ = quad(
            lambda z: 2.0 / (ctx.scale_derivative(z) * ctx.sigma_tilde_sq(z)),
            ctx.c,
            y,
            limit=200,
        )
        return val

    val, _ = quad(lambda y: ctx.scale_derivative(y) * inner(y), ctx.c, x, limit=100)
    return val


def test_v_matches_nested_quad_oracle(cir_ctx):
    for x in [0.5, 1.8]:
        assert cir_ctx.v(x) == pytest.approx(_v_oracle(cir_ctx, x), rel=1e-6)
    assert cir_ctx.v(1.0) == 0.0


def test_v_nonnegative_and_grows_from_base(cir_ctx):
    xs = [0.2, 0.6, 0.9, 1.1, 1.5, 2.5]
    vals = [cir_ctx.v(x) for x in xs]
    assert all(v >= 0.0 for v in vals)
    assert vals[0] > vals[1] > vals[2]  # decreasing toward c from the left
    assert vals[3] < vals[4] < vals[5]


def test_v_with_shifts_matches_oracle(cir_111, sloped_kernel):
    ctx = ScaleContext(cir_111, sloped_kernel, beta=0.5, gamma=-0.5)
    for x in [0.6, 1.5]:
        assert ctx.v(x) == pytest.approx(_v_oracle(ctx, x), rel=1e-6)


def test_v_prime_is_derivative_of_v(cir_ctx):
    h = 1e-5
    for x in [0.7, 1.4]:
        fd = (cir_ctx.v(x + h) - cir_ctx.v(x - h)) / (2.0 * h)
        assert cir_ctx.v_prime(x) == pytest.approx(fd, rel=1e-5)


# ----------------------------------------------------------------- u-series


def test_u_series_constant_coefficient_anchor():
    # b = 0, sig~ = 1 on R: u'' = 2u, u(0)=1, u'(0)=0 -> u(1) = cosh(sqrt 2)
    m = CustomModel(
        lambda x: np.zeros_like(x),
        lambda x: np.ones_like(x),
        (-math.inf, math.inf),
        0.0,
    )
    ctx = ScaleContext(m, ConstantKernel(1.0), c=0.0)
    assert ctx.u_series(1.0, n_terms=12) == pytest.approx(math.cosh(math.sqrt(2.0)), rel=1e-9)


def test_u_series_sandwich(cir_ctx):
    for x in [0.4, 0.9, 1.3, 2.0]:
        v = cir_ctx.v(x)
        u = cir_ctx.u_series(x, n_terms=8)
        assert 1.0 + v <= u * (1.0 + 1e-12) + 1e-12
        assert u <= math.exp(v) * (1.0 + 1e-12)


def test_u_series_at_base_is_one(cir_ctx):
    assert cir_ctx.u_series(1.0) == pytest.approx(1.0, abs=1e-15)


# ----------------------------------------------------------- boundary limits


def test_cir_left_limit_exponent_rule(unit_kernel):
    # v_1(0+) diverges iff 2 kappa theta / sigma^2 >= 1 for K == 1
    div = ScaleContext(CIRModel(1.0, 1.0, 1.0, 1.0), unit_kernel)
    res = div.boundary_limit("left")
    assert res.kind == "divergent"
    assert res.evidence["exponent"] == pytest.approx(2.0)

    fin = ScaleContext(CIRModel(1.0, 0.125, 1.0, 1.0), unit_kernel)
    res = fin.boundary_limit("left")
    assert res.kind == "finite"
    assert res.evidence["exponent"] == pytest.approx(0.25)
    assert math.isfinite(res.value)


def test_cir_right_limit_always_divergent(cir_ctx):
    assert cir_ctx.boundary_limit("right").kind == "divergent"


def test_power_right_limit_strict_rule(unit_kernel):
    grows = ScaleContext(PowerModel(2.0, 0.5, 1.0, 1.0), unit_kernel)
    res = grows.boundary_limit("right", target="v")
    assert res.kind == "finite"
    assert res.evidence["rule"] == "alpha > 1 + delta"
    # below the strict margin no closed rule decides
    tame = ScaleContext(PowerModel(1.2, 0.5, 1.0, 1.0), unit_kernel)
    assert tame.boundary_limit("right", target="v", method="closed").kind == "inconclusive"
    assert ScaleContext(PowerModel(1.2, 0.5, 1.0, 1.0), unit_kernel).boundary_limit(
        "left", target="v"
    ).kind == "divergent"


def test_sampled_divergence_on_custom_model():
    # b = 0, sig = 1 on R: v(x) = x^2, divergent at +inf
    m = CustomModel(lambda x: np.zeros_like(x), lambda x: np.ones_like(x), (-math.inf, math.inf), 0.0)
    ctx = ScaleContext(m, ConstantKernel(1.0))
    assert ctx.v(3.0) == pytest.approx(9.0, rel=1e-9)
    assert ctx.boundary_limit("right", method="sample").kind == "divergent"


def test_sampled_limit_agrees_with_closed_on_cir(unit_kernel):
    for theta in [0.125, 1.0]:
        ctx = ScaleContext(CIRModel(1.0, theta, 1.0, 1.0), unit_kernel)
        closed = ctx.boundary_limit("left", method="closed")
        sampled = ctx.boundary_limit("left", method="sample")
        assert sampled.kind == closed.kind


def test_sampled_limit_on_custom_model():
    # strong inward drift on a bounded interval: v finite at both ends
    m = CustomModel(lambda x: -x, lambda x: np.ones_like(x), (-5.0, 5.0), 0.0)
    ctx = ScaleContext(m, ConstantKernel(1.0))
    res = ctx.boundary_limit("right", method="sample")
    assert res.kind == "finite"
    with pytest.raises(PreconditionError):
        ctx.boundary_limit("right", method="closed")


def test_boundary_limit_argument_validation(cir_ctx):
    with pytest.raises(ValueError):
        cir_ctx.boundary_limit("up")
    with pytest.raises(ValueError):
        cir_ctx.boundary_limit("left", target="w")
    with pytest.raises(ValueError):
        cir_ctx.boundary_limit("left", method="guess")


# ------------------------------------------------------- change of base point


def test_change_of_base_identities(cir_ctx):
    c1, c2 = 0.5, 1.5
    beta, gamma = 0.15, -0.25
    lo = cir_ctx.with_base(c1).with_shifts(beta, gamma)
    hi = cir_ctx.with_base(c2).with_shifts(beta, gamma)
    for x in np.linspace(0.05, 0.45, 5):
        want = hi.scale(c1) + hi.scale_derivative(c1) * lo.scale(x)
        assert hi.scale(x) == pytest.approx(want, rel=1e-9)
        want_v = hi.v(c1) + lo.scale(x) * hi.v_prime(c1) + lo.v(x)
        assert hi.v(x) == pytest.approx(want_v, rel=1e-7)
    for x in np.linspace(1.55, 2.4, 5):
        want = lo.scale(c2) + lo.scale_derivative(c2) * hi.scale(x)
        assert lo.scale(x) == pytest.approx(want, rel=1e-9)
        want_v = lo.v(c2) + hi.scale(x) * lo.v_prime(c2) + hi.v(x)
        assert lo.v(x) == pytest.approx(want_v, rel=1e-7)
