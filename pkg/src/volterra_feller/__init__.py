"""Boundary attainment tests for one-dimensional stochastic Volterra equations.

The library decides whether solutions of

    X_t = x0 + int_0^t K(t-s) b(X_s) ds + int_0^t K(t-s) sigma(X_s) dW_s

reach the endpoints of their state interval, for nonsingular convolution
kernels K with K(0) finite.  It provides the kernel data (``kernels``), the
resolvent of the first kind used to validate the standing hypotheses
(``resolvent``), scale and test functions (``scale``), the verdict logic
(``feller``), exponential-sum approximations of the fractional kernel
(``fracapprox``), Monte Carlo cross checks (``simulate``) and a command line
front end (``cli``).
"""

from .kernels import (
    ConstantKernel,
    SumOfExponentialsKernel,
    TruncatedFractionalKernel,
    UserKernel,
    kernel_from_dict,
    kernel_to_dict,
)
from .resolvent import ResolventGrid, HypothesisReport, solve_resolvent, check_hypotheses
from .scale import CIRModel, JacobiModel, PowerModel, CustomModel, ScaleContext, LimitResult
from .feller import (
    Boundary,
    Verdict,
    BoundaryVerdict,
    family_test,
    necessary_test,
    sufficient_test,
    bounded_interval_test,
    sup_inf_test,
    fractional_condition_study,
)
from .fracapprox import (
    TruncationScheme,
    QuadratureScheme,
    geometric_nodes,
    truncation_kernel,
    gaussian_quadrature_kernel,
    approximation_error,
)
from .simulate import SimConfig, SimulationReport, simulate, verdict_crosscheck

__all__ = [
    "ConstantKernel",
    "SumOfExponentialsKernel",
    "TruncatedFractionalKernel",
    "UserKernel",
    "kernel_from_dict",
    "kernel_to_dict",
    "ResolventGrid",
    "HypothesisReport",
    "solve_resolvent",
    "check_hypotheses",
    "CIRModel",
    "JacobiModel",
    "PowerModel",
    "CustomModel",
    "ScaleContext",
    "LimitResult",
    "Boundary",
    "Verdict",
    "BoundaryVerdict",
    "family_test",
    "necessary_test",
    "sufficient_test",
    "bounded_interval_test",
    "sup_inf_test",
    "fractional_condition_study",
    "TruncationScheme",
    "QuadratureScheme",
    "geometric_nodes",
    "truncation_kernel",
    "gaussian_quadrature_kernel",
    "approximation_error",
    "SimConfig",
    "SimulationReport",
    "simulate",
    "verdict_crosscheck",
]

__version__ = "0.1.0"
