"""Abel averages of operator powers and semigroups.

Computes the discrete Abel average A_alpha = (1 - alpha)(I - alpha T)^(-1)
and its continuous counterpart lambda (lambda I - B)^(-1), iterates their
powers toward the ergodic (Riesz) projection at the eigenvalue 1, and
certifies power convergence against the equivalent spectral criterion:
spectrum in the half-plane {Re <= 1} together with the direct sum
Ker(I - T) + Im(I - T) of kernel and image.
"""

from .abel import (
    abel_average,
    abel_series_partial,
    alpha_sweep,
    cesaro_average,
    in_half_plane_pi,
    in_omega_alpha,
    power_iterate,
    riesz_projection_at_one,
    spectral_map,
)
from .certify import (
    check_power_convergence,
    check_power_growth,
    check_spectral_condition,
    generate_instances,
    kernel_image_transfer_check,
    verify_equivalence,
)
from .oscillator import (
    DiagonalOscillator,
    c_constant,
    eigen_residual,
    first_order_gap,
    hermite_function,
    kernel_image_decomposition_check,
    scaled_resolvent_power_gap,
)
from .semigroup import (
    QuadratureSpec,
    abel_average_closed,
    abel_average_quadrature,
    abel_power_quadrature,
    discrete_bridge,
    ergodic_projection_continuous,
    growth_log_norm,
    laguerre_rule,
    semigroup_at,
)

__version__ = "0.1.0"

__all__ = [
    "DiagonalOscillator",
    "QuadratureSpec",
    "abel_average",
    "abel_average_closed",
    "abel_average_quadrature",
    "abel_power_quadrature",
    "abel_series_partial",
    "alpha_sweep",
    "c_constant",
    "cesaro_average",
    "check_power_convergence",
    "check_power_growth",
    "check_spectral_condition",
    "discrete_bridge",
    "eigen_residual",
    "ergodic_projection_continuous",
    "first_order_gap",
    "generate_instances",
    "growth_log_norm",
    "hermite_function",
    "in_half_plane_pi",
    "in_omega_alpha",
    "kernel_image_decomposition_check",
    "kernel_image_transfer_check",
    "laguerre_rule",
    "power_iterate",
    "riesz_projection_at_one",
    "scaled_resolvent_power_gap",
    "semigroup_at",
    "spectral_map",
    "verify_equivalence",
]
