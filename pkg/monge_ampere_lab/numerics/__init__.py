"""
數值工具：積分、取樣、有限差分
"""
from .finite_diff import derivative_tensor, directional_second_difference, jacobian, sup_norm
from .quadrature import (
    adaptive_integrate,
    gauss_legendre_panel,
    integrate_disk_2d,
    integrate_radial_ball,
    integrate_radial_whole_space,
    sphere_area,
    unit_ball_volume,
)
from .sampling import (
    fibonacci_sphere,
    halton_points,
    refine_periodic_maximum,
    refine_periodic_minimum,
    unit_directions,
)

__all__ = [
    "adaptive_integrate",
    "gauss_legendre_panel",
    "integrate_disk_2d",
    "integrate_radial_ball",
    "integrate_radial_whole_space",
    "sphere_area",
    "unit_ball_volume",
    "fibonacci_sphere",
    "halton_points",
    "refine_periodic_maximum",
    "refine_periodic_minimum",
    "unit_directions",
    "derivative_tensor",
    "directional_second_difference",
    "jacobian",
    "sup_norm",
]
