"""Built-in benchmark cases: geometry, coefficients and exact solutions.

The 2D cases put a disk of radius 1/2 on (-1,1) x (-3/4,5/4), its center
translating from (0,0) to (0,1/2) over I=(0,1).  The 3D cases use the
sphere of radius 1/sqrt(2) moving through (-1,1)^2 x (-3/4,7/4).  Body
forces and interface force densities are the committed closed forms from
tools/generate_manufactured.py, exactly consistent with the prescribed
velocity/pressure pairs.
"""

from dataclasses import dataclass

import numpy as np

from . import _manufactured as mf
from .assembly import ProblemCoefficients
from .errors import ExactSolution
from .levelset import NEG, POS, LevelSetField


@dataclass
class ProblemCase:
    name: str
    dim: int
    box: tuple
    final_time: float
    coeff: ProblemCoefficients
    exact: ExactSolution = None
    requires_3d: bool = False


def _stack(tup):
    return np.stack([np.broadcast_to(c, np.broadcast(*tup).shape) for c in tup],
                    axis=-1)


def _disk2d_levelset():
    def phi(x, t):
        return x[..., 0] ** 2 + (x[..., 1] - 0.5 * t) ** 2 - 0.25

    def grad(x, t):
        return np.stack([2.0 * x[..., 0], 2.0 * (x[..., 1] - 0.5 * t)], axis=-1)

    def dt(x, t):
        return -(x[..., 1] - 0.5 * t)

    return LevelSetField(phi, grad, dt)


def _disk2d_curvature(x, t):
    # kappa = div(grad phi/|grad phi|) = 1/dist to the moving center
    s = np.sqrt(x[..., 0] ** 2 + (x[..., 1] - 0.5 * t) ** 2)
    return 1.0 / s


def _ball3d_levelset():
    def phi(x, t):
        return (x[..., 0] ** 2 + x[..., 1] ** 2
                + (x[..., 2] - t) ** 2 - 0.5)

    def grad(x, t):
        return np.stack([2.0 * x[..., 0], 2.0 * x[..., 1],
                         2.0 * (x[..., 2] - t)], axis=-1)

    def dt(x, t):
        return -2.0 * (x[..., 2] - t)

    return LevelSetField(phi, grad, dt)


def _ball3d_curvature(x, t):
    s = np.sqrt(x[..., 0] ** 2 + x[..., 1] ** 2 + (x[..., 2] - t) ** 2)
    return 2.0 / s


def _wrap_same(fn, d):
    """Side-independent field from a closed-form tuple function."""

    def call(x, t, side=POS):
        args = tuple(x[..., i] for i in range(d)) + (t,)
        return _stack(fn(*args))

    return call


def _wrap_sides(fn_pos, fn_neg, d):
    def call(x, t, side):
        fn = fn_pos if side == POS else fn_neg
        args = tuple(x[..., i] for i in range(d)) + (t,)
        return _stack(fn(*args))

    return call


def _wrap_grad(fn, d):
    def call(x, t, side=POS):
        args = tuple(x[..., i] for i in range(d)) + (t,)
        flat = fn(*args)
        shape = np.broadcast(*flat).shape
        out = np.empty(shape + (d, d))
        for i in range(d):
            for j in range(d):
                out[..., i, j] = flat[i * d + j]
        return out

    return call


def _wrap_grad_sides(fn_pos, fn_neg, d):
    gp, gn = _wrap_grad(fn_pos, d), _wrap_grad(fn_neg, d)

    def call(x, t, side):
        return gp(x, t) if side == POS else gn(x, t)

    return call


def _wrap_scalar_sides(fn_pos, fn_neg, d):
    def call(x, t, side):
        fn = fn_pos if side == POS else fn_neg
        args = tuple(x[..., i] for i in range(d)) + (t,)
        return np.asarray(fn(*args)[0])

    return call


def _body_force(fn_pos, fn_neg, d):
    def call(points, side):
        args = tuple(points[:, i] for i in range(d)) + (points[:, d],)
        fn = fn_pos if side == POS else fn_neg
        return _stack(fn(*args))

    return call


def _interface_force(fn, d):
    def call(points):
        args = tuple(points[:, i] for i in range(d)) + (points[:, d],)
        return _stack(fn(*args))

    return call


def _case_disk2d_smooth():
    ls = _disk2d_levelset()
    coeff = ProblemCoefficients(
        levelset=ls,
        rho=(1.0, 10.0),
        mu=(1.0, 25.0),
        tau=2.0,
        body_force=_body_force(mf.disk2d_smooth_g_pos, mf.disk2d_smooth_g_neg, 2),
        interface_force=_interface_force(mf.disk2d_smooth_f_iface, 2),
        curvature=_disk2d_curvature,
    )
    exact = ExactSolution(
        name="disk2d_smooth",
        levelset=ls,
        velocity=_wrap_same(mf.disk2d_smooth_u, 2),
        velocity_gradient=_wrap_grad(mf.disk2d_smooth_u_grad, 2),
        pressure=_wrap_scalar_sides(mf.disk2d_smooth_p_pos,
                                    mf.disk2d_smooth_p_neg, 2),
        velocity_smooth=True,
    )
    return ProblemCase("disk2d_smooth", 2, ((-1.0, 1.0), (-0.75, 1.25)), 1.0,
                       coeff, exact)


def _case_disk2d_kink():
    ls = _disk2d_levelset()
    coeff = ProblemCoefficients(
        levelset=ls,
        rho=(1.0, 5.0),
        mu=(1.0, 2.0),
        tau=2.0,
        body_force=_body_force(mf.disk2d_kink_g_pos, mf.disk2d_kink_g_neg, 2),
        interface_force=_interface_force(mf.disk2d_kink_f_iface, 2),
        curvature=_disk2d_curvature,
    )
    exact = ExactSolution(
        name="disk2d_kink",
        levelset=ls,
        velocity=_wrap_sides(mf.disk2d_kink_u_pos, mf.disk2d_kink_u_neg, 2),
        velocity_gradient=_wrap_grad_sides(mf.disk2d_kink_u_grad_pos,
                                           mf.disk2d_kink_u_grad_neg, 2),
        pressure=_wrap_scalar_sides(mf.disk2d_kink_p_pos,
                                    mf.disk2d_kink_p_neg, 2),
        velocity_smooth=False,
    )
    return ProblemCase("disk2d_kink", 2, ((-1.0, 1.0), (-0.75, 1.25)), 1.0,
                       coeff, exact)


def _case_paper3d_1():
    ls = _ball3d_levelset()
    u = _wrap_same(mf.ball3d_smooth_u, 3)
    coeff = ProblemCoefficients(
        levelset=ls,
        rho=(1.0, 10.0),
        mu=(1.0, 25.0),
        tau=2.0,
        body_force=_body_force(mf.ball3d_smooth_g_pos, mf.ball3d_smooth_g_neg, 3),
        interface_force=_interface_force(mf.ball3d_smooth_f_iface, 3),
        curvature=_ball3d_curvature,
        dirichlet=lambda x, t: u(x, t),
    )
    exact = ExactSolution(
        name="paper3d_case1",
        levelset=ls,
        velocity=u,
        velocity_gradient=_wrap_grad(mf.ball3d_smooth_u_grad, 3),
        pressure=_wrap_scalar_sides(mf.ball3d_smooth_p_pos,
                                    mf.ball3d_smooth_p_neg, 3),
        velocity_smooth=True,
    )
    return ProblemCase("paper3d_case1", 3,
                       ((-1.0, 1.0), (-1.0, 1.0), (-0.75, 1.75)), 1.0,
                       coeff, exact, requires_3d=True)


def _case_paper3d_2():
    ls = _ball3d_levelset()
    u = _wrap_sides(mf.ball3d_kink_u_pos, mf.ball3d_kink_u_neg, 3)
    coeff = ProblemCoefficients(
        levelset=ls,
        rho=(1.0, 5.0),
        mu=(1.0, 2.0),
        tau=2.0,
        body_force=_body_force(mf.ball3d_kink_g_pos, mf.ball3d_kink_g_neg, 3),
        interface_force=_interface_force(mf.ball3d_kink_f_iface, 3),
        curvature=_ball3d_curvature,
        dirichlet=lambda x, t: u(x, t, POS),
    )
    exact = ExactSolution(
        name="paper3d_case2",
        levelset=ls,
        velocity=u,
        velocity_gradient=_wrap_grad_sides(mf.ball3d_kink_u_grad_pos,
                                           mf.ball3d_kink_u_grad_neg, 3),
        pressure=_wrap_scalar_sides(mf.ball3d_kink_p_pos,
                                    mf.ball3d_kink_p_neg, 3),
        velocity_smooth=False,
    )
    return ProblemCase("paper3d_case2", 3,
                       ((-1.0, 1.0), (-1.0, 1.0), (-0.75, 1.75)), 1.0,
                       coeff, exact, requires_3d=True)


def _case_custom(rho=(1.0, 10.0), mu=(1.0, 25.0), tau=2.0):
    """Zero-data moving-disk problem driven only by surface tension."""
    ls = _disk2d_levelset()
    coeff = ProblemCoefficients(
        levelset=ls,
        rho=tuple(rho),
        mu=tuple(mu),
        tau=float(tau),
        body_force=None,
        interface_force=None,
        curvature=_disk2d_curvature if tau else None,
    )
    return ProblemCase("custom", 2, ((-1.0, 1.0), (-0.75, 1.25)), 1.0, coeff)


_BUILTIN = {
    "disk2d_smooth": _case_disk2d_smooth,
    "disk2d_kink": _case_disk2d_kink,
    "paper3d_case1": _case_paper3d_1,
    "paper3d_case2": _case_paper3d_2,
}


def case_names():
    return sorted(_BUILTIN) + ["custom"]


def get_case(name, **overrides):
    """Instantiate a built-in case by name.

    Coefficient overrides are accepted only by the ``custom`` case; the
    benchmark cases fix their coefficients to keep the manufactured data
    consistent.
    """
    if name == "custom":
        return _case_custom(**overrides)
    if name not in _BUILTIN:
        raise KeyError(f"unknown case '{name}'; available: {case_names()}")
    if overrides:
        raise ValueError(
            f"case '{name}' fixes its coefficients; overrides are only "
            "supported by the 'custom' case")
    return _BUILTIN[name]()
