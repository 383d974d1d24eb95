"""Time integration of the coupled front/concentration system.

The semi-discrete system assembled in :mod:`rubberfront.assembly` is advanced
either with an adaptive Dormand-Prince 5(4) scheme (the default, robust
against the stiff initial transient of the front law) or with a fixed-step
classical RK4 scheme.  The heavy lifting happens in the compiled kernels of
:mod:`rubberfront._kernels`; this module prepares the inputs, interprets the
status codes and packages the recorded states into a :class:`Trajectory`.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .assembly import FemOperators, apply_rhs, assemble, interface_velocity
from .mesh import Mesh, build_mesh, interpolate, project_l2
from .model import (DimensionlessParams, InitialCondition, PhysicalParams,
                    PiecewiseLinear, nondimensionalize, validate_assumptions)

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "SolverError",
    "solve",
    "solve_physical",
    "rhs",
    "step",
    "energy_diagnostic",
]


class SolverError(RuntimeError):
    """Raised when the time integration fails (instability, step budget)."""

    def __init__(self, message: str, status: int, tau_reached: float):
        super().__init__(message)
        self.status = status
        self.tau_reached = tau_reached


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping options.

    ``scheme`` selects ``adaptive-RK45`` (Dormand-Prince with error control)
    or ``fixed-RK4`` (classical RK4 with step ``dt``).  ``n_records`` is the
    number of output intervals; the adaptive scheme lands on the record times
    exactly, the fixed scheme records every ``ceil(n_steps/n_records)``-th
    step.  ``init`` chooses nodal interpolation or L2 projection of the
    initial data.
    """

    scheme: str = "adaptive-RK45"
    dt: float = 1e-6
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    n_records: int = 400
    max_steps: int = 50_000_000
    init: str = "interpolate"

    def __post_init__(self):
        if self.scheme not in ("adaptive-RK45", "fixed-RK4"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.init not in ("interpolate", "l2"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.dt <= 0.0 or self.n_records < 1 or self.max_steps < 1:
            raise ValueError("dt, n_records and max_steps must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Recorded solver states on the transformed domain.

    ``alphas[i]`` holds the nodal concentration coefficients at ``times[i]``,
    ``hs[i]`` the front position, ``alpha_primes`` and ``hprimes`` the exact
    right-hand-side values at the recorded states (not finite differences).
    """

    times: np.ndarray
    alphas: np.ndarray
    hs: np.ndarray
    alpha_primes: np.ndarray
    hprimes: np.ndarray
    mesh: Mesh
    params: DimensionlessParams
    config: IntegratorConfig
    status: int
    n_steps: int
    min_alpha: float
    events: tuple[tuple[str, float], ...] = field(default=())

    @property
    def reached_final_time(self) -> bool:
        return self.status == _kernels.STATUS_DONE

    def to_csv(self, path=None) -> str:
        """Dimensionless trajectory as CSV (tau, h, hprime, u at each node)."""
        buf = io.StringIO()
        node_cols = ",".join(f"u_y{y:.6f}" for y in self.mesh.nodes)
        buf.write(f"tau,h,hprime,{node_cols}\n")
        for i in range(len(self.times)):
            vals = ",".join(f"{v:.12e}" for v in self.alphas[i])
            buf.write(f"{self.times[i]:.12e},{self.hs[i]:.12e},{self.hprimes[i]:.12e},{vals}\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _b_arrays(params: DimensionlessParams) -> tuple[np.ndarray, np.ndarray]:
    """Flatten b(tau) to knot arrays for the kernels (exact for the
    supported families, dense sampling otherwise)."""
    b = params.b_dimless
    if isinstance(b, PiecewiseLinear):
        return np.asarray(b.ts, dtype=float), np.asarray(b.vs, dtype=float)
    if getattr(b, "kind", None) == "constant":
        return np.array([0.0]), np.array([float(b.c0)])
    ts = np.linspace(0.0, params.T, 1025)
    return ts, np.asarray(b(ts), dtype=float)


def _initial_alpha(u0: InitialCondition, mesh: Mesh, config: IntegratorConfig) -> np.ndarray:
    if config.init == "l2":
        return project_l2(u0, mesh).values.copy()
    return interpolate(u0, mesh).values.copy()


def rhs(ops: FemOperators, alpha: np.ndarray, h: float, tau: float,
        params: DimensionlessParams) -> tuple[np.ndarray, float]:
    """Pure-python evaluation of (alpha', h'); reference for the kernels."""
    hprime = interface_velocity(alpha, h, params)
    F = apply_rhs(ops, alpha, h, hprime, tau, params)
    return ops.solve_mass(F), hprime


def step(ops: FemOperators, alpha: np.ndarray, h: float, tau: float, dt: float,
         params: DimensionlessParams) -> tuple[np.ndarray, float]:
    """One classical RK4 step in pure python (used for cross-validation)."""
    k1, hk1 = rhs(ops, alpha, h, tau, params)
    k2, hk2 = rhs(ops, alpha + 0.5 * dt * k1, h + 0.5 * dt * hk1, tau + 0.5 * dt, params)
    k3, hk3 = rhs(ops, alpha + 0.5 * dt * k2, h + 0.5 * dt * hk2, tau + 0.5 * dt, params)
    k4, hk4 = rhs(ops, alpha + dt * k3, h + dt * hk3, tau + dt, params)
    alpha_new = alpha + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    h_new = h + dt / 6.0 * (hk1 + 2.0 * hk2 + 2.0 * hk3 + hk4)
    return alpha_new, h_new


def _kernel_args(ops: FemOperators, params: DimensionlessParams):
    b_ts, b_vs = _b_arrays(params)
    sk, sp0, sp1 = params.sigma_dimless.kernel_encoding()
    return (np.ascontiguousarray(ops.M_lower), np.ascontiguousarray(ops.M_diag),
            np.ascontiguousarray(ops.M_upper), np.ascontiguousarray(ops.A_lower),
            np.ascontiguousarray(ops.A_diag), np.ascontiguousarray(ops.A_upper),
            np.ascontiguousarray(ops.K_lower), np.ascontiguousarray(ops.K_diag),
            np.ascontiguousarray(ops.K_upper),
            params.Bi, params.H, b_ts, b_vs, params.A0, sk, sp0, sp1)


def solve(params: DimensionlessParams, u0: InitialCondition, mesh,
          config: IntegratorConfig | None = None) -> Trajectory:
    """Integrate the semi-discrete system from tau=0 to tau=T.

    Breakthrough (the front reaching the far face h=1) ends the run cleanly
    with an event entry; instability or an exhausted step budget raises
    :class:`SolverError`.
    """
    mesh = build_mesh(mesh)
    config = config or IntegratorConfig()
    ops = assemble(mesh)
    alpha0 = _initial_alpha(u0, mesh, config)
    n = mesh.n
    args = _kernel_args(ops, params)

    if config.scheme == "adaptive-RK45":
        rec_times = np.linspace(0.0, params.T, config.n_records + 1)
        nrec = rec_times.size
        rec_alpha = np.zeros((nrec, n))
        rec_h = np.zeros(nrec)
        rec_aprime = np.zeros((nrec, n))
        rec_hprime = np.zeros(nrec)
        dt0 = min(1e-9, params.T / 1e6)
        status, n_recorded, n_steps, min_alpha, tau_reached = _kernels.integrate_adaptive(
            alpha0, params.h0, rec_times, *args,
            config.rel_tol, config.abs_tol, dt0, config.max_steps,
            rec_alpha, rec_h, rec_aprime, rec_hprime)
        times = rec_times[:n_recorded].copy()
        if status == _kernels.STATUS_BREAKTHROUGH:
            times[-1] = tau_reached
    else:
        n_steps_total = int(round(params.T / config.dt))
        if n_steps_total < 1:
            raise ValueError("dt larger than the final time")
        stride = max(1, -(-n_steps_total // config.n_records))
        n_slots = n_steps_total // stride + 3
        rec_alpha = np.zeros((n_slots, n))
        rec_h = np.zeros(n_slots)
        rec_aprime = np.zeros((n_slots, n))
        rec_hprime = np.zeros(n_slots)
        rec_times = np.zeros(n_slots)
        status, n_recorded, n_steps, min_alpha, tau_reached = _kernels.integrate_rk4(
            alpha0, params.h0, config.dt, n_steps_total, stride, *args,
            rec_alpha, rec_h, rec_aprime, rec_hprime, rec_times)
        times = rec_times[:n_recorded].copy()

    if status == _kernels.STATUS_UNSTABLE:
        raise SolverError(
            f"integration became unstable at tau={tau_reached:.6e} "
            f"(scheme {config.scheme}, N={n})", status, tau_reached)
    if status == _kernels.STATUS_MAX_STEPS:
        raise SolverError(
            f"step budget {config.max_steps} exhausted at tau={tau_reached:.6e}",
            status, tau_reached)

    events: tuple[tuple[str, float], ...] = ()
    if status == _kernels.STATUS_BREAKTHROUGH:
        events = (("breakthrough", float(tau_reached)),)

    return Trajectory(times=times,
                      alphas=rec_alpha[:n_recorded].copy(),
                      hs=rec_h[:n_recorded].copy(),
                      alpha_primes=rec_aprime[:n_recorded].copy(),
                      hprimes=rec_hprime[:n_recorded].copy(),
                      mesh=mesh, params=params, config=config,
                      status=status, n_steps=n_steps,
                      min_alpha=float(min_alpha), events=events)


def solve_physical(p: PhysicalParams, u0: InitialCondition, mesh,
                   config: IntegratorConfig | None = None) -> Trajectory:
    """Validate the dimensional parameters, scale them and solve."""
    report = validate_assumptions(p, u0)
    if not report.ok:
        failed = "; ".join(f"{name}: {msg}" for name, msg in report.failures())
        raise ValueError(f"inadmissible parameters: {failed}")
    return solve(nondimensionalize(p), u0, mesh, config)


def energy_diagnostic(traj: Trajectory) -> dict[str, float]:
    """Discrete energy functional of a trajectory.

    Returns the maximum over samples of the squared mass norm alpha^T M alpha,
    the trapezoid time integral of the gradient term alpha^T A alpha, and
    their sum.  The sum is mesh-converged for a well-resolved run and serves
    as a cross-mesh consistency diagnostic.
    """
    ops = assemble(traj.mesh)
    nt = len(traj.times)
    mass = np.empty(nt)
    grad = np.empty(nt)
    for i in range(nt):
        a = traj.alphas[i]
        Ma = ops.M_diag * a
        Ma[:-1] += ops.M_upper * a[1:]
        Ma[1:] += ops.M_lower * a[:-1]
        Aa = ops.A_diag * a
        Aa[:-1] += ops.A_upper * a[1:]
        Aa[1:] += ops.A_lower * a[:-1]
        mass[i] = a @ Ma
        grad[i] = a @ Aa
    max_l2_sq = float(mass.max())
    int_h1_sq = float(np.trapezoid(grad, traj.times))
    return {"max_L2_sq": max_l2_sq, "int_H1semi_sq": int_h1_sq,
            "total": max_l2_sq + int_h1_sq}
