"""Discrete error norms, convergence studies and the residual error estimator.

Errors are measured against a reference solution on a finer nested uniform
mesh, restricted to the coarse nodes, with both runs recorded at identical
times.  The spatial norms are the discrete ones induced by the nodal values:

    ||v||^2      = sum_i k * v_i^2            (lumped L2)
    |v|_{H1}^2   = sum_e k * (slope_e)^2      (broken H1 seminorm)

and the time direction is treated with the trapezoid rule (L2 in time) or a
maximum (Linf in time).  Front errors compare h and h' directly; h' values
come from right-hand-side evaluations recorded by the solver, never from
finite differences of h.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .assembly import residual_l2sq
from .integrator import IntegratorConfig, Trajectory, solve
from .mesh import uniform_mesh
from .model import DimensionlessParams, InitialCondition

__all__ = [
    "NORM_KINDS",
    "discrete_error",
    "true_error_sq",
    "aposteriori_estimate",
    "convergence_study",
    "ErrorReport",
    "observed_orders",
]

NORM_KINDS = ("L2L2", "L2H1", "LinfL2", "boundary_L2", "boundary_deriv_L2")

# 5-point Gauss-Legendre on [-1, 1]; used for the initial-data term
_GX, _GW = np.polynomial.legendre.leggauss(5)


def _restrict(ref: Trajectory, coarse_mesh) -> np.ndarray:
    """Nodal values of the reference restricted to the coarse mesh nodes."""
    stride, rem = divmod(ref.mesh.n - 1, coarse_mesh.n - 1)
    if rem != 0 or not (ref.mesh.is_uniform and coarse_mesh.is_uniform):
        raise ValueError("reference mesh must be a uniform refinement of the coarse mesh")
    return ref.alphas[:, ::stride]


def _check_alignment(traj: Trajectory, ref: Trajectory) -> None:
    if traj.times.shape != ref.times.shape or not np.allclose(
            traj.times, ref.times, rtol=0.0, atol=1e-13):
        raise ValueError("trajectories must be recorded at identical times")


def discrete_error(traj: Trajectory, ref: Trajectory, norm: str) -> float:
    """Discrete norm of the difference between a run and a finer reference."""
    if norm not in NORM_KINDS:
        raise ValueError(f"unknown norm {norm!r}; choose one of {NORM_KINDS}")
    _check_alignment(traj, ref)
    t = traj.times
    if norm == "boundary_L2":
        return float(np.sqrt(np.trapezoid((traj.hs - ref.hs) ** 2, t)))
    if norm == "boundary_deriv_L2":
        return float(np.sqrt(np.trapezoid((traj.hprimes - ref.hprimes) ** 2, t)))
    du = traj.alphas - _restrict(ref, traj.mesh)
    k = traj.mesh.element_sizes
    if norm == "L2H1":
        dslope = np.diff(du, axis=1) / k
        sq = np.sum(k * dslope**2, axis=1)
        return float(np.sqrt(np.trapezoid(sq, t)))
    sq = np.sum(k[0] * du**2, axis=1)
    if norm == "LinfL2":
        return float(np.sqrt(sq.max()))
    return float(np.sqrt(np.trapezoid(sq, t)))


def true_error_sq(traj: Trajectory, ref: Trajectory) -> float:
    """Squared error total matched to the estimator: the Linf-in-time squared
    L2 norm of u, the time-integrated broken H1 seminorm, and the front error
    in the H1 norm of time (position and velocity terms)."""
    return (discrete_error(traj, ref, "LinfL2") ** 2
            + discrete_error(traj, ref, "L2H1") ** 2
            + discrete_error(traj, ref, "boundary_L2") ** 2
            + discrete_error(traj, ref, "boundary_deriv_L2") ** 2)


def aposteriori_estimate(traj: Trajectory, u0: InitialCondition) -> dict:
    """Residual-based a posteriori error bound for a recorded run.

    Per element the contribution is k^2 * (int_0^T ||R||_{L2}^2 dtau
    + k^2 * |u0|_{H2}^2 restricted to the element), where R is the strong
    residual of the discrete solution; the front data term |h(0) - h_k(0)|^2
    vanishes because the initial front position is imposed exactly.  Time
    integration uses the trapezoid rule on the record times.
    """
    mesh = traj.mesh
    k = mesh.element_sizes
    nt = len(traj.times)
    res_sq = np.zeros((nt, mesh.n - 1))
    for i in range(nt):
        res_sq[i] = residual_l2sq(mesh, traj.alphas[i], traj.alpha_primes[i],
                                  float(traj.hs[i]), float(traj.hprimes[i]),
                                  float(traj.times[i]), traj.params)
    int_res = np.trapezoid(res_sq, traj.times, axis=0)

    nodes = mesh.nodes
    data_sq = np.zeros(mesh.n - 1)
    for e in range(mesh.n - 1):
        a, b = nodes[e], nodes[e + 1]
        yq = 0.5 * (a + b) + 0.5 * (b - a) * _GX
        wq = 0.5 * (b - a) * _GW
        d2 = np.asarray(u0.second_derivative(yq), dtype=float)
        data_sq[e] = np.sum(wq * d2**2)

    per_element = k**2 * (int_res + k**2 * data_sq)
    front_data_sq = 0.0
    total = front_data_sq + float(per_element.sum())
    return {"eta_total": total,
            "per_element": per_element,
            "residual_part": float(np.sum(k**2 * int_res)),
            "data_part": float(np.sum(k**4 * data_sq)),
            "front_data_sq": front_data_sq}


def observed_orders(ks: np.ndarray, errors: np.ndarray) -> np.ndarray:
    """Observed convergence orders log(e_i/e_{i+1}) / log(k_i/k_{i+1}).

    Entries are NaN where an error vanishes or the mesh ratio degenerates.
    """
    ks = np.asarray(ks, dtype=float)
    errors = np.asarray(errors, dtype=float)
    orders = np.full(len(ks) - 1, np.nan)
    for i in range(len(ks) - 1):
        if errors[i] > 0.0 and errors[i + 1] > 0.0 and ks[i] != ks[i + 1]:
            orders[i] = np.log(errors[i] / errors[i + 1]) / np.log(ks[i] / ks[i + 1])
    return orders


@dataclass(frozen=True)
class ErrorReport:
    """Result table of a convergence study."""

    Ns: tuple[int, ...]
    ks: np.ndarray
    errors: dict[str, np.ndarray]
    orders: dict[str, np.ndarray]
    eta: np.ndarray
    effectivity: np.ndarray
    ref_n: int

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        norms = list(self.errors)
        head = ["N", "k"] + norms + [f"order_{n}" for n in norms] + ["eta", "effectivity"]
        buf.write(",".join(head) + "\n")
        for i, N in enumerate(self.Ns):
            row = [str(N), f"{self.ks[i]:.10e}"]
            row += [f"{self.errors[n][i]:.10e}" for n in norms]
            row += ["" if i == 0 else f"{self.orders[n][i - 1]:.4f}" for n in norms]
            row += [f"{self.eta[i]:.10e}", f"{self.effectivity[i]:.6f}"]
            buf.write(",".join(row) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    def to_svg(self, path=None) -> str:
        from .svgplot import loglog_plot
        series = [(f"{name}", self.ks, self.errors[name])
                  for name in self.errors]
        svg = loglog_plot(series, xlabel="mesh size k", ylabel="discrete error",
                          title="convergence of the moving-front FEM",
                          guide_slopes=(1.0,))
        if path is not None:
            with open(path, "w") as fh:
                fh.write(svg)
        return svg


def convergence_study(params: DimensionlessParams, u0: InitialCondition,
                      Ns, ref_n: int,
                      config: IntegratorConfig | None = None,
                      norms=NORM_KINDS) -> ErrorReport:
    """Run a mesh refinement study against a nested finer reference.

    ``Ns`` are element counts (so N elements means N+1 nodes); ``ref_n`` must
    be a multiple of every entry so that the reference restricts exactly.
    """
    Ns = tuple(int(N) for N in Ns)
    if any(ref_n % N != 0 for N in Ns):
        raise ValueError("ref_n must be an integer multiple of every N")
    if any(N <= 1 for N in Ns) or ref_n <= max(Ns):
        raise ValueError("need N >= 2 and ref_n > max(Ns)")
    config = config or IntegratorConfig()

    ref = solve(params, u0, uniform_mesh(ref_n + 1), config)
    runs = [solve(params, u0, uniform_mesh(N + 1), config) for N in Ns]

    ks = np.array([1.0 / N for N in Ns])
    errors = {norm: np.array([discrete_error(r, ref, norm) for r in runs])
              for norm in norms}
    orders = {norm: observed_orders(ks, errors[norm]) for norm in norms}
    eta = np.array([aposteriori_estimate(r, u0)["eta_total"] for r in runs])
    true_sq = np.array([true_error_sq(r, ref) for r in runs])
    with np.errstate(divide="ignore", invalid="ignore"):
        effectivity = np.where(true_sq > 0.0, eta / true_sq, np.nan)
    return ErrorReport(Ns=Ns, ks=ks, errors=errors, orders=orders,
                       eta=eta, effectivity=effectivity, ref_n=ref_n)
