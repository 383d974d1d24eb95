"""Assembly of the Galerkin matrices and load terms of the semi-discrete system.

The method-of-lines system for the nodal coefficients alpha and the front
position h reads

    M alpha' = (h'/h) K alpha - (1/h^2) A alpha + boundary loads
    h'       = A0 * (alpha[-1] - sigma_dimless(h))

with the tridiagonal matrices

    M[j, i] = int phi_i phi_j dy          (mass)
    K[j, i] = int y phi_i' phi_j dy       (transformed convection)
    A[j, i] = int phi_i' phi_j' dy        (stiffness)

and boundary loads +(1/h)*Bi*(b(tau) - H*alpha[0]) at node 0 (reservoir
influx) and -(h'/h)*alpha[-1] at the last node (front outflux).  All entries
are integrated exactly: M and A in closed form, K with a per-element 2-point
Gauss rule (the integrand y*phi_i'*phi_j is quadratic on each element).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .mesh import Mesh
from .model import DimensionlessParams

__all__ = [
    "FemOperators",
    "assemble",
    "apply_rhs",
    "interface_velocity",
    "influx",
    "outflux",
    "residual_l2sq",
    "tridiag_matvec",
    "InterfaceCollapseError",
]


class InterfaceCollapseError(RuntimeError):
    """Raised when the front position h becomes nonpositive."""


@dataclass(frozen=True)
class FemOperators:
    """Tridiagonal Galerkin matrices stored as (lower, diag, upper) bands."""

    mesh: Mesh
    M_lower: np.ndarray
    M_diag: np.ndarray
    M_upper: np.ndarray
    K_lower: np.ndarray
    K_diag: np.ndarray
    K_upper: np.ndarray
    A_lower: np.ndarray
    A_diag: np.ndarray
    A_upper: np.ndarray

    def _dense(self, lo, d, up) -> np.ndarray:
        return np.diag(d) + np.diag(lo, -1) + np.diag(up, 1)

    def M_array(self) -> np.ndarray:
        return self._dense(self.M_lower, self.M_diag, self.M_upper)

    def K_array(self) -> np.ndarray:
        return self._dense(self.K_lower, self.K_diag, self.K_upper)

    def A_array(self) -> np.ndarray:
        return self._dense(self.A_lower, self.A_diag, self.A_upper)

    def solve_mass(self, rhs: np.ndarray) -> np.ndarray:
        """Solve M x = rhs with a direct banded factorization."""
        n = self.mesh.n
        ab = np.zeros((3, n))
        ab[0, 1:] = self.M_upper
        ab[1] = self.M_diag
        ab[2, :-1] = self.M_lower
        return solve_banded((1, 1), ab, rhs)


def tridiag_matvec(lower, diag, upper, x) -> np.ndarray:
    out = diag * x
    out[:-1] += upper * x[1:]
    out[1:] += lower * x[:-1]
    return out


# 2-point Gauss-Legendre on [-1, 1]; exact for the quadratic K integrand
_G2X = np.array([-1.0, 1.0]) / np.sqrt(3.0)
_G2W = np.array([1.0, 1.0])


def assemble(mesh: Mesh) -> FemOperators:
    """Assemble M, K, A for the hat basis on the given mesh."""
    n = mesh.n
    k = mesh.element_sizes

    # mass: element block k/6 * [[2, 1], [1, 2]]
    M_diag = np.zeros(n)
    M_diag[:-1] += k / 3.0
    M_diag[1:] += k / 3.0
    M_off = k / 6.0

    # stiffness: element block 1/k * [[1, -1], [-1, 1]]
    A_diag = np.zeros(n)
    A_diag[:-1] += 1.0 / k
    A_diag[1:] += 1.0 / k
    A_off = -1.0 / k

    # convection: element block with entries dphi_i * int_e y phi_j dy
    K_lower = np.zeros(n - 1)
    K_diag = np.zeros(n)
    K_upper = np.zeros(n - 1)
    nodes = mesh.nodes
    for e in range(n - 1):
        a, b = nodes[e], nodes[e + 1]
        ke = b - a
        yq = 0.5 * (a + b) + 0.5 * ke * _G2X
        wq = 0.5 * ke * _G2W
        int_y_phiL = np.sum(wq * yq * (b - yq) / ke)
        int_y_phiR = np.sum(wq * yq * (yq - a) / ke)
        dphi = (-1.0 / ke, 1.0 / ke)
        # K[j, i] += dphi[i_local] * int_e y phi_{j_local}
        K_diag[e] += dphi[0] * int_y_phiL
        K_diag[e + 1] += dphi[1] * int_y_phiR
        K_upper[e] += dphi[1] * int_y_phiL      # j = e,   i = e+1
        K_lower[e] += dphi[0] * int_y_phiR      # j = e+1, i = e

    return FemOperators(mesh=mesh,
                        M_lower=M_off, M_diag=M_diag, M_upper=M_off.copy(),
                        K_lower=K_lower, K_diag=K_diag, K_upper=K_upper,
                        A_lower=A_off, A_diag=A_diag, A_upper=A_off.copy())


def influx(tau: float, u_at_0: float, h: float, params: DimensionlessParams) -> float:
    """Reservoir load (1/h)*Bi*(b(tau) - H*u(tau, 0)) applied at node 0."""
    b = float(np.asarray(params.b_dimless(tau), dtype=float))
    return (1.0 / h) * params.Bi * (b - params.H * u_at_0)


def outflux(h: float, hprime: float, u_at_1: float) -> float:
    """Front load (h'/h)*u(tau, 1) subtracted at the last node."""
    return (hprime / h) * u_at_1


def interface_velocity(alpha: np.ndarray, h: float, params: DimensionlessParams) -> float:
    """Front velocity h' = A0*(u(tau, 1) - sigma_dimless(h))."""
    if h <= 0.0:
        raise InterfaceCollapseError(f"front position collapsed: h={h}")
    return params.A0 * (float(alpha[-1]) - float(params.sigma_dimless(h)))


def apply_rhs(ops: FemOperators, alpha: np.ndarray, h: float, hprime: float,
              tau: float, params: DimensionlessParams) -> np.ndarray:
    """Load vector F with M alpha' = F for the current state."""
    if h <= 0.0:
        raise InterfaceCollapseError(f"front position collapsed: h={h}")
    Ka = tridiag_matvec(ops.K_lower, ops.K_diag, ops.K_upper, alpha)
    Aa = tridiag_matvec(ops.A_lower, ops.A_diag, ops.A_upper, alpha)
    F = (hprime / h) * Ka - (1.0 / h**2) * Aa
    F[0] += influx(tau, float(alpha[0]), h, params)
    F[-1] -= outflux(h, hprime, float(alpha[-1]))
    return F


def residual_l2sq(mesh: Mesh, alpha: np.ndarray, alpha_prime: np.ndarray,
                  h: float, hprime: float, tau: float,
                  params: DimensionlessParams) -> np.ndarray:
    """Squared L2 norm per element of the strong residual of the discrete solution.

    R = (h'/h)*y*du/dy + (1/h)*Bi*(b(tau) - H*u(0)) - (h'/h)*u(1) - du/dtau,
    which is linear in y on each element (du/dy elementwise constant,
    du/dtau piecewise linear), so the elementwise integral is exact.
    """
    if h <= 0.0:
        raise InterfaceCollapseError(f"front position collapsed: h={h}")
    nodes = mesh.nodes
    k = mesh.element_sizes
    slopes = np.diff(alpha) / k
    const = influx(tau, float(alpha[0]), h, params) - outflux(h, hprime, float(alpha[-1]))
    c = hprime / h
    # endpoint values of R on each element
    Ra = c * nodes[:-1] * slopes + const - alpha_prime[:-1]
    Rb = c * nodes[1:] * slopes + const - alpha_prime[1:]
    return k / 3.0 * (Ra**2 + Ra * Rb + Rb**2)
