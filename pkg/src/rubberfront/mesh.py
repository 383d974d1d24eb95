"""1D meshes on [0, 1], the piecewise-linear hat basis and nodal interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Mesh",
    "HatBasis",
    "NodalFunction",
    "build_mesh",
    "uniform_mesh",
    "graded_mesh",
    "interpolate",
    "project_l2",
]


@dataclass(frozen=True)
class Mesh:
    """Strictly increasing nodes y_0 = 0 < ... < y_{N-1} = 1."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ValueError("mesh needs at least 3 nodes")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("mesh endpoints must be exactly 0 and 1")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("mesh nodes must be strictly increasing")

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def element_sizes(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def k_max(self) -> float:
        return float(self.element_sizes.max())

    @property
    def is_uniform(self) -> bool:
        k = self.element_sizes
        return bool(np.allclose(k, k[0], rtol=1e-12, atol=0.0))

    def element_of(self, y: np.ndarray) -> np.ndarray:
        """Index of the element containing each y (right-closed at y=1)."""
        idx = np.searchsorted(self.nodes, y, side="right") - 1
        return np.clip(idx, 0, self.n - 2)


def uniform_mesh(n: int) -> Mesh:
    if n < 3:
        raise ValueError("need n >= 3 nodes")
    return Mesh(np.linspace(0.0, 1.0, n))


def graded_mesh(n: int, ratio: float) -> Mesh:
    """Geometric grading: consecutive element sizes scale by ratio^(1/(n-2))."""
    if n < 3:
        raise ValueError("need n >= 3 nodes")
    if ratio <= 0.0:
        raise ValueError("ratio must be positive")
    q = ratio ** (1.0 / (n - 2))
    sizes = q ** np.arange(n - 1)
    nodes = np.concatenate([[0.0], np.cumsum(sizes)])
    nodes /= nodes[-1]
    nodes[-1] = 1.0
    return Mesh(nodes)


def build_mesh(spec) -> Mesh:
    """Build a mesh from an int (uniform), a node sequence, or ("graded", n, ratio)."""
    if isinstance(spec, Mesh):
        return spec
    if isinstance(spec, int):
        return uniform_mesh(spec)
    if isinstance(spec, (tuple, list)) and len(spec) == 3 and spec[0] == "graded":
        return graded_mesh(int(spec[1]), float(spec[2]))
    return Mesh(np.asarray(spec, dtype=float))


class HatBasis:
    """Evaluation of the nodal hat functions phi_i and their derivatives."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh

    def phi(self, i: int, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        nodes = self.mesh.nodes
        out = np.zeros_like(y)
        if i > 0:
            k = nodes[i] - nodes[i - 1]
            m = (y >= nodes[i - 1]) & (y <= nodes[i])
            out[m] = (y[m] - nodes[i - 1]) / k
        if i < self.mesh.n - 1:
            k = nodes[i + 1] - nodes[i]
            m = (y > nodes[i]) & (y <= nodes[i + 1])
            out[m] = (nodes[i + 1] - y[m]) / k
        if i == 0:
            out[y == nodes[0]] = 1.0
        return out

    def dphi(self, i: int, y) -> np.ndarray:
        """Derivative of phi_i (taken from the element to the left at nodes)."""
        y = np.asarray(y, dtype=float)
        nodes = self.mesh.nodes
        out = np.zeros_like(y)
        if i > 0:
            k = nodes[i] - nodes[i - 1]
            m = (y > nodes[i - 1]) & (y <= nodes[i])
            out[m] = 1.0 / k
        if i < self.mesh.n - 1:
            k = nodes[i + 1] - nodes[i]
            m = (y > nodes[i]) & (y <= nodes[i + 1])
            out[m] = -1.0 / k
        if i == 0:
            out[y == 0.0] = -1.0 / (nodes[1] - nodes[0])
        elif i == 1:
            out[y == 0.0] = 1.0 / (nodes[1] - nodes[0])
        return out


@dataclass(frozen=True)
class NodalFunction:
    """Piecewise-linear function given by nodal coefficients on a mesh."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != (self.mesh.n,):
            raise ValueError("values length must equal node count")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if np.any((y < 0.0) | (y > 1.0)):
            raise ValueError("evaluation point outside [0, 1]")
        return np.interp(y, self.mesh.nodes, self.values)

    def derivative(self, y):
        """Piecewise-constant derivative (value of the containing element)."""
        y = np.asarray(y, dtype=float)
        if np.any((y < 0.0) | (y > 1.0)):
            raise ValueError("evaluation point outside [0, 1]")
        slopes = np.diff(self.values) / self.mesh.element_sizes
        return slopes[self.mesh.element_of(y)]

    def element_slopes(self) -> np.ndarray:
        return np.diff(self.values) / self.mesh.element_sizes


def interpolate(f: Callable, mesh: Mesh) -> NodalFunction:
    """Nodal (Lagrange) interpolant of f onto the piecewise-linear space."""
    vals = np.asarray(f(mesh.nodes), dtype=float)
    if vals.shape != mesh.nodes.shape:
        vals = np.array([float(f(y)) for y in mesh.nodes])
    if not np.all(np.isfinite(vals)):
        raise ValueError("function evaluated to non-finite values at mesh nodes")
    return NodalFunction(mesh, vals)


# 5-point Gauss-Legendre rule on [-1, 1]
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(5)


def project_l2(f: Callable, mesh: Mesh) -> NodalFunction:
    """L2 projection of f onto the piecewise-linear space (mass-matrix solve)."""
    from scipy.linalg import solve_banded

    from .assembly import assemble

    n = mesh.n
    rhs = np.zeros(n)
    nodes = mesh.nodes
    for e in range(n - 1):
        a, b = nodes[e], nodes[e + 1]
        k = b - a
        yq = 0.5 * (a + b) + 0.5 * k * _GAUSS_X
        wq = 0.5 * k * _GAUSS_W
        fq = np.asarray(f(yq), dtype=float)
        rhs[e] += np.sum(wq * fq * (b - yq) / k)
        rhs[e + 1] += np.sum(wq * fq * (yq - a) / k)
    ops = assemble(mesh)
    ab = np.zeros((3, n))
    ab[0, 1:] = ops.M_upper
    ab[1] = ops.M_diag
    ab[2, :-1] = ops.M_lower
    return NodalFunction(mesh, solve_banded((1, 1), ab, rhs))
