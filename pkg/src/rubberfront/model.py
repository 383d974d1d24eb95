"""Physical model data: parameter sets, coefficient functions, admissibility checks.

The physical problem is one-dimensional diffusion of a solvent into a rubber
slab of thickness L.  The solvent occupies [0, s(t)] with s(t) the moving
penetration front; the front is driven by a kinetic law
s'(t) = a0*(m(t, s(t)) - sigma(s(t))).  This module holds the dimensional
parameters, the dimensionless groups obtained by scaling lengths with L,
time with L^2/D and concentrations with m0, and the validation of parameter
admissibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "CoefficientFunction",
    "PiecewiseLinear",
    "PhysicalParams",
    "DimensionlessParams",
    "InitialCondition",
    "ValidationReport",
    "validate_assumptions",
    "nondimensionalize",
    "back_transform",
    "PhysicalTrajectory",
    "preset",
    "PRESETS",
]

# kind codes shared with the compiled kernels
_KIND_CODES = {"constant": 0, "linear": 1, "smooth-cutoff": 2}


@dataclass(frozen=True)
class CoefficientFunction:
    """Scalar coefficient function of one variable (sigma of s, or beta of m).

    kinds:
      * ``constant``:      value ``c0`` everywhere
      * ``linear``:        ``slope * x`` (zero at zero)
      * ``smooth-cutoff``: 0 for x <= 0, C^1 monotone ramp on (0, ramp),
        constant plateau ``c0`` for x >= ramp (cubic smoothstep ramp)
    """

    kind: str
    c0: float = 0.0
    slope: float = 0.0
    ramp: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown coefficient kind {self.kind!r}")
        if self.kind == "smooth-cutoff" and self.ramp <= 0.0:
            raise ValueError("smooth-cutoff requires ramp > 0")

    @staticmethod
    def constant(value: float) -> "CoefficientFunction":
        return CoefficientFunction("constant", c0=value)

    @staticmethod
    def linear(slope: float) -> "CoefficientFunction":
        return CoefficientFunction("linear", slope=slope)

    @staticmethod
    def smooth_cutoff(plateau: float, ramp: float) -> "CoefficientFunction":
        return CoefficientFunction("smooth-cutoff", c0=plateau, ramp=ramp)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.broadcast_to(np.float64(self.c0), x.shape).copy() if x.shape else float(self.c0)
        if self.kind == "linear":
            out = self.slope * x
            return out if x.shape else float(out)
        t = np.clip(x / self.ramp, 0.0, 1.0)
        out = self.c0 * t * t * (3.0 - 2.0 * t)
        return out if x.shape else float(out)

    def kernel_encoding(self) -> tuple[int, float, float]:
        """(kind code, p0, p1) triple consumed by the integration kernels."""
        if self.kind == "constant":
            return 0, self.c0, 0.0
        if self.kind == "linear":
            return 1, self.slope, 0.0
        return 2, self.c0, self.ramp

    def scaled(self, arg_scale: float, value_scale: float) -> "CoefficientFunction":
        """Return g with g(x) = value_scale * f(arg_scale * x)."""
        if self.kind == "constant":
            return CoefficientFunction.constant(self.c0 * value_scale)
        if self.kind == "linear":
            return CoefficientFunction.linear(self.slope * arg_scale * value_scale)
        return CoefficientFunction.smooth_cutoff(self.c0 * value_scale, self.ramp / arg_scale)


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-linear function of time given by sample points (for b(t))."""

    ts: tuple[float, ...]
    vs: tuple[float, ...]

    def __post_init__(self):
        if len(self.ts) != len(self.vs) or len(self.ts) < 1:
            raise ValueError("ts and vs must be equal-length, nonempty")
        if any(b <= a for a, b in zip(self.ts, self.ts[1:])):
            raise ValueError("ts must be strictly increasing")

    def __call__(self, t):
        return np.interp(t, self.ts, self.vs)

    def scaled(self, arg_scale: float, value_scale: float) -> "PiecewiseLinear":
        return PiecewiseLinear(
            tuple(t / arg_scale for t in self.ts),
            tuple(v * value_scale for v in self.vs),
        )


BoundaryFunction = CoefficientFunction | PiecewiseLinear


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional model constants (units: mm, min, gram)."""

    D: float            # diffusivity, mm^2/min
    beta: float         # absorption rate at the contact face, mm/min
    H: float            # Henry's constant, dimensionless
    a0: float           # kinetic coefficient of the front law, mm^4/min/gram
    s0: float           # initial front position, mm
    L: float            # slab thickness, mm
    m0: float           # reference concentration, gram/mm^3
    Tf: float           # final observation time, min
    b: BoundaryFunction = field(default=CoefficientFunction.constant(1.0))
    sigma: CoefficientFunction = field(default=CoefficientFunction.linear(0.1))

    def b_range(self, n: int = 256) -> tuple[float, float]:
        """Range of b over [0, Tf] sampled at n points."""
        ts = np.linspace(0.0, self.Tf, n)
        vals = np.asarray(self.b(ts), dtype=float)
        return float(vals.min()), float(vals.max())


@dataclass(frozen=True)
class InitialCondition:
    """Dimensionless initial concentration u0 on the transformed interval [0, 1].

    Either a closed-form callable of y, or nodal samples (interpreted as a
    piecewise-linear function on a uniform grid).  ``d2`` optionally supplies
    the exact second derivative for the estimator's data term; when absent it
    is obtained by central differences (exact zero for constant and samples).
    """

    u0: Callable[[np.ndarray], np.ndarray] | None = None
    samples: tuple[float, ...] | None = None
    d2: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if (self.u0 is None) == (self.samples is None):
            raise ValueError("provide exactly one of u0 (callable) or samples")

    @staticmethod
    def constant(value: float) -> "InitialCondition":
        v = float(value)
        return InitialCondition(u0=lambda y, _v=v: np.full_like(np.asarray(y, dtype=float), _v),
                                d2=lambda y: np.zeros_like(np.asarray(y, dtype=float)))

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        if self.u0 is not None:
            out = np.asarray(self.u0(y), dtype=float)
            if not np.all(np.isfinite(out)):
                raise ValueError("initial condition evaluated to non-finite values")
            return out
        grid = np.linspace(0.0, 1.0, len(self.samples))
        return np.interp(y, grid, self.samples)

    def second_derivative(self, y):
        y = np.asarray(y, dtype=float)
        if self.d2 is not None:
            return np.asarray(self.d2(y), dtype=float)
        if self.samples is not None:
            return np.zeros_like(y)
        eps = 1e-5
        yc = np.clip(y, eps, 1.0 - eps)
        return (self(yc + eps) - 2.0 * self(yc) + self(yc - eps)) / eps**2


@dataclass(frozen=True)
class DimensionlessParams:
    """Dimensionless groups of the transformed fixed-domain problem."""

    Bi: float                     # mass-transfer Biot number, beta*L/D
    A0: float                     # Thiele modulus of the front law, a0*m0*L/D
    h0: float                     # initial dimensionless front position, s0/L
    T: float                      # dimensionless final time, Tf*D/L^2
    H: float
    m0: float
    b_dimless: BoundaryFunction   # function of tau
    sigma_dimless: CoefficientFunction  # function of h

    def b_dimless_range(self, n: int = 256) -> tuple[float, float]:
        ts = np.linspace(0.0, self.T, n)
        vals = np.asarray(self.b_dimless(ts), dtype=float)
        return float(vals.min()), float(vals.max())


@dataclass
class ValidationReport:
    """Per-assumption admissibility results."""

    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def add(self, name: str, passed: bool, message: str = "") -> None:
        self.checks.append((name, passed, message))

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, msg) for name, passed, msg in self.checks if not passed]

    def __str__(self) -> str:
        lines = [f"[{'PASS' if p else 'FAIL'}] {name}" + (f": {m}" if m else "")
                 for name, p, m in self.checks]
        lines += [f"[WARN] {w}" for w in self.warnings]
        return "\n".join(lines)


def validate_assumptions(p: PhysicalParams, u0: InitialCondition) -> ValidationReport:
    """Check the admissibility restrictions on parameters and initial data.

    The report is pure: identical inputs produce identical reports.  Solver
    entry points reject configurations whose report is not all-pass.
    """
    rep = ValidationReport()

    positives = {"a0": p.a0, "H": p.H, "D": p.D, "beta": p.beta, "Tf": p.Tf, "m0": p.m0}
    bad = [f"{k}={v}" for k, v in positives.items() if not (v > 0 and math.isfinite(v))]
    rep.add("positive-constants", not bad,
            "all of a0, H, D, beta, Tf, m0 must be positive" + (f" (got {', '.join(bad)})" if bad else ""))

    rep.add("initial-front-position", 0.0 < p.s0 < p.L,
            f"require 0 < s0 < L, got s0={p.s0}, L={p.L}")

    b_low, b_high = p.b_range()
    rep.add("reservoir-bounds", b_low > 0.0 and math.isfinite(b_high),
            f"b(t) must stay in [b_low, b_high] with b_low > 0; sampled range [{b_low}, {b_high}]")

    # sigma: nonnegative and nondecreasing on the reachable front range [0, L]
    ss = np.linspace(0.0, p.L, 256)
    sv = np.asarray(p.sigma(ss), dtype=float)
    rep.add("front-resistance-shape",
            bool(np.all(sv >= -1e-15) and np.all(np.diff(sv) >= -1e-12)),
            "sigma must be nonnegative and nondecreasing on [0, L]")

    if p.sigma.kind == "smooth-cutoff":
        # the printed constraint c0 < min(2*sigma(0), b_high/H) is vacuous when
        # sigma(0) = 0; only warn, never fail, on it
        lim = min(2.0 * float(p.sigma(0.0)), b_high / p.H)
        if not (p.sigma.c0 < lim):
            rep.warn(f"cutoff plateau c0={p.sigma.c0} does not satisfy "
                     f"c0 < min(2*sigma(0), b_high/H) = {lim}; constraint is "
                     "vacuous for sigma(0)=0 and is not enforced")
        rep.add("front-resistance-ramp", p.s0 < p.sigma.ramp,
                f"require s0 < ramp endpoint, got s0={p.s0}, ramp={p.sigma.ramp}")

    # initial data bounds: sigma_dimless(0) <= u0 <= b_high/(H*m0) pointwise
    ys = np.linspace(0.0, 1.0, 256)
    try:
        uv = u0(ys)
        lo = float(p.sigma(0.0)) / p.m0
        hi = b_high / (p.H * p.m0)
        ok = bool(np.all(uv >= lo - 1e-12) and np.all(uv <= hi + 1e-12))
        rep.add("initial-data-bounds", ok,
                f"u0 must lie in [{lo}, {hi}]; sampled range [{uv.min()}, {uv.max()}]")
    except ValueError as exc:
        rep.add("initial-data-bounds", False, str(exc))

    return rep


def nondimensionalize(p: PhysicalParams) -> DimensionlessParams:
    """Map dimensional parameters to the dimensionless groups.

    Lengths are scaled by L, time by L^2/D and concentrations by m0, so the
    transformed bulk equation has unit diffusion coefficient and the front
    position h = s/L lives in (0, 1].
    """
    Bi = p.beta * p.L / p.D
    A0 = p.a0 * p.m0 * p.L / p.D
    h0 = p.s0 / p.L
    T = p.Tf * p.D / p.L**2
    vals = {"Bi": Bi, "A0": A0, "h0": h0, "T": T}
    bad = [k for k, v in vals.items() if not math.isfinite(v)]
    if bad:
        raise ValueError(f"non-finite dimensionless groups: {bad}")
    time_scale = p.L**2 / p.D  # t = time_scale * tau
    b_dimless = p.b.scaled(arg_scale=time_scale, value_scale=1.0 / p.m0)
    sigma_dimless = p.sigma.scaled(arg_scale=p.L, value_scale=1.0 / p.m0)
    return DimensionlessParams(Bi=Bi, A0=A0, h0=h0, T=T, H=p.H, m0=p.m0,
                               b_dimless=b_dimless, sigma_dimless=sigma_dimless)


@dataclass(frozen=True)
class PhysicalTrajectory:
    """Back-transformed results in physical units (minutes, mm, gram/mm^3)."""

    t: np.ndarray        # times, min
    s: np.ndarray        # front position per time, mm
    x: np.ndarray        # fixed physical sample grid, mm
    m: np.ndarray        # concentration m(t, x), (nt, nx); NaN outside [0, s(t)]
    outside: np.ndarray  # boolean mask, True where x > s(t)


def back_transform(traj, p: PhysicalParams, n_x: int = 201) -> PhysicalTrajectory:
    """Undo the non-dimensionalization and the domain-fixing map y = x/s(t)."""
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    time_scale = p.L**2 / p.D
    t = traj.times * time_scale
    s = traj.hs * p.L
    x = np.linspace(0.0, p.L, n_x)
    nt = len(t)
    m = np.full((nt, n_x), np.nan)
    outside = np.zeros((nt, n_x), dtype=bool)
    node_grid = traj.mesh.nodes
    for i in range(nt):
        y = x / s[i]
        inside = y <= 1.0 + 1e-14
        outside[i] = ~inside
        m[i, inside] = p.m0 * np.interp(np.clip(y[inside], 0.0, 1.0),
                                        node_grid, traj.alphas[i])
    return PhysicalTrajectory(t=t, s=s, x=x, m=m, outside=outside)


def _dense_params() -> PhysicalParams:
    return PhysicalParams(D=3.66e-4, beta=0.564, H=2.5, a0=500.0,
                          s0=0.01, L=1.0, m0=0.1, Tf=40.0,
                          b=CoefficientFunction.constant(1.0),
                          sigma=CoefficientFunction.linear(1.0 / 10.0))


def _foam_params() -> PhysicalParams:
    return PhysicalParams(D=3.66e-4, beta=0.564, H=2.5, a0=2000.0,
                          s0=0.01, L=1.0, m0=0.1, Tf=40.0,
                          b=CoefficientFunction.constant(1.0),
                          sigma=CoefficientFunction.linear(1.0 / 50.0))


PRESETS = {"dense": _dense_params, "foam": _foam_params}


def preset(name: str) -> tuple[PhysicalParams, InitialCondition]:
    """Built-in parameter sets for the dense and foam rubber cases.

    The slab thickness L is a free choice in these parameter sets; the
    default L = 1 mm makes the dimensionless front position coincide with the
    front position in mm.
    """
    try:
        params = PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
    return params, InitialCondition.constant(1.0)
