"""Target densities: the 2D particle-in-a-box benchmark and Gaussian mixtures.

Every target exposes ``log_density`` (which may return -inf for zero-density
points; never +inf, never NaN) and ``grad_log_density`` (only valid where the
log density is finite). Zero-density regions are encoded as a -inf sentinel
rather than an error so the Metropolis-Hastings step rejects such proposals
naturally.
"""

import math
from dataclasses import dataclass

import numpy as np

NEG_INF = float("-inf")


class TargetDensity:
    """Interface shared by all targets: log density and its gradient."""

    name = "target"
    dim = 0

    def log_density(self, point) -> float:
        raise NotImplementedError

    def grad_log_density(self, point) -> np.ndarray:
        raise NotImplementedError


@dataclass
class PhysConstants:
    """Model-unit physical constants entering the box energy formula."""

    rho: float = 1.0
    hbar: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        if self.rho <= 0 or self.hbar <= 0 or self.m <= 0:
            raise ValueError("physical constants must be strictly positive")


def _axis_position(x: float, n: int, length: float) -> float | None:
    """Scaled coordinate t = n*x/L in (0, n) and off integer nodes, else None.

    Integer t (including the 0 and n box walls) is exactly where the
    standing-wave factor sin(pi*t) vanishes.
    """
    if x <= 0.0 or x >= length:
        return None
    t = n * x / length
    if t == math.floor(t):
        return None
    return t


class ParticleBox2D(TargetDensity):
    """Squared eigenfunction density of a particle in a 2D box.

    p(x, y) = (2/sqrt(Lx*Ly))^2 sin^2(nx pi x / Lx) sin^2(ny pi y / Ly)
    on [0, Lx] x [0, Ly]. The density has nx*ny isolated modes separated
    by zero-density nodal lines, which makes it a hard multimodal target
    for local samplers.

    The log-gradient components diverge like cot near nodal lines, so each
    is clamped to [-gmax, gmax]; clamping preserves direction and keeps the
    Euler proposal finite.
    """

    name = "particle_box"
    dim = 2

    def __init__(self, lx: float, ly: float, nx: int, ny: int, gmax: float = 1e6):
        if lx <= 0 or ly <= 0:
            raise ValueError("box side lengths must be positive")
        if nx < 1 or ny < 1 or nx != int(nx) or ny != int(ny):
            raise ValueError("quantum numbers must be integers >= 1")
        if gmax <= 0:
            raise ValueError("gmax must be positive")
        self.lx = float(lx)
        self.ly = float(ly)
        self.nx = int(nx)
        self.ny = int(ny)
        self.gmax = float(gmax)
        self._log_norm = math.log(4.0 / (self.lx * self.ly))

    def log_density(self, point) -> float:
        x = float(point[0])
        y = float(point[1])
        tx = _axis_position(x, self.nx, self.lx)
        ty = _axis_position(y, self.ny, self.ly)
        if tx is None or ty is None:
            return NEG_INF
        sx = math.sin(math.pi * tx)
        sy = math.sin(math.pi * ty)
        if sx == 0.0 or sy == 0.0:
            return NEG_INF
        return self._log_norm + 2.0 * math.log(abs(sx)) + 2.0 * math.log(abs(sy))

    def grad_log_density(self, point) -> np.ndarray:
        x = float(point[0])
        y = float(point[1])
        tx = _axis_position(x, self.nx, self.lx)
        ty = _axis_position(y, self.ny, self.ly)
        if tx is None or ty is None:
            raise ValueError("gradient requested at a zero-density point")
        ux = math.pi * tx
        uy = math.pi * ty
        sx = math.sin(ux)
        sy = math.sin(uy)
        if sx == 0.0 or sy == 0.0:
            raise ValueError("gradient requested at a zero-density point")
        gmax = self.gmax
        gx = 2.0 * (self.nx * math.pi / self.lx) * (math.cos(ux) / sx)
        gy = 2.0 * (self.ny * math.pi / self.ly) * (math.cos(uy) / sy)
        gx = min(max(gx, -gmax), gmax)
        gy = min(max(gy, -gmax), gmax)
        return np.array([gx, gy])

    def energy(self, consts: PhysConstants = PhysConstants()) -> float:
        """Permitted energy of the (nx, ny) eigenstate; reporting metadata only."""
        scale = consts.rho**2 * consts.hbar**2 / (2.0 * consts.m)
        return scale * (self.nx**2 / self.lx**2 + self.ny**2 / self.ly**2)

    def _axis_cell_masses(self, n: int, length: float, res: int) -> np.ndarray:
        # exact integral of (2/L) sin^2(n pi x / L) over each cell
        a = n * math.pi / length

        def antideriv(x):
            return 0.5 * x - math.sin(2.0 * a * x) / (4.0 * a)

        edges = [length * i / res for i in range(res + 1)]
        return np.array(
            [(2.0 / length) * (antideriv(edges[i + 1]) - antideriv(edges[i])) for i in range(res)]
        )

    def analytic_grid(self, res: int) -> np.ndarray:
        """Cell-averaged probability mass on a res x res partition of the box.

        Row i covers x in [i*Lx/res, (i+1)*Lx/res), column j the matching
        y strip. The density factorizes per axis, so cells are products of
        closed-form sin^2 integrals and the grid sums to 1 up to rounding.
        """
        if res < 2:
            raise ValueError("grid resolution must be at least 2")
        mx = self._axis_cell_masses(self.nx, self.lx, res)
        my = self._axis_cell_masses(self.ny, self.ly, res)
        return np.outer(mx, my)

    def mode_centers(self) -> np.ndarray:
        """Centers of the nx*ny mode basins, ordered x-major."""
        xs = [(2 * i + 1) * self.lx / (2 * self.nx) for i in range(self.nx)]
        ys = [(2 * j + 1) * self.ly / (2 * self.ny) for j in range(self.ny)]
        return np.array([[x, y] for x in xs for y in ys])

    def first_mode_center(self) -> np.ndarray:
        return np.array([self.lx / (2 * self.nx), self.ly / (2 * self.ny)])


class GaussianMixture(TargetDensity):
    """Diagonal-covariance Gaussian mixture used as an analytic validation target.

    Components are (weight, mean, variance) triples; weights are normalized
    at construction so tolerant inputs still satisfy the sum-to-one invariant.
    """

    name = "gauss_mix"

    def __init__(self, components):
        if not components:
            raise ValueError("mixture needs at least one component")
        weights = np.array([float(c[0]) for c in components])
        means = np.array([np.asarray(c[1], dtype=float).ravel() for c in components])
        variances = np.array([np.asarray(c[2], dtype=float).ravel() for c in components])
        if np.any(weights <= 0):
            raise ValueError("component weights must be positive")
        if np.any(variances <= 0):
            raise ValueError("component variances must be positive")
        if means.shape != variances.shape:
            raise ValueError("mean/variance dimensions disagree")
        self.weights = weights / weights.sum()
        self.means = means
        self.variances = variances
        self.dim = means.shape[1]
        self._log_weights = np.log(self.weights)
        # per-component Gaussian normalization constants
        self._log_norms = -0.5 * np.sum(np.log(2.0 * math.pi * variances), axis=1)

    def _check_point(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ValueError(f"point has dimension {point.shape}, target expects ({self.dim},)")
        return point

    def _component_log_densities(self, point: np.ndarray) -> np.ndarray:
        diff = point - self.means
        return self._log_weights + self._log_norms - 0.5 * np.sum(diff * diff / self.variances, axis=1)

    def log_density(self, point) -> float:
        point = self._check_point(point)
        if len(self.weights) == 1:
            diff = point - self.means[0]
            return float(self._log_norms[0] - 0.5 * np.dot(diff / self.variances[0], diff))
        logs = self._component_log_densities(point)
        shift = logs.max()
        return float(shift + math.log(np.exp(logs - shift).sum()))

    def grad_log_density(self, point) -> np.ndarray:
        point = self._check_point(point)
        if len(self.weights) == 1:
            return -(point - self.means[0]) / self.variances[0]
        logs = self._component_log_densities(point)
        shift = logs.max()
        resp = np.exp(logs - shift)
        resp /= resp.sum()
        scores = -(point - self.means) / self.variances
        return resp @ scores


def standard_normal(dim: int = 1) -> GaussianMixture:
    """Unit-variance zero-mean Gaussian as a one-component mixture."""
    return GaussianMixture([(1.0, np.zeros(dim), np.ones(dim))])


def make_target(name: str, params: dict) -> TargetDensity:
    """Build a target from its config block."""
    if name == "particle_box":
        return ParticleBox2D(
            lx=params["Lx"],
            ly=params["Ly"],
            nx=params["nx"],
            ny=params["ny"],
            gmax=params.get("gmax", 1e6),
        )
    if name == "gauss_mix":
        components = [(c["weight"], c["mean"], c["variance"]) for c in params["components"]]
        return GaussianMixture(components)
    raise ValueError(f"unknown target: {name!r}")
