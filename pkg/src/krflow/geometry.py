"""Periodic-grid calculus on the flat torus.

Fields live on a uniform grid over the 2n real coordinate axes of C^n/(2*pi*Z)^2n,
with z_j = x_j + i*y_j.  A reduction profile (``active_axes``) declares the axes a
field may actually vary along; derivatives along the remaining axes are identically
zero.  Differentiation is pseudospectral by default, with a 4th-order centered
finite-difference backend (``backend="fd4"``) kept as an independent cross-check.

Axis convention: axis a in [0, n) is x_{a+1}, axis n + a is y_{a+1}.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace

import numpy as np

PERIOD = 2.0 * np.pi

HERMITIAN_TOL = 1e-12

BACKENDS = ("spectral", "fd4")


class PositivityError(RuntimeError):
    """A matrix field failed a positive-definiteness guard.

    Carries the offending smallest eigenvalue and the grid index where it occurred.
    """

    def __init__(self, message, min_eigenvalue=None, location=None, t=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.location = location
        self.t = t


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic grid over the active real axes of an n-dimensional torus.

    ``active_axes`` is a subset of range(2n); it may be empty, in which case every
    field on the grid is spatially constant (stored as a 0-d array).
    """

    n: int
    active_axes: tuple = ()
    resolution: int = 16
    backend: str = "spectral"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"complex dimension must be >= 1, got {self.n}")
        axes = tuple(int(a) for a in self.active_axes)
        object.__setattr__(self, "active_axes", axes)
        if len(set(axes)) != len(axes) or any(not 0 <= a < 2 * self.n for a in axes):
            raise ValueError(f"active_axes must be distinct axes in [0, {2 * self.n}), got {axes}")
        if tuple(sorted(axes)) != axes:
            raise ValueError(f"active_axes must be sorted, got {axes}")
        if self.resolution < 4 or self.resolution % 2 != 0:
            raise ValueError(f"resolution must be an even integer >= 4, got {self.resolution}")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")

    @property
    def shape(self):
        return (self.resolution,) * len(self.active_axes)

    @property
    def spacing(self):
        return PERIOD / self.resolution

    @property
    def num_points(self):
        return self.resolution ** len(self.active_axes)

    def axis_name(self, axis):
        return f"x{axis + 1}" if axis < self.n else f"y{axis - self.n + 1}"

    def direction_of_axis(self, axis):
        """Complex direction j in [0, n) that real axis ``axis`` belongs to."""
        return axis if axis < self.n else axis - self.n

    @property
    def active_directions(self):
        return tuple(sorted({self.direction_of_axis(a) for a in self.active_axes}))

    def coordinate(self, axis):
        """Coordinate array for one active axis, broadcast to the grid shape."""
        if axis not in self.active_axes:
            raise ValueError(f"axis {axis} ({self.axis_name(axis)}) is not active")
        pos = self.active_axes.index(axis)
        x = np.arange(self.resolution) * self.spacing
        shp = [1] * len(self.active_axes)
        shp[pos] = self.resolution
        return np.broadcast_to(x.reshape(shp), self.shape)

    def with_backend(self, backend):
        return replace(self, backend=backend)

    def zeros(self):
        return ScalarField(self, np.zeros(self.shape))

    def constant(self, value):
        return ScalarField(self, np.full(self.shape, float(value)))


@dataclass(frozen=True)
class ScalarField:
    """Real scalar field over the active grid. Values must be finite everywhere."""

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("scalar field contains non-finite values")
        object.__setattr__(self, "values", v)

    def mean(self):
        return float(np.mean(self.values))

    def min(self):
        return float(np.min(self.values))

    def max(self):
        return float(np.max(self.values))


@dataclass(frozen=True)
class HermitianMatrixField:
    """Pointwise n-by-n hermitian matrix over the active grid."""

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        want = self.grid.shape + (self.grid.n, self.grid.n)
        if v.shape != want:
            raise ValueError(f"values shape {v.shape} does not match {want}")
        if not np.all(np.isfinite(v)):
            raise ValueError("matrix field contains non-finite values")
        dev = np.max(np.abs(v - np.conj(np.swapaxes(v, -1, -2))))
        scale = max(1.0, float(np.max(np.abs(v))))
        if dev > HERMITIAN_TOL * scale:
            raise ValueError(f"matrix field is not hermitian (max deviation {dev:.3e})")
        object.__setattr__(self, "values", v)


# -- differentiation backends -------------------------------------------------


@functools.lru_cache(maxsize=None)
def _wavenumbers(grid):
    """Integer wavenumbers per active axis, shaped for broadcasting.

    The Nyquist mode is zeroed (symmetric assignment), so first derivatives of
    real band-limited data stay real and d^2 = d o d exactly.
    """
    m = grid.resolution
    k = np.fft.fftfreq(m, d=1.0 / m)
    k[m // 2] = 0.0
    out = {}
    for pos, axis in enumerate(grid.active_axes):
        shp = [1] * len(grid.active_axes)
        shp[pos] = m
        out[axis] = k.reshape(shp)
    return out


@functools.lru_cache(maxsize=None)
def _hessian_plan(grid):
    """Per-entry Fourier multipliers M[j][k] for the complex Hessian.

    H_{j kbar} = 1/4 (d_xj d_xk + d_yj d_yk) + i/4 (d_xj d_yk - d_yj d_xk),
    so in Fourier space the entry is a pure multiplication.  Entries with no
    active-axis overlap are omitted (identically zero).
    """
    n = grid.n
    ks = _wavenumbers(grid)

    def kax(axis):
        return ks.get(axis, None)

    plan = []
    for j in range(n):
        for k in range(j, n):
            kxj, kyj = kax(j), kax(n + j)
            kxk, kyk = kax(k), kax(n + k)
            mult = np.zeros(grid.shape, dtype=complex)
            nonzero = False
            if kxj is not None and kxk is not None:
                mult = mult - 0.25 * (kxj * kxk)
                nonzero = True
            if kyj is not None and kyk is not None:
                mult = mult - 0.25 * (kyj * kyk)
                nonzero = True
            if kxj is not None and kyk is not None:
                mult = mult - 0.25j * (kxj * kyk)
                nonzero = True
            if kyj is not None and kxk is not None:
                mult = mult + 0.25j * (kyj * kxk)
                nonzero = True
            if nonzero:
                plan.append((j, k, mult))
    return tuple(plan)


def _fd_first(values, pos, h):
    """4th-order centered first derivative along array axis ``pos``."""
    r = np.roll
    return (-r(values, -2, axis=pos) + 8 * r(values, -1, axis=pos)
            - 8 * r(values, 1, axis=pos) + r(values, 2, axis=pos)) / (12.0 * h)


def _fd_second(values, pos, h):
    """4th-order centered pure second derivative along array axis ``pos``."""
    r = np.roll
    return (-r(values, -2, axis=pos) + 16 * r(values, -1, axis=pos) - 30 * values
            + 16 * r(values, 1, axis=pos) - r(values, 2, axis=pos)) / (12.0 * h * h)


def _second_cross(grid, values, axis_a, axis_b):
    """d_a d_b of raw values; zero when either axis is inactive."""
    if axis_a not in grid.active_axes or axis_b not in grid.active_axes:
        return None
    pa = grid.active_axes.index(axis_a)
    pb = grid.active_axes.index(axis_b)
    h = grid.spacing
    if axis_a == axis_b:
        return _fd_second(values, pa, h)
    return _fd_first(_fd_first(values, pb, h), pa, h)


def hessian_matrix(grid, values):
    """Raw complex Hessian of raw real values; array of shape grid.shape + (n, n)."""
    n = grid.n
    out = np.zeros(grid.shape + (n, n), dtype=complex)
    if not grid.active_axes:
        return out
    if grid.backend == "spectral":
        vhat = np.fft.fftn(values)
        for j, k, mult in _hessian_plan(grid):
            h = np.fft.ifftn(mult * vhat)
            if j == k:
                out[..., j, j] = h.real
            else:
                out[..., j, k] = h
                out[..., k, j] = np.conj(h)
        return out
    for j in range(n):
        for k in range(j, n):
            dxx = _second_cross(grid, values, j, k)
            dyy = _second_cross(grid, values, n + j, n + k)
            dxy = _second_cross(grid, values, j, n + k)
            dyx = _second_cross(grid, values, n + j, k)
            entry = np.zeros(grid.shape, dtype=complex)
            hit = False
            for term, w in ((dxx, 0.25), (dyy, 0.25)):
                if term is not None:
                    entry = entry + w * term
                    hit = True
            for term, w in ((dxy, 0.25j), (dyx, -0.25j)):
                if term is not None:
                    entry = entry + w * term
                    hit = True
            if not hit:
                continue
            if j == k:
                out[..., j, j] = entry.real
            else:
                out[..., j, k] = entry
                out[..., k, j] = np.conj(entry)
    return out


def spectral_derivative(f: ScalarField, axis, order=1):
    """Derivative of a scalar field along one real axis (order 1 or 2).

    Uses the grid's backend; inactive axes give the zero field.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    grid = f.grid
    if axis not in grid.active_axes:
        return grid.zeros()
    pos = grid.active_axes.index(axis)
    if grid.backend == "fd4":
        fn = _fd_first if order == 1 else _fd_second
        return ScalarField(grid, fn(f.values, pos, grid.spacing))
    k = _wavenumbers(grid)[axis]
    vhat = np.fft.fftn(f.values)
    out = np.fft.ifftn(((1j * k) ** order) * vhat).real
    return ScalarField(grid, out)


# -- pointwise matrix kernels (raw arrays, hot path) ---------------------------


def det_hermitian(values, n):
    """Real determinant of hermitian matrices stacked in the trailing axes."""
    if n == 1:
        return values[..., 0, 0].real.copy()
    if n == 2:
        b = values[..., 0, 1]
        return (values[..., 0, 0].real * values[..., 1, 1].real
                - (b.real * b.real + b.imag * b.imag))
    return np.linalg.det(values).real


def min_eig_hermitian(values, n):
    """Smallest eigenvalue; closed form for n <= 2, LAPACK iteration above."""
    if n == 1:
        return values[..., 0, 0].real.copy()
    if n == 2:
        a = values[..., 0, 0].real
        d = values[..., 1, 1].real
        b = values[..., 0, 1]
        mid = 0.5 * (a + d)
        rad = np.sqrt((0.5 * (a - d)) ** 2 + b.real * b.real + b.imag * b.imag)
        return mid - rad
    return np.linalg.eigvalsh(values)[..., 0]


def max_eig_hermitian(values, n):
    if n == 1:
        return values[..., 0, 0].real.copy()
    if n == 2:
        a = values[..., 0, 0].real
        d = values[..., 1, 1].real
        b = values[..., 0, 1]
        mid = 0.5 * (a + d)
        rad = np.sqrt((0.5 * (a - d)) ** 2 + b.real * b.real + b.imag * b.imag)
        return mid + rad
    return np.linalg.eigvalsh(values)[..., -1]


def inverse_trace_pair(g_values, a_values):
    """Pointwise trace of g^{-1} a for stacked hermitian matrices (real part)."""
    sol = np.linalg.solve(g_values, a_values)
    return np.einsum("...ii", sol).real


# -- field-level operations ----------------------------------------------------


def complex_hessian(phi: ScalarField) -> HermitianMatrixField:
    """Coefficient matrix of i d dbar phi, with d_z = (d_x - i d_y)/2.

    Each component has zero grid mean: both backends annihilate the constant mode.
    """
    return HermitianMatrixField(phi.grid, hessian_matrix(phi.grid, phi.values))


def form_field(matrix, phi: ScalarField) -> HermitianMatrixField:
    """Constant representative plus potential: A + i d dbar phi."""
    grid = phi.grid
    a = np.asarray(matrix, dtype=complex)
    if a.shape != (grid.n, grid.n):
        raise ValueError(f"class matrix shape {a.shape} does not match n={grid.n}")
    h = hessian_matrix(grid, phi.values)
    return HermitianMatrixField(grid, a + h)


def ma_determinant(g: HermitianMatrixField) -> ScalarField:
    """Pointwise determinant of the metric matrix (the Monge-Ampere density)."""
    return ScalarField(g.grid, det_hermitian(g.values, g.grid.n))


def min_eigenvalue(g: HermitianMatrixField) -> ScalarField:
    return ScalarField(g.grid, min_eig_hermitian(g.values, g.grid.n))


def _require_positive(g: HermitianMatrixField, what):
    ev = min_eig_hermitian(g.values, g.grid.n)
    worst = float(np.min(ev))
    if worst <= 0.0:
        loc = np.unravel_index(int(np.argmin(ev)), ev.shape) if ev.shape else ()
        raise PositivityError(
            f"{what} requires a positive definite metric; "
            f"min eigenvalue {worst:.6e} at grid index {loc}",
            min_eigenvalue=worst, location=loc)


def trace_pair(g: HermitianMatrixField, alpha: HermitianMatrixField) -> ScalarField:
    """Trace of alpha with respect to the metric g: g^{kbar j} alpha_{j kbar}."""
    _require_positive(g, "trace_pair")
    return ScalarField(g.grid, inverse_trace_pair(g.values, alpha.values))


def laplacian(g: HermitianMatrixField, f: ScalarField) -> ScalarField:
    """Laplacian of f with respect to the metric g."""
    _require_positive(g, "laplacian")
    h = hessian_matrix(f.grid, f.values)
    return ScalarField(f.grid, inverse_trace_pair(g.values, h))


def ricci_of_density(rho: ScalarField) -> HermitianMatrixField:
    """Ricci form of the measure rho d(mu): minus the complex Hessian of log rho."""
    if np.any(rho.values <= 0.0):
        raise ValueError("density must be strictly positive")
    return HermitianMatrixField(rho.grid, -hessian_matrix(rho.grid, np.log(rho.values)))


def ricci_of_metric(g: HermitianMatrixField) -> HermitianMatrixField:
    """Ricci form of a metric field: minus the complex Hessian of log det g."""
    _require_positive(g, "ricci_of_metric")
    logdet = np.log(det_hermitian(g.values, g.grid.n))
    return HermitianMatrixField(g.grid, -hessian_matrix(g.grid, logdet))


def integrate(f: ScalarField, w: ScalarField = None) -> float:
    """Weighted mean of f against w under normalized Haar measure (w defaults to 1)."""
    if w is None:
        return float(np.mean(f.values))
    if np.any(w.values < 0.0):
        raise ValueError("integration weights must be nonnegative")
    return float(np.mean(f.values * w.values))
