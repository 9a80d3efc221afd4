"""Time integration of the scalar potential flow on periodic torus grids.

The evolution is d(u)/dt = log(det(A(t) + i d dbar u) / rho) - u, starting from
u = 0, where A(t) = L + e^{-t} (omega0 - L).  The "v" gauge adds +k*t to the
right-hand side and describes the same metric flow shifted by the spatially
constant solution of f' + f = -k*t.

Stepping is classical explicit RK4 under step-doubling error control, with a
parabolic stability clamp on dt and a pointwise positivity guard on the metric
at every internal stage.  Spatially constant problems reduce to a linear scalar
ODE; ``homogeneous_oracle`` integrates that reduction independently by
quadrature and is the solver's reference.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad

from . import cohomology
from .geometry import (
    HermitianMatrixField,
    PeriodicGrid,
    PositivityError,
    ScalarField,
    det_hermitian,
    hessian_matrix,
    min_eig_hermitian,
)

RK4_ERROR_EXPONENT = 0.2  # 1/(order+1)
RK4_STABILITY_LIMIT = 2.78  # real-axis stability interval of classical RK4


@dataclass(frozen=True)
class IntegratorSettings:
    rtol: float = 1e-8
    atol: float = 1e-10
    dt_init: float = 1e-2
    dt_min: float = 1e-7
    pos_floor: float = 1e-8
    safety: float = 0.9
    max_growth: float = 2.0
    cfl_safety: float = 0.7
    fixed_dt: float = 0.0  # > 0 disables adaptivity (plain RK4 steps; testing)


@dataclass(frozen=True)
class Scenario:
    """Full problem statement for one flow run."""

    n: int
    grid: PeriodicGrid
    L: cohomology.CohomologyClass
    omega0: cohomology.CohomologyClass
    rho: ScalarField
    gauge: str = "u"
    k_override: int = None
    t_max: float = 10.0
    sample_dt: float = 0.05
    forcing: object = None  # callable(grid, t) -> array; testing only
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    name: str = "scenario"

    def __post_init__(self):
        if self.grid.n != self.n:
            raise ValueError(f"grid has n={self.grid.n}, scenario has n={self.n}")
        L = self.L if isinstance(self.L, cohomology.CohomologyClass) else cohomology.CohomologyClass(self.L)
        w0 = self.omega0 if isinstance(self.omega0, cohomology.CohomologyClass) else cohomology.CohomologyClass(self.omega0)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "omega0", w0)
        if L.n != self.n or w0.n != self.n:
            raise ValueError("class dimensions do not match the scenario dimension")
        if not w0.is_kahler():
            raise ValueError("omega0 must be Kahler (positive definite)")
        if self.rho.grid != self.grid:
            raise ValueError("rho lives on a different grid")
        if np.any(self.rho.values <= 0.0):
            raise ValueError("rho must be strictly positive")
        if self.gauge not in ("u", "v"):
            raise ValueError(f"gauge must be 'u' or 'v', got {self.gauge!r}")
        if self.t_max <= 0 or self.sample_dt <= 0:
            raise ValueError("t_max and sample_dt must be positive")
        T = cohomology.singularity_time(L, w0)
        if math.isfinite(T) and self.t_max >= T:
            raise ValueError(
                f"t_max={self.t_max} reaches the class degeneration time T={T:.6f}")
        if self.k_override is not None and not 0 <= self.k_override <= self.n:
            raise ValueError(f"k_override must lie in [0, {self.n}]")
        if self.gauge == "v" and self.collapse_order() is None:
            raise ValueError("v gauge requires a nef L (collapse order undefined)")

    def collapse_order(self):
        """Collapse order k, the k_override if set, or None when L is not nef."""
        if self.k_override is not None:
            return self.k_override
        if not self.L.is_nef():
            return None
        return cohomology.collapse_order(self.L, self.omega0)

    def class_at(self, t):
        return cohomology.class_path(self.L, self.omega0, t)

    def with_gauge(self, gauge):
        return replace(self, gauge=gauge)


@dataclass(frozen=True)
class FlowState:
    """One sampled state: the active-gauge potential, its cached RHS, the metric."""

    t: float
    u: ScalarField
    u_dot: ScalarField
    metric: HermitianMatrixField


@dataclass(frozen=True)
class Trajectory:
    scenario: Scenario
    states: tuple
    termination: str = "completed"
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        ts = [s.t for s in self.states]
        if ts and (ts[0] != 0.0 or any(b <= a for a, b in zip(ts, ts[1:]))):
            raise ValueError("samples must start at t=0 with strictly increasing times")

    @property
    def times(self):
        return np.array([s.t for s in self.states])

    @property
    def k(self):
        return self.scenario.collapse_order()


def shift_solution(k, t):
    """f(t) with f' + f = -k t, f(0) = 0; spatially constant gauge shift."""
    t = np.asarray(t, dtype=float)
    out = k * (1.0 - np.exp(-t)) - k * t
    return out if out.ndim else float(out)


def shift_rate(k, t):
    t = np.asarray(t, dtype=float)
    out = k * np.exp(-t) - k
    return out if out.ndim else float(out)


class _RhsEvaluator:
    """Precomputed right-hand-side evaluation on raw arrays."""

    def __init__(self, scenario):
        self.sc = scenario
        self.grid = scenario.grid
        self.n = scenario.n
        self.L = scenario.L.matrix
        self.M = scenario.omega0.matrix - scenario.L.matrix
        self.log_rho = np.log(scenario.rho.values)
        self.k = scenario.collapse_order() if scenario.gauge == "v" else 0
        self.pos_floor = scenario.integrator.pos_floor
        self.evals = 0

    def class_at(self, t):
        return self.L + math.exp(-t) * self.M

    def metric(self, u, t):
        return self.class_at(t) + hessian_matrix(self.grid, u)

    def guard(self, g, t):
        ev = min_eig_hermitian(g, self.n)
        worst = float(np.min(ev))
        if not worst > self.pos_floor:
            loc = np.unravel_index(int(np.argmin(ev)), ev.shape) if ev.shape else ()
            raise PositivityError(
                f"metric positivity breached at t={t:.6f}: min eigenvalue "
                f"{worst:.6e} <= {self.pos_floor:.1e} at grid index {loc}",
                min_eigenvalue=worst, location=loc, t=t)
        return ev

    def __call__(self, u, t):
        self.evals += 1
        g = self.metric(u, t)
        self.guard(g, t)
        out = np.log(det_hermitian(g, self.n)) - self.log_rho - u
        if self.sc.gauge == "v":
            out = out + self.k * t
        if self.sc.forcing is not None:
            out = out + self.sc.forcing(self.grid, t)
        return out

    def stable_dt(self, u, t):
        """Parabolic stability bound for explicit RK4 on the linearized flow.

        The Fourier symbol of the metric Laplacian is bounded by the trace of
        the inverse metric restricted to complex directions touched by an
        active axis, times the largest |k_z|^2 on the grid.
        """
        dirs = self.grid.active_directions
        if not dirs:
            return math.inf
        g = self.metric(u, t)
        ginv_diag = np.linalg.inv(g)[..., dirs, dirs].real
        axes_per_dir = np.array(
            [sum(1 for a in self.grid.active_axes if self.grid.direction_of_axis(a) == d)
             for d in dirs], dtype=float)
        kmax = self.grid.resolution // 2 - 1
        lam = float(np.max(np.sum(ginv_diag * axes_per_dir, axis=-1))) * kmax * kmax / 4.0
        if lam <= 0.0:
            return math.inf
        return self.sc.integrator.cfl_safety * RK4_STABILITY_LIMIT / lam


def _rk4_step(rhs_fn, u, t, dt):
    k1 = rhs_fn(u, t)
    k2 = rhs_fn(u + 0.5 * dt * k1, t + 0.5 * dt)
    k3 = rhs_fn(u + 0.5 * dt * k2, t + 0.5 * dt)
    k4 = rhs_fn(u + dt * k3, t + dt)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rhs(state: FlowState, scenario: Scenario) -> ScalarField:
    """Right-hand side of the potential flow at a sampled state."""
    ev = _RhsEvaluator(scenario)
    return ScalarField(scenario.grid, ev(state.u.values, state.t))


def step(state: FlowState, scenario: Scenario, dt) -> tuple:
    """One accepted RK4 step with a step-doubling error estimate.

    Returns (new_state, error_estimate).  The propagated value is the two
    half-step solution; raises PositivityError when the guard fails at any
    internal stage.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    ev = _RhsEvaluator(scenario)
    u, t = state.u.values, state.t
    big = _rk4_step(ev, u, t, dt)
    half = _rk4_step(ev, u, t, 0.5 * dt)
    small = _rk4_step(ev, half, t + 0.5 * dt, 0.5 * dt)
    err = float(np.max(np.abs(small - big))) / 15.0
    t1 = t + dt
    g = ev.metric(small, t1)
    ev.guard(g, t1)
    new = FlowState(t1, ScalarField(scenario.grid, small),
                    ScalarField(scenario.grid, ev(small, t1)),
                    HermitianMatrixField(scenario.grid, g))
    return new, err


def _make_state(ev, scenario, u, t):
    g = ev.metric(u, t)
    ev.guard(g, t)
    return FlowState(t, ScalarField(scenario.grid, u.copy()),
                     ScalarField(scenario.grid, ev(u, t)),
                     HermitianMatrixField(scenario.grid, g))


def run(scenario: Scenario) -> Trajectory:
    """Integrate the flow to t_max, sampling every sample_dt.

    Adaptive step-doubling control at the scenario's tolerances; on a guard
    breach the step is halved down to dt_min before terminating with reason
    "positivity breakdown".
    """
    ev = _RhsEvaluator(scenario)
    opts = scenario.integrator
    grid = scenario.grid
    u = np.zeros(grid.shape)
    t = 0.0
    states = [_make_state(ev, scenario, u, t)]
    sample_index = 1
    next_sample = min(scenario.sample_dt, scenario.t_max)
    termination = "completed"
    wall0 = _time.perf_counter()
    accepted = rejected = 0

    fixed = opts.fixed_dt if opts.fixed_dt and opts.fixed_dt > 0 else None
    dt_next = fixed if fixed else opts.dt_init
    dt_stab = math.inf if fixed else ev.stable_dt(u, t)

    while t < scenario.t_max - 1e-12:
        dt_step = min(dt_next, dt_stab, next_sample - t)
        clamped = dt_step < dt_next
        try:
            big = _rk4_step(ev, u, t, dt_step)
            half = _rk4_step(ev, u, t, 0.5 * dt_step)
            small = _rk4_step(ev, half, t + 0.5 * dt_step, 0.5 * dt_step)
        except PositivityError:
            rejected += 1
            if fixed:
                termination = "positivity breakdown"
                break
            dt_next = 0.5 * dt_step
            if dt_next < opts.dt_min:
                termination = "positivity breakdown"
                break
            continue
        if not fixed:
            err = float(np.max(np.abs(small - big))) / 15.0
            scale = opts.atol + opts.rtol * max(1.0, float(np.max(np.abs(small))))
            if err > scale:
                rejected += 1
                dt_next = dt_step * max(0.2, opts.safety * (scale / err) ** RK4_ERROR_EXPONENT)
                if dt_next < opts.dt_min:
                    termination = "error control failure"
                    break
                continue
            if not clamped:
                grow = opts.max_growth if err == 0.0 else \
                    min(opts.max_growth, opts.safety * (scale / err) ** RK4_ERROR_EXPONENT)
                dt_next = dt_step * max(grow, 0.5)
        u = small
        t = t + dt_step
        accepted += 1
        if not fixed and accepted % 8 == 0:
            dt_stab = ev.stable_dt(u, t)
        if t >= next_sample - 1e-12:
            t = next_sample  # snap; accumulated round-off stays below 1e-12
            try:
                states.append(_make_state(ev, scenario, u, t))
            except PositivityError:
                termination = "positivity breakdown"
                break
            sample_index += 1
            next_sample = min(sample_index * scenario.sample_dt, scenario.t_max)

    stats = {
        "accepted_steps": accepted,
        "rejected_steps": rejected,
        "rhs_evaluations": ev.evals,
        "wall_time": _time.perf_counter() - wall0,
    }
    return Trajectory(scenario, tuple(states), termination, stats)


@dataclass(frozen=True)
class OracleTable:
    """Reference values for spatially constant data: u, v and the shift f."""

    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    f: np.ndarray


def homogeneous_oracle(L, omega0, rho_const, k, gauge, t_samples) -> OracleTable:
    """Solve the spatially constant reduction by integrating-factor quadrature.

    With constant data the flow collapses to u' + u = log(det A(t) / rho)
    (+ k t in the v gauge), so u(t) = e^{-t} int_0^t e^s G(s) ds, evaluated with
    adaptive quadrature segment by segment.  Also returns the exact shift
    f(t) = k (1 - e^{-t}) - k t and the complementary gauge's potential.
    """
    Lm = cohomology._coerce(L)
    Wm = cohomology._coerce(omega0)
    if rho_const <= 0:
        raise ValueError("rho must be positive")
    log_rho = math.log(rho_const)

    def g_of_s(s):
        a = cohomology.class_path(Lm, Wm, s)
        val = float(np.linalg.det(a).real)
        out = math.log(val) - log_rho
        if gauge == "v":
            out += k * s
        return out

    ts = np.atleast_1d(np.asarray(t_samples, dtype=float))
    order = np.argsort(ts)
    active = np.empty_like(ts)
    acc = 0.0
    prev = 0.0
    for idx in order:
        t = ts[idx]
        if t < 0:
            raise ValueError("times must be nonnegative")
        seg, _ = quad(lambda s: math.exp(s) * g_of_s(s), prev, t,
                      epsabs=1e-12, epsrel=1e-12, limit=400)
        acc += seg
        prev = t
        active[idx] = math.exp(-t) * acc

    f = np.array([shift_solution(k, t) for t in ts])
    if gauge == "v":
        v = active
        u = v + f
    else:
        u = active
        v = u - f
    return OracleTable(t=ts, u=u, v=v, f=f)


def gauge_shift(trajectory: Trajectory, k=None) -> Trajectory:
    """Convert a u-gauge trajectory to the v potential, v = u - f(t), pointwise.

    The metric fields are untouched: f is spatially constant so the derived
    geometry is identical.
    """
    sc = trajectory.scenario
    if sc.gauge != "u":
        raise ValueError("gauge_shift expects a u-gauge trajectory")
    if k is None:
        k = sc.collapse_order()
    if k is None:
        raise ValueError("collapse order undefined; pass k explicitly")
    out = []
    for s in trajectory.states:
        f = shift_solution(k, s.t)
        fdot = shift_rate(k, s.t)
        out.append(FlowState(s.t,
                             ScalarField(sc.grid, s.u.values - f),
                             ScalarField(sc.grid, s.u_dot.values - fdot),
                             s.metric))
    return Trajectory(replace(sc, gauge="v", k_override=k), tuple(out),
                      trajectory.termination, dict(trajectory.stats))


def to_u_gauge(state: FlowState, scenario: Scenario):
    """u-gauge potential and rate for a state of either gauge, as raw arrays."""
    if scenario.gauge == "u":
        return state.u.values, state.u_dot.values
    k = scenario.collapse_order()
    f = shift_solution(k, state.t)
    fdot = shift_rate(k, state.t)
    return state.u.values + f, state.u_dot.values + fdot
