"""Diagnostics and estimate checks along a flow trajectory.

Every proved bound is operationalized by a fit-then-verify protocol: existential
constants are fitted on the burn-in window [0, 1] (with a 10 percent margin, or
combined with a comparison constant computed from scenario data alone) and the
bound is then asserted on (1, t_max].  Probes report behaviour without asserting.

All diagnostics are expressed in the u gauge; trajectories run in the v gauge
are converted through the spatially constant shift before anything is measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cohomology
from .flow import Scenario, Trajectory, shift_solution, to_u_gauge
from .geometry import (
    ScalarField,
    det_hermitian,
    hessian_matrix,
    inverse_trace_pair,
    max_eig_hermitian,
    min_eig_hermitian,
)

BURN_IN_END = 1.0
FIT_MARGIN = 0.10
VERIFY_TOL = 1e-6
MONOTONE_TOL = 1e-7
JENSEN_CONVEXITY_TOL = 1e-9
TREND_WINDOW = 4.0
TREND_TOL = 0.01
DIVERGENCE_SLOPE = -0.05

CSV_COLUMNS = (
    "t", "max_u", "min_u", "mean_u", "max_udot", "min_udot",
    "uddot_plus_udot_max", "class_volume", "volume_integral", "jensen_lhs",
    "osc_u", "min_eig_metric", "ric_min", "ric_max", "thm13_min",
)


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    max_u: float
    min_u: float
    mean_u: float
    max_udot: float
    min_udot: float
    max_udot_plus_u: float
    min_udot_plus_u: float
    max_uddot_plus_udot: float
    min_uddot_plus_udot: float
    class_volume: float
    volume_integral: float
    jensen_lhs: float
    osc_u: float
    min_eig_metric: float
    ric_min: float
    ric_max: float
    thm13_min: float

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"diagnostics value {name} is not finite")
        if self.volume_integral <= 0 or self.osc_u < 0:
            raise ValueError("diagnostics violate positivity invariants")

    def csv_values(self):
        return (self.t, self.max_u, self.min_u, self.mean_u, self.max_udot,
                self.min_udot, self.max_uddot_plus_udot, self.class_volume,
                self.volume_integral, self.jensen_lhs, self.osc_u,
                self.min_eig_metric, self.ric_min, self.ric_max, self.thm13_min)


def validate_phi(scenario: Scenario, phi):
    """phi must keep L + i d dbar phi positive semidefinite on the grid."""
    if phi is None:
        return np.zeros(scenario.grid.shape)
    if isinstance(phi, ScalarField):
        if phi.grid != scenario.grid:
            raise ValueError("phi lives on a different grid")
        vals = phi.values
    else:
        vals = np.asarray(phi, dtype=float)
        if vals.shape != scenario.grid.shape:
            raise ValueError("phi shape does not match the grid")
    form = scenario.L.matrix + hessian_matrix(scenario.grid, vals)
    worst = float(np.min(min_eig_hermitian(form, scenario.n)))
    if worst < -1e-10:
        raise ValueError(
            f"phi is not admissible: L + i d dbar phi has min eigenvalue {worst:.3e}")
    return vals


def state_diagnostics(state, scenario: Scenario, phi=None):
    """Per-state diagnostic quantities (everything except the time differences)."""
    n = scenario.n
    u, udot = to_u_gauge(state, scenario)
    phi_vals = phi if isinstance(phi, np.ndarray) else validate_phi(scenario, phi)
    rho = scenario.rho.values
    rho_hat = rho / np.mean(rho)
    w = udot + u
    g = state.metric.values
    ric = -hessian_matrix(scenario.grid, np.log(det_hermitian(g, n)))
    out = {
        "t": float(state.t),
        "max_u": float(np.max(u)),
        "min_u": float(np.min(u)),
        "mean_u": float(np.mean(u)),
        "max_udot": float(np.max(udot)),
        "min_udot": float(np.min(udot)),
        "max_udot_plus_u": float(np.max(w)),
        "min_udot_plus_u": float(np.min(w)),
        "class_volume": float(np.linalg.det(scenario.class_at(state.t)).real),
        "volume_integral": float(np.mean(np.exp(w) * rho)),
        "jensen_lhs": float(np.mean(w * rho_hat)),
        "osc_u": float(np.max(u) - np.min(u)),
        "min_eig_metric": float(np.min(min_eig_hermitian(g, n))),
        "ric_min": float(np.min(min_eig_hermitian(ric, n))),
        "ric_max": float(np.max(max_eig_hermitian(ric, n))),
        "thm13_min": float(np.min(w + n * state.t - phi_vals)),
    }
    return out


def _three_point_rate(f0, f1, f2, h1, h2, at):
    """Derivative from three samples at spacings h1, h2; ``at`` in {0, 1}."""
    if at == 1:
        return (f2 * h1 * h1 - f0 * h2 * h2 + f1 * (h2 * h2 - h1 * h1)) / (h1 * h2 * (h1 + h2))
    # one-sided at the left point
    return (-(2 * h1 + h2) * f0 / (h1 * (h1 + h2)) + (h1 + h2) * f1 / (h1 * h2)
            - h1 * f2 / (h2 * (h1 + h2)))


def _udot_time_derivatives(trajectory: Trajectory):
    """Centered (one-sided at the ends) time differences of the cached RHS."""
    sc = trajectory.scenario
    fields = [to_u_gauge(s, sc)[1] for s in trajectory.states]
    ts = trajectory.times
    m = len(fields)
    out = [None] * m
    if m < 3:
        return [np.zeros_like(fields[0]) for _ in range(m)]
    for i in range(m):
        if i == 0:
            h1, h2 = ts[1] - ts[0], ts[2] - ts[1]
            out[i] = _three_point_rate(fields[0], fields[1], fields[2], h1, h2, 0)
        elif i == m - 1:
            h1, h2 = ts[-2] - ts[-3], ts[-1] - ts[-2]
            out[i] = -_three_point_rate(fields[-1], fields[-2], fields[-3], h2, h1, 0)
        else:
            h1, h2 = ts[i] - ts[i - 1], ts[i + 1] - ts[i]
            out[i] = _three_point_rate(fields[i - 1], fields[i], fields[i + 1], h1, h2, 1)
    return out


def trajectory_diagnostics(trajectory: Trajectory, phi=None):
    """Full diagnostics table, including the time-difference columns."""
    sc = trajectory.scenario
    phi_vals = validate_phi(sc, phi)
    uddots = _udot_time_derivatives(trajectory)
    rows = []
    for state, uddot in zip(trajectory.states, uddots):
        d = state_diagnostics(state, sc, phi_vals)
        _, udot = to_u_gauge(state, sc)
        q = uddot + udot
        d["max_uddot_plus_udot"] = float(np.max(q))
        d["min_uddot_plus_udot"] = float(np.min(q))
        rows.append(DiagnosticsRow(**d))
    return rows


def second_derivative_crosscheck(trajectory: Trajectory):
    """Gap between differenced d2u/dt2 and its analytic evolution identity.

    The analytic expression is Lap(du/dt) - e^{-t} <metric, omega0 - L> - du/dt,
    evaluated with the trajectory's own metric; the finite difference of the
    cached RHS must approach it at second order in sample_dt.  Returns the
    worst absolute gap over interior samples.
    """
    sc = trajectory.scenario
    M = np.broadcast_to(sc.omega0.matrix - sc.L.matrix,
                        sc.grid.shape + (sc.n, sc.n))
    uddots = _udot_time_derivatives(trajectory)
    worst = 0.0
    for i in range(1, len(trajectory.states) - 1):
        state = trajectory.states[i]
        _, udot = to_u_gauge(state, sc)
        g = state.metric.values
        lap = inverse_trace_pair(g, hessian_matrix(sc.grid, udot))
        analytic = lap - math.exp(-state.t) * inverse_trace_pair(g, M) - udot
        worst = max(worst, float(np.max(np.abs(uddots[i] - analytic))))
    return worst


# -- check plumbing -------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    verdict: str  # pass | fail | inconclusive | consistent | violated
    fitted_constants: dict = field(default_factory=dict)
    worst_margin: float = None
    burn_in: tuple = (0.0, BURN_IN_END)
    evidence: list = field(default_factory=list)

    @property
    def failed(self):
        return self.verdict in ("fail", "violated")

    def to_dict(self):
        return {
            "name": self.name,
            "anchor": self.anchor,
            "verdict": self.verdict,
            "fitted_constants": {k: _jsonable(v) for k, v in self.fitted_constants.items()},
            "worst_margin": _jsonable(self.worst_margin),
            "burn_in": list(self.burn_in),
            "evidence": self.evidence,
        }


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


@dataclass(frozen=True)
class CheckReport:
    scenario_name: str
    results: tuple

    @property
    def all_pass(self):
        return not any(r.failed for r in self.results)

    def __getitem__(self, name):
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self):
        return {
            "scenario": self.scenario_name,
            "all_pass": self.all_pass,
            "checks": [r.to_dict() for r in self.results],
        }


class _Context:
    """Shared data for one verification pass over a trajectory."""

    def __init__(self, trajectory, phi=None):
        sc = trajectory.scenario
        if sc.forcing is not None:
            raise ValueError("estimate checks require an unforced trajectory")
        self.traj = trajectory
        self.sc = sc
        self.phi = validate_phi(sc, phi)
        self.rows = trajectory_diagnostics(trajectory, self.phi)
        self.t = np.array([r.t for r in self.rows])
        self.burn = self.t <= BURN_IN_END + 1e-12
        self.late = ~self.burn
        self.k = sc.collapse_order()
        self.decay_constants = None

    def col(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def require_late(self):
        if not np.any(self.late):
            raise ValueError("trajectory ends inside the burn-in window")


def _fit_positive(scaled_burn):
    """Burn-in fit of a nonnegative comparison constant, with the 10% margin."""
    fit = float(np.max(np.maximum(scaled_burn, 0.0)))
    return fit, (1.0 + FIT_MARGIN) * fit


def _slope(t, y):
    return float(np.polyfit(t, y, 1)[0])


def _last_window(ctx):
    lo = ctx.t[-1] - TREND_WINDOW
    sel = ctx.t >= lo - 1e-12
    if np.sum(sel) < 3:
        sel = np.ones_like(ctx.t, dtype=bool)
    return sel


def _worst(margins, ts, count=3):
    order = np.argsort(margins)
    return [{"t": float(ts[i]), "margin": float(margins[i])} for i in order[:count]]


# -- individual checks ----------------------------------------------------------


def check_upper_bound_u(ctx):
    """max_X u(t) <= max(0, K), K from scenario data alone."""
    sc = ctx.sc
    s_grid = np.linspace(math.exp(-sc.t_max), 1.0, 4097)
    vp = cohomology.volume_polynomial(sc.L, sc.omega0)
    sup_logdet = float(np.max(np.log(np.maximum([vp(s) for s in s_grid], 1e-300))))
    K = sup_logdet + float(np.max(-np.log(sc.rho.values)))
    bound = max(0.0, K)
    margins = bound - ctx.col("max_u")
    worst = float(np.min(margins))
    return CheckResult(
        name="u_upper", anchor="max_X u(t) <= max(0, K) with K = sup log(det(class)/rho)",
        verdict="pass" if worst >= -VERIFY_TOL else "fail",
        fitted_constants={"K": K, "bound": bound},
        worst_margin=worst, burn_in=(0.0, 0.0),
        evidence=_worst(margins, ctx.t))


def check_decay(ctx):
    """d2u/dt2 + du/dt <= C e^{-t} and du/dt <= C' e^{-t/2}, burn-in fitted."""
    ctx.require_late()
    if ctx.sc.sample_dt > 1.0 / 3.0:
        return CheckResult(
            name="decay", anchor="d2u/dt2 + du/dt <= C exp(-t); du/dt <= C' exp(-t/2)",
            verdict="inconclusive",
            fitted_constants={"reason": "needs at least 3 samples per unit time"})
    q = ctx.col("max_uddot_plus_udot")
    udot = ctx.col("max_udot")
    c_fit, c_used = _fit_positive(np.exp(ctx.t[ctx.burn]) * q[ctx.burn])
    cp_fit, cp_used = _fit_positive(np.exp(0.5 * ctx.t[ctx.burn]) * udot[ctx.burn])
    m1 = c_used * np.exp(-ctx.t[ctx.late]) - q[ctx.late]
    m2 = cp_used * np.exp(-0.5 * ctx.t[ctx.late]) - udot[ctx.late]
    worst = float(min(np.min(m1), np.min(m2)))
    ctx.decay_constants = (c_used, cp_used)
    return CheckResult(
        name="decay", anchor="d2u/dt2 + du/dt <= C exp(-t); du/dt <= C' exp(-t/2)",
        verdict="pass" if worst >= -VERIFY_TOL else "fail",
        fitted_constants={"C": c_used, "C_fit": c_fit, "C_prime": cp_used,
                          "C_prime_fit": cp_fit},
        worst_margin=worst,
        evidence=_worst(np.minimum(m1, m2), ctx.t[ctx.late]))


def check_monotone(ctx):
    """max_X(u + 2C' e^{-t/2}) and max_X(du/dt + u + C e^{-t}) never increase."""
    if ctx.decay_constants is None:
        check_decay(ctx)
    if ctx.decay_constants is None:  # decay was inconclusive
        return CheckResult(name="monotone",
                           anchor="decreasing combinations along the flow",
                           verdict="inconclusive")
    c_used, cp_used = ctx.decay_constants
    seq1 = ctx.col("max_u") + 2.0 * cp_used * np.exp(-0.5 * ctx.t)
    seq2 = ctx.col("max_udot_plus_u") + c_used * np.exp(-ctx.t)
    inc1 = np.diff(seq1)
    inc2 = np.diff(seq2)
    worst = -float(max(np.max(inc1), np.max(inc2)))
    return CheckResult(
        name="monotone",
        anchor="max_X(u + 2C' exp(-t/2)) and max_X(du/dt + u + C exp(-t)) are non-increasing",
        verdict="pass" if worst >= -MONOTONE_TOL else "fail",
        fitted_constants={"C": c_used, "C_prime": cp_used},
        worst_margin=worst,
        evidence=_worst(-np.maximum(inc1, inc2), ctx.t[1:]))


def check_volume_identity(ctx):
    """Flow-side volume integral equals the class volume at every sample."""
    vol = ctx.col("volume_integral")
    cls = ctx.col("class_volume")
    tol = VERIFY_TOL * ctx.rows[0].class_volume
    gaps = np.abs(vol - cls)
    worst = float(tol - np.max(gaps))
    return CheckResult(
        name="volume_identity",
        anchor="integral of exp(du/dt + u) dOmega equals the evolving class volume",
        verdict="pass" if worst >= 0.0 else "fail",
        fitted_constants={"tolerance": tol},
        worst_margin=worst, burn_in=(0.0, 0.0),
        evidence=_worst(tol - gaps, ctx.t))


def check_jensen(ctx):
    """Convexity bound for the measure average of du/dt + u, and its -kt+C rate."""
    ctx.require_late()
    sc = ctx.sc
    rho_mean = float(np.mean(sc.rho.values))
    log_norm = math.log(rho_mean)
    lhs = ctx.col("jensen_lhs")
    convexity = np.log(ctx.col("volume_integral")) - log_norm - lhs
    worst_convex = float(np.min(convexity))
    result = {"rho_mean": rho_mean}
    if ctx.k is None:
        verdict = "pass" if worst_convex >= -JENSEN_CONVEXITY_TOL else "fail"
        return CheckResult(
            name="jensen", anchor="measure average of du/dt + u <= log volume",
            verdict=verdict, fitted_constants=result,
            worst_margin=worst_convex, burn_in=(0.0, 0.0),
            evidence=_worst(convexity, ctx.t))
    k = ctx.k
    c_burn = float(np.max(lhs[ctx.burn] + k * ctx.t[ctx.burn]))
    vp = cohomology.volume_polynomial(sc.L, sc.omega0)
    s_grid = np.linspace(math.exp(-sc.t_max), 1.0, 4097)
    c_class = float(np.max(np.log(np.maximum(
        [vp(s) / s ** k for s in s_grid], 1e-300)))) - log_norm
    c_used = max(c_burn, c_class)
    rate_margin = c_used - k * ctx.t[ctx.late] - lhs[ctx.late]
    worst_rate = float(np.min(rate_margin))
    ok = worst_convex >= -JENSEN_CONVEXITY_TOL and worst_rate >= -VERIFY_TOL
    result.update({"C_burn": c_burn, "C_class": c_class, "C": c_used, "k": k})
    return CheckResult(
        name="jensen",
        anchor="measure average of du/dt + u <= log volume and <= -k t + C",
        verdict="pass" if ok else "fail",
        fitted_constants=result,
        worst_margin=float(min(worst_convex, worst_rate)),
        evidence=_worst(rate_margin, ctx.t[ctx.late]))


def check_combined_lower(ctx):
    """du/dt + u + n t - phi is bounded below by its burn-in minimum."""
    ctx.require_late()
    m = ctx.col("thm13_min")
    c_fit = float(np.min(m[ctx.burn]))
    margins = m[ctx.late] - (c_fit - VERIFY_TOL)
    worst = float(np.min(m[ctx.late] - c_fit))
    running_min = np.minimum.accumulate(m)
    stride = max(1, len(ctx.t) // 8)
    curve = [{"t": float(ctx.t[i]), "running_min": float(running_min[i])}
             for i in range(0, len(ctx.t), stride)]
    return CheckResult(
        name="combined_lower",
        anchor="du/dt + u + n t >= phi + C with C the burn-in minimum",
        verdict="pass" if worst >= -VERIFY_TOL else "fail",
        fitted_constants={"C": c_fit},
        worst_margin=worst,
        evidence=curve)


def check_udot_recurrence(ctx, epsilon=0.1):
    """Every window [T0, t_max] with T0 >= 1 contains max_X du/dt >= -n - eps."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ctx.require_late()
    udot = ctx.col("max_udot")
    floor = -ctx.sc.n - epsilon
    suffix = np.maximum.accumulate(udot[::-1])[::-1]
    sel = ctx.t >= 1.0 - 1e-12
    margins = suffix[sel] - floor
    worst = float(np.min(margins))
    witnesses = []
    window_starts = np.flatnonzero(sel)
    for pos in (0, len(window_starts) // 2, len(window_starts) - 1):
        start = window_starts[pos]
        rel = int(np.argmax(udot[start:]))
        witnesses.append({"T0": float(ctx.t[start]),
                          "witness_t": float(ctx.t[start + rel]),
                          "max_udot": float(udot[start + rel])})
    return CheckResult(
        name="udot_recurrence",
        anchor=f"recurring times with max_X du/dt >= -n - {epsilon}",
        verdict="pass" if worst >= -VERIFY_TOL else "fail",
        fitted_constants={"epsilon": epsilon, "floor": floor},
        worst_margin=worst, burn_in=(0.0, 0.0),
        evidence=witnesses)


def check_asymptotic_rate(ctx):
    """mean u decays like -k t and the shifted potential stays bounded."""
    if ctx.t[-1] < 10.0 - 1e-9:
        return CheckResult(
            name="asymptotic_rate", anchor="u ~ -k t with bounded shifted potential",
            verdict="inconclusive",
            fitted_constants={"reason": "t_max below 10"})
    if ctx.k is None:
        raise ValueError("asymptotic rate check needs a nef L")
    k = ctx.k
    sel = _last_window(ctx)
    slope = _slope(ctx.t[sel], ctx.col("mean_u")[sel])
    f = shift_solution(k, ctx.t)
    vmax = np.maximum(np.abs(ctx.col("max_u") - f), np.abs(ctx.col("min_u") - f))
    v_bound = float(np.max(vmax))
    v_slope = _slope(ctx.t[sel], vmax[sel])
    ok = abs(slope + k) <= 0.05 and abs(v_slope) <= TREND_TOL
    return CheckResult(
        name="asymptotic_rate",
        anchor="mean u slope = -k; |u - f(t)| bounded with no growth trend",
        verdict="pass" if ok else "fail",
        fitted_constants={"k": k, "slope": slope, "v_bound": v_bound,
                          "v_slope": v_slope},
        worst_margin=float(min(0.05 - abs(slope + k), TREND_TOL - abs(v_slope))),
        evidence=[])


def probe_conjecture(ctx):
    """Report whether du/dt and u + k t - phi look bounded below (never asserts)."""
    ctx.require_late()
    if ctx.k is None:
        raise ValueError("the conjecture probe needs a nef L")
    k = ctx.k
    sel = _last_window(ctx)
    udot_slope = _slope(ctx.t[sel], ctx.col("min_udot")[sel])
    q = np.array([float(np.min(to_u_gauge(s, ctx.sc)[0] + k * s.t - ctx.phi))
                  for s in ctx.traj.states])
    q_slope = _slope(ctx.t[sel], q[sel])
    consistent = udot_slope >= -TREND_TOL and q_slope >= -TREND_TOL
    return CheckResult(
        name="boundedness_probe",
        anchor="du/dt >= -C and u + k t - phi >= -C (probe of the open expectation)",
        verdict="consistent" if consistent else "violated",
        fitted_constants={"k": k, "min_udot_slope": udot_slope,
                          "min_udot_overall": float(np.min(ctx.col("min_udot"))),
                          "u_plus_kt_slope": q_slope,
                          "u_plus_kt_min": float(np.min(q))},
        worst_margin=float(min(udot_slope + TREND_TOL, q_slope + TREND_TOL)),
        evidence=[])


def probe_limits(ctx):
    """Late-time trend classification of u and du/dt + u (reporting only)."""
    if ctx.t[-1] < 10.0 - 1e-9:
        return CheckResult(name="limit_probe",
                           anchor="joint late-time behaviour of u and du/dt + u",
                           verdict="inconclusive",
                           fitted_constants={"reason": "t_max below 10"})
    sel = _last_window(ctx)
    u_slope = _slope(ctx.t[sel], ctx.col("mean_u")[sel])
    w_slope = _slope(ctx.t[sel], 0.5 * (ctx.col("max_udot_plus_u")[sel]
                                        + ctx.col("min_udot_plus_u")[sel]))
    cls_u = "diverging" if u_slope < DIVERGENCE_SLOPE else "stabilizing"
    cls_w = "diverging" if w_slope < DIVERGENCE_SLOPE else "stabilizing"
    joint = cls_u if cls_u == cls_w else "mixed"
    return CheckResult(
        name="limit_probe",
        anchor="joint late-time behaviour of u and du/dt + u",
        verdict="pass",
        fitted_constants={"u_slope": u_slope, "udot_plus_u_slope": w_slope,
                          "u_class": cls_u, "udot_plus_u_class": cls_w,
                          "joint": joint},
        worst_margin=None,
        evidence=[])


CHECKS = {
    "u_upper": check_upper_bound_u,
    "decay": check_decay,
    "monotone": check_monotone,
    "volume_identity": check_volume_identity,
    "jensen": check_jensen,
    "combined_lower": check_combined_lower,
    "udot_recurrence": check_udot_recurrence,
    "asymptotic_rate": check_asymptotic_rate,
    "boundedness_probe": probe_conjecture,
    "limit_probe": probe_limits,
}

DEFAULT_CHECKS = tuple(CHECKS)


def run_checks(trajectory: Trajectory, checks=None, phi=None, epsilon=0.1) -> CheckReport:
    """Evaluate the configured checks over one trajectory.

    ``checks`` is a list of names (or (name, params) pairs) from CHECKS; each
    configured check appears exactly once in the report, in the given order.
    """
    ctx = _Context(trajectory, phi=phi)
    if checks is None:
        checks = [name for name in DEFAULT_CHECKS
                  if ctx.k is not None or name not in
                  ("asymptotic_rate", "boundedness_probe")]
    results = []
    seen = set()
    for item in checks:
        name, params = (item, {}) if isinstance(item, str) else item
        if name not in CHECKS:
            raise ValueError(f"unknown check {name!r}")
        if name in seen:
            raise ValueError(f"check {name!r} configured twice")
        seen.add(name)
        if name == "udot_recurrence":
            params = {"epsilon": params.get("epsilon", epsilon)}
        else:
            params = {}
        results.append(CHECKS[name](ctx, **params))
    return CheckReport(trajectory.scenario.name, tuple(results))
