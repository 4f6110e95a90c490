"""Nonlocal inverse curvature flows on Fourier support functions.

The reduced evolution is p_t = f with normal speed f = beta - lambda(t),
i.e. p_t = p_thetatheta + p - lambda(t).  The nonlocal term selects the
conservation law:

    length-preserving:  lambda(t) = L / (2*pi)            (L fixed, A grows)
    area-preserving:    lambda(t) = (1/L) int beta^2      (A fixed, L shrinks)

Modally the PDE is diagonal: d(a_k, b_k)/dt = (1 - k^2)(a_k, b_k) for k >= 1
(mode 1 is frozen, fixing the Steiner point) and da0/dt = a0 - lambda(t).
The ExactModal scheme exploits this: modes k >= 2 decay by exact exponential
factors and only the a0 ODE of the area-preserving flow needs a time stepper
(classical RK4 with lambda evaluated from the analytically decayed modes).
A method-of-lines GridRK4 scheme serves as the independent oracle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .curves import (TWO_PI, SupportFourier, algebraic_area,
                     algebraic_length, beta_of, steiner_point)
from .spectral import (GridFunction, analyze, default_grid_size, derivative,
                       l2_quantities, synthesize)


class DegenerateLengthError(ArithmeticError):
    """|L| below the floor: the area-preserving nonlocal term is undefined."""


class StabilityError(ValueError):
    """Explicit grid step size exceeds the stiff stability bound."""


class NotConvergedError(RuntimeError):
    """Trace has not settled close enough to a circle to read off a limit."""


class WindowTooNoisyError(RuntimeError):
    """Log-linear decay fit rejected (r^2 < 0.99)."""


class FlowType(enum.Enum):
    AREA_PRESERVING = "area"
    LENGTH_PRESERVING = "length"


class Scheme(enum.Enum):
    EXACT_MODAL = "modal"
    GRID_RK4 = "grid"


@dataclass(frozen=True)
class FlowState:
    t: float
    p: SupportFourier


@dataclass(frozen=True)
class FlowConfig:
    flow_type: FlowType
    initial: SupportFourier
    t_final: float = 6.0
    dt: float = 1e-3
    scheme: Scheme = Scheme.EXACT_MODAL
    grid_n: int | None = None
    record_every: int = 1
    stop_sup_dev: float = 0.0      # 0 disables early stop
    lambda_floor: float = 1e-9

    def __post_init__(self) -> None:
        if self.t_final < 0 or self.dt <= 0:
            raise ValueError("need t_final >= 0 and dt > 0")
        if self.t_final > 0 and self.dt > self.t_final:
            raise ValueError("dt exceeds t_final")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.lambda_floor <= 0:
            raise ValueError("lambda_floor must be > 0")
        if self.flow_type is FlowType.AREA_PRESERVING:
            a0_area = algebraic_area(self.initial)
            if not a0_area > 0.0:
                raise DegenerateLengthError(
                    f"area-preserving flow needs positive initial algebraic "
                    f"area, got {a0_area:.6g}")

    @property
    def effective_grid_n(self) -> int:
        return self.grid_n if self.grid_n is not None \
            else default_grid_size(self.initial.K)


@dataclass(frozen=True)
class DiagnosticsRow:
    t: float
    L: float
    A: float
    deficit: float        # U = L^2 - 4*pi*A
    sup_dev: float        # sup over the diagnostic grid of |beta - L/2pi|
    Q: float              # L^2/2pi - int beta^2  (<= 0 for l-convex curves)
    lam: float
    E1: float             # int (beta')^2
    E2: float             # int (beta'')^2
    a0: float
    max_abs_mode: float   # max over k >= 2 of max(|a_k|, |b_k|)
    mode_amps: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class FlowTrace:
    config: FlowConfig
    rows: tuple[DiagnosticsRow, ...]
    final_state: FlowState
    converged: bool = False


def lambda_length(state: FlowState) -> float:
    """lambda = L/(2*pi) = a0."""
    return state.p.a0


def lambda_area(state: FlowState, lambda_floor: float = 1e-9) -> float:
    """lambda = (1/L) int beta^2 = (2*pi*a0^2 + pi*sum (1-k^2)^2 c_k^2) / L."""
    L = algebraic_length(state.p)
    if abs(L) < lambda_floor:
        raise DegenerateLengthError(
            f"|L| = {abs(L):.3e} below floor {lambda_floor} at t = {state.t}")
    return l2_quantities(beta_of(state.p).beta)["int_p2"] / L


def _lambda_of(state: FlowState, flow_type: FlowType,
               lambda_floor: float) -> float:
    if flow_type is FlowType.LENGTH_PRESERVING:
        return lambda_length(state)
    return lambda_area(state, lambda_floor)


def modal_rhs(state: FlowState, flow_type: FlowType,
              lambda_floor: float = 1e-9) -> SupportFourier:
    """Time derivative of the coefficients, packaged as a series.

    da0/dt = a0 - lambda(t); d(a_k, b_k)/dt = (1 - k^2)(a_k, b_k), so the
    mode-1 derivative is exactly zero.
    """
    lam = _lambda_of(state, flow_type, lambda_floor)
    modes = []
    for k, a, b in state.p.modes:
        f = 1.0 - k * k
        if f * a != 0.0 or f * b != 0.0:
            modes.append((k, f * a, f * b))
    return SupportFourier(state.p.a0 - lam, tuple(modes))


def step_exact_modal(state: FlowState, dt: float, flow_type: FlowType,
                     lambda_floor: float = 1e-9) -> FlowState:
    """Exponential step: modes k >= 2 scaled by exp((1-k^2) dt) exactly,
    mode 1 untouched.  a0 is exact for the length-preserving flow (constant)
    and advanced by classical RK4 for the area-preserving one, with the
    nonlocal term re-evaluated from the analytically decayed modes at
    substage times.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    p = state.p
    new_modes = tuple(
        (k, a, b) if k == 1 else
        (k, a * math.exp((1 - k * k) * dt), b * math.exp((1 - k * k) * dt))
        for k, a, b in p.modes)

    if flow_type is FlowType.LENGTH_PRESERVING:
        a0 = p.a0
    else:
        # S(s) = sum_{k>=2} (1-k^2)^2 c_k(t)^2 e^{2(1-k^2)s}, s in [0, dt]
        terms = [((1.0 - k * k), a * a + b * b)
                 for k, a, b in p.modes if k >= 2]

        def rhs(s: float, a0: float) -> float:
            L = TWO_PI * a0
            if abs(L) < lambda_floor:
                raise DegenerateLengthError(
                    f"|L| below floor {lambda_floor} inside step at "
                    f"t = {state.t + s}")
            int_b2 = TWO_PI * a0 * a0 + math.pi * sum(
                f * f * e * math.exp(2.0 * f * s) for f, e in terms)
            return a0 - int_b2 / L

        a0 = p.a0
        k1 = rhs(0.0, a0)
        k2 = rhs(0.5 * dt, a0 + 0.5 * dt * k1)
        k3 = rhs(0.5 * dt, a0 + 0.5 * dt * k2)
        k4 = rhs(dt, a0 + dt * k3)
        a0 = a0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return FlowState(state.t + dt, SupportFourier(a0, new_modes))


@dataclass(frozen=True)
class GridFlowState:
    """Method-of-lines state: support-function samples plus the spectral
    cutoff used for the band-limited second derivative."""
    t: float
    grid: GridFunction
    k_cut: int


def grid_stability_bound(k_cut: int) -> float:
    """dt bound for the explicit RK4 step: 1/(k_cut^2 + 1)."""
    return 1.0 / (k_cut * k_cut + 1.0)


def _grid_rhs(v: np.ndarray, flow_type: FlowType, k_cut: int,
              lambda_floor: float, t: float) -> np.ndarray:
    n = v.shape[0]
    vh = np.fft.rfft(v)
    vh[k_cut + 1:] = 0.0
    vf = np.fft.irfft(vh, n)
    k = np.arange(vh.shape[0])
    pdd = np.fft.irfft(-(k * k) * vh, n)
    L = TWO_PI / n * float(np.sum(vf))
    if flow_type is FlowType.LENGTH_PRESERVING:
        lam = L / TWO_PI
    else:
        if abs(L) < lambda_floor:
            raise DegenerateLengthError(
                f"|L| = {abs(L):.3e} below floor {lambda_floor} at t = {t}")
        beta = vf + pdd
        lam = TWO_PI / n * float(np.sum(beta * beta)) / L
    return pdd + vf - lam


def step_grid_rk4(state: GridFlowState, dt: float, flow_type: FlowType,
                  lambda_floor: float = 1e-9) -> GridFlowState:
    """One classical RK4 step of p_t = p_thetatheta + p - lambda(t) with
    spectral differentiation band-limited to k <= k_cut.

    The independent time-stepping oracle for step_exact_modal.
    """
    if dt > grid_stability_bound(state.k_cut):
        raise StabilityError(
            f"dt = {dt} exceeds stability bound "
            f"{grid_stability_bound(state.k_cut):.3e} for k_cut = {state.k_cut}")
    v = state.grid.values
    t = state.t
    f1 = _grid_rhs(v, flow_type, state.k_cut, lambda_floor, t)
    f2 = _grid_rhs(v + 0.5 * dt * f1, flow_type, state.k_cut, lambda_floor, t)
    f3 = _grid_rhs(v + 0.5 * dt * f2, flow_type, state.k_cut, lambda_floor, t)
    f4 = _grid_rhs(v + dt * f3, flow_type, state.k_cut, lambda_floor, t)
    vn = v + dt / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
    return GridFlowState(t + dt, GridFunction(vn), state.k_cut)


def diagnostics(state: FlowState, flow_type: FlowType, grid_n: int,
                lambda_floor: float = 1e-9) -> DiagnosticsRow:
    """All monitored quantities for one trace row, from modal formulas
    except sup_dev, which is taken on the grid_n-point diagnostic grid."""
    p = state.p
    L = algebraic_length(p)
    A = algebraic_area(p)
    beta = beta_of(p).beta
    int_b2 = l2_quantities(beta)["int_p2"]
    e1 = l2_quantities(beta)["int_dp2"]
    e2 = l2_quantities(derivative(beta))["int_dp2"]
    theta = np.linspace(0.0, TWO_PI, grid_n, endpoint=False)
    sup_dev = float(np.max(np.abs(beta.evaluate(theta) - L / TWO_PI)))
    lam = _lambda_of(state, flow_type, lambda_floor)
    max_abs = max((max(abs(a), abs(b)) for k, a, b in p.modes if k >= 2),
                  default=0.0)
    amps = tuple((k, math.hypot(a, b)) for k, a, b in p.modes)
    return DiagnosticsRow(
        t=state.t, L=L, A=A, deficit=L * L - 4.0 * math.pi * A,
        sup_dev=sup_dev, Q=L * L / TWO_PI - int_b2, lam=lam,
        E1=e1, E2=e2, a0=p.a0, max_abs_mode=max_abs, mode_amps=amps)


def run(config: FlowConfig, on_record=None) -> FlowTrace:
    """Integrate to t_final (or early stop), recording diagnostics every
    record_every steps plus the initial and final rows.

    on_record, if given, is called with (record_index, FlowState) at every
    recorded row (snapshot hook for the CLI).
    """
    grid_n = config.effective_grid_n
    n_steps = int(round(config.t_final / config.dt)) if config.t_final > 0 else 0

    if config.scheme is Scheme.GRID_RK4:
        k_cut = max(config.initial.K, 1)
        gstate = GridFlowState(0.0, synthesize(config.initial, grid_n), k_cut)
        if config.dt > grid_stability_bound(k_cut):
            raise StabilityError(
                f"dt = {config.dt} exceeds stability bound "
                f"{grid_stability_bound(k_cut):.3e} for k_cut = {k_cut}")

        def to_state(gs: GridFlowState) -> FlowState:
            return FlowState(gs.t, analyze(gs.grid, gs.k_cut))

        state = to_state(gstate)
    else:
        gstate = None
        state = FlowState(0.0, config.initial)

    rows = [diagnostics(state, config.flow_type, grid_n, config.lambda_floor)]
    if on_record is not None:
        on_record(0, state)
    converged = False
    for step in range(1, n_steps + 1):
        if config.scheme is Scheme.GRID_RK4:
            gstate = step_grid_rk4(gstate, config.dt, config.flow_type,
                                   config.lambda_floor)
            # keep recorded times exact multiples of dt
            gstate = GridFlowState(step * config.dt, gstate.grid, gstate.k_cut)
            state = to_state(gstate)
        else:
            state = step_exact_modal(state, config.dt, config.flow_type,
                                     config.lambda_floor)
            state = FlowState(step * config.dt, state.p)
        if step % config.record_every == 0 or step == n_steps:
            rows.append(diagnostics(state, config.flow_type, grid_n,
                                    config.lambda_floor))
            if on_record is not None:
                on_record(len(rows) - 1, state)
            if config.stop_sup_dev > 0 and rows[-1].sup_dev < config.stop_sup_dev:
                converged = True
                break
    return FlowTrace(config=config, rows=tuple(rows), final_state=state,
                     converged=converged)


_FIT_FIELDS = ("sup_dev", "absQ", "E1", "mode_k")


def fit_decay_rate(trace: FlowTrace, fit_field: str, window: tuple[float, float],
                   k: int | None = None) -> dict[str, float]:
    """Least-squares slope of log(field) vs t over the window.

    Returns {"alpha": -slope, "r2": ...}; raises WindowTooNoisyError when
    r^2 < 0.99.  Field values must stay above 1e-13 in the window so the log
    never probes the round-off floor.
    """
    if fit_field not in _FIT_FIELDS:
        raise ValueError(f"unknown field {fit_field!r}, expected one of {_FIT_FIELDS}")
    if fit_field == "mode_k" and k is None:
        raise ValueError("field 'mode_k' needs the mode number k")
    t_lo, t_hi = window
    ts, vals = [], []
    for row in trace.rows:
        if not (t_lo <= row.t <= t_hi):
            continue
        if fit_field == "sup_dev":
            v = row.sup_dev
        elif fit_field == "absQ":
            v = abs(row.Q)
        elif fit_field == "E1":
            v = row.E1
        else:
            v = dict(row.mode_amps).get(k, 0.0)
        ts.append(row.t)
        vals.append(v)
    if len(ts) < 3:
        raise ValueError("window contains fewer than 3 rows")
    vals = np.asarray(vals)
    if np.any(vals <= 1e-13):
        raise ValueError("field values reach the 1e-13 noise floor in window")
    ts = np.asarray(ts)
    logv = np.log(vals)
    slope, intercept = np.polyfit(ts, logv, 1)
    fitted = slope * ts + intercept
    ss_res = float(np.sum((logv - fitted) ** 2))
    ss_tot = float(np.sum((logv - np.mean(logv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < 0.99:
        raise WindowTooNoisyError(f"r^2 = {r2:.4f} < 0.99")
    return {"alpha": -float(slope), "r2": r2}


def limit_circle(trace: FlowTrace) -> dict:
    """Read the limiting circle off the final state: center = Steiner point,
    radius = a0, residual = leftover mass in modes k >= 2."""
    final = trace.rows[-1]
    if not final.max_abs_mode < 1e-6:
        raise NotConvergedError(
            f"max |mode k>=2| = {final.max_abs_mode:.3e} >= 1e-6 at "
            f"t = {final.t}")
    return {"center": steiner_point(trace.final_state.p),
            "radius": trace.final_state.p.a0,
            "residual": final.max_abs_mode}
