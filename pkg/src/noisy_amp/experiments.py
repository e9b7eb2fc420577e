"""Calibration and sweep drivers that produce the figure datasets.

A *scheme* is a complete amplification pipeline seeded with a coherent state:

* ``PilaOnly``            — the bare amplifier at gain G.
* ``PilaThen(op)``        — amplifier followed by an ideal photonic operation.
* ``PilaThenBsSubtraction`` — amplifier followed by the physical tap-and-detect
                            subtraction circuit (transmittance T, detector).
* ``Scissor(n)``          — the n-fold scissor amplifier (no PILA stage); its
                            tuned parameter is the per-photon amplitude gain g.

``calibrate_gain`` bisects the scheme's tuned parameter until the *measured*
effective gain hits a target.  ``run_sweep`` evaluates a declarative
:class:`SweepPlan` point by point (optionally in parallel), recording per-row
provenance and capturing per-point numerical failures instead of aborting the
sweep.  The ``fig*_table`` builders encode the axes and defaults of the
standard figure datasets on top of those two primitives.

Everything here is deterministic: no randomness, fixed row order, and
truncation is auto-adapted per point by growing the Fock cutoff until the
state fits to ``trunc_tol``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .channels import (
    Add,
    Coherent,
    Detector,
    OnOff,
    PhotonicOp,
    Subtract,
    apply_operation,
    bs_subtraction,
    build_operator,
    op_label,
    photon_order,
    pila_coherent,
)
from .errors import InvalidInput, NoBracket, NoisyAmpError
from .fock import HilbertSpec, coherent_ket, grow_dim, initial_dim, normalize
from .metrics import (
    MetricReport,
    effective_gain,
    fidelity_to_target,
    holevo_variance,
    phase_averaged_report,
    phase_space_grid,
    wigner,
)
from .scissor import ScissorConfig, pattern_multiplicity, scissor_amplify

__all__ = [
    "PilaOnly",
    "PilaThen",
    "PilaThenBsSubtraction",
    "Scissor",
    "SweepPlan",
    "SweepRow",
    "scheme_label",
    "evaluate_scheme",
    "calibrate_gain",
    "run_sweep",
    "fig1_table",
    "fig2_table",
    "fig3a_table",
    "fig3b_table",
    "fig4_table",
    "fig7_table",
    "fig8_table",
    "fig9_table",
    "wigner_table",
]


@dataclass(frozen=True)
class PilaOnly:
    """Deterministic amplifier, no conditioning."""


@dataclass(frozen=True)
class PilaThen:
    """Amplifier followed by an ideal photonic operation."""

    op: PhotonicOp


@dataclass(frozen=True)
class PilaThenBsSubtraction:
    """Amplifier followed by beam-splitter subtraction with a real detector."""

    transmittance: float = 0.99
    detector: Detector = OnOff()


@dataclass(frozen=True)
class Scissor:
    """n-fold scissor amplifier; the tuned parameter is the amplitude gain g."""

    n: int = 1


Scheme = PilaOnly | PilaThen | PilaThenBsSubtraction | Scissor

PHYSICAL_SCHEMES = (PilaThenBsSubtraction, Scissor)
VALID_OUTPUTS = ("G_e", "F", "V", "P_s", "Wigner")
SWEEP_VARS = ("G", "r", "phase", "grid")


def scheme_label(scheme: Scheme) -> str:
    if isinstance(scheme, PilaOnly):
        return "pila"
    if isinstance(scheme, PilaThen):
        return f"pila+{op_label(scheme.op)}"
    if isinstance(scheme, PilaThenBsSubtraction):
        return f"pila+bs-sub(T={scheme.transmittance:g})"
    if isinstance(scheme, Scissor):
        return f"scissor(N={scheme.n})"
    raise InvalidInput(f"unknown scheme: {scheme!r}")


@dataclass(frozen=True)
class SweepPlan:
    """Declarative description of one figure-style sweep.

    ``sweep_range`` is (lo, hi, steps).  For ``sweep_var='G'`` the swept value
    is the scheme's tuned parameter (amplifier gain, or scissor amplitude gain
    for the scissor scheme).  ``'r'`` sweeps the coherent-operation mixing
    ratio with phase-averaged metrics at fixed ``gain``; ``'phase'`` sweeps
    the seed phase at fixed ``gain``; ``'grid'`` evaluates the Wigner function
    of the single state at ``gain`` over a square phase-space grid.
    """

    scheme: Scheme
    alpha_mod: float
    sweep_var: str
    sweep_range: tuple[float, float, int]
    outputs: tuple[str, ...]
    gain: float = 1.2
    n_phases: int = 64
    dim0: int | None = None

    def __post_init__(self) -> None:
        if self.dim0 is not None and (
            not isinstance(self.dim0, (int, np.integer)) or self.dim0 < 2
        ):
            raise InvalidInput(f"dim0 must be an integer >= 2, got {self.dim0!r}")
        if not (math.isfinite(self.alpha_mod) and self.alpha_mod > 0):
            raise InvalidInput(f"alpha_mod must be finite and > 0, got {self.alpha_mod!r}")
        if self.sweep_var not in SWEEP_VARS:
            raise InvalidInput(f"sweep_var must be one of {SWEEP_VARS}, got {self.sweep_var!r}")
        lo, hi, steps = self.sweep_range
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise InvalidInput(f"sweep range needs lo < hi, got ({lo!r}, {hi!r})")
        if not isinstance(steps, (int, np.integer)) or steps < 2:
            raise InvalidInput(f"sweep needs at least 2 steps, got {steps!r}")
        outputs = tuple(self.outputs)
        if not outputs:
            raise InvalidInput("outputs must not be empty")
        for out in outputs:
            if out not in VALID_OUTPUTS:
                raise InvalidInput(f"unknown output {out!r}; valid: {VALID_OUTPUTS}")
        object.__setattr__(self, "outputs", outputs)
        if "P_s" in outputs and not isinstance(self.scheme, PHYSICAL_SCHEMES):
            raise InvalidInput("P_s is only defined for physical schemes")
        if ("Wigner" in outputs) != (self.sweep_var == "grid"):
            raise InvalidInput("Wigner output requires (and is required by) a grid sweep")
        if self.sweep_var == "r":
            if not (isinstance(self.scheme, PilaThen) and isinstance(self.scheme.op, Coherent)):
                raise InvalidInput("an r sweep varies a coherent operation; use PilaThen(Coherent)")
            if lo < 0 or hi > 1:
                raise InvalidInput("r sweeps live in [0, 1]")
        if self.sweep_var == "G" and not isinstance(self.scheme, Scissor) and lo < 1:
            raise InvalidInput("amplifier gain sweeps need lo >= 1")
        if not (math.isfinite(self.gain) and self.gain >= 1):
            raise InvalidInput(f"fixed gain must be >= 1, got {self.gain!r}")
        if not isinstance(self.n_phases, (int, np.integer)) or self.n_phases < 8:
            raise InvalidInput(f"n_phases must be an integer >= 8, got {self.n_phases!r}")


@dataclass(frozen=True)
class SweepRow:
    """One evaluated sweep point with provenance."""

    value: float
    report: MetricReport | None
    extras: dict = field(default_factory=dict)
    dim: int = 0
    trunc_defect: float = 0.0
    wall_ms: float = 0.0
    error: str | None = None


def evaluate_scheme(
    scheme: Scheme, alpha: complex, param: float, dim0: int | None = None
):
    """Build the scheme's normalized output state at one parameter value.

    Returns ``(state, p_s, dim, trunc_defect)`` where ``p_s`` is None for
    non-physical schemes and ``trunc_defect`` is the weight lost to the cutoff
    by the deterministic stage (before any conditioning).
    """
    alpha = complex(alpha)
    if isinstance(scheme, Scissor):
        if not (math.isfinite(param) and param > 0):
            raise InvalidInput(f"scissor gain must be > 0, got {param!r}")

        def run_scissor(dim: int):
            spec = HilbertSpec(dim)
            psi = coherent_ket(alpha, spec)
            state, p_s = scissor_amplify(psi, ScissorConfig(scheme.n, param, spec))
            return state, p_s, dim, 1.0 - psi.norm2

        start = dim0 or initial_dim(abs(alpha), 1.0, scheme.n)
        return grow_dim(run_scissor, start)

    gain = param
    if isinstance(scheme, PilaOnly):
        order = 0
    elif isinstance(scheme, PilaThen):
        order = photon_order(scheme.op)
    elif isinstance(scheme, PilaThenBsSubtraction):
        order = 1
    else:
        raise InvalidInput(f"unknown scheme: {scheme!r}")

    def run_pila(dim: int):
        spec = HilbertSpec(dim)
        amplified = pila_coherent(alpha, gain, spec)
        defect = 1.0 - amplified.weight
        if isinstance(scheme, PilaOnly):
            return amplified, None, dim, defect
        if isinstance(scheme, PilaThen):
            operator = build_operator(scheme.op, spec)
            state, _ = normalize(apply_operation(amplified, operator))
            return state, None, dim, defect
        state, p_s = bs_subtraction(amplified, scheme.transmittance, scheme.detector)
        return state, p_s, dim, defect

    start = dim0 or initial_dim(abs(alpha), gain, order)
    return grow_dim(run_pila, start)


def _scheme_report(
    scheme: Scheme, alpha: complex, param: float, dim0: int | None = None
) -> tuple[MetricReport, int, float]:
    state, p_s, dim, defect = evaluate_scheme(scheme, alpha, param, dim0)
    g_e = effective_gain(state, alpha)
    report = MetricReport(
        G=param,
        G_e=g_e,
        F=fidelity_to_target(state, alpha, g_e),
        V=holevo_variance(state),
        P_s=p_s,
        op=scheme_label(scheme),
        alpha=complex(alpha),
    )
    return report, dim, defect


def calibrate_gain(
    scheme: Scheme,
    alpha: complex,
    target_ge: float,
    bounds: tuple[float, float],
    tol: float = 1e-6,
    max_iter: int = 60,
) -> float:
    """Bisection on the scheme's tuned parameter until measured G_e hits target.

    The tuned parameter is the amplifier gain G (scissor: amplitude gain g).
    Raises NoBracket — reporting the achieved G_e range — when the target does
    not lie between the endpoint values.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (math.isfinite(target_ge) and target_ge > 0):
        raise InvalidInput(f"target G_e must be finite and > 0, got {target_ge!r}")
    if not lo < hi:
        raise InvalidInput(f"need bounds lo < hi, got {bounds!r}")

    def measured(param: float) -> float:
        state, _, _, _ = evaluate_scheme(scheme, alpha, param)
        return effective_gain(state, alpha)

    ge_lo = measured(lo)
    ge_hi = measured(hi)
    f_lo = ge_lo - target_ge
    f_hi = ge_hi - target_ge
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise NoBracket(
            f"target G_e={target_ge:g} not bracketed on [{lo:g}, {hi:g}] for "
            f"{scheme_label(scheme)}: achieved G_e range [{ge_lo:.6g}, {ge_hi:.6g}]"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = measured(mid) - target_ge
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
    best = 0.5 * (lo + hi)
    if abs(measured(best) - target_ge) > tol:
        raise NoBracket(
            f"bisection did not reach |G_e - {target_ge:g}| <= {tol:g} "
            f"within {max_iter} iterations"
        )
    return best


def _pmap(fn, items, workers: int):
    """Order-preserving map, optionally across processes; falls back to serial."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    try:
        with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
            return list(pool.map(fn, items))
    except (OSError, PermissionError):
        return [fn(item) for item in items]


def _sweep_point(plan: SweepPlan, value: float) -> SweepRow:
    start = time.perf_counter()
    try:
        if plan.sweep_var == "G":
            report, dim, defect = _scheme_report(plan.scheme, plan.alpha_mod, value, plan.dim0)
        elif plan.sweep_var == "phase":
            alpha = plan.alpha_mod * complex(math.cos(value), math.sin(value))
            report, dim, defect = _scheme_report(plan.scheme, alpha, plan.gain, plan.dim0)
        else:  # "r"
            op = Coherent(math.sqrt(max(0.0, 1.0 - value * value)), value)
            averaged = phase_averaged_report(
                plan.alpha_mod, op, plan.gain, plan.n_phases, plan.dim0
            )
            report = MetricReport(
                G=plan.gain,
                G_e=averaged["gain"],
                F=averaged["fidelity"],
                V=averaged["holevo"],
                P_s=None,
                op=f"pila+{op_label(op)}",
                alpha=complex(plan.alpha_mod),
            )
            dim, defect = 0, 0.0
        wall = (time.perf_counter() - start) * 1e3
        return SweepRow(value, report, {}, dim, defect, wall)
    except NoisyAmpError as exc:
        wall = (time.perf_counter() - start) * 1e3
        return SweepRow(value, None, {}, 0, 0.0, wall, f"{type(exc).__name__}: {exc}")


def run_sweep(plan: SweepPlan, workers: int = 1) -> list[SweepRow]:
    """Evaluate the plan; one row per point, order fixed by the plan."""
    lo, hi, steps = plan.sweep_range
    if plan.sweep_var == "grid":
        start = time.perf_counter()
        state, _, dim, defect = evaluate_scheme(
            plan.scheme, plan.alpha_mod, plan.gain, plan.dim0
        )
        axis = np.linspace(lo, hi, steps)
        x, p = np.meshgrid(axis, axis)
        w = wigner(state, x + 1j * p)
        wall = (time.perf_counter() - start) * 1e3 / w.size
        rows = []
        for i in range(steps):
            for j in range(steps):
                rows.append(
                    SweepRow(
                        float(x[i, j]),
                        None,
                        {"x": float(x[i, j]), "p": float(p[i, j]), "W": float(w[i, j])},
                        dim,
                        defect,
                        wall,
                    )
                )
        return rows
    values = [float(v) for v in np.linspace(lo, hi, steps)]
    return _pmap(partial(_sweep_point, plan), values, workers)


# ---------------------------------------------------------------------------
# Figure datasets.  Each builder returns (params, header, rows): the params
# dict is echoed into the output header, rows are lists of plain Python values.
# ---------------------------------------------------------------------------

_FIG1_OPS = (Subtract(1), Subtract(2), Add(1), Add(2))


def _ideal_point(alpha_mod: float, ops: tuple[PhotonicOp, ...], dim0, gain: float):
    """Per-G evaluation shared by the fig1/fig3/fig8 builders."""
    reports = []
    for op in ops:
        report, _, _ = _scheme_report(PilaThen(op), alpha_mod, gain, dim0)
        reports.append(report)
    return reports


def _check_alpha_mod(alpha_mod) -> None:
    if not (math.isfinite(alpha_mod) and alpha_mod > 0):
        raise InvalidInput(f"alpha_mod must be finite and > 0, got {alpha_mod!r}")


def _gain_axis_params(alpha_mod, g_min, g_max, steps, dim0):
    _check_alpha_mod(alpha_mod)
    if not (1.0 <= g_min < g_max):
        raise InvalidInput(f"need 1 <= g_min < g_max, got ({g_min!r}, {g_max!r})")
    if not isinstance(steps, (int, np.integer)) or steps < 2:
        raise InvalidInput(f"steps must be an integer >= 2, got {steps!r}")
    params = {
        "alpha_mod": alpha_mod,
        "g_min": g_min,
        "g_max": g_max,
        "steps": steps,
    }
    if dim0:
        params["dim0"] = dim0
    return params, [float(g) for g in np.linspace(g_min, g_max, steps)]


def fig1_table(
    alpha_mod: float = 0.2,
    g_min: float = 1.0,
    g_max: float = 2.5,
    steps: int = 16,
    workers: int = 1,
    dim0: int | None = None,
):
    """Effective gain of the four ideal operations versus amplifier gain."""
    params, gains = _gain_axis_params(alpha_mod, g_min, g_max, steps, dim0)
    point = partial(_ideal_point, alpha_mod, _FIG1_OPS, dim0)
    rows = [
        [g] + [rep.G_e for rep in reps]
        for g, reps in zip(gains, _pmap(point, gains, workers))
    ]
    return params, ["G", "Ge_sub1", "Ge_sub2", "Ge_add1", "Ge_add2"], rows


def fig3a_table(
    alpha_mod: float = 0.2,
    g_min: float = 1.0,
    g_max: float = 2.5,
    steps: int = 16,
    workers: int = 1,
    dim0: int | None = None,
):
    """Fidelity (to each operation's own effective-gain target) versus G."""
    params, gains = _gain_axis_params(alpha_mod, g_min, g_max, steps, dim0)
    point = partial(_ideal_point, alpha_mod, _FIG1_OPS, dim0)
    rows = [
        [g] + [rep.F for rep in reps]
        for g, reps in zip(gains, _pmap(point, gains, workers))
    ]
    return params, ["G", "F_sub1", "F_sub2", "F_add1", "F_add2"], rows


def _fig3b_point(alpha_mod: float, dim0, gain: float):
    pila, _, _ = _scheme_report(PilaOnly(), alpha_mod, gain, dim0)
    subs = _ideal_point(alpha_mod, (Subtract(1), Subtract(2)), dim0, gain)
    return pila, subs


def fig3b_table(
    alpha_mod: float = 0.2,
    g_min: float = 1.0,
    g_max: float = 2.5,
    steps: int = 16,
    workers: int = 1,
    dim0: int | None = None,
):
    """Gain/fidelity trade-off: bare amplifier versus subtraction pipelines."""
    params, gains = _gain_axis_params(alpha_mod, g_min, g_max, steps, dim0)
    rows = []
    points = _pmap(partial(_fig3b_point, alpha_mod, dim0), gains, workers)
    for g, (pila, subs) in zip(gains, points):
        rows.append(
            [g, pila.G_e, pila.F, subs[0].G_e, subs[0].F, subs[1].G_e, subs[1].F]
        )
    header = ["G", "Ge_pila", "F_pila", "Ge_sub1", "F_sub1", "Ge_sub2", "F_sub2"]
    return params, header, rows


def _fig8_point(alpha_mod: float, dim0, gain: float):
    pila, _, _ = _scheme_report(PilaOnly(), alpha_mod, gain, dim0)
    return pila, _ideal_point(alpha_mod, _FIG1_OPS, dim0, gain)


def fig8_table(
    alpha_mod: float = 0.2,
    g_min: float = 1.0,
    g_max: float = 2.5,
    steps: int = 16,
    workers: int = 1,
    dim0: int | None = None,
):
    """Holevo phase variance versus G: bare amplifier and the four operations."""
    params, gains = _gain_axis_params(alpha_mod, g_min, g_max, steps, dim0)
    rows = []
    points = _pmap(partial(_fig8_point, alpha_mod, dim0), gains, workers)
    for g, (pila, ops) in zip(gains, points):
        rows.append([g, pila.V] + [rep.V for rep in ops])
    header = ["G", "V_pila", "V_sub1", "V_sub2", "V_add1", "V_add2"]
    return params, header, rows


def _ratio_point(alpha_mod: float, gain: float, n_phases: int, dim0, r: float):
    op = Coherent(math.sqrt(max(0.0, 1.0 - r * r)), r)
    return phase_averaged_report(alpha_mod, op, gain, n_phases, dim0)


def _ratio_table(
    metric: str,
    column: str,
    alpha_mod: float,
    gain: float,
    steps: int,
    n_phases: int,
    workers: int,
    dim0: int | None,
):
    """Shared builder for the phase-averaged r sweeps (gain/fidelity/variance)."""
    _check_alpha_mod(alpha_mod)
    params = {
        "alpha_mod": alpha_mod,
        "gain": gain,
        "steps": steps,
        "n_phases": n_phases,
    }
    if dim0:
        params["dim0"] = dim0
    ratios = [float(r) for r in np.linspace(0.0, 1.0, steps)]
    averaged = _pmap(partial(_ratio_point, alpha_mod, gain, n_phases, dim0), ratios, workers)
    sub_ref, _, _ = _scheme_report(PilaThen(Subtract(1)), alpha_mod, gain, dim0)
    add_ref, _, _ = _scheme_report(PilaThen(Add(1)), alpha_mod, gain, dim0)
    key = {"G_e": "gain", "F": "fidelity", "V": "holevo"}[metric]
    ref = {
        "G_e": (sub_ref.G_e, add_ref.G_e),
        "F": (sub_ref.F, add_ref.F),
        "V": (sub_ref.V, add_ref.V),
    }[metric]
    prefix = column.split("_")[0]
    rows = [[r, avg[key], ref[0], ref[1]] for r, avg in zip(ratios, averaged)]
    return params, ["r", column, f"{prefix}_sub1", f"{prefix}_add1"], rows


def fig2_table(
    alpha_mod: float = 0.2,
    gain: float = 1.2,
    steps: int = 21,
    n_phases: int = 64,
    workers: int = 1,
    dim0: int | None = None,
):
    """Phase-averaged effective gain versus the coherent-operation ratio r."""
    return _ratio_table("G_e", "Ge_avg", alpha_mod, gain, steps, n_phases, workers, dim0)


def fig7_table(
    alpha_mod: float = 0.2,
    gain: float = 1.2,
    steps: int = 21,
    n_phases: int = 64,
    workers: int = 1,
    dim0: int | None = None,
):
    """Phase-averaged fidelity versus the coherent-operation ratio r."""
    return _ratio_table("F", "F_avg", alpha_mod, gain, steps, n_phases, workers, dim0)


def fig9_table(
    alpha_mod: float = 0.2,
    gain: float = 1.2,
    steps: int = 21,
    n_phases: int = 64,
    workers: int = 1,
    dim0: int | None = None,
):
    """Phase-averaged Holevo variance versus the coherent-operation ratio r."""
    return _ratio_table("V", "V_avg", alpha_mod, gain, steps, n_phases, workers, dim0)


def fig4_table(
    alpha_mods: tuple[float, ...] = (0.2, 1.0),
    n_max: int = 4,
    transmittance: float = 0.99,
    target_ge: float = 2.0,
    g_bounds: tuple[float, float] = (1.0, 6.0),
    gain_bounds: tuple[float, float] = (1.0, 2.5),
    dim0: int | None = None,
):
    """Scissor versus beam-splitter subtraction at a fixed effective gain.

    Both schemes are calibrated to the same measured effective gain.  When the
    scissor's measured G_e cannot reach the target inside ``g_bounds`` (the
    N-photon output truncation caps the mean amplitude at large seed), the row
    falls back to the nominal amplitude gain g = sqrt(target) and says so in
    its ``calibration`` column.  ``Ps_scissor`` counts all 2^N heralding
    patterns; ``Ps_scissor_canonical`` is the fixed-pattern value.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise InvalidInput(f"n_max must be an integer >= 1, got {n_max!r}")
    for alpha_mod in alpha_mods:
        _check_alpha_mod(alpha_mod)
    params = {
        "alpha_mods": ",".join(f"{a:g}" for a in alpha_mods),
        "n_max": n_max,
        "transmittance": transmittance,
        "target_ge": target_ge,
    }
    header = [
        "alpha_mod",
        "N",
        "g",
        "calibration",
        "Ge_scissor",
        "F_scissor",
        "Ps_scissor",
        "Ps_scissor_canonical",
        "G_sub",
        "Ge_sub",
        "F_sub",
        "Ps_sub",
    ]
    rows = []
    for alpha_mod in alpha_mods:
        sub_scheme = PilaThenBsSubtraction(transmittance)
        g_sub = calibrate_gain(sub_scheme, alpha_mod, target_ge, gain_bounds)
        sub_state, ps_sub, _, _ = evaluate_scheme(sub_scheme, alpha_mod, g_sub, dim0)
        ge_sub = effective_gain(sub_state, alpha_mod)
        f_sub = fidelity_to_target(sub_state, alpha_mod, target_ge)
        for n_sc in range(1, n_max + 1):
            scheme = Scissor(n_sc)
            try:
                g_val = calibrate_gain(scheme, alpha_mod, target_ge, g_bounds)
                mode = "measured"
            except NoBracket:
                g_val = math.sqrt(target_ge)
                mode = "nominal"
            state, p_s, _, _ = evaluate_scheme(scheme, alpha_mod, g_val, dim0)
            rows.append(
                [
                    alpha_mod,
                    n_sc,
                    g_val,
                    mode,
                    effective_gain(state, alpha_mod),
                    fidelity_to_target(state, alpha_mod, target_ge),
                    p_s,
                    p_s / 2**n_sc,
                    g_sub,
                    ge_sub,
                    f_sub,
                    ps_sub,
                ]
            )
    return params, header, rows


_WIGNER_OPS = ("pila", "sub1", "sub2", "add1", "add2", "coh")


def wigner_table(
    op: str = "sub1",
    alpha_mod: float = 0.2,
    gain: float = 1.2,
    ratio: float = math.sqrt(0.5),
    phase: float = 0.0,
    grid_min: float = -3.0,
    grid_max: float = 3.0,
    grid_step: float = 0.05,
    dim0: int | None = None,
):
    """Wigner function of one pipeline output on a square grid.

    ``op`` picks the pipeline stage after the amplifier ('pila' for none;
    'coh' uses the mixing ratio ``ratio``).  ``phase`` rotates the seed:
    alpha = alpha_mod * exp(i phase).
    """
    if op not in _WIGNER_OPS:
        raise InvalidInput(f"op must be one of {_WIGNER_OPS}, got {op!r}")
    _check_alpha_mod(alpha_mod)
    params = {
        "op": op,
        "alpha_mod": alpha_mod,
        "gain": gain,
        "phase": phase,
        "grid_min": grid_min,
        "grid_max": grid_max,
        "grid_step": grid_step,
    }
    if op == "coh":
        params["ratio"] = ratio
    alpha = alpha_mod * complex(math.cos(phase), math.sin(phase))
    scheme: Scheme
    if op == "pila":
        scheme = PilaOnly()
    elif op == "coh":
        if not (0.0 <= ratio <= 1.0):
            raise InvalidInput(f"ratio must be in [0, 1], got {ratio!r}")
        scheme = PilaThen(Coherent(math.sqrt(max(0.0, 1.0 - ratio * ratio)), ratio))
    else:
        builder = {"sub1": Subtract(1), "sub2": Subtract(2), "add1": Add(1), "add2": Add(2)}
        scheme = PilaThen(builder[op])
    state, _, _, _ = evaluate_scheme(scheme, alpha, gain, dim0)
    axis, grid = phase_space_grid(grid_min, grid_max, grid_step)
    w = wigner(state, grid)
    rows = []
    for i in range(len(axis)):
        for j in range(len(axis)):
            rows.append([float(axis[j]), float(axis[i]), float(w[i, j])])
    return params, ["x", "p", "W"], rows
