"""Parameter sweep runner: grids, figure presets, CSV rows, SVG curves.

A sweep varies one axis parameter over a linear range, optionally crossed
with a family of values for a second parameter (one curve per family value).
Every grid point is evaluated independently and becomes one CSV row holding
the requested quantities from both engines plus their residual, the
truncation certificate (cutoff and tail mass), and an error flag.  Rows are
emitted in grid order whatever the thread count, and floats are written via
repr, so identical configs produce byte-identical files.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from . import analytic, fock, metrology, svg
from .model import Coupling, PointerParams, SelectionParams

AXES = ("phi", "strength", "r")
FAMILY_PARAMS = ("phi", "delta", "r", "theta", "strength")
OUTPUTS = ("dx", "dp", "transition", "chi", "qfi", "crb")

THREAD_ENV = "SPACMETER_THREADS"

# columns contributed by each requested output, in emission order
_OUTPUT_COLUMNS = {
    "dx": ("dx_closed[length]", "dx_oracle[length]", "dx_residual[length]", "dx_over_g[1]"),
    "dp": ("dp_closed[1/length]", "dp_oracle[1/length]", "dp_residual[1/length]", "dp_over_g[1]"),
    "transition": (
        "transition_closed.re[1]",
        "transition_closed.im[1]",
        "transition_oracle.re[1]",
        "transition_oracle.im[1]",
        "transition_residual[1]",
    ),
    "chi": ("chi[1]",),
    "qfi": ("qfi[1]",),
    "crb": ("crb[1]",),
}

_BASE_COLUMNS = (
    "index",
    "phi[rad]",
    "delta[rad]",
    "r[1]",
    "theta[rad]",
    "sigma[length]",
    "strength[1]",
)

_TAIL_COLUMNS = ("n_max[1]", "tail_mass[1]", "flag")


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: axis range, optional curve family, fixed point, outputs."""

    axis: str
    start: float
    stop: float
    count: int
    phi: float = math.pi / 6
    delta: float = math.pi / 6
    r: float = 2.0
    theta: float = math.pi / 6
    sigma: float = 1.0
    strength: float = 1.0
    family: str | None = None
    family_values: tuple[float, ...] = ()
    outputs: tuple[str, ...] = ("dx", "dp")
    trials: int = 1

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        if self.count < 2:
            raise ValueError("count must be at least 2")
        if not self.outputs:
            raise ValueError("at least one output is required")
        for name in self.outputs:
            if name not in OUTPUTS:
                raise ValueError(f"unknown output {name!r}; choose from {OUTPUTS}")
        if self.family is not None:
            if self.family not in FAMILY_PARAMS:
                raise ValueError(f"family must be one of {FAMILY_PARAMS}")
            if self.family == self.axis:
                raise ValueError("family parameter must differ from the sweep axis")
            if not self.family_values:
                raise ValueError("family requires at least one value")
        elif self.family_values:
            raise ValueError("family_values given without a family parameter")
        if self.trials < 1:
            raise ValueError("trials must be a positive count")
        lo, hi = min(self.start, self.stop), max(self.start, self.stop)
        if self.axis == "phi" and not (0.0 <= lo and hi <= math.pi + 1e-12):
            raise ValueError("phi range must stay inside [0, pi]")
        if self.axis in ("strength", "r") and lo < 0.0:
            raise ValueError(f"{self.axis} range must be nonnegative")

    def axis_values(self) -> list[float]:
        step = (self.stop - self.start) / (self.count - 1)
        values = [self.start + step * i for i in range(self.count)]
        values[-1] = self.stop  # endpoints exact under float rounding
        return values

    def header(self) -> list[str]:
        cols = list(_BASE_COLUMNS)
        for name in self.outputs:
            cols.extend(_OUTPUT_COLUMNS[name])
        cols.extend(_TAIL_COLUMNS)
        return cols


def _fmt(value: float) -> str:
    return repr(float(value))


def _evaluate(spec: SweepSpec, index: int, params: dict[str, float]) -> dict[str, str]:
    row = {
        "index": str(index),
        "phi[rad]": _fmt(params["phi"]),
        "delta[rad]": _fmt(params["delta"]),
        "r[1]": _fmt(params["r"]),
        "theta[rad]": _fmt(params["theta"]),
        "sigma[length]": _fmt(params["sigma"]),
        "strength[1]": _fmt(params["strength"]),
        "flag": "",
    }
    try:
        sel = SelectionParams(phi=params["phi"], delta=params["delta"])
        pointer = PointerParams(r=params["r"], theta=params["theta"], sigma=params["sigma"])
        coupling = Coupling(strength=params["strength"])
        pol = fock.TruncationPolicy()

        assembled = fock.assemble_final_state(sel, pointer, coupling, pol)
        row["n_max[1]"] = str(assembled.state.n_max)
        row["tail_mass[1]"] = _fmt(assembled.state.tail_mass)

        wants_shifts = any(o in spec.outputs for o in ("dx", "dp", "transition"))
        if wants_shifts:
            closed = analytic.pointer_shifts(sel, pointer, coupling)
            base = fock.moments(fock.spac_state(pointer, pol), pointer)
            kept = fock.moments(assembled.state, pointer)
            g = coupling.coupling_constant(pointer)
            if "dx" in spec.outputs:
                oracle = kept.position_mean - base.position_mean
                row["dx_closed[length]"] = _fmt(closed.position_shift)
                row["dx_oracle[length]"] = _fmt(oracle)
                row["dx_residual[length]"] = _fmt(abs(closed.position_shift - oracle))
                if g > 0.0:
                    row["dx_over_g[1]"] = _fmt(closed.position_shift / g)
            if "dp" in spec.outputs:
                oracle = kept.momentum_mean - base.momentum_mean
                row["dp_closed[1/length]"] = _fmt(closed.momentum_shift)
                row["dp_oracle[1/length]"] = _fmt(oracle)
                row["dp_residual[1/length]"] = _fmt(abs(closed.momentum_shift - oracle))
                if g > 0.0:
                    # momentum measured in its natural unit g / sigma^2
                    row["dp_over_g[1]"] = _fmt(
                        closed.momentum_shift * pointer.sigma ** 2 / g
                    )
            if "transition" in spec.outputs:
                oracle_t = fock.transition_moment(sel, pointer, coupling, pol)
                row["transition_closed.re[1]"] = _fmt(closed.transition.real)
                row["transition_closed.im[1]"] = _fmt(closed.transition.imag)
                row["transition_oracle.re[1]"] = _fmt(oracle_t.real)
                row["transition_oracle.im[1]"] = _fmt(oracle_t.imag)
                row["transition_residual[1]"] = _fmt(abs(closed.transition - oracle_t))

        if "chi" in spec.outputs:
            row["chi[1]"] = _fmt(
                metrology.snr(sel, pointer, coupling, spec.trials, pol).ratio
            )
        if "qfi" in spec.outputs or "crb" in spec.outputs:
            report = metrology.qfi(sel, pointer, coupling, spec.trials, policy=pol)
            if "qfi" in spec.outputs:
                row["qfi[1]"] = _fmt(report.weighted_fisher)
            if "crb" in spec.outputs:
                row["crb[1]"] = _fmt(report.cramer_rao)
    except (ValueError, ArithmeticError, RuntimeError) as err:
        row["flag"] = type(err).__name__
    return row


def _worker_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get(THREAD_ENV, "")
    if env.strip():
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def run_sweep(spec: SweepSpec, threads: int | None = None) -> tuple[list[str], list[dict[str, str]]]:
    """Evaluate the grid; returns (header, rows) with rows in grid order."""
    jobs: list[dict[str, float]] = []
    fixed = {
        "phi": spec.phi,
        "delta": spec.delta,
        "r": spec.r,
        "theta": spec.theta,
        "sigma": spec.sigma,
        "strength": spec.strength,
    }
    families = list(spec.family_values) if spec.family else [None]
    for fam_val in families:
        for axis_val in spec.axis_values():
            point = dict(fixed)
            if fam_val is not None:
                point[spec.family] = fam_val
            point[spec.axis] = axis_val
            jobs.append(point)

    workers = _worker_count(threads)
    if workers == 1:
        rows = [_evaluate(spec, i, params) for i, params in enumerate(jobs)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(lambda pair: _evaluate(spec, pair[0], pair[1]), enumerate(jobs))
            )
    return spec.header(), rows


def write_csv(path: str, header: list[str], rows: list[dict[str, str]]) -> None:
    """Single-writer CSV emission in row order; no quoting is ever needed."""
    with open(path, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(row.get(col, "") for col in header) + "\n")


def _primary_column(spec: SweepSpec) -> str:
    first = spec.outputs[0]
    return {
        "dx": "dx_closed[length]",
        "dp": "dp_closed[1/length]",
        "transition": "transition_closed.re[1]",
        "chi": "chi[1]",
        "qfi": "qfi[1]",
        "crb": "crb[1]",
    }[first]


def write_plot(path: str, spec: SweepSpec, header: list[str], rows: list[dict[str, str]]) -> None:
    """Plot the first requested output against the axis, one curve per family."""
    y_col = _primary_column(spec)
    axis_col = f"{spec.axis}[rad]" if spec.axis == "phi" else f"{spec.axis}[1]"
    count = spec.count
    curves = []
    families = list(spec.family_values) if spec.family else [None]
    for idx, fam_val in enumerate(families):
        block = rows[idx * count : (idx + 1) * count]
        xs = [float(r[axis_col]) for r in block]
        ys = [float(r[y_col]) if r.get(y_col, "") else math.nan for r in block]
        label = f"{spec.family}={fam_val:.6g}" if fam_val is not None else y_col
        curves.append((label, xs, ys))
    svg.write_svg(path, curves, f"{y_col} vs {spec.axis}", spec.axis, y_col)


PRESETS: dict[str, SweepSpec] = {
    # conditioned shifts between the weak-value curve and the strong plateau
    "fig1": SweepSpec(
        axis="phi",
        start=0.0,
        stop=math.pi,
        count=201,
        delta=math.pi / 6,
        r=2.0,
        theta=math.pi / 6,
        family="strength",
        family_values=(0.01, 0.5, 1.0, 2.0, 5.0, 20.0),
        outputs=("dx", "dp", "transition"),
    ),
    # SNR ratio vs strength for nearly orthogonal selections
    "fig3a": SweepSpec(
        axis="strength",
        start=0.05,
        stop=1.0,
        count=201,
        delta=5 * math.pi / 12,
        theta=math.pi / 2,
        r=5.0,
        family="phi",
        family_values=(math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3),
        outputs=("chi",),
    ),
    # SNR ratio vs pointer amplitude at fixed strength
    "fig3b": SweepSpec(
        axis="r",
        start=0.0,
        stop=10.0,
        count=201,
        delta=5 * math.pi / 12,
        theta=math.pi / 2,
        strength=0.3,
        family="phi",
        family_values=(math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3),
        outputs=("chi",),
    ),
    # selection-weighted Fisher information and its estimation bound
    "fig4": SweepSpec(
        axis="strength",
        start=0.01,
        stop=2.0,
        count=201,
        delta=math.pi / 6,
        r=2.0,
        theta=math.pi / 6,
        family="phi",
        family_values=(math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3),
        outputs=("qfi", "crb"),
        trials=1,
    ),
    # Fisher information vs pointer amplitude
    "fig5": SweepSpec(
        axis="r",
        start=0.0,
        stop=5.0,
        count=201,
        phi=math.pi / 6,
        delta=math.pi / 6,
        theta=math.pi / 6,
        family="strength",
        family_values=(0.1, 0.5, 1.0, 2.0),
        outputs=("qfi",),
    ),
}


def preset(name: str) -> SweepSpec:
    try:
        return replace(PRESETS[name])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
