"""File formats: CSV data, YAML project config, JSON reports, SVG plots.

CSV dialect: comma separated, ``.`` decimal point, UTF-8, lines starting
with ``#`` are comments. Floats are written in shortest round-trip form so
save/load cycles are exact. Angles in files are degrees.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np
import yaml

from .actuation import MotorCalibration, SetpointSchedule
from .analysis import AngleSeries, ImuLog
from .errors import DataFormatError, FiveBarError
from .mechanism import ElbowConfig, MechanismParams, PlanarPath
from .planner import (CycleTiming, CycleWaypoints, PiecewiseQuintic, ProfileSamples,
                      QuinticSegment)
from .synthesis import (FIELD_NAMES, Bounds, DesignVector, OptimizationResult,
                        SynthesisOptions, REFERENCE_DESIGN)

PATH_HEADERS = (("x_mm", "z_mm"), ("t_s", "x_mm", "z_mm"))
IMU_HEADER = ("t_s", "zeta_x_deg", "zeta_y_deg", "zeta_z_deg")
ANGLE_HEADER = ("t_s", "angle_deg")
PROFILE_HEADER = ("t_s", "theta_deg", "omega_deg_s", "alpha_deg_s2")
ANGLE_FIELDS = ("theta1_start", "theta1_end", "theta2_start", "theta2_end")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


# --------------------------------------------------------------------------- CSV

def read_csv(file, headers: Sequence[Sequence[str]]) -> Dict[str, np.ndarray]:
    """Parse a numeric CSV whose header is one of ``headers``.

    Returns a column-name -> float array mapping. Errors name the 1-based
    line number of the offending row.
    """
    text = _read_text(file)
    rows = []
    header = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([stripped]))]
        if header is None:
            if tuple(cells) not in {tuple(h) for h in headers}:
                expected = " or ".join(",".join(h) for h in headers)
                raise DataFormatError(f"unexpected header {','.join(cells)!r}, expected {expected}",
                                      line=lineno)
            header = tuple(cells)
            continue
        if len(cells) != len(header):
            raise DataFormatError(f"expected {len(header)} fields, got {len(cells)}", line=lineno)
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise DataFormatError(f"non-numeric value in row {stripped!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise DataFormatError("non-finite value", line=lineno)
        rows.append(values)
    if header is None:
        raise DataFormatError("file is empty")
    if not rows:
        raise DataFormatError("file has a header but no data rows")
    data = np.array(rows, dtype=np.float64)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_csv(file, header: Sequence[str], columns: Sequence[Iterable],
              comments: Sequence[str] = ()):
    buf = _io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    _write_text(file, buf.getvalue())


def _read_text(file):
    if hasattr(file, "read"):
        return file.read()
    try:
        return Path(file).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {file}: {exc.strerror}") from exc


def _write_text(file, text):
    if hasattr(file, "write"):
        file.write(text)
    else:
        Path(file).write_text(text, encoding="utf-8")


def load_path_csv(file) -> PlanarPath:
    cols = read_csv(file, PATH_HEADERS)
    try:
        return PlanarPath(np.column_stack([cols["x_mm"], cols["z_mm"]]), cols.get("t_s"))
    except FiveBarError as exc:
        raise DataFormatError(str(exc)) from None


def save_path_csv(path: PlanarPath, file, comments: Sequence[str] = ()):
    if path.t is None:
        write_csv(file, PATH_HEADERS[0], [path.x, path.z], comments)
    else:
        write_csv(file, PATH_HEADERS[1], [path.t, path.x, path.z], comments)


def load_imu_csv(file) -> ImuLog:
    cols = read_csv(file, [IMU_HEADER])
    try:
        return ImuLog(*(cols[k] for k in IMU_HEADER))
    except FiveBarError as exc:
        raise DataFormatError(str(exc)) from None


def save_imu_csv(log: ImuLog, file):
    write_csv(file, IMU_HEADER, [log.t, log.zeta_x, log.zeta_y, log.zeta_z])


def load_angle_csv(file) -> AngleSeries:
    cols = read_csv(file, [ANGLE_HEADER])
    return AngleSeries(cols["t_s"], cols["angle_deg"])


def save_angle_csv(series: AngleSeries, file):
    write_csv(file, ANGLE_HEADER, [series.t, series.angle])


def save_profile_csv(samples: ProfileSamples, file):
    write_csv(file, PROFILE_HEADER,
              [samples.t, np.degrees(samples.theta), np.degrees(samples.omega),
               np.degrees(samples.alpha)])


def load_profile_csv(file) -> Dict[str, np.ndarray]:
    return read_csv(file, [PROFILE_HEADER])


def save_schedule_csv(schedule: SetpointSchedule, file):
    motors = sorted(schedule.motors)
    write_csv(file, ["t_s"] + [f"{m}_counts" for m in motors],
              [schedule.t] + [schedule.counts[m] for m in motors])


def load_schedule_csv(file, motors=("m1", "m2")) -> SetpointSchedule:
    cols = read_csv(file, [["t_s"] + [f"{m}_counts" for m in motors]])
    try:
        return SetpointSchedule(cols["t_s"], {m: cols[f"{m}_counts"] for m in motors})
    except FiveBarError as exc:
        raise DataFormatError(str(exc)) from None


def default_desired_path_file():
    return resources.files("fivebar").joinpath("data/desired_path.csv")


def load_default_desired_path() -> PlanarPath:
    return load_path_csv(_io.StringIO(default_desired_path_file().read_text(encoding="utf-8")))


SURROGATE_COMMENT = ("SURROGATE desired fingertip path: traced by the reference mechanism "
                     "(l1=101.09, l2=108.67, l0=101.20 mm) over its design input-angle range "
                     "with a minimum-jerk angle schedule; not measured finger data")


def make_surrogate_path(n: int = 60) -> PlanarPath:
    """Desired-path stand-in traced by the reference mechanism.

    The cranks move from the flexion to the extension angles along the
    minimum-jerk profile ``10u^3 - 15u^4 + 6u^5``, so the samples are not
    evenly spread along the curve and the linear sweep used during synthesis
    does not reproduce them exactly.
    """
    from .mechanism import JointState, trace_path

    u = np.arange(n) / (n - 1.0)
    s = u ** 3 * (10.0 - 15.0 * u + 6.0 * u * u)
    d = REFERENCE_DESIGN
    states = [JointState(d.theta1_start + si * (d.theta1_end - d.theta1_start),
                         d.theta2_start + si * (d.theta2_end - d.theta2_start)) for si in s]
    return trace_path(d.params, states)


# ------------------------------------------------------------------ JSON reports

def design_to_dict(design: DesignVector) -> dict:
    out = {}
    for name in FIELD_NAMES:
        v = getattr(design, name)
        out[f"{name}_deg" if name in ANGLE_FIELDS else f"{name}_mm"] = (
            math.degrees(v) if name in ANGLE_FIELDS else v)
    return out


def design_from_dict(d: Mapping) -> DesignVector:
    vals = []
    for name in FIELD_NAMES:
        key = f"{name}_deg" if name in ANGLE_FIELDS else f"{name}_mm"
        if key not in d:
            raise DataFormatError(f"design is missing {key!r}")
        vals.append(math.radians(d[key]) if name in ANGLE_FIELDS else float(d[key]))
    return DesignVector(*vals)


def result_to_dict(result: OptimizationResult) -> dict:
    cr = result.constraint_report
    return {
        "design": design_to_dict(result.best),
        "error_mm": result.error_mm,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "stop_reason": result.stop_reason,
        "constraints": {"max_abs_r1": cr.max_abs_r1, "max_abs_r2": cr.max_abs_r2,
                        "infeasible_samples": cr.infeasible_samples,
                        "geometric_ok": cr.geometric_ok},
        "history": [[i, e] for i, e in result.history],
    }


def write_json(obj, file):
    _write_text(file, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def read_json(file):
    try:
        return json.loads(_read_text(file))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None


def load_design_report(file) -> DesignVector:
    data = read_json(file)
    return design_from_dict(data["design"] if "design" in data else data)


def plan_to_dict(plans: Mapping[str, PiecewiseQuintic]) -> dict:
    """Segment domains and coefficients; coefficients act on angles in rad."""
    return {m: [{"t_lo": s.t_lo, "t_hi": s.t_hi, "coeffs": [float(c) for c in s.coeffs]}
                for s in p.segments] for m, p in sorted(plans.items())}


def plan_from_dict(d: Mapping) -> Dict[str, PiecewiseQuintic]:
    try:
        return {m: PiecewiseQuintic(tuple(QuinticSegment(s["coeffs"], s["t_lo"], s["t_hi"])
                                          for s in segs))
                for m, segs in d.items()}
    except (KeyError, TypeError, FiveBarError) as exc:
        raise DataFormatError(f"malformed plan: {exc}") from None


# ----------------------------------------------------------------------- config

@dataclass(frozen=True)
class MotorConfig:
    """One actuated crank: which joint it drives and its encoder map."""

    joint: str
    calibration: MotorCalibration
    waypoints: CycleWaypoints


@dataclass(frozen=True)
class ProjectConfig:
    mechanism: MechanismParams
    elbows: ElbowConfig
    design: DesignVector
    bounds: Bounds
    timing: CycleTiming
    motors: Dict[str, MotorConfig]
    synthesis: SynthesisOptions
    seed: int = 0
    restarts: int = 0
    rate_hz: float = 100.0
    period_s: float = 10.0
    baseline_s: float = 0.5
    axis: str = "y"


_SCHEMA = {
    "mechanism": {"l0_mm", "l1_mm", "l2_mm"},
    "elbows": {"b_sign", "f_sign"},
    "design": {"theta1_start_deg", "theta1_end_deg", "theta2_start_deg", "theta2_end_deg"},
    "bounds": {"length_mm", "angle_deg"},
    "timing": {"t_v1", "t_f1", "t_v2", "t_f2"},
    "motors": None,
    "synthesis": {"max_iter", "max_evals", "tol_mm", "seed", "restarts"},
    "sampling": {"rate_hz"},
    "analysis": {"period_s", "baseline_s", "axis"},
}
_MOTOR_KEYS = {"joint", "counts_per_degree", "zero_angle_deg", "direction", "waypoints_deg"}


def _check_keys(section, data, allowed):
    if not isinstance(data, Mapping):
        raise DataFormatError(f"section {section!r} must be a mapping")
    unknown = set(data) - allowed
    if unknown:
        raise DataFormatError(f"unknown key(s) in {section!r}: {', '.join(sorted(unknown))}")
    missing = allowed - set(data)
    if missing:
        raise DataFormatError(f"missing key(s) in {section!r}: {', '.join(sorted(missing))}")


def config_from_dict(raw: Mapping) -> ProjectConfig:
    if not isinstance(raw, Mapping):
        raise DataFormatError("config must be a mapping")
    unknown = set(raw) - set(_SCHEMA)
    if unknown:
        raise DataFormatError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    missing = set(_SCHEMA) - set(raw)
    if missing:
        raise DataFormatError(f"missing config section(s): {', '.join(sorted(missing))}")
    for name, keys in _SCHEMA.items():
        if keys is not None:
            _check_keys(name, raw[name], keys)
    try:
        m = raw["mechanism"]
        mech = MechanismParams(float(m["l0_mm"]), float(m["l1_mm"]), float(m["l2_mm"]))
        elbows = ElbowConfig(int(raw["elbows"]["b_sign"]), int(raw["elbows"]["f_sign"]))
        d = raw["design"]
        design = DesignVector.from_degrees(mech.l1, mech.l2, mech.l0,
                                           *(float(d[f"{n}_deg"]) for n in ANGLE_FIELDS))
        b = raw["bounds"]
        bounds = Bounds.default(tuple(map(float, b["length_mm"])), tuple(map(float, b["angle_deg"])))
        timing = CycleTiming(**{k: float(v) for k, v in raw["timing"].items()})
        motors = {}
        if not isinstance(raw["motors"], Mapping) or not raw["motors"]:
            raise DataFormatError("section 'motors' must map motor ids to settings")
        for mid, mc in raw["motors"].items():
            _check_keys(f"motors.{mid}", mc, _MOTOR_KEYS)
            if mc["joint"] not in ("theta1", "theta2"):
                raise DataFormatError(f"motors.{mid}.joint must be theta1 or theta2")
            cal = MotorCalibration(float(mc["counts_per_degree"]), float(mc["zero_angle_deg"]),
                                   int(mc["direction"]))
            motors[str(mid)] = MotorConfig(mc["joint"], cal,
                                           CycleWaypoints.from_degrees(list(map(float, mc["waypoints_deg"]))))
        s = raw["synthesis"]
        opts = SynthesisOptions(max_iter=int(s["max_iter"]), max_evals=int(s["max_evals"]),
                                tol=float(s["tol_mm"]))
        a = raw["analysis"]
        if a["axis"] not in ("x", "y", "z"):
            raise DataFormatError("analysis.axis must be x, y or z")
        return ProjectConfig(mech, elbows, design, bounds, timing, motors, opts,
                             seed=int(s["seed"]), restarts=int(s["restarts"]),
                             rate_hz=float(raw["sampling"]["rate_hz"]),
                             period_s=float(a["period_s"]), baseline_s=float(a["baseline_s"]),
                             axis=a["axis"])
    except DataFormatError:
        raise
    except (FiveBarError, TypeError, ValueError) as exc:
        raise DataFormatError(f"invalid config value: {exc}") from None


def load_config(file="default") -> ProjectConfig:
    """Load a YAML project config; ``"default"`` selects the bundled profile."""
    if file == "default":
        text = resources.files("fivebar").joinpath("data/default.yaml").read_text(encoding="utf-8")
    else:
        text = _read_text(file)
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        line = getattr(getattr(exc, "problem_mark", None), "line", None)
        raise DataFormatError(f"invalid YAML: {exc}", line=None if line is None else line + 1) from None
    return config_from_dict(raw)


# ------------------------------------------------------------------------- plot

def plot_csv(file, out, x: Optional[str] = None, ys: Optional[Sequence[str]] = None,
             title: Optional[str] = None):
    """Render columns of any CSV produced here as a polyline chart (SVG)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    text = _read_text(file)
    header = None
    for line in text.splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            header = [c.strip() for c in line.split(",")]
            break
    if header is None:
        raise DataFormatError("file is empty")
    cols = read_csv(_io.StringIO(text), [header])
    x = x or header[0]
    ys = list(ys) if ys else [h for h in header if h != x]
    for name in [x, *ys]:
        if name not in cols:
            raise DataFormatError(f"no column named {name!r}")
    # fixed salt keeps the SVG element ids, and so the file, reproducible
    with plt.rc_context({"svg.hashsalt": "fivebar"}):
        fig, ax = plt.subplots(figsize=(7, 4))
        for name in ys:
            ax.plot(cols[x], cols[name], label=name, linewidth=1.2)
        ax.set_xlabel(x)
        ax.set_ylabel(ys[0] if len(ys) == 1 else "value")
        if len(ys) > 1:
            ax.legend()
        if x == "x_mm" and ys == ["z_mm"]:
            ax.set_aspect("equal", adjustable="datalim")
        if title:
            ax.set_title(title)
        ax.grid(True, linewidth=0.3)
        fig.tight_layout()
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
