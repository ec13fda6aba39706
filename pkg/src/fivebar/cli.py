"""Command-line entry point: ``fivebar <subcommand> [options]``.

Exit status: 0 success, 1 domain error (infeasible pose, singular plan...),
2 unknown subcommand or no arguments, 3 missing or invalid argument,
4 file error (unreadable, malformed).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io as fio
from .actuation import schedule_from_plan, simulate_encoder_playback
from .analysis import analyze_cycles, rotation_profile
from .errors import DataFormatError, FiveBarError
from .mechanism import (ElbowConfig, JointState, MechanismParams, feasibility,
                        forward_kinematics, inverse_kinematics, trace_path)
from .planner import plan_cycle, sample, waypoints_from_states
from .synthesis import SynthesisOptions, joint_waypoints, multistart

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_ARGS = 3
EXIT_FILE = 4

SUBCOMMANDS = ("fk", "ik", "feas", "synth", "plan", "schedule", "simulate", "analyze", "plot")


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(f"{self.prog}: {message}")


def _mechanism(args, cfg):
    if getattr(args, "design", None):
        return fio.load_design_report(args.design).params
    return cfg.mechanism


def cmd_fk(args, cfg):
    x, z = forward_kinematics(_mechanism(args, cfg), JointState.from_degrees(args.theta1, args.theta2))
    print("x_mm,z_mm")
    print(f"{fio.fmt(x)},{fio.fmt(z)}")


def _elbows(args, cfg):
    return ElbowConfig(args.b_sign if args.b_sign is not None else cfg.elbows.b_sign,
                       args.f_sign if args.f_sign is not None else cfg.elbows.f_sign)


def cmd_ik(args, cfg):
    j = inverse_kinematics(_mechanism(args, cfg), (args.x, args.z), _elbows(args, cfg))
    print("theta1_deg,theta2_deg")
    print(f"{fio.fmt(math.degrees(j.theta1))},{fio.fmt(math.degrees(j.theta2))}")


def cmd_feas(args, cfg):
    rep = feasibility(_mechanism(args, cfg), (args.x, args.z), _elbows(args, cfg))
    for key in ("r1", "r2", "h", "geometric_ok", "literal_r3_r4_ok"):
        v = getattr(rep, key)
        print(f"{key}: {str(v).lower() if isinstance(v, bool) else fio.fmt(v)}")


def _desired(args):
    return fio.load_path_csv(args.desired) if args.desired else fio.load_default_desired_path()


def cmd_synth(args, cfg):
    desired = _desired(args)
    opts = SynthesisOptions(
        max_iter=args.max_iter if args.max_iter is not None else cfg.synthesis.max_iter,
        max_evals=args.max_evals if args.max_evals is not None else cfg.synthesis.max_evals,
        tol=cfg.synthesis.tol)
    restarts = args.restarts if args.restarts is not None else cfg.restarts
    seed = args.seed if args.seed is not None else cfg.seed
    result = multistart(desired, cfg.bounds, cfg.design, restarts, seed, opts)
    fio.write_json(fio.result_to_dict(result), args.out)
    if args.trace_out:
        fio.save_path_csv(trace_path(result.best.params, result.best.sweep_states(len(desired))),
                          args.trace_out)
    print(f"E = {result.error_mm:.6f} mm after {result.evaluations} evaluations "
          f"({result.stop_reason})")


def _plans_from_config(args, cfg):
    """Per-motor plans plus the mechanism they were planned for."""
    if args.design:
        design = fio.load_design_report(args.design)
        desired = _desired(args)
        per_joint = waypoints_from_states(joint_waypoints(design, desired, cfg.elbows), cfg.timing)
        plans = {mid: plan_cycle(per_joint[mc.joint], cfg.timing) for mid, mc in cfg.motors.items()}
        return plans, design.params
    plans = {mid: plan_cycle(mc.waypoints, cfg.timing) for mid, mc in cfg.motors.items()}
    return plans, cfg.mechanism


def cmd_plan(args, cfg):
    plans, mech = _plans_from_config(args, cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rate = args.rate if args.rate is not None else cfg.rate_hz
    for mid, p in sorted(plans.items()):
        fio.save_profile_csv(sample(p, rate), out / f"{mid}_profile.csv")
    fio.write_json({
        "mechanism": {"l0_mm": mech.l0, "l1_mm": mech.l1, "l2_mm": mech.l2},
        "joints": {mid: cfg.motors[mid].joint for mid in sorted(plans)},
        "plans": fio.plan_to_dict(plans),
    }, out / "plan.json")
    print(f"wrote {len(plans)} profiles and plan.json to {out}")


def _load_plan(file):
    data = fio.read_json(file)
    try:
        m = data["mechanism"]
        mech = MechanismParams(m["l0_mm"], m["l1_mm"], m["l2_mm"])
        return mech, data["joints"], fio.plan_from_dict(data["plans"])
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"malformed plan file: missing {exc}") from None


def cmd_schedule(args, cfg):
    _, _, plans = _load_plan(args.plan)
    missing = set(plans) - set(cfg.motors)
    if missing:
        raise DataFormatError(f"no calibration for motor(s) {', '.join(sorted(missing))}")
    rate = args.rate if args.rate is not None else cfg.rate_hz
    sched = schedule_from_plan(plans, {m: cfg.motors[m].calibration for m in plans}, rate)
    fio.save_schedule_csv(sched, args.out)
    print(f"wrote {sched.t.size} setpoints to {args.out}")


def cmd_simulate(args, cfg):
    sched = fio.load_schedule_csv(args.schedule, sorted(cfg.motors))
    achieved = simulate_encoder_playback(sched, args.lag)
    fio.save_schedule_csv(achieved, args.out)
    print(f"wrote {achieved.t.size} samples to {args.out}")


def cmd_analyze(args, cfg):
    mech, joints, plans = _load_plan(args.plan)
    by_joint = {j: plans[m] for m, j in joints.items()}
    if set(by_joint) != {"theta1", "theta2"}:
        raise DataFormatError("plan must drive both theta1 and theta2")
    log = fio.load_imu_csv(args.imu)
    rate = args.rate if args.rate is not None else cfg.rate_hz
    period = args.period if args.period is not None else cfg.period_s
    t_f1 = by_joint["theta1"].segments[1].t_hi
    theory = rotation_profile(mech, by_joint["theta1"], by_joint["theta2"], rate, t_end=t_f1)
    cycles = analyze_cycles(log, theory, period, cfg.axis, cfg.baseline_s)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fio.save_angle_csv(theory, out / "theoretical.csv")
    cyc_col, t_col, e_col = [], [], []
    for k, c in enumerate(cycles, start=1):
        cyc_col += [k] * len(c.series)
        t_col += list(c.series.t)
        e_col += list(c.series.angle)
    fio.write_csv(out / "errors.csv", ["cycle", "t_s", "error_deg"],
                  [np.array(cyc_col, dtype=np.int64), t_col, e_col])
    fio.write_json({"axis": cfg.axis, "period_s": period, "n_cycles": len(cycles),
                    "cycles": [{"cycle": k, "rms_deg": c.rms, "max_abs_deg": c.max_abs}
                               for k, c in enumerate(cycles, start=1)]},
                   out / "summary.json")
    for k, c in enumerate(cycles, start=1):
        print(f"cycle {k}: rms {c.rms:.4f} deg, max {c.max_abs:.4f} deg")


def cmd_plot(args, cfg):
    fio.plot_csv(args.csv, args.out, args.x, args.y, args.title)
    print(f"wrote {args.out}")


def build_parser():
    p = _Parser(prog="fivebar", description="Five-bar finger rehabilitator design toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", default="default", help="YAML project config (default: bundled)")
        sp.set_defaults(func=fn)
        return sp

    def add_elbows(sp):
        sp.add_argument("--b-sign", type=int, choices=(1, -1))
        sp.add_argument("--f-sign", type=int, choices=(1, -1))

    sp = add("fk", cmd_fk, "coupler point from crank angles (deg)")
    sp.add_argument("--theta1", type=float, required=True)
    sp.add_argument("--theta2", type=float, required=True)
    sp.add_argument("--design", help="synthesis report to take link lengths from")

    for name, fn, text in (("ik", cmd_ik, "crank angles (deg) for a coupler point"),
                           ("feas", cmd_feas, "reachability report for a coupler point")):
        sp = add(name, fn, text)
        sp.add_argument("--x", type=float, required=True)
        sp.add_argument("--z", type=float, required=True)
        sp.add_argument("--design")
        add_elbows(sp)

    sp = add("synth", cmd_synth, "optimize link lengths for a desired path")
    sp.add_argument("--desired", help="desired path CSV (default: bundled surrogate)")
    sp.add_argument("--out", required=True, help="JSON report")
    sp.add_argument("--trace-out", help="CSV of the optimized mechanism's traced path")
    sp.add_argument("--restarts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-iter", type=int)
    sp.add_argument("--max-evals", type=int)

    sp = add("plan", cmd_plan, "quintic joint profiles for one cycle")
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--design", help="synthesis report; waypoints then come from its IK")
    sp.add_argument("--desired", help="desired path CSV used with --design")
    sp.add_argument("--rate", type=float)

    sp = add("schedule", cmd_schedule, "encoder setpoints from a plan")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--rate", type=float)

    sp = add("simulate", cmd_simulate, "first-order-lag playback of a schedule")
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--lag", type=float, default=0.0, help="time constant in s")
    sp.add_argument("--out", required=True)

    sp = add("analyze", cmd_analyze, "rotation-angle error of an IMU log per cycle")
    sp.add_argument("--imu", required=True)
    sp.add_argument("--plan", required=True)
    sp.add_argument("--out-dir", required=True)
    sp.add_argument("--period", type=float)
    sp.add_argument("--rate", type=float)

    sp = add("plot", cmd_plot, "render a CSV as an SVG line chart")
    sp.add_argument("--csv", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--x")
    sp.add_argument("--y", action="append")
    sp.add_argument("--title")
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    if argv[0] not in SUBCOMMANDS and argv[0] not in ("-h", "--help"):
        print(f"fivebar: unknown subcommand {argv[0]!r}; choose from {', '.join(SUBCOMMANDS)}",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ARGS
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK
    try:
        cfg = fio.load_config(args.config)
        args.func(args, cfg)
    except (OSError, DataFormatError) as exc:
        print(f"fivebar: file error: {exc}", file=sys.stderr)
        return EXIT_FILE
    except FiveBarError as exc:
        print(f"fivebar: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
