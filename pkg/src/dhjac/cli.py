"""Command-line front end: pose reports, workspace sweeps, unit experiments.

Exit codes: 0 ok, 1 validation failure, 2 infeasible pose, 3 config error,
4 I/O error.  All numeric CSV fields carry 17 significant digits so that
determinism and unit-invariance checks can compare files byte for byte.
Lengths on the command line (``--z``, ``--y``, pose positionals) are given
in millimeters and converted to the active unit.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import dhj, forward_map, screws, verify
from .errors import ConfigError, KinematicsError
from .model import UNIT_SCALES, ManipulatorConfig, inverse_kinematics, load_config, resolve_pose
from .pointmap import build_Vp
from .selection import (ALTERNATE_PLAN, OPPOSITE_PLAN, PRIMARY_PLAN,
                        SelectionPlan, build_selection_matrix, nominal_map)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_CONFIG = 3
EXIT_IO = 4

SWEEP_HEADER = "theta_deg,psi_deg,cond_G,cond_Jdh,status"

NAMED_PLANS = {
    "primary": PRIMARY_PLAN,
    "alternate": ALTERNATE_PLAN,
    "opposite": OPPOSITE_PLAN,
}


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def parse_plan(text: str) -> SelectionPlan:
    if text in NAMED_PLANS:
        return NAMED_PLANS[text]
    try:
        return SelectionPlan.from_pair_strings(json.loads(text))
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise ConfigError(f"cannot parse plan {text!r}: {exc}") from exc


@dataclass
class SweepSpec:
    """Grid specification for condition-number sweeps."""

    theta_range_deg: tuple[float, float]
    psi_range_deg: tuple[float, float]
    steps: int
    y_mm: float
    z_mm: float
    unit: str
    plan: SelectionPlan
    out: str

    def validate(self, cfg: ManipulatorConfig, envelope_deg: float):
        if self.steps < 2:
            raise ConfigError("grid steps must be >= 2")
        for lo, hi in (self.theta_range_deg, self.psi_range_deg):
            if lo >= hi:
                raise ConfigError("range lower bound must be below upper bound")
            if max(abs(lo), abs(hi)) > envelope_deg + 1e-9:
                raise ConfigError(
                    f"range exceeds the +/-{envelope_deg:g} deg envelope "
                    "(raise --envelope-deg to override)")

    def grids(self):
        th = np.linspace(self.theta_range_deg[0], self.theta_range_deg[1], self.steps)
        ps = np.linspace(self.psi_range_deg[0], self.psi_range_deg[1], self.steps)
        return th, ps


def _load(args) -> ManipulatorConfig:
    cfg = load_config(args.config)
    if args.unit:
        cfg = cfg.in_unit(args.unit)
    if args.envelope_deg is not None:
        cfg = replace(cfg, envelope_deg=args.envelope_deg)
    return cfg


def _length_from_mm(value_mm: float, unit: str) -> float:
    return value_mm * UNIT_SCALES[unit]


def cmd_pose(args) -> int:
    cfg = _load(args)
    plan = parse_plan(args.plan)
    y = _length_from_mm(args.y, cfg.unit)
    z = _length_from_mm(args.z, cfg.unit)
    th, ps = math.radians(args.theta_deg), math.radians(args.psi_deg)

    pose = resolve_pose(cfg, y, z, th, ps)
    limbs = inverse_kinematics(cfg, pose)
    G = screws.build_inverse_jacobian(limbs)
    fwd = forward_map.invert_full(G)
    pts = [limb.a for limb in limbs]
    sel = build_selection_matrix(plan, pts)
    V_ps, _ = nominal_map(sel, build_Vp(pts))
    J_dh = dhj.assemble_dhj(V_ps, fwd.J_a)
    sv = dhj.singular_values(J_dh)
    k_dh = math.inf if sv[-1] < dhj.SIGMA_FLOOR else float(sv[0] / sv[-1])

    record = {
        "unit": cfg.unit,
        "coords": {"y": y, "z": z, "theta_deg": args.theta_deg, "psi_deg": args.psi_deg},
        "dependent": {"x": pose.x, "phi_z_rad": pose.phi_z},
        "q": [limb.q for limb in limbs],
        "G_T": G.stacked.tolist(),
        "J_a": fwd.J_a.tolist(),
        "S": sel.S.tolist(),
        "V_ps": V_ps.tolist(),
        "J_dh": J_dh.tolist(),
        "singular_values": sv.tolist(),
        "cond_Jdh": k_dh,
        "cond_G": fwd.cond_GT,
        "plan": plan.pair_strings(),
    }
    if args.json:
        print(json.dumps(record, indent=2, sort_keys=True))
        return EXIT_OK

    def block(name, M):
        body = np.array2string(np.asarray(M), precision=6, suppress_small=True,
                               max_line_width=100)
        print(f"{name}:\n{body}")

    print(f"pose  y={y:g} z={z:g} {cfg.unit}, theta={args.theta_deg:g} deg, "
          f"psi={args.psi_deg:g} deg  (x={pose.x:.3e}, phi_z={pose.phi_z:.3e} rad)")
    print("q_a:", " ".join(f"{limb.q:.6f}" for limb in limbs))
    block("G^T", G.stacked)
    block("J_a", fwd.J_a)
    block("S", sel.S)
    block("V_ps", V_ps)
    block("J_dh", J_dh)
    print("singular values:", " ".join(f"{s:.9g}" for s in sv))
    print(f"cond(J_dh) = {k_dh:.9g}")
    print(f"cond(G^T)  = {fwd.cond_GT:.9g}")
    return EXIT_OK


def sweep_rows(cfg: ManipulatorConfig, spec: SweepSpec):
    """Row-major (theta outer) condition-number rows for one grid."""
    y = _length_from_mm(spec.y_mm, cfg.unit)
    z = _length_from_mm(spec.z_mm, cfg.unit)
    th_deg, ps_deg = spec.grids()
    for th in th_deg:
        for ps in ps_deg:
            try:
                rec = dhj.dexterity_at(cfg, y, z, math.radians(th), math.radians(ps),
                                       plan=spec.plan)
            except KinematicsError as exc:
                yield th, ps, None, None, exc.code
                continue
            if not (math.isfinite(rec.k) and math.isfinite(rec.k_conventional)):
                yield th, ps, None, None, "singular_configuration"
                continue
            yield th, ps, rec.k_conventional, rec.k, "ok"


def write_sweep_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for th, ps, k_g, k_dh, status in rows:
            kg = _fmt(k_g) if k_g is not None else ""
            kd = _fmt(k_dh) if k_dh is not None else ""
            fh.write(f"{_fmt(th)},{_fmt(ps)},{kg},{kd},{status}\n")


def _spec_from_args(args, cfg) -> SweepSpec:
    spec = SweepSpec(
        theta_range_deg=(-args.range_deg, args.range_deg),
        psi_range_deg=(-args.range_deg, args.range_deg),
        steps=args.grid,
        y_mm=args.y,
        z_mm=args.z,
        unit=cfg.unit,
        plan=parse_plan(args.plan),
        out=args.out,
    )
    spec.validate(cfg, cfg.envelope_deg)
    return spec


def cmd_sweep(args) -> int:
    cfg = _load(args)
    spec = _spec_from_args(args, cfg)
    try:
        write_sweep_csv(spec.out, sweep_rows(cfg, spec))
    except OSError as exc:
        print(f"cannot write {spec.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_units(args) -> int:
    cfg = _load(args)
    spec = _spec_from_args(args, cfg)
    th_deg, ps_deg = spec.grids()
    report = dhj.unit_scaling_experiment(
        cfg,
        [math.radians(t) for t in th_deg],
        [math.radians(p) for p in ps_deg],
        y=_length_from_mm(spec.y_mm, cfg.unit),
        z=_length_from_mm(spec.z_mm, cfg.unit),
        scale=args.scale,
        plan=spec.plan,
    )
    out_json = spec.out
    out_csv = out_json[:-5] + ".csv" if out_json.endswith(".json") else out_json + ".csv"
    try:
        with open(out_json, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(out_csv, "w", newline="") as fh:
            fh.write("theta_deg,psi_deg,cond_G_base,cond_G_scaled,"
                     "cond_Jdh_base,cond_Jdh_scaled,rel_dev_Jdh,status\n")
            for cell in report["cells"]:
                th = _fmt(math.degrees(cell["theta"]))
                ps = _fmt(math.degrees(cell["psi"]))
                if cell["status"] != "ok":
                    fh.write(f"{th},{ps},,,,,,{cell['status']}\n")
                    continue
                dev = abs(cell["k_dh_base"] - cell["k_dh_scaled"]) / cell["k_dh_base"]
                fh.write(",".join([
                    th, ps,
                    _fmt(cell["k_G_base"]), _fmt(cell["k_G_scaled"]),
                    _fmt(cell["k_dh_base"]), _fmt(cell["k_dh_scaled"]),
                    _fmt(dev), "ok",
                ]) + "\n")
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"k_dh max rel deviation: {report['max_rel_dev_k_dh']:.3e} "
          f"(invariant: {report['k_dh_invariant']})")
    print(f"k_G  max rel deviation: {report['max_rel_dev_k_G']:.3e} "
          f"(unit sensitive: {report['k_G_unit_sensitive']})")
    return EXIT_OK if report["k_dh_invariant"] else EXIT_VALIDATION


def cmd_validate(args) -> int:
    cfg = _load(args)
    report = verify.run_validation(cfg, seed=args.seed, n_poses=args.poses)
    try:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status}  {check['name']}: max_rel_err={check['max_rel_err']:.3e} "
              f"threshold={check['threshold']:.3e} poses={check['poses_tested']}")
    print(f"report written to {args.out}")
    return EXIT_OK if report["all_passed"] else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhjac",
        description="Dimensionally homogeneous Jacobian toolkit for the "
                    "reference 4-DoF PUS/PRS parallel manipulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_out=None):
        p.add_argument("--config", required=True, help="manipulator JSON config")
        p.add_argument("--unit", choices=("mm", "m"), default=None,
                       help="convert the config to this unit before computing")
        p.add_argument("--plan", default="primary",
                       help='selection plan: primary | alternate | opposite '
                            '| JSON like [["1y","2z"],["2y","3z"],["3y","4z"],["4y","1z"]]')
        p.add_argument("--envelope-deg", type=float, default=None,
                       help="override the rotational envelope guard")
        if with_out:
            p.add_argument("--out", default=with_out, help="output path")

    p = sub.add_parser("pose", help="evaluate one pose and print the full pipeline")
    common(p)
    p.add_argument("y", type=float, help="platform y [mm]")
    p.add_argument("z", type=float, help="platform z [mm]")
    p.add_argument("theta_deg", type=float, help="rotation about x [deg]")
    p.add_argument("psi_deg", type=float, help="rotation about y [deg]")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(fn=cmd_pose)

    p = sub.add_parser("sweep", help="condition-number grid over (theta, psi) to CSV")
    common(p, with_out="sweep.csv")
    p.add_argument("--grid", type=int, default=51, help="grid points per axis")
    p.add_argument("--range-deg", type=float, default=50.0, help="half-range of both axes")
    p.add_argument("--y", type=float, default=0.0, help="fixed y [mm]")
    p.add_argument("--z", type=float, default=150.0, help="fixed z [mm]")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("units", help="millimeter-vs-meter condition-number experiment")
    common(p, with_out="units_report.json")
    p.add_argument("--grid", type=int, default=51, help="grid points per axis")
    p.add_argument("--range-deg", type=float, default=50.0, help="half-range of both axes")
    p.add_argument("--y", type=float, default=0.0, help="fixed y [mm]")
    p.add_argument("--z", type=float, default=150.0, help="fixed z [mm]")
    p.add_argument("--scale", type=float, default=0.001, help="length scale of the second run")
    p.set_defaults(fn=cmd_units)

    p = sub.add_parser("validate", help="run every finite-difference oracle")
    common(p, with_out="validation_report.json")
    p.add_argument("--seed", type=int, default=verify.DEFAULT_SEED)
    p.add_argument("--poses", type=int, default=100, help="random poses per oracle")
    p.set_defaults(fn=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KinematicsError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
