#!/usr/bin/env python3
"""Condition-number maps over the rotational workspace.

Writes one CSV per Jacobian flavour (conventional stacked G^T and the
dimensionally homogeneous J_dh share a file; the CSV has both columns) and
prints band statistics.  The output grid is ready for any heatmap tool, e.g.

    python scripts/run_condition_sweep.py --grid 101
    # then pivot theta_deg/psi_deg/cond_Jdh into a 2-d map
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from dhjac.cli import SweepSpec, parse_plan, sweep_rows, write_sweep_csv  # noqa: E402
from dhjac.model import load_config  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(REPO / "configs" / "reference_4dof.json"))
    ap.add_argument("--grid", type=int, default=51)
    ap.add_argument("--z", type=float, default=150.0, help="plate height [mm]")
    ap.add_argument("--range-deg", type=float, default=50.0)
    ap.add_argument("--plan", default="primary")
    ap.add_argument("--unit", choices=("mm", "m"), default="mm")
    ap.add_argument("--out", default="condition_sweep.csv")
    args = ap.parse_args()

    cfg = load_config(args.config).in_unit(args.unit)
    spec = SweepSpec(
        theta_range_deg=(-args.range_deg, args.range_deg),
        psi_range_deg=(-args.range_deg, args.range_deg),
        steps=args.grid,
        y_mm=0.0,
        z_mm=args.z,
        unit=cfg.unit,
        plan=parse_plan(args.plan),
        out=args.out,
    )
    spec.validate(cfg, cfg.envelope_deg)

    rows = list(sweep_rows(cfg, spec))
    write_sweep_csv(args.out, rows)

    k_g = np.array([r[2] for r in rows if r[4] == "ok"])
    k_dh = np.array([r[3] for r in rows if r[4] == "ok"])
    skipped = sum(1 for r in rows if r[4] != "ok")
    print(f"{args.out}: {len(rows)} cells ({skipped} skipped), unit {cfg.unit}")
    print(f"cond(G^T):  median {np.median(k_g):10.2f}   max {k_g.max():10.2f}")
    print(f"cond(J_dh): median {np.median(k_dh):10.3f}   max {k_dh.max():10.3f}   "
          f"min {k_dh.min():.3f}")
    if math.isfinite(k_dh.min()):
        print(f"band ratio (medians): {np.median(k_g) / np.median(k_dh):.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
