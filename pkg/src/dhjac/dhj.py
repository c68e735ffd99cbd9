"""Dimensionally homogeneous Jacobian, condition numbers, unit experiments.

The condition number uses a one-sided Jacobi SVD (columns orthogonalized by
right rotations until every pair is orthogonal to 1e-12 relative), which has
high relative accuracy on the small dense matrices produced here; the test
suite cross-checks it against an independent eigensolve of M^T M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import forward_map, screws
from .errors import KinematicsError, MixedActuation
from .model import ManipulatorConfig, PlatformPose, inverse_kinematics, resolve_pose
from .pointmap import build_Vp
from .selection import PRIMARY_PLAN, SelectionPlan, build_selection_matrix, nominal_map

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60

#: sigma_min below this reports an infinite condition number
SIGMA_FLOOR = 1e-300


def singular_values(M: np.ndarray, tol: float = JACOBI_TOL,
                    max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """Descending singular values by one-sided Jacobi column orthogonalization."""
    A = np.array(M, dtype=float)
    if A.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if A.shape[0] < A.shape[1]:
        A = A.T.copy()
    n = A.shape[1]
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(A[:, p] @ A[:, q])
                app = float(A[:, p] @ A[:, p])
                aqq = float(A[:, q] @ A[:, q])
                denom = math.sqrt(app * aqq)
                if denom == 0.0 or abs(apq) <= tol * denom:
                    continue
                off = max(off, abs(apq) / denom)
                tau = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = c * t
                ap = c * A[:, p] - s * A[:, q]
                A[:, q] = s * A[:, p] + c * A[:, q]
                A[:, p] = ap
        if off == 0.0:
            break
    sv = np.sqrt(np.sum(A * A, axis=0))
    sv.sort()
    return sv[::-1]


def condition_number(M: np.ndarray) -> float:
    """2-norm condition (sigma_max / sigma_min); infinite below the floor."""
    sv = singular_values(M)
    if sv[-1] < SIGMA_FLOOR:
        return math.inf
    return float(sv[0] / sv[-1])


def assemble_dhj(V_ps: np.ndarray, J_a: np.ndarray) -> np.ndarray:
    """J_dh = V_ps J_a mapping actuated joint rates to nominal velocities."""
    V_ps = np.asarray(V_ps, float)
    J_a = np.asarray(J_a, float)
    if V_ps.shape[1] != J_a.shape[0]:
        raise ValueError(f"shape mismatch: V_ps {V_ps.shape} vs J_a {J_a.shape}")
    return V_ps @ J_a


@dataclass(frozen=True)
class DexterityRecord:
    """Everything dexterity-related evaluated at one pose."""

    pose: PlatformPose
    J_dh: np.ndarray
    sigmas: np.ndarray
    k: float                # cond(J_dh)
    k_conventional: float   # cond of the stacked G^T
    unit: str
    plan: SelectionPlan


def dexterity_at(
    cfg: ManipulatorConfig,
    y: float,
    z: float,
    theta: float,
    psi: float,
    plan: SelectionPlan = PRIMARY_PLAN,
    envelope_deg: float | None = None,
) -> DexterityRecord:
    """Full pipeline at one pose: resolve, IK, G^T, J_a, S, V_ps, J_dh."""
    pose = resolve_pose(cfg, y, z, theta, psi, envelope_deg=envelope_deg)
    limbs = inverse_kinematics(cfg, pose)
    G = screws.build_inverse_jacobian(limbs)
    fwd = forward_map.invert_full(G)
    pts = [limb.a for limb in limbs]
    sel = build_selection_matrix(plan, pts)
    V_ps, _ = nominal_map(sel, build_Vp(pts))
    J_dh = assemble_dhj(V_ps, fwd.J_a)
    sv = singular_values(J_dh)
    k = math.inf if sv[-1] < SIGMA_FLOOR else float(sv[0] / sv[-1])
    return DexterityRecord(
        pose=pose, J_dh=J_dh, sigmas=sv, k=k,
        k_conventional=fwd.cond_GT, unit=cfg.unit, plan=plan,
    )


#: invariance gate on cond(J_dh) between unit systems
UNIT_INVARIANCE_TOL = 1e-9
#: cond(G^T) is expected to move at least this much somewhere in the grid
UNIT_SENSITIVITY_FLOOR = 0.10


def unit_scaling_experiment(
    cfg: ManipulatorConfig,
    thetas,
    psis,
    y: float = 0.0,
    z: float = 150.0,
    scale: float = 0.001,
    plan: SelectionPlan = PRIMARY_PLAN,
) -> dict:
    """Evaluate cond(G^T) and cond(J_dh) on a grid in two unit systems.

    The scaled run multiplies every config length and the translational pose
    coordinates by ``scale`` (0.001 = the millimeter-to-meter experiment).
    Cells where the pipeline fails are reported with their reason code and
    excluded from the deviation statistics.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    scaled_unit = {0.001: "m", 1.0: cfg.unit}.get(scale, f"{cfg.unit}x{scale:g}")
    cfg_b = cfg.scaled(scale, unit=scaled_unit)
    cells = []
    devs_dh, devs_G = [], []
    for ti, th in enumerate(thetas):
        for pi, ps in enumerate(psis):
            cell = {"theta": float(th), "psi": float(ps)}
            try:
                rec_a = dexterity_at(cfg, y, z, th, ps, plan=plan)
                rec_b = dexterity_at(cfg_b, y * scale, z * scale, th, ps, plan=plan)
            except KinematicsError as exc:
                cell["status"] = exc.code
                cells.append(cell)
                continue
            cell.update(
                status="ok",
                k_G_base=rec_a.k_conventional, k_G_scaled=rec_b.k_conventional,
                k_dh_base=rec_a.k, k_dh_scaled=rec_b.k,
            )
            if math.isfinite(rec_a.k) and math.isfinite(rec_b.k):
                devs_dh.append(abs(rec_a.k - rec_b.k) / rec_a.k)
            if math.isfinite(rec_a.k_conventional) and math.isfinite(rec_b.k_conventional):
                devs_G.append(abs(rec_a.k_conventional - rec_b.k_conventional)
                              / rec_a.k_conventional)
            cells.append(cell)
    max_dev_dh = max(devs_dh, default=math.nan)
    max_dev_G = max(devs_G, default=math.nan)
    return {
        "unit_base": cfg.unit,
        "unit_scaled": scaled_unit,
        "scale": scale,
        "plan": plan.pair_strings(),
        "cells": cells,
        "evaluated": len(devs_dh),
        "skipped": sum(1 for c in cells if c["status"] != "ok"),
        "max_rel_dev_k_dh": max_dev_dh,
        "max_rel_dev_k_G": max_dev_G,
        "k_dh_invariant": bool(max_dev_dh < UNIT_INVARIANCE_TOL) if devs_dh else False,
        "k_G_unit_sensitive": bool(max_dev_G > UNIT_SENSITIVITY_FLOOR) if devs_G else False,
    }


_POWER_NAMES = {-1: "1/{u}", 0: "1", 1: "{u}"}


def _unit_name(power: int, unit: str) -> str:
    return _POWER_NAMES.get(power, "{u}^" + str(power)).format(u=unit)


def dimensional_audit(cfg: ManipulatorConfig) -> dict:
    """Symbolic length powers of every pipeline block plus a homogeneity check.

    Linear actuation must yield a dimensionless J_dh; rotational actuation a
    J_dh with one uniform power of length.  Raises MixedActuation otherwise.
    """
    if cfg.actuator_kind == "mixed":
        raise MixedActuation("mixed linear/rotational actuation is out of scope")
    row_units = screws.actuation_row_units(cfg)
    u = cfg.unit
    vp_v, vp_w, s_pow = 0, 1, 0
    jdh_from_v = s_pow + vp_v + row_units.j_linear
    jdh_from_w = s_pow + vp_w + row_units.j_angular
    homogeneous = jdh_from_v == jdh_from_w
    table = {
        "V_p_translation_block": _unit_name(vp_v, u),
        "V_p_moment_block": _unit_name(vp_w, u),
        "S": _unit_name(s_pow, u),
        "G_av_T": _unit_name(row_units.g_linear, u),
        "G_aw_T": _unit_name(row_units.g_angular, u),
        "J_a1": _unit_name(row_units.j_linear, u),
        "J_a2": _unit_name(row_units.j_angular, u),
        "J_dh": _unit_name(jdh_from_v, u) if homogeneous else "inhomogeneous",
    }
    return {
        "actuator": cfg.actuator_kind,
        "unit": u,
        "blocks": table,
        "J_dh_length_power": jdh_from_v if homogeneous else None,
        "homogeneous": homogeneous,
    }
