"""Extended selection matrix: weighted component pairs -> nominal velocity.

Each plan row pairs the y-component of one point with the y-component of a
partner so that the platform's constrained freedoms (v_x and w_z for the
TyTzRxRy class) drop out, and adds the z-component of the lower-indexed
point of the pair:

    row(i, j) = (a_ix * v_jy - a_jx * v_iy) / |a_ix - a_jx| + v_kz,
    k = min(i, j).

The cancellation weights are solved from the one-parameter condition
alpha * a_ix + gamma * a_jx = 0 and normalized by |a_ix - a_jx|, which
keeps S dimensionless.  Normalizing by the signed difference instead would
force every row's y-weights to sum to one, collapsing the v_y and v_z
columns of the restricted nominal map to all-ones (rank-deficient for
every plan); the absolute value changes at most a row sign and keeps the
map invertible.  The choice is recorded in the validation report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegeneratePair
from .pointmap import PointVelocityMap

#: relative threshold on |a_ix - a_jx| below which a pair is degenerate
PAIR_THRESHOLD = 1e-9

#: default plan: cyclic partners (v_1y,v_2z), (v_2y,v_3z), (v_3y,v_4z), (v_4y,v_1z)
PRIMARY_PLAN_PAIRS = ((1, 2), (2, 3), (3, 4), (4, 1))

#: each limb paired with its diametrically opposite partner.  Degenerate at
#: the reference geometry: the PRS anchors share a_x = 0 at every feasible
#: pose, so the (2,4) and (4,2) pairs have coincident x-coordinates.
OPPOSITE_PLAN_PAIRS = ((1, 3), (2, 4), (3, 1), (4, 2))

#: alternate used for plan-equivalence checks: valid at the reference
#: geometry and exercising the non-trivial 1/2-1/2 weights of the {1,3} pair
ALTERNATE_PLAN_PAIRS = ((1, 3), (2, 1), (3, 2), (4, 3))


@dataclass(frozen=True)
class SelectionPlan:
    """One (y-point, z-partner) pair per limb, 1-based indices."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        f = len(self.pairs)
        for r, (i, j) in enumerate(self.pairs):
            if i != r + 1:
                raise ConfigError(
                    f"plan row {r + 1} must draw its y-component from point {r + 1}, "
                    f"got {i}")
            if not (1 <= j <= f) or j == i:
                raise ConfigError(f"plan row {r + 1}: partner {j} invalid")

    @property
    def f(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_pair_strings(cls, pairs) -> "SelectionPlan":
        """Parse the CLI form [["1y", "2z"], ["2y", "3z"], ...]."""
        parsed = []
        for entry in pairs:
            if len(entry) != 2 or not entry[0].endswith("y") or not entry[1].endswith("z"):
                raise ConfigError(f"bad plan pair {entry!r}; expected like ['1y', '2z']")
            parsed.append((int(entry[0][:-1]), int(entry[1][:-1])))
        return cls(pairs=tuple(parsed))

    def pair_strings(self) -> list[list[str]]:
        return [[f"{i}y", f"{j}z"] for i, j in self.pairs]


PRIMARY_PLAN = SelectionPlan(PRIMARY_PLAN_PAIRS)
OPPOSITE_PLAN = SelectionPlan(OPPOSITE_PLAN_PAIRS)
ALTERNATE_PLAN = SelectionPlan(ALTERNATE_PLAN_PAIRS)


def enumerate_pairings(f: int) -> list[list[tuple[int, int]]]:
    """All admissible (v_iy, v_jz) pairs, grouped per limb."""
    return [[(i, j) for j in range(1, f + 1) if j != i] for i in range(1, f + 1)]


@dataclass(frozen=True)
class SelectionMatrix:
    S: np.ndarray  # f x 3f, dimensionless
    plan: SelectionPlan


def build_selection_matrix(plan: SelectionPlan, points) -> SelectionMatrix:
    """Solve the per-pair cancellation weights at the given platform points.

    Raises DegeneratePair when a pair's x-coordinates coincide (relative to
    the largest |a_x| in the point set).
    """
    pts = [np.asarray(p, float) for p in points]
    f = plan.f
    if len(pts) != f:
        raise ConfigError(f"plan has {f} rows but {len(pts)} points given")
    ax = [p[0] for p in pts]
    scale = max(max(abs(v) for v in ax), 1e-300)
    S = np.zeros((f, 3 * f))
    for r, (i, j) in enumerate(plan.pairs):
        delta = ax[i - 1] - ax[j - 1]
        if abs(delta) <= PAIR_THRESHOLD * scale:
            raise DegeneratePair(
                f"pair (v_{i}y, v_{j}z): a_{i}x - a_{j}x = {delta:.3e} "
                f"(threshold {PAIR_THRESHOLD * scale:.3e})")
        k = min(i, j)
        S[r, 3 * (i - 1) + 1] = -ax[j - 1] / abs(delta)
        S[r, 3 * (j - 1) + 1] = ax[i - 1] / abs(delta)
        S[r, 3 * (k - 1) + 2] = 1.0
    return SelectionMatrix(S=S, plan=plan)


#: column indices of the independent freedoms (v_y, v_z, w_x, w_y) in a twist
INDEPENDENT_COLS = (1, 2, 3, 4)
#: column indices of the constrained freedoms (v_x, w_z)
CONSTRAINED_COLS = (0, 5)


def nominal_map(sel: SelectionMatrix, vp: PointVelocityMap) -> tuple[np.ndarray, np.ndarray]:
    """V_ps = S V_p and its square restriction to the independent freedoms."""
    if sel.S.shape[1] != vp.V_p.shape[0]:
        raise ConfigError(
            f"selection matrix expects {sel.S.shape[1] // 3} points, "
            f"map has {vp.count}")
    V_ps = sel.S @ vp.V_p
    return V_ps, V_ps[:, INDEPENDENT_COLS]
