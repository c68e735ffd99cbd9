"""Constraint-embedded inverse Jacobian G^T from limb kinematics.

Row recipe (validated against the finite-difference oracle in ``verify``):

* actuation row i: a unit force along the link through the spherical joint,
  q_i' = [l_hat, a_i x l_hat] . (v, w) / (l_hat . s1).  For PRS limbs the
  link is structurally perpendicular to the revolute axis, so this coincides
  with the reciprocal-screw row built from n_i = s3 x s2; for PUS limbs the
  link force is the unique wrench reciprocal to both universal axes and the
  spherical joint.
* constraint rows (PRS limbs): a unit force along the revolute axis through
  the spherical joint, [s2, a_i x s2] . (v, w) = 0.

Moment blocks use a_i x u (power balance with the shifting property); the
variant with the flipped moment block fails the oracle and is kept only for
the documented comparison in the validation report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MixedActuation, SingularLimb
from .model import LimbKinematics, ManipulatorConfig

#: |l_hat . s1| below this is treated as a limb singularity (dimensionless)
DENOMINATOR_THRESHOLD = 1e-12

#: adopted actuation-row generator, recorded in validation reports
PUS_ROW_VARIANT = "link"


@dataclass(frozen=True)
class InverseJacobian:
    """Stacked [G_a^T; G_c^T] with its four named blocks."""

    G_a_T: np.ndarray  # f x 6, actuation rows
    G_c_T: np.ndarray  # (6 - f) x 6, constraint rows

    @property
    def stacked(self) -> np.ndarray:
        return np.vstack([self.G_a_T, self.G_c_T])

    @property
    def G_av_T(self) -> np.ndarray:
        return self.G_a_T[:, :3]

    @property
    def G_aw_T(self) -> np.ndarray:
        return self.G_a_T[:, 3:]

    @property
    def G_cv_T(self) -> np.ndarray:
        return self.G_c_T[:, :3]

    @property
    def G_cw_T(self) -> np.ndarray:
        return self.G_c_T[:, 3:]


def _actuation_direction(limb: LimbKinematics, variant: str) -> np.ndarray:
    if variant == "link":
        return limb.link / np.linalg.norm(limb.link)
    if variant == "normal":
        # n_i rows for the PUS limbs: kept for oracle comparison only
        return limb.n if limb.kind == "PUS" else limb.link / np.linalg.norm(limb.link)
    raise ValueError(f"unknown row variant {variant!r}")


def build_inverse_jacobian(
    limbs: list[LimbKinematics],
    variant: str = PUS_ROW_VARIANT,
    moment_sign: float = 1.0,
) -> InverseJacobian:
    """Assemble G^T; raises SingularLimb when a row denominator vanishes.

    ``variant`` and ``moment_sign`` select the documented formula variants for
    oracle comparison; defaults are the adopted (oracle-passing) recipe.
    """
    f = len(limbs)
    Ga = np.zeros((f, 6))
    for i, limb in enumerate(limbs):
        u = _actuation_direction(limb, variant)
        den = float(u @ limb.s1)
        if abs(den) < DENOMINATOR_THRESHOLD:
            raise SingularLimb(
                f"limb {limb.index + 1}: actuation screw reciprocal to rail "
                f"(|u.s1| = {abs(den):.3e})")
        Ga[i, :3] = u / den
        Ga[i, 3:] = moment_sign * np.cross(limb.a, u) / den
    prs = [limb for limb in limbs if limb.kind == "PRS"]
    Gc = np.zeros((len(prs), 6))
    for k, limb in enumerate(prs):
        Gc[k, :3] = limb.s2
        Gc[k, 3:] = moment_sign * np.cross(limb.a, limb.s2)
    return InverseJacobian(G_a_T=Ga, G_c_T=Gc)


@dataclass(frozen=True)
class RowUnits:
    """Length powers of the velocity-coupled and rate-coupled blocks.

    ``g_linear``/``g_angular`` are the units of G_av^T and G_aw^T; the
    ``j_*`` fields are the corresponding forward blocks J_a1 and J_a2
    (reciprocal powers), which is what the homogeneity audit consumes.
    Powers: 0 = dimensionless, 1 = length, -1 = 1/length.
    """

    g_linear: int
    g_angular: int

    @property
    def j_linear(self) -> int:
        return -self.g_linear

    @property
    def j_angular(self) -> int:
        return -self.g_angular


def actuation_row_units(cfg: ManipulatorConfig) -> RowUnits:
    """Unit descriptor of the actuation-row blocks for the actuator type."""
    if cfg.actuator_kind == "linear":
        return RowUnits(g_linear=0, g_angular=1)
    if cfg.actuator_kind == "rotational":
        return RowUnits(g_linear=-1, g_angular=0)
    raise MixedActuation(
        f"actuator kind {cfg.actuator_kind!r}: mixed or unknown actuation unsupported")
