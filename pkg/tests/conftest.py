import math
from pathlib import Path

import numpy as np
import pytest

from dhjac.model import LimbSpec, ManipulatorConfig, load_config

REPO = Path(__file__).resolve().parents[1]
REFERENCE_CONFIG = REPO / "configs" / "reference_4dof.json"


@pytest.fixture(scope="session")
def reference() -> ManipulatorConfig:
    return load_config(REFERENCE_CONFIG)


def square_config(link_length: float = 687.0) -> ManipulatorConfig:
    """Same-angle layout (base rails under the platform anchors).

    Valid for IK-level checks and maximally symmetric, but its stacked
    inverse Jacobian is singular on the theta = 0 plane; the screw-level
    tests use it as the singularity test bed.
    """
    return ManipulatorConfig(
        moving_plate_radius=200.0,
        base_radius=450.0,
        link_length=link_length,
        limbs=(
            LimbSpec(0.0, "PUS"),
            LimbSpec(90.0, "PRS"),
            LimbSpec(180.0, "PUS"),
            LimbSpec(270.0, "PRS"),
        ),
    )


@pytest.fixture(scope="session")
def square() -> ManipulatorConfig:
    return square_config()


def offset_prs_config() -> ManipulatorConfig:
    """PRS rails shifted off the platform anchor planes.

    The dependent solve then carries a genuine parasitic twist phi_z(psi)
    (closed form: sin(phi_z) = -A_2x / (r_a cos(psi))), which exercises the
    damped Newton iteration and its failure mode at large psi.
    """
    return ManipulatorConfig(
        moving_plate_radius=200.0,
        base_radius=450.0,
        link_length=687.0,
        limbs=(
            LimbSpec(0.0, "PUS", base_angle_deg=45.0),
            LimbSpec(90.0, "PRS", base_angle_deg=80.0),
            LimbSpec(180.0, "PUS", base_angle_deg=135.0),
            LimbSpec(270.0, "PRS", base_angle_deg=260.0),
        ),
    )


def random_coords(cfg: ManipulatorConfig, n: int, seed: int = 0,
                  envelope_frac: float = 1.0) -> list[tuple[float, float, float, float]]:
    """Deterministic pose samples across the rotational envelope and z band."""
    rng = np.random.default_rng(seed)
    lim = math.radians(cfg.envelope_deg) * envelope_frac
    z_scale = cfg.base_radius / 450.0
    return [
        (0.0,
         float(rng.uniform(100.0, 200.0) * z_scale),
         float(rng.uniform(-lim, lim)),
         float(rng.uniform(-lim, lim)))
        for _ in range(n)
    ]
