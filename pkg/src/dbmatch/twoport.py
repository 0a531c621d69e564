"""Two-port network algebra: Z/S representations, conversions, cascades.

All values are plain complex numbers (or numpy arrays broadcast over a
frequency axis in the cascade helpers); everything here is a pure
function, safe to evaluate concurrently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


class TwoPortError(ValueError):
    pass


@dataclass(frozen=True)
class TwoPortZ:
    """Impedance parameters of a two-port at a single angular frequency."""

    z11: complex
    z12: complex
    z21: complex
    z22: complex

    def __post_init__(self):
        for name in ("z11", "z12", "z21", "z22"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise TwoPortError(f"non-finite impedance entry {name}")

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.z11, self.z12], [self.z21, self.z22]], dtype=complex)


@dataclass(frozen=True)
class TwoPortS:
    """Scattering parameters with real, positive reference impedances."""

    s11: complex
    s12: complex
    s21: complex
    s22: complex
    zref1: float = 50.0
    zref2: float = 50.0

    def __post_init__(self):
        if self.zref1 <= 0 or self.zref2 <= 0:
            raise TwoPortError("reference impedances must be positive")

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.s11, self.s12], [self.s21, self.s22]], dtype=complex)


def z_to_s(z: TwoPortZ, zref1: float = 50.0, zref2: float = 50.0) -> TwoPortS:
    """Convert impedance to scattering parameters.

    Uses S = F (Z - Zref)(Z + Zref)^-1 F^-1 with F = diag(1/sqrt(zref)).
    """
    if zref1 <= 0 or zref2 <= 0:
        raise TwoPortError("reference impedances must be positive")
    zm = z.as_matrix()
    zref = np.diag([zref1, zref2]).astype(complex)
    den = zm + zref
    if abs(np.linalg.det(den)) == 0:
        raise TwoPortError("degenerate network: (Z + Zref) is singular")
    f = np.diag([1.0 / math.sqrt(zref1), 1.0 / math.sqrt(zref2)])
    finv = np.diag([math.sqrt(zref1), math.sqrt(zref2)])
    s = f @ (zm - zref) @ np.linalg.inv(den) @ finv
    return TwoPortS(s[0, 0], s[0, 1], s[1, 0], s[1, 1], zref1, zref2)


def s_to_z(s: TwoPortS) -> TwoPortZ:
    """Convert scattering to impedance parameters (inverse of z_to_s)."""
    sm = s.as_matrix()
    eye = np.eye(2)
    den = eye - sm
    if abs(np.linalg.det(den)) < 1e-14 * max(1.0, np.abs(sm).max()) ** 2:
        raise TwoPortError("no Z representation: (I - S) is singular")
    d = np.diag([math.sqrt(s.zref1), math.sqrt(s.zref2)])
    zm = d @ np.linalg.inv(den) @ (eye + sm) @ d
    return TwoPortZ(zm[0, 0], zm[0, 1], zm[1, 0], zm[1, 1])


def transducer_gain(z: TwoPortZ, r_src: float, r_load: float) -> float:
    """Transducer power gain of a two-port between resistive terminations.

    G_T = 4 R_src R_load |Z21|^2 / |(Z11 + R_src)(Z22 + R_load) - Z12 Z21|^2,
    the ratio of power delivered to the load to the power available from
    the source.  Always in [0, 1] for passive networks.
    """
    if r_src <= 0 or r_load <= 0:
        raise TwoPortError("terminations must be positive")
    den = (z.z11 + r_src) * (z.z22 + r_load) - z.z12 * z.z21
    if den == 0:
        raise TwoPortError("resonant singularity in transducer gain")
    return 4.0 * r_src * r_load * abs(z.z21) ** 2 / abs(den) ** 2


def eliminate_internal_node(z_full: np.ndarray, node: int) -> np.ndarray:
    """Kron-reduce a multiport Z matrix by grounding out one internal node.

    z'_ij = z_ij - z_ik z_kj / z_kk for pivot k = node.
    """
    z_full = np.asarray(z_full, dtype=complex)
    n = z_full.shape[-1]
    if not 0 <= node < n:
        raise TwoPortError(f"node index {node} out of range")
    pivot = z_full[..., node, node]
    if np.any(pivot == 0):
        raise TwoPortError("floating internal node: zero pivot in reduction")
    keep = [i for i in range(n) if i != node]
    col = z_full[..., keep, node]
    row = z_full[..., node, keep]
    sub = z_full[..., keep, :][..., :, keep]
    return sub - col[..., :, None] * row[..., None, :] / pivot[..., None, None]


# ---------------------------------------------------------------------------
# ABCD (chain) helpers.  Entries may be scalars or numpy arrays sharing a
# frequency axis; a chain matrix is the tuple (A, B, C, D).


def abcd_identity():
    return (1.0 + 0j, 0.0 + 0j, 0.0 + 0j, 1.0 + 0j)


def abcd_series(zseries):
    """Chain matrix of a series impedance."""
    one = np.ones_like(np.asarray(zseries, dtype=complex))
    return (one, np.asarray(zseries, dtype=complex), 0 * one, one)


def abcd_shunt(yshunt):
    """Chain matrix of a shunt admittance to ground."""
    one = np.ones_like(np.asarray(yshunt, dtype=complex))
    return (one, 0 * one, np.asarray(yshunt, dtype=complex), one)


def abcd_from_z(z11, z12, z21, z22):
    """Chain matrix from Z parameters (vectorized); requires z21 != 0."""
    z21 = np.asarray(z21, dtype=complex)
    if np.any(z21 == 0):
        raise TwoPortError("degenerate network: z21 = 0 has no chain form")
    det = z11 * z22 - z12 * z21
    return (z11 / z21, det / z21, 1.0 / z21, z22 / z21)


def cascade(*mats):
    """Multiply chain matrices left (input side) to right (output side)."""
    a, b, c, d = abcd_identity()
    for (a2, b2, c2, d2) in mats:
        a, b, c, d = (
            a * a2 + b * c2,
            a * b2 + b * d2,
            c * a2 + d * c2,
            c * b2 + d * d2,
        )
    return (a, b, c, d)


def abcd_to_s(mat, zref1: float, zref2: float):
    """Scattering parameters (s11, s12, s21, s22) from a chain matrix.

    Numerically stable even where the open-circuit Z parameters blow up
    (e.g. exactly at a lossless parallel resonance).
    """
    a, b, c, d = mat
    r1, r2 = float(zref1), float(zref2)
    if r1 <= 0 or r2 <= 0:
        raise TwoPortError("reference impedances must be positive")
    det = a * d - b * c
    den = a * r2 + b + c * r1 * r2 + d * r1
    s11 = (a * r2 + b - c * r1 * r2 - d * r1) / den
    s21 = 2.0 * math.sqrt(r1 * r2) / den
    s12 = 2.0 * math.sqrt(r1 * r2) * det / den
    s22 = (-a * r2 + b - c * r1 * r2 + d * r1) / den
    return s11, s12, s21, s22


def abcd_input_impedance(mat, z_load):
    """Impedance looking into port 1 with port 2 terminated in z_load."""
    a, b, c, d = mat
    return (a * z_load + b) / (c * z_load + d)


def abcd_output_impedance(mat, z_src):
    """Impedance looking into port 2 with port 1 terminated in z_src."""
    a, b, c, d = mat
    return (d * z_src + b) / (c * z_src + a)


def db10(x):
    """Power ratio to dB (10 log10), with a floor to avoid -inf."""
    return 10.0 * np.log10(np.maximum(np.asarray(x, dtype=float), 1e-300))


def db20(x):
    """Magnitude to dB (20 log10), with a floor to avoid -inf."""
    return 20.0 * np.log10(np.maximum(np.abs(np.asarray(x)), 1e-300))
