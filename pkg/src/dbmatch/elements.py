"""Lumped element and coupled-inductor models.

Inductor loss follows the series-resistance model r = omega*L/Q; the
center-tapped transformer is represented by a 4x4 inductance matrix over
its winding halves (primary half 1/2, secondary half 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .twoport import TwoPortError, TwoPortZ


@dataclass(frozen=True)
class LossyInductor:
    """Inductor with quality factor Q; Q may be math.inf for an ideal coil."""

    inductance: float
    quality: float = math.inf

    def __post_init__(self):
        if self.inductance <= 0:
            raise ValueError("inductance must be positive")
        if self.quality <= 0:
            raise ValueError("quality factor must be positive")

    def impedance(self, w):
        r = w * self.inductance / self.quality if math.isfinite(self.quality) else 0.0
        return r + 1j * w * self.inductance


@dataclass(frozen=True)
class Capacitor:
    """Capacitor, ideal unless a finite quality factor is given."""

    capacitance: float
    quality: float = math.inf

    def __post_init__(self):
        if self.capacitance < 0:
            raise ValueError("capacitance must be nonnegative")
        if self.quality <= 0:
            raise ValueError("quality factor must be positive")

    def admittance(self, w):
        g = w * self.capacitance / self.quality if math.isfinite(self.quality) else 0.0
        return g + 1j * w * self.capacitance


@dataclass(frozen=True)
class TransformerSpec:
    """Center-tapped coupled-inductor pair.

    Each winding splits into two series halves: L_p1 = split*L_p,
    L_p2 = (1-split)*L_p, and likewise for the secondary.  In the default
    "mirror" arrangement each primary half couples only to the matching
    secondary half with mutual k*sqrt(L_pi*L_si); at split = 0.5 this
    equals k*sqrt(L_p*L_s)/2 per pair and k*sqrt(L_p*L_s) in aggregate.
    The "all_pairs" alternative spreads k*sqrt(L_p*L_s)/4 over all four
    half-pairs.
    """

    l_primary: float
    l_secondary: float
    coupling: float = 1.0
    q_xfmr: float = math.inf
    primary_split: float = 0.5
    secondary_split: float = 0.5
    coupling_mode: str = "mirror"

    def __post_init__(self):
        if self.l_primary <= 0 or self.l_secondary <= 0:
            raise ValueError("winding inductances must be positive")
        if not 0.0 < self.coupling <= 1.0:
            raise ValueError("unphysical coupling: k must be in (0, 1]")
        if not 0.0 < self.primary_split < 1.0 or not 0.0 < self.secondary_split < 1.0:
            raise ValueError("winding splits must be in (0, 1)")
        if self.q_xfmr <= 0:
            raise ValueError("quality factor must be positive")
        if self.coupling_mode not in ("mirror", "all_pairs"):
            raise ValueError(f"unknown coupling mode {self.coupling_mode!r}")

    @property
    def halves(self) -> tuple[float, float, float, float]:
        """(L_p1, L_p2, L_s1, L_s2)."""
        return (
            self.primary_split * self.l_primary,
            (1.0 - self.primary_split) * self.l_primary,
            self.secondary_split * self.l_secondary,
            (1.0 - self.secondary_split) * self.l_secondary,
        )

    @property
    def mutual(self) -> float:
        """Aggregate mutual inductance between the full windings."""
        return self.coupling * math.sqrt(self.l_primary * self.l_secondary)


def inductance_matrix(t: TransformerSpec) -> np.ndarray:
    """4x4 inductance matrix over (L_p1, L_p2, L_s1, L_s2) branch currents.

    Intra-winding mutuals are zero, so L_p = L_p1 + L_p2 holds exactly for
    the series-connected halves.  The result is checked for positive
    semidefiniteness.
    """
    lp1, lp2, ls1, ls2 = t.halves
    m = np.diag([lp1, lp2, ls1, ls2])
    if t.coupling_mode == "mirror":
        m[0, 2] = m[2, 0] = t.coupling * math.sqrt(lp1 * ls1)
        m[1, 3] = m[3, 1] = t.coupling * math.sqrt(lp2 * ls2)
    else:
        quarter = t.mutual / 4.0
        for i in (0, 1):
            for j in (2, 3):
                m[i, j] = m[j, i] = quarter
    eig = np.linalg.eigvalsh(m)
    # tolerance floor: the eigensolver itself is only accurate to
    # O(eps * ||L||), which matters for the K_m = 1 zero eigenvalue
    tol = max(1e-18, 64.0 * np.finfo(float).eps) * m.trace()
    if eig.min() < -tol:
        raise ValueError("unrealizable transformer: inductance matrix not PSD")
    return m


def _tap_threeport(t: TransformerSpec, w):
    """3-port Z entries (in, out, tap) of the center-tapped transformer.

    Loop currents: I1 through both primary halves, I2 through the full
    secondary, I3 injected at the tap (flowing through L_s2 only).
    Winding halves carry series loss w*L_half/Q.  `w` may be an array.
    """
    lmat = inductance_matrix(t)
    lp1, lp2, ls1, ls2 = t.halves
    q = t.q_xfmr
    loss = (lambda lh: w * lh / q) if math.isfinite(q) else (lambda lh: 0.0 * w)
    jw = 1j * w
    z11 = jw * (lmat[0, 0] + lmat[1, 1] + 2 * lmat[0, 1]) + loss(lp1) + loss(lp2)
    z12 = jw * (lmat[0, 2] + lmat[0, 3] + lmat[1, 2] + lmat[1, 3])
    z13 = jw * (lmat[0, 3] + lmat[1, 3])
    z22 = jw * (lmat[2, 2] + lmat[3, 3] + 2 * lmat[2, 3]) + loss(ls1) + loss(ls2)
    z23 = jw * (lmat[2, 3] + lmat[3, 3]) + loss(ls2)
    z33 = jw * lmat[3, 3] + loss(ls2)
    return z11, z12, z13, z22, z23, z33


def tap_terminated_twoport(t: TransformerSpec, y_tap, w):
    """Two-port Z entries with the tap loaded by admittance y_tap.

    Formulated in tap admittance so the open-tap limit (y_tap = 0) is
    exact; equivalent to Kron reduction with pivot (z33 + 1/y_tap).
    Returns (z11, z12, z21, z22); arguments may be frequency arrays.
    """
    z11, z12, z13, z22, z23, z33 = _tap_threeport(t, w)
    y = np.asarray(y_tap, dtype=complex)
    finite = np.isfinite(y.real) & np.isfinite(y.imag)
    yf = np.where(finite, y, 0.0)
    den = 1.0 + z33 * yf
    if np.any(finite & (den == 0)):
        raise TwoPortError("floating internal node: tap branch is singular")
    # infinite tap admittance (shorted tap) has the finite limit 1/z33
    f = np.where(finite, yf / np.where(den == 0, 1.0, den), 1.0 / z33)
    return (
        z11 - z13 * z13 * f,
        z12 - z13 * z23 * f,
        z12 - z13 * z23 * f,
        z22 - z23 * z23 * f,
    )


def centertapped_twoport(t: TransformerSpec, z_tap: complex, w: float) -> TwoPortZ:
    """Two-port from the primary terminals to the secondary load terminal.

    ``z_tap`` is the impedance loading the center tap; ``math.inf`` (or a
    complex infinity) leaves the tap open, recovering the plain
    two-winding transformer with M = k*sqrt(L_p*L_s).
    """
    if w <= 0:
        raise ValueError("angular frequency must be positive")
    if z_tap == 0:
        y_tap = complex(np.inf)
        # zero tap impedance: reduce with the pivot z33 directly
        z11, z12, z13, z22, z23, z33 = _tap_threeport(t, w)
        if z33 == 0:
            raise TwoPortError("floating internal node: tap branch is singular")
        return TwoPortZ(
            z11 - z13 * z13 / z33,
            z12 - z13 * z23 / z33,
            z12 - z13 * z23 / z33,
            z22 - z23 * z23 / z33,
        )
    if np.isinf(z_tap):
        y_tap = 0.0
    else:
        y_tap = 1.0 / z_tap
    zz = tap_terminated_twoport(t, y_tap, w)
    return TwoPortZ(*zz)
