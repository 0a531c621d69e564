"""Center-tap resonator networks: impedance, pole/zero structure, checks.

The workhorse is the one-inductor resonator made of a series capacitor
C_ts1 feeding a parallel L_ts/C_ts tank ("III").  Its lossless impedance is

    Z_T(jw) = [1 - w^2 L_ts (C_ts + C_ts1)] / [1 - w^2 L_ts C_ts] * 1/(jw C_ts1)

with a DC pole, a finite pole at 1/sqrt(L_ts C_ts) and a zero below it at
1/sqrt(L_ts (C_ts + C_ts1)).  A generic three-element enumerator covers
the remaining series/parallel arrangements (two-inductor variants "I" and
"II", and the dual one-inductor variant "IV").
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .synthesis import DesignSpec

_TOPOLOGIES = ("I", "II", "III", "IV", "generic")


@dataclass(frozen=True)
class ResonatorSpec:
    """One-inductor resonator element set.

    ``c_ts = 0`` or ``c_ts1 = 0`` are allowed for degenerate sweep cases
    and flagged via :attr:`degenerate`.  Topologies I/II need two
    inductors and are only available through the enumerator below.
    """

    topology: str = "III"
    l_ts: float = 0.0
    c_ts: float = 0.0
    c_ts1: float = 0.0
    q_t: float = math.inf

    def __post_init__(self):
        if self.topology not in _TOPOLOGIES:
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.l_ts <= 0:
            raise ValueError("l_ts must be positive")
        if self.c_ts < 0 or self.c_ts1 < 0:
            raise ValueError("capacitances must be nonnegative")
        if self.q_t <= 0:
            raise ValueError("q_t must be positive")

    @property
    def degenerate(self) -> bool:
        return self.c_ts == 0 or self.c_ts1 == 0


@dataclass(frozen=True)
class PoleZeroReport:
    """Pole/zero frequencies in rad/s, ascending; DC pole included."""

    poles: tuple[float, ...]
    zeros: tuple[float, ...]
    ordering: str  # "pole_above_zero" or "zero_above_pole"
    degenerate: bool = False

    def __post_init__(self):
        for seq in (self.poles, self.zeros):
            if any(w < 0 for w in seq) or list(seq) != sorted(seq):
                raise ValueError("pole/zero lists must be nonnegative ascending")


@dataclass(frozen=True)
class ConditionReport:
    """Design-condition diagnostics for a resonator against a band plan."""

    pole_error_rel: float
    delta: float
    delta_min: float
    margin: float
    alpha: float
    c_sc: float
    warnings: tuple[str, ...] = ()


def _inductor_z(l: float, q: float, w):
    r = w * l / q if math.isfinite(q) else 0.0 * w
    return r + 1j * w * l


def resonator_impedance(r: ResonatorSpec, w):
    """Impedance of the resonator at angular frequency w (scalar or array).

    Exactly at a lossless pole the result is the sentinel ``1j*inf``
    rather than an exception, so sweep grids that land on the pole do
    not crash.
    """
    y = resonator_admittance(r, w)
    if np.ndim(w) == 0:
        if y == 0:
            return complex(0.0, math.inf)
        return 1.0 / y
    with np.errstate(divide="ignore"):
        return np.where(y == 0, complex(0.0, math.inf), 1.0 / np.where(y == 0, 1.0, y))


def resonator_admittance(r: ResonatorSpec, w):
    """Admittance looking into the resonator; 0 exactly at a lossless pole.

    This is the numerically safe form used by the analysis engines: the
    pole of Z_T is an ordinary zero of Y_T.
    """
    zl = _inductor_z(r.l_ts, r.q_t, w)
    if r.topology in ("III", "generic"):
        ytank = 1.0 / zl + 1j * w * r.c_ts
        yc1 = 1j * w * r.c_ts1
        den = ytank + yc1
        num = ytank * yc1
        if np.ndim(w) == 0:
            if num == 0:
                return 0j
            if den == 0:
                return complex(math.inf, math.inf)
            return num / den
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(num == 0, 0j, num / np.where(den == 0, 1.0, den))
        return np.where((den == 0) & (num != 0), complex(math.inf, math.inf), y)
    if r.topology == "IV":
        # series L-C branch (open if c_ts = 0) shunted by c_ts1
        if r.c_ts == 0:
            return 1j * w * r.c_ts1 + 0.0 * w
        zbranch = zl - 1j / (w * r.c_ts)
        if np.ndim(w) == 0:
            ybranch = complex(math.inf, math.inf) if zbranch == 0 else 1.0 / zbranch
        else:
            with np.errstate(divide="ignore"):
                ybranch = np.where(
                    zbranch == 0,
                    complex(math.inf, math.inf),
                    1.0 / np.where(zbranch == 0, 1.0, zbranch),
                )
        return ybranch + 1j * w * r.c_ts1
    raise ValueError(
        f"topology {r.topology!r} needs two inductors; use the three-element enumerator"
    )


def poles_zeros(r: ResonatorSpec) -> PoleZeroReport:
    """Lossless pole/zero frequencies of the resonator impedance."""
    if r.topology in ("III", "generic"):
        if r.c_ts1 == 0:
            # series capacitor open: only the tank remains visible, and
            # the impedance degenerates (zero coincides with the pole)
            wp = 1.0 / math.sqrt(r.l_ts * r.c_ts) if r.c_ts > 0 else 0.0
            poles = (0.0, wp) if wp else (0.0,)
            return PoleZeroReport(poles, poles[1:], "pole_above_zero", True)
        if r.c_ts == 0:
            wz = 1.0 / math.sqrt(r.l_ts * r.c_ts1)
            return PoleZeroReport((0.0,), (wz,), "pole_above_zero", True)
        wp = 1.0 / math.sqrt(r.l_ts * r.c_ts)
        wz = 1.0 / math.sqrt(r.l_ts * (r.c_ts + r.c_ts1))
        return PoleZeroReport((0.0, wp), (wz,), "pole_above_zero")
    if r.topology == "IV":
        if r.c_ts == 0 or r.c_ts1 == 0:
            wz = 0.0 if r.c_ts == 0 else 1.0 / math.sqrt(r.l_ts * r.c_ts)
            return PoleZeroReport((0.0,), (wz,) if wz else (), "pole_above_zero", True)
        wz = 1.0 / math.sqrt(r.l_ts * r.c_ts)
        wp = math.sqrt((r.c_ts + r.c_ts1) / (r.l_ts * r.c_ts * r.c_ts1))
        return PoleZeroReport((0.0, wp), (wz,), "pole_above_zero")
    raise ValueError(
        f"topology {r.topology!r} needs two inductors; use the three-element enumerator"
    )


def band_alpha(w_low: float, w_high: float) -> float:
    """alpha = w_H^2 / (w_H^2 - w_L^2), the band-separation factor."""
    return w_high**2 / (w_high**2 - w_low**2)


def equivalent_capacitance(r: ResonatorSpec, w: float) -> float:
    """Capacitance whose reactance equals the lossless Z_T at w.

    For the one-inductor resonator: C_eq = C_ts1 (1 - w^2 L C_ts) /
    (1 - w^2 L (C_ts + C_ts1)); positive below the impedance zero and
    between pole and the next zero crossing, where the resonator looks
    capacitive.
    """
    num = 1.0 - w**2 * r.l_ts * r.c_ts
    den = 1.0 - w**2 * r.l_ts * (r.c_ts + r.c_ts1)
    if den == 0:
        return math.inf
    return r.c_ts1 * num / den


def check_conditions(r: ResonatorSpec, spec: "DesignSpec") -> ConditionReport:
    """Report how well the resonator meets the dual-band design conditions.

    Checks pole placement against w_L, the normalized high-band impedance
    delta = |Z_T(j w_H)| / R_L against its theoretical floor
    delta_min = alpha / (w_H C_ts R_L), and the capacitance the resonator
    presents at the inter-band notch frequency.  Reports only; never
    rejects.
    """
    w_low = 2.0 * math.pi * spec.f_low
    w_high = 2.0 * math.pi * spec.f_high
    w_sc = 2.0 * math.pi * spec.f_sc
    ideal = ResonatorSpec(r.topology, r.l_ts, r.c_ts, r.c_ts1)
    pz = poles_zeros(ideal)
    finite_poles = [p for p in pz.poles if p > 0]
    pole_error = abs(finite_poles[0] - w_low) / w_low if finite_poles else math.inf
    zt_high = resonator_impedance(ideal, w_high)
    delta = abs(zt_high) / spec.r_load if np.isfinite(abs(zt_high)) else math.inf
    alpha = band_alpha(w_low, w_high)
    delta_min = (
        alpha / (w_high * r.c_ts * spec.r_load) if r.c_ts > 0 else math.inf
    )
    c_sc = equivalent_capacitance(ideal, w_sc)
    warnings = []
    if not 0.01 <= delta <= 0.1:
        warnings.append(
            f"delta = {delta:.4g} outside the typical range [0.01, 0.1]"
        )
    if ideal.degenerate:
        warnings.append("degenerate resonator (zero-valued capacitor)")
    return ConditionReport(
        pole_error_rel=pole_error,
        delta=delta,
        delta_min=delta_min,
        margin=delta - delta_min,
        alpha=alpha,
        c_sc=c_sc,
        warnings=tuple(warnings),
    )


# ---------------------------------------------------------------------------
# Generic three-element series/parallel enumerator.  Element order is
# (series/outer element, branch inductor-or-capacitor, branch capacitor);
# see each entry's `elements` tuple for the meaning of (e1, e2, e3).


@dataclass(frozen=True)
class ThreeElementTopology:
    alias: str
    structure: str
    elements: tuple[str, str, str]  # kinds of (e1, e2, e3): "L" or "C"
    ordering: str
    _impedance: Callable = field(repr=False, compare=False, default=None)
    _poles_zeros: Callable = field(repr=False, compare=False, default=None)

    @property
    def inductor_count(self) -> int:
        return sum(1 for k in self.elements if k == "L")

    def impedance(self, e1: float, e2: float, e3: float, w: float) -> complex:
        return self._impedance(e1, e2, e3, w)

    def poles_zeros(self, e1: float, e2: float, e3: float) -> PoleZeroReport:
        return self._poles_zeros(e1, e2, e3)


def _par(a: complex, b: complex) -> complex:
    if a + b == 0:
        return complex(0.0, math.inf)
    return a * b / (a + b)


def _z_i(l1, l2, c, w):
    return 1j * w * l1 + _par(1j * w * l2, 1.0 / (1j * w * c))


def _pz_i(l1, l2, c):
    wp = 1.0 / math.sqrt(l2 * c)
    wz = math.sqrt((l1 + l2) / (l1 * l2 * c))
    return PoleZeroReport((wp,), (0.0, wz), "zero_above_pole")


def _z_ii(l1, l2, c, w):
    return _par(1j * w * l1, 1j * w * l2 + 1.0 / (1j * w * c))


def _pz_ii(l1, l2, c):
    wp = 1.0 / math.sqrt((l1 + l2) * c)
    wz = 1.0 / math.sqrt(l2 * c)
    return PoleZeroReport((wp,), (0.0, wz), "zero_above_pole")


def _z_iii(l, c, c1, w):
    return 1.0 / (1j * w * c1) + _par(1j * w * l, 1.0 / (1j * w * c))


def _pz_iii(l, c, c1):
    return poles_zeros(ResonatorSpec("III", l, c, c1))


def _z_iv(l, c, c1, w):
    return _par(1.0 / (1j * w * c1), 1j * w * l + 1.0 / (1j * w * c))


def _pz_iv(l, c, c1):
    return poles_zeros(ResonatorSpec("IV", l, c, c1))


_ENUMERATION = (
    ThreeElementTopology(
        "I", "series L1 + (L2 || C)", ("L", "L", "C"), "zero_above_pole", _z_i, _pz_i
    ),
    ThreeElementTopology(
        "II", "L1 || (L2 + C)", ("L", "L", "C"), "zero_above_pole", _z_ii, _pz_ii
    ),
    ThreeElementTopology(
        "III", "series C1 + (L || C)", ("L", "C", "C"), "pole_above_zero", _z_iii, _pz_iii
    ),
    ThreeElementTopology(
        "IV", "C1 || (L + C)", ("L", "C", "C"), "pole_above_zero", _z_iv, _pz_iv
    ),
)


def enumerate_topologies() -> tuple[ThreeElementTopology, ...]:
    """All three-element series/parallel resonators with one finite pole
    and one finite zero, classified by inductor count and pole/zero order."""
    return _ENUMERATION


def topology_by_alias(alias: str) -> ThreeElementTopology:
    for t in _ENUMERATION:
        if t.alias == alias:
            return t
    raise ValueError(f"unknown topology alias {alias!r}")
