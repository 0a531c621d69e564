"""Band metrics extraction and CSV/Touchstone emission.

Suppression is self-referenced: the dB difference between the weaker of
the two passband levels and the transfer function at the inter-band
notch.  Return loss is reported as positive dB.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .response import FrequencyResponse


@dataclass(frozen=True)
class BandMetrics:
    """Scalar summary of a dual-band two-port response.

    ``f_notch`` and ``suppression`` are None when no interior minimum
    exists between the band centers.
    """

    il_low: float  # dB insertion loss at f_low
    il_high: float  # dB insertion loss at f_high
    f_notch: float | None
    notch_db: float | None  # G_T in dB at the notch
    suppression: float | None  # min(passband) - notch, dB
    rl_in_low: float
    rl_in_high: float
    rl_out_low: float
    rl_out_high: float

    def as_dict(self) -> dict:
        return asdict(self)


def find_notch(
    freqs: np.ndarray, gt_db: np.ndarray, f_lo: float, f_hi: float
) -> tuple[float, float] | None:
    """Deepest interior local minimum of gt_db strictly inside (f_lo, f_hi).

    Endpoints of the window never qualify, so a monotone roll-off is not
    mistaken for a notch.  Returns (frequency, level_db) or None.
    """
    mask = (freqs > f_lo) & (freqs < f_hi)
    idx = np.flatnonzero(mask)
    best = None
    for i in idx:
        if 0 < i < freqs.size - 1 and gt_db[i] <= gt_db[i - 1] and gt_db[i] <= gt_db[i + 1]:
            if gt_db[i] < gt_db[i - 1] or gt_db[i] < gt_db[i + 1]:
                if best is None or gt_db[i] < best[1]:
                    best = (float(freqs[i]), float(gt_db[i]))
    return best


def extract_band_metrics(
    resp: FrequencyResponse, f_low: float, f_high: float
) -> BandMetrics:
    """Band-center losses, notch location/depth and return losses.

    Band values are read at the grid points nearest f_low/f_high; the
    notch search runs strictly between the two band centers.
    """
    if resp.n_ports < 2:
        raise ValueError("two-port metrics need a two-port response")
    gt_db = resp.gt_db()
    i_lo = resp.index_of(f_low)
    i_hi = resp.index_of(f_high)
    notch = find_notch(resp.frequencies, gt_db, f_low, f_high)
    pass_floor = min(gt_db[i_lo], gt_db[i_hi])
    rl_in = resp.return_loss_db(1)
    rl_out = resp.return_loss_db(2)
    return BandMetrics(
        il_low=float(-gt_db[i_lo]),
        il_high=float(-gt_db[i_hi]),
        f_notch=None if notch is None else notch[0],
        notch_db=None if notch is None else notch[1],
        suppression=None if notch is None else float(pass_floor - notch[1]),
        rl_in_low=float(rl_in[i_lo]),
        rl_in_high=float(rl_in[i_hi]),
        rl_out_low=float(rl_out[i_lo]),
        rl_out_high=float(rl_out[i_hi]),
    )


def touchstone_text(resp: FrequencyResponse) -> str:
    """Touchstone v1 two-port text, renormalized to 50 ohms.

    Option line ``# HZ S RI R 50``; one line per frequency with columns
    f, S11, S21, S12, S22 as real/imaginary pairs, 12 significant digits.
    """
    if resp.n_ports != 2:
        raise ValueError("Touchstone emission implemented for two-ports only")
    r = resp.renormalized(50.0)
    lines = ["! two-port S-parameters", "# HZ S RI R 50"]
    for i, f in enumerate(r.frequencies):
        entries = [f"{f:.12g}"]
        for a, b in ((1, 1), (2, 1), (1, 2), (2, 2)):
            v = r.s[i, a - 1, b - 1]
            entries.append(f"{v.real:.12g}")
            entries.append(f"{v.imag:.12g}")
        lines.append(" ".join(entries))
    return "\n".join(lines) + "\n"


def parse_touchstone(text: str) -> FrequencyResponse:
    """Minimal reader for the files touchstone_text produces (round-trip
    checks); expects the RI/Hz option line and 2-port rows."""
    freqs = []
    rows = []
    z0 = 50.0
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("!"):
            continue
        if line.startswith("#"):
            toks = line.split()
            z0 = float(toks[toks.index("R") + 1])
            continue
        vals = [float(t) for t in line.split()]
        freqs.append(vals[0])
        s11 = complex(vals[1], vals[2])
        s21 = complex(vals[3], vals[4])
        s12 = complex(vals[5], vals[6])
        s22 = complex(vals[7], vals[8])
        rows.append([[s11, s12], [s21, s22]])
    return FrequencyResponse(np.array(freqs), np.array(rows), (z0, z0))


def sweep_csv_text(freqs: np.ndarray, columns: list[tuple[str, np.ndarray]]) -> str:
    """CSV with header ``freq_hz,<label1>,<label2>,...``; 12 significant
    digits so summaries re-derived from the file agree to 1e-9."""
    header = "freq_hz," + ",".join(label for label, _ in columns)
    lines = [header]
    for i, f in enumerate(freqs):
        row = [f"{f:.12g}"] + [f"{col[i]:.12g}" for _, col in columns]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
