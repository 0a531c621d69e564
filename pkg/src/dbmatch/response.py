"""Per-frequency S-parameter data shared by the analysis engines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .twoport import db10, db20


@dataclass(frozen=True)
class FrequencyResponse:
    """S-matrix vs frequency with real port reference impedances.

    When the references equal the actual source/load terminations (the
    usual case here: R_opt at port 1, R_L at port 2), |S21|^2 is the
    transducer power gain.
    """

    frequencies: np.ndarray  # Hz, strictly increasing
    s: np.ndarray  # complex, shape (F, P, P)
    refs: tuple[float, ...]

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        s = np.asarray(self.s, dtype=complex)
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "s", s)
        if f.ndim != 1 or np.any(np.diff(f) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if s.shape != (f.size, len(self.refs), len(self.refs)):
            raise ValueError("S array shape does not match grid and ports")
        if not np.all(np.isfinite(s)):
            raise ValueError("non-finite S-parameter entries")
        if any(r <= 0 for r in self.refs):
            raise ValueError("port references must be positive")

    @property
    def n_ports(self) -> int:
        return len(self.refs)

    def transducer_gain(self) -> np.ndarray:
        """|S21|^2: power delivered to port 2 over power available at port 1."""
        if self.n_ports < 2:
            raise ValueError("transducer gain needs a two-port response")
        return np.abs(self.s[:, 1, 0]) ** 2

    def gt_db(self) -> np.ndarray:
        return db10(self.transducer_gain())

    def s_db(self, i: int, j: int) -> np.ndarray:
        """20 log10 |S_ij| with 1-based port indices."""
        return db20(self.s[:, i - 1, j - 1])

    def return_loss_db(self, port: int) -> np.ndarray:
        """Positive-dB return loss at a 1-based port index."""
        return -self.s_db(port, port)

    def index_of(self, f_hz: float) -> int:
        return int(np.argmin(np.abs(self.frequencies - f_hz)))

    def renormalized(self, z0: float = 50.0) -> "FrequencyResponse":
        """Same network expressed with every port reference set to z0 ohms."""
        if z0 <= 0:
            raise ValueError("reference impedance must be positive")
        if all(r == z0 for r in self.refs):
            return self
        r = np.array(self.refs, dtype=float)
        p = (r + z0) / (2.0 * np.sqrt(r * z0))
        q = (r - z0) / (2.0 * np.sqrt(r * z0))
        pm = np.diag(p).astype(complex)
        qm = np.diag(q).astype(complex)
        # wave change of basis: a' = P a + Q b, b' = Q a + P b with b = S a
        s_new = (qm + pm @ self.s) @ np.linalg.inv(pm + qm @ self.s)
        return FrequencyResponse(self.frequencies, s_new, (z0,) * self.n_ports)
