"""Dual-band matching network synthesis and numerical refinement.

The closed-form pipeline fixes the transformer from the low-band
resonance (L_p resonates C_in = C_p + C_s/n^2 at w_L), pins the
resonator pole at w_L, and sizes the series capacitor so the resonator
presents the capacitance C_sc = 4/(w_SC^2 L_s) that short-circuits the
output at the inter-band notch.  A damped least-squares refinement then
absorbs the model error left by finite coupling, loss and the
half-winding approximation, adjusting {L_p, L_ts, C_ts1, winding split}
while keeping the resonator pole pinned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .elements import TransformerSpec, tap_terminated_twoport
from .netlist import AcSweep, Coupling, Element, Netlist, Port
from .resonator import (
    ConditionReport,
    ResonatorSpec,
    band_alpha,
    check_conditions,
    resonator_admittance,
    resonator_impedance,
)
from .response import FrequencyResponse


class SynthesisError(ValueError):
    pass


@dataclass(frozen=True)
class DesignSpec:
    """Band plan, terminations, parasitics and quality assumptions."""

    f_low: float
    f_high: float
    r_opt: float
    r_load: float
    c_par_primary: float
    c_par_secondary: float
    f_sc: float | None = None
    k_m: float = 1.0
    q_xfmr: float = math.inf
    q_t: float = math.inf

    def __post_init__(self):
        if self.f_low <= 0 or self.f_high <= self.f_low:
            raise SynthesisError("need 0 < f_low < f_high")
        if self.f_sc is None:
            object.__setattr__(self, "f_sc", short_circuit_frequency(self.f_low, self.f_high))
        if not self.f_low < self.f_sc < self.f_high:
            raise SynthesisError("need f_low < f_sc < f_high")
        if self.r_opt <= 0 or self.r_load <= 0:
            raise SynthesisError("terminations must be positive")
        if self.c_par_primary < 0 or self.c_par_secondary < 0:
            raise SynthesisError("parasitic capacitances must be nonnegative")
        if not 0.0 < self.k_m <= 1.0:
            raise SynthesisError("coupling k_m must be in (0, 1]")
        if self.q_xfmr <= 0 or self.q_t <= 0:
            raise SynthesisError("quality factors must be positive")

    @property
    def w_low(self) -> float:
        return 2.0 * math.pi * self.f_low

    @property
    def w_high(self) -> float:
        return 2.0 * math.pi * self.f_high

    @property
    def w_sc(self) -> float:
        return 2.0 * math.pi * self.f_sc


@dataclass(frozen=True)
class RefinementResult:
    converged: bool
    iterations: int
    residual_norm: float
    initial_norm: float
    residuals: tuple[float, ...]
    message: str = ""


@dataclass(frozen=True)
class SynthesizedNetwork:
    """Complete element set plus derived diagnostics."""

    spec: DesignSpec
    transformer: TransformerSpec
    resonator: ResonatorSpec
    diagnostics: dict = field(default_factory=dict)
    refinement: RefinementResult | None = None


def turn_ratio(r_opt: float, r_load: float) -> float:
    """n = sqrt(r_opt / r_load): impedance ratio of the matching transformer."""
    if r_opt <= 0 or r_load <= 0:
        raise SynthesisError("resistances must be positive")
    return math.sqrt(r_opt / r_load)


def short_circuit_frequency(f_low: float, f_high: float) -> float:
    """Geometric mean of the band edges: notch placement frequency."""
    if not 0 < f_low < f_high:
        raise SynthesisError("need 0 < f_low < f_high")
    return math.sqrt(f_low * f_high)


def primary_design(spec: DesignSpec) -> dict:
    """Transformer sizing from the low-band resonance condition.

    C_in = C_p + C_s/n^2 referred to the primary must resonate with L_p
    at w_L; the secondary follows from the turn ratio, L_s = L_p/n^2.
    """
    n = turn_ratio(spec.r_opt, spec.r_load)
    c_in = spec.c_par_primary + spec.c_par_secondary / n**2
    if c_in == 0:
        raise SynthesisError("no resonating capacitance: C_p and C_s both zero")
    l_p = 1.0 / (spec.w_low**2 * c_in)
    return {"n": n, "c_in": c_in, "l_p": l_p, "l_s": l_p / n**2}


def required_cts(l_s: float, spec: DesignSpec) -> tuple[float, float]:
    """(C_sc, minimum C_ts) for a realizable series capacitor.

    C_sc = 4/(w_SC^2 L_s) is the capacitance the resonator must present
    at the notch; C_ts must exceed C_sc*w_H/(w_H - w_L) for the series
    capacitor that achieves it to come out positive.
    """
    c_sc = 4.0 / (spec.w_sc**2 * l_s)
    return c_sc, c_sc * spec.w_high / (spec.w_high - spec.w_low)


def resonator_synthesis(
    l_s: float, spec: DesignSpec, l_ts: float
) -> tuple[ResonatorSpec, dict]:
    """Size the resonator for a given tank inductance.

    The tank pole is pinned at w_L (C_ts = 1/(w_L^2 L_ts)) and the series
    capacitor is chosen so the resonator looks like C_sc at w_SC, which
    with the split-winding model nulls the output impedance there.
    """
    if l_ts <= 0:
        raise SynthesisError("l_ts must be positive")
    c_ts = 1.0 / (spec.w_low**2 * l_ts)
    c_sc, c_ts_min = required_cts(l_s, spec)
    den = (spec.w_high - spec.w_low) - c_sc * spec.w_high / c_ts
    if den <= 0:
        raise SynthesisError(
            "infeasible L_ts: increase C_ts (decrease L_ts) so that "
            f"C_ts > {c_ts_min:.6g} F (got C_ts = {c_ts:.6g} F)"
        )
    c_ts1 = c_sc * (spec.w_high - spec.w_low) / den
    res = ResonatorSpec("III", l_ts, c_ts, c_ts1, spec.q_t)
    zt_high = resonator_impedance(ResonatorSpec("III", l_ts, c_ts, c_ts1), spec.w_high)
    delta = abs(zt_high) / spec.r_load
    extras = {
        "c_sc": c_sc,
        "c_ts_min": c_ts_min,
        "delta": delta,
        "alpha": band_alpha(spec.w_low, spec.w_high),
    }
    return res, extras


def forward_delta_design(c_ts: float, spec: DesignSpec, delta: float) -> float:
    """Series capacitor from a chosen high-band impedance ratio delta.

    C_ts1 = C_ts / (delta*w_H*C_ts*R_L - alpha); requires delta above the
    feasibility bound delta_min = alpha/(w_H C_ts R_L).
    """
    if c_ts <= 0:
        raise SynthesisError("c_ts must be positive")
    alpha = band_alpha(spec.w_low, spec.w_high)
    delta_min = alpha / (spec.w_high * c_ts * spec.r_load)
    if delta <= delta_min:
        raise SynthesisError(
            f"delta below feasibility bound: delta = {delta:.6g} <= "
            f"delta_min = {delta_min:.6g}"
        )
    return c_ts / (delta * spec.w_high * c_ts * spec.r_load - alpha)


def auto_lts(l_s: float, spec: DesignSpec, margin: float = 1.2) -> float:
    """Largest tank inductance keeping C_ts a `margin` factor above its
    feasibility floor; maximizes inductor realizability."""
    _, c_ts_min = required_cts(l_s, spec)
    return 1.0 / (spec.w_low**2 * margin * c_ts_min)


# ---------------------------------------------------------------------------
# Closed-form analysis engine.  The tap-loaded transformer core has a
# finite Z-matrix everywhere (including the resonator pole at w_L and the
# transmission zero at w_SC, where chain or Y forms blow up), so all
# terminal quantities are computed from terminated 2x2 solves on the
# core Z with the parasitic shunt capacitors folded into the boundary
# conditions.  Vectorized over the frequency axis.


def core_z(net: SynthesizedNetwork, w):
    """Z entries (z11, z12, z21, z22) of the tap-loaded transformer."""
    w = np.asarray(w, dtype=float)
    y_tap = resonator_admittance(net.resonator, w)
    return tap_terminated_twoport(net.transformer, y_tap, w)


def input_impedance(net: SynthesizedNetwork, w):
    """Z looking into the primary with the load R_L connected."""
    w = np.asarray(w, dtype=float)
    z11, z12, z21, z22 = core_z(net, w)
    yp = 1j * w * net.spec.c_par_primary
    g2 = 1.0 / net.spec.r_load + 1j * w * net.spec.c_par_secondary
    num = z11 * (g2 * z22 + 1.0) - g2 * z12 * z21
    det = (yp * z11 + 1.0) * (g2 * z22 + 1.0) - yp * g2 * z12 * z21
    return num / det


def output_impedance(net: SynthesizedNetwork, w):
    """Z looking back into the secondary with the source R_opt connected."""
    w = np.asarray(w, dtype=float)
    z11, z12, z21, z22 = core_z(net, w)
    ys = 1j * w * net.spec.c_par_secondary
    g1 = 1.0 / net.spec.r_opt + 1j * w * net.spec.c_par_primary
    num = z22 * (g1 * z11 + 1.0) - g1 * z12 * z21
    det = (ys * z22 + 1.0) * (g1 * z11 + 1.0) - ys * g1 * z12 * z21
    return num / det


def sparams_at(net: SynthesizedNetwork, w):
    """(s11, s12, s21, s22) referenced to (R_opt, R_L), vectorized over w.

    Solves the doubly terminated network: with port j driven by a
    Thevenin source 2*sqrt(R_j) the incident wave is unity, and the
    reflected waves read off the port node voltages.
    """
    w = np.asarray(w, dtype=float)
    spec = net.spec
    r1, r2 = spec.r_opt, spec.r_load
    z11, z12, z21, z22 = core_z(net, w)
    p1 = 1.0 + 1j * w * spec.c_par_primary * r1
    p2 = 1.0 + 1j * w * spec.c_par_secondary * r2
    det = (p1 * z11 + r1) * (p2 * z22 + r2) - p1 * p2 * z12 * z21
    v1_d1 = 2.0 * math.sqrt(r1) * (z11 * (p2 * z22 + r2) - p2 * z12 * z21) / det
    v2_d2 = 2.0 * math.sqrt(r2) * (z22 * (p1 * z11 + r1) - p1 * z12 * z21) / det
    s11 = v1_d1 / math.sqrt(r1) - 1.0
    s22 = v2_d2 / math.sqrt(r2) - 1.0
    s21 = 2.0 * math.sqrt(r1 * r2) * z21 / det
    s12 = 2.0 * math.sqrt(r1 * r2) * z12 / det
    return s11, s12, s21, s22


def frequency_response(net: SynthesizedNetwork, frequencies) -> FrequencyResponse:
    """S-parameters referenced to (R_opt, R_L) over a frequency grid."""
    f = np.asarray(frequencies, dtype=float)
    s11, s12, s21, s22 = sparams_at(net, 2.0 * math.pi * f)
    s = np.empty((f.size, 2, 2), dtype=complex)
    s[:, 0, 0], s[:, 0, 1] = s11, s12
    s[:, 1, 0], s[:, 1, 1] = s21, s22
    return FrequencyResponse(f, s, (net.spec.r_opt, net.spec.r_load))


def match_residuals(net: SynthesizedNetwork) -> np.ndarray:
    """Normalized residuals of the dual-band match and notch conditions.

    [Re Z_in(w_L) - R_opt, Im Z_in(w_L), Re Z_in(w_H) - R_opt,
    Im Z_in(w_H), |Z_out(w_SC)|] / R_opt.
    """
    spec = net.spec
    zin = input_impedance(net, np.array([spec.w_low, spec.w_high]))
    zout = output_impedance(net, np.array([spec.w_sc]))
    return np.array(
        [
            zin[0].real - spec.r_opt,
            zin[0].imag,
            zin[1].real - spec.r_opt,
            zin[1].imag,
            abs(zout[0]),
        ]
    ) / spec.r_opt


# ---------------------------------------------------------------------------
# Refinement: damped least squares over {L_p, L_ts, C_ts1, split}.


def _network_from_params(base: SynthesizedNetwork, u: np.ndarray) -> SynthesizedNetwork:
    spec = base.spec
    l_p = math.exp(u[0])
    l_ts = math.exp(u[1])
    c_ts1 = math.exp(u[2])
    sigma = 1.0 / (1.0 + math.exp(-u[3]))
    n2 = spec.r_opt / spec.r_load
    t = replace(
        base.transformer,
        l_primary=l_p,
        l_secondary=l_p / n2,
        primary_split=sigma,
        secondary_split=sigma,
    )
    # keep the resonator pole pinned at w_L while the tank inductor moves
    r = replace(
        base.resonator,
        l_ts=l_ts,
        c_ts=1.0 / (spec.w_low**2 * l_ts),
        c_ts1=c_ts1,
    )
    return replace(base, transformer=t, resonator=r)


def _params_of(net: SynthesizedNetwork) -> np.ndarray:
    sigma = net.transformer.primary_split
    return np.array(
        [
            math.log(net.transformer.l_primary),
            math.log(net.resonator.l_ts),
            math.log(net.resonator.c_ts1),
            math.log(sigma / (1.0 - sigma)),
        ]
    )


def refine(
    net: SynthesizedNetwork,
    tol: float = 1e-6,
    max_iterations: int = 200,
    step_limit: float = 0.4,
) -> SynthesizedNetwork:
    """Damped least-squares adjustment of {L_p, L_ts, C_ts1, split}.

    Parameters live in log space (logit for the split), which enforces
    positivity without explicit bounds; C_ts is slaved to 1/(w_L^2 L_ts)
    so the resonator pole stays at w_L.  Levenberg damping starts at 1e-3
    and adapts by factors of 10; steps are clipped componentwise.
    """
    u = _params_of(net)
    res = match_residuals(_network_from_params(net, u))
    norm = float(np.linalg.norm(res))
    initial_norm = norm
    lam = 1e-3
    iterations = 0
    message = ""
    if norm >= tol:
        for iterations in range(1, max_iterations + 1):
            jac = np.empty((res.size, u.size))
            h = 1e-7
            for k in range(u.size):
                up = u.copy()
                up[k] += h
                jac[:, k] = (match_residuals(_network_from_params(net, up)) - res) / h
            if not np.all(np.isfinite(jac)):
                raise SynthesisError("degenerate refinement: non-finite Jacobian")
            jtj = jac.T @ jac
            if np.any(np.diag(jtj) == 0):
                raise SynthesisError("degenerate refinement: Jacobian rank collapse")
            g = jac.T @ res
            accepted = False
            while lam < 1e12:
                try:
                    step = np.linalg.solve(jtj + lam * np.eye(u.size), g)
                except np.linalg.LinAlgError:
                    lam *= 10.0
                    continue
                step = np.clip(step, -step_limit, step_limit)
                u_try = u - step
                try:
                    res_try = match_residuals(_network_from_params(net, u_try))
                except (ValueError, np.linalg.LinAlgError):
                    lam *= 10.0
                    continue
                norm_try = float(np.linalg.norm(res_try))
                if norm_try < norm:
                    u, res, norm = u_try, res_try, norm_try
                    lam = max(lam / 10.0, 1e-12)
                    accepted = True
                    break
                lam *= 10.0
            if not accepted:
                message = "stalled: damping exhausted without improvement"
                break
            if norm < tol:
                break
    converged = norm < tol
    if not converged and not message:
        message = "unconverged after max iterations"
    refined = _network_from_params(net, u)
    refined = replace(
        refined,
        refinement=RefinementResult(
            converged=converged,
            iterations=iterations,
            residual_norm=norm,
            initial_norm=initial_norm,
            residuals=tuple(float(x) for x in res),
            message=message,
        ),
    )
    return replace(refined, diagnostics=_diagnostics(refined))


def _diagnostics(net: SynthesizedNetwork) -> dict:
    spec = net.spec
    n = turn_ratio(spec.r_opt, spec.r_load)
    c_in = spec.c_par_primary + spec.c_par_secondary / n**2
    cond = check_conditions(net.resonator, spec)
    res = match_residuals(net)
    zout_sc = abs(output_impedance(net, np.array([spec.w_sc]))[0])
    return {
        "n": n,
        "c_in": c_in,
        "l_in": net.transformer.l_primary,
        "r_in": n**2 * spec.r_load,
        "c_sc": 4.0 / (spec.w_sc**2 * net.transformer.l_secondary),
        "alpha": cond.alpha,
        "delta": cond.delta,
        "delta_min": cond.delta_min,
        "pole_error_rel": cond.pole_error_rel,
        "match_residuals": [float(x) for x in res],
        "z_out_sc_abs": float(zout_sc),
        "warnings": list(cond.warnings),
    }


def synthesize(
    spec: DesignSpec,
    l_ts: float | str = "auto",
    do_refine: bool = True,
    tol: float = 1e-6,
    max_iterations: int = 200,
) -> SynthesizedNetwork:
    """Full pipeline: transformer sizing, resonator sizing, refinement."""
    pd = primary_design(spec)
    if l_ts == "auto":
        l_ts_val = auto_lts(pd["l_s"], spec)
    else:
        l_ts_val = float(l_ts)
    res, _ = resonator_synthesis(pd["l_s"], spec, l_ts_val)
    t = TransformerSpec(
        l_primary=pd["l_p"],
        l_secondary=pd["l_s"],
        coupling=spec.k_m,
        q_xfmr=spec.q_xfmr,
    )
    net = SynthesizedNetwork(spec=spec, transformer=t, resonator=res)
    net = replace(net, diagnostics=_diagnostics(net))
    if do_refine:
        net = refine(net, tol=tol, max_iterations=max_iterations)
    return net


def conditions(net: SynthesizedNetwork) -> ConditionReport:
    return check_conditions(net.resonator, net.spec)


# ---------------------------------------------------------------------------
# Netlist and JSON emission.


def to_netlist(
    net: SynthesizedNetwork,
    grid: tuple[int, float, float] = (2501, 20e9, 45e9),
    title: str = "dual-band transformer matching network",
) -> Netlist:
    """Flat netlist of the synthesized network for oracle verification.

    Nodes: in (primary), pm (primary mid), out (secondary load), sm
    (center tap), rt (resonator internal).  Winding halves are separate
    coupled inductors so the mutual model matches the analytic one.
    """
    spec = net.spec
    t = net.transformer
    r = net.resonator
    lp1, lp2, ls1, ls2 = t.halves
    q = t.q_xfmr if math.isfinite(t.q_xfmr) else None
    qt = r.q_t if math.isfinite(r.q_t) else None
    stmts = [
        Element("Cp", "C", ("in", "0"), spec.c_par_primary),
        Element("Lp1", "L", ("in", "pm"), lp1, q),
        Element("Lp2", "L", ("pm", "0"), lp2, q),
        Element("Ls1", "L", ("out", "sm"), ls1, q),
        Element("Ls2", "L", ("sm", "0"), ls2, q),
    ]
    if t.coupling_mode == "mirror":
        stmts += [
            Coupling("K1", "Lp1", "Ls1", t.coupling),
            Coupling("K2", "Lp2", "Ls2", t.coupling),
        ]
    else:
        quarter = t.mutual / 4.0
        pairs = [("Lp1", lp1), ("Lp2", lp2)]
        secs = [("Ls1", ls1), ("Ls2", ls2)]
        idx = 1
        for pname, pl in pairs:
            for sname, sl in secs:
                stmts.append(
                    Coupling(f"K{idx}", pname, sname, quarter / math.sqrt(pl * sl))
                )
                idx += 1
    stmts += [
        Element("Cts1", "C", ("sm", "rt"), r.c_ts1),
        Element("Lts", "L", ("rt", "0"), r.l_ts, qt),
        Element("Cts", "C", ("rt", "0"), r.c_ts),
        Element("Cs", "C", ("out", "0"), spec.c_par_secondary),
        Port(1, ("in", "0"), spec.r_opt),
        Port(2, ("out", "0"), spec.r_load),
    ]
    count, start, stop = grid
    return Netlist(title=title, statements=stmts, ac=AcSweep(int(count), start, stop))


def _enc(x):
    if x is None:
        return None
    if math.isinf(x):
        return None
    return x


def _dec(x, default=math.inf):
    return default if x is None else x


def design_to_json(net: SynthesizedNetwork) -> str:
    """Deterministic JSON document for a synthesized network."""
    spec = net.spec
    doc = {
        "spec": {
            "f_low": spec.f_low,
            "f_high": spec.f_high,
            "f_sc": spec.f_sc,
            "r_opt": spec.r_opt,
            "r_load": spec.r_load,
            "c_par_primary": spec.c_par_primary,
            "c_par_secondary": spec.c_par_secondary,
            "k_m": spec.k_m,
            "q_xfmr": _enc(spec.q_xfmr),
            "q_t": _enc(spec.q_t),
        },
        "transformer": {
            "l_primary": net.transformer.l_primary,
            "l_secondary": net.transformer.l_secondary,
            "coupling": net.transformer.coupling,
            "q_xfmr": _enc(net.transformer.q_xfmr),
            "primary_split": net.transformer.primary_split,
            "secondary_split": net.transformer.secondary_split,
            "coupling_mode": net.transformer.coupling_mode,
        },
        "resonator": {
            "topology": net.resonator.topology,
            "l_ts": net.resonator.l_ts,
            "c_ts": net.resonator.c_ts,
            "c_ts1": net.resonator.c_ts1,
            "q_t": _enc(net.resonator.q_t),
        },
        "diagnostics": net.diagnostics,
        "refinement": None
        if net.refinement is None
        else {
            "converged": net.refinement.converged,
            "iterations": net.refinement.iterations,
            "residual_norm": net.refinement.residual_norm,
            "initial_norm": net.refinement.initial_norm,
            "residuals": list(net.refinement.residuals),
            "message": net.refinement.message,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def design_from_json(text: str) -> SynthesizedNetwork:
    doc = json.loads(text)
    s = doc["spec"]
    spec = DesignSpec(
        f_low=s["f_low"],
        f_high=s["f_high"],
        f_sc=s.get("f_sc"),
        r_opt=s["r_opt"],
        r_load=s["r_load"],
        c_par_primary=s["c_par_primary"],
        c_par_secondary=s["c_par_secondary"],
        k_m=s.get("k_m", 1.0),
        q_xfmr=_dec(s.get("q_xfmr")),
        q_t=_dec(s.get("q_t")),
    )
    t = doc["transformer"]
    transformer = TransformerSpec(
        l_primary=t["l_primary"],
        l_secondary=t["l_secondary"],
        coupling=t["coupling"],
        q_xfmr=_dec(t.get("q_xfmr")),
        primary_split=t.get("primary_split", 0.5),
        secondary_split=t.get("secondary_split", 0.5),
        coupling_mode=t.get("coupling_mode", "mirror"),
    )
    r = doc["resonator"]
    resonator = ResonatorSpec(
        topology=r.get("topology", "III"),
        l_ts=r["l_ts"],
        c_ts=r["c_ts"],
        c_ts1=r["c_ts1"],
        q_t=_dec(r.get("q_t")),
    )
    ref = doc.get("refinement")
    refinement = None
    if ref is not None:
        refinement = RefinementResult(
            converged=ref["converged"],
            iterations=ref["iterations"],
            residual_norm=ref["residual_norm"],
            initial_norm=ref.get("initial_norm", ref["residual_norm"]),
            residuals=tuple(ref.get("residuals", ())),
            message=ref.get("message", ""),
        )
    return SynthesizedNetwork(
        spec=spec,
        transformer=transformer,
        resonator=resonator,
        diagnostics=doc.get("diagnostics", {}),
        refinement=refinement,
    )
