import json
import math
from dataclasses import replace

import numpy as np
import pytest

from dbmatch import netlist as nl
from dbmatch import synthesis as sy


def test_turn_ratio():
    assert sy.turn_ratio(50.0, 50.0) == 1.0
    assert sy.turn_ratio(100.0, 25.0) == 2.0
    assert sy.turn_ratio(50.0, 200.0) == 0.5
    with pytest.raises(sy.SynthesisError):
        sy.turn_ratio(-1.0, 50.0)


def test_short_circuit_frequency():
    f = sy.short_circuit_frequency(28e9, 38e9)
    assert f == pytest.approx(32.619e9, rel=1e-4)
    assert f**2 == pytest.approx(28e9 * 38e9, rel=1e-15)
    assert sy.short_circuit_frequency(10e9, 40e9) == pytest.approx(20e9)
    assert sy.short_circuit_frequency(5e9, 5e9 * 9) == pytest.approx(15e9)
    with pytest.raises(sy.SynthesisError):
        sy.short_circuit_frequency(38e9, 28e9)


def test_design_spec_validation():
    with pytest.raises(sy.SynthesisError):
        sy.DesignSpec(38e9, 28e9, 50, 50, 1e-13, 1e-13)
    with pytest.raises(sy.SynthesisError):
        sy.DesignSpec(28e9, 28e9, 50, 50, 1e-13, 1e-13)
    with pytest.raises(sy.SynthesisError):
        sy.DesignSpec(28e9, 38e9, 50, 50, 1e-13, 1e-13, f_sc=50e9)
    with pytest.raises(sy.SynthesisError):
        sy.DesignSpec(28e9, 38e9, 50, 50, 1e-13, 1e-13, k_m=1.5)
    spec = sy.DesignSpec(28e9, 38e9, 50, 50, 1e-13, 1e-13)
    assert spec.f_sc == pytest.approx(math.sqrt(28e9 * 38e9))


def test_primary_design_worked(worked_spec):
    pd = sy.primary_design(worked_spec)
    assert pd["n"] == 1.0
    assert pd["c_in"] == pytest.approx(300e-15, rel=1e-12)
    assert pd["l_p"] == pytest.approx(107.7e-12, rel=1e-3)
    assert pd["l_s"] == pd["l_p"]
    # resonance: w_L^2 L_p C_in = 1
    assert worked_spec.w_low**2 * pd["l_p"] * pd["c_in"] == pytest.approx(1.0, rel=1e-12)


def test_primary_design_scaling(worked_spec):
    doubled = replace(worked_spec, c_par_primary=300e-15, c_par_secondary=300e-15)
    assert sy.primary_design(doubled)["l_p"] == pytest.approx(
        sy.primary_design(worked_spec)["l_p"] / 2.0, rel=1e-12
    )


def test_primary_design_turns():
    spec = sy.DesignSpec(28e9, 38e9, 100.0, 25.0, 150e-15, 150e-15)
    pd = sy.primary_design(spec)
    assert pd["n"] == 2.0
    assert pd["c_in"] == pytest.approx(150e-15 + 150e-15 / 4.0, rel=1e-12)
    assert pd["l_s"] == pytest.approx(pd["l_p"] / 4.0, rel=1e-12)


def test_primary_design_no_capacitance():
    spec = sy.DesignSpec(28e9, 38e9, 50.0, 50.0, 0.0, 0.0)
    with pytest.raises(sy.SynthesisError, match="no resonating capacitance"):
        sy.primary_design(spec)


def test_resonator_synthesis_worked(worked_spec):
    pd = sy.primary_design(worked_spec)
    res, extras = sy.resonator_synthesis(pd["l_s"], worked_spec, 8e-12)
    assert res.c_ts == pytest.approx(4.039e-12, rel=1e-3)
    assert extras["c_sc"] == pytest.approx(0.884e-12, rel=1e-3)
    assert res.c_ts1 == pytest.approx(5.263e-12, rel=1e-3)
    assert extras["delta"] == pytest.approx(0.061, rel=0.01)
    assert extras["alpha"] == pytest.approx(2.1879, rel=1e-4)


def test_resonator_synthesis_infeasible(worked_spec):
    pd = sy.primary_design(worked_spec)
    with pytest.raises(sy.SynthesisError) as err:
        sy.resonator_synthesis(pd["l_s"], worked_spec, 30e-12)
    msg = str(err.value)
    assert "infeasible L_ts" in msg
    assert "C_ts >" in msg  # names the bound


def test_forward_delta_design(worked_spec):
    pd = sy.primary_design(worked_spec)
    res, extras = sy.resonator_synthesis(pd["l_s"], worked_spec, 8e-12)
    c_ts1 = sy.forward_delta_design(res.c_ts, worked_spec, extras["delta"])
    assert c_ts1 == pytest.approx(res.c_ts1, rel=1e-9)
    # boundary: delta at the floor diverges
    alpha = extras["alpha"]
    delta_min = alpha / (worked_spec.w_high * res.c_ts * worked_spec.r_load)
    with pytest.raises(sy.SynthesisError, match="feasibility bound"):
        sy.forward_delta_design(res.c_ts, worked_spec, delta_min)
    # 2x the floor back-substitutes exactly
    from dbmatch.resonator import ResonatorSpec, resonator_impedance

    c1 = sy.forward_delta_design(res.c_ts, worked_spec, 2 * delta_min)
    z = resonator_impedance(
        ResonatorSpec("III", res.l_ts, res.c_ts, c1), worked_spec.w_high
    )
    assert abs(z) == pytest.approx(2 * delta_min * worked_spec.r_load, rel=1e-9)


def test_auto_lts_margin(worked_spec):
    pd = sy.primary_design(worked_spec)
    l_ts = sy.auto_lts(pd["l_s"], worked_spec)
    c_ts = 1.0 / (worked_spec.w_low**2 * l_ts)
    _, c_ts_min = sy.required_cts(pd["l_s"], worked_spec)
    assert c_ts == pytest.approx(1.2 * c_ts_min, rel=1e-12)
    sy.resonator_synthesis(pd["l_s"], worked_spec, l_ts)  # feasible


def test_synthesize_invariants_prerefine(worked_net_unrefined):
    net = worked_net_unrefined
    spec = net.spec
    d = net.diagnostics
    assert d["r_in"] == pytest.approx(spec.r_opt, rel=1e-9)
    assert d["c_in"] == spec.c_par_primary + spec.c_par_secondary / d["n"] ** 2
    assert spec.w_low**2 * net.transformer.l_primary * d["c_in"] == pytest.approx(
        1.0, rel=1e-9
    )
    # lossless sigma = 0.5, K_m = 1: exact output null at w_SC before refinement
    assert d["z_out_sc_abs"] < 1e-3 * spec.r_load
    # delta diagnostic equals recomputed |Z_T(jw_H)|/R_L
    from dbmatch.resonator import ResonatorSpec, resonator_impedance

    zt = resonator_impedance(
        ResonatorSpec("III", net.resonator.l_ts, net.resonator.c_ts, net.resonator.c_ts1),
        spec.w_high,
    )
    assert d["delta"] == pytest.approx(abs(zt) / spec.r_load, rel=1e-9)


def test_refinement_converges(worked_net):
    r = worked_net.refinement
    assert r is not None
    assert r.converged
    assert r.residual_norm < 1e-6
    assert r.residual_norm <= r.initial_norm


def test_refinement_fixed_point(worked_net):
    again = sy.refine(worked_net)
    assert again.refinement.residual_norm < 1e-6
    assert again.transformer.l_primary == pytest.approx(
        worked_net.transformer.l_primary, rel=1e-6
    )


def test_refinement_split_sensitivity(worked_spec):
    # different winding splits give different high-band residuals
    base = sy.synthesize(worked_spec, do_refine=False)
    r_half = sy.match_residuals(base)
    skewed = replace(
        base,
        transformer=replace(base.transformer, primary_split=0.4, secondary_split=0.4),
    )
    r_skew = sy.match_residuals(skewed)
    assert abs(r_half[2] - r_skew[2]) > 1e-6


def test_scaling_invariance(worked_spec):
    s = 2.0
    scaled_spec = sy.DesignSpec(
        worked_spec.f_low * s,
        worked_spec.f_high * s,
        worked_spec.r_opt,
        worked_spec.r_load,
        worked_spec.c_par_primary / s,
        worked_spec.c_par_secondary / s,
    )
    a = sy.synthesize(worked_spec)
    b = sy.synthesize(scaled_spec)
    assert b.transformer.l_primary == pytest.approx(
        a.transformer.l_primary / s, rel=1e-9
    )
    assert b.resonator.l_ts == pytest.approx(a.resonator.l_ts / s, rel=1e-9)
    assert b.resonator.c_ts1 == pytest.approx(a.resonator.c_ts1 / s, rel=1e-9)
    # the split is the flattest direction of the refinement objective;
    # rounding differences between the two runs surface there first
    assert b.transformer.primary_split == pytest.approx(
        a.transformer.primary_split, rel=1e-6
    )


def test_lossy_refinement_best_iterate():
    spec = sy.DesignSpec(
        28e9, 38e9, 50.0, 50.0, 150e-15, 150e-15, k_m=0.8, q_xfmr=25.0, q_t=30.0
    )
    net = sy.synthesize(spec)
    r = net.refinement
    # loss bounds the output-null residual away from zero; the best
    # iterate is still an improvement and flagged honestly
    assert r.residual_norm <= r.initial_norm
    if not r.converged:
        assert r.message


def test_input_impedance_at_bands(worked_net):
    spec = worked_net.spec
    zin = sy.input_impedance(worked_net, np.array([spec.w_low, spec.w_high]))
    assert zin[0] == pytest.approx(spec.r_opt, rel=1e-6)
    assert zin[1] == pytest.approx(spec.r_opt, rel=1e-6)


def test_frequency_response_gain(worked_net, default_grid):
    resp = sy.frequency_response(worked_net, default_grid)
    gt = resp.gt_db()
    i28 = resp.index_of(28e9)
    i38 = resp.index_of(38e9)
    assert gt[i28] > -0.001
    assert gt[i38] > -0.001
    assert gt.max() < 1e-9  # passive


def test_to_netlist_round_trip(worked_net):
    net = sy.to_netlist(worked_net)
    text = nl.serialize(net)
    back = nl.parse(text)
    vals = {e.name: e.value for e in back.elements}
    lp = worked_net.transformer.l_primary
    sigma = worked_net.transformer.primary_split
    assert vals["Lp1"] == pytest.approx(sigma * lp, rel=1e-11)
    assert vals["Lp2"] == pytest.approx((1 - sigma) * lp, rel=1e-11)
    assert vals["Cts"] == pytest.approx(worked_net.resonator.c_ts, rel=1e-11)
    assert back.ports[0].ref == worked_net.spec.r_opt
    assert back.ac.count == 2501


def test_json_round_trip(worked_net):
    text = sy.design_to_json(worked_net)
    back = sy.design_from_json(text)
    assert back.transformer == worked_net.transformer
    assert back.resonator == worked_net.resonator
    assert back.spec == worked_net.spec
    assert back.refinement == worked_net.refinement
    # deterministic emission
    assert sy.design_to_json(back) == text
    json.loads(text)  # valid strict JSON (infinities encoded as null)


def test_json_handles_infinite_q(worked_net):
    doc = json.loads(sy.design_to_json(worked_net))
    assert doc["spec"]["q_xfmr"] is None
    back = sy.design_from_json(json.dumps(doc))
    assert math.isinf(back.spec.q_xfmr)
