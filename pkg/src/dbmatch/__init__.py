"""Dual-band transformer matching network synthesis and verification.

Closed-form design of a center-tapped transformer matching network with
a tap resonator that produces two passbands and an inter-band notch,
plus numerical refinement and two independent analysis engines
(two-port algebra and netlist-driven MNA).
"""

from .elements import Capacitor, LossyInductor, TransformerSpec, centertapped_twoport
from .mna import MnaError, solve_ac, sparams
from .netlist import Netlist, NetlistError, parse, parse_value, render_value, serialize
from .reports import BandMetrics, extract_band_metrics, find_notch, touchstone_text
from .resonator import (
    ConditionReport,
    PoleZeroReport,
    ResonatorSpec,
    check_conditions,
    poles_zeros,
    resonator_impedance,
)
from .response import FrequencyResponse
from .synthesis import (
    DesignSpec,
    SynthesisError,
    SynthesizedNetwork,
    design_from_json,
    design_to_json,
    frequency_response,
    primary_design,
    refine,
    resonator_synthesis,
    short_circuit_frequency,
    synthesize,
    to_netlist,
    turn_ratio,
)
from .twoport import TwoPortError, TwoPortS, TwoPortZ, s_to_z, transducer_gain, z_to_s

__version__ = "0.1.0"

__all__ = [
    "BandMetrics",
    "Capacitor",
    "ConditionReport",
    "DesignSpec",
    "FrequencyResponse",
    "LossyInductor",
    "MnaError",
    "Netlist",
    "NetlistError",
    "PoleZeroReport",
    "ResonatorSpec",
    "SynthesisError",
    "SynthesizedNetwork",
    "TransformerSpec",
    "TwoPortError",
    "TwoPortS",
    "TwoPortZ",
    "centertapped_twoport",
    "check_conditions",
    "design_from_json",
    "design_to_json",
    "extract_band_metrics",
    "find_notch",
    "frequency_response",
    "parse",
    "parse_value",
    "poles_zeros",
    "primary_design",
    "refine",
    "render_value",
    "resonator_impedance",
    "resonator_synthesis",
    "s_to_z",
    "serialize",
    "short_circuit_frequency",
    "solve_ac",
    "sparams",
    "synthesize",
    "to_netlist",
    "touchstone_text",
    "transducer_gain",
    "turn_ratio",
    "z_to_s",
]
