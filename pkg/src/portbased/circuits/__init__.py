from .core import BOT, Circuit, Gate, Register, depth, fit_exponent, gate_counts, invert
from .counts import gate_count_report, report_csv
from .simulator import SimResult, Simulator
from .synth import (
    ENCODINGS,
    prep_path_amplitudes,
    synth_cyclic_std,
    synth_cyclic_yamanouchi,
    synth_measurement,
    synth_resource_prep,
    synth_transposition_std,
    synth_W,
    synth_yamanouchi_transposition,
)

__all__ = [
    "BOT", "Circuit", "ENCODINGS", "Gate", "Register", "SimResult", "Simulator", "depth", "fit_exponent",
    "gate_count_report", "gate_counts", "invert", "prep_path_amplitudes", "report_csv", "synth_W",
    "synth_cyclic_std", "synth_cyclic_yamanouchi", "synth_measurement", "synth_resource_prep",
    "synth_transposition_std", "synth_yamanouchi_transposition",
]
