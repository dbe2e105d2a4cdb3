"""Python bindings for the mirrorsim circuit simulator."""

from ._mirrorsim import (
    AnalysisError,
    Circuit,
    ConvergenceError,
    FourierReport,
    NetlistError,
    PowerReport,
    Trace,
    compare,
    dc_sweep,
    fourier,
    load_circuit,
    op_power,
    operating_point,
    parse_value,
    power,
    run,
    transient,
)


def load_file(path):
    """Read a netlist file and elaborate it."""
    with open(path, encoding="utf-8") as f:
        return load_circuit(f.read())


__all__ = [
    "AnalysisError",
    "Circuit",
    "ConvergenceError",
    "FourierReport",
    "NetlistError",
    "PowerReport",
    "Trace",
    "compare",
    "dc_sweep",
    "fourier",
    "load_circuit",
    "load_file",
    "op_power",
    "operating_point",
    "parse_value",
    "power",
    "run",
    "transient",
]
