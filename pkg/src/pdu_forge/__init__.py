"""Simulation and design tools for cascaded photon-number doubling units (PDUs).

Modules
-------
fock      sparse multimode Fock states
optics    beam splitter, phase, crosser and PDU actions
circuit   netlists, simulator, Fock/GHZ/cluster builders, text format
analysis  dual-rail readout, targets, fidelity
device    microring and waveguide design formulas, sweeps, config files
cli       ``pdu-forge`` command-line front end
"""

from .analysis import (
    LogicalState,
    QubitEncoding,
    extract_logical,
    fidelity,
    photon_number_distribution,
    target_cluster4,
    target_ghz,
)
from .circuit import (
    CALIBRATED_CLUSTER4_PHASES,
    PUBLISHED_CLUSTER4_PHASES,
    BeamSplitter,
    Crosser,
    Netlist,
    Pdu,
    Phase,
    SimulationReport,
    Source,
    build_cluster4,
    build_fock_chain,
    build_ghz,
    calibrate_cluster4,
    format_netlist,
    parse_netlist,
    simulate,
    validate,
)
from .fock import Band, ModeDescriptor, StateVector, create_photon, inner_product, norm, vacuum
from .optics import BeamSplitterSpec, PduParams, apply_beamsplitter, apply_crosser, apply_pdu, apply_phase

__version__ = "0.1.0"
