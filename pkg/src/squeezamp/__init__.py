"""Spin-oscillator amplification: Gaussian engine, Fock oracle and metrology."""

from .engine import CompositionResult, evolve_protocol, max_phonon
from .metrology import SensitivityReport, report, sweep
from .oracle import OracleConfig, TruncationError, required_dim, run_protocol
from .protocol import (MSP_SIGN_TABLE, ProtocolSpec, SegmentSpec, make_msp, make_protocol,
                       make_single_squeeze, validate_protocol)

__version__ = "0.1.0"
