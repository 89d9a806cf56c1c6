"""Concatenated fermion-to-qubit stabilizer codes in 2D and 3D."""

from .assembler import ConcatenatedCode, LayoutSpec, assemble, stack_3d
from .colorblock import ColorCodeBlock, build_block
from .decoder import NoiseModel, run_montecarlo
from .fqmap import MappingTable, majorana_to_pauli, pauli_to_majorana
from .lattice import Lattice
from .majorana import MajoranaMonomial
from .pauli import PauliOperator
from .verifier import check_code, estimate_distance, sector_generators

__all__ = [
    "ColorCodeBlock",
    "ConcatenatedCode",
    "LayoutSpec",
    "Lattice",
    "MajoranaMonomial",
    "MappingTable",
    "NoiseModel",
    "PauliOperator",
    "assemble",
    "build_block",
    "check_code",
    "estimate_distance",
    "majorana_to_pauli",
    "pauli_to_majorana",
    "run_montecarlo",
    "sector_generators",
    "stack_3d",
]
