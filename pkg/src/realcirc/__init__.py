"""First-order logic over metafinite structures and constant-depth arithmetic circuits.

Sentences compile to arithmetic circuits and leveled circuits turn back
into sentences; an exact model checker is the reference semantics.
"""

from .circuit import (
    Circuit, Gate, GateType, depth, evaluate, evaluate_gates, figure1, format_circuit, induced_subcircuit,
    is_leveled, is_tree_like, parse_circuit, size, to_dot, tree_shape_size, validate,
)
from .compiler import GateRecord, compile, compile_numbered, desugar, gate_oracle, query_circuit, tss_of
from .errors import *  # noqa: F401,F403
from .logic import Signature, print_formula, print_term
from .normalize import eliminate_aux_gates, level_paths, lower_gate, make_tree_like, normalize
from .parser import parse_formula, parse_signature, parse_term
from .reverse import FamilyDescriptor, build_sentence, build_val_terms, descriptor_from_circuit
from .rewrite import AuxDef, absorb_sums, build_aux_interpretation, eliminate_max
from .semantics import eval_index_term, eval_number_term, satisfies
from .structure import (
    ArbInterpretation, RStructure, decode, encode, encoded_length, format_structure, parse_structure,
    random_structure, recover_universe_size,
)

__version__ = "0.1.0"
