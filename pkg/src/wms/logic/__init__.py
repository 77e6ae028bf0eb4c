from .automorphism import apply, automorphisms, find_automorphism, orbit, same_type_over, tuple_orbits
from .definable import (
    DefinableSet,
    InstanceTable,
    PartitionedFormula,
    all_tuples,
    delta_atoms,
    delta_partition,
    evaluate,
    extension_equal,
)
from .parser import parse_formula
from .structure import (
    FiniteStructure,
    RelationSymbol,
    Signature,
    complete_graph,
    graph,
    linear_order,
    load_structure,
    path_graph,
)
from .syntax import free_variables

__all__ = [
    "DefinableSet",
    "FiniteStructure",
    "InstanceTable",
    "PartitionedFormula",
    "RelationSymbol",
    "Signature",
    "all_tuples",
    "apply",
    "automorphisms",
    "complete_graph",
    "delta_atoms",
    "delta_partition",
    "evaluate",
    "extension_equal",
    "find_automorphism",
    "free_variables",
    "graph",
    "linear_order",
    "load_structure",
    "orbit",
    "parse_formula",
    "path_graph",
    "same_type_over",
    "tuple_orbits",
]
