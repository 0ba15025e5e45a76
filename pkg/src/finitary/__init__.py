"""Finitary substitutes of observation tables, their incidence algebras and
the Rota topology on the primitive spectrum."""

from finitary.algebra import (
    AlgebraBasis,
    AlgebraElement,
    BasisIdeal,
    RotaReport,
    chain_count,
    ideal_intersect,
    ideal_product,
    multiply,
    parse_element,
    primitive_spectrum,
    rota_relation,
    rota_relation_fast,
    verify_theorem,
)
from finitary.core import (
    FinitaryPoset,
    FiniteTopology,
    ObservationTable,
    Preorder,
    RegistrationSets,
    alexandrov_topology,
    finitary_substitute,
    limits,
    overlap_matrix,
    quasiorder_from_table,
    quotient_poset,
    registration_sets,
    topology_from_relation,
)
from finitary.oracle import ideal_product_oracle

__version__ = "0.1.0"
