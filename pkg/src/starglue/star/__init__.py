from starglue.star.moyal import moyal_product, star_bracket, check_associativity
from starglue.star.graphs import (
    AdmissibleGraph,
    enumerate_graphs,
    graph_weight,
    apply_graph_operator,
    kontsevich_constant_product,
)
from starglue.star.battery import run_associativity_battery, random_poly, random_poisson

__all__ = [
    "moyal_product",
    "star_bracket",
    "check_associativity",
    "AdmissibleGraph",
    "enumerate_graphs",
    "graph_weight",
    "apply_graph_operator",
    "kontsevich_constant_product",
    "run_associativity_battery",
    "random_poly",
    "random_poisson",
]
