"""Compact routing schemes in the fixed-port model, with an exact oracle."""
from .graph import (
    DistanceField, Graph, GraphError, generate_graph, load_graph, normalized_diameter,
    parse_graph, save_graph, shortest_path_subgraph, shortest_paths_from,
)
from .oracle import ShortestPaths, Vicinity, VicinityIndex, vicinity
from .schemes import SCHEMES, SchemeError, SchemeInstance, SchemeParams, build_scheme, stretch_bound
from .simulator import RouteTrace, SizeReport, deliver, measure

__version__ = "0.1.0"

__all__ = [
    "DistanceField", "Graph", "GraphError", "RouteTrace", "SCHEMES", "SchemeError", "SchemeInstance",
    "SchemeParams", "ShortestPaths", "SizeReport", "Vicinity", "VicinityIndex", "build_scheme",
    "deliver", "generate_graph", "load_graph", "measure", "normalized_diameter", "parse_graph",
    "save_graph", "shortest_path_subgraph", "shortest_paths_from", "stretch_bound", "vicinity",
]
