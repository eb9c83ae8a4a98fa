"""Hierarchical variable-length motif discovery for long time series."""

from hime.series import Region, TimeSeries, build_series, euclidean, motif_distance, znormalize
from hime.sax import PaaVector, SaxWord, breakpoints, fast_sax, mindist, paa, to_sax
from hime.graph import InductionGraph, build_graph, numerosity_reduce
from hime.enumeration import HimeConfig, Motif, discover, find_motifs, post_process, retrieve_instances
from hime.tuning import select_alphabet

__version__ = "0.1.0"

__all__ = [
    "Region",
    "TimeSeries",
    "build_series",
    "euclidean",
    "motif_distance",
    "znormalize",
    "PaaVector",
    "SaxWord",
    "breakpoints",
    "fast_sax",
    "mindist",
    "paa",
    "to_sax",
    "InductionGraph",
    "build_graph",
    "numerosity_reduce",
    "HimeConfig",
    "Motif",
    "discover",
    "find_motifs",
    "post_process",
    "retrieve_instances",
    "select_alphabet",
]
