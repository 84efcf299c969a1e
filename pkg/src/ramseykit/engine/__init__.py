"""Colouring search, pigeonhole checks, witness construction and the walks analysis."""

from .search import Certificate, Coloring, Kind, SearchBudget, Strategy, find_bad_coloring
from .pigeonhole import Oracles, check_lph, check_ph
from .statements import Statement, min_threshold
from .walks import analyze_walk6, verify_T74, walks_color
from .witness import compose_witness_T31, compose_witness_T42, extract_localized, extract_stabilizer

__all__ = [
    "Certificate",
    "Coloring",
    "Kind",
    "Oracles",
    "SearchBudget",
    "Statement",
    "Strategy",
    "analyze_walk6",
    "check_lph",
    "check_ph",
    "compose_witness_T31",
    "compose_witness_T42",
    "extract_localized",
    "extract_stabilizer",
    "find_bad_coloring",
    "min_threshold",
    "verify_T74",
    "walks_color",
]
