"""Exact expectations of class functions under word measures on symmetric groups."""

from .characters import ClassFunction, parse_class_function, stable_inner, stable_irreducible
from .errors import (BudgetExceeded, InvariantViolation, ParseError, ThresholdWarning,
                     WordMeasuresError)
from .graphs import MultiCoreGraph, bouquet, cycle_graph, powers_graph
from .morphisms import GraphMorphism, norm
from .phi import RationalFnOfN
from .wordstats import decide_conjugate, expectation, primitivity
from .words import Word, format_word, parse_word

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "ClassFunction", "GraphMorphism", "InvariantViolation",
    "MultiCoreGraph", "ParseError", "RationalFnOfN", "ThresholdWarning", "Word",
    "WordMeasuresError", "bouquet", "cycle_graph", "decide_conjugate", "expectation",
    "format_word", "norm", "parse_class_function", "parse_word", "powers_graph",
    "primitivity", "stable_inner", "stable_irreducible",
]
