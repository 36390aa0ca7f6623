"""Petri-net toolkit for causal puzzles: timed, stochastic and fuzzy nets,
plus the comparison formalisms (neuron diagrams, Boolean models, causal
chains, fuzzy cognitive maps)."""

from .analysis import detect_deadlocks, is_k_bounded, reachability_graph, trace_stats
from .dsl import Document, DslError, export_dot, parse, parse_file, serialize
from .fuzzy import (LEXICON, FuzzyLabel, TNorm, alpha_cut, defuzzify_centroid,
                    fuzzy_event_probability, membership, tconorm, tnorm)
from .net import (Marking, NetDef, NotEnabledError, classify_transition, enabled_transitions,
                  fire, validate)
from .sim import (SimState, SimTrace, resolve_conflict, resolve_fuzzy_gate, run,
                  sample_delay, step)
from .timing_spec import TimingSpec

__version__ = "0.1.0"
