from .boolean import (BooleanCausalModel, bool_evaluate, dnf_str, parse_formula,
                      parse_truth_table, qm_minimize, surgery_model)
from .chain import (AdverbDistribution, ChainGraph, chain_probability, fuse_adverbs,
                    sample_link)
from .fcm import FuzzyCognitiveMap, fcm_run, fcm_step
from .neuron import INHIB, STIM, NeuronDiagram, neuron_evaluate
