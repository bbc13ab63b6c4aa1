from .dot import export_dot
from .io import (model_digest, parse_lab, parse_model, parse_tra, read_model, serialize_lab,
                 serialize_tra, write_model)
from .mdp import MDP, StateActionIndex, isomorphic
from .reach import reachability_probabilities

__all__ = [
    "MDP", "StateActionIndex", "isomorphic", "parse_model", "parse_tra", "parse_lab",
    "read_model", "write_model", "serialize_tra", "serialize_lab", "model_digest",
    "reachability_probabilities", "export_dot",
]
