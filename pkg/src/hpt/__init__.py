"""Homological perturbation over operads with exact rational arithmetic."""

from .exactlin import GradedComplex, GradedMap, Q, compose, identity, tensor_power, homology
from .contraction import (Contraction, NonNilpotent, cancel_pair, compose_contractions,
                          contraction_from_homology, perturb)
from .transfer import (AInfStructure, LInfStructure, TransferJob, encode, decode,
                       minimal_model, verify_structure)

__version__ = "0.1.0"
