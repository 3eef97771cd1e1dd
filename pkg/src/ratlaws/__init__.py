"""Exact symbol statistics and local limit laws for weighted finite automata."""
from .distribution import (ExactDistribution, characteristic_function, exact_distribution, moments,
                           sample_counts)
from .laws import LawKind, LawRefused, LimitLaw, law_density, law_local_value, predict_law, t_characteristic
from .model import (LinearRepresentation, ModelError, ValidatedModel, dump_model, from_matrices, load_model,
                    parse_model, validate)
from .spectral import PerronTriple, SpectralConstants, dominant_eigenvalue_at, perron_triple, spectral_constants
from .structure import ModelClass, aperiodicity_index, classify, condensation
from .verify import ConvergenceReport, convergence_report, discrepancy, montecarlo_crosscheck

__version__ = "0.1.0"
