"""Logistic-wavelet decomposition of time series into solitary waves."""
__version__ = "0.1.0"

from .cwt import Scalogram, ScalogramExtremum, cwt_point, find_extrema, scalogram, ysat_from_cwt
from .decomposition import (ConvergenceWarning, DecompositionConfig, decompose, detect_waves,
                            refine_parameters, subtract_wave)
from .info import (DiscreteDistribution, SynergyVectors, configurational_information_3,
                   mutual_information_2, mutual_redundancy, redundancy_fraction,
                   shannon_entropy, synergy_balance)
from .kdv import GridFunction, KdvParams, generalized_residual, kdv_residual, soliton
from .model import (LogisticWave, MultilogisticModel, eval_multilogistic,
                    eval_multilogistic_derivative)
from .timeseries import FitReport, TimeSeries, cumulative, first_difference, fit_metrics, ingest_csv
from .trend import WaveChain, amplitude, auto_group, extrapolate_next, fit_chain
from .wavelet import WaveletParams, admissibility_check, l2_norm_squared, psi2, psi2_child

__all__ = [name for name in dir() if not name.startswith("_")]
