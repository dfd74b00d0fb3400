"""ARMA/FARIMA linear time series driven by infinitely divisible
(including non-symmetric alpha-stable) innovations: causal coefficients,
the characteristic-function dependence measure I_n, bivariate
finite-dimensional laws, path simulation, and asymptotic rate verification."""

from .coeffs import (AsymDescriptor, CoeffStream, ModelSpec, arma_coeffs,
                     asym_descriptor, binomial_weights, coefficients,
                     farima_coeffs, farima_constant, validate_model)
from .dependence import (DependenceValue, I_empirical, I_id, I_stable,
                         codifference, compute_dependence)
from .errors import (BoundaryRegimeError, EstimationError, LevyArmaError,
                     ModelValidationError, QuadratureError, TruncationError)
from .findist import (RACJointMeasure, SpectralAtoms, joint_cf_from_spectral,
                      rac_joint, stable_spectral)
from .innovations import (IDSpec, RACSpec, StableSpec, gauss_bump_id,
                          id_exponent, innovation_from_dict,
                          innovation_from_json, rac_to_id, sample_stable,
                          stable_exponent, stable_like_id, stable_to_id,
                          tempered_id, validate_innovation)
from .asymptotics import (RateFit, RatePrediction, eval_g1, eval_g2, eval_g3,
                          fit_rate, limit_integral, predict_rate,
                          verify_rates)
from .simulate import PathBatch, load_paths, simulate_paths

__version__ = "0.1.0"
