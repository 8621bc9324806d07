"""Symmetrized determinants over finite-dimensional algebras and permanent estimators."""
from .algebra import (AlgebraError, AlgebraMatrix, AlgebraSpec, builtin_algebra, check_associativity, load_algebra,
                      make_algebra, matrix_algebra, multiply, norm_sq)
from .estimators import (EstimatorSample, SampleBatch, c_constant_estimate, cdet_estimate, concentration_constant,
                         gg_estimate, pooled, sdet_estimate, study_determinant)
from .harness import ExperimentConfig, SweepConfig, generate_matrix, run_experiment, sweep, write_report
from .kernels import BACKEND
from .multilinear import (SizeGuardError, determinant, mixed_discriminant, mixed_discriminant_bruteforce,
                          permanent_naive, permanent_ryser)
from .sdet import cdet_bruteforce, sdet, sdet_bruteforce, u_table

__version__ = "0.1.0"
