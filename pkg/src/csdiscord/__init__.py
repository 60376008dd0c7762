"""Hilbert-Schmidt geometric discord for two-qubit centrosymmetric and X states."""

from .errors import (DegenerateAngles, DiscordError, InvalidState, NoConvergence, NotHermitian,
                     ParseError, SpecError, WrongCase, WrongShape)
from .geodiscord import (MeasurementAxes, OptimizerConfig, closed_form_case1, closed_form_case2,
                         eq5_distance, geometric_measure, hs_distance_sq, maximize_alternating,
                         maximize_grid, micc, objective)
from .states import (BlochForm, CsParams, DensityMatrix, XParams, bloch_compose, bloch_decompose,
                     check_condition6, classify, cs_to_matrix, derive_cs_from_x, derive_x_from_cs,
                     extract_cs_params, extract_x_params, hadamard_conjugate, random_density_matrix,
                     x_to_matrix)

__version__ = "0.1.0"
