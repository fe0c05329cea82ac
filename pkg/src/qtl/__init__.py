"""Quantum teleportation laboratory.

Simulates one- and two-channel teleportation protocols built on
generalized Bell and GHZ measurements for n-dimensional systems, and
computes optimal teleportation fidelities by maximizing entangled-fraction
objectives over the unitary group.

The layers, bottom up: operator bases and structured states (``bases``),
density-matrix plumbing (``states``), randomness (``sampling``), protocol
channels (``channels``), objective forms and the manifold optimizer
(``forms``, ``optimizer``), the fraction metrics and experiments
(``fef``), plus serialization, self-verification and a command line
(``serialization``, ``verify``, ``cli``).
"""

from .states import DensityMatrix, PureState, ValidationError, as_matrix
from .bases import (bell_basis, bell_state, clock, ghz_isometry, ghz_state,
                    ghz_unitary, max_entangled, max_entangled_projector,
                    schur_twirl, shift, weyl_coefficients, weyl_expand,
                    weyl_unitary)
from .sampling import (generator, ginibre, haar_unitary, random_density,
                       random_pure)
from .optimizer import (OptimizerConfig, OptimizerResult, UnitaryObjective,
                        ascend_from, gradient_check, maximize)
from .forms import QuadForm, TraceSquareForm
from .channels import (ChannelSpec, CorrectionFamily, ONE_CHANNEL_BELL,
                       TWO_CHANNEL_BELL, TWO_CHANNEL_GHZ, apply_channel,
                       apply_channel_oracle, average_fidelity_exact,
                       average_fidelity_mc, channel_objective,
                       channel_superoperator, fidelity_closed_form)
from .fef import (ConvexityReport, ExperimentRecord, FefReport,
                  convexity_probe, df_experiment, df_scatter_state,
                  f1_embedding, f1_form, f2_full_value, f2_lower_form,
                  fef_f1, fef_f2_full, fef_f2_ghz, fef_f2_lower,
                  isotropic_f1, isotropic_state, magic_f1, pure_f1,
                  transport_lower_maximizer, usefulness)

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "PureState", "ValidationError", "as_matrix",
    "bell_basis", "bell_state", "clock", "ghz_isometry", "ghz_state",
    "ghz_unitary", "max_entangled", "max_entangled_projector", "schur_twirl",
    "shift", "weyl_coefficients", "weyl_expand", "weyl_unitary",
    "generator", "ginibre", "haar_unitary", "random_density", "random_pure",
    "OptimizerConfig", "OptimizerResult", "UnitaryObjective", "ascend_from",
    "gradient_check", "maximize",
    "QuadForm", "TraceSquareForm",
    "ChannelSpec", "CorrectionFamily", "ONE_CHANNEL_BELL", "TWO_CHANNEL_BELL",
    "TWO_CHANNEL_GHZ", "apply_channel", "apply_channel_oracle",
    "average_fidelity_exact", "average_fidelity_mc", "channel_objective",
    "channel_superoperator", "fidelity_closed_form",
    "ConvexityReport", "ExperimentRecord", "FefReport", "convexity_probe",
    "df_experiment", "df_scatter_state", "f1_embedding", "f1_form",
    "f2_full_value", "f2_lower_form", "fef_f1", "fef_f2_full", "fef_f2_ghz",
    "fef_f2_lower", "isotropic_f1", "isotropic_state", "magic_f1", "pure_f1",
    "transport_lower_maximizer", "usefulness",
]
