"""Open-quantum-system dynamics in the holomorphic representation.

States are truncated polynomials in the phase-space variables z_i,
operators are words in multiplication/differentiation generators, and the
GKS-L machinery on top of them solves the noise-driven absorption
refrigerator both in closed form and from the truncated Liouvillian.
"""

from .holo import (HoloState, apply_annihilate, apply_create, cat_closed_form,
                   cat_state, coherent_state, evaluate, inner_product, kernel,
                   kernel_state, monomial_state)
from .grassmann import (GrassmannElement, MixedState, berezin_integrate,
                        fermi_number, g_derivative, g_multiply, mixed_inner)
from .operators import (Algebra, DegeneracyError, Generator, MatrixRep,
                        OperatorExpr, RefrigeratorHamiltonianParams,
                        ResonanceWarning, adjoint, anticommutator, apply,
                        build_h0, build_jc, build_refrigerator_h, commutator,
                        first_order_state, jc_dressed_state, matrix_of,
                        perturbation_matrix_element, su2_generators)
from .lindblad import (DegenerateSteadyStateError, DensityMatrix,
                       DimensionCapError, IntegrationError, LiouvillianMatrix,
                       NoiseSpec, RefrigeratorParams, SteadyStateReport,
                       ThermalBathSpec, TruncationWarning,
                       adjoint_generator_apply, analytic_report, bose_einstein,
                       dissipator_apply, entropy_production, evolve,
                       heat_current, law_check, liouvillian_matrix,
                       noise_dissipator_apply, noise_power, numeric_report,
                       relative_entropy, steady_state, thermal_dissipator_apply)
from .transform import (SampledWavefunction, hermite_wavefunction, husimi_q,
                        segal_bargmann, to_holo_state)
from .bench import BenchReport, run_bench

__version__ = "0.1.0"
