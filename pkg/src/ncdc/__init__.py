"""Exact engine for differential calculi on Lie-algebra-type
noncommutative spaces.

Coordinates and one-forms with bracket structure constants are realized
as truncated formal power series in a Weyl superalgebra, and every
claimed identity is replayed coefficient-by-coefficient over exact
Gaussian rationals.
"""

from .errors import (DimensionMismatch, FormatError, NcdcError, OrderError,
                     ParityError, PreconditionError, StructureError)
from .scalars import (GR_I, GR_ONE, GR_ZERO, GaussianRational, format_value,
                      gaussian, parse_value)
from .structure import (MergedTable, StructureReport, SuperStructure,
                        adjoint_representation, build_from_representation,
                        build_kappa, check_calculus_condition, merge_table,
                        read_structure, validate_structure, write_structure)
from .weyl import (INF, WeylAlgebra, WeylElement, normal_product,
                   partial_wrt_momentum, super_commutator, truncate,
                   vacuum_project)
from .pbw import (EnvelopingAlgebra, PBWElement, ShiftIndex, parse_expression,
                  render)
from .matseries import (BernoulliTable, MatrixSeries, MomentumPolynomial,
                        bernoulli_psi_coeffs, build_momentum_matrix,
                        build_super_tilde, check_momentum_identity, exp_coeffs,
                        exp_flow_check, flow_coeffs, matrix_function,
                        matrix_inverse_series, solve_lambda)
from .realize import (ConjectureReport, DerivativeOperator, Realization,
                      check_d_properties, conjecture_test, exterior_derivative,
                      h_tensor, kappa_closed_forms, shift_realization,
                      similarity_transform, verify_realization,
                      weyl_linear_realization, write_realization)

__version__ = "0.1.0"
