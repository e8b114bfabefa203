"""torsionlab: numerically verify the tensor identities of tetrad gravity with
torsion and the bracket structure its translation generators close under.

The pipeline: parse analytic tetrads, evaluate them with exact second-order
jets (compiled kernel with a pure-python fallback), build the flat tetrad
connection, torsion, contortion, superpotential, curvature and Lagrangian,
check the bracket/anchor axioms of the frame-generator algebra, and test the
Euler-Lagrange equations of the torsion-quadratic action against the Einstein
tensor on a catalog of analytic backgrounds.
"""

from .backend import BACKEND
from .chart import Chart, lorentzian_chart
from .errors import (ConfigError, EvalDomainError, ExpressionSyntaxError,
                     SingularTetradError, TetradSpecError, TorsionLabError,
                     UnknownIdentifierError)
from .exprparse import ScalarField, derivative_field, parse, to_source
from .jets import Jet2, eval_jet2, eval_jet2_many, fd_check
from .tetrad import (CATALOG_NAMES, FramePointData, GaugePotential, TetradField,
                     catalog, dumps_tetrad, frame_data_at, frame_data_many,
                     gauge_potential_at, load_tetrad, loads_tetrad, save_tetrad)
from .telegeom import (ConnectionCoeffs, CurvatureData, TorsionData,
                       bianchi_divergence_residual, christoffel_at,
                       decomposition_residual_at, flatness_residual_at,
                       lagrangian_at, riemann_at, torsion_at, weitzenbock_at)
from .algebroid import (PairGroupoid, PairGroupoidElement, Section,
                        StructureFunctions, anchor_apply,
                        anchor_homomorphism_residual, anholonomy_at,
                        bracket_sections, commutator_check, constant_section,
                        gauge_transform, groupoid_compose, jacobi_residual,
                        leibniz_residual, structure_functions_at)
from .fieldeq import (em_current_at, field_eq_parts_at, field_eq_residual_at,
                      gr_equivalence_report, lagrangian_point_fn,
                      measure_momentum_constant, momentum_conjugate_at,
                      momentum_divergence_fd)
from .report import CheckRecord, Report, emit_report
from .harness import CHECK_NAMES, DEFAULT_TOLERANCES, SuiteConfig, run_suite, sample_points

__version__ = "0.1.0"
