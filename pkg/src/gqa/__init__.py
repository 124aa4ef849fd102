"""Exact compositional engine for graphical quadratic algebra.

Build string diagrams over the copy/add/normal generator set, read them as
Gaussian stochastic maps or as quadratic relations, normalize them to
canonical states, decide equality, and run exact inference for a small
Gaussian probabilistic language.
"""

from .linalg import (TOL, DimensionMismatch, NotPSD, Subspace, givens_qr,
                     image, kernel, orth_complement, project, psd_factor,
                     pseudoinverse, subspace_image, subspaces_equal)
from .diagram import (EMPTY, SWAP, ArityMismatch, Diagram, DiagramSyntaxError,
                      Generator, const_diagram, export_dot, gen, id_diagram,
                      matrix_diagram, par, parse_diagram, print_diagram,
                      scalar, seq, subspace_diagram, swap)
from .gauss import (GaussMap, NotCausal, compose_gauss, gauss_map,
                    gauss_normal_form, gauss_state, identity_gauss,
                    interpret_causal, sample, tensor_gauss)
from .quadstate import (QuadState, canonicalize, condition_zero, eval_state,
                        free_state, gaussian_state, infeasible_state,
                        make_state, point_state, pushforward, state_from_json,
                        state_to_json, states_equal, tensor_states)
from .quadrel import (AffRelMorphism, QuadRelMorphism, affrels_equal,
                      compose_rel, effective_domain, eval_rel, functor_L,
                      functor_S, identity_rel, interpret, rel_from_json,
                      rel_to_json, rels_equal, tensor_rel)
from .gpl import (GplSyntaxError, GplTypeError, InferenceResult,
                  InfeasibleObservation, compile_term, infer, parse_gpl,
                  programs_equal, typecheck)
from .ols import (LeastSquaresProblem, build_ols_diagram, load_problem_csv,
                  ols_state, residual_state, solve_ols)
from .oracle import GridSpec, grid_infimize, mc_moments

__all__ = [name for name in dir() if not name.startswith("_")]
