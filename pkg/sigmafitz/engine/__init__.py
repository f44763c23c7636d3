from .fitzpatrick import (FitzStatus, FitzValue, WindowConfig, affine_terms, fitz_exact_finite, windowed_sups,
                          fitz_sampled, fitz_closed_form, has_closed_form, evaluate_fitzpatrick, CLOSED_FORMS)
from .sigma_analysis import (check_sigma_monotone, is_sigma_related, estimate_sigma_T, estimate_sigma_T_graph,
                             check_sigma_t_vanishing, refute_maximality)
from .checks import (verify_fitz_inequality, verify_fitz_inf_identity, verify_extension_monotonicity,
                     membership_bound_check, m_set_value, verify_m_set_finiteness, verify_convexity)
from .hilbert import (SolverConfig, MinorantConfig, ResolventSolution, resolvent_solve, verify_resolvent_bound,
                      corollary_monotone_maximality_probe, quadratic_minorant_search, verify_shift_inequality)
