"""Regularized massive Dirac Hamiltonian on the half-plane.

Self-adjoint boundary-condition classification, exact scattering amplitude,
edge-mode spectra, and the three winding numbers entering the anomalous
bulk-edge identity C_+ = n_b + w_inf.
"""
from .bulk import ModelParams, BulkSection, hamiltonian, omega_plus, momentum_roots, psi0, psi_inf, chern
from .boundary import BoundaryCondition, ClassLabel, is_self_adjoint, classify, make_class, equivalent
from .scattering import WindingResult, g_value, s_value, winding_along, winding_adaptive, chern_via_scattering, n_b_levinson, w_infinity
from .edge import EdgeBranch, transverse_roots, decaying_pair, edge_sigma_min, edge_eigenvalues, trace_branches, n_b_direct
from .anomaly import AnomalyPrediction, THRESHOLD, predict_w_infinity, case_study_curves, verify_identity

__all__ = [
    "ModelParams", "BulkSection", "hamiltonian", "omega_plus", "momentum_roots",
    "psi0", "psi_inf", "chern",
    "BoundaryCondition", "ClassLabel", "is_self_adjoint", "classify",
    "make_class", "equivalent",
    "WindingResult", "g_value", "s_value", "winding_along", "winding_adaptive",
    "chern_via_scattering", "n_b_levinson", "w_infinity",
    "EdgeBranch", "transverse_roots", "decaying_pair", "edge_sigma_min",
    "edge_eigenvalues", "trace_branches", "n_b_direct",
    "AnomalyPrediction", "THRESHOLD", "predict_w_infinity",
    "case_study_curves", "verify_identity",
]
