"""Gaudin model, critical points of master functions and the Wronski map for sl2."""
from .bethe import (CriticalOrbit, ModelConfig, SolverOptions, bethe_residual, bethe_vector,
                    eigenvalues_mu, master_log_value, master_value_phi, solve_bethe,
                    verify_eigenpair)
from .errors import (DegeneratePlaneError, DivisionRemainderError, DomainCollapseWarning,
                     DomainError, GaudinWronskiError, InvarianceError, NoSolutionError,
                     PreconditionError, UnderCountWarning, UnsupportedCaseError)
from .gaudin import PointConfig, casimir_pair, hamiltonian, hamiltonians, restrict_to_singular
from .heine_stieltjes import (FuchsianEquation, WronskianSpec, eigenvalue_injectivity_check,
                              fuchsian_from_plane, orbit_to_plane, orbit_to_small_polynomial,
                              plane_to_orbit, preimage_census, van_vleck_at_nodes)
from .kernels import BACKEND
from .polywron import (Polynomial, PolyPlane, discriminant, plane_wronskian, recover_plane,
                       resultant, wronskian_pair)
from .sl2rep import (TensorVector, WeightVector, cg_multiplicity, dim_sing_bruteforce,
                     dim_sing_formula, schubert_formula, schubert_special_intersection,
                     shapovalov_inner, singular_basis)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "bethe_residual",
    "bethe_vector",
    "casimir_pair",
    "cg_multiplicity",
    "CriticalOrbit",
    "DegeneratePlaneError",
    "dim_sing_bruteforce",
    "dim_sing_formula",
    "discriminant",
    "DivisionRemainderError",
    "DomainCollapseWarning",
    "DomainError",
    "eigenvalue_injectivity_check",
    "eigenvalues_mu",
    "fuchsian_from_plane",
    "FuchsianEquation",
    "GaudinWronskiError",
    "hamiltonian",
    "hamiltonians",
    "InvarianceError",
    "master_log_value",
    "master_value_phi",
    "ModelConfig",
    "NoSolutionError",
    "orbit_to_plane",
    "orbit_to_small_polynomial",
    "plane_to_orbit",
    "plane_wronskian",
    "PointConfig",
    "Polynomial",
    "PolyPlane",
    "PreconditionError",
    "preimage_census",
    "recover_plane",
    "restrict_to_singular",
    "resultant",
    "schubert_formula",
    "schubert_special_intersection",
    "shapovalov_inner",
    "singular_basis",
    "solve_bethe",
    "SolverOptions",
    "TensorVector",
    "UnderCountWarning",
    "UnsupportedCaseError",
    "van_vleck_at_nodes",
    "verify_eigenpair",
    "WeightVector",
    "wronskian_pair",
    "WronskianSpec",
    "__version__",
]
