"""Dirichlet Laplacian spectra on orthotopes and meshed planar domains.

Closed-form and P1 finite-element eigensolvers, checks of simplicity,
squared-eigenfunction independence and non-resonance, eigenvalue
derivatives under boundary and potential perturbations, relaxed damping
placement and a controllability precheck for a bilinear Schrodinger
equation.
"""
from .damping_opt import (
    DampingDensity,
    DampingSolution,
    bang_bang_report,
    evaluate_JN,
    modal_decay_rate,
    optimize_relaxed,
)
from .eigensolver import (
    EigenSystem,
    convergence_study,
    disk_ground_state,
    evaluate_eigenfunction,
    fem_spectrum,
    orthotope_spectrum,
)
from .errors import SpecLabError
from .geometry import (
    DeformationPath,
    Disk,
    MeshedDomain,
    Orthotope,
    Polygon,
    canonical_rectangle,
    flow_deform,
    make_orthotope,
    mesh_domain,
    squashing_field,
    stretch_field,
)
from .perturbation import (
    BoundaryPerturbation,
    EigenPath,
    fd_potential_check,
    fd_shape_check,
    hadamard_derivative,
    potential_derivative,
    track_path,
)
from .schrodinger_check import ControllabilityReport, controllability_precheck, coupling_integrals
from .spectral_props import (
    PropertyReport,
    check_simplicity,
    exact_nonresonance,
    generic_Fn,
    nonresonance_search,
    squared_gram,
    squared_independence_det,
    squared_independence_search,
)

__version__ = "0.1.0"
