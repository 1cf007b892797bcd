"""Nash-equilibrium social-distancing strategies on networks of social sites."""

from .dynamics import Trajectory, converged_certificate, replicator_descent
from .equilibrium import (
    Construction,
    EquilibriumCertificate,
    construct_equilibrium,
    construct_uniform_equilibrium,
    construct_weighted_equilibrium,
    enumerate_nash,
    payoff,
    site_contacts,
    verify_nash,
)
from .fixtures import load_fixture
from .kernels import BACKEND
from .network import (
    Network,
    build_network,
    complement,
    contact_matrix,
    degree_profile,
    induced_subnetwork,
    load_network,
)
from .search import (
    RegularSupport,
    check_support_conditions,
    enumerate_maximal_independent_sets,
    enumerate_r_regular_supports,
    find_maximal_independent_set,
    find_maximal_r_regular,
)
from .stability import (
    StabilityReport,
    classify,
    classify_spectral,
    classify_structural,
    flexibility_witness,
    fragility_witness,
    perturbation_probe,
    tangent_basis,
)

__version__ = "0.1.0"
