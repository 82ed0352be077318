"""Structure-preserving lattice discretization of the 1-D linear Fokker-Planck equation.

Velocity space is the lattice {j*eps : |j| <= 2*N**2} with eps = 1/N.  The
package provides probability densities on that lattice, the collision-type
combination operator T and its Wild-sum evolution, closed-form Fourier-side
solutions, the exact binomial equilibrium, sup-type Fourier metrics d_s, and
even-order central-difference stencils derived from signed convolution
kernels.
"""

__version__ = "0.1.0"

from .lattice import (
    GRID_CAP,
    DegenerateInputError,
    DimensionError,
    IncompatibleLatticeError,
    LatticeDensity,
    LatticeError,
    MomentSummary,
    NegativityError,
    ParameterError,
    PreconditionError,
    ProjectionFailureError,
    ResourceLimitError,
    SignedLatticeFunction,
    char_fn,
    construct_initial,
    convolve,
    delta_density,
    density_from_dict,
    density_to_dict,
    entropy,
    gaussian_cells_density,
    load_density,
    moment,
    moments,
    new_lattice_density,
    psi_functional,
    random_density,
    save_density,
    three_point_density,
)
from .evolution import WildConfig, apply_T, evolve, generator, trajectory_table, wild_step
from .spectral import (
    CharFnEvaluator,
    MetricResult,
    continuous_xi_grid,
    decay_report,
    discrete_fp_charfn_exact,
    fourier_distance,
    gaussian_evaluator,
    lattice_evaluator,
    lattice_xi_grid,
    ou_evolved_charfn,
    ou_gaussian_charfn,
    stability_report,
    stationary_charfn,
    stationary_evaluator,
    symbol,
)
from .equilibrium import maxwellian_comparison, stationary_law, stationary_oracle
from .stencils import (
    KernelGn,
    Stencil,
    apply_stencil,
    derivative_stencil,
    evolve_higher_order,
    gn_kernel,
    higher_order_generator,
    moment_condition_check,
    spectral_higher_order_solution,
)
from .report import ReportTable
