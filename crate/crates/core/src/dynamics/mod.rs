//! Random-walk quantities and weighted spanning-tree counts, each by
//! several independent routes.

mod hitting;
mod monte_carlo;
mod trees;

pub use hitting::{
    hitting_time_closed, hitting_time_linear_solve, hitting_time_recursive,
    hitting_time_recursive_exact, hitting_time_spectral, hitting_report, stationary_distribution,
    stationary_distribution_exact, HittingReport, LINEAR_SOLVE_LIMIT,
};
pub use monte_carlo::{hitting_time_monte_carlo, MonteCarloEstimate, SAMPLES_PER_STREAM};
pub use trees::{
    bareiss_determinant, tree_count_closed, tree_count_kirchhoff, tree_count_spectral,
    tree_count_triangles, TreeCount, EXACT_EXPONENT_LIMIT, KIRCHHOFF_LIMIT,
};
