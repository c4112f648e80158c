//! Monte Carlo samplers for the normalized Brownian excursion, the
//! functionals ξ and η, the discrete Brownian snake, and the center of mass.

mod excursion;
mod snake;

pub use excursion::{
    eta_stat_fast, eta_stat_naive, sample_excursion, sample_s_conditional, xi_stat, ExcursionPath,
    SimError,
};
pub use snake::{sample_discrete_snake, verify_idloi, IdloiReport, MomentGap, SnakeSample};
