//! Renewal processes: Monte Carlo estimators paired with their limit theorems
//! (elementary renewal, Blackwell and its lattice / reward / random-walk
//! forms, Wald, renewal reward, delayed and regenerative processes) and a
//! grid solver for the renewal equation.

mod dist;
mod equation;
mod process;
mod regenerative;

pub use dist::Dist;
pub use equation::{last_renewal_cdf, renewal_function, solve_renewal_equation, RenewalEquationSolution};
pub use process::{
    blackwell_check, blackwell_curve, delayed_renewal_stats, estimate_mean_process, last_renewal_samples,
    reward_rate_check, simulate_renewal, wald_check, BlackwellMode, DelayedStats, LimitCheck, RenewalSpec,
    WALK_EXIT_RUN,
};
pub use regenerative::{regenerative_occupancy, Phase, RegenerativeSpec};
