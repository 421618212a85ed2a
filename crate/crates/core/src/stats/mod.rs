//! Avalanche statistics: driven dynamics, discrete power-law fits and
//! likelihood-ratio comparisons.

pub mod bootstrap;
pub mod compare;
pub mod dynamics;
pub mod histogram;
pub mod io;
pub mod powerlaw;
pub mod sampler;
pub mod zeta;

pub use bootstrap::bootstrap_gof;
pub use compare::{loglikelihood_ratio, vuong, Alternative, LrtResult};
pub use dynamics::{
    random_initial_config, run_dynamics, run_on_schedule, run_on_schedule_observed, AvalancheRecord, DynamicsConfig,
    DynamicsError,
};
pub use histogram::{complementary_cdf, survival_histogram};
pub use io::FitReport;
pub use powerlaw::{fit_alpha, fit_power_law, ks_distance, FitError, PowerLawFit};
pub use sampler::PowerLawSampler;
pub use zeta::hurwitz_zeta;
