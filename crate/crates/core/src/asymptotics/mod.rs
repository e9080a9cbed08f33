//! Asymptotic orders, valuations, spectral fibers and singular spectra.
//!
//! Every estimate starts from measurements of a net over an
//! [`EpsilonSchedule`]: seminorm sups for `C^p` targets, test-function
//! pairings for `D′`. [`fit_order`] turns a sequence into a growth order; the
//! fiber `Σ_x` is then `[0, R]` or `[0, R)`, where `R` is the largest growth
//! order near `x` and the endpoint is settled by checking whether `ε^R u_ε`
//! itself converges.

mod fiber;
mod fit;
mod schedule;
mod spectrum;

pub use fiber::{
    clamped_valuation, converges_near, localized_fiber, sigma_fiber, sigma_fiber_with, valuation, valuation_fit,
    Endpoint, FiberOptions, SigmaFiber, Target, NEIGHBORHOOD_POINTS, PAIRING_NOISE_FLOOR,
};
pub use fit::{
    fit_order, fit_order_with, local_slopes, Classification, OrderFit, CAUCHY_TOL, CLASSIFY_TOL, ZERO_TAIL_SLOPE,
};
pub use schedule::EpsilonSchedule;
pub use spectrum::{
    classify_regularity, default_delta, par_map, singular_spectrum, singular_spectrum_with, singular_support,
    singular_support_with, spectrum_at, Regularity, RegularityReport, SingularSupport, Spectrum, THREADS_ENV,
};
