//! Bessel heat kernels and their stable subordinations.
//!
//! The α=2 kernel `p_ζ^(2)(t,r,s)` is the transition density (with respect to
//! the speed measure `r^{2ζ} dr` on the half-line) of the Bessel process of
//! order ζ−1/2 reflected at the origin. For α ∈ (0,2) the kernel
//! `p_ζ^(α)(t,r,s)` is obtained by subordinating `p_ζ^(2)` with the one-sided
//! α/2-stable subordinator.
//!
//! The crate evaluates these kernels by three independent routes —
//! subordination quadrature, closed forms (α=2 and α=1), and Monte Carlo —
//! and provides sweep machinery that measures empirical comparability
//! constants for the sharp two-sided envelopes, the 3G inequality, and a
//! family of pointwise comparability bounds.

// validation guards are written as negations (`!(x > 0.0)`) on purpose:
// unlike `x <= 0.0`, they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel_kernel;
pub mod envelopes;
pub mod halton;
pub mod mc;
pub mod quad;
pub mod specfun;
pub mod subordinated;
pub mod subordinator;
pub mod verify;

pub use bessel_kernel::{
    chapman_residual, normalization_residual, p2, p2_gaussian_envelope, p2_zeta1_closed,
    EnvelopeForm, KernelParams,
};
pub use envelopes::{
    comparability_check, regime_envelope, sharp_envelope, three_g_ratio, weight_f, weight_f_smooth,
    ComparabilityItem, ComparabilityPoint, EnvelopeValue, Regime,
};
pub use mc::{mc_kernel, sample_positive_stable, McEstimate};
pub use specfun::{bessel_i_scaled, gauss_2f1_reg, log_gamma, BesselOrder};
pub use subordinated::{
    chapman_residual_alpha, normalization_residual_alpha, p_alpha, p_alpha1_closed, scaling_reduce,
    QuadratureConfig,
};
pub use subordinator::{
    laplace_check, levy_density_half, stable_density, stable_scaling, subordinator_envelope,
    StableDensity, StableIndex, SubordinatorEnvelopeParams,
};
pub use verify::{
    full_config, run_suite, smoke_config, sweep_ratio, sweep_ratio_samples, Axis, CheckConfig,
    CheckStatus, GridSpec, PointOutcome, RatioCheck, RatioReport, Spacing, SuiteConfig,
    SuiteReport,
};

/// Errors produced by kernel evaluation, quadrature, and the sweep engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Adaptive quadrature exhausted its panel budget before reaching the
    /// requested tolerance.
    #[error("quadrature failure in {op}: {reason}")]
    Quadrature { op: &'static str, reason: String },

    /// A comparability item was asked about a point that violates the
    /// item's hypothesis.
    #[error("hypothesis violation in {op}: {reason}")]
    Hypothesis { op: &'static str, reason: String },

    /// A verification config document failed schema validation.
    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// I/O while reading configs or writing reports.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON in a config document.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn quadrature(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Quadrature {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn hypothesis(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Hypothesis {
            op,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(op: &'static str, name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            format!("{name} must be positive, got {x}"),
        ))
    }
}
