//! The α=2 Bessel heat kernel
//! `p_ζ^(2)(t,r,s) = (rs)^{1/2-ζ}/(2t) · e^{-(r²+s²)/(4t)} · I_{ζ-1/2}(rs/(2t))`
//! in overflow-safe form, its Gaussian-factored envelopes, and the semigroup
//! residuals (normalization and Chapman–Kolmogorov against the reference
//! measure s^{2ζ} ds).
//!
//! The evaluation rests on the algebraic identity
//! `(r²+s²)/(4t) = (r-s)²/(4t) + rs/(2t)`, which pairs the kernel's Gaussian
//! with the exponential scaling of I_ν:
//! `p2 = (rs)^{1/2-ζ}/(2t) · e^{-(r-s)²/(4t)} · [e^{-w} I_{ζ-1/2}(w)]`, w = rs/(2t).
//! Everything is assembled in log space and exponentiated once.

use crate::quad::integrate_log_domain;
use crate::specfun::bessel_i_scaled_ln;
use crate::{require_positive, Error, Result};

/// Kernel parameters (ζ, α): the Bessel index and the stability order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    zeta: f64,
    alpha: f64,
}

impl KernelParams {
    pub fn new(zeta: f64, alpha: f64) -> Result<Self> {
        if !zeta.is_finite() || zeta <= -0.5 {
            return Err(Error::domain(
                "KernelParams",
                format!("zeta must be > -1/2, got {zeta}"),
            ));
        }
        if !alpha.is_finite() || alpha <= 0.0 || alpha > 2.0 {
            return Err(Error::domain(
                "KernelParams",
                format!("alpha must lie in (0,2], got {alpha}"),
            ));
        }
        Ok(KernelParams { zeta, alpha })
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn check_p2_args(op: &'static str, zeta: f64, t: f64, r: f64, s: f64) -> Result<()> {
    if !zeta.is_finite() || zeta <= -0.5 {
        return Err(Error::domain(
            op,
            format!("zeta must be > -1/2, got {zeta}"),
        ));
    }
    require_positive(op, "t", t)?;
    require_positive(op, "r", r)?;
    require_positive(op, "s", s)?;
    Ok(())
}

/// ln p_ζ^(2)(1, r, s): the unit-time kernel in log space. Arguments are
/// sorted first, so the symmetry p2(r,s) = p2(s,r) is bit-exact.
fn p2_unit_ln(zeta: f64, r: f64, s: f64) -> f64 {
    let (r, s) = if r <= s { (r, s) } else { (s, r) };
    let w = 0.5 * r * s;
    let d = s - r;
    (0.5 - zeta) * (r * s).ln() - std::f64::consts::LN_2 - 0.25 * d * d
        + bessel_i_scaled_ln(zeta - 0.5, w)
}

/// The Bessel heat kernel p_ζ^(2)(t,r,s) for the reflected process.
///
/// Scaling is applied structurally — the value is
/// `t^{-(2ζ+1)/2} · p_unit(r/√t, s/√t)` with the same power/root expressions
/// as [`crate::subordinated::scaling_reduce`] — so the scaling identity holds
/// to the last bit.
pub fn p2(zeta: f64, t: f64, r: f64, s: f64) -> Result<f64> {
    check_p2_args("p2", zeta, t, r, s)?;
    let root = t.sqrt();
    let pref = t.powf(-(2.0 * zeta + 1.0) / 2.0);
    Ok(pref * p2_unit_ln(zeta, r / root, s / root).exp())
}

/// ln p2 for scan-style consumers; same domain checks assumed done.
pub(crate) fn p2_ln_unchecked(zeta: f64, t: f64, r: f64, s: f64) -> f64 {
    let root = t.sqrt();
    -(2.0 * zeta + 1.0) / 2.0 * t.ln() + p2_unit_ln(zeta, r / root, s / root)
}

/// ζ=1 closed form `(rs)^{-1} (4πt)^{-1/2} (e^{-(r-s)²/(4t)} - e^{-(r+s)²/(4t)})`,
/// written with expm1 so the near-diagonal difference never cancels.
pub fn p2_zeta1_closed(t: f64, r: f64, s: f64) -> Result<f64> {
    check_p2_args("p2_zeta1_closed", 1.0, t, r, s)?;
    let gauss = (-(r - s) * (r - s) / (4.0 * t)).exp();
    let gap = -(-r * s / t).exp_m1(); // 1 - e^{-rs/t}
    Ok(gauss * gap / (r * s * (4.0 * std::f64::consts::PI * t).sqrt()))
}

/// Which of the two displayed Gaussian-factored comparison functions to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeForm {
    /// `t^{-1/2} e^{-(r-s)²/(c t)} / (rs+t)^ζ`
    ProductRate,
    /// `(1 ∧ r/√t)^ζ (1 ∧ s/√t)^ζ (rs)^{-ζ} t^{-1/2} e^{-(r-s)²/(c t)}`
    FactoredRate,
}

/// Gaussian-factored two-sided comparison function for p_ζ^(2); the rate
/// constant `c_exp` is caller-supplied (the sharp rate is 4).
pub fn p2_gaussian_envelope(
    zeta: f64,
    t: f64,
    r: f64,
    s: f64,
    c_exp: f64,
    form: EnvelopeForm,
) -> Result<f64> {
    check_p2_args("p2_gaussian_envelope", zeta, t, r, s)?;
    require_positive("p2_gaussian_envelope", "c_exp", c_exp)?;
    let gauss_ln = -(r - s) * (r - s) / (c_exp * t);
    let ln_val = match form {
        EnvelopeForm::ProductRate => -0.5 * t.ln() - zeta * (r * s + t).ln() + gauss_ln,
        EnvelopeForm::FactoredRate => {
            let root = t.sqrt();
            let fac = |x: f64| (x / root).min(1.0).ln();
            zeta * (fac(r) + fac(s) - (r * s).ln()) - 0.5 * t.ln() + gauss_ln
        }
    };
    Ok(ln_val.exp())
}

/// |∫_0^∞ p2(ζ,t,r,s) s^{2ζ} ds − 1|, the normalization of the kernel
/// against its reference measure, by adaptive quadrature.
pub fn normalization_residual(zeta: f64, t: f64, r: f64) -> Result<f64> {
    check_p2_args("normalization_residual", zeta, t, r, 1.0)?;
    let root = t.sqrt();
    let scale = r.min(root);
    // the s^{2ζ+1} factor (in log coordinates) decays only at rate 2ζ+1,
    // so the lower bracket must stretch accordingly
    let blo = scale * (-80.0 / (2.0 * zeta + 1.0)).exp();
    let bhi = r + 65.0 * root;
    let f = |s: f64| (p2_ln_unchecked(zeta, t, r, s) + 2.0 * zeta * s.ln()).exp();
    let integral = integrate_log_domain(f, (blo, bhi), &[r, root], 1e-11, 4096)
        .map_err(|e| Error::quadrature("normalization_residual", e.to_string()))?;
    Ok((integral.value - 1.0).abs())
}

/// Relative Chapman–Kolmogorov residual
/// `|∫ p2(t,r,z) p2(t2,z,s) z^{2ζ} dz − p2(t+t2,r,s)| / p2(t+t2,r,s)`.
pub fn chapman_residual(zeta: f64, t: f64, t2: f64, r: f64, s: f64) -> Result<f64> {
    check_p2_args("chapman_residual", zeta, t, r, s)?;
    require_positive("chapman_residual", "t2", t2)?;
    let target = p2(zeta, t + t2, r, s)?;
    if target <= 0.0 {
        return Err(Error::quadrature(
            "chapman_residual",
            format!("target kernel underflows at t={t} t2={t2} r={r} s={s}"),
        ));
    }
    let root = t.sqrt().max(t2.sqrt());
    let blo = r.min(s).min(root) * (-80.0 / (2.0 * zeta + 1.0)).exp();
    let bhi = r.max(s) + 65.0 * root;
    let f = |z: f64| {
        (p2_ln_unchecked(zeta, t, r, z) + p2_ln_unchecked(zeta, t2, z, s) + 2.0 * zeta * z.ln())
            .exp()
    };
    let integral = integrate_log_domain(f, (blo, bhi), &[r, s], 1e-10, 4096)
        .map_err(|e| Error::quadrature("chapman_residual", e.to_string()))?;
    Ok((integral.value - target).abs() / target)
}
