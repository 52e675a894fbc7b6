//! The α/2-subordinated Bessel heat kernel for α ∈ (0,2):
//! `p_ζ^(α)(t,r,s) = ∫_0^∞ p_ζ^(2)(τ,r,s) σ_t^(α/2)(τ) dτ`,
//! evaluated by subordination quadrature, plus the α=1 closed form through
//! the regularized hypergeometric function.

use crate::bessel_kernel::{p2_ln_unchecked, KernelParams};
use crate::specfun::hyp2f1_reg_with_w;
use crate::subordinator::{StableDensity, StableIndex};
use crate::{quad, require_positive, Error, Result};

/// Tolerances and budgets for the subordination quadrature.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_panels: usize,
    /// Extra interior break points for the τ integral, in τ. The canonical
    /// splits {rs, (r-s)², 1} are always added; entries here are appended.
    pub split_points: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_floor: 1e-300,
            max_panels: 4096,
            split_points: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureConfig {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::domain(
                "QuadratureConfig",
                format!("rel_tol must be positive, got {}", self.rel_tol),
            ));
        }
        if self.max_panels < 16 {
            return Err(Error::domain(
                "QuadratureConfig",
                format!("max_panels must be >= 16, got {}", self.max_panels),
            ));
        }
        for pair in self.split_points.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(Error::domain(
                    "QuadratureConfig",
                    "split_points must be strictly increasing",
                ));
            }
        }
        Ok(())
    }
}

/// Scaling reduction to unit time:
/// `p^(α)(t,r,s) = prefactor · p^(α)(1, r1, s1)` with
/// `(r1, s1, prefactor) = (r/t^{1/α}, s/t^{1/α}, t^{-(2ζ+1)/α})`.
///
/// For α = 2 the root is taken with `sqrt`, matching the internal reduction
/// in [`crate::bessel_kernel::p2`] bit for bit.
pub fn scaling_reduce(params: &KernelParams, t: f64, r: f64, s: f64) -> Result<(f64, f64, f64)> {
    require_positive("scaling_reduce", "t", t)?;
    require_positive("scaling_reduce", "r", r)?;
    require_positive("scaling_reduce", "s", s)?;
    let alpha = params.alpha();
    let root = if alpha == 2.0 {
        t.sqrt()
    } else {
        t.powf(1.0 / alpha)
    };
    let prefactor = t.powf(-(2.0 * params.zeta() + 1.0) / alpha);
    Ok((r / root, s / root, prefactor))
}

/// p_ζ^(α)(t,r,s) for α ∈ (0,2) by quadrature of the subordination formula.
///
/// After reduction to t = 1 the τ integrand is `p2(τ,r1,s1) σ_1^(α/2)(τ)`;
/// it is integrated in log-τ with break points at {rs, (r-s)², 1} (the
/// points where its character changes), the region below the subordinator's
/// essential-singularity underflow is skipped, and the far tail is cut where
/// a power-law bound on the remainder drops below rel_tol/10.
pub fn p_alpha(
    params: &KernelParams,
    t: f64,
    r: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let alpha = params.alpha();
    if alpha >= 2.0 {
        return Err(Error::domain(
            "p_alpha",
            format!("subordination quadrature requires alpha in (0,2), got {alpha}"),
        ));
    }
    let value = p_alpha_raw(params, t, r, s, cfg)?;
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::quadrature(
            "p_alpha",
            format!("kernel value degenerate ({value:e}) at t={t} r={r} s={s}"),
        ));
    }
    Ok(value)
}

/// As [`p_alpha`] but an underflowed-to-zero value is returned rather than
/// treated as a failure; outer integrals over far-tail arguments want that.
fn p_alpha_raw(
    params: &KernelParams,
    t: f64,
    r: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let zeta = params.zeta();
    let alpha = params.alpha();
    let (r1, s1, prefactor) = scaling_reduce(params, t, r, s)?;
    let density = StableDensity::get(StableIndex::from_alpha(alpha).expect("alpha checked"));
    let integral = p_alpha_unit_integral(zeta, r1, s1, &density, cfg)
        .map_err(|e| Error::quadrature("p_alpha", format!("at t={t} r={r} s={s}: {e}")))?;
    Ok(prefactor * integral)
}

fn p_alpha_unit_integral(
    zeta: f64,
    r: f64,
    s: f64,
    density: &StableDensity,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let beta = density.beta();
    let f = |tau: f64| {
        let lg = density.log_density_unit(tau);
        if lg == f64::NEG_INFINITY {
            return 0.0;
        }
        let expo = p2_ln_unchecked(zeta, tau, r, s) + lg;
        if expo < -745.0 {
            0.0
        } else {
            expo.exp()
        }
    };
    let d2 = (r - s) * (r - s);
    let rs = r * s;
    let blo = density.tau_underflow();
    // integrand tail ~ τ^{-(ζ+3/2+β)}: the remainder bound
    // g(T)·T / (ζ+1/2+β) must fall below rel_tol/10. For ζ near -1/2 the
    // decay exponent degenerates and T grows like tol^{-1/(ζ+1/2+β)}.
    let tail_exponent = zeta + 0.5 + beta;
    let tail_stretch = (10.0 / cfg.rel_tol).powf(1.0 / tail_exponent).max(1e6);
    let mut bhi = (1.0 + d2 + rs) * tail_stretch;
    let mut splits: Vec<f64> = vec![rs, d2, 1.0];
    splits.extend_from_slice(&cfg.split_points);
    for _ in 0..6 {
        let result =
            quad::integrate_log_domain(f, (blo, bhi), &splits, cfg.rel_tol, cfg.max_panels)?;
        let tail_bound = f(bhi) * bhi / tail_exponent;
        if tail_bound <= 0.1 * cfg.rel_tol * result.value.abs() {
            return Ok(result.value);
        }
        bhi *= 1e4;
    }
    Err(Error::quadrature(
        "p_alpha",
        "tail bound failed to converge while extending the domain",
    ))
}

/// Closed form for α = 1:
/// `p_ζ^(1)(t,r,s) = 2Γ(ζ+1)/√π · t (r²+s²+t²)^{-(ζ+1)}
///                    · ₂F̃₁((ζ+1)/2, (ζ+2)/2; ζ+1/2; 4r²s²/(r²+s²+t²)²)`.
///
/// The hypergeometric complement 1-z is fed in through its exact
/// factorization ((r-s)²+t²)((r+s)²+t²)/(r²+s²+t²)², so the formula stays
/// accurate as z → 1 (small t, r ≈ s).
pub fn p_alpha1_closed(zeta: f64, t: f64, r: f64, s: f64) -> Result<f64> {
    if !zeta.is_finite() || zeta <= -0.5 {
        return Err(Error::domain(
            "p_alpha1_closed",
            format!("zeta must be > -1/2, got {zeta}"),
        ));
    }
    require_positive("p_alpha1_closed", "t", t)?;
    require_positive("p_alpha1_closed", "r", r)?;
    require_positive("p_alpha1_closed", "s", s)?;
    let q = r * r + s * s + t * t;
    let w = ((r - s) * (r - s) + t * t) * ((r + s) * (r + s) + t * t) / (q * q);
    let z = (1.0 - w).clamp(0.0, 1.0);
    let hyp = hyp2f1_reg_with_w(0.5 * (zeta + 1.0), 0.5 * (zeta + 2.0), zeta + 0.5, z, w);
    let front_ln = std::f64::consts::LN_2 + libm::lgamma(zeta + 1.0)
        - 0.5 * std::f64::consts::PI.ln()
        + t.ln()
        - (zeta + 1.0) * q.ln();
    Ok(front_ln.exp() * hyp)
}

/// |∫_0^∞ p_ζ^(α)(t,r,s) s^{2ζ} ds − 1| for α ∈ (0,2), by an outer adaptive
/// quadrature over the kernel (closed form at α=1, subordination quadrature
/// otherwise). The tail is truncated where the algebraic envelope bound
/// `t |r-s|^{-(1+α)} (r+s)^{-2ζ}` integrated against s^{2ζ} is negligible.
pub fn normalization_residual_alpha(
    params: &KernelParams,
    t: f64,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    require_positive("normalization_residual_alpha", "t", t)?;
    require_positive("normalization_residual_alpha", "r", r)?;
    let alpha = params.alpha();
    let zeta = params.zeta();
    let troot = t.powf(1.0 / alpha);
    // remainder of ∫_T^∞ t s^{-1-α} ds below 1e-8
    let tail = (t * 1e8 / alpha).powf(1.0 / alpha) + 10.0 * (r + troot);
    let blo = r.min(troot) * (-80.0 / (2.0 * zeta + 1.0)).exp();
    let failure = std::sync::Mutex::new(None::<String>);
    let f = |s: f64| match kernel_eval_or_zero(params, t, r, s, cfg) {
        Ok(v) => v * s.powf(2.0 * zeta),
        Err(e) => {
            failure
                .lock()
                .expect("poisoned")
                .get_or_insert(e.to_string());
            0.0
        }
    };
    let integral = quad::integrate_log_domain(f, (blo, tail), &[r, troot], 1e-7, cfg.max_panels)
        .map_err(|e| Error::quadrature("normalization_residual_alpha", e.to_string()))?;
    if let Some(msg) = failure.into_inner().expect("poisoned") {
        return Err(Error::quadrature("normalization_residual_alpha", msg));
    }
    Ok((integral.value - 1.0).abs())
}

/// Relative Chapman–Kolmogorov residual for α ∈ (0,2).
pub fn chapman_residual_alpha(
    params: &KernelParams,
    t: f64,
    t2: f64,
    r: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    require_positive("chapman_residual_alpha", "t", t)?;
    require_positive("chapman_residual_alpha", "t2", t2)?;
    require_positive("chapman_residual_alpha", "r", r)?;
    require_positive("chapman_residual_alpha", "s", s)?;
    let alpha = params.alpha();
    let zeta = params.zeta();
    let target = kernel_eval(params, t + t2, r, s, cfg)?;
    let troot = t.powf(1.0 / alpha).max(t2.powf(1.0 / alpha));
    let blo = r.min(s).min(troot) * (-80.0 / (2.0 * zeta + 1.0)).exp();
    let bhi = ((t + t2) * 1e7 / alpha).powf(1.0 / alpha) + 10.0 * (r + s + troot);
    let failure = std::sync::Mutex::new(None::<String>);
    let f = |z: f64| {
        let lhs = kernel_eval_or_zero(params, t, r, z, cfg);
        let rhs = kernel_eval_or_zero(params, t2, z, s, cfg);
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => a * b * z.powf(2.0 * zeta),
            (Err(e), _) | (_, Err(e)) => {
                failure
                    .lock()
                    .expect("poisoned")
                    .get_or_insert(e.to_string());
                0.0
            }
        }
    };
    let integral = quad::integrate_log_domain(f, (blo, bhi), &[r, s, troot], 1e-7, cfg.max_panels)
        .map_err(|e| Error::quadrature("chapman_residual_alpha", e.to_string()))?;
    if let Some(msg) = failure.into_inner().expect("poisoned") {
        return Err(Error::quadrature("chapman_residual_alpha", msg));
    }
    Ok((integral.value - target).abs() / target)
}

/// Preferred evaluation route for a given α: the α=2 kernel, the α=1 closed
/// form, or the subordination quadrature.
pub(crate) fn kernel_eval(
    params: &KernelParams,
    t: f64,
    r: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if params.alpha() == 2.0 {
        crate::bessel_kernel::p2(params.zeta(), t, r, s)
    } else if params.alpha() == 1.0 {
        p_alpha1_closed(params.zeta(), t, r, s)
    } else {
        p_alpha(params, t, r, s, cfg)
    }
}

/// Kernel evaluation that tolerates underflow to zero, for integrands.
pub(crate) fn kernel_eval_or_zero(
    params: &KernelParams,
    t: f64,
    r: f64,
    s: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if params.alpha() == 2.0 {
        crate::bessel_kernel::p2(params.zeta(), t, r, s)
    } else if params.alpha() == 1.0 {
        p_alpha1_closed(params.zeta(), t, r, s)
    } else {
        p_alpha_raw(params, t, r, s, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(got: f64, want: f64) -> f64 {
        (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn scaling_reduce_examples() {
        let p = KernelParams::new(1.0, 2.0).unwrap();
        let (r1, s1, pref) = scaling_reduce(&p, 1.0, 0.37, 5.2).unwrap();
        assert_eq!((r1, s1, pref), (0.37, 5.2, 1.0));

        let p = KernelParams::new(1.0, 1.0).unwrap();
        let (r1, s1, pref) = scaling_reduce(&p, 4.0, 4.0, 8.0).unwrap();
        assert_eq!((r1, s1), (1.0, 2.0));
        assert!(rel_err(pref, 4.0f64.powi(-3)) < 1e-15);

        let p = KernelParams::new(0.0, 0.5).unwrap();
        let (r1, s1, pref) = scaling_reduce(&p, 16.0, 256.0, 512.0).unwrap();
        assert!(rel_err(r1, 1.0) < 1e-15);
        assert!(rel_err(s1, 2.0) < 1e-15);
        assert!(rel_err(pref, 16.0f64.powi(-2)) < 1e-15);
    }

    #[test]
    fn closed_form_zeta0_and_zeta1() {
        // p_0^(1)(1,1,1) = 6/(5π)
        let got = p_alpha1_closed(0.0, 1.0, 1.0, 1.0).unwrap();
        let want = 6.0 / (5.0 * std::f64::consts::PI);
        assert!(rel_err(got, want) < 1e-13, "got {got:e} want {want:e}");

        // p_1^(1)(1,1,1) = 4/(5π)
        let got = p_alpha1_closed(1.0, 1.0, 1.0, 1.0).unwrap();
        let want = 4.0 / (5.0 * std::f64::consts::PI);
        assert!(rel_err(got, want) < 1e-13);

        // p_1^(1)(2,1,3) = (4/π)·2/((1-9)² + 4(4+2+18)) = 8/(160π)
        let got = p_alpha1_closed(1.0, 2.0, 1.0, 3.0).unwrap();
        let want = 8.0 / (160.0 * std::f64::consts::PI);
        assert!(rel_err(got, want) < 1e-13);
    }

    #[test]
    fn closed_form_matches_rational_specializations_on_grid() {
        // ζ ∈ {0,1}: the hypergeometric collapses to rational functions
        let mut worst0 = 0.0f64;
        let mut worst1 = 0.0f64;
        for &t in &[1e-2, 0.1, 1.0, 8.0, 1e2] {
            for &r in &[1e-2, 0.5, 1.0, 30.0, 1e2] {
                for &s in &[1e-2, 0.4, 1.0, 31.0, 99.0] {
                    let q = r * r + s * s + t * t;
                    let w = ((r - s) * (r - s) + t * t) * ((r + s) * (r + s) + t * t);
                    let rational0 = 2.0 * t * q / (std::f64::consts::PI * w);
                    let rational1 = 4.0 / std::f64::consts::PI * t / w;
                    worst0 = worst0.max(rel_err(p_alpha1_closed(0.0, t, r, s).unwrap(), rational0));
                    worst1 = worst1.max(rel_err(p_alpha1_closed(1.0, t, r, s).unwrap(), rational1));
                }
            }
        }
        assert!(worst0 < 1e-12, "zeta=0 worst {worst0:e}");
        assert!(worst1 < 1e-12, "zeta=1 worst {worst1:e}");
    }

    #[test]
    fn closed_form_hypergeometric_argument_sane() {
        // ζ=0.5, t=r=s=1: argument 4/9, value finite positive
        let got = p_alpha1_closed(0.5, 1.0, 1.0, 1.0).unwrap();
        assert!(got.is_finite() && got > 0.0);
        // near-diagonal small time: z within 1e-12 of 1
        let got = p_alpha1_closed(0.5, 1e-6, 1.0, 1.0).unwrap();
        assert!(got.is_finite() && got > 0.0);
    }

    #[test]
    fn quadrature_matches_alpha1_closed_form_at_spots() {
        let cfg = QuadratureConfig::default();
        for &zeta in &[0.0, 0.5, 1.0, 2.5] {
            let params = KernelParams::new(zeta, 1.0).unwrap();
            for &(t, r, s) in &[
                (1.0, 1.0, 1.0),
                (0.1, 2.0, 0.3),
                (5.0, 0.05, 7.0),
                (0.01, 10.0, 10.0),
            ] {
                let quad = p_alpha(&params, t, r, s, &cfg).unwrap();
                let closed = p_alpha1_closed(zeta, t, r, s).unwrap();
                assert!(
                    rel_err(quad, closed) < 1e-6,
                    "zeta={zeta} t={t} r={r} s={s}: quad {quad:e} closed {closed:e}"
                );
            }
        }
    }

    #[test]
    fn quadrature_scaling_is_bit_exact() {
        let cfg = QuadratureConfig::default();
        let params = KernelParams::new(0.7, 1.3).unwrap();
        for &(t, r, s) in &[(3.0, 1.2, 0.4), (0.2, 5.0, 4.0), (40.0, 0.3, 0.31)] {
            let (r1, s1, pref) = scaling_reduce(&params, t, r, s).unwrap();
            let lhs = p_alpha(&params, t, r, s, &cfg).unwrap();
            let rhs = pref * p_alpha(&params, 1.0, r1, s1, &cfg).unwrap();
            assert!(rel_err(lhs, rhs) <= 1e-14, "t={t} r={r} s={s}");
        }
    }

    #[test]
    fn quadrature_symmetric_and_positive() {
        let cfg = QuadratureConfig::default();
        let params = KernelParams::new(1.5, 0.8).unwrap();
        let a = p_alpha(&params, 1.0, 0.4, 6.0, &cfg).unwrap();
        let b = p_alpha(&params, 1.0, 6.0, 0.4, &cfg).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a > 0.0);
    }

    #[test]
    fn p_alpha_rejects_alpha_two() {
        let params = KernelParams::new(1.0, 2.0).unwrap();
        assert!(matches!(
            p_alpha(&params, 1.0, 1.0, 1.0, &QuadratureConfig::default()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn stress_alpha_ranges_relaxed_tolerance() {
        // c1 = α/(2-α) degenerates at both ends of (0,2); the quadrature
        // must still run, with acceptance relaxed to 1e-4
        let cfg = QuadratureConfig::default();
        for &alpha in &[0.05, 1.96] {
            let params = KernelParams::new(0.5, alpha).unwrap();
            let v = p_alpha(&params, 1.0, 1.0, 1.2, &cfg).unwrap();
            assert!(v.is_finite() && v > 0.0, "alpha={alpha}: {v:e}");
            // scaling stays bit-exact even in the stress zone
            let (r1, s1, pref) = scaling_reduce(&params, 3.0, 1.0, 1.2).unwrap();
            let lhs = p_alpha(&params, 3.0, 1.0, 1.2, &cfg).unwrap();
            let rhs = pref * p_alpha(&params, 1.0, r1, s1, &cfg).unwrap();
            assert!(rel_err(lhs, rhs) <= 1e-14, "alpha={alpha}");
        }
        // subordinator Laplace identity at the degenerate indices
        for &beta in &[0.025, 0.98] {
            let idx = crate::subordinator::StableIndex::new(beta).unwrap();
            let resid = crate::subordinator::laplace_check(idx, 1.0).unwrap();
            assert!(resid < 1e-4, "beta={beta}: {resid:e}");
        }
    }

    #[test]
    fn config_validation() {
        let cfg = QuadratureConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = QuadratureConfig {
            max_panels: 4,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = QuadratureConfig {
            split_points: vec![2.0, 1.0],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
