//! One-sided stable subordinator densities.
//!
//! `σ_t^(β)(τ)` is the probability density on (0,∞) whose Laplace transform
//! is `exp(-t λ^β)`, β ∈ (0,1). The paper defines it only through that
//! identity, so the evaluator here is pinned by three independent oracles:
//! the β = 1/2 Lévy closed form, the Laplace identity itself (checked by
//! quadrature), and normalization.
//!
//! Evaluation strategy for the unit-time density σ_1:
//! * large argument — the convergent series
//!   `σ_1(x) = (1/π) Σ_k (-1)^{k+1} Γ(kβ+1)/k! · sin(kπβ) · x^{-kβ-1}`;
//! * otherwise — a Zolotarev-type single integral over θ ∈ (0,π) with the
//!   integrand computed in log space, so the essential singularity at τ → 0
//!   costs nothing but an exponent shift.
//!
//! [`StableDensity`] caches `ln σ_1` as a piecewise Chebyshev interpolant
//! for the benefit of the subordination quadrature, validated against the
//! direct evaluator at construction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::quad::{integrate_split, tanh_sinh};
use crate::{require_positive, Error, Result};

/// Stability index β ∈ (0,1), strictly. Houses β = α/2 for α ∈ (0,2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableIndex {
    beta: f64,
}

impl StableIndex {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::domain(
                "StableIndex",
                format!("beta must lie strictly in (0,1), got {beta}"),
            ));
        }
        Ok(StableIndex { beta })
    }

    pub fn get(self) -> f64 {
        self.beta
    }

    /// β expressed through the stability order α = 2β.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        StableIndex::new(alpha / 2.0)
    }
}

/// Lévy density: the β = 1/2 subordinator in closed form,
/// `σ_t^(1/2)(τ) = t/(2√π) · τ^{-3/2} · e^{-t²/(4τ)}`.
pub fn levy_density_half(t: f64, tau: f64) -> Result<f64> {
    require_positive("levy_density_half", "t", t)?;
    require_positive("levy_density_half", "tau", tau)?;
    let log_val =
        -(t * t) / (4.0 * tau) + t.ln() - 1.5 * tau.ln() - (2.0 * std::f64::consts::PI.sqrt()).ln();
    Ok(if log_val < -745.0 { 0.0 } else { log_val.exp() })
}

/// log of the Kanter/Zolotarev auxiliary function
/// `a(θ) = sin((1-β)θ) sin(βθ)^{β/(1-β)} / sin(θ)^{1/(1-β)}`, θ ∈ (0,π).
///
/// `a` is increasing from a(0+) = (1-β) β^{β/(1-β)} to +∞ at θ = π. The same
/// function drives both the density integral and the Kanter sampler.
pub(crate) fn kanter_log_a(beta: f64, theta: f64) -> f64 {
    let om = 1.0 - beta;
    (om * theta).sin().ln() + (beta / om) * (beta * theta).sin().ln() - theta.sin().ln() / om
}

/// ln a(0+): the exact rate of the essential singularity of σ_1 at τ = 0,
/// exp(-a(0) τ^{-c1}) with c1 = β/(1-β).
pub(crate) fn log_a_origin(beta: f64) -> f64 {
    (1.0 - beta).ln() + beta / (1.0 - beta) * beta.ln()
}

/// Large-argument series for σ_1^(β)(x). Converges for all x > 0 but is
/// only used where the terms decay from the start (x ≥ 4).
fn humbert_series(beta: f64, x: f64) -> f64 {
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut small = 0;
    for k in 1..400usize {
        let kf = k as f64;
        let ln_mag = libm::lgamma(kf * beta + 1.0) - libm::lgamma(kf + 1.0) - kf * beta * ln_x;
        let phase = (std::f64::consts::PI * (kf * beta).rem_euclid(2.0)).sin();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * phase * ln_mag.exp();
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum / (std::f64::consts::PI * x)
}

const HUMBERT_MIN_X: f64 = 4.0;

/// Direct evaluation of ln σ_1^(β)(x); -inf when the density underflows,
/// NaN on quadrature failure (callers turn that into an error).
pub(crate) fn stable_log_density_unit(beta: f64, x: f64) -> f64 {
    if x >= HUMBERT_MIN_X {
        return humbert_series(beta, x).ln();
    }
    zolotarev_log_density(beta, x)
}

/// The Zolotarev single-integral representation, valid for any x > 0.
pub(crate) fn zolotarev_log_density(beta: f64, x: f64) -> f64 {
    let om = 1.0 - beta;
    let c1 = beta / om;
    let la0 = log_a_origin(beta);
    // s = a(0) ξ with ξ = x^{-c1}; exponent shift for the whole integral
    let ln_s = la0 - c1 * x.ln();
    if ln_s > 7.5 {
        // value below exp(-1800): hard underflow, skip the quadrature
        return f64::NEG_INFINITY;
    }
    let s = ln_s.exp();
    let f = |theta: f64| -> f64 {
        let la = kanter_log_a(beta, theta);
        let d = la - la0;
        // (a - a0) ξ, computed without cancellation for a ≈ a0
        let penalty = if d > 690.0 {
            f64::INFINITY
        } else {
            s * d.exp_m1()
        };
        let expo = la - penalty;
        if expo < -745.0 {
            0.0
        } else {
            expo.exp()
        }
    };
    // When a(0) ξ < 1, the factor e^{-a(θ)ξ} cuts the rising a(θ) at an
    // interior point, and the cut edge sharpens like 1/(1-β) in tanh-sinh
    // coordinates. Splitting at the crossing a(θ*) ξ = 1 turns the edge
    // into panel endpoints, where tanh-sinh clusters its nodes.
    let integral = if ln_s < 0.0 {
        let target = la0 - ln_s; // ln a(θ*) = -ln ξ
        let mut lo = 1e-9;
        let mut hi = std::f64::consts::PI - 1e-12;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if kanter_log_a(beta, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta_star = 0.5 * (lo + hi);
        let left = tanh_sinh(&f, 0.0, theta_star, 1e-11, 1 << 12);
        let right = tanh_sinh(&f, theta_star, std::f64::consts::PI, 1e-11, 1 << 12);
        match (left, right) {
            (Ok(a), Ok(b)) => a.value + b.value,
            _ => f64::NAN,
        }
    } else {
        tanh_sinh(&f, 0.0, std::f64::consts::PI, 1e-11, 1 << 12)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };
    if integral.is_nan() {
        return f64::NAN;
    }
    if !(integral > 0.0) {
        return f64::NEG_INFINITY;
    }
    beta.ln() - om.ln() - x.ln() / om - s + (integral / std::f64::consts::PI).ln()
}

/// One-sided stable density σ_t^(β)(τ), evaluated directly (no cache).
///
/// Returns exact 0 once the log of the value drops below -745 (the τ → 0
/// essential singularity); downstream quadrature treats that region as
/// negligible.
pub fn stable_density(beta: StableIndex, t: f64, tau: f64) -> Result<f64> {
    require_positive("stable_density", "t", t)?;
    require_positive("stable_density", "tau", tau)?;
    let (_, tau1, factor) = stable_scaling(beta, t, tau)?;
    let lg = stable_log_density_unit(beta.get(), tau1);
    if lg.is_nan() {
        return Err(Error::quadrature(
            "stable_density",
            format!("theta-integral did not converge at beta={} tau={tau1}", beta.get()),
        ));
    }
    Ok(if lg < -745.0 { 0.0 } else { factor * lg.exp() })
}

/// Scaling reduction σ_t(τ) = factor · σ_1(tau1): returns (1, τ t^{-1/β}, t^{-1/β}).
pub fn stable_scaling(beta: StableIndex, t: f64, tau: f64) -> Result<(f64, f64, f64)> {
    require_positive("stable_scaling", "t", t)?;
    require_positive("stable_scaling", "tau", tau)?;
    let factor = t.powf(-1.0 / beta.get());
    Ok((1.0, tau * factor, factor))
}

/// |∫_0^∞ e^{-τλ} σ_1^(β)(τ) dτ - e^{-λ^β}|, the defining Laplace identity
/// measured by adaptive quadrature of the direct density.
pub fn laplace_check(beta: StableIndex, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            "laplace_check",
            format!("lambda must be >= 0, got {lambda}"),
        ));
    }
    let b = beta.get();
    let om = 1.0 - b;
    let c1 = b / om;
    // below tau_uf the density is flushed to zero
    let tau_uf = (log_a_origin(b).exp() / 745.0).powf(1.0 / c1);
    let u_lo = tau_uf.ln() - 0.5;
    // tail: σ_1(τ) ≲ K τ^{-1-β}; exponential cut for λ > 0
    let u_hi = if lambda > 0.0 {
        (745.0 / lambda).max(8.0).ln()
    } else {
        // K T^{-β} / β ≤ 1e-9 with a generous K
        ((10.0 / 1e-9_f64).powf(1.0 / b)).ln()
    };
    let integrand = |u: f64| -> f64 {
        let tau = u.exp();
        let lg = stable_log_density_unit(b, tau);
        let expo = lg - lambda * tau + u;
        if expo < -745.0 {
            0.0
        } else {
            expo.exp()
        }
    };
    let mut points = vec![u_lo];
    for split in [0.0, HUMBERT_MIN_X.ln()] {
        if split > u_lo && split < u_hi {
            points.push(split);
        }
    }
    points.push(u_hi);
    // the outer tolerance sits above the noise floor of the nested density
    // evaluations (each carries ~1e-11 of its own quadrature error), which
    // otherwise stalls the panel refinement for β near 1
    let integral = integrate_split(integrand, &points, 3e-9, 1e-300, 4096).map_err(|e| {
        Error::quadrature("laplace_check", format!("beta={b} lambda={lambda}: {e}"))
    })?;
    Ok((integral.value - (-lambda.powf(b)).exp()).abs())
}

/// The Appendix-A style envelope of σ_1: `A · exp(-C τ^{-c1}) / τ^{1+α/2}`
/// with distinct constants in the lower and upper bounds.
///
/// Convention: the larger exponential constant gives the smaller (lower)
/// envelope, so `c_lo ≥ c_hi`. Prefactors default to 1 and are fitted by
/// [`SubordinatorEnvelopeParams::fit`].
#[derive(Debug, Clone, Copy)]
pub struct SubordinatorEnvelopeParams {
    pub alpha: f64,
    /// α/(2-α)
    pub c1: f64,
    /// (2-α/2)/(2-α)
    pub c2: f64,
    pub c_lo: f64,
    pub c_hi: f64,
    pub a_lo: f64,
    pub a_hi: f64,
}

impl SubordinatorEnvelopeParams {
    pub fn for_alpha(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain(
                "SubordinatorEnvelopeParams",
                format!("alpha must lie in (0,2), got {alpha}"),
            ));
        }
        let beta = alpha / 2.0;
        // exact exponential rate of the τ→0 singularity
        let rate = log_a_origin(beta).exp();
        let params = SubordinatorEnvelopeParams {
            alpha,
            c1: alpha / (2.0 - alpha),
            c2: (2.0 - alpha / 2.0) / (2.0 - alpha),
            c_lo: 1.25 * rate,
            c_hi: 0.80 * rate,
            a_lo: 1.0,
            a_hi: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        if !(self.c_lo >= self.c_hi && self.c_hi > 0.0) {
            return Err(Error::domain(
                "SubordinatorEnvelopeParams",
                format!(
                    "need c_lo >= c_hi > 0, got c_lo={} c_hi={}",
                    self.c_lo, self.c_hi
                ),
            ));
        }
        if !(self.c1 > 0.0 && self.c2 > 1.0) {
            return Err(Error::domain(
                "SubordinatorEnvelopeParams",
                format!("need c1 > 0 and c2 > 1, got c1={} c2={}", self.c1, self.c2),
            ));
        }
        Ok(())
    }

    /// Fit the prefactors on a τ grid so that lower ≤ σ_1 ≤ upper holds at
    /// every grid point; the exponential rates stay at their analytic
    /// defaults. Grid points where both sides underflow are skipped.
    pub fn fit(alpha: f64, density: &StableDensity, tau_grid: &[f64]) -> Result<Self> {
        let mut params = Self::for_alpha(alpha)?;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for &tau in tau_grid {
            let sigma = density.density_unit(tau);
            if sigma <= 0.0 {
                continue;
            }
            let (shape_lo, shape_hi) = params.shapes(tau);
            if shape_lo > 0.0 {
                lo = lo.min(sigma / shape_lo);
            }
            if shape_hi > 0.0 {
                hi = hi.max(sigma / shape_hi);
            }
        }
        if !lo.is_finite() || hi <= 0.0 {
            return Err(Error::quadrature(
                "SubordinatorEnvelopeParams::fit",
                "no usable grid points: density underflows everywhere",
            ));
        }
        params.a_lo = lo;
        params.a_hi = hi;
        Ok(params)
    }

    fn shapes(&self, tau: f64) -> (f64, f64) {
        let power = -(1.0 + self.alpha / 2.0) * tau.ln();
        let decay = tau.powf(-self.c1);
        let lo = (-self.c_lo * decay + power).exp();
        let hi = (-self.c_hi * decay + power).exp();
        (lo, hi)
    }
}

/// Evaluate the two-sided subordinator envelope at τ; returns (lower, upper).
pub fn subordinator_envelope(params: &SubordinatorEnvelopeParams, tau: f64) -> Result<(f64, f64)> {
    require_positive("subordinator_envelope", "tau", tau)?;
    params.validate()?;
    let (lo, hi) = params.shapes(tau);
    Ok((params.a_lo * lo, params.a_hi * hi))
}

// ---------------------------------------------------------------------------
// cached evaluator
// ---------------------------------------------------------------------------

const CHEB_DEGREE: usize = 20;
const TABLE_MAX_LN_TAU: f64 = 27.631; // ln 1e12; beyond this the series is cheap

#[derive(Debug, Clone)]
struct ChebSegment {
    lo: f64,
    hi: f64,
    coeffs: [f64; CHEB_DEGREE + 1],
}

impl ChebSegment {
    fn fit(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> ChebSegment {
        let n = CHEB_DEGREE + 1;
        let mut values = [0.0; CHEB_DEGREE + 1];
        for (j, v) in values.iter_mut().enumerate() {
            let x = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
            *v = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * x);
        }
        let mut coeffs = [0.0; CHEB_DEGREE + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                acc += v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
            }
            *c = 2.0 * acc / n as f64;
        }
        coeffs[0] *= 0.5;
        ChebSegment { lo, hi, coeffs }
    }

    fn eval(&self, u: f64) -> f64 {
        let x = (2.0 * u - self.lo - self.hi) / (self.hi - self.lo);
        let mut b0 = 0.0;
        let mut b1 = 0.0;
        for &c in self.coeffs.iter().rev() {
            let b2 = b1;
            b1 = b0;
            b0 = 2.0 * x * b1 - b2 + c;
        }
        b0 - x * b1
    }
}

/// Immutable cached evaluator of σ_1^(β): piecewise Chebyshev interpolant of
/// ln σ_1 on a log-τ grid, falling back to the large-argument series beyond
/// the table and to exact 0 below the underflow point.
#[derive(Debug)]
pub struct StableDensity {
    beta: f64,
    u_lo: f64,
    u_hi: f64,
    segments: Vec<ChebSegment>,
    fit_error: f64,
}

impl StableDensity {
    pub fn new(beta: StableIndex) -> StableDensity {
        let b = beta.get();
        let c1 = b / (1.0 - b);
        // ln σ_1 ≈ -a0 τ^{-c1} + lower order: start the table where the
        // density is just above the underflow flush
        let u_lo = ((log_a_origin(b).exp() / 780.0).powf(1.0 / c1)).ln();
        let u_hi = TABLE_MAX_LN_TAU;
        let f = |u: f64| stable_log_density_unit(b, u.exp());
        let mut segments = Vec::new();
        let mut fit_error = 0.0_f64;
        let mut stack = vec![(u_lo, u_hi)];
        while let Some((lo, hi)) = stack.pop() {
            let seg = ChebSegment::fit(&f, lo, hi);
            // probe between the fit nodes
            let mut worst = 0.0_f64;
            for j in 0..=CHEB_DEGREE {
                let x = (std::f64::consts::PI * (j as f64 + 1.0) / (CHEB_DEGREE + 1) as f64).cos();
                let u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
                let err = (seg.eval(u) - f(u)).abs();
                worst = worst.max(err);
            }
            if worst > 1e-9 && hi - lo > 1e-5 {
                let mid = 0.5 * (lo + hi);
                stack.push((mid, hi));
                stack.push((lo, mid));
            } else {
                fit_error = fit_error.max(worst);
                segments.push(seg);
            }
        }
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        StableDensity {
            beta: b,
            u_lo,
            u_hi,
            segments,
            fit_error,
        }
    }

    /// Shared, lazily built evaluator for this β.
    pub fn get(beta: StableIndex) -> Arc<StableDensity> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<StableDensity>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = beta.get().to_bits();
        if let Some(found) = cache.lock().expect("density cache poisoned").get(&key) {
            return Arc::clone(found);
        }
        // build outside the lock: construction takes tens of milliseconds
        let built = Arc::new(StableDensity::new(beta));
        let mut guard = cache.lock().expect("density cache poisoned");
        Arc::clone(guard.entry(key).or_insert(built))
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Largest observed interpolation error (in ln σ, i.e. relative in σ).
    pub fn fit_error(&self) -> f64 {
        self.fit_error
    }

    /// τ below which σ_1 is flushed to exact zero.
    pub fn tau_underflow(&self) -> f64 {
        self.u_lo.exp()
    }

    pub fn log_density_unit(&self, tau: f64) -> f64 {
        if !(tau > 0.0) {
            return f64::NEG_INFINITY;
        }
        let u = tau.ln();
        if u < self.u_lo {
            return f64::NEG_INFINITY;
        }
        if u > self.u_hi {
            return humbert_series(self.beta, tau).ln();
        }
        let idx = self
            .segments
            .partition_point(|seg| seg.hi < u)
            .min(self.segments.len() - 1);
        self.segments[idx].eval(u)
    }

    pub fn density_unit(&self, tau: f64) -> f64 {
        let lg = self.log_density_unit(tau);
        if lg < -745.0 {
            0.0
        } else {
            lg.exp()
        }
    }

    /// σ_t(τ) through the exact scaling identity.
    pub fn density(&self, t: f64, tau: f64) -> Result<f64> {
        require_positive("StableDensity::density", "t", t)?;
        require_positive("StableDensity::density", "tau", tau)?;
        let factor = t.powf(-1.0 / self.beta);
        Ok(factor * self.density_unit(tau * factor))
    }
}
