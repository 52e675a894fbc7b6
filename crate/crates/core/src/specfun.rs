//! Scaled special functions underlying the kernel formulas: the modified
//! Bessel function I_ν in exponentially scaled form, the regularized Gauss
//! hypergeometric function, and the log-Gamma function.
//!
//! I_ν is only ever evaluated as `e^{-z} I_ν(z)`; the kernel formulas are
//! rearranged so the unscaled function (which overflows near the diagonal
//! for small times) is never needed.

use crate::{Error, Result};

/// Order ν of the modified Bessel function I_ν. The kernel formulas use
/// ν = ζ - 1/2 with ζ > -1/2, so orders below -1/2 never occur and the
/// excluded orders {-1, -2, ...} are unreachable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < -0.5 {
            return Err(Error::domain(
                "BesselOrder",
                format!("order must be finite and >= -1/2, got {nu}"),
            ));
        }
        Ok(BesselOrder { nu })
    }

    pub fn get(self) -> f64 {
        self.nu
    }
}

/// Natural log of the Gamma function for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "log_gamma",
            format!("x must be > 0, got {x}"),
        ));
    }
    Ok(libm::lgamma(x))
}

/// Reciprocal Gamma 1/Γ(x) for any real x; zero at the poles of Γ.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    let (lg, sign) = libm::lgamma_r(x);
    (sign as f64) * (-lg).exp()
}

/// Digamma function ψ(x) for x not a nonpositive integer.
pub(crate) fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        if x == x.floor() {
            return f64::NAN;
        }
        // reflection: ψ(1-x) - ψ(x) = π cot(πx)
        let pix = std::f64::consts::PI * x;
        return digamma(1.0 - x) - std::f64::consts::PI * (pix.cos() / pix.sin());
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series with Bernoulli coefficients B_2 .. B_12
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    acc + x.ln() - 0.5 * inv - series
}

/// Below this order-dependent threshold the power series is used; above it,
/// the large-argument expansion. The two branches agree to better than 1e-12
/// in a window around the threshold (covered by tests).
fn series_asymptotic_switch(nu: f64) -> f64 {
    (4.0 * nu * nu).max(30.0)
}

/// Exponentially scaled modified Bessel function `e^{-z} I_ν(z)` for z ≥ 0.
///
/// Finite for every z (no overflow): the scaling removes the e^z growth
/// exactly in the regime where the kernel's Gaussian factor would otherwise
/// overflow. For orders ν ∈ (-1/2, 0) the value diverges as z → 0+; this
/// never occurs in kernel evaluation since there z = rs/(2t) > 0.
pub fn bessel_i_scaled(order: BesselOrder, z: f64) -> Result<f64> {
    let nu = order.get();
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "bessel_i_scaled",
            format!("argument must be >= 0, got {z}"),
        ));
    }
    if z == 0.0 {
        return Ok(if nu == 0.0 {
            1.0
        } else if nu > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if z <= series_asymptotic_switch(nu) {
        Ok(scaled_series(nu, z))
    } else {
        Ok(scaled_asymptotic(nu, z))
    }
}

/// ln(e^{-z} I_ν(z)) for z > 0, without intermediate underflow: the kernel
/// adds this to prefactor logs whose poles it cancels.
pub(crate) fn bessel_i_scaled_ln(nu: f64, z: f64) -> f64 {
    if z <= series_asymptotic_switch(nu) {
        scaled_series_ln(nu, z)
    } else {
        scaled_asymptotic(nu, z).ln()
    }
}

/// Power series Σ_k (z²/4)^k / (k! Γ(ν+k+1)), scaled by (z/2)^ν e^{-z}.
/// All terms are positive, so there is no cancellation; the partial sums are
/// rescaled on the fly to dodge overflow for large z.
fn scaled_series(nu: f64, z: f64) -> f64 {
    scaled_series_ln(nu, z).exp()
}

fn scaled_series_ln(nu: f64, z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut term = rgamma(nu + 1.0);
    let mut sum = term;
    let mut log_offset = 0.0;
    let mut k = 0.0;
    loop {
        term *= q / ((k + 1.0) * (nu + k + 1.0));
        sum += term;
        k += 1.0;
        if term <= sum * 1e-18 || k > 2000.0 {
            break;
        }
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            log_offset += 250.0 * std::f64::consts::LN_10;
        }
    }
    nu * (0.5 * z).ln() - z + sum.ln() + log_offset
}

/// Large-argument expansion: e^{-z} I_ν(z) = [S₋(z) - sin(νπ) e^{-2z} S₊(z)] / √(2πz),
/// with S∓ the alternating/plain Hankel series in 1/z, truncated at the
/// smallest term.
fn scaled_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0; // a_k(ν)
    let mut s_minus = 1.0;
    let mut s_plus = 1.0;
    let mut prev_abs = f64::INFINITY;
    let mut sign = 1.0;
    for k in 0..60u32 {
        let kf = k as f64;
        let odd = 2.0 * kf + 1.0;
        a *= (mu - odd * odd) / (8.0 * (kf + 1.0));
        let term = a / z.powi(k as i32 + 1);
        let t_abs = term.abs();
        if t_abs >= prev_abs {
            break; // divergence onset: optimal truncation
        }
        sign = -sign;
        s_minus += sign * term;
        s_plus += term;
        prev_abs = t_abs;
        if t_abs < 1e-18 {
            break;
        }
    }
    let reflected = if z < 400.0 {
        -(std::f64::consts::PI * nu).sin() * (-2.0 * z).exp() * s_plus
    } else {
        0.0
    };
    (s_minus + reflected) / (2.0 * std::f64::consts::PI * z).sqrt()
}

/// Regularized Gauss hypergeometric function ₂F̃₁(a,b;c;z) = ₂F₁(a,b;c;z)/Γ(c)
/// for z ∈ [0, 1). Finite for every real c.
///
/// Near z = 1 the defining series converges too slowly for the α=1 kernel
/// closed form (whose argument tends to 1 as t → 0 with r ≈ s), so for
/// z > 0.75 the evaluation is routed through the z → 1-z connection
/// formulas, including the logarithmic cases where c-a-b is an integer.
pub fn gauss_2f1_reg(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::domain(
            "gauss_2f1_reg",
            format!("argument must lie in [0,1), got {z}"),
        ));
    }
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if !v.is_finite() {
            return Err(Error::domain(
                "gauss_2f1_reg",
                format!("{name} must be finite"),
            ));
        }
    }
    Ok(hyp2f1_reg(a, b, c, z))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn hyp2f1_reg(a: f64, b: f64, c: f64, z: f64) -> f64 {
    hyp2f1_reg_with_w(a, b, c, z, 1.0 - z)
}

/// ₂F̃₁ with the complement w = 1-z supplied by the caller. The α=1 kernel
/// computes w from an exact factorization, sidestepping the cancellation in
/// 1 - z when z is within roundoff of 1.
pub(crate) fn hyp2f1_reg_with_w(a: f64, b: f64, c: f64, z: f64, w: f64) -> f64 {
    // polynomial cases terminate for any z in [0,1)
    if is_nonpositive_integer(a) {
        return reg_series(a, b, c, z, Some((-a) as usize));
    }
    if is_nonpositive_integer(b) {
        return reg_series(a, b, c, z, Some((-b) as usize));
    }
    if w >= 0.25 {
        return reg_series(a, b, c, z, None);
    }

    let d = c - a - b;
    let m = d.round();
    if (d - m).abs() > 0.02 {
        return connection_generic(a, b, c, w);
    }
    // integer (logarithmic) cases
    if m < 0.0 {
        // Euler transform flips d to -d > 0; new upper parameters may
        // terminate the series, so re-enter from the top.
        return w.powf(d) * hyp2f1_reg_with_w(c - a, c - b, c, z, w);
    }
    connection_log_case(a, b, m as usize, w)
}

/// Defining series of ₂F̃₁. `terminate_at` sums exactly k = 0..=n when the
/// series is a polynomial.
fn reg_series(a: f64, b: f64, c: f64, z: f64, terminate_at: Option<usize>) -> f64 {
    // u_k = (a)_k (b)_k z^k / k!, rg_k = 1/Γ(c+k)
    let mut u = 1.0;
    let mut rg = rgamma(c);
    let mut k = 0usize;
    let mut sum = 0.0;
    let mut small_streak = 0;
    let max_k = terminate_at.map(|n| n + 1).unwrap_or(4000);
    while k < max_k {
        let kf = k as f64;
        let term = u * rg;
        sum += term;
        if terminate_at.is_none() {
            if term.abs() <= sum.abs() * 1e-17 + f64::MIN_POSITIVE {
                small_streak += 1;
                if small_streak >= 3 && kf > a.abs() && kf > b.abs() {
                    break;
                }
            } else {
                small_streak = 0;
            }
        }
        u *= (a + kf) * (b + kf) * z / (kf + 1.0);
        let ck = c + kf;
        if ck == 0.0 {
            // pole of Γ(c+k): 1/Γ jumps to the next regular value 1/Γ(1)
            // after the regularized term (which is zero) is skipped.
            rg = rgamma(c + kf + 1.0);
        } else {
            rg /= ck;
        }
        k += 1;
    }
    sum
}

/// Plain (unregularized) Gauss series, for use inside connection formulas
/// where the lower parameter is never a nonpositive integer.
fn plain_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    for _ in 0..4000 {
        term *= (a + k) * (b + k) * z / ((k + 1.0) * (c + k));
        sum += term;
        k += 1.0;
        if term.abs() <= sum.abs() * 1e-17 + f64::MIN_POSITIVE && k > a.abs() && k > b.abs() {
            break;
        }
    }
    sum
}

/// z → 1-z connection for non-integer d = c-a-b (DLMF 15.8.4), divided by Γ(c).
fn connection_generic(a: f64, b: f64, c: f64, w: f64) -> f64 {
    let d = c - a - b;
    // Γ(d)/(Γ(c-a)Γ(c-b)) and Γ(-d)/(Γ(a)Γ(b)) with signs via lgamma_r
    let coeff = |num: f64, den1: f64, den2: f64| -> f64 {
        if is_nonpositive_integer(den1) || is_nonpositive_integer(den2) {
            return 0.0;
        }
        let (ln, sn) = libm::lgamma_r(num);
        let (l1, s1) = libm::lgamma_r(den1);
        let (l2, s2) = libm::lgamma_r(den2);
        ((sn * s1 * s2) as f64) * (ln - l1 - l2).exp()
    };
    let first = coeff(d, c - a, c - b) * plain_series(a, b, 1.0 - d, w);
    let second = coeff(-d, a, b) * w.powf(d) * plain_series(c - a, c - b, 1.0 + d, w);
    first + second
}

/// z → 1-z connection for d = c-a-b = m a nonnegative integer
/// (A&S 15.3.10/15.3.11), divided by Γ(c) = Γ(a+b+m).
fn connection_log_case(a: f64, b: f64, m: usize, w: f64) -> f64 {
    let ln_w = w.ln();
    let mf = m as f64;

    // finite part: Γ(m)/(Γ(a+m)Γ(b+m)) Σ_{n<m} (a)_n(b)_n / (n!(1-m)_n) w^n
    let mut finite = 0.0;
    if m >= 1 {
        let (lg_m, _) = libm::lgamma_r(mf);
        let (la, sa) = libm::lgamma_r(a + mf);
        let (lb, sb) = libm::lgamma_r(b + mf);
        let front = ((sa * sb) as f64) * (lg_m - la - lb).exp();
        let mut term = 1.0;
        let mut acc = 0.0;
        for n in 0..m {
            let nf = n as f64;
            acc += term;
            if n + 1 < m {
                term *= (a + nf) * (b + nf) * w / ((nf + 1.0) * (1.0 - mf + nf));
            }
        }
        finite = front * acc;
    }

    // logarithmic part:
    // (-1)^{m+1} w^m / (Γ(a)Γ(b)) Σ_{n≥0} ((a+m)_n(b+m)_n / (n!(n+m)!)) w^n
    //   · [ln w - ψ(n+1) - ψ(n+m+1) + ψ(a+m+n) + ψ(b+m+n)]
    let log_part = if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        0.0 // 1/Γ at a pole: the whole group vanishes
    } else {
        let (la, sa) = libm::lgamma_r(a);
        let (lb, sb) = libm::lgamma_r(b);
        let (lfact, _) = libm::lgamma_r(mf + 1.0);
        // u_0 = 1/(0! m!)
        let mut u = ((sa * sb) as f64) * (-la - lb - lfact).exp();
        let sign = if m.is_multiple_of(2) { -1.0 } else { 1.0 };
        let mut acc = 0.0;
        let mut n = 0.0;
        for _ in 0..4000 {
            let bracket = ln_w - digamma(n + 1.0) - digamma(n + mf + 1.0)
                + digamma(a + mf + n)
                + digamma(b + mf + n);
            let term = u * bracket;
            acc += term;
            u *= (a + mf + n) * (b + mf + n) * w / ((n + 1.0) * (n + mf + 1.0));
            n += 1.0;
            if term.abs() <= acc.abs() * 1e-17 + f64::MIN_POSITIVE && n > 4.0 {
                break;
            }
        }
        sign * w.powi(m as i32) * acc
    };

    finite + log_part
}
