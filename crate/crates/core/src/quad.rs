//! Adaptive quadrature primitives shared by the kernel and subordinator
//! evaluators: a Gauss–Kronrod 10/21 panel rule with worst-interval-first
//! refinement, and a tanh-sinh rule for integrands whose endpoint behaviour
//! is singular or boundary-layered.

use crate::{Error, Result};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    /// Number of 21-point panels evaluated.
    pub panels: usize,
}

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG10: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// One Gauss–Kronrod 21-point panel; returns (kronrod, |kronrod - gauss|).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);

    let f_center = f(center);
    let mut gauss = 0.0;
    let mut kronrod = WGK21[10] * f_center;

    for j in 0..5 {
        let x = half * XGK21[2 * j + 1];
        let f1 = f(center - x);
        let f2 = f(center + x);
        gauss += WG10[j] * (f1 + f2);
        kronrod += WGK21[2 * j + 1] * (f1 + f2);
    }
    for j in 0..5 {
        let x = half * XGK21[2 * j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK21[2 * j] * (f1 + f2);
    }

    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Refines the panel with the largest error estimate until the summed error
/// drops below `rel_tol * |integral|` (or below `abs_floor`, whichever is
/// larger), or errors out when `max_panels` panels were not enough.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    integrate_split(f, &[a, b], rel_tol, abs_floor, max_panels)
}

/// As [`integrate`], but with interior break points: `points` must be an
/// increasing sequence; each consecutive pair seeds one initial panel.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    rel_tol: f64,
    abs_floor: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::quadrature(
            "integrate",
            "need at least two break points",
        ));
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::quadrature(
                "integrate",
                format!("break points not increasing: {} then {}", w[0], w[1]),
            ));
        }
    }

    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in points.windows(2) {
        let (v, e) = gk21(&f, w[0], w[1]);
        panels.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let target = (rel_tol * total.abs()).max(abs_floor);
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                panels: panels.len(),
            });
        }
        if panels.len() >= max_panels {
            return Err(Error::quadrature(
                "integrate",
                format!(
                    "panel budget {max_panels} exhausted: error {err:.3e} > target {target:.3e}"
                ),
            ));
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty panel list");
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // interval too narrow to split further; accept its estimate
            panels.push(Panel {
                error: 0.0,
                ..worst
            });
            continue;
        }
        let (v1, e1) = gk21(&f, worst.a, mid);
        let (v2, e2) = gk21(&f, mid, worst.b);
        panels.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        panels.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Integrate `f` over a positive interval in log coordinates.
///
/// A coarse log-spaced scan of `bracket` locates the support of the
/// integrand (peak and the points where it has dropped by e^{-80}); adaptive
/// Gauss–Kronrod then runs on u = ln x over the trimmed range, seeded with
/// the optional interior `splits` (original variable). Returns zero when the
/// scan finds no positive value.
pub fn integrate_log_domain<F: Fn(f64) -> f64>(
    f: F,
    bracket: (f64, f64),
    splits: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let (blo, bhi) = bracket;
    if !(blo > 0.0 && bhi > blo) {
        return Err(Error::quadrature(
            "integrate_log_domain",
            format!("bad bracket ({blo:e}, {bhi:e})"),
        ));
    }
    let u_lo = blo.ln();
    let u_hi = bhi.ln();
    const N_SCAN: usize = 96;
    let step = (u_hi - u_lo) / (N_SCAN - 1) as f64;
    let g = |u: f64| {
        let x = u.exp();
        let v = f(x) * x;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut scan = [0.0f64; N_SCAN];
    let mut peak_idx = 0;
    let mut peak = 0.0f64;
    for (i, slot) in scan.iter_mut().enumerate() {
        let v = g(u_lo + step * i as f64);
        *slot = v;
        if v > peak {
            peak = v;
            peak_idx = i;
        }
    }
    if peak == 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }
    let floor = peak * (-80.0f64).exp();
    let mut left = peak_idx;
    while left > 0 && scan[left] > floor {
        left -= 1;
    }
    let mut right = peak_idx;
    while right + 1 < N_SCAN && scan[right] > floor {
        right += 1;
    }
    let a = u_lo + step * left as f64;
    let b = u_lo + step * right as f64;
    let mut points = vec![a];
    for &s in splits {
        if s > 0.0 {
            let u = s.ln();
            if u > a + 1e-12 && u < b - 1e-12 {
                points.push(u);
            }
        }
    }
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();
    integrate_split(g, &points, rel_tol, f64::MIN_POSITIVE, max_panels)
}

/// Tanh-sinh (double-exponential) quadrature of `f` over `(a, b)`.
///
/// Node density increases doubly exponentially towards both endpoints, which
/// resolves endpoint singularities and boundary layers that defeat panel
/// rules. Levels are doubled until two successive levels agree to `rel_tol`
/// or the node budget `max_nodes` is reached.
pub fn tanh_sinh<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<QuadResult> {
    if !(a < b) {
        return Err(Error::quadrature("tanh_sinh", "empty interval"));
    }
    let half = 0.5 * (b - a);
    const W_MAX: f64 = 6.6; // tanh((pi/2) sinh 6.6) is 1 within 1e-400
    let eval = |w: f64| -> f64 {
        let sh = (std::f64::consts::FRAC_PI_2) * w.sinh();
        let x = sh.tanh();
        // node weight: (pi/2) cosh(w) / cosh^2(sh)
        let dx = (std::f64::consts::FRAC_PI_2) * w.cosh() / sh.cosh().powi(2);
        if !dx.is_finite() || dx == 0.0 {
            return 0.0;
        }
        // distance to endpoints computed stably: 1 -/+ tanh(sh) = 2/(1+e^{±2 sh})
        let dist_hi = 2.0 / (1.0 + (2.0 * sh).exp()); // 1 - x
        let dist_lo = 2.0 / (1.0 + (-2.0 * sh).exp()); // 1 + x
        let t = if x >= 0.0 {
            b - half * dist_hi
        } else {
            a + half * dist_lo
        };
        let t = t.clamp(a, b);
        if t <= a || t >= b {
            return 0.0;
        }
        let v = f(t);
        if v.is_finite() {
            v * dx
        } else {
            0.0
        }
    };

    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut nodes = 1usize;
    let mut prev: Option<f64> = None;
    loop {
        // add the new nodes for this level: odd multiples of h for h<1,
        // all multiples for the first level
        let mut level_sum = 0.0;
        let mut k = 1usize;
        while (k as f64) * h <= W_MAX {
            let first_level = h >= 1.0;
            if first_level || k % 2 == 1 {
                let w = (k as f64) * h;
                level_sum += eval(w) + eval(-w);
                nodes += 2;
            }
            k += 1;
        }
        sum += level_sum;
        let estimate = sum * h * half;
        if let Some(p) = prev {
            let diff = (estimate - p).abs();
            if diff <= rel_tol * estimate.abs().max(f64::MIN_POSITIVE) || estimate == 0.0 {
                return Ok(QuadResult {
                    value: estimate,
                    abs_error: diff,
                    panels: nodes,
                });
            }
        }
        if nodes >= max_nodes {
            return Err(Error::quadrature(
                "tanh_sinh",
                format!("node budget {max_nodes} exhausted at level h={h}"),
            ));
        }
        prev = Some(estimate);
        h *= 0.5;
    }
}
