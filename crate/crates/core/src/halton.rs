//! Halton low-discrepancy sequences, used to sample the 5-dimensional 3G
//! domain where a full grid is unaffordable. Deterministic by construction;
//! prefixes are nested, so doubling the sample count refines rather than
//! replaces a sweep.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in the given base.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut frac = inv;
    while index > 0 {
        result += (index % base) as f64 * frac;
        index /= base;
        frac *= inv;
    }
    result
}

/// The `i`-th Halton point in `dim` dimensions (dim ≤ 8), components in
/// (0,1). The first 32 indices are skipped to avoid the correlated warm-up
/// prefix of the higher bases.
pub fn halton_point(i: usize, dim: usize, out: &mut [f64]) {
    assert!(dim <= PRIMES.len() && out.len() >= dim);
    let index = (i + 33) as u64;
    for (d, slot) in out.iter_mut().take(dim).enumerate() {
        *slot = radical_inverse(index, PRIMES[d]).clamp(1e-12, 1.0 - 1e-12);
    }
}

/// Map a (0,1) coordinate onto [lo, hi] with logarithmic spacing.
pub fn log_map(u: f64, lo: f64, hi: f64) -> f64 {
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base2() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(4, 2), 0.125);
    }

    #[test]
    fn points_fill_the_cube_evenly() {
        // crude discrepancy check: each axis-aligned half must get close to
        // half of the points
        let n = 4096;
        let mut counts = [0usize; 5];
        let mut p = [0.0; 5];
        for i in 0..n {
            halton_point(i, 5, &mut p);
            for d in 0..5 {
                if p[d] < 0.5 {
                    counts[d] += 1;
                }
            }
        }
        for (d, &count) in counts.iter().enumerate() {
            let frac = count as f64 / n as f64;
            assert!((frac - 0.5).abs() < 0.02, "dim {d}: {frac}");
        }
    }

    #[test]
    fn log_map_endpoints() {
        assert!((log_map(0.0, 1e-2, 1e2) - 1e-2).abs() < 1e-15);
        assert!((log_map(1.0, 1e-2, 1e2) / 1e2 - 1.0).abs() < 1e-13);
        assert!((log_map(0.5, 1e-2, 1e2) - 1.0).abs() < 1e-14);
    }
}
