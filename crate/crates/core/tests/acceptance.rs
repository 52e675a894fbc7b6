//! Acceptance suite: every verification target at its stated tolerance,
//! one pass/fail line per criterion (visible with `--nocapture`).
//!
//! Comparability statements assert empirical-constant finiteness plus
//! refinement stability; quantitative checks (closed forms, semigroup
//! identities, Laplace transform, scaling) assert hard tolerances.

use besselheat::verify::{
    run_suite, smoke_config, sweep_ratio, sweep_ratio_samples, Axis, CheckConfig, CheckStatus,
    GridSpec, PointOutcome, RatioCheck, Spacing, SuiteConfig,
};
use besselheat::{
    chapman_residual, chapman_residual_alpha, laplace_check, levy_density_half, mc_kernel,
    normalization_residual, normalization_residual_alpha, p2, p2_zeta1_closed, p_alpha,
    p_alpha1_closed, scaling_reduce, stable_density, KernelParams, QuadratureConfig, StableIndex,
};

fn verdict(n: u8, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n:02} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn grid_trs(n: usize, lo: f64, hi: f64) -> GridSpec {
    GridSpec::new(vec![
        Axis::new("t", 1e-2, 1e2, n, Spacing::Log),
        Axis::new("r", lo, hi, n, Spacing::Log),
        Axis::new("s", lo, hi, n, Spacing::Log),
    ])
}

#[test]
fn criterion_01_closed_form_cross_check() {
    let quad = QuadratureConfig::with_rel_tol(1e-8);
    let grid = grid_trs(10, 1e-2, 1e2);
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for &zeta in &[0.0, 0.5, 1.0, 2.5] {
        let params = KernelParams::new(zeta, 1.0).unwrap();
        let check = RatioCheck::new("c1", &["t", "r", "s"], |p: &[f64]| {
            let closed = p_alpha1_closed(zeta, p[0], p[1], p[2])?;
            let q = p_alpha(&params, p[0], p[1], p[2], &quad)?;
            Ok(PointOutcome::Ratio {
                numerator: (q - closed).abs(),
                denominator: closed,
            })
        })
        .residual(1e-6);
        let report = sweep_ratio(&check, &grid, &quad).unwrap();
        if report.sup_ratio > worst {
            worst = report.sup_ratio;
            worst_at = format!("zeta={zeta} at {:?}", report.argmax_point);
        }
        assert_eq!(report.n_points, 1000, "zeta={zeta}");
        if report.status != CheckStatus::Pass {
            verdict(
                1,
                "p_alpha vs alpha=1 closed form",
                false,
                &format!("{report:?}"),
            );
        }
    }
    verdict(
        1,
        "p_alpha vs alpha=1 closed form",
        worst <= 1e-6,
        &format!("max relative deviation {worst:.3e} ({worst_at}), tolerance 1e-6"),
    );
}

#[test]
fn criterion_02_alpha2_closed_form() {
    let quad = QuadratureConfig::default();
    let grid = grid_trs(10, 1e-2, 1e2);
    let check = RatioCheck::new("c2", &["t", "r", "s"], |p: &[f64]| {
        let closed = p2_zeta1_closed(p[0], p[1], p[2])?;
        if closed < 1e-280 {
            return Ok(PointOutcome::Skip); // both sides underflow
        }
        let direct = p2(1.0, p[0], p[1], p[2])?;
        Ok(PointOutcome::Ratio {
            numerator: (direct - closed).abs(),
            denominator: closed,
        })
    })
    .residual(1e-11);
    let report = sweep_ratio(&check, &grid, &quad).unwrap();
    verdict(
        2,
        "p2 vs zeta=1 Gaussian-difference formula",
        report.status == CheckStatus::Pass,
        &format!(
            "max relative deviation {:.3e} over {} points ({} underflow-skipped), tolerance 1e-11",
            report.sup_ratio, report.n_points, report.n_skipped
        ),
    );
}

#[test]
fn criterion_03_semigroup_identities() {
    let quad = QuadratureConfig::with_rel_tol(1e-7);
    let zetas = [0.0, 0.5, 1.0, 2.5];
    let alphas = [0.5, 1.0, 1.5, 2.0];
    let norm_axes = [
        Axis::new("t", 1e-1, 1e1, 2, Spacing::Log),
        Axis::new("r", 1e-1, 1e1, 2, Spacing::Log),
    ];
    let chap_axes = [
        Axis::new("t", 0.2, 5.0, 2, Spacing::Log),
        Axis::new("t2", 0.2, 5.0, 2, Spacing::Log),
        Axis::new("r", 0.1, 10.0, 2, Spacing::Log),
        Axis::new("s", 0.1, 10.0, 2, Spacing::Log),
    ];
    let mut worst_norm = 0.0f64;
    let mut worst_chap = 0.0f64;
    for &zeta in &zetas {
        for &alpha in &alphas {
            let params = KernelParams::new(zeta, alpha).unwrap();
            let tol = if alpha == 2.0 { 1e-7 } else { 1e-5 };
            let check = RatioCheck::new("c3n", &["t", "r"], |p: &[f64]| {
                let resid = if alpha == 2.0 {
                    normalization_residual(zeta, p[0], p[1])?
                } else {
                    normalization_residual_alpha(&params, p[0], p[1], &quad)?
                };
                Ok(PointOutcome::Ratio {
                    numerator: resid,
                    denominator: 1.0,
                })
            })
            .residual(tol);
            let report = sweep_ratio_samples(&check, &norm_axes, 50).unwrap();
            assert_eq!(report.n_points, 50);
            assert!(
                report.status == CheckStatus::Pass,
                "normalization zeta={zeta} alpha={alpha}: {:?}",
                report
            );
            worst_norm = worst_norm.max(report.sup_ratio / tol);

            let check = RatioCheck::new("c3c", &["t", "t2", "r", "s"], |p: &[f64]| {
                let resid = if alpha == 2.0 {
                    chapman_residual(zeta, p[0], p[1], p[2], p[3])?
                } else {
                    chapman_residual_alpha(&params, p[0], p[1], p[2], p[3], &quad)?
                };
                Ok(PointOutcome::Ratio {
                    numerator: resid,
                    denominator: 1.0,
                })
            })
            .residual(1e-5);
            let report = sweep_ratio_samples(&check, &chap_axes, 50).unwrap();
            assert_eq!(report.n_points, 50);
            assert!(
                report.status == CheckStatus::Pass,
                "chapman zeta={zeta} alpha={alpha}: {:?}",
                report
            );
            worst_chap = worst_chap.max(report.sup_ratio);
        }
    }
    verdict(
        3,
        "normalization and Chapman-Kolmogorov residuals",
        true,
        &format!(
            "worst normalization residual {worst_norm:.3} of tolerance; worst Chapman residual {worst_chap:.3e} (tol 1e-5); 50 spot points per (zeta,alpha)"
        ),
    );
}

#[test]
fn criterion_04_scaling_identity() {
    let quad = QuadratureConfig::with_rel_tol(1e-7);
    let axes = [
        Axis::new("t", 1e-2, 1e2, 2, Spacing::Log),
        Axis::new("r", 1e-2, 1e2, 2, Spacing::Log),
        Axis::new("s", 1e-2, 1e2, 2, Spacing::Log),
    ];
    let mut worst = 0.0f64;
    for &zeta in &[0.0, 0.5, 1.0, 2.5] {
        for &alpha in &[0.5, 1.0, 1.5, 2.0] {
            let params = KernelParams::new(zeta, alpha).unwrap();
            let check = RatioCheck::new("c4", &["t", "r", "s"], |p: &[f64]| {
                let (t, r, s) = (p[0], p[1], p[2]);
                let (r1, s1, pref) = scaling_reduce(&params, t, r, s)?;
                let (lhs, rhs) = if alpha == 2.0 {
                    (p2(zeta, t, r, s)?, pref * p2(zeta, 1.0, r1, s1)?)
                } else {
                    (
                        p_alpha(&params, t, r, s, &quad)?,
                        pref * p_alpha(&params, 1.0, r1, s1, &quad)?,
                    )
                };
                if lhs == 0.0 && rhs == 0.0 {
                    // Gaussian tail underflow on both sides: identity trivially exact
                    return Ok(PointOutcome::Ratio {
                        numerator: 0.0,
                        denominator: 1.0,
                    });
                }
                Ok(PointOutcome::Ratio {
                    numerator: (lhs - rhs).abs(),
                    denominator: lhs.abs(),
                })
            })
            .residual(1e-14);
            let report = sweep_ratio_samples(&check, &axes, 1000).unwrap();
            assert!(
                report.status == CheckStatus::Pass,
                "zeta={zeta} alpha={alpha}: {report:?}"
            );
            worst = worst.max(report.sup_ratio);
        }
    }
    verdict(
        4,
        "scaling identity",
        worst <= 1e-14,
        &format!("max relative deviation {worst:.3e} over 1000 points x 16 (zeta,alpha) combos, tolerance 1e-14"),
    );
}

#[test]
fn criterion_05_subordinator_laplace_and_levy() {
    // Laplace identity on a log grid of lambda for each beta
    let mut worst_laplace = 0.0f64;
    for &beta in &[0.25, 0.5, 0.75, 0.9] {
        let idx = StableIndex::new(beta).unwrap();
        let mut lambda = 1e-2;
        while lambda <= 1e2 * (1.0 + 1e-12) {
            let resid = laplace_check(idx, lambda).unwrap();
            assert!(resid <= 1e-6, "beta={beta} lambda={lambda}: {resid:e}");
            worst_laplace = worst_laplace.max(resid);
            lambda *= 10f64.powf(0.5);
        }
    }
    // beta = 1/2 against the Lévy closed form
    let half = StableIndex::new(0.5).unwrap();
    let mut worst_levy = 0.0f64;
    let mut tau = 1e-3;
    while tau <= 1e8 {
        let closed = levy_density_half(1.0, tau).unwrap();
        if closed > 1e-290 {
            let got = stable_density(half, 1.0, tau).unwrap();
            worst_levy = worst_levy.max((got - closed).abs() / closed);
        }
        tau *= 2.9;
    }
    verdict(
        5,
        "subordinator Laplace identity and Lévy closed form",
        worst_laplace <= 1e-6 && worst_levy <= 1e-10,
        &format!("max Laplace residual {worst_laplace:.3e} (tol 1e-6); max Lévy deviation {worst_levy:.3e} (tol 1e-10)"),
    );
}

#[test]
fn criterion_06_sharp_envelope_stability() {
    let mut check = CheckConfig::new("sharp_env", "p_alpha_vs_sharp_envelope");
    check.zeta = Some(vec![-0.4, 0.0, 0.5, 1.0, 3.0]);
    check.alpha = Some(vec![0.5, 1.0, 1.5]);
    let config = SuiteConfig {
        name: "criterion6".into(),
        seed: 7,
        rel_tol: Some(1e-6),
        checks: vec![check],
    };
    let report = run_suite(&config).unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    assert_eq!(report.checks.len(), 15);
    for check in &report.checks {
        let ok = check.status == CheckStatus::Pass
            && check.sup_ratio.is_finite()
            && check.inf_ratio > 0.0
            && check.refinement_drift.map(|d| d < 0.10).unwrap_or(false);
        pass &= ok;
        lines.push(format!(
            "{}: sup {:.3e} inf {:.3e} drift {:.2e}{}",
            check.check_id,
            check.sup_ratio,
            check.inf_ratio,
            check.refinement_drift.unwrap_or(f64::NAN),
            check
                .note
                .clone()
                .map(|n| format!(" [{n}]"))
                .unwrap_or_default()
        ));
    }
    verdict(
        6,
        "Theorem-1.1 envelope comparability (alpha<2)",
        pass,
        &lines.join("; "),
    );
}

#[test]
fn criterion_07_regime_consolidation() {
    let mut check = CheckConfig::new("regime_env", "sharp_vs_regime_envelope");
    check.zeta = Some(vec![-0.4, 0.0, 0.5, 1.0, 3.0]);
    check.alpha = Some(vec![0.5, 1.0, 1.5]);
    let config = SuiteConfig {
        name: "criterion7".into(),
        seed: 7,
        rel_tol: Some(1e-6),
        checks: vec![check],
    };
    let report = run_suite(&config).unwrap();
    let mut pass = true;
    let mut lines = Vec::new();
    assert_eq!(report.checks.len(), 15);
    for check in &report.checks {
        let ok = check.status == CheckStatus::Pass
            && check.sup_ratio.is_finite()
            && check.inf_ratio > 0.0
            && check.refinement_drift.map(|d| d < 0.10).unwrap_or(false);
        pass &= ok;
        if !ok || lines.len() < 4 {
            lines.push(format!(
                "{}: sup {:.3e} inf {:.3e} drift {:.2e}",
                check.check_id,
                check.sup_ratio,
                check.inf_ratio,
                check.refinement_drift.unwrap_or(f64::NAN)
            ));
        }
    }
    verdict(
        7,
        "sharp vs regime envelope consolidation at t=1",
        pass,
        &lines.join("; "),
    );
}

#[test]
fn criterion_08_three_g() {
    let quad = QuadratureConfig::with_rel_tol(1e-6);
    let axes = [
        Axis::new("r", 1e-2, 1e2, 2, Spacing::Log),
        Axis::new("s", 1e-2, 1e2, 2, Spacing::Log),
        Axis::new("z", 1e-2, 1e2, 2, Spacing::Log),
        Axis::new("t", 1e-2, 1e2, 2, Spacing::Log),
        Axis::new("tau", 1e-2, 1e2, 2, Spacing::Log),
    ];
    let mut pass = true;
    let mut worst_min = 0.0f64;
    let mut worst_prod = 0.0f64;
    let mut worst_drift = 0.0f64;
    for &zeta in &[0.0, 0.5, 1.0] {
        for &alpha in &[0.5, 1.0, 1.5] {
            let params = KernelParams::new(zeta, alpha).unwrap();
            for want_min in [true, false] {
                let check = RatioCheck::new("c8", &["r", "s", "z", "t", "tau"], |p: &[f64]| {
                    let (m, prod) =
                        besselheat::three_g_ratio(&params, p[0], p[1], p[2], p[3], p[4], &quad)?;
                    Ok(PointOutcome::Ratio {
                        numerator: if want_min { m } else { prod },
                        denominator: 1.0,
                    })
                })
                .one_sided();
                // 2e5 samples; the engine's drift compares the first 1e5
                // against the full set, i.e. one doubling
                let report = sweep_ratio_samples(&check, &axes, 200_000).unwrap();
                let drift = report.refinement_drift.unwrap_or(1.0);
                let ok = report.status == CheckStatus::Pass
                    && report.sup_ratio.is_finite()
                    && drift < 0.10;
                pass &= ok;
                worst_drift = worst_drift.max(drift);
                if want_min {
                    worst_min = worst_min.max(report.sup_ratio);
                } else {
                    worst_prod = worst_prod.max(report.sup_ratio);
                }
                assert!(ok, "zeta={zeta} alpha={alpha} min={want_min}: {report:?}");
            }
        }
    }
    verdict(
        8,
        "3G inequality (min and product forms)",
        pass,
        &format!(
            "sup min_form {worst_min:.3e}, sup product_form {worst_prod:.3e}, worst doubling drift {worst_drift:.2e} over 1e5->2e5 samples x 9 combos"
        ),
    );
}

#[test]
fn criterion_09_comparability_items() {
    let mut pass = true;
    let mut lines = Vec::new();
    let kinds = [
        "comparability_item1",
        "comparability_item2a",
        "comparability_item2b",
        "comparability_item2c",
        "comparability_item3",
        "comparability_item4",
        "comparability_item5",
    ];
    let mut checks = Vec::new();
    for kind in kinds {
        let mut c = CheckConfig::new(kind, kind);
        c.zeta = Some(vec![0.0, 0.5, 1.0, 2.5]);
        c.alpha = Some(vec![0.5, 1.0, 1.5]);
        checks.push(c);
    }
    let config = SuiteConfig {
        name: "criterion9".into(),
        seed: 7,
        rel_tol: Some(1e-6),
        checks,
    };
    let report = run_suite(&config).unwrap();
    for check in &report.checks {
        let ok = check.status == CheckStatus::Pass
            && check.sup_ratio.is_finite()
            && check.refinement_drift.map(|d| d < 0.10).unwrap_or(false);
        pass &= ok;
        if !ok {
            lines.push(format!(
                "{}: {:?} {}",
                check.check_id,
                check.status,
                check.note.clone().unwrap_or_default()
            ));
        }
    }
    if lines.is_empty() {
        lines.push(format!(
            "{} item-combination sweeps, all sup finite and refinement-stable",
            report.checks.len()
        ));
    }
    verdict(
        9,
        "Theorem-4.1 comparability items (1)-(5)",
        pass,
        &lines.join("; "),
    );
}

#[test]
fn criterion_10_monte_carlo() {
    let quad = QuadratureConfig::with_rel_tol(1e-7);
    let axes = [
        Axis::new("t", 1e-1, 1e1, 2, Spacing::Log),
        Axis::new("r", 1e-1, 1e1, 2, Spacing::Log),
        Axis::new("s", 1e-1, 1e1, 2, Spacing::Log),
    ];
    let mut pass = true;
    let mut worst_z = 0.0f64;
    let mut total_insufficient = 0usize;
    for &zeta in &[0.0, 0.5, 1.0, 2.5] {
        for &alpha in &[0.5, 1.0, 1.5] {
            let params = KernelParams::new(zeta, alpha).unwrap();
            let check = RatioCheck::new("c10", &["t", "r", "s"], |p: &[f64]| {
                let est = mc_kernel(&params, p[0], p[1], p[2], 1_000_000, 20260808)?;
                if est.insufficient_precision {
                    return Ok(PointOutcome::Insufficient);
                }
                let reference = p_alpha(&params, p[0], p[1], p[2], &quad)?;
                Ok(PointOutcome::Ratio {
                    numerator: est.z_score(reference).abs(),
                    denominator: 1.0,
                })
            })
            .residual(3.0)
            .with_max_insufficient(0.10);
            let report = sweep_ratio_samples(&check, &axes, 20).unwrap();
            let ok = report.status == CheckStatus::Pass;
            pass &= ok;
            worst_z = worst_z.max(report.sup_ratio);
            total_insufficient += report.n_insufficient;
            assert!(ok, "zeta={zeta} alpha={alpha}: {report:?}");
        }
    }
    verdict(
        10,
        "Monte Carlo vs quadrature",
        pass,
        &format!(
            "max |z| {worst_z:.3} over 20 points x 12 combos at n=1e6 (|z|<=3); {total_insufficient} insufficient-precision points excluded"
        ),
    );
}

#[test]
fn criterion_11_report_determinism() {
    let config = smoke_config();
    let a = run_suite(&config).unwrap();
    let b = run_suite(&config).unwrap();
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|l| !(l.contains("_ms\"") || l.contains("\"elapsed")))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let ja = strip(&a.to_json());
    let jb = strip(&b.to_json());
    let pass = ja == jb && a.to_csv() == b.to_csv() && a.suite.pass && b.suite.pass;
    verdict(
        11,
        "smoke suite determinism",
        pass,
        &format!(
            "two runs byte-identical modulo timestamps ({} report lines, suite pass = {})",
            ja.lines().count(),
            a.suite.pass
        ),
    );
}
