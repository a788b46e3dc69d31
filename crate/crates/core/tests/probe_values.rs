//! Scratch probes used to pin desk-scale constants (run with --ignored).

use perclab_core::estimators::*;
use perclab_core::events::EventSpec;
use perclab_core::lattice::{Parallelogram, SiteCoord};
use perclab_core::oracle;
use perclab_core::runner::SerialRunner;

#[test]
#[ignore]
fn probe_four_arm_unit_exact() {
    // exact A4(1,1): enumerate the 24 free sites of [-2,2]^2 \ {origin}
    let region = Parallelogram::centered(SiteCoord::ORIGIN, 2);
    let free: Vec<SiteCoord> = region.iter().filter(|s| *s != SiteCoord::ORIGIN).collect();
    let event = EventSpec::four_arm(1).unwrap();
    let poly = oracle::enumerate_free(&event, region, &free).unwrap();
    let num = poly.eval_exact(1, 2).unwrap();
    println!("A4(1,1) exact numerator over 2^24: {num}");
    println!("A4(1,1) at p=1/2: {}", poly.eval(0.5));
    println!("coeff sum: {}", poly.coeffs.iter().sum::<u64>());
}

#[test]
#[ignore]
fn probe_tau_at_standard_points() {
    for p in [0.30, 0.35, 0.40, 0.45] {
        let radii = default_tau_radii(p);
        let curve = two_point_curve(p, 0.0, &radii, 40_000, 17, &SerialRunner).unwrap();
        for s in &curve {
            println!(
                "p={p} n={} d={:.3}: {:.6} [{:.6},{:.6}]",
                s.n, s.distance, s.estimate.p_hat, s.estimate.ci_low, s.estimate.ci_high
            );
        }
        match fit_correlation_length(0.0, p, &curve) {
            Ok(fit) => println!(
                "p={p}: tau={:.4} +- [{:.4},{:.4}] r2={:.5} radii {:?}",
                fit.tau, fit.tau_ci_low, fit.tau_ci_high, fit.r2, fit.radii
            ),
            Err(e) => println!("p={p}: fit failed: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_characteristic_lengths() {
    let eta = 1.0 / 56.0;
    for p in [0.10, 0.30, 0.40, 0.45] {
        let mut cache = CrossingCurveCache::new(5);
        match characteristic_length(p, eta, 512, 40_000, &mut cache, &SerialRunner) {
            Ok(r) => {
                println!("L_eta({p}) = {} with {} probes", r.length, r.probes.len());
                for (n, e) in &r.probes {
                    println!("  n={n}: {:.5} [{:.5},{:.5}]", e.p_hat, e.ci_low, e.ci_high);
                }
            }
            Err(e) => println!("L_eta({p}): {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_near_critical_trend() {
    // criterion 8 shape check: crossing probability of [0,n]x[0,2n] at
    // p = 1/2 - lambda r(n), lambda in {0,1,2,4}, n in {16,32}
    for n in [16, 32] {
        let rate = estimate_r(n, 100_000, 99001, &SerialRunner).unwrap();
        println!("r({n}) = {:.3e} (A4 {:.5})", rate.r_hat, rate.a4.p_hat);
        let zone = Parallelogram::new(0, n, 0, 2 * n).unwrap();
        let event = EventSpec::crossing_hor(zone);
        let ps: Vec<f64> = [0.0, 1.0, 2.0, 4.0]
            .iter()
            .map(|l| 0.5 - l * rate.r_hat)
            .collect();
        let ests = estimate_event_multi_p(&event, zone, &ps, 100_000, 7321, &SerialRunner).unwrap();
        for (l, e) in [0.0, 1.0, 2.0, 4.0].iter().zip(&ests) {
            println!(
                "  n={n} lambda={l}: {:.5} [{:.5},{:.5}]",
                e.p_hat, e.ci_low, e.ci_high
            );
        }
    }
}

#[test]
#[ignore]
fn probe_supercritical_duality() {
    let radii_sub = default_tau_radii(0.35);
    let sub = two_point_curve(0.35, 0.0, &radii_sub, 60_000, 4, &SerialRunner).unwrap();
    let tau_sub = fit_correlation_length(0.0, 0.35, &sub).unwrap();
    println!("tau(0.35) = {:.4} (r2 {:.4})", tau_sub.tau, tau_sub.r2);
    for radii in [[4, 6, 8, 10, 12].as_slice(), [6, 8, 10, 12, 14].as_slice()] {
        match finite_tau(0.65, 0.0, radii, 3, 60_000, 5, &SerialRunner) {
            Ok(fit) => println!(
                "tau_f(0.65) over {radii:?} = {:.4} (r2 {:.4}); half tau(0.35) = {:.4}",
                fit.tau,
                fit.r2,
                tau_sub.tau / 2.0
            ),
            Err(e) => println!("tau_f over {radii:?}: {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_isotropy_spread() {
    let angles = [
        0.0,
        std::f64::consts::PI / 12.0,
        std::f64::consts::PI / 6.0,
        std::f64::consts::PI / 4.0,
    ];
    for p in [0.30, 0.45] {
        let report = isotropy_report(p, &angles, &[], 40_000, 11, &SerialRunner);
        match report {
            Ok(r) => {
                for f in &r.fits {
                    println!(
                        "p={p} theta={:.4}: tau={:.4} [{:.4},{:.4}] r2={:.4}",
                        f.direction, f.tau, f.tau_ci_low, f.tau_ci_high, f.r2
                    );
                }
                println!("p={p}: ratio_spread = {:.5}", r.ratio_spread);
            }
            Err(e) => println!("p={p}: {e}"),
        }
    }
}
