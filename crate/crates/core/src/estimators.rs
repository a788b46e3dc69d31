//! Monte Carlo estimation with confidence intervals, correlation-length
//! extraction, and the near-critical experiment drivers.
//!
//! Estimation campaigns are pure maps from sample-index blocks to integer
//! counts (see [`crate::runner`]); everything downstream of the counts is
//! deterministic arithmetic, so results are independent of worker count and
//! scheduling.

use crate::error::{Error, Result};
use crate::events::EventSpec;
use crate::lattice::{nearest_site, EuclideanBall, Parallelogram, SiteCoord};
use crate::math::{ceil, cos, ln, powf, sin, sqrt, wilson_interval, Z95};
use crate::rng::child_seed;
use crate::runner::{block_count, block_range, BlockRunner};
use crate::sampler::{
    binomial_smooth, newman_ziff_link, ConfigView, LazyConfig, MicrocanonicalCurve,
};
use crate::P_CRITICAL;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Monte Carlo probability estimate with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p_hat: f64,
    pub samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, samples: u64) -> Estimate {
        let (p_hat, ci_low, ci_high) = wilson_interval(successes, samples, Z95);
        Estimate {
            p_hat,
            samples,
            ci_low,
            ci_high,
        }
    }

    pub fn from_counts_z(successes: u64, samples: u64, z: f64) -> Estimate {
        let (p_hat, ci_low, ci_high) = wilson_interval(successes, samples, z);
        Estimate {
            p_hat,
            samples,
            ci_low,
            ci_high,
        }
    }

    /// Degenerate estimate for exactly known values.
    pub fn exact(p: f64, samples: u64) -> Estimate {
        Estimate {
            p_hat: p,
            samples,
            ci_low: p,
            ci_high: p,
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }

    /// Whether two estimates agree within the sum of their CI half-widths.
    pub fn agrees_with(&self, other: &Estimate) -> bool {
        (self.p_hat - other.p_hat).abs() <= self.half_width() + other.half_width()
    }
}

/// Direct Monte Carlo estimate of an event probability.
pub fn estimate_event(
    event: &EventSpec,
    region: Parallelogram,
    p: f64,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter(String::from("samples must be >= 1")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} not in [0,1]")));
    }
    event.validate(&region)?;
    let counts = runner.accumulate(block_count(samples), 1, &|b| {
        let (lo, hi) = block_range(samples, b);
        let mut hits = 0u64;
        for i in lo..hi {
            let view = LazyConfig::new(region, p, seed, i);
            if event.eval_unchecked(&view) {
                hits += 1;
            }
        }
        vec![hits]
    });
    Ok(Estimate::from_counts(counts[0], samples))
}

/// Coupled estimates of one event across several values of `p`, sharing the
/// per-site uniforms of each sample. For increasing events the per-sample
/// indicators are monotone in `p` exactly, so the returned estimates are
/// nondecreasing in `p` deterministically, not just in expectation.
pub fn estimate_event_multi_p(
    event: &EventSpec,
    region: Parallelogram,
    ps: &[f64],
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<Vec<Estimate>> {
    if samples == 0 {
        return Err(Error::InvalidParameter(String::from("samples must be >= 1")));
    }
    for &p in ps {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} not in [0,1]")));
        }
    }
    event.validate(&region)?;
    let counts = runner.accumulate(block_count(samples), ps.len(), &|b| {
        let (lo, hi) = block_range(samples, b);
        let mut hits = vec![0u64; ps.len()];
        for i in lo..hi {
            for (j, &p) in ps.iter().enumerate() {
                let view = LazyConfig::new(region, p, seed, i);
                if event.eval_unchecked(&view) {
                    hits[j] += 1;
                }
            }
        }
        hits
    });
    Ok(counts
        .into_iter()
        .map(|c| Estimate::from_counts(c, samples))
        .collect())
}

/// Newman–Ziff curve built block-parallel; identical to a serial run.
pub fn nz_curve(
    region: Parallelogram,
    spec: &crate::sampler::LinkSpec,
    sweeps: u64,
    seed: u64,
    first_sweep: u64,
    runner: &dyn BlockRunner,
) -> MicrocanonicalCurve {
    let width = region.len() + 2;
    let acc = runner.accumulate(block_count(sweeps), width, &|b| {
        let (lo, hi) = block_range(sweeps, b);
        let curve = newman_ziff_link(region, spec, hi - lo, seed, first_sweep + lo);
        let mut v = curve.counts;
        v.push(curve.sweeps);
        v
    });
    let n = region.len();
    MicrocanonicalCurve {
        region,
        event: spec.name.clone(),
        counts: acc[..=n].to_vec(),
        sweeps: acc[n + 1],
        monotone: true,
    }
}

/// Rough prior for the correlation length, used only to size simulation
/// boxes and pick fitting windows. Calibrated on desk-scale runs of this
/// crate; clamped to keep boxes sane.
pub fn tau_guess(p: f64) -> f64 {
    let dist = (P_CRITICAL - p).abs().max(1e-3);
    (0.22 * powf(dist, -4.0 / 3.0)).clamp(1.5, 40.0)
}

/// Simulation box for a point-to-point connection: hull of the endpoints
/// padded so truncation bias is dominated by Monte Carlo error.
pub fn padded_pair_region(a: SiteCoord, b: SiteCoord, pad: i32) -> Parallelogram {
    Parallelogram::centered(a, 0)
        .hull(&Parallelogram::centered(b, 0))
        .padded(pad.max(4))
}

/// One point of a two-point decay curve. `distance` is the exact embedded
/// distance of the snapped target `nearest(n·e^{iθ})`; fits use it rather
/// than the nominal radius, removing the dominant rounding bias at small
/// correlation lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointSample {
    pub n: i32,
    pub distance: f64,
    pub estimate: Estimate,
}

impl TwoPointSample {
    /// Sample with the abscissa taken at face value (synthetic curves).
    pub fn at(n: i32, estimate: Estimate) -> TwoPointSample {
        TwoPointSample {
            n,
            distance: n as f64,
            estimate,
        }
    }
}

/// Point-to-point connection estimates `P_p(0 ↔ nearest(n·e^{iθ}))` for a
/// list of radii. Radius 0 is the self-connection, probability 1.
pub fn two_point_curve(
    p: f64,
    theta: f64,
    radii: &[i32],
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<Vec<TwoPointSample>> {
    if !(0.0 < p && p < P_CRITICAL) {
        return Err(Error::InvalidParameter(format!(
            "two-point decay requires 0 < p < p_c = 1/2, got {p}"
        )));
    }
    let pad = ceil(2.0 * tau_guess(p)) as i32;
    let mut out = Vec::with_capacity(radii.len());
    for &n in radii {
        if n < 0 {
            return Err(Error::InvalidParameter(format!("radius {n} < 0")));
        }
        if n == 0 {
            out.push(TwoPointSample {
                n: 0,
                distance: 0.0,
                estimate: Estimate::exact(1.0, samples),
            });
            continue;
        }
        let target = nearest_site(n as f64 * cos(theta), n as f64 * sin(theta));
        let region = padded_pair_region(SiteCoord::ORIGIN, target, pad);
        let event = EventSpec::point_connect(SiteCoord::ORIGIN, target);
        out.push(TwoPointSample {
            n,
            distance: SiteCoord::ORIGIN.euclidean_distance(target),
            estimate: estimate_event(&event, region, p, samples, seed, runner)?,
        });
    }
    if out.iter().all(|s| s.n == 0 || s.estimate.ci_low <= 0.0) {
        return Err(Error::Estimation(String::from(
            "all connection estimates are indistinguishable from 0; use smaller radii",
        )));
    }
    Ok(out)
}

/// Fitted exponential decay of a two-point function along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Direction angle θ (the unit vector is e^{iθ}).
    pub direction: f64,
    pub p: f64,
    pub radii: Vec<i32>,
    /// Exact embedded distances of the fitted points (the abscissae).
    pub distances: Vec<f64>,
    pub log_probs: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Correlation length −1/slope, in lattice units.
    pub tau: f64,
    pub slope_se: f64,
    pub tau_ci_low: f64,
    pub tau_ci_high: f64,
}

/// Weighted least-squares fit of `log P` against the target distance;
/// `tau = -1/slope`. Only points whose confidence interval excludes 0
/// enter the fit.
pub fn fit_correlation_length(
    direction: f64,
    p: f64,
    curve: &[TwoPointSample],
) -> Result<DecayFit> {
    let usable: Vec<&TwoPointSample> = curve
        .iter()
        .filter(|s| s.n >= 1 && s.estimate.p_hat > 0.0 && s.estimate.ci_low > 0.0)
        .collect();
    if usable.len() < 3 {
        return Err(Error::Fit(format!(
            "need >= 3 usable radii (CI excluding 0), have {}",
            usable.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ws = Vec::new();
    let mut radii = Vec::new();
    for s in &usable {
        let e = &s.estimate;
        let sigma = ((ln(e.ci_high) - ln(e.ci_low)) / (2.0 * Z95)).max(1e-9);
        xs.push(s.distance);
        ys.push(ln(e.p_hat));
        ws.push(1.0 / (sigma * sigma));
        radii.push(s.n);
    }
    let sw: f64 = ws.iter().sum();
    let xbar = xs.iter().zip(&ws).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ybar = ys.iter().zip(&ws).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&ws)
        .map(|((x, y), w)| w * (x - xbar) * (y - ybar))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::Fit(String::from("degenerate radii")));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    if slope >= 0.0 {
        return Err(Error::Fit(format!(
            "fitted decay rate is nonnegative (slope {slope:.4}); p may be >= p_c or radii too small"
        )));
    }
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .zip(&ws)
        .map(|((x, y), w)| {
            let r = y - (intercept + slope * x);
            w * r * r
        })
        .sum();
    let ss_tot: f64 = ys
        .iter()
        .zip(&ws)
        .map(|(y, w)| w * (y - ybar) * (y - ybar))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let slope_se = sqrt(1.0 / sxx);
    let slope_lo = slope - Z95 * slope_se;
    let slope_hi = slope + Z95 * slope_se;
    let tau = -1.0 / slope;
    let tau_ci_low = -1.0 / slope_lo;
    let tau_ci_high = if slope_hi < 0.0 {
        -1.0 / slope_hi
    } else {
        f64::INFINITY
    };
    Ok(DecayFit {
        direction,
        p,
        radii,
        distances: xs,
        log_probs: ys,
        slope,
        intercept,
        r2,
        tau,
        slope_se,
        tau_ci_low,
        tau_ci_high,
    })
}

/// Default fitting radii for a given `p`: the window where the connection
/// probability is measurable but not saturated (roughly 1e-4..1e-1).
pub fn default_tau_radii(p: f64) -> Vec<i32> {
    let tau = tau_guess(p);
    let mut out: Vec<i32> = [1.2, 2.2, 3.2, 4.2, 5.2, 6.2]
        .iter()
        .map(|f| (ceil(f * tau) as i32).max(2))
        .collect();
    out.dedup();
    out
}

/// Four-arm probability and `r(n) = P_{1/2}[A4(1,n)] / n^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourArmRate {
    pub n: i32,
    pub a4: Estimate,
    pub r_hat: f64,
}

pub fn estimate_r(
    n: i32,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<FourArmRate> {
    let event = EventSpec::four_arm(n)?;
    let region = Parallelogram::centered(SiteCoord::ORIGIN, n + 1);
    let a4 = estimate_event(&event, region, P_CRITICAL, samples, seed, runner)?;
    if a4.p_hat == 0.0 {
        return Err(Error::Estimation(format!(
            "no four-arm event in {samples} samples at n = {n}; \
             the probability decays like n^(-5/4), try at least {} samples",
            (50.0 * powf(n as f64, 1.25) / 0.2) as u64
        )));
    }
    Ok(FourArmRate {
        n,
        a4,
        r_hat: a4.p_hat / (n as f64 * n as f64),
    })
}

/// Near-critical point `p = p_c − λ·r(n)` with the frozen `r̂(n)` used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearCriticalPoint {
    pub n: i32,
    pub lambda: f64,
    pub r_n: f64,
    pub p: f64,
}

impl NearCriticalPoint {
    pub fn new(n: i32, lambda: f64, r_n: f64) -> Result<NearCriticalPoint> {
        if lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} < 0")));
        }
        let p = P_CRITICAL - lambda * r_n;
        if !(0.0 < p && p <= P_CRITICAL) {
            return Err(Error::InvalidParameter(format!(
                "near-critical p = {p} out of (0, 1/2]"
            )));
        }
        Ok(NearCriticalPoint {
            n,
            lambda,
            r_n,
            p,
        })
    }
}

/// Ball-to-ball connection estimate near criticality.
#[derive(Debug, Clone, PartialEq)]
pub struct BallConnectEstimate {
    pub n: i32,
    pub lambda: f64,
    pub delta: f64,
    pub theta: f64,
    pub r_hat: f64,
    pub p: f64,
    pub estimate: Estimate,
}

/// `P_{p_c - λ·r̂(n)}[B_n(0) ↔ B_n((n/δ)·e^{iθ})]`, the quantity converging
/// to `f(λ, 1/δ)`. The four-arm rate `r̂(n)` is estimated first (with a
/// derived seed) and frozen into the result.
pub fn estimate_f(
    lambda: f64,
    delta: f64,
    n: i32,
    theta: f64,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<BallConnectEstimate> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} out of (0, 1]"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter(format!("ball radius n = {n} < 1")));
    }
    let rate = estimate_r(n, samples, child_seed(seed, 0x7261), runner)?;
    let point = NearCriticalPoint::new(n, lambda, rate.r_hat)?;
    let estimate = ball_connect_at(point.p, n, n as f64 / delta, theta, samples, seed, runner)?;
    Ok(BallConnectEstimate {
        n,
        lambda,
        delta,
        theta,
        r_hat: rate.r_hat,
        p: point.p,
        estimate,
    })
}

/// `P_p[B_radius(0) ↔ B_radius(dist·e^{iθ})]` on a box padded by twice the
/// ball radius on every side.
pub fn ball_connect_at(
    p: f64,
    radius: i32,
    dist: f64,
    theta: f64,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<Estimate> {
    let a = EuclideanBall::new((0.0, 0.0), radius as f64)?;
    let b = EuclideanBall::new((dist * cos(theta), dist * sin(theta)), radius as f64)?;
    let event = EventSpec::ball_connect(a, b);
    let region = event.required_region().padded(2 * radius);
    estimate_event(&event, region, p, samples, seed, runner)
}

/// Probe cache for `L_η(p)` searches: one Newman–Ziff curve per box size,
/// shared across all probed values of `p`.
pub struct CrossingCurveCache {
    seed: u64,
    curves: BTreeMap<i32, MicrocanonicalCurve>,
}

impl CrossingCurveCache {
    pub fn new(seed: u64) -> Self {
        CrossingCurveCache {
            seed,
            curves: BTreeMap::new(),
        }
    }

    /// The crossing box of the characteristic-length definition,
    /// `[0,n] × [0,2n]`.
    pub fn probe_box(n: i32) -> Parallelogram {
        Parallelogram {
            m1: 0,
            m2: n,
            n1: 0,
            n2: 2 * n,
        }
    }

    /// Curve for box size `n` with at least `sweeps` sweeps.
    pub fn ensure(
        &mut self,
        n: i32,
        sweeps: u64,
        runner: &dyn BlockRunner,
    ) -> Result<&MicrocanonicalCurve> {
        let region = Self::probe_box(n);
        let spec = EventSpec::crossing_hor(region).to_link_spec(&region)?;
        let seed = child_seed(self.seed, n as u64);
        let entry = self.curves.entry(n);
        let curve = entry.or_insert_with(|| MicrocanonicalCurve {
            region,
            event: spec.name.clone(),
            counts: vec![0; region.len() + 1],
            sweeps: 0,
            monotone: true,
        });
        if curve.sweeps < sweeps {
            let extra = nz_curve(region, &spec, sweeps - curve.sweeps, seed, curve.sweeps, runner);
            if curve.sweeps == 0 {
                *curve = extra;
            } else {
                curve.merge(&extra);
            }
        }
        Ok(curve)
    }

    /// Crossing probability estimate at `(n, p)`.
    pub fn estimate(
        &mut self,
        n: i32,
        p: f64,
        sweeps: u64,
        runner: &dyn BlockRunner,
    ) -> Result<Estimate> {
        let curve = self.ensure(n, sweeps, runner)?;
        binomial_smooth(curve, p)
    }
}

/// Characteristic length with its probe certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicLength {
    pub p: f64,
    pub eta: f64,
    pub length: i32,
    /// every probed `(n, estimate)` pair, in probe order
    pub probes: Vec<(i32, Estimate)>,
}

/// `L_η(p)`: smallest box size `n` at which the crossing estimate's CI
/// upper bound drops below `η`, located by doubling then bisection.
///
/// Each probe escalates its sweep budget until the interval separates from
/// `η` decisively or the cap is reached.
pub fn characteristic_length(
    p: f64,
    eta: f64,
    n_max: i32,
    sweep_cap: u64,
    cache: &mut CrossingCurveCache,
    runner: &dyn BlockRunner,
) -> Result<CharacteristicLength> {
    if !(0.0 < eta && eta < 1.0 / 28.0) {
        return Err(Error::InvalidParameter(format!(
            "eta = {eta} out of the usable range (0, 1/28)"
        )));
    }
    if !(0.0 < p && p < P_CRITICAL) {
        return Err(Error::InvalidParameter(format!(
            "characteristic length requires 0 < p < p_c, got {p}"
        )));
    }
    let mut probes = Vec::new();
    let probe = |n: i32, cache: &mut CrossingCurveCache, probes: &mut Vec<(i32, Estimate)>| -> Result<Estimate> {
        let mut sweeps = 2048u64.min(sweep_cap);
        loop {
            let est = cache.estimate(n, p, sweeps, runner)?;
            if est.ci_high < eta || est.ci_low > eta || sweeps >= sweep_cap {
                probes.push((n, est));
                return Ok(est);
            }
            sweeps = (sweeps * 4).min(sweep_cap);
        }
    };

    // doubling phase
    let mut hi = 1;
    loop {
        let est = probe(hi, cache, &mut probes)?;
        if est.ci_high < eta {
            break;
        }
        hi *= 2;
        if hi > n_max {
            return Err(Error::Estimation(format!(
                "L_eta({p}) not reached below n_max = {n_max}"
            )));
        }
    }
    // bisection phase: invariant est(hi) passes, est(lo) fails
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let est = probe(mid, cache, &mut probes)?;
        if est.ci_high < eta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CharacteristicLength {
        p,
        eta,
        length: hi,
        probes,
    })
}

/// Directional correlation lengths and their spread.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyReport {
    pub p: f64,
    pub fits: Vec<DecayFit>,
    /// max τ̂ / min τ̂ over the requested angles; ≥ 1 by construction.
    pub ratio_spread: f64,
}

/// Correlation length per direction via [`two_point_curve`] +
/// [`fit_correlation_length`], with the spread of the fitted values.
pub fn isotropy_report(
    p: f64,
    angles: &[f64],
    radii: &[i32],
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<IsotropyReport> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter(String::from("no angles given")));
    }
    let radii_owned: Vec<i32> = if radii.is_empty() {
        default_tau_radii(p)
    } else {
        radii.to_vec()
    };
    let mut fits = Vec::with_capacity(angles.len());
    for (i, &theta) in angles.iter().enumerate() {
        let curve = two_point_curve(
            p,
            theta,
            &radii_owned,
            samples,
            child_seed(seed, i as u64),
            runner,
        )
        .map_err(|e| Error::Estimation(format!("angle {theta:.5}: {e}")))?;
        let fit = fit_correlation_length(theta, p, &curve)
            .map_err(|e| Error::Fit(format!("angle {theta:.5}: {e}")))?;
        fits.push(fit);
    }
    let max_tau = fits.iter().map(|f| f.tau).fold(f64::MIN, f64::max);
    let min_tau = fits.iter().map(|f| f.tau).fold(f64::MAX, f64::min);
    Ok(IsotropyReport {
        p,
        fits,
        ratio_spread: max_tau / min_tau,
    })
}

/// `P_p(0 ↔ nearest(n·e^{iθ}), 0 ¬↔ ∞)` with "¬↔ ∞" approximated by "the
/// cluster of 0 does not touch the simulation box boundary"; the box side
/// is at least `box_margin · n`.
pub fn finite_two_point(
    p: f64,
    theta: f64,
    n: i32,
    box_margin: i32,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<Estimate> {
    if !(P_CRITICAL < p && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "finite-cluster decay requires p_c < p < 1, got {p}"
        )));
    }
    if box_margin < 3 {
        return Err(Error::InvalidParameter(format!(
            "box_margin = {box_margin} < 3 makes the boundary approximation unsafe"
        )));
    }
    if n < 1 {
        return Err(Error::InvalidParameter(format!("n = {n} < 1")));
    }
    let target = nearest_site(n as f64 * cos(theta), n as f64 * sin(theta));
    let pad = ((box_margin as f64 - 1.0) / 2.0 * n as f64) as i32 + 1;
    let region = padded_pair_region(SiteCoord::ORIGIN, target, pad);
    let counts = runner.accumulate(block_count(samples), 1, &|b| {
        let (lo, hi) = block_range(samples, b);
        let mut hits = 0u64;
        for i in lo..hi {
            let view = LazyConfig::new(region, p, seed, i);
            if bounded_connection(&view, target) {
                hits += 1;
            }
        }
        vec![hits]
    });
    Ok(Estimate::from_counts(counts[0], samples))
}

/// Cluster of the origin contains `target` and avoids the region boundary.
fn bounded_connection<V: ConfigView>(view: &V, target: SiteCoord) -> bool {
    let region = view.region();
    if !view.is_open(SiteCoord::ORIGIN) {
        return false;
    }
    let on_boundary = |s: SiteCoord| {
        s.m == region.m1 || s.m == region.m2 || s.n == region.n1 || s.n == region.n2
    };
    if on_boundary(SiteCoord::ORIGIN) {
        return false;
    }
    let mut state = vec![0u8; region.len()];
    let mut stack = vec![SiteCoord::ORIGIN];
    state[region.rank(SiteCoord::ORIGIN)] = 1;
    let mut found = SiteCoord::ORIGIN == target;
    while let Some(s) = stack.pop() {
        for t in s.neighbors() {
            if !region.contains(t) {
                continue;
            }
            let r = region.rank(t);
            if state[r] != 0 {
                continue;
            }
            if view.is_open(t) {
                if on_boundary(t) {
                    return false;
                }
                state[r] = 1;
                if t == target {
                    found = true;
                }
                stack.push(t);
            } else {
                state[r] = 2;
            }
        }
    }
    found
}

/// Supercritical finite-cluster decay fit over a radius window.
pub fn finite_tau(
    p: f64,
    theta: f64,
    radii: &[i32],
    box_margin: i32,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<DecayFit> {
    let mut curve = Vec::with_capacity(radii.len());
    for &n in radii {
        let target = nearest_site(n as f64 * cos(theta), n as f64 * sin(theta));
        curve.push(TwoPointSample {
            n,
            distance: SiteCoord::ORIGIN.euclidean_distance(target),
            estimate: finite_two_point(p, theta, n, box_margin, samples, seed, runner)?,
        });
    }
    fit_correlation_length(theta, p, &curve)
}

/// Measured margins of the P1/P2/P3 conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct P1P2P3Report {
    pub epsilon: f64,
    pub lambda: f64,
    pub delta: f64,
    pub p: f64,
    /// integer ball radius b = δ·L_p solved from p = p_c − λ·r̂(b)
    pub ball_radius: i32,
    pub l_p: f64,
    pub r_hat: f64,
    pub f_hat: Estimate,
    pub link_theta0: Estimate,
    pub link_theta30: Estimate,
    pub circuit: Estimate,
    pub p1_lower_margin: f64,
    pub p1_upper_margin: f64,
    pub p2_margin: f64,
    pub p3_margin: f64,
}

/// Measures the three conditions of the near-critical proposition with `f`
/// replaced by its estimate, reporting each inequality's margin.
///
/// `L_p` is solved from `p = p_c − λ·r̂(δ·L_p)` by monotone search over the
/// integer ball radius `b = δ·L_p` (the rounding the paper waves at is made
/// explicit here).
pub fn verify_p1p2p3(
    epsilon: f64,
    lambda: f64,
    delta: f64,
    p: f64,
    samples: u64,
    seed: u64,
    runner: &dyn BlockRunner,
) -> Result<P1P2P3Report> {
    if !(0.0 < p && p < P_CRITICAL) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} must be in (0, p_c)"
        )));
    }
    if lambda <= 0.0 || epsilon <= 0.0 || !(0.0 < delta && delta <= 1.0) {
        return Err(Error::InvalidParameter(String::from(
            "require lambda > 0, epsilon > 0, delta in (0,1]",
        )));
    }
    let target_r = (P_CRITICAL - p) / lambda;
    let mut rates: BTreeMap<i32, f64> = BTreeMap::new();
    let rate_at = |b: i32, rates: &mut BTreeMap<i32, f64>| -> Result<f64> {
        if let Some(r) = rates.get(&b) {
            return Ok(*r);
        }
        let r = estimate_r(b, samples, child_seed(seed, 0x1000 + b as u64), runner)?.r_hat;
        rates.insert(b, r);
        Ok(r)
    };
    // doubling until r̂(b) <= target, then bisect to the smallest such b
    const B_MAX: i32 = 256;
    let mut hi = 1;
    while rate_at(hi, &mut rates)? > target_r {
        hi *= 2;
        if hi > B_MAX {
            return Err(Error::Estimation(format!(
                "L_p search failed to bracket below ball radius {B_MAX} (p too far from p_c?)"
            )));
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rate_at(mid, &mut rates)? > target_r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = hi;
    let r_hat = rate_at(b, &mut rates)?;
    let l_p = b as f64 / delta;

    let f_hat = ball_connect_at(p, b, l_p, 0.0, samples, child_seed(seed, 0x66), runner)?;
    let link_theta0 = ball_connect_at(p, b, l_p, 0.0, samples, child_seed(seed, 0x70), runner)?;
    let link_theta30 =
        ball_connect_at(p, b, l_p, core::f64::consts::FRAC_PI_6, samples, child_seed(seed, 0x71), runner)?;
    let circuit_event = EventSpec::circuit(SiteCoord::ORIGIN, b)?;
    let circuit_region = circuit_event.required_region().padded(1);
    let circuit = estimate_event(
        &circuit_event,
        circuit_region,
        p,
        samples,
        child_seed(seed, 0x72),
        runner,
    )?;

    let f = f_hat.p_hat;
    let f_lo_pow = powf(f, 1.0 + epsilon);
    let f_hi_pow = powf(f, 1.0 - epsilon);
    let f_eps = powf(f, epsilon);
    let p1_lower_margin = (link_theta0.p_hat - f_lo_pow).min(link_theta30.p_hat - f_lo_pow);
    let p1_upper_margin = (f_hi_pow - link_theta0.p_hat).min(f_hi_pow - link_theta30.p_hat);
    Ok(P1P2P3Report {
        epsilon,
        lambda,
        delta,
        p,
        ball_radius: b,
        l_p,
        r_hat,
        f_hat,
        link_theta0,
        link_theta30,
        circuit,
        p1_lower_margin,
        p1_upper_margin,
        p2_margin: circuit.p_hat - f_eps,
        p3_margin: delta - 2.0 * f_eps,
    })
}

/// Log-log slope of `(x_i, y_i)` pairs by unweighted least squares; used
/// for the exponent sanity checks.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Fit(String::from("need >= 2 points")));
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| ln(*x)).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| ln(*y)).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit(String::from("degenerate abscissae")));
    }
    Ok(sxy / sxx)
}
