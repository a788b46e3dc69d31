//! Sampling of percolation configurations and connectivity machinery.
//!
//! Configurations are Bernoulli(p) site assignments driven by the
//! counter-based stream in [`crate::rng`]: the state of a site is a pure
//! function of `(seed, sample_index, site)`, so lazily evaluated views and
//! materialized bit grids always agree, and runs are reproducible regardless
//! of worker count.

use crate::error::{Error, Result};
use crate::estimators::Estimate;
use crate::lattice::{Parallelogram, SiteCoord};
use crate::math::{exp, ln, sqrt, Z95};
use crate::rng::{self, StreamRng, STREAM_PERMUTE};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Read access to the open/closed state of sites inside a region.
pub trait ConfigView {
    fn region(&self) -> Parallelogram;
    /// State of a site; callers must only pass sites inside `region()`.
    fn is_open(&self, s: SiteCoord) -> bool;
}

/// A materialized configuration, one bit per site in row-major oblique order.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    region: Parallelogram,
    pub p: f64,
    pub seed: u64,
    pub sample_index: u64,
    bits: Vec<u64>,
}

impl Configuration {
    /// Samples all sites of `region` independently with probability `p`.
    pub fn sample(region: Parallelogram, p: f64, seed: u64, sample_index: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} not in [0,1]")));
        }
        let mut cfg = Configuration::filled(region, false);
        cfg.p = p;
        cfg.seed = seed;
        cfg.sample_index = sample_index;
        for rank in 0..region.len() {
            let s = region.site_at(rank);
            if rng::site_is_open(seed, sample_index, s.m, s.n, p) {
                cfg.set_rank(rank, true);
            }
        }
        Ok(cfg)
    }

    /// All-open or all-closed configuration.
    pub fn filled(region: Parallelogram, open: bool) -> Self {
        let words = region.len().div_ceil(64);
        let fill = if open { u64::MAX } else { 0 };
        Configuration {
            region,
            p: if open { 1.0 } else { 0.0 },
            seed: 0,
            sample_index: 0,
            bits: vec![fill; words],
        }
    }

    /// Configuration with exactly the listed sites open.
    pub fn from_open_sites(region: Parallelogram, open: &[SiteCoord]) -> Result<Self> {
        let mut cfg = Configuration::filled(region, false);
        for &s in open {
            if !region.contains(s) {
                return Err(Error::OutOfRegion { m: s.m, n: s.n });
            }
            cfg.set_rank(region.rank(s), true);
        }
        Ok(cfg)
    }

    /// Configuration whose open set is the bits of `mask` over region ranks
    /// (used by the exact-enumeration oracle).
    pub fn from_mask(region: Parallelogram, mask: u64) -> Self {
        debug_assert!(region.len() <= 64);
        let mut cfg = Configuration::filled(region, false);
        cfg.bits[0] = mask;
        cfg
    }

    pub fn region(&self) -> Parallelogram {
        self.region
    }

    #[inline]
    pub fn get_rank(&self, rank: usize) -> bool {
        self.bits[rank / 64] >> (rank % 64) & 1 == 1
    }

    #[inline]
    pub fn set_rank(&mut self, rank: usize, open: bool) {
        if open {
            self.bits[rank / 64] |= 1 << (rank % 64);
        } else {
            self.bits[rank / 64] &= !(1 << (rank % 64));
        }
    }

    /// Checked state access.
    pub fn state(&self, s: SiteCoord) -> Result<bool> {
        if !self.region.contains(s) {
            return Err(Error::OutOfRegion { m: s.m, n: s.n });
        }
        Ok(self.get_rank(self.region.rank(s)))
    }

    /// Copy with the state of `s` inverted.
    pub fn flip_site(&self, s: SiteCoord) -> Result<Configuration> {
        if !self.region.contains(s) {
            return Err(Error::OutOfRegion { m: s.m, n: s.n });
        }
        let mut out = self.clone();
        let r = self.region.rank(s);
        out.set_rank(r, !self.get_rank(r));
        Ok(out)
    }

    /// Copy with the state of `s` forced to `open`.
    pub fn with_state(&self, s: SiteCoord, open: bool) -> Result<Configuration> {
        if !self.region.contains(s) {
            return Err(Error::OutOfRegion { m: s.m, n: s.n });
        }
        let mut out = self.clone();
        out.set_rank(self.region.rank(s), open);
        Ok(out)
    }

    pub fn open_count(&self) -> usize {
        let mut total: u32 = 0;
        for w in &self.bits {
            total += w.count_ones();
        }
        total as usize
    }
}

impl ConfigView for Configuration {
    fn region(&self) -> Parallelogram {
        self.region
    }

    #[inline]
    fn is_open(&self, s: SiteCoord) -> bool {
        debug_assert!(self.region.contains(s));
        self.get_rank(self.region.rank(s))
    }
}

/// A configuration whose bits are computed on demand from the counter
/// stream. Evaluating an event by graph search only touches the sites the
/// search visits, which makes large padded boxes essentially free.
#[derive(Debug, Clone, Copy)]
pub struct LazyConfig {
    pub region: Parallelogram,
    pub p: f64,
    pub seed: u64,
    pub sample_index: u64,
}

impl LazyConfig {
    pub fn new(region: Parallelogram, p: f64, seed: u64, sample_index: u64) -> Self {
        LazyConfig {
            region,
            p,
            seed,
            sample_index,
        }
    }
}

impl ConfigView for LazyConfig {
    fn region(&self) -> Parallelogram {
        self.region
    }

    #[inline]
    fn is_open(&self, s: SiteCoord) -> bool {
        debug_assert!(self.region.contains(s));
        rng::site_is_open(self.seed, self.sample_index, s.m, s.n, self.p)
    }
}

/// Disjoint-set forest with union by size and path compression.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(cells: usize) -> Self {
        UnionFind {
            parent: (0..cells as u32).collect(),
            size: vec![1; cells],
        }
    }

    pub fn find(&mut self, mut i: u32) -> u32 {
        let mut root = i;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while i != root {
            let next = self.parent[i as usize];
            self.parent[i as usize] = root;
            i = next;
        }
        root
    }

    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        true
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn component_size(&mut self, a: u32) -> u32 {
        let r = self.find(a);
        self.size[r as usize]
    }
}

/// Connectivity index over the open sites of a configuration.
///
/// Two distinct sites share a root iff an open path inside the region joins
/// them. A site is always connected to itself, open or not (the
/// `P(0 ↔ 0) = 1` convention).
pub struct ConnectivityIndex {
    region: Parallelogram,
    uf: UnionFind,
    open: Vec<bool>,
}

/// Offsets of the neighbors that precede a site in row-major order.
const BACKWARD_OFFSETS: [(i32, i32); 3] = [(-1, 0), (0, -1), (1, -1)];

pub fn connectivity(config: &Configuration) -> ConnectivityIndex {
    let region = config.region();
    let len = region.len();
    let mut open = vec![false; len];
    let mut uf = UnionFind::new(len);
    for rank in 0..len {
        if !config.get_rank(rank) {
            continue;
        }
        open[rank] = true;
        let s = region.site_at(rank);
        for (dm, dn) in BACKWARD_OFFSETS {
            let t = s.offset(dm, dn);
            if region.contains(t) {
                let tr = region.rank(t);
                if open[tr] {
                    uf.union(rank as u32, tr as u32);
                }
            }
        }
    }
    ConnectivityIndex { region, uf, open }
}

impl ConnectivityIndex {
    pub fn connected(&mut self, a: SiteCoord, b: SiteCoord) -> Result<bool> {
        for s in [a, b] {
            if !self.region.contains(s) {
                return Err(Error::OutOfRegion { m: s.m, n: s.n });
            }
        }
        if a == b {
            return Ok(true);
        }
        let (ra, rb) = (self.region.rank(a), self.region.rank(b));
        if !self.open[ra] || !self.open[rb] {
            return Ok(false);
        }
        Ok(self.uf.connected(ra as u32, rb as u32))
    }

    pub fn cluster_size(&mut self, s: SiteCoord) -> Result<usize> {
        if !self.region.contains(s) {
            return Err(Error::OutOfRegion { m: s.m, n: s.n });
        }
        let r = self.region.rank(s);
        if !self.open[r] {
            return Ok(0);
        }
        Ok(self.uf.component_size(r as u32) as usize)
    }
}

/// Microcanonical event curve: for each occupation count `k`, the number of
/// sweeps in which the event held when exactly `k` sites were open.
#[derive(Debug, Clone, PartialEq)]
pub struct MicrocanonicalCurve {
    pub region: Parallelogram,
    pub event: String,
    pub counts: Vec<u64>,
    pub sweeps: u64,
    /// Produced by threshold sweeps of an increasing event. When set, the
    /// per-sweep threshold distribution is recoverable from `counts`.
    pub monotone: bool,
}

impl MicrocanonicalCurve {
    fn empty(region: Parallelogram, event: String, monotone: bool) -> Self {
        MicrocanonicalCurve {
            counts: vec![0; region.len() + 1],
            region,
            event,
            sweeps: 0,
            monotone,
        }
    }

    /// Order-invariant merge of curves from disjoint sweep ranges.
    pub fn merge(&mut self, other: &MicrocanonicalCurve) {
        assert_eq!(self.region, other.region);
        assert_eq!(self.event, other.event);
        assert_eq!(self.monotone, other.monotone);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.sweeps += other.sweeps;
    }
}

/// Incremental description of an increasing event for threshold sweeps.
///
/// In direct mode the event holds once the two terminal sets are joined by
/// a path of OPEN sites inside `domain`. In complement mode the event holds
/// while the terminal sets are NOT joined by a path of CLOSED sites inside
/// `domain` (the blocking-path criterion for circuits on the self-matching
/// triangular lattice).
#[derive(Debug, Clone)]
pub struct LinkSpec {
    pub name: String,
    /// Region ranks allowed to carry the path.
    pub domain: Vec<bool>,
    pub terminals_a: Vec<usize>,
    pub terminals_b: Vec<usize>,
    pub complement: bool,
}

/// Runs `sweeps` Newman–Ziff threshold sweeps for an increasing link-type
/// event. One sweep inserts the region's sites in a uniformly random order
/// and records the first occupation count at which the event holds,
/// maintaining connectivity incrementally with union-find.
pub fn newman_ziff_link(
    region: Parallelogram,
    spec: &LinkSpec,
    sweeps: u64,
    seed: u64,
    first_sweep: u64,
) -> MicrocanonicalCurve {
    let len = region.len();
    let adjacency = build_adjacency(region);
    let mut terminal = vec![0u8; len];
    for &r in &spec.terminals_a {
        terminal[r] |= 1;
    }
    for &r in &spec.terminals_b {
        terminal[r] |= 2;
    }

    let mut curve = MicrocanonicalCurve::empty(region, spec.name.clone(), true);
    curve.sweeps = sweeps;
    let virt_a = len as u32;
    let virt_b = len as u32 + 1;
    let mut order: Vec<u32> = (0..len as u32).collect();
    let mut inserted = vec![false; len];

    let mut thresholds: Vec<u64> = vec![0; len + 2];
    for sweep in 0..sweeps {
        let mut rng = StreamRng::new(seed, STREAM_PERMUTE, first_sweep + sweep);
        order.clear();
        order.extend(0..len as u32);
        rng.shuffle(&mut order);
        inserted.fill(false);
        let mut uf = UnionFind::new(len + 2);

        // In complement mode the walk adds CLOSED sites in the reverse of
        // the permutation; the hit step is mapped back to the open-site
        // count afterwards.
        if spec.complement {
            order.reverse();
        }
        let mut hit: Option<usize> = None;
        for (step, &site) in order.iter().enumerate() {
            let r = site as usize;
            if spec.domain[r] {
                inserted[r] = true;
                for &t in &adjacency[r] {
                    if spec.domain[t as usize] && inserted[t as usize] {
                        uf.union(site, t);
                    }
                }
                if terminal[r] & 1 != 0 {
                    uf.union(site, virt_a);
                }
                if terminal[r] & 2 != 0 {
                    uf.union(site, virt_b);
                }
                if uf.connected(virt_a, virt_b) {
                    hit = Some(step + 1);
                    break;
                }
            }
        }

        let threshold = if spec.complement {
            // hit = number of closed sites when blocking first appears;
            // the event (no blocking path) holds for k > len - hit.
            match hit {
                Some(j) => len - j + 1,
                None => 0,
            }
        } else {
            match hit {
                Some(k) => k,
                None => len + 1,
            }
        };
        thresholds[threshold] += 1;
    }

    // counts[k] = sweeps with threshold <= k
    let mut cumulative = 0u64;
    for k in 0..=len {
        cumulative += thresholds[k];
        curve.counts[k] = cumulative;
    }
    curve
}

/// Per-k re-evaluation sweeps for arbitrary (possibly non-monotone) events.
/// The predicate is evaluated at every occupation count of every sweep.
pub fn newman_ziff_per_k<F: FnMut(&Configuration) -> bool>(
    region: Parallelogram,
    name: &str,
    mut predicate: F,
    sweeps: u64,
    seed: u64,
    first_sweep: u64,
) -> MicrocanonicalCurve {
    let len = region.len();
    let mut curve = MicrocanonicalCurve::empty(region, String::from(name), false);
    curve.sweeps = sweeps;
    let mut order: Vec<u32> = (0..len as u32).collect();
    for sweep in 0..sweeps {
        let mut rng = StreamRng::new(seed, STREAM_PERMUTE, first_sweep + sweep);
        order.clear();
        order.extend(0..len as u32);
        rng.shuffle(&mut order);
        let mut cfg = Configuration::filled(region, false);
        if predicate(&cfg) {
            curve.counts[0] += 1;
        }
        for (k, &site) in order.iter().enumerate() {
            cfg.set_rank(site as usize, true);
            if predicate(&cfg) {
                curve.counts[k + 1] += 1;
            }
        }
    }
    curve
}

fn build_adjacency(region: Parallelogram) -> Vec<Vec<u32>> {
    let mut adj = Vec::with_capacity(region.len());
    for rank in 0..region.len() {
        let s = region.site_at(rank);
        let mut list = Vec::with_capacity(6);
        for t in s.neighbors() {
            if region.contains(t) {
                list.push(region.rank(t) as u32);
            }
        }
        adj.push(list);
    }
    adj
}

/// Evaluates the curve at probability `p` by binomial smoothing,
/// `Σ_k C(N,k) p^k (1-p)^{N-k} · counts[k]/sweeps`.
///
/// For threshold curves the confidence interval comes from the empirical
/// variance of the per-sweep smoothed indicator; for per-k curves the
/// Bernoulli bound `Var ≤ m(1-m)` is used instead (per-sweep cross-k
/// correlations are not recoverable from the counts alone).
pub fn binomial_smooth(curve: &MicrocanonicalCurve, p: f64) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} not in [0,1]")));
    }
    if curve.sweeps == 0 {
        return Err(Error::Estimation(String::from("curve has zero sweeps")));
    }
    let n = curve.region.len();
    let sweeps = curve.sweeps as f64;

    if p == 0.0 || p == 1.0 {
        let k = if p == 0.0 { 0 } else { n };
        let successes = curve.counts[k];
        return Ok(Estimate::from_counts(successes, curve.sweeps));
    }

    // Binomial pmf over k in log space, with a prefix table of ln k! so the
    // whole curve costs O(N) rather than O(N^2).
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + ln(k as f64);
    }
    let (ln_p, ln_q) = (ln(p), ln(1.0 - p));
    let mut pmf = vec![0.0f64; n + 1];
    for (k, w) in pmf.iter_mut().enumerate() {
        *w = exp(
            ln_fact[n] - ln_fact[k] - ln_fact[n - k] + k as f64 * ln_p + (n - k) as f64 * ln_q,
        );
    }

    let mean: f64 = (0..=n)
        .map(|k| pmf[k] * curve.counts[k] as f64 / sweeps)
        .sum();

    let var = if curve.monotone {
        // suffix sums: g(t) = P[Bin(N,p) >= t]
        let mut g = vec![0.0f64; n + 2];
        for t in (0..=n).rev() {
            g[t] = g[t + 1] + pmf[t];
        }
        let mut second = 0.0;
        let mut prev = 0u64;
        for t in 0..=n {
            let hist = curve.counts[t] - prev;
            prev = curve.counts[t];
            second += hist as f64 * g[t] * g[t];
        }
        // sweeps that never reached the event contribute g = 0
        (second / sweeps - mean * mean).max(0.0)
    } else {
        (mean * (1.0 - mean)).max(0.0)
    };

    let half = Z95 * sqrt(var / sweeps);
    Ok(Estimate {
        p_hat: mean,
        samples: curve.sweeps,
        ci_low: (mean - half).max(0.0),
        ci_high: (mean + half).min(1.0),
    })
}
