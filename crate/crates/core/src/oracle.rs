//! Exact enumeration over all configurations of small regions.
//!
//! Event probabilities become integer-coefficient polynomials in `p`, which
//! makes correlation inequalities (FKG, BK), Russo's formula, and the
//! crossing-doubling inequality checkable in exact arithmetic. This module
//! also carries independent reference implementations (winding-number
//! circuit search, flow-based disjoint-arm search) used to validate the
//! fast evaluators in [`crate::events`].

use crate::error::{Error, Result};
use crate::events::EventSpec;
use crate::lattice::{Annulus, Parallelogram, SiteCoord, NEIGHBOR_OFFSETS_CLOCKWISE};
use crate::sampler::{ConfigView, Configuration};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Enumeration cap: 2^24 configurations.
pub const ENUM_SITE_LIMIT: usize = 24;
/// Cap for the truth-table checks (FKG, Russo).
pub const TABLE_SITE_LIMIT: usize = 20;
/// Cap for disjoint-occurrence (BK) checks; the witness search is 3^N.
pub const BK_SITE_LIMIT: usize = 16;

/// `P_p[A] = Σ_k coeffs[k] p^k (1-p)^{N-k}` with `coeffs[k]` the number of
/// configurations of the free sites with `k` open sites satisfying the
/// event (non-free region sites held closed).
#[derive(Debug, Clone, PartialEq)]
pub struct EventPolynomial {
    pub region: Parallelogram,
    pub event: String,
    pub free: Vec<SiteCoord>,
    pub coeffs: Vec<u64>,
}

impl EventPolynomial {
    pub fn degree(&self) -> usize {
        self.free.len()
    }

    /// Evaluation in double precision.
    pub fn eval(&self, p: f64) -> f64 {
        let n = self.degree();
        let q = 1.0 - p;
        // powers by direct products; N <= 24 keeps this well-conditioned
        let mut pk = vec![1.0f64; n + 1];
        let mut qk = vec![1.0f64; n + 1];
        for i in 1..=n {
            pk[i] = pk[i - 1] * p;
            qk[i] = qk[i - 1] * q;
        }
        (0..=n)
            .map(|k| self.coeffs[k] as f64 * pk[k] * qk[n - k])
            .sum()
    }

    /// Exact evaluation at rational `p = num/den`: returns the numerator of
    /// `P · den^N`.
    pub fn eval_exact(&self, num: u64, den: u64) -> Result<u128> {
        if num > den || den == 0 {
            return Err(Error::InvalidParameter(format!(
                "rational probability {num}/{den} not in [0,1]"
            )));
        }
        let n = self.degree() as u32;
        let q = den - num;
        let mut total: u128 = 0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let term = (c as u128)
                .checked_mul(pow_u128(num, k as u32)?)
                .and_then(|t| t.checked_mul(pow_u128(q, n - k as u32).ok()?))
                .ok_or_else(|| {
                    Error::InvalidParameter(String::from("exact evaluation overflowed u128"))
                })?;
            total = total
                .checked_add(term)
                .ok_or_else(|| Error::InvalidParameter(String::from("exact sum overflowed")))?;
        }
        Ok(total)
    }
}

fn pow_u128(base: u64, exp: u32) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128).ok_or_else(|| {
            Error::InvalidParameter(String::from("power overflowed u128"))
        })?;
    }
    Ok(acc)
}

/// Exact rational margin with denominator `den^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMargin {
    pub numerator: i128,
    pub den: u64,
    pub exponent: u32,
}

impl ExactMargin {
    pub fn is_nonnegative(&self) -> bool {
        self.numerator >= 0
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator as f64 / crate::math::powf(self.den as f64, self.exponent as f64)
    }
}

/// Exact enumeration of an event over all configurations of the region.
pub fn enumerate(event: &EventSpec, region: Parallelogram) -> Result<EventPolynomial> {
    let free: Vec<SiteCoord> = region.iter().collect();
    enumerate_free(event, region, &free)
}

/// Enumeration over a designated set of free sites; the remaining region
/// sites stay closed. Used when an event provably ignores some sites
/// (e.g. the origin for four-arm events).
pub fn enumerate_free(
    event: &EventSpec,
    region: Parallelogram,
    free: &[SiteCoord],
) -> Result<EventPolynomial> {
    if free.len() > ENUM_SITE_LIMIT {
        return Err(Error::RegionTooLarge {
            sites: free.len(),
            limit: ENUM_SITE_LIMIT,
        });
    }
    event.validate(&region)?;
    let n = free.len();
    let ranks: Vec<usize> = free.iter().map(|s| region.rank(*s)).collect();
    let mut coeffs = vec![0u64; n + 1];
    let mut cfg = Configuration::filled(region, false);
    let mut open_count = 0usize;
    if event.eval_unchecked(&cfg) {
        coeffs[0] += 1;
    }
    let mut prev_gray = 0u64;
    for i in 1..(1u64 << n) {
        let gray = i ^ (i >> 1);
        let bit = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        let r = ranks[bit];
        let opening = !cfg.get_rank(r);
        cfg.set_rank(r, opening);
        if opening {
            open_count += 1;
        } else {
            open_count -= 1;
        }
        if event.eval_unchecked(&cfg) {
            coeffs[open_count] += 1;
        }
    }
    Ok(EventPolynomial {
        region,
        event: event.name(),
        free: free.to_vec(),
        coeffs,
    })
}

/// Truth table of an event over all 2^N open-set masks of a region.
fn truth_table(event: &EventSpec, region: Parallelogram) -> Result<Vec<bool>> {
    let n = region.len();
    if n > TABLE_SITE_LIMIT {
        return Err(Error::RegionTooLarge {
            sites: n,
            limit: TABLE_SITE_LIMIT,
        });
    }
    event.validate(&region)?;
    let mut table = vec![false; 1usize << n];
    let mut cfg = Configuration::filled(region, false);
    table[0] = event.eval_unchecked(&cfg);
    let mut prev_gray = 0u64;
    let mut mask_of_gray = 0u64;
    for i in 1..(1u64 << n) {
        let gray = i ^ (i >> 1);
        let bit = (gray ^ prev_gray).trailing_zeros() as usize;
        prev_gray = gray;
        mask_of_gray ^= 1 << bit;
        cfg.set_rank(bit, mask_of_gray >> bit & 1 == 1);
        table[mask_of_gray as usize] = event.eval_unchecked(&cfg);
    }
    Ok(table)
}

/// Errors unless the truth table is monotone increasing in the open set.
fn require_increasing(table: &[bool], n: usize, name: &str) -> Result<()> {
    for mask in 0..table.len() {
        if !table[mask] {
            continue;
        }
        for bit in 0..n {
            if mask & (1 << bit) == 0 && !table[mask | (1 << bit)] {
                return Err(Error::NonMonotoneEvent(format!(
                    "{name}: holds on {mask:#x} but not with site {bit} opened"
                )));
            }
        }
    }
    Ok(())
}

fn counts_by_popcount(table: &[bool], n: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n + 1];
    for (mask, &v) in table.iter().enumerate() {
        if v {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    counts
}

fn exact_sum(counts: &[u64], num: u64, den: u64) -> Result<u128> {
    let n = (counts.len() - 1) as u32;
    let q = den - num;
    let mut total: u128 = 0;
    for (k, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let term = (c as u128)
            .checked_mul(pow_u128(num, k as u32)?)
            .and_then(|t| t.checked_mul(pow_u128(q, n - k as u32).ok()?))
            .ok_or_else(|| Error::InvalidParameter(String::from("exact sum overflowed")))?;
        total += term;
    }
    Ok(total)
}

/// FKG margin `P[A ∩ B] − P[A]·P[B]` in exact rational arithmetic.
/// Must be ≥ 0 for increasing events.
pub fn check_fkg(
    a: &EventSpec,
    b: &EventSpec,
    region: Parallelogram,
    num: u64,
    den: u64,
) -> Result<ExactMargin> {
    let n = region.len();
    let ta = truth_table(a, region)?;
    let tb = truth_table(b, region)?;
    require_increasing(&ta, n, &a.name())?;
    require_increasing(&tb, n, &b.name())?;
    let mut tab = vec![false; ta.len()];
    for i in 0..ta.len() {
        tab[i] = ta[i] && tb[i];
    }
    let sa = exact_sum(&counts_by_popcount(&ta, n), num, den)?;
    let sb = exact_sum(&counts_by_popcount(&tb, n), num, den)?;
    let sab = exact_sum(&counts_by_popcount(&tab, n), num, den)?;
    let den_n = pow_u128(den, n as u32)?;
    // margin = (sab * den^N - sa * sb) / den^(2N)
    let lhs = sab
        .checked_mul(den_n)
        .ok_or_else(|| Error::InvalidParameter(String::from("FKG margin overflow")))?;
    let rhs = sa
        .checked_mul(sb)
        .ok_or_else(|| Error::InvalidParameter(String::from("FKG margin overflow")))?;
    Ok(ExactMargin {
        numerator: lhs as i128 - rhs as i128,
        den,
        exponent: 2 * n as u32,
    })
}

/// BK margin `P[A]·P[B] − P[A ∘ B]` in exact rational arithmetic, where
/// `A ∘ B` is disjoint occurrence: there exist disjoint open witness sets
/// `I, J` with `A` forced by opening exactly `I` and `B` by exactly `J`.
/// Must be ≥ 0 for increasing events.
pub fn check_bk(
    a: &EventSpec,
    b: &EventSpec,
    region: Parallelogram,
    num: u64,
    den: u64,
) -> Result<ExactMargin> {
    let n = region.len();
    if n > BK_SITE_LIMIT {
        return Err(Error::RegionTooLarge {
            sites: n,
            limit: BK_SITE_LIMIT,
        });
    }
    let ta = truth_table(a, region)?;
    let tb = truth_table(b, region)?;
    require_increasing(&ta, n, &a.name())?;
    require_increasing(&tb, n, &b.name())?;
    // For increasing A: opening exactly I ⊆ O forces A iff A(open = I).
    // So (A ∘ B)(O) iff some J ⊆ O has B(J) and A(O \ J).
    let mut tab = vec![false; ta.len()];
    for mask in 0..ta.len() {
        let mut j = mask;
        loop {
            if tb[j] && ta[mask & !j] {
                tab[mask] = true;
                break;
            }
            if j == 0 {
                break;
            }
            j = (j - 1) & mask;
        }
    }
    let sa = exact_sum(&counts_by_popcount(&ta, n), num, den)?;
    let sb = exact_sum(&counts_by_popcount(&tb, n), num, den)?;
    let sab = exact_sum(&counts_by_popcount(&tab, n), num, den)?;
    let den_n = pow_u128(den, n as u32)?;
    let lhs = sa
        .checked_mul(sb)
        .ok_or_else(|| Error::InvalidParameter(String::from("BK margin overflow")))?;
    let rhs = sab
        .checked_mul(den_n)
        .ok_or_else(|| Error::InvalidParameter(String::from("BK margin overflow")))?;
    Ok(ExactMargin {
        numerator: lhs as i128 - rhs as i128,
        den,
        exponent: 2 * n as u32,
    })
}

/// Coefficient-level residual of Russo's formula
/// `d/dp P_p[A] = Σ_v P_p[v pivotal]` for an increasing event.
///
/// Both sides are expanded in the basis `p^j (1-p)^{N-1-j}`; the residual
/// is the maximum absolute coefficient difference and must be exactly 0.
pub fn check_russo(event: &EventSpec, region: Parallelogram) -> Result<i128> {
    let n = region.len();
    let table = truth_table(event, region)?;
    require_increasing(&table, n, &event.name())?;
    let counts = counts_by_popcount(&table, n);
    if n == 0 {
        return Ok(0);
    }
    // derivative coefficients: L_j = (j+1) a_{j+1} - (N-j) a_j
    let mut lhs = vec![0i128; n];
    for (j, l) in lhs.iter_mut().enumerate() {
        *l = (j as i128 + 1) * counts[j + 1] as i128 - (n as i128 - j as i128) * counts[j] as i128;
    }
    // pivotal counts: d_j = Σ_v #{configs of other sites, j open, v pivotal}
    let mut rhs = vec![0i128; n];
    for v in 0..n {
        let bit = 1usize << v;
        for mask in 0..table.len() {
            if mask & bit != 0 {
                continue;
            }
            if table[mask | bit] && !table[mask] {
                rhs[mask.count_ones() as usize] += 1;
            }
        }
    }
    let mut max_abs = 0i128;
    for j in 0..n {
        max_abs = max_abs.max((lhs[j] - rhs[j]).abs());
    }
    Ok(max_abs)
}

/// Exact margin of the crossing-doubling inequality
/// `28·P_p[C_hor([0,2^k n]×[0,2^(k+1) n])] ≤ (28·P_p[C_hor([0,n]×[0,2n])])^(2^k)`
/// at enumerable sizes.
pub fn check_lemma1(n: i32, k: u32, num: u64, den: u64) -> Result<ExactMargin> {
    let small = Parallelogram::new(0, n, 0, 2 * n)?;
    let big_n = n << k;
    let big = Parallelogram::new(0, big_n, 0, 2 * big_n)?;
    if big.len() > ENUM_SITE_LIMIT {
        return Err(Error::RegionTooLarge {
            sites: big.len(),
            limit: ENUM_SITE_LIMIT,
        });
    }
    let poly_small = enumerate(&EventSpec::crossing_hor(small), small)?;
    let poly_big = enumerate(&EventSpec::crossing_hor(big), big)?;
    let s_small = poly_small.eval_exact(num, den)?; // over den^Ns
    let s_big = poly_big.eval_exact(num, den)?; // over den^Nb
    let ns = small.len() as u32;
    let nb = big.len() as u32;
    let reps = 1u32 << k;
    // margin = (28 * s_small / den^Ns)^reps - 28 * s_big / den^Nb
    //        = [ (28 s_small)^reps * den^Nb - 28 s_big * den^(Ns*reps) ] / den^(Ns*reps + Nb)
    let mut lhs: u128 = 1;
    for _ in 0..reps {
        lhs = lhs
            .checked_mul(28u128 * s_small)
            .ok_or_else(|| Error::InvalidParameter(String::from("lemma1 overflow")))?;
    }
    let lhs = lhs
        .checked_mul(pow_u128(den, nb)?)
        .ok_or_else(|| Error::InvalidParameter(String::from("lemma1 overflow")))?;
    let rhs = (28u128 * s_big)
        .checked_mul(pow_u128(den, ns * reps)?)
        .ok_or_else(|| Error::InvalidParameter(String::from("lemma1 overflow")))?;
    Ok(ExactMargin {
        numerator: lhs as i128 - rhs as i128,
        den,
        exponent: ns * reps + nb,
    })
}

// ---------------------------------------------------------------------------
// Independent reference implementations
// ---------------------------------------------------------------------------

/// Circuit detection by explicit winding-number search in the covering
/// graph, independent of the blocking-path route in `events`.
///
/// A cut ray runs from the annulus center along +x. Each directed edge
/// carries a winding increment of ±1 when it crosses the ray (half-open
/// convention, exact integer arithmetic in oblique coordinates). An open
/// circuit surrounding the inner box exists iff some open annulus site on
/// the cut row reaches its own sheet-shifted copy.
pub fn circuit_by_winding<V: ConfigView>(view: &V, annulus: &Annulus) -> bool {
    let sites = annulus.sites();
    let open_sites: Vec<SiteCoord> = sites
        .iter()
        .copied()
        .filter(|s| view.is_open(*s))
        .collect();
    if open_sites.is_empty() {
        return false;
    }
    let center = annulus.center;
    // winding increment of the directed edge a -> b across the cut
    let cross = |a: SiteCoord, b: SiteCoord| -> i32 {
        // x > center.x in doubled integer coordinates: 2m + n
        let on_ray = |s: SiteCoord| s.n == center.n && 2 * s.m + s.n > 2 * center.m + center.n;
        if a.n == center.n && b.n == center.n + 1 && on_ray(a) {
            1
        } else if b.n == center.n && a.n == center.n + 1 && on_ray(b) {
            -1
        } else {
            0
        }
    };
    const SHEETS: i32 = 4; // sheets -4..=4
    let zone = annulus.outer_box();
    let sheet_count = (2 * SHEETS + 1) as usize;
    // starts: open sites on the cut (every surrounding circuit crosses it)
    for &start in open_sites.iter() {
        if !(start.n == center.n && 2 * start.m + start.n > 2 * center.m + center.n) {
            continue;
        }
        let mut seen = vec![false; zone.len() * sheet_count];
        let idx = |s: SiteCoord, w: i32| -> usize {
            zone.rank(s) * sheet_count + (w + SHEETS) as usize
        };
        let mut stack = vec![(start, 0i32)];
        seen[idx(start, 0)] = true;
        while let Some((s, w)) = stack.pop() {
            for t in s.neighbors() {
                if !annulus.contains(t) || !view.is_open(t) {
                    continue;
                }
                let w2 = w + cross(s, t);
                if w2.abs() > SHEETS {
                    continue;
                }
                if t == start && w2 != 0 {
                    return true;
                }
                if !seen[idx(t, w2)] {
                    seen[idx(t, w2)] = true;
                    stack.push((t, w2));
                }
            }
        }
    }
    false
}

/// Four-arm detection by explicit disjoint-witness search: for every
/// clockwise-ordered choice of four origin neighbors and alternating
/// coloring, two vertex-disjoint same-color paths to the box exterior are
/// sought with unit-capacity max-flow. Exponentially slower than the
/// interface-counting evaluator but directly matches the definition.
pub fn four_arm_by_witness<V: ConfigView>(view: &V, n: i32) -> bool {
    let region = view.region();
    let box_n = Parallelogram::centered(SiteCoord::ORIGIN, n);
    let neighbors: Vec<SiteCoord> = NEIGHBOR_OFFSETS_CLOCKWISE
        .iter()
        .map(|(dm, dn)| SiteCoord::new(*dm, *dn))
        .collect();
    // all clockwise-ordered 4-subsets of the 6 neighbors
    for i1 in 0..6 {
        for i2 in i1 + 1..6 {
            for i3 in i2 + 1..6 {
                for i4 in i3 + 1..6 {
                    let quad = [neighbors[i1], neighbors[i2], neighbors[i3], neighbors[i4]];
                    for shift in 0..2 {
                        let (o1, c1, o2, c2) = if shift == 0 {
                            (quad[0], quad[1], quad[2], quad[3])
                        } else {
                            (quad[1], quad[2], quad[3], quad[0])
                        };
                        if two_disjoint_arms(view, &region, &box_n, o1, o2, true)
                            && two_disjoint_arms(view, &region, &box_n, c1, c2, false)
                        {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Whether two site-disjoint same-color arms run from distinct origin
/// neighbors to outside `[-n,n]^2` (a two-arm event of one color).
pub fn has_two_arms<V: ConfigView>(view: &V, n: i32, want_open: bool) -> bool {
    let region = view.region();
    let box_n = Parallelogram::centered(SiteCoord::ORIGIN, n);
    let neighbors: Vec<SiteCoord> = NEIGHBOR_OFFSETS_CLOCKWISE
        .iter()
        .map(|(dm, dn)| SiteCoord::new(*dm, *dn))
        .collect();
    for i in 0..6 {
        for j in i + 1..6 {
            if two_disjoint_arms(view, &region, &box_n, neighbors[i], neighbors[j], want_open) {
                return true;
            }
        }
    }
    false
}

/// Two vertex-disjoint same-color paths from `va` and `vb` (one each) to
/// color-matching sites outside the box, avoiding the origin.
fn two_disjoint_arms<V: ConfigView>(
    view: &V,
    region: &Parallelogram,
    box_n: &Parallelogram,
    va: SiteCoord,
    vb: SiteCoord,
    want_open: bool,
) -> bool {
    if view.is_open(va) != want_open || view.is_open(vb) != want_open {
        return false;
    }
    // collect participating sites: in-box color-matching sites (minus the
    // origin) plus color-matching exit sites (outside box, inside region,
    // adjacent to the box)
    let mut ids: Vec<SiteCoord> = Vec::new();
    let id_of = |list: &mut Vec<SiteCoord>, s: SiteCoord| -> usize {
        if let Some(i) = list.iter().position(|t| *t == s) {
            i
        } else {
            list.push(s);
            list.len() - 1
        }
    };
    let mut in_box_sites: Vec<SiteCoord> = Vec::new();
    for s in box_n.iter() {
        if s != SiteCoord::ORIGIN && region.contains(s) && view.is_open(s) == want_open {
            in_box_sites.push(s);
            id_of(&mut ids, s);
        }
    }
    let mut exits: Vec<SiteCoord> = Vec::new();
    for &s in &in_box_sites {
        for t in s.neighbors() {
            if !box_n.contains(t)
                && region.contains(t)
                && view.is_open(t) == want_open
                && !exits.contains(&t)
            {
                exits.push(t);
                id_of(&mut ids, t);
            }
        }
    }
    if !ids.contains(&va) || !ids.contains(&vb) {
        return false;
    }

    // unit-capacity flow: node split (in = 2i, out = 2i+1), source, sink
    let v = ids.len();
    let source = 2 * v;
    let sink = 2 * v + 1;
    let mut graph = FlowGraph::new(2 * v + 2);
    let index = |s: SiteCoord, ids: &[SiteCoord]| ids.iter().position(|t| *t == s).unwrap();
    for (i, &s) in ids.iter().enumerate() {
        graph.add_edge(2 * i, 2 * i + 1, 1);
        if box_n.contains(s) {
            for t in s.neighbors() {
                if let Some(j) = ids.iter().position(|u| *u == t) {
                    graph.add_edge(2 * i + 1, 2 * j, 1);
                }
            }
        } else {
            // exit node: flows to sink, no outgoing lattice edges
            graph.add_edge(2 * i + 1, sink, 1);
        }
    }
    graph.add_edge(source, 2 * index(va, &ids), 1);
    graph.add_edge(source, 2 * index(vb, &ids), 1);
    graph.max_flow(source, sink) >= 2
}

struct FlowGraph {
    // edges as (to, cap); adjacency holds edge indices; reverse edge is idx^1
    edges: Vec<(usize, i32)>,
    adj: Vec<Vec<usize>>,
}

impl FlowGraph {
    fn new(nodes: usize) -> Self {
        FlowGraph {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i32) {
        self.adj[from].push(self.edges.len());
        self.edges.push((to, cap));
        self.adj[to].push(self.edges.len());
        self.edges.push((from, 0));
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> i32 {
        let mut flow = 0;
        loop {
            // BFS for an augmenting path
            let mut prev_edge = vec![usize::MAX; self.adj.len()];
            let mut queue = alloc::collections::VecDeque::new();
            queue.push_back(source);
            prev_edge[source] = usize::MAX - 1;
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    break;
                }
                for &e in &self.adj[u] {
                    let (to, cap) = self.edges[e];
                    if cap > 0 && prev_edge[to] == usize::MAX {
                        prev_edge[to] = e;
                        queue.push_back(to);
                    }
                }
            }
            if prev_edge[sink] == usize::MAX {
                return flow;
            }
            // augment by 1 (unit capacities)
            let mut u = sink;
            while u != source {
                let e = prev_edge[u];
                self.edges[e].1 -= 1;
                self.edges[e ^ 1].1 += 1;
                u = self.edges[e ^ 1].0;
            }
            flow += 1;
        }
    }
}
