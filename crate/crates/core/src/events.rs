//! Exact per-configuration evaluation of crossing, circuit, connection,
//! four-arm, and pivotality events.
//!
//! Every evaluator is a graph search over a `ConfigView`, so it works
//! identically on materialized and lazily sampled configurations. Searches
//! only touch the sites they visit.

use crate::error::{Error, Result};
use crate::lattice::{
    Annulus, EuclideanBall, Parallelogram, SiteCoord, NEIGHBOR_OFFSETS_CLOCKWISE,
};
use crate::sampler::{ConfigView, Configuration, LinkSpec};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Specification of an event on a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum EventSpec {
    /// A single site is open.
    SiteOpen { site: SiteCoord },
    /// Open path inside `zone` from its left column `{m1}×[n1,n2]` to its
    /// right column `{m2}×[n1,n2]`.
    CrossingHor { zone: Parallelogram },
    /// Open circuit inside the annulus surrounding its inner box.
    Circuit { annulus: Annulus },
    /// Open path from `[-inner,inner]^2` to the boundary ring of
    /// `[-outer,outer]^2`, inside the outer box (origin-centered).
    InOut { inner: i32, outer: i32 },
    /// Open path joining a site of ball `a` to a site of ball `b`.
    BallConnect { a: EuclideanBall, b: EuclideanBall },
    /// Open path joining two sites (a site is always connected to itself).
    PointConnect { a: SiteCoord, b: SiteCoord },
    /// Four site-disjoint arms with alternating colors in clockwise order,
    /// from neighbors of the origin to outside `[-n,n]^2`.
    FourArm { n: i32 },
    /// `site` is pivotal for the inner event: the event holds with the site
    /// switched open and fails with it switched closed.
    Pivotal { site: SiteCoord, inner: Box<EventSpec> },
}

impl EventSpec {
    pub fn site_open(site: SiteCoord) -> EventSpec {
        EventSpec::SiteOpen { site }
    }

    pub fn crossing_hor(zone: Parallelogram) -> EventSpec {
        EventSpec::CrossingHor { zone }
    }

    /// `C_circuit(center, r, 2r)`: the paper's annuli always have ratio 2.
    pub fn circuit(center: SiteCoord, inner: i32) -> Result<EventSpec> {
        if inner < 1 {
            return Err(Error::InvalidGeometry(format!(
                "circuit inner radius must be >= 1, got {inner}"
            )));
        }
        Ok(EventSpec::Circuit {
            annulus: Annulus::new(center, inner, 2 * inner)?,
        })
    }

    pub fn inout(inner: i32, outer: i32) -> Result<EventSpec> {
        if inner < 0 || inner >= outer {
            return Err(Error::InvalidGeometry(format!(
                "in/out crossing requires 0 <= n < m, got ({inner}, {outer})"
            )));
        }
        Ok(EventSpec::InOut { inner, outer })
    }

    pub fn ball_connect(a: EuclideanBall, b: EuclideanBall) -> EventSpec {
        EventSpec::BallConnect { a, b }
    }

    pub fn point_connect(a: SiteCoord, b: SiteCoord) -> EventSpec {
        EventSpec::PointConnect { a, b }
    }

    pub fn four_arm(n: i32) -> Result<EventSpec> {
        if n < 1 {
            return Err(Error::InvalidGeometry(format!(
                "four-arm radius must be >= 1, got {n}"
            )));
        }
        Ok(EventSpec::FourArm { n })
    }

    pub fn pivotal(site: SiteCoord, inner: EventSpec) -> EventSpec {
        EventSpec::Pivotal {
            site,
            inner: Box::new(inner),
        }
    }

    /// Short identifier used in curve labels and result rows.
    pub fn name(&self) -> String {
        match self {
            EventSpec::SiteOpen { site } => format!("site_open({},{})", site.m, site.n),
            EventSpec::CrossingHor { zone } => format!(
                "chor([{},{}]x[{},{}])",
                zone.m1, zone.m2, zone.n1, zone.n2
            ),
            EventSpec::Circuit { annulus } => format!(
                "circuit(({},{}),{},{})",
                annulus.center.m, annulus.center.n, annulus.inner, annulus.outer
            ),
            EventSpec::InOut { inner, outer } => format!("inout({inner},{outer})"),
            EventSpec::BallConnect { a, b } => format!(
                "ball_connect(({:.3},{:.3})r{:.3},({:.3},{:.3})r{:.3})",
                a.center.0, a.center.1, a.radius, b.center.0, b.center.1, b.radius
            ),
            EventSpec::PointConnect { a, b } => {
                format!("point_connect(({},{}),({},{}))", a.m, a.n, b.m, b.n)
            }
            EventSpec::FourArm { n } => format!("four_arm({n})"),
            EventSpec::Pivotal { site, inner } => {
                format!("pivotal(({},{}),{})", site.m, site.n, inner.name())
            }
        }
    }

    /// Whether adding open sites can never destroy the event.
    pub fn is_increasing(&self) -> bool {
        !matches!(
            self,
            EventSpec::FourArm { .. } | EventSpec::Pivotal { .. }
        )
    }

    /// Smallest box the event is defined on. Simulation regions must
    /// contain it; connection events additionally benefit from padding.
    pub fn required_region(&self) -> Parallelogram {
        match self {
            EventSpec::SiteOpen { site } => Parallelogram::centered(*site, 0),
            EventSpec::CrossingHor { zone } => *zone,
            EventSpec::Circuit { annulus } => annulus.outer_box(),
            EventSpec::InOut { outer, .. } => Parallelogram::centered(SiteCoord::ORIGIN, *outer),
            EventSpec::BallConnect { a, b } => a.bounding_box().hull(&b.bounding_box()),
            EventSpec::PointConnect { a, b } => {
                Parallelogram::centered(*a, 0).hull(&Parallelogram::centered(*b, 0))
            }
            // one extra layer so arms can end outside the box
            EventSpec::FourArm { n } => Parallelogram::centered(SiteCoord::ORIGIN, n + 1),
            EventSpec::Pivotal { site, inner } => inner
                .required_region()
                .hull(&Parallelogram::centered(*site, 0)),
        }
    }

    /// Validates the event geometry against a simulation region.
    pub fn validate(&self, region: &Parallelogram) -> Result<()> {
        match self {
            EventSpec::SiteOpen { site } => {
                if !region.contains(*site) {
                    return Err(Error::OutOfRegion {
                        m: site.m,
                        n: site.n,
                    });
                }
            }
            EventSpec::CrossingHor { zone } => {
                if !region.contains_box(zone) {
                    return Err(Error::InvalidGeometry(format!(
                        "crossing zone {:?} not contained in region {:?}",
                        zone, region
                    )));
                }
            }
            EventSpec::Circuit { annulus } => {
                if annulus.outer != 2 * annulus.inner || annulus.inner < 1 {
                    return Err(Error::InvalidGeometry(format!(
                        "circuit annulus must have outer = 2*inner >= 2, got ({}, {})",
                        annulus.inner, annulus.outer
                    )));
                }
                if !region.contains_box(&annulus.outer_box()) {
                    return Err(Error::InvalidGeometry(
                        String::from("circuit annulus not contained in region"),
                    ));
                }
            }
            EventSpec::InOut { inner, outer } => {
                if *inner < 0 || inner >= outer {
                    return Err(Error::InvalidGeometry(format!(
                        "in/out crossing requires 0 <= n < m, got ({inner}, {outer})"
                    )));
                }
                if !region.contains_box(&Parallelogram::centered(SiteCoord::ORIGIN, *outer)) {
                    return Err(Error::InvalidGeometry(
                        String::from("in/out outer box not contained in region"),
                    ));
                }
            }
            EventSpec::BallConnect { a, b } => {
                for ball in [a, b] {
                    let sites = ball.sites();
                    if sites.is_empty() {
                        return Err(Error::InvalidGeometry(format!(
                            "ball at ({},{}) radius {} contains no site",
                            ball.center.0, ball.center.1, ball.radius
                        )));
                    }
                    if let Some(s) = sites.iter().find(|s| !region.contains(**s)) {
                        return Err(Error::OutOfRegion { m: s.m, n: s.n });
                    }
                }
            }
            EventSpec::PointConnect { a, b } => {
                for s in [a, b] {
                    if !region.contains(*s) {
                        return Err(Error::OutOfRegion { m: s.m, n: s.n });
                    }
                }
            }
            EventSpec::FourArm { n } => {
                if *n < 1 {
                    return Err(Error::InvalidGeometry(format!(
                        "four-arm radius must be >= 1, got {n}"
                    )));
                }
                if !region.contains_box(&Parallelogram::centered(SiteCoord::ORIGIN, *n)) {
                    return Err(Error::InvalidGeometry(
                        String::from("four-arm box not contained in region"),
                    ));
                }
            }
            EventSpec::Pivotal { site, inner } => {
                if !region.contains(*site) {
                    return Err(Error::OutOfRegion {
                        m: site.m,
                        n: site.n,
                    });
                }
                inner.validate(region)?;
            }
        }
        Ok(())
    }

    /// Validated evaluation.
    pub fn eval<V: ConfigView>(&self, view: &V) -> Result<bool> {
        self.validate(&view.region())?;
        Ok(self.eval_unchecked(view))
    }

    /// Evaluation without geometry checks; callers validate once up front.
    pub fn eval_unchecked<V: ConfigView>(&self, view: &V) -> bool {
        match self {
            EventSpec::SiteOpen { site } => view.is_open(*site),
            EventSpec::CrossingHor { zone } => crossing_hor(view, zone),
            EventSpec::Circuit { annulus } => circuit_event(view, annulus),
            EventSpec::InOut { inner, outer } => inout_crossing(view, *inner, *outer),
            EventSpec::BallConnect { a, b } => ball_connect(view, a, b),
            EventSpec::PointConnect { a, b } => point_connect(view, *a, *b),
            EventSpec::FourArm { n } => four_arm(view, *n),
            EventSpec::Pivotal { site, inner } => {
                pivotal_for(view, *site, inner)
            }
        }
    }

    /// Incremental description for Newman–Ziff threshold sweeps.
    /// Non-monotone events are rejected.
    pub fn to_link_spec(&self, region: &Parallelogram) -> Result<LinkSpec> {
        self.validate(region)?;
        let len = region.len();
        let spec = match self {
            EventSpec::SiteOpen { site } => {
                let r = region.rank(*site);
                let mut domain = vec![false; len];
                domain[r] = true;
                LinkSpec {
                    name: self.name(),
                    domain,
                    terminals_a: vec![r],
                    terminals_b: vec![r],
                    complement: false,
                }
            }
            EventSpec::CrossingHor { zone } => {
                let mut domain = vec![false; len];
                for s in zone.iter() {
                    domain[region.rank(s)] = true;
                }
                let terminals_a = (zone.n1..=zone.n2)
                    .map(|n| region.rank(SiteCoord::new(zone.m1, n)))
                    .collect();
                let terminals_b = (zone.n1..=zone.n2)
                    .map(|n| region.rank(SiteCoord::new(zone.m2, n)))
                    .collect();
                LinkSpec {
                    name: self.name(),
                    domain,
                    terminals_a,
                    terminals_b,
                    complement: false,
                }
            }
            EventSpec::InOut { inner, outer } => {
                let outer_box = Parallelogram::centered(SiteCoord::ORIGIN, *outer);
                let mut domain = vec![false; len];
                for s in outer_box.iter() {
                    domain[region.rank(s)] = true;
                }
                let inner_box = Parallelogram::centered(SiteCoord::ORIGIN, *inner);
                let terminals_a = inner_box.iter().map(|s| region.rank(s)).collect();
                let terminals_b = outer_box
                    .iter()
                    .filter(|s| s.oblique_chebyshev(SiteCoord::ORIGIN) == *outer)
                    .map(|s| region.rank(s))
                    .collect();
                LinkSpec {
                    name: self.name(),
                    domain,
                    terminals_a,
                    terminals_b,
                    complement: false,
                }
            }
            EventSpec::BallConnect { a, b } => {
                let domain = vec![true; len];
                let terminals_a = a.sites().iter().map(|s| region.rank(*s)).collect();
                let terminals_b = b.sites().iter().map(|s| region.rank(*s)).collect();
                LinkSpec {
                    name: self.name(),
                    domain,
                    terminals_a,
                    terminals_b,
                    complement: false,
                }
            }
            EventSpec::PointConnect { a, b } => LinkSpec {
                name: self.name(),
                domain: vec![true; len],
                terminals_a: vec![region.rank(*a)],
                terminals_b: vec![region.rank(*b)],
                complement: false,
            },
            EventSpec::Circuit { annulus } => {
                let mut domain = vec![false; len];
                let mut terminals_a = Vec::new();
                let mut terminals_b = Vec::new();
                for s in annulus.sites() {
                    domain[region.rank(s)] = true;
                    if s.neighbors()
                        .iter()
                        .any(|t| t.oblique_chebyshev(annulus.center) <= annulus.inner)
                    {
                        terminals_a.push(region.rank(s));
                    }
                    if s.neighbors()
                        .iter()
                        .any(|t| t.oblique_chebyshev(annulus.center) > annulus.outer)
                    {
                        terminals_b.push(region.rank(s));
                    }
                }
                LinkSpec {
                    name: self.name(),
                    domain,
                    terminals_a,
                    terminals_b,
                    complement: true,
                }
            }
            EventSpec::FourArm { .. } | EventSpec::Pivotal { .. } => {
                return Err(Error::NonMonotoneEvent(self.name()));
            }
        };
        Ok(spec)
    }
}

/// Tri-state visit map over a search zone.
struct Flood {
    zone: Parallelogram,
    state: Vec<u8>, // 0 unknown, 1 accepted, 2 rejected
    stack: Vec<SiteCoord>,
}

impl Flood {
    fn new(zone: Parallelogram) -> Self {
        Flood {
            zone,
            state: vec![0; zone.len()],
            stack: Vec::new(),
        }
    }

    /// Discovers `s` if unknown; returns whether it was accepted just now.
    #[inline]
    fn discover<V: ConfigView>(&mut self, view: &V, s: SiteCoord, want_open: bool) -> bool {
        let r = self.zone.rank(s);
        if self.state[r] != 0 {
            return false;
        }
        if view.is_open(s) == want_open {
            self.state[r] = 1;
            self.stack.push(s);
            true
        } else {
            self.state[r] = 2;
            false
        }
    }
}

/// Open left-to-right crossing of a parallelogram.
pub fn crossing_hor<V: ConfigView>(view: &V, zone: &Parallelogram) -> bool {
    let mut flood = Flood::new(*zone);
    for n in zone.n1..=zone.n2 {
        let s = SiteCoord::new(zone.m1, n);
        if flood.discover(view, s, true) && s.m == zone.m2 {
            return true;
        }
    }
    while let Some(s) = flood.stack.pop() {
        for t in s.neighbors() {
            if zone.contains(t) && flood.discover(view, t, true) && t.m == zone.m2 {
                return true;
            }
        }
    }
    false
}

/// Open circuit in the annulus surrounding its inner box.
///
/// Decided by the blocking-path criterion: on the self-matching triangular
/// lattice, an open circuit exists iff NO closed path inside the annulus
/// joins a neighbor of the inner box to a neighbor of the outer boundary.
pub fn circuit_event<V: ConfigView>(view: &V, annulus: &Annulus) -> bool {
    let zone = annulus.outer_box();
    let center = annulus.center;
    let mut flood = Flood::new(zone);
    // seeds: closed annulus sites adjacent to the inner box
    for s in annulus.sites() {
        if s.neighbors()
            .iter()
            .any(|t| t.oblique_chebyshev(center) <= annulus.inner)
            && flood.discover(view, s, false)
            && touches_outside(s, center, annulus.outer)
        {
            return false;
        }
    }
    while let Some(s) = flood.stack.pop() {
        for t in s.neighbors() {
            if annulus.contains(t) && flood.discover(view, t, false) {
                if touches_outside(t, center, annulus.outer) {
                    return false;
                }
            }
        }
    }
    true
}

#[inline]
fn touches_outside(s: SiteCoord, center: SiteCoord, outer: i32) -> bool {
    s.neighbors()
        .iter()
        .any(|t| t.oblique_chebyshev(center) > outer)
}

/// Open path from `[-n,n]^2` to the boundary ring of `[-m,m]^2`.
pub fn inout_crossing<V: ConfigView>(view: &V, inner: i32, outer: i32) -> bool {
    let zone = Parallelogram::centered(SiteCoord::ORIGIN, outer);
    let inner_box = Parallelogram::centered(SiteCoord::ORIGIN, inner);
    let mut flood = Flood::new(zone);
    for s in inner_box.iter() {
        if flood.discover(view, s, true) {
            // inner sites are strictly inside the ring (inner < outer)
        }
    }
    while let Some(s) = flood.stack.pop() {
        for t in s.neighbors() {
            if zone.contains(t) && flood.discover(view, t, true) {
                if t.oblique_chebyshev(SiteCoord::ORIGIN) == outer {
                    return true;
                }
            }
        }
    }
    false
}

/// Open path joining a site of `a` to a site of `b`, anywhere in the region.
pub fn ball_connect<V: ConfigView>(view: &V, a: &EuclideanBall, b: &EuclideanBall) -> bool {
    let region = view.region();
    let mut flood = Flood::new(region);
    for s in a.sites() {
        if flood.discover(view, s, true) && b.contains_site(s) {
            return true;
        }
    }
    while let Some(s) = flood.stack.pop() {
        for t in s.neighbors() {
            if region.contains(t) && flood.discover(view, t, true) && b.contains_site(t) {
                return true;
            }
        }
    }
    false
}

/// Open path joining two sites. A site is connected to itself by convention.
pub fn point_connect<V: ConfigView>(view: &V, a: SiteCoord, b: SiteCoord) -> bool {
    if a == b {
        return true;
    }
    if !view.is_open(a) || !view.is_open(b) {
        return false;
    }
    let region = view.region();
    let mut flood = Flood::new(region);
    flood.discover(view, a, true);
    while let Some(s) = flood.stack.pop() {
        for t in s.neighbors() {
            if region.contains(t) && flood.discover(view, t, true) {
                if t == b {
                    return true;
                }
            }
        }
    }
    false
}

/// Arm status of one origin neighbor.
#[derive(Clone, Copy, PartialEq)]
enum ArmColor {
    None,
    Open,
    Closed,
}

/// Four-arm event `A4(1,n)`: four site-disjoint arms from neighbors of the
/// origin to outside `[-n,n]^2`, colored open/closed alternately in
/// clockwise order. The origin's own state is ignored; arms avoid the
/// origin; an arm's final site lies outside the box (inside the region) and
/// carries the arm's color.
///
/// Computed by interface counting: each neighbor is labeled by whether its
/// same-color cluster inside the punctured box reaches an exit site, and the
/// event holds iff the cyclic label sequence alternates at least four times.
pub fn four_arm<V: ConfigView>(view: &V, n: i32) -> bool {
    let region = view.region();
    let box_n = Parallelogram::centered(SiteCoord::ORIGIN, n);
    let mut colors = [ArmColor::None; 6];
    for (i, (dm, dn)) in NEIGHBOR_OFFSETS_CLOCKWISE.iter().enumerate() {
        let v = SiteCoord::new(*dm, *dn);
        let open = view.is_open(v);
        if arm_reaches_exit(view, &region, &box_n, v, open) {
            colors[i] = if open { ArmColor::Open } else { ArmColor::Closed };
        }
    }
    let present: Vec<ArmColor> = colors
        .iter()
        .copied()
        .filter(|c| *c != ArmColor::None)
        .collect();
    if present.len() < 4 {
        return false;
    }
    let mut alternations = 0;
    for i in 0..present.len() {
        if present[i] != present[(i + 1) % present.len()] {
            alternations += 1;
        }
    }
    alternations >= 4
}

/// Whether a same-color path from `v` inside `box_n \ {origin}` reaches a
/// site outside the box whose state matches the color.
fn arm_reaches_exit<V: ConfigView>(
    view: &V,
    region: &Parallelogram,
    box_n: &Parallelogram,
    v: SiteCoord,
    want_open: bool,
) -> bool {
    let mut flood = Flood::new(*box_n);
    if !flood.discover(view, v, want_open) {
        return false;
    }
    if exit_neighbor(view, region, box_n, v, want_open) {
        return true;
    }
    while let Some(s) = flood.stack.pop() {
        for t in s.neighbors() {
            if t == SiteCoord::ORIGIN || !box_n.contains(t) {
                continue;
            }
            if flood.discover(view, t, want_open) {
                if exit_neighbor(view, region, box_n, t, want_open) {
                    return true;
                }
            }
        }
    }
    false
}

#[inline]
fn exit_neighbor<V: ConfigView>(
    view: &V,
    region: &Parallelogram,
    box_n: &Parallelogram,
    s: SiteCoord,
    want_open: bool,
) -> bool {
    s.neighbors().iter().any(|t| {
        !box_n.contains(*t) && region.contains(*t) && view.is_open(*t) == want_open
    })
}

/// Pivotality per definition: the inner event holds with `site` switched
/// open and fails with it switched closed. Requires a materializable view,
/// so it is implemented on owned configurations.
fn pivotal_for<V: ConfigView>(view: &V, site: SiteCoord, inner: &EventSpec) -> bool {
    let region = view.region();
    let mut cfg = Configuration::filled(region, false);
    for s in region.iter() {
        if view.is_open(s) {
            cfg.set_rank(region.rank(s), true);
        }
    }
    let open = cfg.with_state(site, true).expect("validated");
    let closed = cfg.with_state(site, false).expect("validated");
    inner.eval_unchecked(&open) && !inner.eval_unchecked(&closed)
}

/// All sites whose flip changes the event's truth value, by flip-retest.
pub fn pivotal_sites(config: &Configuration, event: &EventSpec) -> Result<Vec<SiteCoord>> {
    let region = config.region();
    event.validate(&region)?;
    let mut out = Vec::new();
    for s in region.iter() {
        let open = config.with_state(s, true)?;
        let closed = config.with_state(s, false)?;
        if event.eval_unchecked(&open) != event.eval_unchecked(&closed) {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::LazyConfig;

    fn boxed(w: i32, h: i32) -> Parallelogram {
        Parallelogram::new(0, w - 1, 0, h - 1).unwrap()
    }

    #[test]
    fn crossing_all_open_and_all_closed() {
        let zone = boxed(4, 3);
        assert!(crossing_hor(&Configuration::filled(zone, true), &zone));
        assert!(!crossing_hor(&Configuration::filled(zone, false), &zone));
    }

    #[test]
    fn crossing_zone_must_fit_region() {
        let region = boxed(3, 3);
        let zone = boxed(5, 3);
        let e = EventSpec::crossing_hor(zone);
        assert!(e.eval(&Configuration::filled(region, true)).is_err());
    }

    #[test]
    fn single_column_crossing_is_any_open_site_in_column() {
        let zone = Parallelogram::new(0, 0, 0, 2).unwrap();
        let c = Configuration::from_open_sites(zone, &[SiteCoord::new(0, 1)]).unwrap();
        assert!(crossing_hor(&c, &zone));
        assert!(!crossing_hor(&Configuration::filled(zone, false), &zone));
    }

    #[test]
    fn crossing_uses_diagonal_adjacency() {
        // (0,1) and (1,0) are adjacent via offset (1,-1)
        let zone = boxed(2, 2);
        let c = Configuration::from_open_sites(
            zone,
            &[SiteCoord::new(0, 1), SiteCoord::new(1, 0)],
        )
        .unwrap();
        assert!(crossing_hor(&c, &zone));
        // (0,0) and (1,1) are NOT adjacent
        let c2 = Configuration::from_open_sites(
            zone,
            &[SiteCoord::new(0, 0), SiteCoord::new(1, 1)],
        )
        .unwrap();
        assert!(!crossing_hor(&c2, &zone));
    }

    #[test]
    fn circuit_endpoints() {
        let ann = Annulus::new(SiteCoord::ORIGIN, 1, 2).unwrap();
        let region = ann.outer_box();
        assert!(circuit_event(&Configuration::filled(region, true), &ann));
        assert!(!circuit_event(&Configuration::filled(region, false), &ann));
    }

    #[test]
    fn circuit_holds_for_explicit_ring() {
        let ann = Annulus::new(SiteCoord::ORIGIN, 1, 2).unwrap();
        let region = ann.outer_box();
        let ring: Vec<SiteCoord> = ann.sites();
        // opening the entire annulus ring forms a circuit
        let c = Configuration::from_open_sites(region, &ring).unwrap();
        assert!(circuit_event(&c, &ann));
        // remove one site from a full ring of the annulus: with the rest of
        // the annulus closed there is no circuit
        let mut partial = ring.clone();
        partial.retain(|s| *s != SiteCoord::new(2, 0));
        let c2 = Configuration::from_open_sites(region, &partial).unwrap();
        assert!(!circuit_event(&c2, &ann));
    }

    #[test]
    fn inout_requires_inner_below_outer() {
        assert!(EventSpec::inout(3, 3).is_err());
        assert!(EventSpec::inout(-1, 3).is_err());
        assert!(EventSpec::inout(1, 3).is_ok());
    }

    #[test]
    fn inout_monotone_in_outer_radius() {
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 6);
        for i in 0..200u64 {
            let view = LazyConfig::new(region, 0.55, 77, i);
            let far = inout_crossing(&view, 1, 5);
            let near = inout_crossing(&view, 1, 3);
            if far {
                assert!(near, "sample {i}: far crossing without near crossing");
            }
        }
    }

    #[test]
    fn ball_connect_shared_site_follows_state() {
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 3);
        let a = EuclideanBall::new((0.0, 0.0), 1.0).unwrap();
        let b = EuclideanBall::new((1.0, 0.0), 1.0).unwrap();
        // all closed: overlapping balls do not connect
        assert!(!ball_connect(&Configuration::filled(region, false), &a, &b));
        // single shared open site connects
        let c =
            Configuration::from_open_sites(region, &[SiteCoord::new(1, 0)]).unwrap();
        assert!(ball_connect(&c, &a, &b));
    }

    #[test]
    fn ball_connect_reduces_to_point_connect_for_tiny_radii() {
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 4);
        let a = EuclideanBall::new((0.0, 0.0), 0.4).unwrap();
        let b = EuclideanBall::new(SiteCoord::new(2, 1).embed(), 0.4).unwrap();
        for i in 0..300u64 {
            let view = LazyConfig::new(region, 0.6, 5, i);
            assert_eq!(
                ball_connect(&view, &a, &b),
                point_connect(&view, SiteCoord::ORIGIN, SiteCoord::new(2, 1)),
                "sample {i}"
            );
        }
    }

    #[test]
    fn point_connect_self_is_true_even_closed() {
        let region = boxed(2, 2);
        let c = Configuration::filled(region, false);
        assert!(point_connect(&c, SiteCoord::ORIGIN, SiteCoord::ORIGIN));
    }

    #[test]
    fn four_arm_all_open_or_closed_is_false() {
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 3);
        assert!(!four_arm(&Configuration::filled(region, true), 2));
        assert!(!four_arm(&Configuration::filled(region, false), 2));
    }

    #[test]
    fn four_arm_explicit_witness() {
        // open arms along +x/-x, closed everywhere else: closed arms exist
        // along +y/-y automatically.
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 3);
        let open: Vec<SiteCoord> = (1..=3)
            .map(|k| SiteCoord::new(k, 0))
            .chain((1..=3).map(|k| SiteCoord::new(-k, 0)))
            .collect();
        let c = Configuration::from_open_sites(region, &open).unwrap();
        assert!(four_arm(&c, 2));
    }

    #[test]
    fn four_arm_needs_closed_arms() {
        // everything open except one closed site: no two closed arms
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 3);
        let mut c = Configuration::filled(region, true);
        c = c.with_state(SiteCoord::new(0, 1), false).unwrap();
        assert!(!four_arm(&c, 2));
    }

    #[test]
    fn four_arm_monotone_decreasing_in_radius() {
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 5);
        for i in 0..400u64 {
            let view = LazyConfig::new(region, 0.5, 31, i);
            if four_arm(&view, 4) {
                assert!(four_arm(&view, 2), "sample {i}");
            }
        }
    }

    #[test]
    fn pivotal_single_site_event() {
        let region = Parallelogram::new(0, 0, 0, 0).unwrap();
        let e = EventSpec::site_open(SiteCoord::ORIGIN);
        for mask in 0..2u64 {
            let c = Configuration::from_mask(region, mask);
            let piv = pivotal_sites(&c, &e).unwrap();
            assert_eq!(piv, alloc::vec![SiteCoord::ORIGIN]);
        }
    }

    #[test]
    fn pivotal_two_site_row_crossing() {
        // C_hor on [0,1]x[0,0]: crossing iff both open; a site is pivotal
        // iff the other is open.
        let region = Parallelogram::new(0, 1, 0, 0).unwrap();
        let e = EventSpec::crossing_hor(region);
        for mask in 0..4u64 {
            let c = Configuration::from_mask(region, mask);
            let piv = pivotal_sites(&c, &e).unwrap();
            let s0 = SiteCoord::new(0, 0);
            let s1 = SiteCoord::new(1, 0);
            assert_eq!(piv.contains(&s0), c.state(s1).unwrap(), "mask {mask}");
            assert_eq!(piv.contains(&s1), c.state(s0).unwrap(), "mask {mask}");
        }
    }

    #[test]
    fn no_pivotal_sites_in_robust_all_open_crossing() {
        let region = boxed(4, 4);
        let e = EventSpec::crossing_hor(region);
        let c = Configuration::filled(region, true);
        assert!(pivotal_sites(&c, &e).unwrap().is_empty());
    }

    #[test]
    fn increasing_events_survive_opening_sites() {
        let region = Parallelogram::centered(SiteCoord::ORIGIN, 4);
        let events = [
            EventSpec::crossing_hor(Parallelogram::new(-2, 2, -2, 2).unwrap()),
            EventSpec::circuit(SiteCoord::ORIGIN, 2).unwrap(),
            EventSpec::inout(1, 3).unwrap(),
            EventSpec::point_connect(SiteCoord::new(-2, 0), SiteCoord::new(2, 0)),
        ];
        for (k, e) in events.iter().enumerate() {
            assert!(e.is_increasing());
            for i in 0..150u64 {
                let base = Configuration::sample(region, 0.5, 1000 + k as u64, i).unwrap();
                let before = e.eval_unchecked(&base);
                // flip a pseudo-random closed site open
                let target = region.site_at((i as usize * 37) % region.len());
                let after = e.eval_unchecked(&base.with_state(target, true).unwrap());
                if before {
                    assert!(after, "event {k} destroyed by opening a site");
                }
            }
        }
    }
}
