//! Geometry of the triangular lattice.
//!
//! Sites carry oblique coordinates `(m, n)`; the planar position of a site
//! is `m + n·e^{iπ/3}`, i.e. `(m + n/2, n·√3/2)` in Cartesian coordinates.
//! Boxes (parallelograms, annuli) are axis-aligned in oblique coordinates;
//! Euclidean balls are the only planar-defined regions.

use crate::error::{Error, Result};
use crate::math::{ceil, floor, hypot, SQRT3};
use alloc::format;
use alloc::vec::Vec;

/// The six neighbor offsets of every site.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 6] =
    [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];

/// The six neighbor offsets in clockwise order of their embedded angle,
/// starting from the positive x-axis. Used by arm events.
pub const NEIGHBOR_OFFSETS_CLOCKWISE: [(i32, i32); 6] =
    [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// A lattice site in oblique coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteCoord {
    pub m: i32,
    pub n: i32,
}

impl SiteCoord {
    pub const ORIGIN: SiteCoord = SiteCoord { m: 0, n: 0 };

    pub fn new(m: i32, n: i32) -> Self {
        SiteCoord { m, n }
    }

    /// Planar embedding `(m + n/2, n·√3/2)`.
    pub fn embed(self) -> (f64, f64) {
        (self.m as f64 + self.n as f64 / 2.0, self.n as f64 * SQRT3 / 2.0)
    }

    /// The six nearest neighbors, all at embedded distance exactly 1.
    pub fn neighbors(self) -> [SiteCoord; 6] {
        NEIGHBOR_OFFSETS.map(|(dm, dn)| SiteCoord::new(self.m + dm, self.n + dn))
    }

    pub fn offset(self, dm: i32, dn: i32) -> SiteCoord {
        SiteCoord::new(self.m + dm, self.n + dn)
    }

    /// Chebyshev distance in oblique coordinates; the box `[-k,k]^2` around
    /// `other` contains `self` iff this is ≤ k.
    pub fn oblique_chebyshev(self, other: SiteCoord) -> i32 {
        (self.m - other.m).abs().max((self.n - other.n).abs())
    }

    pub fn euclidean_distance(self, other: SiteCoord) -> f64 {
        let (ax, ay) = self.embed();
        let (bx, by) = other.embed();
        hypot(ax - bx, ay - by)
    }
}

/// Site of the lattice closest to a planar point, ties broken by the
/// lexicographically smallest `(m, n)`.
pub fn nearest_site(x: f64, y: f64) -> SiteCoord {
    let n_real = y * 2.0 / SQRT3;
    let m_real = x - n_real / 2.0;
    let (m0, n0) = (floor(m_real) as i32, floor(n_real) as i32);
    let mut best = SiteCoord::new(m0, n0);
    let mut best_d = f64::INFINITY;
    for dn in -1..=2 {
        for dm in -1..=2 {
            let s = SiteCoord::new(m0 + dm, n0 + dn);
            let (sx, sy) = s.embed();
            let d = hypot(sx - x, sy - y);
            if d < best_d - 1e-12 || (d < best_d + 1e-12 && (s.m, s.n) < (best.m, best.n)) {
                best = s;
                best_d = d;
            }
        }
    }
    best
}

/// Inclusive oblique box `[m1,m2] × [n1,n2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Parallelogram {
    pub m1: i32,
    pub m2: i32,
    pub n1: i32,
    pub n2: i32,
}

impl Parallelogram {
    pub fn new(m1: i32, m2: i32, n1: i32, n2: i32) -> Result<Self> {
        if m1 > m2 || n1 > n2 {
            return Err(Error::InvalidGeometry(format!(
                "parallelogram [{m1},{m2}]x[{n1},{n2}] has empty extent"
            )));
        }
        Ok(Parallelogram { m1, m2, n1, n2 })
    }

    /// The box `center + [-k, k]^2`.
    pub fn centered(center: SiteCoord, k: i32) -> Self {
        Parallelogram {
            m1: center.m - k,
            m2: center.m + k,
            n1: center.n - k,
            n2: center.n + k,
        }
    }

    pub fn width(&self) -> usize {
        (self.m2 - self.m1 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.n2 - self.n1 + 1) as usize
    }

    /// Exact site count `(m2-m1+1)(n2-n1+1)`.
    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: SiteCoord) -> bool {
        self.m1 <= s.m && s.m <= self.m2 && self.n1 <= s.n && s.n <= self.n2
    }

    pub fn contains_box(&self, other: &Parallelogram) -> bool {
        self.m1 <= other.m1 && other.m2 <= self.m2 && self.n1 <= other.n1 && other.n2 <= self.n2
    }

    /// Row-major rank of a contained site (rows indexed by `n`).
    pub fn rank(&self, s: SiteCoord) -> usize {
        debug_assert!(self.contains(s));
        (s.n - self.n1) as usize * self.width() + (s.m - self.m1) as usize
    }

    pub fn site_at(&self, rank: usize) -> SiteCoord {
        debug_assert!(rank < self.len());
        let w = self.width();
        SiteCoord::new(
            self.m1 + (rank % w) as i32,
            self.n1 + (rank / w) as i32,
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = SiteCoord> + '_ {
        (0..self.len()).map(|r| self.site_at(r))
    }

    /// Smallest box containing both operands.
    pub fn hull(&self, other: &Parallelogram) -> Parallelogram {
        Parallelogram {
            m1: self.m1.min(other.m1),
            m2: self.m2.max(other.m2),
            n1: self.n1.min(other.n1),
            n2: self.n2.max(other.n2),
        }
    }

    pub fn padded(&self, pad: i32) -> Parallelogram {
        Parallelogram {
            m1: self.m1 - pad,
            m2: self.m2 + pad,
            n1: self.n1 - pad,
            n2: self.n2 + pad,
        }
    }
}

/// Oblique annulus `(center+[-outer,outer]^2) \ (center+[-inner,inner]^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Annulus {
    pub center: SiteCoord,
    pub inner: i32,
    pub outer: i32,
}

impl Annulus {
    pub fn new(center: SiteCoord, inner: i32, outer: i32) -> Result<Self> {
        if inner < 0 || inner >= outer {
            return Err(Error::InvalidGeometry(format!(
                "annulus requires 0 <= inner < outer, got ({inner}, {outer})"
            )));
        }
        Ok(Annulus {
            center,
            inner,
            outer,
        })
    }

    pub fn outer_box(&self) -> Parallelogram {
        Parallelogram::centered(self.center, self.outer)
    }

    pub fn inner_box(&self) -> Parallelogram {
        Parallelogram::centered(self.center, self.inner)
    }

    pub fn contains(&self, s: SiteCoord) -> bool {
        let d = s.oblique_chebyshev(self.center);
        d > self.inner && d <= self.outer
    }

    pub fn sites(&self) -> Vec<SiteCoord> {
        self.outer_box().iter().filter(|s| self.contains(*s)).collect()
    }
}

/// Euclidean ball realized as the finite set of sites whose embedding lies
/// within `radius` of `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanBall {
    pub center: (f64, f64),
    pub radius: f64,
}

impl EuclideanBall {
    pub fn new(center: (f64, f64), radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.0.is_finite() || !center.1.is_finite()
        {
            return Err(Error::InvalidGeometry(format!(
                "ball requires finite center and radius > 0, got (({},{}), {radius})",
                center.0, center.1
            )));
        }
        Ok(EuclideanBall { center, radius })
    }

    pub fn contains_site(&self, s: SiteCoord) -> bool {
        let (x, y) = s.embed();
        hypot(x - self.center.0, y - self.center.1) <= self.radius + 1e-12
    }

    /// An oblique box guaranteed to contain every site of the ball.
    pub fn bounding_box(&self) -> Parallelogram {
        let (cx, cy) = self.center;
        let r = self.radius;
        let n_lo = floor((cy - r) * 2.0 / SQRT3) as i32 - 1;
        let n_hi = ceil((cy + r) * 2.0 / SQRT3) as i32 + 1;
        // m = x - n/2 with x in [cx-r, cx+r]; extremes over n at the ends
        let m_lo = floor(cx - r - n_hi as f64 / 2.0) as i32 - 1;
        let m_hi = ceil(cx + r - n_lo as f64 / 2.0) as i32 + 1;
        Parallelogram {
            m1: m_lo,
            m2: m_hi,
            n1: n_lo,
            n2: n_hi,
        }
    }

    /// Exactly the sites within `radius` of the center.
    pub fn sites(&self) -> Vec<SiteCoord> {
        let mut out = Vec::new();
        let bb = self.bounding_box();
        for n in bb.n1..=bb.n2 {
            for m in bb.m1..=bb.m2 {
                let s = SiteCoord::new(m, n);
                if self.contains_site(s) {
                    out.push(s);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;
    use alloc::vec::Vec;

    #[test]
    fn neighbor_offsets_match_definition() {
        let s = SiteCoord::ORIGIN;
        let got: Vec<_> = s.neighbors().to_vec();
        for off in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)] {
            assert!(got.contains(&SiteCoord::new(off.0, off.1)));
        }
        assert_eq!(got.len(), 6);
    }

    #[test]
    fn neighbors_at_unit_distance_everywhere() {
        let s = SiteCoord::new(2, 3);
        for t in s.neighbors() {
            assert!((s.euclidean_distance(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn neighbor_symmetry_on_patch() {
        for m in 0..10 {
            for n in 0..10 {
                let s = SiteCoord::new(m, n);
                for t in s.neighbors() {
                    assert!(t.neighbors().contains(&s), "{s:?} {t:?}");
                }
            }
        }
    }

    #[test]
    fn embedding_fixed_points() {
        assert_eq!(SiteCoord::new(1, 0).embed(), (1.0, 0.0));
        let (x, y) = SiteCoord::new(0, 1).embed();
        assert!((x - 0.5).abs() < 1e-15 && (y - SQRT3 / 2.0).abs() < 1e-15);
        let (x, y) = SiteCoord::new(2, 2).embed();
        assert!((x - 3.0).abs() < 1e-15 && (y - SQRT3).abs() < 1e-15);
    }

    #[test]
    fn nearest_site_roundtrips_lattice_points() {
        for m in -8..8 {
            for n in -8..8 {
                let s = SiteCoord::new(m, n);
                let (x, y) = s.embed();
                assert_eq!(nearest_site(x, y), s);
            }
        }
    }

    #[test]
    fn nearest_site_tie_break_is_lexicographic() {
        // midpoint of (0,0) and (1,0): both at distance 0.5
        assert_eq!(nearest_site(0.5, 0.0), SiteCoord::new(0, 0));
        // midpoint of (0,0) and (0,1)
        let (x, y) = (0.25, SQRT3 / 4.0);
        assert_eq!(nearest_site(x, y), SiteCoord::new(0, 0));
    }

    #[test]
    fn parallelogram_count_and_ranks() {
        let p = Parallelogram::new(-2, 3, 1, 4).unwrap();
        assert_eq!(p.len(), 6 * 4);
        let mut seen = Vec::new();
        for (i, s) in p.iter().enumerate() {
            assert_eq!(p.rank(s), i);
            assert!(p.contains(s));
            seen.push(s);
        }
        assert_eq!(seen.len(), p.len());
        assert!(Parallelogram::new(1, 0, 0, 0).is_err());
    }

    #[test]
    fn annulus_site_set_matches_definition() {
        let a = Annulus::new(SiteCoord::ORIGIN, 1, 2).unwrap();
        let sites = a.sites();
        assert_eq!(sites.len(), 25 - 9);
        for s in &sites {
            assert!(s.oblique_chebyshev(SiteCoord::ORIGIN) == 2);
        }
        assert!(Annulus::new(SiteCoord::ORIGIN, 2, 2).is_err());
    }

    #[test]
    fn ball_of_half_radius_is_a_single_site() {
        let b = EuclideanBall::new((0.0, 0.0), 0.5).unwrap();
        assert_eq!(b.sites(), alloc::vec![SiteCoord::ORIGIN]);
    }

    #[test]
    fn ball_of_radius_one_is_origin_plus_neighbors() {
        let b = EuclideanBall::new((0.0, 0.0), 1.0).unwrap();
        let sites = b.sites();
        assert_eq!(sites.len(), 7);
        for t in SiteCoord::ORIGIN.neighbors() {
            assert!(sites.contains(&t));
        }
    }

    #[test]
    fn ball_site_count_bound_eight_r_squared() {
        for r in [2.0, 4.0, 8.0, 16.0] {
            let count = EuclideanBall::new((0.3, -0.7), r).unwrap().sites().len();
            assert!(
                (count as f64) <= 8.0 * r * r,
                "r={r}: {count} > {}",
                8.0 * r * r
            );
        }
    }

    #[test]
    fn ball_monotone_in_radius() {
        let small = EuclideanBall::new((1.2, 0.4), 3.0).unwrap().sites();
        let large = EuclideanBall::new((1.2, 0.4), 4.5).unwrap().sites();
        for s in &small {
            assert!(large.contains(s));
        }
    }

    #[test]
    fn ball_density_approaches_lattice_density() {
        let r = 64.0;
        let count = EuclideanBall::new((0.0, 0.0), r).unwrap().sites().len() as f64;
        let density = count / (PI * r * r);
        let expected = 2.0 / SQRT3;
        assert!((density / expected - 1.0).abs() < 0.05, "density {density}");
    }

    #[test]
    fn ball_contains_nearest_site_of_center() {
        let b = EuclideanBall::new((3.7, 1.9), 1.0).unwrap();
        let ns = nearest_site(3.7, 1.9);
        assert!(b.sites().contains(&ns));
    }
}
