//! Event construction from CLI flags. Geometry flags are interpreted per
//! event kind:
//!
//! | kind     | meaning of --m, --n                                   |
//! |----------|-------------------------------------------------------|
//! | siteopen | the site (m, n)                                       |
//! | chor     | crossing of the parallelogram [0,m] x [0,n]           |
//! | circuit  | annulus (n, 2n) around the origin                     |
//! | inout    | open path from [-m,m]^2 to the ring of [-n,n]^2       |
//! | point    | connection (0,0) <-> (m, n)                           |
//! | ball     | balls of radius n at 0 and m·e^(iθ), θ = first angle  |
//! | fourarm  | alternating arms from the origin to distance n        |

use perclab_core::estimators::{padded_pair_region, tau_guess};
use perclab_core::events::EventSpec;
use perclab_core::lattice::{EuclideanBall, Parallelogram, SiteCoord};

pub fn build_event(
    kind: &str,
    m: i32,
    n: i32,
    angle: f64,
) -> anyhow::Result<EventSpec> {
    let event = match kind {
        "siteopen" => EventSpec::site_open(SiteCoord::new(m, n)),
        "chor" => EventSpec::crossing_hor(Parallelogram::new(0, m, 0, n)?),
        "circuit" => EventSpec::circuit(SiteCoord::ORIGIN, n)?,
        "inout" => EventSpec::inout(m, n)?,
        "point" => EventSpec::point_connect(SiteCoord::ORIGIN, SiteCoord::new(m, n)),
        "ball" => {
            let r = n as f64;
            let a = EuclideanBall::new((0.0, 0.0), r)?;
            let b = EuclideanBall::new(
                (m as f64 * angle.cos(), m as f64 * angle.sin()),
                r,
            )?;
            EventSpec::ball_connect(a, b)
        }
        "fourarm" => EventSpec::four_arm(n)?,
        other => anyhow::bail!(
            "unknown event kind '{other}' (expected siteopen|chor|circuit|inout|point|ball|fourarm)"
        ),
    };
    Ok(event)
}

/// Simulation region for a one-off estimate: the event's required box, with
/// connection events padded so truncation bias stays below Monte Carlo
/// noise.
pub fn default_region(event: &EventSpec, p: f64) -> Parallelogram {
    match event {
        EventSpec::PointConnect { a, b } => {
            padded_pair_region(*a, *b, (2.0 * tau_guess(p)).ceil() as i32)
        }
        EventSpec::BallConnect { a, .. } => event
            .required_region()
            .padded((2.0 * a.radius).ceil() as i32),
        _ => event.required_region(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_mapping() {
        assert!(matches!(
            build_event("chor", 4, 8, 0.0).unwrap(),
            EventSpec::CrossingHor { .. }
        ));
        assert!(matches!(
            build_event("circuit", 0, 2, 0.0).unwrap(),
            EventSpec::Circuit { .. }
        ));
        assert!(build_event("nope", 1, 1, 0.0).is_err());
        assert!(build_event("circuit", 0, 0, 0.0).is_err());
    }

    #[test]
    fn regions_contain_requirements() {
        for (kind, m, n) in [
            ("chor", 6, 12),
            ("circuit", 0, 3),
            ("fourarm", 0, 2),
            ("point", 5, 1),
            ("ball", 8, 2),
        ] {
            let e = build_event(kind, m, n, 0.0).unwrap();
            let region = default_region(&e, 0.4);
            assert!(region.contains_box(&e.required_region()), "{kind}");
            assert!(e.validate(&region).is_ok(), "{kind}");
        }
    }
}
