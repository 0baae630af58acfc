use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use super::metric::PullbackInverse;
use super::{
    levi_civita, parse_key_values, Chart, ChartId, ChartedManifold, CubicInverse, Domain,
    FixtureMetric, Inversion, LeviCivita, PolyMap, Polynomial, SmoothMap,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixtureKind {
    FlatPoly,
    ExpMetric1d,
    SphereStereo,
}

impl FixtureKind {
    pub const ALL: [FixtureKind; 3] = [
        FixtureKind::FlatPoly,
        FixtureKind::ExpMetric1d,
        FixtureKind::SphereStereo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FixtureKind::FlatPoly => "flat_poly",
            FixtureKind::ExpMetric1d => "exp_metric_1d",
            FixtureKind::SphereStereo => "sphere_stereo",
        }
    }
}

impl fmt::Display for FixtureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FixtureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FixtureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

/// Tunable fixture parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureParams {
    /// Chart dimension (1 or 2 for `flat_poly` and `sphere_stereo`).
    pub dim: usize,
    /// Exponent rate of `exp_metric_1d`.
    pub c: f64,
    /// Annulus radii for sphere base points.
    pub r_min: f64,
    pub r_max: f64,
    /// Half width of the sampling box for the flat fixtures.
    pub half_width: f64,
}

impl FixtureParams {
    pub fn defaults(kind: FixtureKind) -> Self {
        Self {
            dim: match kind {
                FixtureKind::SphereStereo => 2,
                FixtureKind::FlatPoly | FixtureKind::ExpMetric1d => 1,
            },
            c: 1.0,
            r_min: 0.2,
            r_max: 5.0,
            half_width: 1.0,
        }
    }

    /// Applies `key = value` overrides on top of `self`.
    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config {
                line: 0,
                message: format!("invalid value `{v}` for `{key}`"),
            })
        }
        for (k, v) in parse_key_values(text)? {
            match k.as_str() {
                "dim" => self.dim = num(&k, &v)?,
                "c" => self.c = num(&k, &v)?,
                "r_min" => self.r_min = num(&k, &v)?,
                "r_max" => self.r_max = num(&k, &v)?,
                "half_width" => self.half_width = num(&k, &v)?,
                _ => {
                    return Err(Error::Config {
                        line: 0,
                        message: format!("unknown key `{k}`"),
                    })
                }
            }
        }
        Ok(self)
    }

    pub fn from_file(kind: FixtureKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::defaults(kind).with_overrides(&text)
    }

    fn validate(&self, kind: FixtureKind) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match kind {
            FixtureKind::ExpMetric1d if self.dim != 1 => {
                bad("exp_metric_1d is one-dimensional".into())
            }
            FixtureKind::FlatPoly | FixtureKind::SphereStereo if !(1..=2).contains(&self.dim) => {
                bad(format!(
                    "{kind} supports dimension 1 or 2, got {}",
                    self.dim
                ))
            }
            _ if !(self.r_min > 0.0 && self.r_max >= self.r_min) => {
                bad("sampling annulus needs 0 < r_min ≤ r_max".into())
            }
            _ if self.half_width.is_nan() || self.half_width <= 0.0 => {
                bad("half_width must be positive".into())
            }
            _ if !self.c.is_finite() => bad("c must be finite".into()),
            _ => Ok(()),
        }
    }
}

/// A built-in manifold with its atlas and metric.
#[derive(Debug, Clone)]
pub struct Fixture {
    kind: FixtureKind,
    params: FixtureParams,
    manifold: ChartedManifold,
    metric: FixtureMetric,
}

pub const CHART_A: ChartId = ChartId(0);
pub const CHART_B: ChartId = ChartId(1);

pub fn build_fixture(name: &str) -> Result<Fixture> {
    let kind: FixtureKind = name.parse()?;
    Fixture::new(kind, FixtureParams::defaults(kind))
}

fn chart(id: ChartId, name: &str) -> Chart {
    Chart {
        id,
        name: name.into(),
        domain: Domain::Everywhere,
    }
}

/// `(x, y) ↦ (x + y², y + (x + y²)²)` and its polynomial inverse
/// `(u, v) ↦ (u − (v − u²)², v − u²)`.
fn planar_shear_pair() -> (PolyMap, PolyMap) {
    let x = Polynomial::variable(2, 0);
    let y = Polynomial::variable(2, 1);
    let p = x.add(&y.mul(&y));
    let forward = PolyMap::new(2, vec![p.clone(), y.add(&p.mul(&p))]).expect("valid shear");
    let u = Polynomial::variable(2, 0);
    let v = Polynomial::variable(2, 1);
    let q = v.add(&u.mul(&u).mul(&Polynomial::constant(2, -1.0)));
    let inverse = PolyMap::new(
        2,
        vec![u.add(&q.mul(&q).mul(&Polynomial::constant(2, -1.0))), q],
    )
    .expect("valid shear inverse");
    (forward, inverse)
}

impl Fixture {
    pub fn new(kind: FixtureKind, params: FixtureParams) -> Result<Self> {
        params.validate(kind)?;
        let dim = params.dim;
        let (manifold, metric) = match kind {
            FixtureKind::FlatPoly => {
                let base = ChartedManifold::new(
                    if dim == 1 { "real line" } else { "plane" },
                    dim,
                    vec![chart(CHART_A, "A"), chart(CHART_B, "B")],
                );
                let (forward, inverse, pulled): (
                    Arc<dyn SmoothMap>,
                    Arc<dyn SmoothMap>,
                    PullbackInverse,
                ) = if dim == 1 {
                    let cubic = PolyMap::new(
                        1,
                        vec![Polynomial::from_terms(1, &[(1.0, &[3]), (1.0, &[1])])?],
                    )?;
                    (
                        Arc::new(cubic),
                        Arc::new(CubicInverse),
                        PullbackInverse::Cubic,
                    )
                } else {
                    let (f, g) = planar_shear_pair();
                    (Arc::new(f), Arc::new(g.clone()), PullbackInverse::Poly(g))
                };
                let m = base
                    .with_transition(CHART_A, CHART_B, forward, Domain::Everywhere)
                    .with_transition(CHART_B, CHART_A, inverse, Domain::Everywhere);
                (
                    m,
                    FixtureMetric::PulledBackFlat {
                        dim,
                        flat_chart: CHART_A,
                        inverse: pulled,
                    },
                )
            }
            FixtureKind::ExpMetric1d => (
                ChartedManifold::new("real line", 1, vec![chart(CHART_A, "A")]),
                FixtureMetric::Exponential { c: params.c },
            ),
            FixtureKind::SphereStereo => {
                let inv: Arc<dyn SmoothMap> = Arc::new(Inversion::new(dim)?);
                let overlap = Domain::Punctured { min_radius: 1e-9 };
                let m = ChartedManifold::new(
                    if dim == 1 {
                        "unit circle"
                    } else {
                        "unit sphere"
                    },
                    dim,
                    vec![
                        chart(CHART_A, "south-pole projection"),
                        chart(CHART_B, "north-pole projection"),
                    ],
                )
                .with_transition(CHART_A, CHART_B, inv.clone(), overlap)
                .with_transition(CHART_B, CHART_A, inv, overlap);
                (m, FixtureMetric::Round { dim })
            }
        };
        Ok(Self {
            kind,
            params,
            manifold,
            metric,
        })
    }

    pub fn kind(&self) -> FixtureKind {
        self.kind
    }

    pub fn params(&self) -> &FixtureParams {
        &self.params
    }

    pub fn manifold(&self) -> &ChartedManifold {
        &self.manifold
    }

    pub fn metric(&self) -> &FixtureMetric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn connection(&self) -> LeviCivita<FixtureMetric> {
        levi_civita(self.metric.clone())
    }

    pub fn primary_chart(&self) -> ChartId {
        CHART_A
    }

    /// The second chart, when the fixture has one.
    pub fn partner_chart(&self) -> Option<ChartId> {
        self.manifold
            .overlapping_pairs()
            .into_iter()
            .find(|(a, _)| *a == CHART_A)
            .map(|(_, b)| b)
    }

    /// Base point in the primary chart drawn from the fixture's safe region
    /// (inside every overlap).
    pub fn sample_base_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let p = &self.params;
        match self.kind {
            FixtureKind::FlatPoly | FixtureKind::ExpMetric1d => (0..p.dim)
                .map(|_| rng.gen_range(-p.half_width..=p.half_width))
                .collect(),
            FixtureKind::SphereStereo => {
                let r = rng.gen_range(p.r_min..=p.r_max);
                if p.dim == 1 {
                    if rng.gen_bool(0.5) {
                        vec![r]
                    } else {
                        vec![-r]
                    }
                } else {
                    let th = rng.gen_range(0.0..std::f64::consts::TAU);
                    vec![r * th.cos(), r * th.sin()]
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_poly_one_dimensional_transition() {
        let f = build_fixture("flat_poly").unwrap();
        let m = f.manifold();
        assert_eq!(m.map_point(CHART_A, CHART_B, &[2.0]).unwrap(), vec![10.0]);
        let j = m
            .transition(CHART_A, CHART_B)
            .unwrap()
            .tensor(1, &[2.0])
            .unwrap();
        assert_eq!(j.entry(0, &[0]), 13.0);
    }

    #[test]
    fn shear_pair_inverts() {
        let (f, g) = planar_shear_pair();
        let x = [0.3, -0.8];
        let back = g.eval(&f.eval(&x));
        assert!((back[0] - x[0]).abs() < 1e-15 && (back[1] - x[1]).abs() < 1e-15);
        let id = g.compose(&f).unwrap();
        assert_eq!(id, PolyMap::identity(2));
    }

    #[test]
    fn unknown_fixture_rejected() {
        assert!(matches!(
            build_fixture("torus"),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn overrides_apply_and_validate() {
        let p = FixtureParams::defaults(FixtureKind::SphereStereo)
            .with_overrides("dim = 1\nr_max = 3")
            .unwrap();
        assert_eq!((p.dim, p.r_max), (1, 3.0));
        assert!(Fixture::new(
            FixtureKind::SphereStereo,
            FixtureParams {
                dim: 3,
                ..p.clone()
            }
        )
        .is_err());
        assert!(FixtureParams::defaults(FixtureKind::FlatPoly)
            .with_overrides("bogus = 1")
            .is_err());
    }

    #[test]
    fn sphere_samples_stay_in_annulus() {
        use rand::SeedableRng;
        let f = build_fixture("sphere_stereo").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = f.sample_base_point(&mut rng);
            let r = crate::linalg::norm(&x);
            assert!((0.2 - 1e-12..=5.0 + 1e-12).contains(&r));
            assert!(f.manifold().in_overlap(CHART_A, CHART_B, &x).unwrap());
        }
    }
}
