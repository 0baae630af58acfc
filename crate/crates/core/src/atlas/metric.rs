use super::{ChartId, ChartedManifold, CubicInverse, PolyMap};
use crate::connection::LinearConnection;
use crate::error::{check_dim, Error, Result};
use crate::jets::Scalar;
use crate::linalg::Mat;

/// Local representatives `g_α(x)` of a Riemannian metric, evaluable over any
/// scalar type so that Christoffel symbols can be differentiated.
pub trait Metric: Send + Sync {
    fn dim(&self) -> usize;

    fn metric<S: Scalar>(&self, chart: ChartId, x: &[S]) -> Result<Mat<S>>;

    /// `∂_l g_α(x)` for `l = 0..dim`.
    fn metric_partials<S: Scalar>(&self, chart: ChartId, x: &[S]) -> Result<Vec<Mat<S>>>;

    fn inner(&self, chart: ChartId, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        Ok(self.metric(chart, x)?.bilinear(u, v))
    }
}

/// Inverse chart change used to pull the flat metric back into a curved chart.
#[derive(Debug, Clone, PartialEq)]
pub enum PullbackInverse {
    Cubic,
    Poly(PolyMap),
}

/// The metrics carried by the built-in fixtures.
#[derive(Debug, Clone, PartialEq)]
pub enum FixtureMetric {
    Euclidean {
        dim: usize,
    },
    /// Flat in `flat_chart`; elsewhere the pullback `Dhᵀ Dh` through the
    /// inverse chart change `h`.
    PulledBackFlat {
        dim: usize,
        flat_chart: ChartId,
        inverse: PullbackInverse,
    },
    /// `g(x) = e^{2cx}` on the line.
    Exponential {
        c: f64,
    },
    /// Round unit-sphere metric in stereographic coordinates,
    /// `4/(1+|x|²)² δ`, identical in both charts.
    Round {
        dim: usize,
    },
}

impl FixtureMetric {
    fn pullback<S: Scalar>(
        dim: usize,
        inverse: &PullbackInverse,
        w: &[S],
    ) -> (Mat<S>, Vec<Mat<S>>) {
        match inverse {
            PullbackInverse::Cubic => {
                let h = CubicInverse.eval(&w[0]);
                let h1 = ((h.clone() * h.clone()).scale(3.0) + S::one()).recip();
                let h2 = (h * h1.clone() * h1.clone() * h1.clone()).scale(-6.0);
                let g = Mat::from_fn(1, 1, |_, _| h1.clone() * h1.clone());
                let dg = Mat::from_fn(1, 1, |_, _| (h1.clone() * h2.clone()).scale(2.0));
                (g, vec![dg])
            }
            PullbackInverse::Poly(p) => {
                let comps = p.components();
                let jac = Mat::from_fn(dim, dim, |i, j| comps[i].derivative(j).eval(w));
                let g = jac.transpose().matmul(&jac);
                let dg = (0..dim)
                    .map(|l| {
                        let djac = Mat::from_fn(dim, dim, |i, j| {
                            comps[i].derivative(j).derivative(l).eval(w)
                        });
                        djac.transpose()
                            .matmul(&jac)
                            .add(&jac.transpose().matmul(&djac))
                    })
                    .collect();
                (g, dg)
            }
        }
    }
}

impl Metric for FixtureMetric {
    fn dim(&self) -> usize {
        match self {
            FixtureMetric::Euclidean { dim }
            | FixtureMetric::PulledBackFlat { dim, .. }
            | FixtureMetric::Round { dim } => *dim,
            FixtureMetric::Exponential { .. } => 1,
        }
    }

    fn metric<S: Scalar>(&self, chart: ChartId, x: &[S]) -> Result<Mat<S>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            FixtureMetric::Euclidean { dim } => Mat::identity(*dim),
            FixtureMetric::PulledBackFlat {
                dim,
                flat_chart,
                inverse,
            } => {
                if chart == *flat_chart {
                    Mat::identity(*dim)
                } else {
                    Self::pullback(*dim, inverse, x).0
                }
            }
            FixtureMetric::Exponential { c } => {
                Mat::from_fn(1, 1, |_, _| x[0].scale(2.0 * c).exp())
            }
            FixtureMetric::Round { dim } => {
                let d = S::one() + crate::jets::dot(x, x);
                let f = (d.clone() * d).recip().scale(4.0);
                Mat::<S>::identity(*dim).map(|v: &S| v.clone() * f.clone())
            }
        })
    }

    fn metric_partials<S: Scalar>(&self, chart: ChartId, x: &[S]) -> Result<Vec<Mat<S>>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            FixtureMetric::Euclidean { dim } => vec![Mat::zeros(*dim, *dim); *dim],
            FixtureMetric::PulledBackFlat {
                dim,
                flat_chart,
                inverse,
            } => {
                if chart == *flat_chart {
                    vec![Mat::zeros(*dim, *dim); *dim]
                } else {
                    Self::pullback(*dim, inverse, x).1
                }
            }
            FixtureMetric::Exponential { c } => {
                vec![Mat::from_fn(1, 1, |_, _| {
                    x[0].scale(2.0 * c).exp().scale(2.0 * c)
                })]
            }
            FixtureMetric::Round { dim } => {
                let d = S::one() + crate::jets::dot(x, x);
                let f = (d.clone() * d.clone() * d).recip().scale(-16.0);
                (0..*dim)
                    .map(|l| {
                        let s = x[l].clone() * f.clone();
                        Mat::<S>::identity(*dim).map(|v: &S| v.clone() * s.clone())
                    })
                    .collect()
            }
        })
    }
}

/// Levi-Civita connection of a metric:
/// `Γ(x)(u, v)^k = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}) uⁱ vʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeviCivita<M> {
    metric: M,
}

impl<M: Metric> LeviCivita<M> {
    pub fn metric(&self) -> &M {
        &self.metric
    }
}

pub fn levi_civita<M: Metric>(metric: M) -> LeviCivita<M> {
    LeviCivita { metric }
}

impl<M: Metric> LinearConnection for LeviCivita<M> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }

    fn christoffel<S: Scalar>(&self, chart: ChartId, x: &[S], xi: &[S], y: &[S]) -> Result<Vec<S>> {
        let n = self.metric.dim();
        check_dim(n, xi.len())?;
        check_dim(n, y.len())?;
        let g = self.metric.metric(chart, x)?;
        let dg = self.metric.metric_partials(chart, x)?;
        let w: Vec<S> = (0..n)
            .map(|l| {
                let mut acc = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        let c = dg[i].get(j, l).clone() + dg[j].get(i, l).clone()
                            - dg[l].get(i, j).clone();
                        acc = acc + c * xi[i].clone() * y[j].clone();
                    }
                }
                acc.scale(0.5)
            })
            .collect();
        g.solve(&w, 1e-13).ok_or(Error::SingularMetric)
    }
}

/// `|g_β(ψx)(dψ u, dψ v) − g_α(x)(u, v)|`.
pub fn metric_invariance_residual<M: Metric>(
    manifold: &ChartedManifold,
    metric: &M,
    from: ChartId,
    to: ChartId,
    x: &[f64],
    u: &[f64],
    v: &[f64],
) -> Result<f64> {
    let map = manifold.transition_at(from, to, x)?;
    let jac = map.tensor(1, x)?;
    let xb = map.value(x);
    let ub = jac.apply::<f64>(&[u])?;
    let vb = jac.apply::<f64>(&[v])?;
    let lhs = metric.inner(to, &xb, &ub, &vb)?;
    let rhs = metric.inner(from, x, u, v)?;
    Ok((lhs - rhs).abs())
}
