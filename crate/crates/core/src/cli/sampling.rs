use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::atlas::Fixture;
use crate::error::Result;
use crate::jets::CurveJet;
use crate::linearize::LinearizedVector;
use crate::osculating::OsculatingTangent;

/// Independent deterministic stream per check.
pub(super) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(super) fn uniform_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

fn uniform_slots<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|_| uniform_vec(rng, n)).collect()
}

/// Jet in the fixture's primary chart at a safe base point.
pub(super) fn random_jet<R: Rng + ?Sized>(rng: &mut R, f: &Fixture, k: usize) -> CurveJet {
    let x = f.sample_base_point(rng);
    let xi = uniform_slots(rng, f.dim(), k);
    CurveJet::new(f.primary_chart(), x, xi).expect("sampled jets are well formed")
}

pub(super) fn random_tangent<R: Rng + ?Sized>(
    rng: &mut R,
    f: &Fixture,
    k: usize,
) -> OsculatingTangent {
    let base = random_jet(rng, f, k);
    let y = uniform_vec(rng, f.dim());
    let eta = uniform_slots(rng, f.dim(), k);
    OsculatingTangent::new(base, y, eta).expect("sampled tangents are well formed")
}

pub(super) fn random_linearized<R: Rng + ?Sized>(
    rng: &mut R,
    f: &Fixture,
    k: usize,
) -> LinearizedVector {
    let x = f.sample_base_point(rng);
    let z = uniform_slots(rng, f.dim(), k);
    LinearizedVector::new(f.primary_chart(), x, z).expect("sampled fibres are well formed")
}

/// Evaluates `f` on every item in parallel, keeping item order; failures
/// become `NaN` residuals and the first error message is returned.
pub(super) fn sweep<T, F>(items: &[T], f: F) -> (Vec<f64>, Option<String>)
where
    T: Sync,
    F: Fn(&T) -> Result<f64> + Sync,
{
    let results: Vec<Result<f64>> = items.par_iter().map(&f).collect();
    let mut note = None;
    let residuals = results
        .into_iter()
        .map(|r| match r {
            Ok(v) => v,
            Err(e) => {
                note.get_or_insert_with(|| e.to_string());
                f64::NAN
            }
        })
        .collect();
    (residuals, note)
}

/// `‖a − b‖_∞ / ‖b‖_∞`, zero when both vanish.
pub(super) fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let den = b.iter().fold(0.0f64, |m, q| m.max(q.abs()));
    if num == 0.0 {
        0.0
    } else {
        num / den.max(f64::MIN_POSITIVE)
    }
}

/// `‖a − b‖_∞ / max(1, ‖b‖_∞)`: absolute for unit-scale references,
/// relative beyond.
pub(super) fn scaled_diff(a: &[f64], b: &[f64]) -> f64 {
    let num = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let den = b.iter().fold(1.0f64, |m, q| m.max(q.abs()));
    num / den
}

pub(super) fn scaled_scalar(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
