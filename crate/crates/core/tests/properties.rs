//! Randomized invariants over the numeric substrate and the jet machinery.

use jetbundle::atlas::{
    ChartId, Fixture, FixtureKind, FixtureParams, Inversion, PolyMap, SmoothMap,
};
use jetbundle::connection::ConnectionComponents;
use jetbundle::faa::pushforward_jet;
use jetbundle::jets::{dual_directional, CurveJet, Dual, Series};
use jetbundle::linearize::{linear_transition, restrict_order, trivialize, LinearizedVector};
use jetbundle::tower::project;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn levels(flat: &[f64], n: usize) -> Vec<Vec<f64>> {
    flat.chunks(n).map(<[f64]>::to_vec).collect()
}

fn rel(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let scale = b.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
        / scale
}

fn unit_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

/// `(dim, order, x, flattened ξ)`.
fn jet_data(
    max_dim: usize,
    max_order: usize,
) -> impl Strategy<Value = (usize, usize, Vec<f64>, Vec<f64>)> {
    (1..=max_dim, 1..=max_order)
        .prop_flat_map(|(n, k)| (Just(n), Just(k), unit_vec(n), unit_vec(n * k)))
}

fn sphere() -> Fixture {
    Fixture::new(
        FixtureKind::SphereStereo,
        FixtureParams::defaults(FixtureKind::SphereStereo),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_product_is_associative(a in unit_vec(6), b in unit_vec(6), c in unit_vec(6)) {
        let (a, b, c) = (Series::new(a, 5), Series::new(b, 5), Series::new(c, 5));
        let l = (a.clone() * b.clone()) * c.clone();
        let r = a * (b * c);
        for i in 0..=5 {
            prop_assert!((l.coeff(i) - r.coeff(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn series_division_inverts_product(a in unit_vec(6), b in unit_vec(5)) {
        let mut bc = vec![2.0];
        bc.extend(b);
        let (a, b) = (Series::new(a, 5), Series::new(bc, 5));
        let q = (a.clone() * b.clone()) / b;
        for i in 0..=5 {
            prop_assert!((q.coeff(i) - a.coeff(i)).abs() < 1e-13);
        }
    }

    #[test]
    fn dual_derivative_matches_central_difference(seed in any::<u64>(), (n, _k, x, d) in jet_data(3, 1)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PolyMap::random(&mut rng, n, n, 4, 3);
        let exact = dual_directional(|p: &[Dual<f64>]| Ok(f.value_dual(p)), &x, &d).unwrap();
        let h = 1e-5;
        let shift = |s: f64| f.value(&x.iter().zip(&d).map(|(p, q)| p + s * q).collect::<Vec<_>>());
        let (fp, fm) = (shift(h), shift(-h));
        for a in 0..n {
            let fd = (fp[a] - fm[a]) / (2.0 * h);
            prop_assert!((fd - exact[a]).abs() <= 1e-7 * exact[a].abs().max(1.0), "{fd} vs {}", exact[a]);
        }
    }

    #[test]
    fn pushforward_is_functorial(seed in any::<u64>(), (n, _k, x, xi) in jet_data(3, 5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PolyMap::random(&mut rng, n, n, 3, 3);
        let g = PolyMap::random(&mut rng, n, n, 3, 3);
        let fg = f.compose(&g).unwrap();
        let jet = CurveJet::new(ChartId(0), x, levels(&xi, n)).unwrap();
        let two_step = pushforward_jet(&f, &pushforward_jet(&g, &jet).unwrap()).unwrap();
        let direct = pushforward_jet(&fg, &jet).unwrap();
        prop_assert!(rel(two_step.xi(), direct.xi()) < 1e-10);
    }

    #[test]
    fn pushforward_commutes_with_projection(seed in any::<u64>(), (n, k, x, xi) in jet_data(3, 5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PolyMap::random(&mut rng, n, n, 4, 3);
        let jet = CurveJet::new(ChartId(0), x, levels(&xi, n)).unwrap();
        let full = pushforward_jet(&f, &jet).unwrap();
        for i in 1..=k {
            let low = pushforward_jet(&f, &project(&jet, i).unwrap()).unwrap();
            prop_assert_eq!(low.xi(), &full.xi()[..i]);
        }
    }

    #[test]
    fn inversion_is_an_involution_on_jets((n, k, x, xi) in jet_data(2, 5)) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 0.04);
        let inv = Inversion::new(n).unwrap();
        let jet = CurveJet::new(ChartId(0), x, levels(&xi, n)).unwrap();
        let back = pushforward_jet(&inv, &pushforward_jet(&inv, &jet).unwrap()).unwrap();
        prop_assert!(rel(back.xi(), jet.xi()) < 1e-9);
        prop_assert!(rel(&[back.x().to_vec()], &[jet.x().to_vec()]) < 1e-14);
        prop_assert_eq!(k, back.order());
    }

    #[test]
    fn components_are_linear_and_triangular(seed in any::<u64>(), a in -2.0..2.0f64) {
        use rand::Rng;
        let f = sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = ConnectionComponents::induce(f.connection(), 4).unwrap();
        let x = f.sample_base_point(&mut rng);
        let xi: Vec<Vec<f64>> = (0..4).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let (u, v) = ([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], [0.3, -0.7]);
        let full = mc.at(f.primary_chart(), &x, &xi).unwrap();
        for i in 1..=4 {
            let lhs: Vec<f64> = u.iter().zip(&v).map(|(p, q)| a * p + q).collect();
            let combined = full.apply(i, &lhs);
            let (fu, fv) = (full.apply(i, &u), full.apply(i, &v));
            let scale = full.matrix(i).max_abs_diff(&jetbundle::linalg::Mat::zeros(2, 2)).max(1.0) * (2.0 + a.abs());
            for c in 0..2 {
                prop_assert!((combined[c] - (a * fu[c] + fv[c])).abs() < 1e-13 * scale);
            }
            // M^i sees only ξ_1..ξ_i.
            let prefix = mc.at(f.primary_chart(), &x, &xi[..i]).unwrap();
            prop_assert_eq!(prefix.matrix(i), full.matrix(i));
        }
    }

    #[test]
    fn linear_transitions_round_trip(seed in any::<u64>()) {
        use rand::Rng;
        let f = sphere();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = ConnectionComponents::induce(f.connection(), 4).unwrap();
        let x = f.sample_base_point(&mut rng);
        let z: Vec<Vec<f64>> = (0..4).map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let lv = LinearizedVector::new(f.primary_chart(), x, z).unwrap();
        let there = linear_transition(f.manifold(), &mc, &lv, f.partner_chart().unwrap()).unwrap();
        let back = linear_transition(f.manifold(), &mc, &there, f.primary_chart()).unwrap();
        prop_assert!(rel(back.z(), lv.z()) < 1e-10);
        prop_assert!(rel(&[back.x().to_vec()], &[lv.x().to_vec()]) < 1e-14);
    }

    #[test]
    fn trivialization_commutes_with_restriction(seed in any::<u64>(), (n, k, _x, xi) in jet_data(2, 5)) {
        prop_assume!(k >= 2);
        let kind = if n == 1 { FixtureKind::ExpMetric1d } else { FixtureKind::SphereStereo };
        let f = Fixture::new(kind, FixtureParams::defaults(kind)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = f.sample_base_point(&mut rng);
        let mc = ConnectionComponents::induce(f.connection(), k).unwrap();
        let jet = CurveJet::new(f.primary_chart(), x, levels(&xi, n)).unwrap();
        let lv = trivialize(&mc, &jet).unwrap();
        for i in 1..k {
            let low = trivialize(&mc, &project(&jet, i).unwrap()).unwrap();
            let restricted = restrict_order(&lv, i).unwrap();
            prop_assert_eq!(restricted.z(), low.z());
        }
    }
}
