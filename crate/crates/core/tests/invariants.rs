use std::f64::consts::PI;

use dscharge_core::charges::{extrapolate, mass_inequalities, rescale_charges, sphere_integral, QuadratureSpec, TailExponent};
use dscharge_core::charts::{embed, locate, planar_to_static, static_to_planar, ChartId, ChartPoint};
use dscharge_core::models::KerrDeSitter;
use proptest::prelude::*;

const LAMBDA: f64 = 10.0;

fn chart_and_coords() -> impl Strategy<Value = (ChartId, [f64; 4])> {
    let l = LAMBDA;
    let angles = (0.05..PI - 0.05, 0.0..2.0 * PI);
    prop_oneof![
        (-2.0 * l..2.0 * l, 0.05..PI - 0.05, angles.clone()).prop_map(|(t, x, (th, ps))| (ChartId::Global, [t, x, th, ps])),
        (-l..l, -l..l, -l..l, -l..l).prop_map(|(t, x, y, z)| (ChartId::PlanarUpper, [t, x, y, z])),
        (-l..l, -l..l, -l..l, -l..l).prop_map(|(t, x, y, z)| (ChartId::PlanarLower, [t, x, y, z])),
        (-2.0 * l..2.0 * l, 0.01 * l..0.99 * l, angles.clone()).prop_map(|(t, r, (th, ps))| (ChartId::StaticInner, [t, r, th, ps])),
        (-2.0 * l..2.0 * l, 1.01 * l..5.0 * l, angles.clone()).prop_map(|(t, r, (th, ps))| (ChartId::StaticOuter, [t, r, th, ps])),
        (0.1 * l..2.0 * l, 0.01 * l..3.0 * l, angles).prop_map(|(t, r, (th, ps))| (ChartId::Hyperbolic, [t, r, th, ps])),
    ]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn embedded_points_lie_on_the_hyperboloid_and_roundtrip((chart, c) in chart_and_coords()) {
        let a = embed(&ChartPoint::new(chart, c, LAMBDA).unwrap()).unwrap();
        prop_assert!(a.hyperboloid_residual(LAMBDA).abs() < 1e-12 * LAMBDA * LAMBDA);
        let q = locate(&a, chart, LAMBDA).unwrap();
        for i in 0..3 {
            prop_assert!((q.coords[i] - c[i]).abs() <= 1e-10 * c[i].abs().max(1.0));
        }
    }

    #[test]
    fn planar_static_roundtrip(t in -20.0..20.0f64, r in 0.01..30.0f64) {
        prop_assume!((r * (t / LAMBDA).exp() - LAMBDA).abs() > 0.05);
        let s = planar_to_static(t, r, LAMBDA).unwrap();
        let (t2, r2) = static_to_planar(s.t_bar, s.r_bar, LAMBDA).unwrap();
        prop_assert!((t2 - t).abs() < 1e-10 * t.abs().max(1.0));
        prop_assert!((r2 / r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spheroidal_inversion_roundtrips(m in 0.0..2.0f64, a in -3.0..3.0f64, r in 0.5..200.0f64, th in 0.01..PI - 0.01) {
        let k = KerrDeSitter::new(m, a, LAMBDA).unwrap();
        let hat = k.bl_to_hat([0.3, r, th, 1.0]);
        let back = k.hat_to_bl(hat).unwrap();
        prop_assert!((back[1] / r - 1.0).abs() < 1e-10);
        prop_assert!((back[2] - th).abs() < 1e-9);
        prop_assert!((back[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn margin_is_conformal_factor_times_bar_margin(
        eb in -2.0..2.0f64,
        pb in prop::array::uniform3(-1.0..1.0f64),
        jb in prop::array::uniform3(-1.0..1.0f64),
        factor in 0.05..20.0f64,
    ) {
        let (e, p, j) = rescale_charges(eb, pb, jb, factor).unwrap();
        let m = mass_inequalities(Some((e, p, j, factor)), None, 1.0, 0.0).unwrap();
        let expect = factor * (eb - norm(pb));
        prop_assert!((m.energy_momentum.unwrap() - expect).abs() <= 1e-13 * factor.max(1.0) * 4.0);
        prop_assert!((m.combined.unwrap() - m.energy_momentum.unwrap()).abs() <= 1e-12 * factor.max(1.0) * 4.0);
    }

    #[test]
    fn extrapolation_recovers_power_law_limit(q in -5.0..5.0f64, c1 in -3.0..3.0f64, c2 in -3.0..3.0f64, s in 1usize..=3) {
        prop_assume!(c1.abs() > 0.05);
        let radii: Vec<f64> = (0..5).map(|k| 100.0 * 2f64.powi(k)).collect();
        let u: Vec<f64> = radii.iter().map(|r| radii[0] / r).collect();
        let vals: Vec<f64> = u.iter().map(|x| q + c1 * x.powi(s as i32) + c2 * x.powi(s as i32 + 1)).collect();
        let fit = extrapolate(&u, &vals, TailExponent::Pinned(s as f64)).unwrap();
        prop_assert!((fit.value - q).abs() < 1e-9 * (1.0 + c1.abs() + c2.abs()));
    }

    #[test]
    fn sphere_quadrature_integrates_quadratics(i in 0usize..3, j in 0usize..3) {
        let v = sphere_integral::<1, _>(&QuadratureSpec::new(8, 16), |n| Ok([n.n[i] * n.n[j]])).unwrap()[0];
        let expect = if i == j { 4.0 * PI / 3.0 } else { 0.0 };
        prop_assert!((v - expect).abs() < 1e-13);
    }
}
