use std::f64::consts::PI;

use nalgebra::{Complex, DVector};
use proptest::prelude::*;

use elastic_network::cli::fixtures::{interior_stretch, triod_bent_state};
use elastic_network::diagnostics::{energy_variation, length_variation};
use elastic_network::junction::{build_q, junction_phi, junction_rhs, span_dimension, JunctionFrame, RANK_TOL};
use elastic_network::wellposed::{check_compat_order0, junction_complementary};
use elastic_network::CurveSamples;

fn unit(v: Vec<f64>) -> Option<Vec<f64>> {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (s > 0.1).then(|| v.iter().map(|x| x / s).collect())
}

/// Generic tangents, or copies of one direction with random signs.
fn tangents() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=4, 2usize..=5, any::<bool>()).prop_flat_map(|(n, q, collinear)| {
        let vectors = prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), q);
        let signs = prop::collection::vec(any::<bool>(), q);
        (vectors, signs).prop_filter_map("degenerate direction", move |(vs, signs)| {
            let vs: Option<Vec<_>> = vs.into_iter().map(unit).collect();
            let vs = vs?;
            if !collinear {
                return Some(vs);
            }
            let v = &vs[0];
            Some(signs.iter().map(|&s| v.iter().map(|x| if s { *x } else { -x }).collect()).collect())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn complementing_condition_matches_span(
        t in tangents(),
        d in prop::collection::vec(0.5..2.0f64, 5),
        re in 0.0..4.0f64,
        im in -4.0..4.0f64,
    ) {
        prop_assume!(re * re + im * im > 0.01);
        let d = &d[..t.len()];
        let spans = span_dimension(&t, RANK_TOL) >= 2;
        prop_assert_eq!(junction_complementary(&t, d, Complex::new(re, im), 1e-8).unwrap(), spans);
    }

    #[test]
    fn junction_system_solves_iff_tangents_span(t in tangents(), seed in prop::collection::vec(-1.0..1.0f64, 20)) {
        let n = t[0].len();
        let a: Vec<Vec<f64>> = (0..t.len()).map(|i| seed[i * n..(i + 1) * n].to_vec()).collect();
        let frame = JunctionFrame::new(t.clone(), a).unwrap();
        let result = junction_phi(&frame, RANK_TOL);
        prop_assert_eq!(result.is_ok(), span_dimension(&t, RANK_TOL) >= 2);
        if let Ok(phi) = result {
            let res = build_q(&t) * DVector::from_vec(phi) - junction_rhs(&frame);
            prop_assert!(res.amax() <= 1e-10, "residual {}", res.amax());
        }
    }

    #[test]
    fn compatibility_is_invariant_under_interior_reparametrization(
        amplitude in -0.05..0.05f64,
        lambda in 0.0..2.0f64,
    ) {
        let (plain, params) = triod_bent_state(64, lambda, amplitude, &|x| x).unwrap();
        let (stretched, _) = triod_bent_state(64, lambda, amplitude, &interior_stretch).unwrap();
        let a = check_compat_order0(&plain, &params, 1e-8).unwrap();
        let b = check_compat_order0(&stretched, &params, 1e-8).unwrap();
        prop_assert!(a.pass && b.pass, "{} | {}", a.summary(), b.summary());
    }
}

fn wavy(intervals: usize) -> CurveSamples {
    CurveSamples::from_fn(2, intervals, |x| {
        vec![x + 0.03 * (2.0 * PI * x).sin(), 0.04 * (2.0 * PI * x).cos() - 0.02 * (4.0 * PI * x).sin()]
    })
    .unwrap()
}

fn window(intervals: usize) -> Vec<f64> {
    (0..=intervals)
        .flat_map(|k| {
            let x = k as f64 / intervals as f64;
            let w = (PI * x).sin();
            [w * (1.0 + x), w * (0.5 - x * x)]
        })
        .collect()
}

#[test]
fn variation_discrepancy_shrinks_quadratically() {
    let levels = [256, 512, 1024];
    let gaps: Vec<[f64; 2]> = levels
        .iter()
        .map(|&nn| {
            let (c, d) = (wavy(nn), window(nn));
            let l = length_variation(&c, &d).unwrap();
            let e = energy_variation(&c, &d).unwrap();
            [(l.analytic - l.finite_difference).abs(), (e.analytic - e.finite_difference).abs()]
        })
        .collect();
    for which in 0..2 {
        for w in gaps.windows(2) {
            let ratio = w[0][which] / w[1][which];
            assert!(ratio > 3.0 && ratio < 5.5, "variation {which}: gaps {gaps:?}");
        }
    }
}
