use dualflow::duality::{dualize, dualize_inverse, duality_report};
use dualflow::geometry::{compute_shape, dot3, graph_derivatives};
use dualflow::minkowski::time_flip;
use dualflow::{CurvatureFunction, LorentzTransform, LorentzVector, MeridianSurface, SpaceTag};
use proptest::prelude::*;

fn transform(dim: usize, ops: &[(bool, usize, usize, f64)]) -> LorentzTransform {
    ops.iter().fold(LorentzTransform::identity(dim), |acc, &(boost, a, b, x)| {
        let step = if boost {
            LorentzTransform::boost(dim, x)
        } else {
            let (a, b) = (1 + a % (dim - 1), 1 + b % (dim - 1));
            if a == b {
                return acc;
            }
            LorentzTransform::givens(dim, a, b, x)
        };
        step.compose(&acc)
    })
}

fn ops() -> impl Strategy<Value = Vec<(bool, usize, usize, f64)>> {
    prop::collection::vec((any::<bool>(), 0usize..8, 0usize..8, -2.0f64..2.0), 1..6)
}

fn hyperbolic_point(spatial: &[f64]) -> LorentzVector {
    let r2: f64 = spatial.iter().map(|x| x * x).sum();
    let mut c = vec![(1.0 + r2).sqrt()];
    c.extend_from_slice(spatial);
    LorentzVector::new(c)
}

proptest! {
    #[test]
    fn transforms_preserve_the_form(dim in 4usize..7, ops in ops(), s in prop::collection::vec(-3.0f64..3.0, 6)) {
        let l = transform(dim, &ops);
        let scale = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).map(|(i, j)| l.get(i, j).abs()).fold(1.0, f64::max);
        prop_assert!(l.isometry_residual() <= 1e-13 * scale * scale);
        let x = hyperbolic_point(&s[..dim - 1]);
        let y = l.apply(&x);
        prop_assert!((y.q() + 1.0).abs() <= 1e-12 * y.max_abs().powi(2));
        prop_assert!(y.components()[0] > 0.0);
    }

    #[test]
    fn beltrami_normalization_hits_the_base_point(s in prop::collection::vec(-3.0f64..3.0, 4)) {
        let x = hyperbolic_point(&s);
        let l = LorentzTransform::normalize_to_beltrami(&x).unwrap();
        let y = l.apply(&x);
        prop_assert!((y.components()[0] - 1.0).abs() < 1e-10);
        for c in &y.components()[1..] {
            prop_assert!(c.abs() < 1e-10 * x.components()[0]);
        }
    }

    #[test]
    fn time_flip_is_an_involution(s in prop::collection::vec(-3.0f64..3.0, 5)) {
        let x = LorentzVector::new(s);
        prop_assert_eq!(time_flip(&time_flip(&x)), x.clone());
        prop_assert_eq!(time_flip(&x).q(), x.q());
    }

    #[test]
    fn curvature_functions_are_normalized_and_homogeneous(
        p in prop::sample::select(vec![1.0, 2.0, 4.0, 8.0]),
        k in prop::collection::vec(0.1f64..10.0, 2..6),
        lambda in 0.1f64..10.0,
    ) {
        let n = k.len();
        let f = CurvatureFunction::power_mean(p, n).unwrap();
        let fk = f.eval(&k).unwrap();
        let scaled: Vec<f64> = k.iter().map(|x| lambda * x).collect();
        prop_assert!((f.eval(&scaled).unwrap() - lambda * fk).abs() <= 1e-12 * lambda * fk);
        prop_assert!((f.eval(&vec![lambda; n]).unwrap() - lambda).abs() <= 1e-13 * lambda);
        let (lo, hi) = k.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        prop_assert!(lo * (1.0 - 1e-14) <= fk && fk <= hi * (1.0 + 1e-14));
        let mut rev = k.clone();
        rev.reverse();
        prop_assert!((f.eval(&rev).unwrap() - fk).abs() <= 1e-13 * fk);
    }

    #[test]
    fn dual_of_dual_is_the_original(
        p in prop::sample::select(vec![1.0, 2.0, 4.0]),
        k in prop::collection::vec(0.1f64..10.0, 2..6),
    ) {
        let f = CurvatureFunction::power_mean(p, k.len()).unwrap();
        let dd = f.dual().dual();
        let a = f.eval(&k).unwrap();
        prop_assert!((dd.eval(&k).unwrap() - a).abs() <= 1e-12 * a);
        let inv: Vec<f64> = k.iter().map(|x| 1.0 / x).collect();
        prop_assert!((f.dual().eval(&k).unwrap() * f.eval(&inv).unwrap() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn de_sitter_geometry_invariants(c in -2.0f64..-0.3, frac in 0.0f64..0.1, m in 0u32..4, n in 2usize..5) {
        let s = MeridianSurface::perturbed(SpaceTag::DeSitter, n, 128, c, frac * c.abs(), m).unwrap();
        let Ok(pg) = compute_shape(&s) else { return Ok(()) };
        let (d1, _) = graph_derivatives(&s);
        for (p, &du) in pg.iter().zip(&d1) {
            prop_assert!(p.v > 0.0 && p.v <= 1.0 + 1e-12);
            let ch = p.u.cosh();
            let v_graph = (1.0 - du * du / (ch * ch)).sqrt();
            prop_assert!((p.chi - ch / v_graph).abs() <= 1e-8 * p.chi);
            prop_assert!((p.chi_from_normal() - p.chi).abs() <= 1e-8 * p.chi);
            prop_assert!((dot3(&p.x, &p.x) - 1.0).abs() <= 1e-12 * (1.0 + p.x[0] * p.x[0]));
            prop_assert!((dot3(&p.nu, &p.nu) + 1.0).abs() <= 1e-10);
            prop_assert!(p.nu[0] < 0.0);
            prop_assert!(dot3(&p.nu, &p.x).abs() <= 1e-10);
            let t = dot3(&p.x_d, &p.x_d).sqrt();
            prop_assert!(dot3(&p.nu, &p.x_d).abs() <= 1e-10 * t.max(1.0));
            prop_assert!(p.k_mer > 0.0 && p.k_rot > 0.0);
        }
    }

    #[test]
    fn hyperbolic_geometry_invariants(c in 0.3f64..2.0, frac in 0.0f64..0.1, m in 0u32..4, n in 2usize..5) {
        let s = MeridianSurface::perturbed(SpaceTag::Hyperbolic, n, 128, c, frac * c, m).unwrap();
        let Ok(pg) = compute_shape(&s) else { return Ok(()) };
        let (d1, _) = graph_derivatives(&s);
        for (p, &du) in pg.iter().zip(&d1) {
            let sh = p.u.sinh();
            let vt_graph = (1.0 + du * du / (sh * sh)).sqrt();
            prop_assert!((p.vt - vt_graph).abs() <= 1e-8 * vt_graph);
            prop_assert!(p.v <= 1.0 + 1e-12);
            prop_assert!((dot3(&p.x, &p.x) + 1.0).abs() <= 1e-12 * p.x[0] * p.x[0]);
            prop_assert!((dot3(&p.nu, &p.nu) - 1.0).abs() <= 1e-10);
            prop_assert!(dot3(&p.nu, &p.x).abs() <= 1e-10 * p.x[0]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn duality_round_trip(c in 0.5f64..1.5, frac in 0.0f64..0.05, m in 2u32..4, n in 2usize..4) {
        let h = MeridianSurface::perturbed(SpaceTag::Hyperbolic, n, 128, c, frac * c, m).unwrap();
        let d = dualize(&h).unwrap();
        prop_assert_eq!(d.space(), SpaceTag::DeSitter);
        prop_assert!(d.u().iter().all(|&u| u < 0.0));
        let back = dualize_inverse(&d).unwrap();
        prop_assert!(back.sup_distance(&h) <= 1e-6, "{}", back.sup_distance(&h));
        let r = duality_report(&h, &d).unwrap();
        prop_assert!(r.kappa_product <= 1e-2 && r.inner_product <= 1e-6, "{:?}", r);
    }
}
