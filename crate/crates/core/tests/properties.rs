use multiplier_lab::bumps::{psi_hat, theta_hat};
use multiplier_lab::conditions::{product_sobolev_k, ConditionOptions, IndexBox, WindowGrid};
use multiplier_lab::grid::{forward_transform, inverse_transform, lebesgue_norm, Field, GridSpec, Spectrum};
use multiplier_lab::operators::{apply_multiplier, directional_maximal, strong_maximal, SmoothnessSpec};
use multiplier_lab::symbol::{FnSymbol, Mikhlin};
use multiplier_lab::Complex64;
use proptest::prelude::*;

fn grid() -> GridSpec {
    GridSpec::new(2, 16, 4.0).unwrap()
}

fn field() -> impl Strategy<Value = Field> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 256)
        .prop_map(|v| Field::new(grid(), v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 256)
        .prop_map(|v| Spectrum::new(grid(), v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(f in field()) {
        let a = lebesgue_norm(&f, 2.0).unwrap();
        let b = forward_transform(&f).l2_norm();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn transform_round_trip(f in field()) {
        let back = inverse_transform(&forward_transform(&f));
        prop_assert!(back.max_abs_diff(&f) <= 1e-12 * f.max_abs().max(1.0));
    }

    #[test]
    fn multiplier_is_linear(f in field(), g in field(), c in complex(), s in spectrum()) {
        let combo = Field::new(grid(), f.values().iter().zip(g.values()).map(|(a, b)| c * a + b).collect()).unwrap();
        let lhs = apply_multiplier(&s, &combo).unwrap();
        let tf = apply_multiplier(&s, &f).unwrap();
        let tg = apply_multiplier(&s, &g).unwrap();
        let rhs = Field::new(grid(), tf.values().iter().zip(tg.values()).map(|(a, b)| c * a + b).collect()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-10 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn multipliers_compose(f in field(), s in spectrum(), t in spectrum()) {
        let two = apply_multiplier(&s, &apply_multiplier(&t, &f).unwrap()).unwrap();
        let one = apply_multiplier(&s.mul(&t).unwrap(), &f).unwrap();
        prop_assert!(two.max_abs_diff(&one) <= 1e-10 * one.max_abs().max(1.0));
    }

    #[test]
    fn plancherel_contraction(f in field(), s in spectrum()) {
        let sup = s.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let out = lebesgue_norm(&apply_multiplier(&s, &f).unwrap(), 2.0).unwrap();
        prop_assert!(out <= sup * lebesgue_norm(&f, 2.0).unwrap() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn maximal_is_sublinear_and_dominates(f in field(), g in field(), c in complex()) {
        let sum = Field::new(grid(), f.values().iter().zip(g.values()).map(|(a, b)| c * a + b).collect()).unwrap();
        for axis in 0..2 {
            let ms = directional_maximal(&sum, axis).unwrap();
            let mf = directional_maximal(&f, axis).unwrap();
            let mg = directional_maximal(&g, axis).unwrap();
            for i in 0..256 {
                let bound = c.norm() * mf.values()[i].re + mg.values()[i].re;
                prop_assert!(ms.values()[i].re <= bound * (1.0 + 1e-12) + 1e-12);
                prop_assert!(mf.values()[i].re >= f.values()[i].norm() * (1.0 - 1e-12));
            }
        }
        let strong = strong_maximal(&f);
        prop_assert!(strong.values().iter().zip(f.values()).all(|(m, v)| m.re >= v.norm() * (1.0 - 1e-12)));
    }

    #[test]
    fn partition_and_plateau(xi in 1e-3..1e3f64) {
        let j0 = xi.log2().floor() as i32;
        let sum: f64 = (j0 - 2..=j0 + 2).map(|j| psi_hat(xi * 2f64.powi(-j))).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        if psi_hat(xi) != 0.0 {
            prop_assert!((theta_hat(xi) - 1.0).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn k_is_homogeneous(scale in 0.1..10.0f64, b in 0.5..2.0f64) {
        let opts = ConditionOptions {
            window: WindowGrid::with_samples(64),
            index_box: Some(IndexBox::cube(2, -1, 0)),
            ..Default::default()
        };
        let smooth = SmoothnessSpec::new(2.0, vec![0.7, 0.9]).unwrap();
        let base = Mikhlin::new(2, b);
        let scaled = FnSymbol::new(2, "scaled", |xi: &[f64]| {
            use multiplier_lab::symbol::Symbol;
            base.eval(xi) * scale
        });
        let a = product_sobolev_k(&base, &smooth, &opts).unwrap().value;
        let c = product_sobolev_k(&scaled, &smooth, &opts).unwrap().value;
        prop_assert!((c - scale * a).abs() <= 1e-10 * scale * a);
    }
}
