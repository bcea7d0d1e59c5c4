use lightray::multiplier::{p_eval, MultiplierMethod, Signature, SplitVector};
use lightray::specfun::{hyp2f1, HyperParams};
use lightray::transform::find_null_direction;
use proptest::prelude::*;

const SIGS: [(usize, usize); 5] = [(2, 2), (2, 3), (3, 3), (4, 3), (5, 3)];

fn split(s: Signature, v: &[f64]) -> SplitVector {
    SplitVector::from_flat(s, &v[..s.dim()]).unwrap()
}

fn off_cone(xi: &SplitVector) -> bool {
    let (a, b) = (xi.norm_prime(), xi.norm_dprime());
    b > 1e-3 && (a / b - 1.0).abs() > 1e-2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_is_swap_symmetric(k in 0usize..5, v in prop::collection::vec(-2.0f64..2.0, 8)) {
        let s = Signature::new(SIGS[k].0, SIGS[k].1).unwrap();
        let xi = split(s, &v);
        prop_assume!(off_cone(&xi) && xi.norm_prime() > 1e-3);
        let a = p_eval(s, &xi, MultiplierMethod::Auto).unwrap();
        let b = p_eval(s.swapped(), &xi.swapped(), MultiplierMethod::Auto).unwrap();
        prop_assert!((a / b - 1.0).abs() < 1e-10, "{a} vs {b}");
    }

    #[test]
    fn p_is_homogeneous_of_degree_minus_one(
        k in 0usize..5,
        v in prop::collection::vec(-2.0f64..2.0, 8),
        la in -3.0f64..3.0,
    ) {
        let s = Signature::new(SIGS[k].0, SIGS[k].1).unwrap();
        let xi = split(s, &v);
        prop_assume!(off_cone(&xi));
        let a = 10f64.powf(la);
        let scaled = SplitVector::new(
            xi.prime().iter().map(|x| a * x).collect(),
            xi.dprime().iter().map(|x| a * x).collect(),
        );
        let p1 = p_eval(s, &xi, MultiplierMethod::Auto).unwrap();
        let p2 = p_eval(s, &scaled, MultiplierMethod::Auto).unwrap();
        prop_assert!((a * p2 / p1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hyp2f1_symmetric_and_euler(a in -2.5f64..2.5, b in -2.5f64..2.5, c in 0.3f64..4.0, z in 0.0f64..0.95) {
        let f = hyp2f1(HyperParams::new(a, b, c).unwrap(), z).unwrap();
        let g = hyp2f1(HyperParams::new(b, a, c).unwrap(), z).unwrap();
        let e = (1.0 - z).powf(c - a - b) * hyp2f1(HyperParams::new(c - a, c - b, c).unwrap(), z).unwrap();
        let scale = f.abs().max(1.0);
        prop_assert!((f - g).abs() <= 1e-12 * scale);
        prop_assert!((f - e).abs() <= 1e-9 * scale, "{f} vs Euler {e}");
    }

    #[test]
    fn null_direction_is_null_and_orthogonal(k in 0usize..5, v in prop::collection::vec(-2.0f64..2.0, 8)) {
        let s = Signature::new(SIGS[k].0, SIGS[k].1).unwrap();
        let xi = split(s, &v);
        prop_assume!(xi.norm_prime() + xi.norm_dprime() > 1e-6);
        let d = find_null_direction(s, &xi).unwrap();
        let n1: f64 = d.theta_prime.iter().map(|x| x * x).sum();
        let n2: f64 = d.theta_dprime.iter().map(|x| x * x).sum();
        let ip: f64 = xi.prime().iter().zip(&d.theta_prime).map(|(a, b)| a * b).sum::<f64>()
            + xi.dprime().iter().zip(&d.theta_dprime).map(|(a, b)| a * b).sum::<f64>();
        prop_assert!((n1 - 1.0).abs() < 1e-12 && (n2 - 1.0).abs() < 1e-12);
        prop_assert!(ip.abs() < 1e-12 * (1.0 + xi.norm_prime() + xi.norm_dprime()));
    }
}
