use choquet::capacity::{DiscreteCapacity, Distortion};
use choquet::expr::{parse, BinOp, Expr, Func};
use choquet::korovkin::modulus_of_continuity;
use choquet::operators::{
    binomial_weights, eval_grid, negative_binomial_weights, poisson_weights, Family, OperatorSpec, Truncation,
};
use choquet::random::{random_capacity, trial_rng};
use choquet::{choquet_discrete, choquet_discrete_oracle, SampledFunction};
use proptest::prelude::*;

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        (0u32..1000).prop_map(|v| Expr::Num(v as f64 / 8.0)),
        (1e-6f64..1e6).prop_map(Expr::Num),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        let unary_funcs =
            prop::sample::select(Func::ALL.iter().copied().filter(|f| f.arity() == 1).collect::<Vec<_>>());
        let binary_funcs =
            prop::sample::select(Func::ALL.iter().copied().filter(|f| f.arity() == 2).collect::<Vec<_>>());
        let ops = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]);
        prop_oneof![
            inner.clone().prop_map(|e| -e),
            (ops, inner.clone(), inner.clone()).prop_map(|(op, a, b)| Expr::binary(op, a, b)),
            (unary_funcs, inner.clone()).prop_map(|(f, a)| Expr::Call(f, vec![a])),
            (binary_funcs, inner.clone(), inner).prop_map(|(f, a, b)| Expr::Call(f, vec![a, b])),
        ]
    })
}

fn grid_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, len)
}

proptest! {
    #[test]
    fn printing_then_parsing_gives_the_same_tree(e in expr_strategy()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn discrete_sort_formula_matches_survival_sum(
        seed in any::<u64>(),
        n in 1usize..=8,
        raw in prop::collection::vec(-10.0f64..10.0, 8),
    ) {
        let cap = random_capacity(&mut trial_rng(seed, 0), n).unwrap();
        let values = &raw[..n];
        let fast = choquet_discrete(values, &cap).unwrap();
        let slow = choquet_discrete_oracle(values, &cap).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-12 * (1.0 + fast.abs()));
    }

    #[test]
    fn discrete_integral_is_monotone(
        seed in any::<u64>(),
        f in prop::collection::vec(-10.0f64..10.0, 5),
        bump in prop::collection::vec(0.0f64..3.0, 5),
    ) {
        let cap = random_capacity(&mut trial_rng(seed, 1), 5).unwrap();
        let g: Vec<f64> = f.iter().zip(&bump).map(|(a, b)| a + b).collect();
        prop_assert!(choquet_discrete(&f, &cap).unwrap() <= choquet_discrete(&g, &cap).unwrap() + 1e-12);
    }

    #[test]
    fn capacity_tables_are_monotone(seed in any::<u64>(), n in 1usize..=6) {
        let cap = random_capacity(&mut trial_rng(seed, 2), n).unwrap();
        let table = cap.table();
        for set in 0..table.len() {
            for i in 0..n {
                prop_assert!(table[set & !(1 << i)] <= table[set]);
            }
        }
        let dual = cap.dual();
        prop_assert!(DiscreteCapacity::new(n, dual.table().to_vec()).is_ok());
    }

    #[test]
    fn modulus_matches_brute_force_and_is_subadditive(
        values in prop::collection::vec(-5.0f64..5.0, 2..=201),
        d1 in 0.0f64..1.0,
        d2 in 0.0f64..1.0,
    ) {
        let f = SampledFunction::new(0.0, 1.0, values.clone()).unwrap();
        let h = f.step();
        for delta in [d1, d2] {
            let w = if delta == 0.0 { 0 } else { ((delta / h - 1e-9).ceil().max(1.0) as usize).min(f.cells()) };
            let mut brute = 0.0f64;
            for i in 0..values.len() {
                for j in i..values.len().min(i + w + 1) {
                    brute = brute.max((values[i] - values[j]).abs());
                }
            }
            prop_assert_eq!(modulus_of_continuity(&f, delta).unwrap(), brute);
        }
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let w_lo = modulus_of_continuity(&f, lo).unwrap();
        let w_hi = modulus_of_continuity(&f, hi).unwrap();
        prop_assert!(w_lo <= w_hi);
        // subadditivity holds for whole numbers of cells
        let (k1, k2) = ((d1 / h).floor() * h, (d2 / h).floor() * h);
        let joint = modulus_of_continuity(&f, k1 + k2).unwrap();
        prop_assert!(joint <= modulus_of_continuity(&f, k1).unwrap() + modulus_of_continuity(&f, k2).unwrap() + 1e-12);
    }

    #[test]
    fn weights_are_a_probability(n in 1usize..400, x in 0.0f64..1.0, scale in 0.0f64..5.0) {
        let b = binomial_weights(n, x).unwrap();
        prop_assert!(b.values.iter().all(|&p| p >= 0.0));
        prop_assert!((b.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let t = Truncation::default();
        for w in [poisson_weights(n, x * scale, &t).unwrap(), negative_binomial_weights(n, x * scale, &t).unwrap()] {
            prop_assert!(w.values.iter().all(|&p| p >= 0.0));
            prop_assert!(w.tail_bound < t.tail_tolerance);
            prop_assert!((w.retained_mass + w.tail_bound - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bernstein_operator_is_monotone_sublinear_and_comonotone_additive(
        f in grid_values(9),
        g in grid_values(9),
        bump in prop::collection::vec(0.0f64..2.0, 9),
        a in 0.0f64..4.0,
        n in 1usize..12,
        which in 0usize..3,
    ) {
        let d = [Distortion::Moebius, Distortion::Power(0.5), Distortion::Identity][which].clone();
        let spec = OperatorSpec::new(Family::Bernstein, n, d).unwrap();
        let xs = [0.0, 0.2, 0.5, 0.9, 1.0];
        let pl = |v: Vec<f64>| SampledFunction::new(0.0, 1.0, v).unwrap();
        let (ff, gg) = (pl(f.clone()), pl(g.clone()));
        let upper = pl(f.iter().zip(&bump).map(|(x, b)| x + b).collect());
        let sum = pl(f.iter().zip(&g).map(|(x, y)| x + y).collect());
        let scaled = pl(f.iter().map(|x| a * x).collect());
        let ev = |h: &SampledFunction| eval_grid(&spec, h, 1.0, &xs).unwrap();
        let (kf, kg, ku, ks, ka) = (ev(&ff), ev(&gg), ev(&upper), ev(&sum), ev(&scaled));
        for i in 0..xs.len() {
            prop_assert!(kf[i].value <= ku[i].value + 1e-9);
            prop_assert!(ks[i].value <= kf[i].value + kg[i].value + 1e-9);
            prop_assert!((ka[i].value - a * kf[i].value).abs() <= 1e-9 * (1.0 + a));
        }
        // nondecreasing f and g are comonotone
        let mut inc_f = f.clone();
        let mut inc_g = g.clone();
        inc_f.sort_by(f64::total_cmp);
        inc_g.sort_by(f64::total_cmp);
        let (cf, cg) = (pl(inc_f.clone()), pl(inc_g.clone()));
        let csum = pl(inc_f.iter().zip(&inc_g).map(|(x, y)| x + y).collect());
        let (kcf, kcg, kcs) = (ev(&cf), ev(&cg), ev(&csum));
        for i in 0..xs.len() {
            prop_assert!((kcs[i].value - kcf[i].value - kcg[i].value).abs() <= 1e-9);
        }
    }
}
