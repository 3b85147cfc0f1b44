use chernoff_kl::bounds::{
    hoeffding_baseline, one_sided_upper_bound, tail_bound_for, two_sided_interval, SampleSummary, TailDirection,
    TailQuery,
};
use chernoff_kl::kl::{kl, kl_inverse_lower, kl_inverse_upper, kl_lower_root, kl_m, kl_upper_root, UnitValue};
use proptest::prelude::*;

fn u(x: f64) -> UnitValue {
    UnitValue::new(x).unwrap()
}

fn prev_double(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

fn next_double(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

fn naive_kl(q: f64, p: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(q, p) + term(1.0 - q, 1.0 - p)
}

/// Smallest multiple of `step` above `from` where `naive_kl(x, p)` exceeds `c`.
fn scan_first_above(from: f64, step: f64, c: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut i = 0u64;
    loop {
        let x = from + i as f64 * step;
        if x >= 1.0 || f(x) > c {
            return x.min(1.0);
        }
        i += 1;
    }
}

fn unit() -> impl Strategy<Value = f64> {
    prop_oneof![
        0.0..=1.0f64,
        Just(0.0),
        Just(1.0),
        (0u32..=512).prop_map(|k| k as f64 / 512.0),
        (1e-300..1e-3f64),
    ]
}

fn budget() -> impl Strategy<Value = f64> {
    (-9.0..1.0f64).prop_map(|e| 10f64.powf(e))
}

#[test]
fn grid_scan_oracle_for_the_inverse() {
    let c = 20f64.ln() / 100.0;
    let scan = scan_first_above(0.1, 1e-7, c, |p| naive_kl(0.1, p));
    let got = kl_inverse_upper(u(0.1), c).unwrap().get();
    assert!(got <= scan && scan - got <= 1e-7, "{got} vs {scan}");
    assert!((got - 0.18883).abs() < 1e-5);
}

#[test]
fn grid_scan_oracle_for_the_roots() {
    let scan = scan_first_above(0.2, 1e-7, 0.05, |x| naive_kl(x, 0.2));
    let up = kl_upper_root(u(0.2), 0.05).unwrap();
    assert!(!up.saturated);
    assert!(up.value.get() <= scan && scan - up.value.get() <= 1e-7);
    assert!((up.value.get() - 0.335158).abs() < 1e-6);

    // kl(x, p) = kl(1 - x, 1 - p), so the lower root at 0.8 mirrors it.
    let low = kl_lower_root(u(0.8), 0.05).unwrap();
    assert!((low.value.get() - (1.0 - up.value.get())).abs() < 1e-12);
}

#[test]
fn complement_symmetry_on_dyadic_grid() {
    for i in 0..=512 {
        for j in 0..=512 {
            let (q, p) = (i as f64 / 512.0, j as f64 / 512.0);
            let a = kl(u(q), u(p)).nats();
            let b = kl(u(1.0 - q), u(1.0 - p)).nats();
            assert_eq!(a.to_bits(), b.to_bits(), "q={q} p={p}");
        }
    }
}

proptest! {
    #[test]
    fn divergence_is_nonnegative_and_zero_on_diagonal(q in unit(), p in unit()) {
        let d = kl(u(q), u(p)).nats();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(kl(u(q), u(q)).nats(), 0.0);
        prop_assert!(kl_m(u(q), u(p)).nats() <= d);
        if q > p {
            prop_assert_eq!(kl_m(u(q), u(p)).nats(), 0.0);
        }
    }

    #[test]
    fn pinsker(q in unit(), p in unit()) {
        let d = kl(u(q), u(p)).nats();
        prop_assert!(d >= 2.0 * (q - p).powi(2) * (1.0 - 1e-12));
    }

    #[test]
    fn monotone_away_from_q(q in unit(), a in unit(), b in unit()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if q <= lo {
            prop_assert!(kl(u(q), u(lo)).nats() <= kl(u(q), u(hi)).nats());
        }
        if hi <= q {
            prop_assert!(kl(u(q), u(hi)).nats() <= kl(u(q), u(lo)).nats());
        }
    }

    #[test]
    fn inverses_bracket_q_and_the_exact_crossing(q in unit(), c in budget()) {
        let up = kl_inverse_upper(u(q), c).unwrap().get();
        let lo = kl_inverse_lower(u(q), c).unwrap().get();
        prop_assert!(lo <= q && q <= up);
        if q < 1.0 {
            // First double past the crossing; its predecessor is within budget.
            prop_assert!(kl(u(q), u(up)).nats() > c);
            prop_assert!(kl(u(q), u(prev_double(up))).nats() <= c);
        }
        if q > 0.0 {
            prop_assert!(kl(u(q), u(lo)).nats() > c);
            prop_assert!(kl(u(q), u(next_double(lo))).nats() <= c);
        }
        // Pinsker corollary.
        prop_assert!(up <= q + (c / 2.0).sqrt() + 1e-12);
        prop_assert!(lo >= q - (c / 2.0).sqrt() - 1e-12);
    }

    #[test]
    fn inverses_are_monotone_in_budget(q in unit(), c in budget(), factor in 1.0..10.0f64) {
        let c2 = c * factor;
        prop_assert!(kl_inverse_upper(u(q), c).unwrap() <= kl_inverse_upper(u(q), c2).unwrap());
        prop_assert!(kl_inverse_lower(u(q), c2).unwrap() <= kl_inverse_lower(u(q), c).unwrap());
    }

    #[test]
    fn roots_solve_or_saturate(p in unit(), c in budget()) {
        // At p = 0 and p = 1 the divergence jumps from 0 straight to infinity.
        let degenerate = p == 0.0 || p == 1.0;
        prop_assert_eq!(kl_upper_root(u(p), c).is_err(), degenerate);
        prop_assert_eq!(kl_lower_root(u(p), c).is_err(), degenerate);
        if !degenerate {
            let up = kl_upper_root(u(p), c).unwrap();
            prop_assert!(p <= up.value.get());
            if up.saturated {
                prop_assert_eq!(up.value.get(), 1.0);
                prop_assert!(kl(UnitValue::ONE, u(p)).nats() < c);
            } else {
                prop_assert!((kl(up.value, u(p)).nats() - c).abs() <= 1e-9);
            }
            let lo = kl_lower_root(u(p), c).unwrap();
            prop_assert!(lo.value.get() <= p);
            if lo.saturated {
                prop_assert_eq!(lo.value.get(), 0.0);
                prop_assert!(kl(UnitValue::ZERO, u(p)).nats() < c);
            } else {
                prop_assert!((kl(lo.value, u(p)).nats() - c).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn bounds_order_and_domination(q in unit(), n in 1u64..5000, delta in 1e-6..0.999f64) {
        let s = SampleSummary::new(n, u(q)).unwrap();
        let one = one_sided_upper_bound(&s, delta).unwrap();
        let two = two_sided_interval(&s, delta).unwrap();
        let hoeff = hoeffding_baseline(&s, delta).unwrap();
        let lower = two.bound_lower.unwrap().get();
        prop_assert!(lower <= q && q <= one.bound_upper.get());
        prop_assert!(one.bound_upper <= two.bound_upper);
        prop_assert!(one.bound_upper.get() <= hoeff.bound_upper.get() + 1e-12);
    }

    #[test]
    fn bounds_tighten_with_more_data_and_less_confidence(
        q in unit(), n in 1u64..5000, extra in 1u64..5000, delta in 1e-6..0.5f64,
    ) {
        let upper = |n: u64, d: f64| {
            one_sided_upper_bound(&SampleSummary::new(n, u(q)).unwrap(), d).unwrap().bound_upper
        };
        prop_assert!(upper(n + extra, delta) <= upper(n, delta));
        prop_assert!(upper(n, delta * 2.0) <= upper(n, delta));
    }

    #[test]
    fn tail_bounds_are_probabilities(p in 0.0..=1.0f64, frac in 0.0..=1.0f64, n in 1u64..1000) {
        for direction in [TailDirection::Below, TailDirection::Above] {
            let room = if direction == TailDirection::Below { p } else { 1.0 - p };
            let t = room * frac;
            let query = TailQuery::new(u(p), t, n, direction).unwrap();
            let b = tail_bound_for(&query);
            prop_assert!((0.0..=1.0).contains(&b));
            if t == 0.0 {
                prop_assert_eq!(b, 1.0);
            }
            let wider = TailQuery::new(u(p), room * (frac + (1.0 - frac) / 2.0), n, direction).unwrap();
            prop_assert!(tail_bound_for(&wider) <= b);
        }
    }
}
