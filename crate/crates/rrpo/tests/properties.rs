//! Property tests for the algebraic invariants of the demand layer and the
//! parameter-vector encoding.

use proptest::prelude::*;
use rrpo::demand::{demand_at, revenue_at, DemandFamily, ParamVector};
use rrpo::instance_io::{instance_from_json, instance_to_json};
use rrpo::uncertainty::L1Set;
use rrpo::Instance;
use std::path::Path;

fn family_strategy() -> impl Strategy<Value = DemandFamily> {
    prop_oneof![
        Just(DemandFamily::Linear),
        Just(DemandFamily::SemiLog),
        Just(DemandFamily::LogLog),
    ]
}

fn params_strategy(n: usize) -> impl Strategy<Value = ParamVector> {
    let alpha = proptest::collection::vec(-3.0..3.0f64, n);
    let beta = proptest::collection::vec(-1.5..1.5f64, n);
    let gamma = proptest::collection::vec(
        proptest::collection::vec(-0.5..0.5f64, n),
        n,
    );
    (alpha, beta, gamma).prop_map(move |(alpha, beta, mut gamma)| {
        for (i, row) in gamma.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        ParamVector::new(alpha, beta, gamma).unwrap()
    })
}

fn prices_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.5..6.0f64, n)
}

proptest! {
    #[test]
    fn flatten_unflatten_round_trip(n in 1usize..5, u in (1usize..5).prop_flat_map(params_strategy)) {
        // Size the vector independently of n: regenerate with matching n.
        let _ = n;
        let flat = u.flatten();
        let back = ParamVector::unflatten(u.products(), &flat).unwrap();
        prop_assert_eq!(u, back);
    }

    #[test]
    fn revenue_is_price_dot_demand(
        family in family_strategy(),
        (u, prices) in (1usize..5).prop_flat_map(|n| (params_strategy(n), prices_strategy(n))),
    ) {
        let d = demand_at(family, &prices, &u).unwrap();
        let dot: f64 = prices.iter().zip(&d).map(|(p, di)| p * di).sum();
        let r = revenue_at(family, &prices, &u).unwrap();
        prop_assert!((r - dot).abs() <= 1e-12 * r.abs().max(1.0));
    }

    #[test]
    fn linear_revenue_is_affine_in_parameters(
        (u1, u2, prices, a) in (1usize..5).prop_flat_map(|n| {
            (params_strategy(n), params_strategy(n), prices_strategy(n), 0.0..1.0f64)
        }),
    ) {
        let blend = ParamVector::unflatten(
            u1.products(),
            &u1.flatten()
                .iter()
                .zip(u2.flatten())
                .map(|(x, y)| a * x + (1.0 - a) * y)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let r_blend = revenue_at(DemandFamily::Linear, &prices, &blend).unwrap();
        let r1 = revenue_at(DemandFamily::Linear, &prices, &u1).unwrap();
        let r2 = revenue_at(DemandFamily::Linear, &prices, &u2).unwrap();
        let expected = a * r1 + (1.0 - a) * r2;
        prop_assert!((r_blend - expected).abs() <= 1e-10 * expected.abs().max(1.0));
    }

    #[test]
    fn exponential_families_are_midpoint_convex(
        family in prop_oneof![Just(DemandFamily::SemiLog), Just(DemandFamily::LogLog)],
        (u1, u2, prices) in (1usize..4).prop_flat_map(|n| {
            (params_strategy(n), params_strategy(n), prices_strategy(n))
        }),
    ) {
        let mid = ParamVector::unflatten(
            u1.products(),
            &u1.flatten()
                .iter()
                .zip(u2.flatten())
                .map(|(x, y)| (x + y) / 2.0)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let r_mid = revenue_at(family, &prices, &mid).unwrap();
        let r1 = revenue_at(family, &prices, &u1).unwrap();
        let r2 = revenue_at(family, &prices, &u2).unwrap();
        let chord = (r1 + r2) / 2.0;
        prop_assert!(r_mid <= chord + 1e-10 * chord.abs().max(1.0));
    }

    #[test]
    fn l1_membership_scales_with_budget(
        (u0, grad, theta) in (1usize..4).prop_flat_map(|n| {
            (
                params_strategy(n),
                proptest::collection::vec(-2.0..2.0f64, n + n * n),
                0.0..1.5f64,
            )
        }),
    ) {
        let small = L1Set::new(theta, u0.clone()).unwrap();
        let large = L1Set::new(theta + 0.5, u0).unwrap();
        let (u_star, _) = small.linear_min(&grad).unwrap();
        prop_assert!(small.contains(&u_star, 1e-9).unwrap());
        prop_assert!(large.contains(&u_star, 1e-9).unwrap());
    }

    #[test]
    fn instance_json_round_trip(
        (u, grid_lens) in (1usize..4).prop_flat_map(|n| {
            (params_strategy(n), proptest::collection::vec(1usize..5, n))
        }),
        family in family_strategy(),
    ) {
        let grids: Vec<Vec<f64>> = grid_lens
            .iter()
            .map(|&len| (0..len).map(|k| 1.0 + k as f64 * 0.75).collect())
            .collect();
        let inst = Instance::new(family, grids, u).unwrap();
        let text = instance_to_json(&inst, None).unwrap();
        let (back, _) = instance_from_json(&text, Path::new("<prop>")).unwrap();
        prop_assert_eq!(inst.u0, back.u0);
        prop_assert_eq!(inst.grids, back.grids);
        prop_assert_eq!(inst.family, back.family);
    }
}
