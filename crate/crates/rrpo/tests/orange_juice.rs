//! Golden checks against the shipped eleven-product grocery instances.

use rrpo::batch::evaluate_policy;
use rrpo::convex::{solve_drpo_convex, DrpoConvexConfig};
use rrpo::demand::PriceVector;
use rrpo::instance_io::read_instance;
use rrpo::oracles::{PricingMethod, RandomizedPolicy};
use rrpo::uncertainty::{L1Set, UncertaintySet};
use std::path::PathBuf;

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// A published randomized solution for the log-log instance at theta = 0.8:
/// six extreme price vectors. Its recomputed worst case must beat the
/// deterministic robust value (the coefficients are rounded to four
/// decimals, so only the ordering is asserted, not exact values).
#[test]
fn published_policy_beats_deterministic_worst_case() {
    let (inst, _) = read_instance(&data_file("orange_juice_loglog.json")).unwrap();
    let set = L1Set::new(0.8, inst.u0.clone()).unwrap();

    let support: Vec<(Vec<usize>, f64)> = vec![
        (vec![4, 4, 0, 0, 4, 4, 4, 0, 0, 4, 0], 0.1628),
        (vec![0, 4, 4, 4, 0, 0, 4, 4, 4, 4, 4], 0.1752),
        (vec![4, 0, 0, 4, 4, 4, 0, 4, 4, 0, 4], 0.2658),
        (vec![4, 4, 4, 4, 0, 0, 4, 0, 4, 4, 4], 0.0381),
        (vec![4, 0, 0, 4, 4, 0, 4, 4, 0, 4, 4], 0.3258),
        (vec![4, 0, 0, 4, 4, 4, 0, 0, 4, 0, 4], 0.0323),
    ];
    // Level indices above resolve to the published prices.
    let expected_first = [3.87, 5.82, 1.25, 0.99, 3.17, 5.09, 3.07, 0.91, 0.69, 2.69, 1.99];
    let resolved = inst
        .prices(&PriceVector::new(support[0].0.clone()))
        .unwrap();
    assert_eq!(resolved, expected_first);

    let policy = RandomizedPolicy {
        support: support
            .into_iter()
            .map(|(levels, prob)| (PriceVector::new(levels), prob))
            .collect(),
    };
    let eval = evaluate_policy(&inst, &UncertaintySet::L1(set.clone()), &policy).unwrap();

    let dr = solve_drpo_convex(
        &inst,
        &set,
        &DrpoConvexConfig {
            outer: PricingMethod::ExtremeLogLog,
            ..Default::default()
        },
    )
    .unwrap();
    println!(
        "published policy worst case {:.2} vs deterministic {:.2}",
        eval.worst_case, dr.z_dr
    );
    assert!(
        eval.worst_case > dr.z_dr,
        "published policy {} did not beat deterministic {}",
        eval.worst_case,
        dr.z_dr
    );
}
