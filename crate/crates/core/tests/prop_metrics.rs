//! Metric ranges and oracles: parity scores stay in [0, 1], rank similarity
//! matches a brute-force pair count, and the resource deltas behave
//! monotonically.

#[path = "common/mod.rs"]
mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use scytag_core::metrics::{
    ability_success_parity, boot_time_delta, energy_delta_pct, energy_wh,
    order_similarity, path_equivalence, reduction_ratios, relative_delta,
    technique_coverage_parity, EnergyParams, TopologyStats,
};

fn names() -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec("[a-h]", 0..8)
}

proptest! {
    #[test]
    fn parity_scores_stay_in_unit_range(full in names(), twin in names()) {
        let fs: BTreeSet<String> = full.iter().cloned().collect();
        let ts: BTreeSet<String> = twin.iter().cloned().collect();
        if let Ok(asp) = ability_success_parity::<f64>(&fs, &ts) {
            prop_assert!((0.0..=1.0).contains(&asp));
            if fs == ts {
                prop_assert!((asp - 1.0).abs() < 1e-12);
            }
        }
        if let Ok(tcp) = technique_coverage_parity::<f64>(&fs, &ts) {
            prop_assert!((0.0..=1.0).contains(&tcp));
            prop_assert_eq!(
                technique_coverage_parity::<f64>(&ts, &fs).unwrap(),
                tcp,
                "TCP must be symmetric"
            );
        }
    }

    #[test]
    fn path_equivalence_is_a_jaccard_score(
        full in proptest::collection::vec(("[a-d]", "[a-d]"), 0..8),
        twin in proptest::collection::vec(("[a-d]", "[a-d]"), 0..8),
    ) {
        let f: Vec<(String, String)> = full;
        let t: Vec<(String, String)> = twin;
        if let Ok(pes) = path_equivalence::<f64>(&f, &t) {
            prop_assert!((0.0..=1.0).contains(&pes));
        }
        if !f.is_empty() {
            let same = path_equivalence::<f64>(&f, &f).unwrap();
            prop_assert!((same - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn order_similarity_matches_brute_force(full in names(), twin in names()) {
        let ours = order_similarity::<f64>(&full, &twin).ok();
        let oracle = common::tau_bruteforce(&full, &twin);
        match (ours, oracle) {
            (Some(a), Some(b)) => {
                prop_assert!((a - b).abs() < 1e-9, "tau {a} vs oracle {b}");
                prop_assert!((-1.0..=1.0).contains(&a));
            }
            (None, None) => {}
            (a, b) => prop_assert!(false, "definedness disagrees: {:?} vs {:?}", a, b),
        }
        // identical sequences with at least two distinct common elements
        // rank perfectly
        let dedup: BTreeSet<&String> = full.iter().collect();
        if dedup.len() >= 2 {
            let tau = order_similarity::<f64>(&full, &full).unwrap();
            prop_assert!((tau - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resource_deltas_are_monotone(
        full in 1.0..1000.0f64,
        twin_a in 0.0..1000.0f64,
        twin_b in 0.0..1000.0f64,
    ) {
        let da = relative_delta::<f64>(full, twin_a).unwrap();
        let db = relative_delta::<f64>(full, twin_b).unwrap();
        // a larger twin-side mean always means a smaller saving
        if twin_a < twin_b {
            prop_assert!(da > db);
        }
        prop_assert!((relative_delta::<f64>(full, full).unwrap()).abs() < 1e-12);
        prop_assert_eq!(boot_time_delta(full, twin_a), full - twin_a);
    }

    #[test]
    fn energy_model_is_consistent(
        cpu in 0.0..100.0f64,
        seconds in 0.0..100_000.0f64,
        watts in 0.1..50.0f64,
    ) {
        let params = EnergyParams { p_vcpu_watts: watts };
        let e = energy_wh(cpu, params, seconds);
        prop_assert!(e >= 0.0);
        // linear in duration
        let doubled = energy_wh(cpu, params, seconds * 2.0);
        prop_assert!((doubled - 2.0 * e).abs() < 1e-9 * (1.0 + e));
        if e > 0.0 {
            // equal energies save nothing; a smaller twin energy is a
            // negative saving
            prop_assert!(energy_delta_pct(e, e).unwrap().abs() < 1e-12);
            prop_assert!(energy_delta_pct(e, e / 2.0).unwrap() < 0.0);
        }
    }

    #[test]
    fn reduction_ratios_stay_in_range(
        full_hosts in 1usize..2000,
        full_links in 1usize..2000,
        twin_hosts in 0usize..2000,
        twin_links in 0usize..2000,
    ) {
        let full = TopologyStats::new(full_hosts, full_links);
        let twin = TopologyStats::new(twin_hosts, twin_links);
        match reduction_ratios::<f64>(full, twin) {
            Ok((r_h, r_e)) => {
                prop_assert!(twin_hosts <= full_hosts && twin_links <= full_links);
                prop_assert!((0.0..=100.0).contains(&r_h));
                prop_assert!((0.0..=100.0).contains(&r_e));
            }
            Err(_) => {
                prop_assert!(twin_hosts > full_hosts || twin_links > full_links);
            }
        }
    }
}
