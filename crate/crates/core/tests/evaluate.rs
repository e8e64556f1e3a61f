// SPDX-License-Identifier: MIT OR Apache-2.0

use cpd_core::evaluate::score_thetas;
use cpd_core::{run_sweep, segment_majority_label, GroundTruth, PipelineConfig, ScenarioConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn score_properties(a in prop::collection::vec(0.0f64..1.0, 0..6), b in prop::collection::vec(0.0f64..1.0, 0..6)) {
        prop_assert_eq!(score_thetas(&a, &a), 0.0);
        let s = score_thetas(&a, &b);
        prop_assert_eq!(s, score_thetas(&b, &a));
        if a.len() == b.len() {
            prop_assert!(s >= 0.0 && s <= a.len() as f64);
        } else {
            prop_assert_eq!(s, 1.0);
        }
    }

    #[test]
    fn segments_inside_a_block_take_its_label(start in 0usize..999, len in 1usize..1000) {
        let truth = GroundTruth {
            n: 1000,
            thetas: vec![0.25, 0.5, 0.75],
            labels: vec![1, 2, 3, 1],
            seed: 0,
            config: ScenarioConfig::default(),
        };
        let end = (start + len).min(1000);
        let label = segment_majority_label((start, end), &truth);
        if end <= 250 || start >= 750 {
            prop_assert_eq!(label, 1);
        }
        if start >= 250 && end <= 500 {
            prop_assert_eq!(label, 2);
        }
        prop_assert!((1..=3).contains(&label));
    }
}

#[test]
fn sweeps_are_deterministic() {
    let scenario = ScenarioConfig {
        seed: 7,
        ..ScenarioConfig::default()
    };
    let cfg = PipelineConfig::new(0.06, 3);
    let a = run_sweep(&[5000, 6000], 2, &scenario, &cfg).unwrap();
    let b = run_sweep(&[5000, 6000], 2, &scenario, &cfg).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.rows.len(), 2);
    assert_eq!(a.trials.len(), 4);
    assert_eq!(
        a.trials.iter().map(|t| t.seed).collect::<Vec<_>>(),
        vec![7, 8, 7, 8]
    );
    for row in &a.rows {
        assert!(row.mean_error >= 0.0 && row.std_error >= 0.0);
        assert!((0.0..=1.0).contains(&row.kappa_accuracy));
    }
}
