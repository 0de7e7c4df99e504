mod common;

use std::sync::Arc;

use common::*;
use humannav::datagen::*;
use humannav::harness::policy::RANDOM_MIN_STEPS;
use humannav::sim::{Episode, EpisodeSpec, SimConfig};
use humannav::world::Scenario;
use humannav::Error;
use proptest::prelude::*;

fn pool() -> (Vec<Arc<Scenario>>, Vec<EpisodeSpec>) {
    let s: Vec<Arc<Scenario>> = suite().iter().map(|(s, _)| s.clone()).collect();
    let e: Vec<EpisodeSpec> = suite().iter().flat_map(|(_, e)| e.clone()).collect();
    (s, e)
}

fn small(seed: u64, n: usize) -> DatasetConfig {
    DatasetConfig {
        num_trajectories: n,
        seed,
        ..Default::default()
    }
}

fn bytes(cfg: &DatasetConfig) -> Vec<u8> {
    let (s, e) = pool();
    let recs = gen_random_walks(&s, &e, cfg).unwrap();
    let mut out = Vec::new();
    write_dataset(&mut out, cfg, &recs).unwrap();
    out
}

#[test]
fn default_run_has_ten_thousand_capped_walks() {
    let (s, e) = pool();
    let cfg = DatasetConfig::default();
    assert_eq!(
        (
            cfg.num_trajectories,
            cfg.max_len,
            cfg.context_window,
            cfg.initial_rtg
        ),
        (10_000, 30, 15, 5.0)
    );
    let recs = gen_random_walks(&s, &e, &cfg).unwrap();
    assert_eq!(recs.len(), 10_000);
    for r in &recs {
        assert!(!r.steps.is_empty() && r.steps.len() <= 30);
        // ends by stop or by the cap, never both missing
        let last_stop = r.steps.last().unwrap().action.is_stop();
        assert_eq!(r.stopped, last_stop);
        assert!(last_stop || r.steps.len() == 30);
        assert!(r.steps[..r.steps.len() - 1]
            .iter()
            .all(|s| !s.action.is_stop()));
        assert!(r
            .steps
            .iter()
            .take(RANDOM_MIN_STEPS as usize)
            .all(|s| !s.action.is_stop()));
    }
    assert!(recs.iter().any(|r| r.stopped) && recs.iter().any(|r| !r.stopped));
}

#[test]
fn same_seed_same_bytes() {
    let a = bytes(&small(9, 300));
    assert_eq!(a, bytes(&small(9, 300)));
    assert_ne!(a, bytes(&small(10, 300)));
    let header: DatasetHeader =
        serde_json::from_slice(a.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(header.config, small(9, 300));
}

#[test]
fn bad_configs_and_empty_pools() {
    let (s, e) = pool();
    let cfg = DatasetConfig {
        context_window: 31,
        ..Default::default()
    };
    assert!(matches!(
        gen_random_walks(&s, &e, &cfg),
        Err(Error::InvalidParams(_))
    ));
    let cfg = DatasetConfig {
        num_trajectories: 0,
        ..Default::default()
    };
    assert!(cfg.validate().is_err());
    assert!(matches!(
        gen_random_walks(&[], &e, &small(0, 5)),
        Err(Error::EmptyInput(_))
    ));
}

#[test]
fn short_and_long_windows() {
    let (s, e) = pool();
    let recs = gen_random_walks(&s, &e, &small(4, 400)).unwrap();
    let long = recs.iter().find(|r| r.steps.len() >= 20).unwrap();
    for w in slice_contexts(long, 15).unwrap() {
        assert_eq!(w.states.len(), (w.end + 1).min(15));
    }
    // walks never stop before step four, so cut one down
    let mut short = long.clone();
    short.steps.truncate(3);
    let lens: Vec<usize> = slice_contexts(&short, 15)
        .unwrap()
        .iter()
        .map(|w| w.actions.len())
        .collect();
    assert_eq!(lens, [1, 2, 3]);
}

fn records(seed: u64) -> Vec<TrajectoryRecord> {
    let (s, e) = pool();
    gen_random_walks(&s, &e, &small(seed, 24)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rtg_recurrence_and_exact_sums(seed in any::<u64>()) {
        for r in records(seed) {
            let n = r.steps.len();
            prop_assert_eq!(r.steps[n - 1].rtg, r.steps[n - 1].reward);
            for t in 0..n - 1 {
                prop_assert!((r.steps[t].rtg - r.steps[t + 1].rtg - r.steps[t].reward).abs() <= 1e-9);
            }
            // rewards are whole tenths, so the suffix sums are exact integers in tenths
            let mut tenths = 0i64;
            for s in r.steps.iter().rev() {
                tenths += (s.reward * 10.0).round() as i64;
                prop_assert!((s.rtg - tenths as f64 / 10.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn windows_are_record_slices(seed in any::<u64>(), k in 1usize..20) {
        for r in records(seed) {
            let ws = slice_contexts(&r, k).unwrap();
            prop_assert_eq!(ws.len(), r.steps.len());
            for (t, w) in ws.iter().enumerate() {
                let from = t.saturating_sub(k - 1);
                let slice = &r.steps[from..=t];
                prop_assert_eq!(w.end, t);
                prop_assert_eq!(w.rtg.len(), slice.len());
                for (j, s) in slice.iter().enumerate() {
                    prop_assert_eq!(w.rtg[j], s.rtg);
                    prop_assert_eq!(&w.states[j], &s.state);
                    prop_assert_eq!(&w.actions[j], &s.action);
                }
            }
        }
    }

    #[test]
    fn replayed_actions_reproduce_rewards(seed in any::<u64>()) {
        let (s, e) = pool();
        for r in records(seed) {
            let sc = s.iter().find(|x| x.id == r.scenario).unwrap().clone();
            let mut spec = e.iter().find(|x| x.id == r.episode).unwrap().clone();
            spec.step_cap = 30;
            let mut ep = Episode::reset(sc, spec, SimConfig::default(), r.seed).unwrap();
            let mut collisions = ep.initial_events().len() as u32;
            for st in &r.steps {
                prop_assert_eq!(&ep.state().node, &st.state.node);
                prop_assert_eq!(ep.state().frame, st.state.frame);
                let o = ep.step(&st.action).unwrap();
                collisions += o.collision_events;
                prop_assert_eq!(o.rewards.total().to_bits(), st.reward.to_bits());
            }
            prop_assert!(ep.is_done());
            prop_assert_eq!(collisions, r.collisions);
        }
    }
}
