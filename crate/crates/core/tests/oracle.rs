mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::*;
use humannav::geom::Vec3;
use humannav::harness::PolicyRef;
use humannav::oracle::*;
use humannav::sim::*;
use humannav::world::*;
use humannav::Error;
use proptest::prelude::*;

fn seg_dist(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let (ax, ay, bx, by) = (a.x(), a.y(), b.x(), b.y());
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x() - ax) * dx + (p.y() - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (ax + t * dx, ay + t * dy);
    ((p.x() - qx).powi(2) + (p.y() - qy).powi(2) + (p.z() - a.z()).powi(2)).sqrt()
}

fn run(
    policy: &mut dyn Policy,
    s: &Arc<Scenario>,
    spec: &EpisodeSpec,
    mode: ActionSpace,
) -> (TrajectoryLog, Vec<StepOutcome>) {
    let ep = Episode::reset(s.clone(), spec.clone(), SimConfig::with_mode(mode), 0).unwrap();
    policy.begin(&ep);
    rollout(ep, |ep| policy.next_command(ep)).unwrap()
}

fn visited(spec: &EpisodeSpec, log: &TrajectoryLog) -> Vec<String> {
    let mut out = vec![spec.start.node.clone()];
    for r in &log.records {
        if out.last() != Some(&r.node) {
            out.push(r.node.clone());
        }
    }
    out
}

/// Start c, then s; from s the short side goes through a (2 * sqrt 5) and
/// the long side through b (2 * 2.5).
fn diamond(with_human: bool) -> Arc<Scenario> {
    let g = graph(
        &[
            ("a", 2.0, 1.0),
            ("b", 2.0, -1.5),
            ("c", -2.0, 0.0),
            ("g", 4.0, 0.0),
            ("s", 0.0, 0.0),
        ],
        &[("c", "s"), ("s", "a"), ("s", "b"), ("a", "g"), ("b", "g")],
    );
    let humans = if with_human {
        vec![human("h", "a", &[(2.0, 1.0)])]
    } else {
        vec![]
    };
    scenario("diamond", g, humans)
}

#[test]
fn parked_human_sends_the_expert_around_the_long_side() {
    let s = diamond(true);
    let spec = episode(&s, "c", 90, &["c", "s", "a", "g"]);
    let mut sub = SubOptimalExpert::default();
    let ep = Episode::reset(
        s.clone(),
        spec.clone(),
        SimConfig::with_mode(ActionSpace::Panoramic),
        0,
    )
    .unwrap();
    sub.begin(&ep);
    assert_eq!(sub.next_command(&ep).unwrap(), Command::MoveTo("s".into()));
    let plan = sub.current_plan().unwrap();
    let ids: Vec<&str> = plan.path.iter().map(|&i| s.graph.id(i)).collect();
    assert_eq!(ids, ["c", "s", "b", "g"]);
    assert!((plan.cost - (2.0 + 5.0)).abs() < 1e-9);

    let (log, _) = run(
        &mut SubOptimalExpert::default(),
        &s,
        &spec,
        ActionSpace::Panoramic,
    );
    assert_eq!(visited(&spec, &log), ["c", "s", "b", "g"]);
    assert_eq!(log.total_collisions(), 0);
    assert!(log.records.last().unwrap().action.is_stop());
}

#[test]
fn optimal_expert_walks_through_the_parked_human() {
    let s = diamond(true);
    let spec = episode(&s, "c", 90, &["c", "s", "a", "g"]);
    let (log, _) = run(&mut OptimalExpert::new(), &s, &spec, ActionSpace::Panoramic);
    assert_eq!(visited(&spec, &log), ["c", "s", "a", "g"]);
    assert!(log.total_collisions() >= 1);
}

#[test]
fn next_hop_taken_mid_route_is_swapped_for_the_side() {
    // the human is 2.67 m up the corridor when the agent plans at c
    // (frame 32) and 0.67 m from a when it reaches s (frame 64)
    let s = diamond(false);
    let g = s.graph.clone();
    let walker = human(
        "h",
        "a",
        &[
            (2.0, 1.0),
            (2.0, 4.0),
            (2.0, 1.0),
            (2.5, 1.0),
            (1.5, 1.0),
            (2.5, 1.0),
            (1.5, 1.0),
            (2.0, 1.0),
        ],
    );
    let s = scenario("diamond", g, vec![walker]);
    let spec = episode(&s, "c", 90, &["c", "s", "a", "g"]);
    let (log, _) = run(
        &mut SubOptimalExpert::default(),
        &s,
        &spec,
        ActionSpace::Panoramic,
    );
    assert_eq!(log.records[0].t_frame, 64);
    assert_eq!(visited(&spec, &log), ["c", "s", "b", "g"]);
}

#[test]
fn occupied_goal_ends_at_the_fallback() {
    let g = graph(
        &[("c", 0.0, 0.0), ("g", 4.0, 0.0), ("s", 2.0, 0.0)],
        &[("c", "s"), ("s", "g")],
    );
    let s = scenario("blocked", g, vec![human("h", "g", &[(4.0, 0.0)])]);
    let spec = episode(&s, "c", 90, &["c", "s", "g"]);
    for mode in [ActionSpace::Panoramic, ActionSpace::Egocentric] {
        let (log, _) = run(&mut SubOptimalExpert::default(), &s, &spec, mode);
        let last = log.records.last().unwrap();
        assert!(last.action.is_stop());
        assert_eq!(last.node, "s");
        assert!(log.records.len() < 30);
        // nonzero navigation error: 2 m short of the goal
        let (d, _) = dijkstra_oracle(&s.graph, s.graph.index_of("g").unwrap(), &[false; 3], None);
        assert_eq!(d[s.graph.index_of("s").unwrap()], 2.0);
    }
}

#[test]
fn start_on_goal_stops_at_once() {
    let s = diamond(false);
    let spec = episode(&s, "g", 0, &["g"]);
    for policy in [PolicyRef::OracleOptimal, PolicyRef::OracleSuboptimal] {
        let mut p = policy.build(0, PlannerConfig::default()).unwrap();
        let (log, _) = run(p.as_mut(), &s, &spec, ActionSpace::Egocentric);
        assert_eq!(log.records.len(), 1);
        assert!(log.records[0].action.is_stop());
        assert_eq!(log.records[0].rewards.target, 5.0);
    }
}

#[test]
fn free_corridor_aligns_then_goes_forward() {
    // from 60° the corridor at 90° is on the edge of the cone
    let g = graph(
        &[("a", 0.0, 0.0), ("b", 2.0, 0.0), ("c", 4.0, 0.0)],
        &[("a", "b"), ("b", "c")],
    );
    let s = scenario("corridor", g, vec![]);
    let spec = episode(&s, "a", 0, &["a", "b", "c"]);
    let (log, _) = run(
        &mut SubOptimalExpert::default(),
        &s,
        &spec,
        ActionSpace::Egocentric,
    );
    let acts: Vec<String> = log.records.iter().map(|r| r.action.to_string()).collect();
    assert_eq!(acts, ["right", "right", "forward", "forward", "stop"]);
}

#[test]
fn plan_path_examples() {
    let g = graph(
        &[("a", 0.0, 0.0), ("b", 2.0, 0.0), ("c", 4.0, 0.0)],
        &[("a", "b"), ("b", "c")],
    );
    let cut = plan_path(&g, "a", "c", &BTreeSet::from(["b"])).unwrap();
    assert!(cut.path.is_none());
    assert_eq!(cut.fallback.unwrap().node, "a");

    // corridors: upper 2 x sqrt(5), lower 2 x 2.5
    let g = diamond(false).graph.clone();
    let short = plan_path(&g, "s", "g", &BTreeSet::<String>::new()).unwrap();
    assert_eq!(short.path.unwrap(), ["s", "a", "g"]);
    let long = plan_path(&g, "s", "g", &BTreeSet::from(["a"])).unwrap();
    assert_eq!(long.path.unwrap(), ["s", "b", "g"]);
    assert!((long.cost - 5.0).abs() < 1e-12);

    assert!(matches!(
        plan_path(&g, "s", "g", &BTreeSet::from(["s"])),
        Err(Error::StartExcluded(_))
    ));
    assert!(matches!(
        plan_path(&g, "zz", "g", &BTreeSet::<String>::new()),
        Err(Error::DanglingNode { .. })
    ));
}

#[test]
fn planner_config_bounds() {
    assert!(PlannerConfig::default().validate().is_ok());
    let bad = PlannerConfig {
        epsilon: 3.0,
        ..Default::default()
    };
    assert!(bad.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn plan_path_agrees_with_dijkstra(seed in any::<u64>(), p in 0.05f64..0.4, mask in any::<u64>()) {
        let g = random_graph(seed, 50, p);
        let n = g.len();
        let (s, t) = (0, n - 1);
        let blocked: Vec<bool> = (0..n).map(|i| i != s && (mask >> (i % 64)) & 1 == 1 && (mask >> 60) & 3 != 0).collect();
        let excluded: BTreeSet<String> = (0..n).filter(|&i| blocked[i]).map(|i| g.id(i).to_string()).collect();
        let res = plan_path(&g, g.id(s), g.id(t), &excluded).unwrap();
        let (dist, settled) = dijkstra_oracle(&g, s, &blocked, Some(t));
        let (full, _) = dijkstra_oracle(&g, s, &blocked, None);

        match &res.path {
            Some(path) => {
                prop_assert!(dist[t].is_finite());
                prop_assert!((res.cost - dist[t]).abs() <= 1e-9 * (1.0 + dist[t]));
                let idx = g.resolve_path(path).unwrap();
                prop_assert_eq!(idx[0], s);
                prop_assert!(idx.iter().all(|&i| !blocked[i]));
                prop_assert!((g.path_length(&idx).unwrap() - res.cost).abs() <= 1e-9);
            }
            None => {
                prop_assert!(full[t].is_infinite() || blocked[t]);
                let fb = res.fallback.clone().unwrap();
                let (to_goal, _) = dijkstra_oracle(&g, t, &vec![false; n], None);
                let best = (0..n)
                    .filter(|&i| full[i].is_finite())
                    .min_by(|&a, &b| to_goal[a].total_cmp(&to_goal[b]).then(a.cmp(&b)))
                    .unwrap();
                prop_assert_eq!(&fb.node, g.id(best));
                let idx = g.resolve_path(&fb.path).unwrap();
                prop_assert!(idx.iter().all(|&i| !blocked[i]));
                prop_assert!((fb.cost - full[best]).abs() <= 1e-9 * (1.0 + full[best]));
            }
        }
        prop_assert!(res.expansions <= settled, "A* {} > Dijkstra {}", res.expansions, settled);
    }

    #[test]
    fn optimal_expert_is_geodesic_on_static_buildings(seed in 0u64..40, k in 0usize..4) {
        let s = Arc::new(generate_scenario(seed, &GenerationConfig::static_building()).unwrap());
        let eps = humannav::harness::generate_episodes(std::slice::from_ref(&s), seed, &Default::default()).unwrap();
        let spec = &eps[k % eps.len()];
        let (log, _) = run(&mut OptimalExpert::new(), &s, spec, ActionSpace::Panoramic);
        let path = s.graph.resolve_path(&visited(spec, &log)).unwrap();
        let g = &s.graph;
        let (d, _) = dijkstra_oracle(g, g.index_of(&spec.start.node).unwrap(), &vec![false; g.len()], None);
        prop_assert!((g.path_length(&path).unwrap() - d[g.index_of(&spec.goal).unwrap()]).abs() < 1e-9);
        prop_assert_eq!(log.final_node(), Some(spec.goal.as_str()));

        let (ego, _) = run(&mut OptimalExpert::new(), &s, spec, ActionSpace::Egocentric);
        prop_assert_eq!(ego.final_node(), Some(spec.goal.as_str()));
        prop_assert!(ego.records.last().unwrap().action.is_stop());
    }

    #[test]
    fn moves_keep_clear_of_stationary_humans(k in 0usize..64, pano in any::<bool>()) {
        let (s, spec) = pick_episode(k);
        let mode = if pano { ActionSpace::Panoramic } else { ActionSpace::Egocentric };
        let (log, outcomes) = run(&mut SubOptimalExpert::default(), &s, &spec, mode);
        let g = &s.graph;
        let parked: Vec<&HumanInstance> = s.humans().iter().filter(|h| h.class() == TrajectoryClass::Stationary).collect();
        let mut at = g.position(g.index_of(&spec.start.node).unwrap());
        for (r, o) in log.records.iter().zip(&outcomes) {
            let next = g.position(g.index_of(&r.node).unwrap());
            for h in &parked {
                let p = h.waypoints()[0];
                if p.distance(at) >= 1.0 {
                    prop_assert!(seg_dist(p, at, next) >= 1.0 - 1e-9);
                    prop_assert!(o.events.iter().all(|e| e.human != h.id));
                }
            }
            at = next;
        }
    }
}
