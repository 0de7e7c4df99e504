use humannav_web::Demo;
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn scene_lists_the_building() {
    let d = Demo::new(3).unwrap();
    let v = parse(&d.scene());
    let nodes = v["nodes"].as_array().unwrap();
    assert!(nodes.len() > 10);
    let ids: Vec<&str> = nodes.iter().map(|n| n["id"].as_str().unwrap()).collect();
    for e in v["edges"].as_array().unwrap() {
        assert!(ids.contains(&e[0].as_str().unwrap()));
        assert!(ids.contains(&e[1].as_str().unwrap()));
    }
    assert!(!v["episodes"].as_array().unwrap().is_empty());
    assert!(!v["humans"].as_array().unwrap().is_empty());
    assert_eq!(parse(&d.classes()).as_object().unwrap().len(), nodes.len());
}

#[test]
fn frames_cycle_and_validate_the_radius() {
    let d = Demo::new(4).unwrap();
    assert_eq!(
        parse(&d.frame(7, 1.0).unwrap())["humans"],
        parse(&d.frame(127, 1.0).unwrap())["humans"]
    );
    assert!(d.frame(0, 0.0).is_err());
    let wide = parse(&d.frame(0, 3.0).unwrap());
    let narrow = parse(&d.frame(0, 0.5).unwrap());
    assert!(
        wide["occupied"].as_array().unwrap().len() >= narrow["occupied"].as_array().unwrap().len()
    );
}

#[test]
fn aware_plan_avoids_occupied_nodes_and_costs_no_less() {
    let d = Demo::new(5).unwrap();
    let scene = parse(&d.scene());
    for e in scene["episodes"].as_array().unwrap() {
        let (s, g) = (e["start"].as_str().unwrap(), e["goal"].as_str().unwrap());
        let c = parse(&d.compare_plans(s, g, 30).unwrap());
        let unaware = &c["unaware"];
        assert_eq!(unaware["reached_goal"], true);
        let excluded = c["excluded"].as_array().unwrap();
        let path = c["aware"]["path"].as_array().unwrap();
        assert!(path.iter().all(|n| !excluded.contains(n)));
        if c["aware"]["reached_goal"] == true {
            assert!(
                c["aware"]["cost"].as_f64().unwrap() >= unaware["cost"].as_f64().unwrap() - 1e-9
            );
        }
    }
    assert!(d.compare_plans("nowhere", "also-nowhere", 0).is_err());
}

#[test]
fn optimal_run_reaches_the_goal() {
    let d = Demo::new(6).unwrap();
    let r = parse(&d.run_episode(0, "oracle-optimal", "panoramic", 1).unwrap());
    assert_eq!(r["goal_distance"], 0.0);
    let steps = r["steps"].as_array().unwrap();
    assert_eq!(steps.last().unwrap()["action"], "stop");
    let frames: Vec<u64> = steps.iter().map(|s| s["frame"].as_u64().unwrap()).collect();
    assert!(frames.windows(2).all(|w| w[0] <= w[1]));

    assert_eq!(
        d.run_episode(0, "random", "egocentric", 2).unwrap(),
        d.run_episode(0, "random", "egocentric", 2).unwrap()
    );
    assert!(d.run_episode(0, "external", "egocentric", 0).is_err());
    assert!(d.run_episode(999, "greedy", "egocentric", 0).is_err());
    assert!(d.run_episode(0, "greedy", "sideways", 0).is_err());
}
