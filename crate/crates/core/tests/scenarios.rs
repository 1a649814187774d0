use qontext::cli::bundled_data_dir;
use qontext::inequality;
use qontext::qset;
use qontext::scenario::{parse_scenario, Context, ContextFamily, ScenarioKind};

fn xyz_text() -> String {
    std::fs::read_to_string(bundled_data_dir().join("xyz.scn")).unwrap()
}

#[test]
fn xyz_scenario_shape() {
    let s = parse_scenario(&xyz_text()).unwrap();
    assert_eq!(s.kind(), ScenarioKind::Correlation);
    let ids: Vec<&str> = s.observables().iter().map(|o| o.id.as_str()).collect();
    assert_eq!(ids, ["X", "Y", "Z"]);
    assert_eq!(s.contexts().len(), 3);
    assert!(s.occurrence_counts().values().all(|&c| c == 2));
    for id in ids {
        assert_eq!(s.contexts_of(id).unwrap().len(), 2);
    }
}

#[test]
fn xyz_text_round_trips() {
    let s = parse_scenario(&xyz_text()).unwrap();
    let again = parse_scenario(&s.to_text()).unwrap();
    assert_eq!(s, again);
}

/// Each observable of the triangle sits in two contexts, so its quasi class
/// has two elements; the quasi table is reached through those classes.
#[test]
fn context_families_give_the_quasi_classes() {
    let s = parse_scenario(&xyz_text()).unwrap();
    for (base, others) in [("X", ["Y", "Z"]), ("Y", ["X", "Z"]), ("Z", ["X", "Y"])] {
        let fam = ContextFamily::new(base, others).unwrap();
        assert_eq!(fam.quasi_class().qcard(), 2);
        for c in fam.contexts() {
            assert!(s.contexts().iter().any(|d| d.same_members(&c)));
        }
        let singletons = qset::exhaust(&fam.quasi_class());
        assert_eq!(singletons.len(), 2);
        assert!(qset::indistinguishable(&singletons[0], &singletons[1]));
    }
    assert_eq!(inequality::quasi_table().len(), 8);
}

#[test]
fn context_order_is_not_semantic() {
    assert!(Context::new(["X", "Y"]).same_members(&Context::new(["Y", "X"])));
}

#[test]
fn ks_commands_reject_correlation_scenarios() {
    let s = parse_scenario(&xyz_text()).unwrap();
    assert!(qontext::ks::parity_check(&s).is_err());
    assert!(qontext::ks::exhaustive_coloring(&s).is_err());
}
