mod common;

use std::fs;

use choquet_path::capacity::{Capacity, ProbabilityVector};
use choquet_path::choquet::{ced, choquet_integral, CostVector, Disutility};
use choquet_path::instance::{Instance, InstanceError};
use choquet_path::oracle::{enumerate_report, DEFAULT_PATH_CAP};
use choquet_path::search_mo::{MoConfig, Retention};
use common::*;

const THIRD: f64 = 1.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

fn cv(x: &[f64]) -> CostVector {
    CostVector::new(x.to_vec()).unwrap()
}

#[test]
fn example1_table() {
    let r = fixture("example1.json").resolve().unwrap();
    let v = r.capacity();
    assert!(v.is_concave());
    assert!(!v.dual().is_concave() && v.dual().is_convex());
    let bar = v.dual();
    assert!((bar.value_mask(0b001) - THIRD).abs() < 1e-15);
    assert_eq!(bar.value_mask(0b010), 0.0);
    assert!((bar.value_mask(0b110) - TWO_THIRDS).abs() < 1e-15);

    let p = v.max_entropy().unwrap();
    let phi = v.shapley().unwrap();
    for i in 0..3 {
        assert!((p[i] - THIRD).abs() <= 1e-9);
        assert!((phi[i] - THIRD).abs() <= 1e-9);
    }

    let expected = [
        ([0.0, 100.0, 100.0], TWO_THIRDS, TWO_THIRDS),
        ([100.0, 0.0, 100.0], 1.0, TWO_THIRDS),
        ([0.0, 100.0, 0.0], TWO_THIRDS, THIRD),
        ([100.0, 0.0, 0.0], THIRD, THIRD),
    ];
    let w = r.disutility();
    for (x, psi, linear) in expected {
        assert_eq!(ced(v, &w, &cv(&x)).unwrap(), psi);
        let lin: f64 = (0..3).map(|i| p[i] * w.eval(x[i])).sum();
        assert!((lin - linear).abs() < 1e-12);
        assert!(psi >= lin - 1e-12);
    }

    // the solvers pick x^4, the only path with ψ = 1/3
    let t = maxent_tables(&r, 1.0);
    let mo = run_mo(&r, &t, MoConfig::default());
    let rank = run_rank(&r, &t).solution;
    for s in [&mo, &rank] {
        assert_eq!(s.path.nodes(), &[0, 4, 5]);
        assert_eq!(s.psi, THIRD);
    }
    let report = enumerate_report(&r.graph, &r.criterion, &p, DEFAULT_PATH_CAP).unwrap();
    assert_eq!(report.paths.len(), 4);
}

#[test]
#[allow(clippy::approx_constant)]
fn example2_fixture_and_concave_reversal() {
    let r = fixture("example2.json").resolve().unwrap();
    let v = r.capacity();
    let w = r.disutility();
    assert_eq!(ced(v, &w, &cv(&[10.0, 0.0])).unwrap(), TWO_THIRDS);
    assert_eq!(ced(v, &w, &cv(&[0.0, 10.0])).unwrap(), TWO_THIRDS);
    assert_eq!(ced(v, &w, &cv(&[5.0, 5.0])).unwrap(), 0.25);

    let sqrt_w = |x: &[f64]| -> Vec<f64> { x.iter().map(|t| (t / 10.0).sqrt()).collect() };
    let x = choquet_integral(v, &sqrt_w(&[10.0, 0.0])).unwrap();
    let y = choquet_integral(v, &sqrt_w(&[0.0, 10.0])).unwrap();
    let z = choquet_integral(v, &sqrt_w(&[5.0, 5.0])).unwrap();
    assert!((x - 0.6667).abs() < 1e-3 && (y - 0.6667).abs() < 1e-3);
    assert!((z - 0.7071).abs() < 1e-3);
    assert!(x < z);

    let t = maxent_tables(&r, 1.0);
    let mo = run_mo(&r, &t, MoConfig::default());
    assert_eq!(mo.path.nodes(), &[0, 3, 4]);
    assert_eq!(mo.psi, 0.25);
}

#[test]
fn example3_bellman_violation() {
    let r = fixture("example3.json").resolve().unwrap();
    let v = r.capacity();
    let w = r.disutility();
    for (x, psi) in [
        ([0.0, 100.0, 0.0], 0.5),
        ([100.0, 0.0, 0.0], 0.4),
        ([100.0, 0.0, 100.0], 0.8),
        ([0.0, 100.0, 100.0], 0.7),
    ] {
        assert_eq!(ced(v, &w, &cv(&x)).unwrap(), psi);
    }

    let t = maxent_tables(&r, 1.0);
    let mo = run_mo(&r, &t, MoConfig::default());
    assert_eq!(mo.psi, 0.7);
    assert_eq!(mo.cost.as_slice(), &[0.0, 100.0, 100.0]);
    // the first parallel arc carries (0, 100, 0)
    assert_eq!(mo.path.arcs(), &[0, 2]);

    let greedy = run_mo(
        &r,
        &t,
        MoConfig {
            retention: Retention::PsiGreedy,
            rule2: true,
        },
    );
    assert_eq!(greedy.psi, 0.8);
    assert_eq!(run_rank(&r, &t).solution.psi, 0.7);
}

#[test]
fn fixtures_round_trip_byte_identical() {
    for name in FIXTURES {
        let bytes = fs::read_to_string(fixture_path(name)).unwrap();
        let inst = Instance::from_json(&bytes).unwrap();
        assert_eq!(inst.to_json(), bytes, "{name}");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        inst.save(&path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), bytes);
        assert_eq!(Instance::load(&path).unwrap(), inst);
    }
}

fn load_err(edit: impl FnOnce(&mut serde_json::Value)) -> String {
    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fixture_path("example3.json")).unwrap()).unwrap();
    edit(&mut doc);
    Instance::from_json(&doc.to_string()).unwrap_err().to_string()
}

#[test]
fn load_diagnostics_name_the_field() {
    assert_eq!(load_err(|d| d["goals"] = serde_json::json!([])), "goals must be non-empty");
    let e = load_err(|d| d["arcs"][1]["costs"] = serde_json::json!([1.0, 2.0]));
    assert!(e.contains("arc 1") && e.contains("length 2"), "{e}");
    let e = load_err(|d| d["version"] = serde_json::json!(9));
    assert!(e.starts_with("version:"), "{e}");
    let e = load_err(|d| d["m"] = serde_json::json!(17));
    assert!(e.starts_with("m:"), "{e}");
    let e = load_err(|d| {
        d.as_object_mut().unwrap().remove("start");
    });
    assert!(e.contains("missing field `start`"), "{e}");
    let e = load_err(|d| d["capacity"]["values"]["9"] = serde_json::json!(0.5));
    assert!(e.contains("capacity.values") && e.contains("9"), "{e}");
    let e = load_err(|d| {
        d["capacity"]["values"].as_object_mut().unwrap().remove("5");
    });
    assert!(e.contains("missing subset 5"), "{e}");
    // {1} at 0.9 above {1,3} at 0.8
    let e = load_err(|d| d["capacity"]["values"]["1"] = serde_json::json!(0.9));
    assert!(e.starts_with("capacity:") && e.contains("monotone"), "{e}");
    // monotone but supermodular
    let e = load_err(|d| {
        d["capacity"]["values"] =
            serde_json::json!({"0": 0.0, "1": 0.0, "2": 0.0, "3": 0.0, "4": 0.0, "5": 0.0, "6": 0.0, "7": 1.0})
    });
    assert!(e.contains("not concave"), "{e}");
    let e = load_err(|d| d["capacity"] = serde_json::json!({"kind": "v1", "p": [0.5, 0.5]}));
    assert!(e.contains("capacity.p"), "{e}");
    let e = load_err(|d| d["disutility"]["exponent"] = serde_json::json!(0.5));
    assert!(e.starts_with("disutility:"), "{e}");
    let e = load_err(|d| d["arcs"][0]["to"] = serde_json::json!(7));
    assert!(e.contains("node 7"), "{e}");
    let e = load_err(|d| d["arcs"][0]["extra"] = serde_json::json!(1));
    assert!(e.contains("unknown field `extra`"), "{e}");
    assert!(matches!(
        Instance::from_json("{"),
        Err(InstanceError::Schema(_))
    ));
}

#[test]
fn capacity_kinds_resolve() {
    let mut inst = fixture("example3.json");
    inst.capacity = choquet_path::instance::CapacitySpec::V1 {
        p: vec![0.2, 0.3, 0.5],
    };
    let v1 = inst.resolve().unwrap();
    let p = ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap();
    assert_eq!(v1.capacity(), &Capacity::v1(&p));

    inst.capacity = choquet_path::instance::CapacitySpec::Mobius {
        masses: [(1, 0.5), (6, 0.5)].into_iter().collect(),
    };
    let v2 = inst.resolve().unwrap();
    // plausibility: v(A) = Σ masses of sets meeting A
    assert_eq!(v2.capacity().value_mask(0b001), 0.5);
    assert_eq!(v2.capacity().value_mask(0b100), 0.5);
    assert_eq!(v2.capacity().value_mask(0b011), 1.0);

    inst.disutility.scale = None;
    let r = inst.resolve().unwrap();
    // M = (3 - 1) * 100
    assert_eq!(r.disutility(), Disutility::power(1.0, 200.0).unwrap());
}
