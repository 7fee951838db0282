use std::collections::BTreeMap;
use std::process::Command;

use proptest::prelude::*;

use newton_curv_cli::{
    run_algebra_suite, run_named_geometry_suite, run_theorem1_suite, AlgebraConfig, CaseResult, GeometryConfig,
    Parameters, SuiteReport, Theorem1Config,
};

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let algebra = || {
        run_algebra_suite(&AlgebraConfig { n: 5, l: 2, orders: vec![2, 4], trials: 40, ..Default::default() })
            .unwrap()
            .to_json()
    };
    let forms = || run_theorem1_suite(&Theorem1Config { n: 4, trials: 12, ..Default::default() }).unwrap().to_json();
    let geometry = || {
        let cfg = GeometryConfig { orders: vec![0, 2], samples: 30, nodes: 8, ..Default::default() };
        run_named_geometry_suite("hopf-s5", &cfg).unwrap().to_json()
    };
    for run in [&algebra as &(dyn Fn() -> String + Sync), &forms, &geometry] {
        let one = with_threads(1, run);
        assert_eq!(one, with_threads(4, run));
        assert_eq!(one, with_threads(3, run));
    }
}

#[test]
fn same_seed_same_report_other_seed_differs() {
    let cfg = AlgebraConfig { trials: 8, ..Default::default() };
    let a = run_algebra_suite(&cfg).unwrap().to_json();
    assert_eq!(a, run_algebra_suite(&cfg).unwrap().to_json());
    assert_ne!(a, run_algebra_suite(&AlgebraConfig { seed: 8, ..cfg }).unwrap().to_json());
}

fn case_strategy() -> impl Strategy<Value = CaseResult> {
    (
        "[a-z_]{1,12}/r[0-9]",
        prop::option::of(any::<f64>().prop_filter("finite", |v| v.is_finite())),
        1e-14f64..1.0,
        0usize..4,
        prop::collection::btree_map("[a-z]{1,5}", any::<i32>(), 0..3),
    )
        .prop_map(|(id, residual, threshold, kind, inputs)| {
            let inputs: BTreeMap<String, serde_json::Value> = inputs.into_iter().map(|(k, v)| (k, v.into())).collect();
            match (kind, residual) {
                (0, Some(r)) => CaseResult::measured(id, inputs, r.abs(), threshold),
                (1, _) => CaseResult::skipped(id, inputs, threshold, "r > n"),
                (2, r) => CaseResult::violation(id, inputs, r, threshold, "gate".into()),
                (_, r) => CaseResult::exact(id, inputs, r.unwrap_or(0.0).abs(), r == Some(0.0)),
            }
        })
}

proptest! {
    #[test]
    fn json_round_trip_is_lossless(cases in prop::collection::vec(case_strategy(), 0..6), seed in any::<u64>(), tol in 1e-16f64..1.0) {
        let mut p = Parameters { seed: Some(seed), r: vec![0, 2], ..Default::default() };
        p.tolerances.insert("algebra".into(), tol);
        let rep = SuiteReport::new("algebra", p, cases);
        let text = rep.to_json();
        let back = SuiteReport::from_json(&text).unwrap();
        prop_assert_eq!(&back, &rep);
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(rep.pass(), rep.cases.iter().all(|c| c.pass));
        prop_assert_eq!(rep.to_csv().lines().count(), rep.cases.len() + 1);
    }
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_newton-curv"))
}

#[test]
fn exit_status_follows_the_aggregate() {
    let ok = binary().args(["--suite", "algebra", "--trials", "5"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("aggregate: PASS"));

    let tilted =
        binary().args(["--suite", "geometry", "--geometry", "flat-torus-tilted", "--samples", "10"]).output().unwrap();
    assert_eq!(tilted.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&tilted.stdout).contains("HYPOTHESIS_VIOLATION"));

    let tight = binary().args(["--suite", "algebra", "--trials", "5", "--tol-algebra", "1e-30"]).output().unwrap();
    assert_eq!(tight.status.code(), Some(1));

    let invalid = binary().args(["--suite", "algebra", "--n", "5", "--mode", "exact"]).output().unwrap();
    assert_eq!(invalid.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&invalid.stderr).contains("n ≤ 4"));
}

#[test]
fn json_output_file_is_stable_across_worker_counts() {
    let dir = std::env::temp_dir().join(format!("newton-curv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |threads: &str, name: &str| {
        let path = dir.join(name);
        let status = binary()
            .env("NEWTON_CURV_THREADS", threads)
            .args(["--suite", "geometry", "--geometry", "hopf-s3", "--r", "0", "--samples", "20", "--format", "json"])
            .arg("--out")
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&path).unwrap()
    };
    let a = run("1", "a.json");
    assert_eq!(a, run("4", "b.json"));
    let rep = SuiteReport::from_json(std::str::from_utf8(&a).unwrap()).unwrap();
    assert!(rep.wall_time.is_none() && rep.pass());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_and_table_formats() {
    let csv = binary().args(["--suite", "algebra", "--trials", "3", "--format", "csv"]).output().unwrap();
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("suite,case_id,residual,threshold,pass\n"));
    let table = binary().args(["--suite", "theorem2-table", "--n", "3", "--l", "2"]).output().unwrap();
    assert!(table.status.success());
    assert!(String::from_utf8(table.stdout).unwrap().contains("otherwise"));
}
