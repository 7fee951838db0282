//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use newton_curv_cli::{
    run_algebra_suite, run_named_geometry_suite, run_theorem1_suite, AlgebraConfig, CaseResult, CaseStatus,
    GeometryConfig, Mode, SuiteReport, Theorem1Config,
};

const TRACE_IDENTITIES: [&str; 5] = ["newton_trace", "recursion", "mean_curvature_vector", "trace_alpha", "odd_trace"];

struct Outcome {
    pass: bool,
    detail: String,
}

fn even_up_to(n: usize) -> Vec<usize> {
    (0..=n).step_by(2).collect()
}

fn cases_named<'a>(rep: &'a SuiteReport, ids: &'a [&str]) -> impl Iterator<Item = &'a CaseResult> + 'a {
    rep.cases.iter().filter(move |c| ids.iter().any(|id| c.id.starts_with(&format!("{id}/"))))
}

/// Reports for every `(n, l)` with the given trial count.
fn algebra_grid(
    ns: std::ops::RangeInclusive<usize>,
    ls: &[usize],
    trials: usize,
    mode: Mode,
    seed: u64,
) -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for n in ns {
        for &l in ls {
            let cfg = AlgebraConfig {
                n,
                l,
                orders: even_up_to(n),
                trials,
                seed: seed + (10 * n + l) as u64,
                mode,
                tol: 1e-10,
            };
            out.push(run_algebra_suite(&cfg).expect("algebra parameters are valid"));
        }
    }
    out
}

fn check_cases(reports: &[SuiteReport], ids: &[&str], exact: bool) -> (bool, f64, usize) {
    let mut pass = true;
    let mut max: f64 = 0.0;
    let mut count = 0;
    for rep in reports {
        for c in cases_named(rep, ids) {
            if c.status == CaseStatus::Skipped {
                continue;
            }
            count += 1;
            let r = c.residual.unwrap_or(f64::INFINITY);
            max = max.max(r);
            pass &= c.pass && if exact { r == 0.0 } else { r < 1e-10 };
        }
    }
    (pass && count > 0, max, count)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let float = algebra_grid(2..=6, &[1, 2, 3], 34, Mode::Float, 100);
    let exact = algebra_grid(2..=4, &[1, 2, 3], 6, Mode::Exact, 200);
    let elapsed = start.elapsed();
    let stacks = |reps: &[SuiteReport]| reps.iter().map(|r| r.parameters.trials.unwrap_or(0)).sum::<usize>();
    let (fp, fmax, fcases) = check_cases(&float, &TRACE_IDENTITIES, false);
    let (ep, _, ecases) = check_cases(&exact, &TRACE_IDENTITIES, true);
    let enough = stacks(&float) >= 500 && stacks(&exact) >= 50;
    Outcome {
        pass: fp && ep && enough && elapsed < Duration::from_secs(60),
        detail: format!(
            "five trace/recursion identities: {} float stacks, {fcases} cases, max {fmax:.2e}; {} rational stacks, {ecases} cases exact; {:.1}s",
            stacks(&float),
            stacks(&exact),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Outcome {
    let float = algebra_grid(2..=5, &[1, 2], 25, Mode::Float, 300);
    let exact = algebra_grid(2..=4, &[1, 2], 4, Mode::Exact, 400);
    let stacks: usize = float.iter().map(|r| r.parameters.trials.unwrap_or(0)).sum();
    let (fp, fmax, fcases) = check_cases(&float, &["slot_contraction"], false);
    let (ep, _, ecases) = check_cases(&exact, &["slot_contraction"], true);
    let orders_ok = float
        .iter()
        .flat_map(|r| r.cases_with_prefix("slot_contraction/"))
        .filter(|c| c.status != CaseStatus::Skipped)
        .all(|c| c.id.ends_with("/r2") || c.id.ends_with("/r4"));
    Outcome {
        pass: fp && ep && stacks >= 200 && orders_ok,
        detail: format!(
            "slot contraction: {stacks} float stacks, {fcases} cases, max {fmax:.2e}; {ecases} rational cases exact"
        ),
    }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for n in 1..=5 {
        for l in [1, 2] {
            let cfg =
                Theorem1Config { n, l, orders: even_up_to(n), trials: 20, seed: 500 + (10 * n + l) as u64, tol: 1e-10 };
            reports.push(run_theorem1_suite(&cfg).expect("form parameters are valid"));
        }
    }
    let elapsed = start.elapsed();
    let pairs: usize = reports.iter().map(|r| r.parameters.trials.unwrap_or(0)).sum();
    let (ap, amax, _) = check_cases(&reports, &["form_total"], false);
    let (ip, imax, _) = check_cases(&reports, &["normal_part_independence"], false);
    Outcome {
        pass: ap && ip && pairs >= 200 && elapsed < Duration::from_secs(120),
        detail: format!(
            "top coefficient of the form against S_r: {pairs} pairs, max {amax:.2e}; paired normal parts differ by at most {imax:.2e}; {:.1}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_4() -> Outcome {
    let reports = algebra_grid(1..=6, &[1], 34, Mode::Float, 600);
    let matrices: usize = reports.iter().map(|r| r.parameters.trials.unwrap_or(0)).sum();
    let (p, max, cases) = check_cases(&reports, &["minor_oracle"], false);
    Outcome {
        pass: p && matrices >= 200,
        detail: format!("single normal against principal minors: {matrices} matrices, {cases} cases, max {max:.2e}"),
    }
}

struct GeometryRuns {
    s3: SuiteReport,
    s5: SuiteReport,
    torus: SuiteReport,
    tilted: SuiteReport,
    elapsed: Duration,
}

fn geometry_runs() -> GeometryRuns {
    let start = Instant::now();
    let cfg = |orders: Vec<usize>| GeometryConfig { orders, ..Default::default() };
    let run = |name: &str, orders| run_named_geometry_suite(name, &cfg(orders)).expect("built-in geometry");
    GeometryRuns {
        s3: run("hopf-s3", vec![0]),
        s5: run("hopf-s5", vec![0, 2]),
        torus: run("flat-torus", vec![0, 2]),
        tilted: run("flat-torus-tilted", vec![0]),
        elapsed: start.elapsed(),
    }
}

fn residual(rep: &SuiteReport, id: &str) -> f64 {
    rep.case(id).and_then(|c| c.residual).unwrap_or(f64::INFINITY)
}

fn input(rep: &SuiteReport, id: &str, key: &str) -> f64 {
    rep.case(id).and_then(|c| c.inputs.get(key)).and_then(|v| v.as_f64()).unwrap_or(f64::NAN)
}

fn criterion_5(g: &GeometryRuns) -> Outcome {
    let ids = ["divergence_formula/r0", "divergence_formula/r2"];
    let s3 = residual(&g.s3, ids[0]);
    let s5 = [residual(&g.s5, ids[0]), residual(&g.s5, ids[1])];
    let samples = g.s3.parameters.samples.unwrap_or(0).min(g.s5.parameters.samples.unwrap_or(0));
    Outcome {
        pass: samples >= 100 && s3 < 1e-3 && s5.iter().all(|&r| r < 1e-3),
        detail: format!(
            "divergence formula at {samples} points: S3 r=0 {s3:.2e}; S5 r=0 {:.2e}, r=2 {:.2e}",
            s5[0], s5[1]
        ),
    }
}

fn criterion_6(g: &GeometryRuns) -> Outcome {
    let rel =
        |rep: &SuiteReport, r: usize, expect: f64| (input(rep, &format!("total/r{r}"), "total") / expect - 1.0).abs();
    let s3 = rel(&g.s3, 2, 2.0 * PI * PI);
    let s5 = [rel(&g.s5, 2, 2.0 * PI.powi(3)), rel(&g.s5, 4, PI.powi(3))];
    let torus = input(&g.torus, "total/r2", "total").abs();
    // the closed form agrees with the known values too
    let closed_ok = (input(&g.s3, "total/r2", "closed_form") - 2.0 * PI * PI).abs() < 1e-9
        && (input(&g.s5, "total/r2", "closed_form") - 2.0 * PI.powi(3)).abs() < 1e-9
        && (input(&g.s5, "total/r4", "closed_form") - PI.powi(3)).abs() < 1e-9
        && input(&g.torus, "total/r2", "closed_form") == 0.0;
    let suite_cases = [&g.s3, &g.s5, &g.torus]
        .iter()
        .flat_map(|r| r.cases.iter())
        .filter(|c| c.id.starts_with("total/") || c.id.starts_with("recurrence/") || c.id == "convergence")
        .all(|c| c.pass);
    let converged = [&g.s3, &g.s5].iter().all(|r| r.case("convergence").is_some_and(|c| c.pass));
    Outcome {
        pass: s3 < 5e-3
            && s5.iter().all(|&e| e < 1e-2)
            && torus < 1e-8
            && closed_ok
            && suite_cases
            && converged
            && g.elapsed < Duration::from_secs(300),
        detail: format!(
            "S3 total S_2 off by {s3:.2e}; S5 S_2 {:.2e}, S_4 {:.2e}; torus |S_2| {torus:.1e}; recurrence and refinement pass: {suite_cases}; {:.1}s",
            s5[0],
            s5[1],
            g.elapsed.as_secs_f64()
        ),
    }
}

fn criterion_7(g: &GeometryRuns) -> Outcome {
    let gate = residual(&g.tilted, "gate/totally_geodesic");
    let status = g.tilted.aggregate.status;
    let formula = g.tilted.case("divergence_formula/r0").map(|c| c.status);
    Outcome {
        pass: gate > 0.1
            && !g.tilted.pass()
            && status == CaseStatus::HypothesisViolation
            && formula == Some(CaseStatus::HypothesisViolation),
        detail: format!("tilted torus gate residual {gate:.3}; suite status {}", status.label()),
    }
}

fn criterion_8(g: &GeometryRuns) -> Outcome {
    let gauge = residual(&g.s3, "frame_derivative/gauge");
    let identity = residual(&g.s3, "frame_derivative/identity");
    let points = g.s3.case("frame_derivative/identity").and_then(|c| c.inputs.get("samples")).and_then(|v| v.as_u64());
    Outcome {
        pass: gauge < 1e-8 && identity < 1e-3 && points == Some(20),
        detail: format!(
            "S3 at {} points: gauge {gauge:.2e}, frame derivative identity {identity:.2e}",
            points.unwrap_or(0)
        ),
    }
}

fn main() -> ExitCode {
    let mut all = true;
    let mut report = |k: usize, o: Outcome| {
        all &= o.pass;
        println!("criterion {k}: {}  {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    report(4, criterion_4());
    let g = geometry_runs();
    report(5, criterion_5(&g));
    report(6, criterion_6(&g));
    report(7, criterion_7(&g));
    report(8, criterion_8(&g));
    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
