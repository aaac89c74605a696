//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Criterion 11 checks a domination constant that does not hold on `⊕ℤ/2`
//! from level 3 on. It is reported as FAIL; the run only errors if a
//! criterion fails unexpectedly or that one starts passing.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use orbitrep_cli::{run, Command, ExperimentConfig, ExperimentReport};

const KNOWN_FAILING: &[usize] = &[11];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn config(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json).expect("valid config")
}

fn run_in(cmd: Command, cfg: &ExperimentConfig) -> (ExperimentReport, Duration) {
    let dir = tempfile::tempdir().unwrap();
    let t = Instant::now();
    let r = run(cmd, cfg, dir.path()).expect("run completes");
    (r, t.elapsed())
}

fn matching<'a>(r: &'a ExperimentReport, prefix: &'a str) -> impl Iterator<Item = &'a orbitrep_cli::CheckRecord> {
    r.checks.iter().filter(move |c| c.name.starts_with(prefix))
}

fn all_pass(r: &ExperimentReport, prefixes: &[&str]) -> (bool, usize) {
    let mut n = 0;
    let mut ok = true;
    for p in prefixes {
        for c in matching(r, p) {
            n += 1;
            ok &= c.pass;
        }
    }
    (ok && n > 0, n)
}

fn criterion_1() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for (group, bound) in [(r#"{"kind": "integers"}"#, 6f64.sqrt()), (r#"{"kind": "free", "d": 2}"#, 10f64.sqrt())] {
        let cfg = config(&format!(r#"{{"seed": 1, "group": {group}, "weights": {{"q": 0.5, "n_max": {}}}, "norms": {{"trials": 10000}}}}"#, if group.contains("free") { 10 } else { 40 }));
        let (r, took) = run_in(Command::Norms, &cfg);
        let (pass, n) = all_pass(&r, &["operator_norm"]);
        let bounds_match = matching(&r, "operator_norm").all(|c| (c.bound.unwrap() - bound).abs() < 1e-12);
        let worst = matching(&r, "operator_norm").map(|c| c.observed.unwrap()).fold(0.0, f64::max);
        ok &= pass && bounds_match && took < Duration::from_secs(30);
        notes.push(format!("{n} generators, max {worst:.4} ≤ {bound:.4}, {:.1}s", took.as_secs_f64()));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_2() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for group in [r#"{"kind": "integers"}"#, r#"{"kind": "free", "d": 2}"#, r#"{"kind": "lattice", "d": 2}"#] {
        let cfg = config(&format!(r#"{{"seed": 1, "group": {group}, "ratios": {{"max_len": 3}}}}"#));
        let (r, _) = run_in(Command::Weights, &cfg);
        let (pass, n) = all_pass(&r, &["weight_ratio"]);
        // M_b = ((2d+1)·2)^{|b|}
        let d = cfg.group.rank().unwrap() as f64;
        let exact = (1..=3).all(|l| r.check(&format!("weight_ratio[|b|={l}]")).unwrap().bound == Some(((2.0 * d + 1.0) * 2.0).powi(l)));
        ok &= pass && n == 3 && exact;
        notes.push(format!("{:?}: {} lengths, zero violations", cfg.group, n));
    }
    verdict(ok, notes.join(", "))
}

fn criterion_3(r: &ExperimentReport) -> Verdict {
    let (pass, n) = all_pass(r, &["jrt_rotation", "jrt_bernoulli"]);
    let decay = r.check("jrt_rotation_decay").unwrap();
    let var = r.check("jrt_bernoulli_variance").unwrap();
    verdict(
        pass && n == 4,
        format!("decay ratio error {:.2e} ≤ 5%, variance within {:.2} SE", decay.observed.unwrap(), var.observed.unwrap()),
    )
}

fn criterion_4(r: &ExperimentReport) -> Verdict {
    let (pass, _) = all_pass(r, &["tower_"]);
    let m = r.check("tower_measure").unwrap();
    let samples = r.details["tower"]["direct"]["trials"].as_u64().unwrap();
    verdict(
        pass && samples >= 100_000,
        format!("{samples} direct samples, 0 collisions, μ(B_N E) ≤ {:.3e} < {}", m.ci.unwrap()[1], m.bound.unwrap()),
    )
}

fn criterion_5(r: &ExperimentReport) -> Verdict {
    let stages = r.details["build"]["stages"].as_u64().unwrap_or(0);
    let (pass, n) = all_pass(r, &["stage"]);
    let fourth = matching(r, "stage").filter(|c| c.name.ends_with("fourth_moment")).map(|c| c.observed.unwrap()).fold(0.0, f64::max);
    verdict(pass && stages == 4 && r.check("model_build").is_none(), format!("{stages} stages, {n} checks, max ‖f_n‖₄ ≤ {fourth:.4}"))
}

fn criterion_6(r: &ExperimentReport) -> Verdict {
    let (pass, n) = all_pass(r, &["equivariance["]);
    let samples = r.details["equivariance"][0]["samples"].as_u64().unwrap();
    let compared: u64 = r.details["equivariance"].as_array().unwrap().iter().map(|e| e["compared"].as_u64().unwrap()).sum();
    // B_2 in ℤ has 5 elements
    verdict(pass && n == 5 && samples >= 1000, format!("{n} shifts h, {samples} samples, {compared} coefficients, 0 mismatches"))
}

fn criterion_7(r: &ExperimentReport) -> Verdict {
    let (hits, nh) = all_pass(r, &["ball_hit["]);
    let (sets, ns) = all_pass(r, &["set_approximation["]);
    verdict(hits && sets && nh == 4 && ns == 4, format!("{nh} ball hits ≥ δ_i, {ns} symmetric differences < γ_i"))
}

fn criterion_8(r: &ExperimentReport) -> Verdict {
    let f = r.check("orbit_frequency[U_1]").unwrap();
    let c = r.check("orbit_measure_consistency[U_1]").unwrap();
    let steps = r.details["orbit"]["frequency"]["steps"].as_u64().unwrap();
    verdict(
        f.pass && c.pass && f.ci.unwrap()[0] > 0.0 && steps >= 10_000,
        format!("{steps} steps, frequency CI lower {:.4}, μ(φ_f ∈ U_1) ≈ {:.4}", f.ci.unwrap()[0], c.observed.unwrap()),
    )
}

fn criterion_9(r: &ExperimentReport) -> Verdict {
    let c = r.check("feldman_conjugacy").unwrap();
    let points = r.details["feldman"]["points"].as_u64().unwrap();
    let steps = r.details["feldman"]["steps"].as_u64().unwrap();
    verdict(
        c.pass && c.observed.unwrap() < 1e-12 && points >= 1000 && steps >= 30,
        format!("{points} points, {steps} coordinates, max error {:.2e}", c.observed.unwrap()),
    )
}

fn criterion_10(r: &ExperimentReport) -> Verdict {
    let q = r.check("real_psi_quadrature").unwrap();
    let u = r.check("real_u").unwrap().observed.unwrap();
    let d = r.check("real_d").unwrap().observed.unwrap();
    let dom = r.check("real_domination").unwrap();
    verdict(
        q.pass && dom.pass && u == 1.0 && d == 2.0,
        format!("quadrature error {:.1e}, u = {u}, D = {d}, {} violations", q.observed.unwrap(), dom.observed.unwrap()),
    )
}

fn criterion_11(r: &ExperimentReport) -> Verdict {
    let stated: Vec<_> = matching(r, "chain_domination[").collect();
    let corrected = all_pass(r, &["chain_domination_corrected["]);
    let haar = r.check("chain_haar_identity").unwrap();
    let lower = r.check("chain_lower_bound").unwrap();
    let failing: BTreeSet<usize> = stated
        .iter()
        .filter(|c| !c.pass)
        .map(|c| r.details["chain"]["checks"].as_array().unwrap().iter().find(|d| format!("chain_domination[{}]", d["g0"].as_str().unwrap()) == c.name).unwrap()["m0"].as_u64().unwrap() as usize)
        .collect();
    // the exact parts of the criterion must hold even though the constant does not
    assert!(haar.pass && lower.pass, "Haar identities must hold exactly");
    assert!(corrected.0 && corrected.1 == 20, "the corrected constant must dominate for every sampled g0");
    assert!(failing.iter().all(|m| *m >= 3), "stated constant may only fail from level 3 on: {failing:?}");
    let pass = stated.len() == 20 && stated.iter().all(|c| c.pass);
    verdict(
        pass,
        format!(
            "λ_i*λ_j = λ_max(i,j) exact; stated C_g0 violated for {} of {} g0 (levels {:?}); corrected constant holds for all",
            stated.iter().filter(|c| !c.pass).count(),
            stated.len(),
            failing
        ),
    )
}

fn output_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let mut bytes = std::fs::read(&p).unwrap();
            if name == "report.json" {
                let mut v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
                v["metadata"]["wall_time_ms"] = 0.into();
                bytes = serde_json::to_vec_pretty(&v).unwrap();
            }
            (name, bytes)
        })
        .collect();
    files.sort();
    files
}

fn criterion_12() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_orbitrep");
    let work = tempfile::tempdir().unwrap();
    let cfg = work.path().join("config.json");
    std::fs::write(&cfg, r#"{"seed": 42, "build": {"stages": 2}, "orbit": {"steps": 2000}}"#).unwrap();
    let run_once = |name: &str, threads: &str| {
        let out = work.path().join(name);
        let status = Process::new(bin)
            .args(["all", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap()
            .status;
        (status.code(), output_files(&out))
    };
    let (code_a, a) = run_once("a", "4");
    let (code_b, b) = run_once("b", "1");
    let same = a == b && !a.is_empty();
    let differing: Vec<_> = a.iter().zip(&b).filter(|(x, y)| x != y).map(|(x, _)| x.0.clone()).collect();
    verdict(
        same && code_a == code_b,
        format!("{} files byte-identical across runs with 4 and 1 worker threads{}", a.len(), if differing.is_empty() { String::new() } else { format!("; differ: {differing:?}") }),
    )
}

fn exit_codes() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_orbitrep");
    let work = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| Process::new(bin).args(args).current_dir(work.path()).output().unwrap().status.code();
    std::fs::write(work.path().join("bad.json"), r#"{"seed": 1, "nrms": {}}"#).unwrap();
    std::fs::write(work.path().join("ok.json"), r#"{"seed": 1}"#).unwrap();
    let missing = code(&["norms", "--config", "nope.json"]);
    let unknown = code(&["norms", "--config", "bad.json"]);
    let usage = code(&["frobnicate", "--config", "ok.json"]);
    let ok = code(&["feldman", "--config", "ok.json"]);
    let failing = code(&["continuous", "--config", "ok.json"]);
    verdict(
        missing == Some(2) && unknown == Some(2) && usage == Some(2) && ok == Some(0) && failing == Some(1),
        format!("missing config {missing:?}, unknown key {unknown:?}, bad subcommand {usage:?}, passing run {ok:?}, failing run {failing:?}"),
    )
}

fn main() {
    // one shared run on ℤ with the default configuration covers 3 to 11
    let base = config(r#"{"seed": 2024}"#);
    let (report, took) = run_in(Command::All, &base);
    let results: Vec<(usize, &str, Verdict)> = vec![
        (1, "operator norm bound", criterion_1()),
        (2, "weight ratio bounds", criterion_2()),
        (3, "random ergodic convergence", criterion_3(&report)),
        (4, "tower validity", criterion_4(&report)),
        (5, "model stage invariants", criterion_5(&report)),
        (6, "equivariance", criterion_6(&report)),
        (7, "support and set approximation", criterion_7(&report)),
        (8, "frequent visits", criterion_8(&report)),
        (9, "rotation baseline", criterion_9(&report)),
        (10, "real line domination", criterion_10(&report)),
        (11, "locally finite chain constant", criterion_11(&report)),
        (12, "determinism", criterion_12()),
    ];
    let mut unexpected = Vec::new();
    for (k, name, v) in &results {
        println!("criterion {k:>2} {}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if v.pass == KNOWN_FAILING.contains(k) {
            unexpected.push(*k);
        }
    }
    let codes = exit_codes();
    println!("exit codes {}: {}", if codes.pass { "PASS" } else { "FAIL" }, codes.detail);
    println!("shared run took {:.1}s", took.as_secs_f64());
    if !codes.pass || !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
