//! The pipelines behind each subcommand.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use orbitrep::continuous::{chain_report, domination_constant_real, LocallyFiniteChain};
use orbitrep::dynamics::{rokhlin_tower, DynamicalSystem, SetDescriptor, SystemKind, TowerOptions};
use orbitrep::markov::{jrt_convergence_report, Observable, JrtReport, RATIO_TOLERANCE, SE_TOLERANCE};
use orbitrep::model::verify::{model_orbit_series, orbit_tally};
use orbitrep::model::{
    ball_membership, build_model, equivariance_check, feldman_baseline, phi, support_and_iso_check, Membership, ModelBuild,
};
use orbitrep::space::operator_norm_certificate;
use orbitrep::stats::Proportion;
use orbitrep::walk::{build_weight, weight_ratio, WeightParams, WeightTable, LOOKAHEAD};
use orbitrep::{seed, GroupElement, GroupSpec};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::report::{cell, config_hash, write_json, CheckRecord, ExperimentReport, Metadata, Table};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Weights,
    Norms,
    Jrt,
    Tower,
    Build,
    Support,
    Orbit,
    Feldman,
    Continuous,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Weights => "weights",
            Command::Norms => "norms",
            Command::Jrt => "jrt",
            Command::Tower => "tower",
            Command::Build => "build",
            Command::Support => "support",
            Command::Orbit => "orbit",
            Command::Feldman => "feldman",
            Command::Continuous => "continuous",
            Command::All => "all",
        }
    }
}

#[derive(Default)]
struct Outcome {
    checks: Vec<CheckRecord>,
    details: BTreeMap<String, Value>,
    tables: Vec<Table>,
    json: Vec<(String, Value)>,
}

impl Outcome {
    fn detail<T: serde::Serialize>(&mut self, key: &str, value: &T) {
        self.details.insert(key.into(), serde_json::to_value(value).expect("serializable"));
    }
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    weight: Option<WeightTable>,
    build: Option<Result<ModelBuild, String>>,
}

impl Context<'_> {
    fn stream(&self, label: &str) -> u64 {
        seed::derive(self.cfg.seed, label, 0)
    }

    fn system(&self) -> Result<DynamicalSystem, CliError> {
        Ok(DynamicalSystem::new(self.cfg.group, self.cfg.system.clone(), self.stream("system"))?)
    }

    fn weight(&mut self) -> Result<&WeightTable, CliError> {
        if self.weight.is_none() {
            self.weight = Some(build_weight(&self.cfg.group, self.cfg.weight_params())?);
        }
        Ok(self.weight.as_ref().unwrap())
    }

    fn build(&mut self, out: &mut Outcome) -> Result<Option<ModelBuild>, CliError> {
        if self.build.is_none() {
            let sys = self.system()?;
            let seed = self.stream("build");
            let w = self.weight()?.clone();
            self.build = Some(match build_model(&sys, &w, &self.cfg.build, seed) {
                Ok(b) => Ok(b),
                Err(f) => {
                    out.detail("build_failure", &f);
                    Err(f.error)
                }
            });
        }
        match self.build.as_ref().unwrap() {
            Ok(b) => Ok(Some(b.clone())),
            Err(e) => {
                out.checks.push(CheckRecord::flag("model_build", format!("every stage completes: {e}"), false));
                Ok(None)
            }
        }
    }
}

/// Runs `cmd`, writes `report.json` and the tables into `out_dir` and returns the report.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentReport, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let started = Instant::now();
    let mut ctx = Context { cfg, weight: None, build: None };
    let mut out = Outcome::default();
    let steps: &[Command] = match cmd {
        Command::All => &[
            Command::Weights,
            Command::Norms,
            Command::Jrt,
            Command::Tower,
            Command::Build,
            Command::Support,
            Command::Orbit,
            Command::Feldman,
            Command::Continuous,
        ],
        _ => std::slice::from_ref(&cmd),
    };
    for step in steps {
        match step {
            Command::Weights => weights(&mut ctx, &mut out)?,
            Command::Norms => norms(&mut ctx, &mut out)?,
            Command::Jrt => jrt(&ctx, &mut out)?,
            Command::Tower => tower(&ctx, &mut out)?,
            Command::Build => build(&mut ctx, &mut out)?,
            Command::Support => support(&mut ctx, &mut out)?,
            Command::Orbit => orbit(&mut ctx, &mut out)?,
            Command::Feldman => feldman(&ctx, &mut out)?,
            Command::Continuous => continuous(&ctx, &mut out)?,
            Command::All => unreachable!(),
        }
    }

    let config_json = serde_json::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let report = ExperimentReport {
        metadata: Metadata {
            command: cmd.name().into(),
            config_hash: config_hash(&config_json),
            seed: cfg.seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_ms: started.elapsed().as_millis() as u64,
        },
        pass: out.checks.iter().all(|c| c.pass),
        checks: out.checks,
        details: out.details,
    };
    for t in &out.tables {
        t.write(out_dir)?;
    }
    for (name, value) in &out.json {
        write_json(out_dir, name, value)?;
    }
    write_json(out_dir, "report.json", &report)?;
    Ok(report)
}

fn weights(ctx: &mut Context, out: &mut Outcome) -> Result<(), CliError> {
    let max_len = ctx.cfg.ratios.max_len;
    let w = ctx.weight()?;
    let spec = w.spec;
    let mut table = Table::new("weights", &["element", "weight"]);
    for (g, v) in w.rows() {
        table.push(vec![g, v.to_string()]);
    }
    out.tables.push(table);
    let total = w.total_mass();
    let defect = (total + w.tail_bound - 1.0).abs();
    out.checks.push(CheckRecord::new("weight_mass", "Σ_g w(g) + q^Nmax = 1", 1e-9, defect, defect <= 1e-9));
    out.detail("weights", &json!({"support": w.len(), "total_mass": total, "tail_bound": w.tail_bound, "params": w.params}));

    if !spec.is_finitely_generated() {
        return Ok(());
    }
    if max_len > LOOKAHEAD || max_len > w.params.n_max {
        return Err(CliError::Config(format!("ratios.max_len must be at most {} and n_max", LOOKAHEAD)));
    }
    let mut table = Table::new(
        "ratios",
        &["b", "length", "bound", "observed_max", "observed_min", "raw_max", "raw_min", "domain_size", "violations", "pass"],
    );
    let mut reports = Vec::new();
    for b in spec.ball(max_len)?.into_iter().filter(|b| !spec.is_identity(b)) {
        let r = weight_ratio(&spec, w, &b)?;
        table.push(vec![
            r.b.clone(),
            r.word_length.to_string(),
            r.bound.to_string(),
            r.observed_max.to_string(),
            r.observed_min.to_string(),
            r.raw_max.to_string(),
            r.raw_min.to_string(),
            r.domain_size.to_string(),
            r.violations.to_string(),
            r.pass.to_string(),
        ]);
        reports.push(r);
    }
    for len in 1..=max_len {
        let at: Vec<_> = reports.iter().filter(|r| r.word_length == len).collect();
        let bound = at[0].bound;
        let worst = at.iter().map(|r| r.observed_max.max(1.0 / r.observed_min)).fold(0.0, f64::max);
        let violations: usize = at.iter().map(|r| r.violations).sum();
        out.checks.push(CheckRecord::new(
            format!("weight_ratio[|b|={len}]"),
            "1/M_b ≤ w(gb)/w(g) ≤ M_b, M_b = ((2d+1)C)^|b|, on the interior domain",
            bound,
            worst,
            violations == 0,
        ));
    }
    out.tables.push(table);
    Ok(())
}

fn norms(ctx: &mut Context, out: &mut Outcome) -> Result<(), CliError> {
    let trials = ctx.cfg.norms.trials;
    let seed = ctx.stream("norms");
    let w = ctx.weight()?;
    let spec = w.spec;
    if !spec.is_finitely_generated() {
        return Err(CliError::Config("operator norms need a finitely generated group".into()));
    }
    let mut table = Table::new(
        "norms",
        &["generator", "bound", "observed", "observed_random", "observed_single_atom", "raw_observed", "domain_size", "violations"],
    );
    let mut certs = Vec::new();
    for a in spec.generators()? {
        let c = operator_norm_certificate(&spec, w, &a, trials, seed)?;
        table.push(vec![
            c.generator.clone(),
            c.bound.to_string(),
            c.observed.to_string(),
            c.observed_random.to_string(),
            c.observed_single_atom.to_string(),
            c.raw_observed.to_string(),
            c.domain_size.to_string(),
            c.violations.to_string(),
        ]);
        out.checks.push(CheckRecord::new(
            format!("operator_norm[{}]", c.generator),
            "‖S_a ξ‖ ≤ √((2d+1)C) ‖ξ‖ for random and single-atom ξ",
            c.bound,
            c.observed,
            c.pass,
        ));
        certs.push(c);
    }
    out.tables.push(table);
    out.detail("norms", &certs);
    Ok(())
}

fn jrt(ctx: &Context, out: &mut Outcome) -> Result<(), CliError> {
    let cfg = &ctx.cfg.jrt;
    let spec = ctx.cfg.group;
    if matches!(spec, GroupSpec::Integers | GroupSpec::Lattice { .. }) {
        let sys = DynamicalSystem::new(spec, SystemKind::Rotation { alpha: ctx.cfg.rotation_alpha() }, ctx.stream("jrt/rotation"))?;
        let r = jrt_convergence_report(&sys, &Observable::Cos { coord: 0 }, cfg.rotation_steps, cfg.samples, ctx.stream("jrt/rotation"), cfg.rotation_tolerance)?;
        let worst = r.rows.iter().filter_map(|row| Some((row.ratio? - row.expected_ratio?).abs() / row.expected_ratio?)).fold(0.0, f64::max);
        out.checks.push(CheckRecord::new(
            "jrt_rotation_decay",
            "|ratio_n − λ| ≤ 5% λ per step, λ = |(1 + 2cos 2πα_1 + 2(d−1))/(2d+1)|",
            RATIO_TOLERANCE,
            worst,
            r.rows.iter().all(|row| row.ok),
        ));
        out.checks.push(CheckRecord::new(
            "jrt_rotation_limit",
            "A_ρⁿ cos = λⁿ cos pointwise, contraction, and ‖A_ρⁿ f − ∫f‖ ≤ tolerance at the last step",
            cfg.rotation_tolerance,
            r.final_deviation,
            r.pass,
        ));
        let mut table = Table::new("jrt_rotation", &["n", "l2_deviation", "sup_deviation", "ratio", "expected_ratio", "ok"]);
        for row in &r.rows[1..] {
            table.push(vec![
                row.n.to_string(),
                row.l2_deviation.to_string(),
                row.sup_deviation.to_string(),
                cell(row.ratio),
                cell(row.expected_ratio),
                row.ok.to_string(),
            ]);
        }
        out.tables.push(table);
        out.detail("jrt_rotation", &summary(&r));
    }

    let sys = DynamicalSystem::bernoulli(spec, ctx.stream("jrt/bernoulli"));
    let f = Observable::Indicator { set: SetDescriptor::Cylinder(BTreeMap::from([(spec.identity(), true)])) };
    let r = jrt_convergence_report(&sys, &f, cfg.bernoulli_steps, cfg.samples, ctx.stream("jrt/bernoulli"), cfg.bernoulli_tolerance)?;
    let z = |row: &orbitrep::markov::JrtRow| row.expected_mean_sq.map(|e| (row.mean_sq - e).abs() / row.mean_sq_se.max(f64::MIN_POSITIVE));
    let worst = r.rows.iter().filter_map(z).fold(0.0, f64::max);
    out.checks.push(CheckRecord::new(
        "jrt_bernoulli_variance",
        "E|A_ρⁿ 1_C − ½|² = ¼ Σ_g ρ*ⁿ(g)² within 4 standard errors",
        SE_TOLERANCE,
        worst,
        r.rows.iter().all(|row| row.ok),
    ));
    out.checks.push(CheckRecord::new(
        "jrt_bernoulli_limit",
        "positivity, contraction, monotone decay and ‖A_ρⁿ f − ∫f‖ ≤ tolerance at the last step",
        cfg.bernoulli_tolerance,
        r.final_deviation,
        r.pass,
    ));
    let mut table = Table::new("jrt_bernoulli", &["n", "mean_sq", "mean_sq_se", "expected_mean_sq", "z", "l2_deviation", "ok"]);
    for row in &r.rows[1..] {
        table.push(vec![
            row.n.to_string(),
            row.mean_sq.to_string(),
            row.mean_sq_se.to_string(),
            cell(row.expected_mean_sq),
            cell(z(row)),
            row.l2_deviation.to_string(),
            row.ok.to_string(),
        ]);
    }
    out.tables.push(table);
    out.detail("jrt_bernoulli", &summary(&r));
    Ok(())
}

fn summary(r: &JrtReport) -> Value {
    json!({
        "observable": r.observable,
        "samples": r.samples,
        "aperiodicity_witness": r.aperiodicity_witness,
        "closed_form_max_error": r.closed_form_max_error,
        "contraction": r.contraction,
        "positivity": r.positivity,
        "monotone": r.monotone,
        "final_deviation": r.final_deviation,
        "pass": r.pass,
    })
}

fn tower(ctx: &Context, out: &mut Outcome) -> Result<(), CliError> {
    let cfg = &ctx.cfg.tower;
    let sys = ctx.system()?;
    let opts = TowerOptions {
        marker_len: cfg.marker_len,
        planted_samples: cfg.planted_samples,
        direct_samples: cfg.direct_samples,
        within: None,
        pattern_seed: None,
    };
    let t = rokhlin_tower(&sys, cfg.height, cfg.eta, 0, &opts)?;
    out.checks.push(CheckRecord::new("tower_collisions", "translates gE, g ∈ B_N, are pairwise disjoint on every sample", 0.0, t.collisions as f64, t.collisions == 0));
    out.checks.push(
        CheckRecord::new("tower_measure", "μ(B_N E) < η/2 (95% upper bound)", cfg.eta / 2.0, t.mu_bne.estimate, t.mu_bne.upper < cfg.eta / 2.0)
            .with_ci(t.mu_bne.lower, t.mu_bne.upper),
    );
    out.checks.push(
        CheckRecord::new("tower_base_positive", "μ(E) > 0 (95% lower bound)", 0.0, t.mu_e.estimate, t.mu_e.lower > 0.0)
            .with_ci(t.mu_e.lower, t.mu_e.upper),
    );
    out.detail("tower", &t);
    Ok(())
}

fn build(ctx: &mut Context, out: &mut Outcome) -> Result<(), CliError> {
    let Some(b) = ctx.build(out)? else { return Ok(()) };
    let mut table = Table::new(
        "stages",
        &["stage", "eta", "ball_index", "ball_radius", "tower_height", "marker_len", "offset", "epsilon", "beta", "gamma", "delta", "fourth_moment_upper", "pass"],
    );
    for r in &b.history {
        let k = r.stage;
        let c = &r.checks;
        let margin = c
            .separation
            .iter()
            .map(|s| s.gap - s.required)
            .chain(c.covers.iter().map(|s| s.separation - s.required))
            .fold(f64::INFINITY, f64::min);
        let exact = c.range_samples_in_alphabet
            && c.separation.iter().all(|s| s.pass)
            && c.covers.iter().all(|s| s.pass)
            && c.hits.iter().all(|h| h.nested);
        out.checks.push(CheckRecord::new(
            format!("stage{k}.separation"),
            "value sets lie in the grid alphabet, gaps exceed the cover widths, covers and hitting events nest",
            0.0,
            margin,
            exact,
        ));
        for e in &c.exceptions {
            out.checks.push(
                CheckRecord::new(format!("stage{k}.exceptions[{}]", e.level), "μ(f_n⁻¹(V̂_{i,0}) △ A_i) < γ_i (95% upper bound)", e.budget, e.exceptions.estimate, e.pass)
                    .with_ci(e.exceptions.lower, e.exceptions.upper),
            );
        }
        for h in &c.hits {
            out.checks.push(
                CheckRecord::new(format!("stage{k}.hits[{}]", h.level), "μ{φ_{f_n} ∈ U_i} ≥ δ_i (95% lower bound)", h.required, h.measure.estimate, h.pass)
                    .with_ci(h.measure.lower, h.measure.upper),
            );
        }
        let fm = &c.fourth_moment;
        out.checks.push(CheckRecord::new(format!("stage{k}.fourth_moment"), "‖f_n‖₄ < 1 (95% upper bound)", 1.0, fm.norm_upper, fm.pass && fm.norm_upper < 1.0));
        out.checks.push(CheckRecord::flag(format!("stage{k}.tower"), "the stage tower is disjoint with small measure", r.tower.pass));
        out.checks.push(CheckRecord::flag(format!("stage{k}.all"), "every recorded check of the stage passes", c.pass));
        let last = |v: &[f64]| v.last().copied();
        table.push(vec![
            k.to_string(),
            r.eta.to_string(),
            r.ball_index.to_string(),
            r.ball.radius.to_string(),
            r.tower_height.to_string(),
            r.tower.marker_len.to_string(),
            r.offset.to_string(),
            cell(last(&r.budgets.epsilon)),
            cell(last(&r.budgets.beta)),
            cell(last(&r.budgets.gamma)),
            cell(last(&r.budgets.delta)),
            fm.norm_upper.to_string(),
            c.pass.to_string(),
        ]);
    }
    out.tables.push(table);
    out.json.push(("model.json".into(), serde_json::to_value(&b).expect("serializable")));
    out.detail("build", &json!({"stages": b.history.len(), "budgets": b.budgets(), "pass": b.pass()}));
    Ok(())
}

fn support(ctx: &mut Context, out: &mut Outcome) -> Result<(), CliError> {
    let Some(b) = ctx.build(out)? else { return Ok(()) };
    let cfg = &ctx.cfg.support;
    let sys = ctx.system()?;
    let w = ctx.weight()?;
    let spec = sys.group;
    let mut reports = Vec::new();
    for h in spec.ball(cfg.equivariance_radius)? {
        let r = equivariance_check(&b.model, &sys, w, cfg.equivariance_samples, &h, cfg.truncation)?;
        out.checks.push(CheckRecord::new(
            format!("equivariance[{h}]"),
            "φ_f(T_h x) = S_h φ_f(x) coefficientwise and bit for bit on B_{N−|h|}",
            0.0,
            r.mismatches as f64,
            r.pass,
        ));
        reports.push(r);
    }
    out.detail("equivariance", &reports);

    let r = support_and_iso_check(&b, &sys, w, cfg.samples)?;
    for h in &r.hits {
        let lower = h.lower_bound.lower * h.lower_bound_scale;
        out.checks.push(
            CheckRecord::new(format!("ball_hit[{}]", h.level), "μ{φ_f ∈ U_i} ≥ δ_i (95% lower bound)", h.delta, h.lower_bound.estimate * h.lower_bound_scale, h.pass)
                .with_ci(lower, h.lower_bound.upper * h.lower_bound_scale),
        );
    }
    for s in &r.sets {
        out.checks.push(
            CheckRecord::new(
                format!("set_approximation[{}]", s.level),
                "μ(f⁻¹(V̂_{i,0}) △ A_i) < γ_i (95% upper bound) with disjoint covers",
                s.gamma,
                s.symmetric_difference.estimate,
                s.pass,
            )
            .with_ci(s.symmetric_difference.lower, s.symmetric_difference.upper),
        );
    }
    out.detail("support", &r);
    Ok(())
}

fn orbit(ctx: &mut Context, out: &mut Outcome) -> Result<(), CliError> {
    let Some(b) = ctx.build(out)? else { return Ok(()) };
    let cfg = &ctx.cfg.orbit;
    let sys = ctx.system()?;
    let w = ctx.weight()?;
    let stage = &b.history[cfg.ball_stage - 1];
    let (ball, n_trunc) = (&stage.ball, stage.tower_height);
    let a = sys.group.positive_generators()?[0].clone();

    let x = sys.sample_in_stream("orbit", 0, BTreeMap::new());
    let series = model_orbit_series(&b.model, &x, &a, ball, n_trunc, cfg.steps, w)?;
    let freq = orbit_tally(&series);

    let hits: Vec<Membership> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|draw| {
            let y = sys.sample_in_stream("orbit/measure", draw, BTreeMap::new());
            ball_membership(&phi(&b.model, &y, n_trunc, w), ball, w).0
        })
        .collect();
    let measure = Proportion::wilson(hits.iter().filter(|m| **m == Membership::Inside).count() as u64, cfg.samples as u64);

    let p = freq.frequency;
    out.checks.push(
        CheckRecord::new(format!("orbit_frequency[U_{}]", cfg.ball_stage), "lower density of visits of S_aⁿ φ_f(x) to U is positive (95% lower bound)", 0.0, p.estimate, p.lower > 0.0)
            .with_ci(p.lower, p.upper),
    );
    let consistent = p.lower <= measure.upper && measure.lower <= p.upper;
    out.checks.push(
        CheckRecord::new(
            format!("orbit_measure_consistency[U_{}]", cfg.ball_stage),
            "visit frequency and μ{φ_f ∈ U} have overlapping 95% intervals",
            p.estimate,
            measure.estimate,
            consistent,
        )
        .with_ci(measure.lower, measure.upper),
    );

    let mut table = Table::new("orbit", &["step", "visits", "indeterminate", "frequency", "lower", "upper"]);
    let every = (cfg.steps / cfg.checkpoints).max(1);
    let mut points: Vec<usize> = (1..=cfg.checkpoints).map(|i| (i * every).min(cfg.steps)).collect();
    points.dedup();
    if points.last() != Some(&cfg.steps) {
        points.push(cfg.steps);
    }
    for n in points {
        let t = orbit_tally(&series[..n]);
        table.push(vec![
            n.to_string(),
            t.visits.to_string(),
            t.indeterminate.to_string(),
            t.frequency.estimate.to_string(),
            t.frequency.lower.to_string(),
            t.frequency.upper.to_string(),
        ]);
    }
    out.tables.push(table);
    out.detail("orbit", &json!({"generator": a.to_string(), "ball": ball, "truncation": n_trunc, "frequency": freq, "measure": measure}));
    Ok(())
}

fn feldman(ctx: &Context, out: &mut Outcome) -> Result<(), CliError> {
    let cfg = &ctx.cfg.feldman;
    let r = feldman_baseline(cfg.alpha, cfg.points, cfg.steps, ctx.stream("feldman"))?;
    out.checks.push(CheckRecord::new("feldman_conjugacy", "φ(f z) = B φ(z) coordinatewise", r.tolerance, r.max_error, r.max_error < r.tolerance));
    out.checks.push(CheckRecord::new("feldman_norm", "‖φ(z)‖² = (1 − 4^{−n})/3 on the first n blocks", r.tolerance, r.norm_sq_error, r.pass));
    out.detail("feldman", &r);
    Ok(())
}

fn continuous(ctx: &Context, out: &mut Outcome) -> Result<(), CliError> {
    let cfg = &ctx.cfg.continuous;
    let c = WeightParams::new(cfg.chain_q, cfg.chain_levels)?.ratio_constant();
    let r = domination_constant_real(cfg.k_half, cfg.grid_step, &cfg.shifts, c)?;
    out.checks.push(CheckRecord::new("real_psi_quadrature", "quadrature of ψ = 𝟙_L * 𝟙_L matches max(0, 2ℓ − |t|)", 1e-6, r.quadrature_error, r.quadrature_error < 1e-6));
    // L = [−2k, 2k] gives ψ(t) = 4k − |t|, so the minimum over |t| ≤ 3k is k
    let u_closed = cfg.k_half;
    out.checks.push(CheckRecord::new("real_u", "u = min_{KL} ψ = 4k − 3k", u_closed, r.u, (r.u - u_closed).abs() <= 1e-12 * u_closed));
    out.checks.push(CheckRecord::new("real_d", "D = 2/u", 2.0 / r.u, r.d, r.d == 2.0 / r.u));
    out.checks.push(CheckRecord::new("real_domination", "𝟙_L(t − k) ≤ D ψ(t) on the grid for every shift k", 0.0, r.violations as f64, r.violations == 0));
    out.detail("real_line", &r);

    let chain = LocallyFiniteChain::new(WeightParams::new(cfg.chain_q, cfg.chain_levels)?)?;
    let mut rng = seed::rng(ctx.cfg.seed, "continuous/g0", 0);
    let g0s: Vec<GroupElement> = (0..cfg.g0_samples).map(|_| LocallyFiniteChain::element(rng.random_range(0..chain.size()))).collect();
    let cr = chain_report(&chain, &g0s)?;
    out.checks.push(CheckRecord::new("chain_haar_identity", "λ_i * λ_j = λ_{max(i,j)} exhaustively", 0.0, cr.haar_identity_max_error, cr.haar_identity_max_error == 0.0));
    out.checks.push(CheckRecord::new("chain_lower_bound", "ρ * ρ ≥ p_1 Σ_k p_k λ_k pointwise", 0.0, cr.lower_chain_violations as f64, cr.lower_chain_violations == 0));
    let mut table = Table::new("chain", &["g0", "m0", "c_g0", "max_ratio", "argmax", "violations", "corrected_c_g0", "corrected_violations"]);
    for d in &cr.checks {
        out.checks.push(CheckRecord::new(
            format!("chain_domination[{}]", d.g0),
            "ρ * δ_{g0} ≤ C_{g0} (ρ * ρ) on K_n with C_{g0} = 1/p_1 + [K_{m0}:K_1]",
            d.c_g0,
            d.max_ratio,
            d.pass,
        ));
        out.checks.push(CheckRecord::new(
            format!("chain_domination_corrected[{}]", d.g0),
            "ρ * δ_{g0} ≤ C'_{g0} (ρ * ρ) with C' = 1/p_1 + [K_{m0}:K_1] (Σ_{n<m0} p_n)/((Σ_{i≤m0} p_i) p_{m0})",
            d.corrected_c_g0,
            d.max_ratio,
            d.corrected_pass,
        ));
        table.push(vec![
            d.g0.clone(),
            d.m0.to_string(),
            d.c_g0.to_string(),
            d.max_ratio.to_string(),
            d.argmax.clone(),
            d.violations.to_string(),
            d.corrected_c_g0.to_string(),
            d.corrected_violations.to_string(),
        ]);
    }
    out.tables.push(table);
    out.detail("chain", &cr);
    Ok(())
}
