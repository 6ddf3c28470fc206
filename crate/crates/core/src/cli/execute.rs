use serde_json::json;

use super::scenario::*;
use super::table::{estimates_table, Cell, Output, Table};
use crate::error::{Error, Result};
use crate::impulse::{
    perturbed_policies, qvi_residual, solve_benchmark_qvi, synthesize_policy, verify_value, BenchmarkParams, ImpulsePolicy,
    ImpulseProblem, QVIReport, VerifyOptions, ZSearch, RESIDUAL_TOL,
};
use crate::pattern::{
    automaton_expected_time, expected_time_iid_with, expected_time_markov_with, race_automaton, race_solve,
    simulate_pattern_race, AutomatonStart, Pattern, Source,
};
use crate::renewal::{blackwell_check, delayed_renewal_stats, estimate_mean_process, reward_rate_check, wald_check};
use crate::rng::derive_stream;
use crate::sde::{simulate_jump_diffusion, JumpDiffusionSpec, ScalarField};
use crate::stats::{replicate, EstimateWithCI};

type Rows = Vec<(String, EstimateWithCI)>;

/// Run a parsed scenario on the current rayon pool.
pub fn execute_scenario(scenario: &Scenario) -> Result<Output> {
    let seed = scenario.seed;
    match &scenario.parameters {
        Parameters::Simulate(p) => simulate(p, seed),
        Parameters::RenewalCheck(p) => renewal(p, seed),
        Parameters::PatternExpect(p) => pattern_expect(p, seed),
        Parameters::PatternRace(p) => pattern_race(p, seed),
        Parameters::ImpulseSolve(p) => impulse_solve(&p.benchmark),
        Parameters::ImpulseVerify(p) => impulse_verify(p, seed),
    }
}

fn simulate(p: &SimulateParams, seed: u64) -> Result<Output> {
    let mut spec = JumpDiffusionSpec::linear(p.a, p.sigma);
    if let Some(j) = &p.jumps {
        spec = spec.with_additive_jumps(j.intensity, j.marks.clone())?.compensated(j.compensated);
    }
    let base = derive_stream(seed, 0);
    let path = simulate_jump_diffusion(&spec, p.x0, p.horizon, p.dt, &base.child(0))?;
    let mut jump = vec![false; path.len()];
    let mut impulse = vec![0.0; path.len()];
    let mut intervened = vec![false; path.len()];
    for j in &path.jumps {
        jump[j.index] = true;
    }
    for i in &path.interventions {
        intervened[i.index] = true;
        impulse[i.index] += i.impulse;
    }
    let mut t = Table::new("path", &["t", "x", "jump_flag", "intervention_flag", "impulse"]);
    for k in 0..path.len() {
        t.push(vec![
            Cell::Float(path.times[k]),
            Cell::Float(path.states[k]),
            Cell::Int(jump[k] as u64),
            Cell::Int(intervened[k] as u64),
            Cell::Float(impulse[k]),
        ]);
    }
    let mut out = Output { tables: vec![t], ..Default::default() };
    if p.n_paths >= 2 {
        let finals = replicate(&base, p.n_paths, |_, s| Ok(simulate_jump_diffusion(&spec, p.x0, p.horizon, p.dt, s)?.final_state()))?;
        let squares: Vec<f64> = finals.iter().map(|x| x * x).collect();
        out.tables.push(estimates_table(&[
            ("final_state_mean".into(), EstimateWithCI::from_samples(&finals)),
            ("final_state_second_moment".into(), EstimateWithCI::from_samples(&squares)),
        ]));
    }
    Ok(out)
}

fn renewal(p: &RenewalParams, seed: u64) -> Result<Output> {
    let mut rows: Rows = Vec::new();
    let exact = |name: &str, v: f64| (name.to_string(), EstimateWithCI::exact(v));
    for (k, check) in p.checks.iter().enumerate() {
        let stream = derive_stream(seed, k as u64 + 1);
        match check {
            RenewalCheckKind::Elementary => {
                let m = estimate_mean_process(&p.renewal, p.t, p.n_paths, &stream)?;
                rows.push(("elementary".into(), m.scaled(1.0 / p.t)));
                rows.push(exact("elementary_limit", 1.0 / p.renewal.mu()?));
            }
            RenewalCheckKind::Blackwell => {
                let c = blackwell_check(&p.renewal, p.t, p.a, p.mode, p.n_paths, &stream)?;
                let name = format!("blackwell_{}", serde_json::to_value(p.mode).expect("mode serialises").as_str().unwrap_or("mode"));
                rows.push((name.clone(), c.estimate));
                rows.push(exact(&format!("{name}_limit"), c.limit));
            }
            RenewalCheckKind::RewardRate => {
                let c = reward_rate_check(&p.renewal, p.t, p.n_paths, &stream)?;
                rows.push(("reward_rate".into(), c.estimate));
                rows.push(exact("reward_rate_limit", c.limit));
            }
            RenewalCheckKind::Wald => {
                let (lhs, rhs) = wald_check(&p.renewal, p.t, p.n_paths, &stream)?;
                rows.push(("wald_lhs".into(), lhs));
                rows.push(("wald_rhs".into(), rhs));
            }
            RenewalCheckKind::Delayed => {
                let d = delayed_renewal_stats(&p.renewal, p.t, p.n_paths, &stream)?;
                rows.push(("delayed_mean_process".into(), d.mean_process));
                rows.push(("delayed_age".into(), d.age));
                rows.push(exact("delayed_age_limit", d.age_limit));
            }
        }
    }
    Ok(Output { tables: vec![estimates_table(&rows)], ..Default::default() })
}

fn closed_form(pattern: &Pattern, source: &Source, p: &PatternExpectParams) -> Result<f64> {
    match source {
        Source::Iid(probs) => expected_time_iid_with(pattern, probs, p.overlap_mode),
        Source::Markov { chain, initial } => expected_time_markov_with(pattern, chain, *initial, p.overlap_mode),
    }
}

fn pattern_expect(p: &PatternExpectParams, seed: u64) -> Result<Output> {
    let source = p.source.build()?;
    let pattern = p.pattern.build(p.alphabet.as_deref())?;
    pattern.check_alphabet(source.alphabet())?;
    let value = if p.closed_form {
        closed_form(&pattern, &source, p)?
    } else {
        automaton_expected_time(&pattern, &source, AutomatonStart::Fresh)?
    };
    let mut rows: Rows = vec![("expected_time".into(), EstimateWithCI::exact(value))];
    if p.trials > 0 {
        let e = simulate_pattern_race(&[pattern], &source, p.trials, p.step_cap, &derive_stream(seed, 0))?;
        rows.push(("expected_time_mc".into(), e.min_time));
        rows.push(("truncated_trials".into(), EstimateWithCI { value: e.truncated as f64, stderr: 0.0, n: p.trials }));
    }
    Ok(Output { tables: vec![estimates_table(&rows)], ..Default::default() })
}

fn pattern_race(p: &PatternRaceParams, seed: u64) -> Result<Output> {
    let source = p.source.build()?;
    let patterns: Vec<Pattern> = p.patterns.iter().map(|q| q.build(p.alphabet.as_deref())).collect::<Result<_>>()?;
    let solved = race_solve(&patterns, &source)?;
    let oracle = race_automaton(&patterns, &source)?;
    let mut rows: Rows = Vec::new();
    for (suffix, r) in [("", &solved), ("_automaton", &oracle)] {
        for (i, q) in r.probabilities.iter().enumerate() {
            rows.push((format!("P_{}{suffix}", i + 1), EstimateWithCI::exact(*q)));
        }
        rows.push((format!("E_T_min{suffix}"), EstimateWithCI::exact(r.expected_min_time)));
    }
    if p.trials > 0 {
        let e = simulate_pattern_race(&patterns, &source, p.trials, p.step_cap, &derive_stream(seed, 0))?;
        for (i, q) in e.probabilities.iter().enumerate() {
            rows.push((format!("P_{}_mc", i + 1), *q));
        }
        rows.push(("E_T_min_mc".into(), e.min_time));
        rows.push(("truncated_trials".into(), EstimateWithCI { value: e.truncated as f64, stderr: 0.0, n: p.trials }));
    }
    Ok(Output { tables: vec![estimates_table(&rows)], ..Default::default() })
}

struct Solved {
    problem: ImpulseProblem,
    value: crate::impulse::CandidateValue,
    report: QVIReport,
    policy: ImpulsePolicy,
    sweeps: usize,
    residual: f64,
}

fn solve(b: &BenchmarkParams) -> Result<Solved> {
    let sol = solve_benchmark_qvi(b)?;
    let problem = b.problem()?;
    let search = ZSearch::over(-b.half_width, b.half_width);
    let report = qvi_residual(&problem, &sol.value, &search)?;
    let policy = synthesize_policy(&problem, &sol.value, &search)?;
    Ok(Solved { problem, value: sol.value, report, policy, sweeps: sol.sweeps, residual: sol.residual })
}

/// Ends of the continuation interval containing 0.
fn band(policy: &ImpulsePolicy) -> (f64, f64) {
    policy
        .continuation
        .iter()
        .find(|i| i.contains(0.0))
        .map(|i| (i.lo.unwrap_or(f64::NEG_INFINITY), i.hi.unwrap_or(f64::INFINITY)))
        .unwrap_or((f64::NAN, f64::NAN))
}

fn qvi_table(r: &QVIReport) -> Table {
    let mut t = Table::new("qvi", &["x", "L_phi_plus_l", "phi_minus_Mphi", "region"]);
    for i in 0..r.x.len() {
        t.push(vec![
            Cell::Float(r.x[i]),
            Cell::Float(r.l_phi_plus_l[i]),
            Cell::Float(r.phi_minus_m_phi[i]),
            Cell::Text(r.region[i].as_str().into()),
        ]);
    }
    t
}

fn impulse_solve(b: &BenchmarkParams) -> Result<Output> {
    let s = solve(b)?;
    let (lo, hi) = band(&s.policy);
    let exact = |name: &str, v: f64| (name.to_string(), EstimateWithCI::exact(v));
    let rows = vec![
        exact("sweeps", s.sweeps as f64),
        exact("discrete_residual", s.residual),
        exact("qvi_sup_norm", s.report.sup_norm),
        exact("phi_0", s.value.value(0.0, 0.0)),
        exact("band_lo", lo),
        exact("band_hi", hi),
    ];
    let mut value = Table::new("value", &["x", "psi"]);
    for (x, v) in s.value.nodes().iter().zip(s.value.psi.values()) {
        value.push(vec![Cell::Float(*x), Cell::Float(*v)]);
    }
    let policy = serde_json::to_value(&s.policy).map_err(|e| Error::numerical(e.to_string()))?;
    Ok(Output {
        tables: vec![estimates_table(&rows), qvi_table(&s.report), value],
        documents: vec![("policy".into(), json!({ "residual_form": s.report.residual_form, "policy": policy }))],
        ..Default::default()
    })
}

fn impulse_verify(p: &ImpulseVerifyParams, seed: u64) -> Result<Output> {
    let s = solve(&p.benchmark)?;
    if s.report.sup_norm > RESIDUAL_TOL {
        return Err(Error::numerical(format!("QVI residual {} exceeds {RESIDUAL_TOL}", s.report.sup_norm)));
    }
    let (lo, hi) = band(&s.policy);
    let y0s = p.y0.clone().unwrap_or_else(|| vec![0.0, lo, hi]);
    let alternatives = if p.alternatives { perturbed_policies(&s.policy)? } else { Vec::new() };
    let options = VerifyOptions { n_paths: p.n_paths, dt: p.dt, allowance: p.allowance };
    let mut t = Table::new("verification", &["label", "y0", "phi", "j_hat", "stderr", "bound", "tail_bound", "pass"]);
    let mut warnings = Vec::new();
    for (k, &y0) in y0s.iter().enumerate() {
        let report = verify_value(&s.problem, &s.value, &s.policy, y0, &alternatives, &options, &derive_stream(seed, k as u64))?;
        for r in report.rows {
            if !r.pass {
                warnings.push(format!("verification failed: {} at y0 = {}: phi = {}, J = {} (stderr {})", r.label, r.y0, r.phi, r.j_hat, r.stderr));
            }
            t.push(vec![
                Cell::Text(r.label),
                Cell::Float(r.y0),
                Cell::Float(r.phi),
                Cell::Float(r.j_hat),
                Cell::Float(r.stderr),
                Cell::Float(r.bound),
                Cell::Float(r.tail_bound),
                Cell::Bool(r.pass),
            ]);
        }
    }
    Ok(Output { tables: vec![t], warnings, ..Default::default() })
}
