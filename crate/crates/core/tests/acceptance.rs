//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::fmt::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use stochsynth::error::{Error, Result};
use stochsynth::impulse::{
    intervention_operator, perturbed_policies, qvi_residual, solve_benchmark_qvi, synthesize_policy, verify_value,
    BenchmarkParams, VerifyOptions, ZSearch,
};
use stochsynth::pattern::{
    automaton_expected_time, conditional_expected_time, conditioning_system, expected_time_iid, expected_time_iid_with,
    expected_time_markov, race_automaton, race_solve, run_race_probability, simulate_pattern_race,
    two_pattern_closed_form, AutomatonStart, MarkovChain, OverlapMode, Pattern, Source, DEFAULT_STEP_CAP,
};
use stochsynth::renewal::{
    blackwell_check, delayed_renewal_stats, estimate_mean_process, last_renewal_cdf, last_renewal_samples,
    regenerative_occupancy, reward_rate_check, solve_renewal_equation, BlackwellMode, Dist, Phase, RegenerativeSpec,
    RenewalSpec,
};
use stochsynth::rng::{derive_stream, RandomStream};
use stochsynth::sde::{
    dynkin_residual, ito_residual, simulate_jump_diffusion, JumpDiffusionSpec, MarkDistribution, Polynomial,
};
use stochsynth::stats::EstimateWithCI;

/// Checks within one criterion; the criterion passes when all of them do.
#[derive(Default)]
struct Log {
    ok: bool,
    lines: String,
}

impl Log {
    fn new() -> Self {
        Self { ok: true, lines: String::new() }
    }

    fn check(&mut self, pass: bool, what: impl AsRef<str>) {
        self.ok &= pass;
        let _ = writeln!(self.lines, "    [{}] {}", if pass { "ok" } else { "FAILED" }, what.as_ref());
    }

    fn note(&mut self, what: impl AsRef<str>) {
        let _ = writeln!(self.lines, "    {}", what.as_ref());
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn mc_line(name: &str, e: &EstimateWithCI, target: f64, k: f64) -> (bool, String) {
    let pass = e.within(target, k, 0.0);
    (pass, format!("{name}: {:.6} ± {:.2e} vs {target:.6} ({:.2} SE)", e.value, e.stderr, (e.value - target) / e.stderr))
}

fn criterion_1(log: &mut Log) -> Result<()> {
    let mut worst: f64 = 0.0;
    for p in [0.3f64, 0.5, 0.7] {
        let probs = [1.0 - p, p];
        let pq = p * (1.0 - p);
        for n in 1..=6usize {
            let success: f64 = (1..=n as i32).map(|j| pq.powi(-j)).sum();
            let got = expected_time_iid_with(&Pattern::alternating(n), &probs, OverlapMode::Iterated)?;
            worst = worst.max(rel(got, success));
            let failure = pq.powi(-(n as i32));
            let got = expected_time_iid(&Pattern::runs(n, n), &probs)?;
            worst = worst.max(rel(got, failure));
        }
    }
    log.check(worst <= 1e-12, format!("(1,0)^n and 1^m 0^m, n,m ≤ 6, p ∈ {{0.3,0.5,0.7}}: max relative error {worst:.2e} (tol 1e-12)"));
    Ok(())
}

fn criterion_2(log: &mut Log) -> Result<()> {
    let sym = (1..=6).all(|n| run_race_probability(n, n, 0.5).map(|v| v == 0.5).unwrap_or(false));
    log.check(sym, "run_race_probability(n, n, 1/2) == 1/2 exactly for n ≤ 6");
    let v = run_race_probability(2, 3, 0.5)?;
    log.check((v - 0.7).abs() <= 1e-12, format!("run_race_probability(2, 3, 1/2) = {v:.16} (0.7 ± 1e-12)"));
    let pats = [Pattern::runs(2, 0), Pattern::new(vec![0; 3])?];
    let coin = Source::bernoulli(0.5)?;
    let solved = race_solve(&pats, &coin)?;
    log.check(
        (solved.probabilities[0] - v).abs() <= 1e-12,
        format!("race_solve(11 vs 000) P_1 = {:.16}", solved.probabilities[0]),
    );
    let mc = simulate_pattern_race(&pats, &coin, 1_000_000, DEFAULT_STEP_CAP, &derive_stream(2, 0))?;
    let (pass, line) = mc_line("MC 10^6 trials P_1", &mc.probabilities[0], v, 3.0);
    log.check(pass && mc.truncated == 0, line);
    Ok(())
}

fn criterion_3(log: &mut Log) -> Result<()> {
    let coin = Source::bernoulli(0.5)?;
    let (a1, a2) = (Pattern::alternating(5), Pattern::runs(6, 6));
    let probs = [0.5, 0.5];
    let e1 = expected_time_iid_with(&a1, &probs, OverlapMode::Iterated)?;
    let e2 = expected_time_iid(&a2, &probs)?;
    let e12 = conditional_expected_time(&a1, &a2, &coin)?;
    let e21 = conditional_expected_time(&a2, &a1, &coin)?;
    let p1 = two_pattern_closed_form(e1, e2, e12, e21);
    let target = 4096.0 / 5460.0;
    log.note(format!("E[T_1] = {e1}, E[T_2] = {e2}, E[T_1|2] = {e12}, E[T_2|1] = {e21}"));
    log.check((p1 - target).abs() <= 1e-10, format!("closed-form pipeline P_1 = {p1:.12} vs 4096/5460 = {target:.12}"));
    let pats = [a1, a2];
    let oracle = race_automaton(&pats, &coin)?;
    log.check(
        (oracle.probabilities[0] - p1).abs() <= 1e-10,
        format!("automaton race P_1 = {:.12}", oracle.probabilities[0]),
    );
    let solved = race_solve(&pats, &coin)?;
    log.check((solved.probabilities[0] - p1).abs() <= 1e-10, format!("race_solve P_1 = {:.12}", solved.probabilities[0]));
    let mc = simulate_pattern_race(&pats, &coin, 1_000_000, DEFAULT_STEP_CAP, &derive_stream(3, 0))?;
    let (pass, line) = mc_line("MC 10^6 trials P_1", &mc.probabilities[0], p1, 3.0);
    log.check(pass && mc.truncated == 0, line);
    let c = conditioning_system(5, 6, 0.5)?;
    log.note("comparison with the published conditioning system:");
    log.note(format!("  P_1,10: computed {:.4}, published 0.7895", c.p1_given_10));
    log.note(format!("  P_1,11: computed {:.4}, published 0.7884", c.p1_given_11));
    log.note(format!("  P_1   : computed {:.4}, published 0.7889", c.p1));
    log.note(format!(
        "  DISCREPANCY: the conditioning system gives {:.4}; exact pipelines and MC give {:.4} (difference {:+.4})",
        c.p1,
        p1,
        c.p1 - p1
    ));
    Ok(())
}

fn random_chain(rng: &mut RandomStream, n: usize) -> Result<MarkovChain> {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let w: Vec<f64> = (0..n).map(|_| 0.05 + rng.uniform()).collect();
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        })
        .collect();
    MarkovChain::from_rows(&rows)
}

fn criterion_4(log: &mut Log) -> Result<()> {
    let mut rng = derive_stream(4, 0);
    let (mut cases, mut worst, mut attempts) = (0, 0.0f64, 0);
    while cases < 50 {
        attempts += 1;
        let k = 2 + (rng.uniform() * 3.0) as usize;
        let chain = random_chain(&mut rng, k)?;
        let len = 1 + (rng.uniform() * 7.0) as usize;
        let pattern = Pattern::new((0..len).map(|_| (rng.uniform() * k as f64) as usize % k).collect())?;
        let x0 = (rng.uniform() * k as f64) as usize % k;
        let formula = match expected_time_markov(&pattern, &chain, x0) {
            Err(Error::Hypothesis(_)) => continue,
            other => other?,
        };
        let oracle = automaton_expected_time(&pattern, &Source::markov(chain, x0)?, AutomatonStart::Fresh)?;
        worst = worst.max(rel(formula, oracle));
        cases += 1;
    }
    log.check(worst <= 1e-10, format!("{cases} random cases ({attempts} drawn): max relative error {worst:.2e} (tol 1e-10)"));
    let mut worst_iid: f64 = 0.0;
    for _ in 0..50 {
        let k = 2 + (rng.uniform() * 3.0) as usize;
        let w: Vec<f64> = (0..k).map(|_| 0.05 + rng.uniform()).collect();
        let s: f64 = w.iter().sum();
        let probs: Vec<f64> = w.iter().map(|x| x / s).collect();
        let len = 1 + (rng.uniform() * 7.0) as usize;
        let pattern = Pattern::new((0..len).map(|_| (rng.uniform() * k as f64) as usize % k).collect())?;
        let iid = match expected_time_iid(&pattern, &probs) {
            Err(Error::Hypothesis(_)) => continue,
            other => other?,
        };
        let markov = expected_time_markov(&pattern, &MarkovChain::iid(&probs)?, 0)?;
        worst_iid = worst_iid.max(rel(markov, iid));
    }
    log.check(worst_iid <= 1e-12, format!("iid-row chains reduce to the iid formula: max relative error {worst_iid:.2e}"));
    Ok(())
}

fn criterion_5(log: &mut Log) -> Result<()> {
    let s = derive_stream(5, 0);
    let exp = |rate: f64| RenewalSpec::new(Dist::Exponential { rate });
    let unif = |lo: f64, hi: f64| RenewalSpec::new(Dist::Uniform { lo, hi });
    let m = estimate_mean_process(&exp(2.0), 10.0, 10_000, &s.child(0))?.scaled(0.1);
    let (pass, line) = mc_line("elementary, exponential(2), t=10: m(t)/t", &m, 2.0, 3.0);
    log.check(pass, line);
    let m = estimate_mean_process(&unif(0.0, 1.0), 100.0, 10_000, &s.child(1))?.scaled(0.01);
    log.check(
        rel(m.value, 2.0) <= 0.02,
        format!("elementary, uniform(0,1), t=100: m(t)/t = {:.5} (within 2% of 2)", m.value),
    );
    let checks = [
        ("Blackwell nonlattice, uniform(0,1), t=50, a=2", blackwell_check(&unif(0.0, 1.0), 50.0, 2.0, BlackwellMode::Nonlattice, 20_000, &s.child(2))?),
        (
            "Blackwell lattice, steps {1,2}, t=40",
            blackwell_check(
                &RenewalSpec::new(Dist::Discrete { values: vec![1.0, 2.0], probs: vec![0.5, 0.5] }).with_lattice(1.0),
                40.0,
                1.0,
                BlackwellMode::Lattice,
                20_000,
                &s.child(3),
            )?,
        ),
        (
            "Blackwell reward, exponential(1), reward 3, t=50, a=1",
            blackwell_check(&exp(1.0).with_reward(Dist::Deterministic { value: 3.0 }), 50.0, 1.0, BlackwellMode::Reward, 20_000, &s.child(4))?,
        ),
        ("Blackwell random walk, uniform(0.5,1.5), t=100, a=1", blackwell_check(&unif(0.5, 1.5), 100.0, 1.0, BlackwellMode::RandomWalk, 20_000, &s.child(5))?),
        (
            "reward rate, exponential(2), Bernoulli(1/2) rewards, t=200",
            reward_rate_check(
                &exp(2.0).with_reward(Dist::Discrete { values: vec![0.0, 1.0], probs: vec![0.5, 0.5] }),
                200.0,
                10_000,
                &s.child(6),
            )?,
        ),
    ];
    for (name, c) in checks {
        let (pass, line) = mc_line(name, &c.estimate, c.limit, 3.0);
        log.check(pass, line);
    }
    let d = delayed_renewal_stats(&unif(0.0, 1.0).with_delay(Dist::Uniform { lo: 0.0, hi: 3.0 }), 50.0, 20_000, &s.child(7))?;
    let (pass, line) = mc_line("delayed age, uniform(0,1), t=50", &d.age, d.age_limit, 3.0);
    log.check(pass && (d.age_limit - 1.0 / 3.0).abs() < 1e-15, line);
    let spec = RegenerativeSpec {
        phases: vec![
            Phase { state: 0, duration: Dist::Exponential { rate: 1.0 } },
            Phase { state: 1, duration: Dist::Exponential { rate: 2.0 } },
        ],
    };
    let c = regenerative_occupancy(&spec, 1, 1e4, 10_000, &s.child(8))?;
    let (pass, line) = mc_line("regenerative occupancy, exp(1)/exp(2), horizon 1e4", &c.estimate, 1.0 / 3.0, 3.0);
    log.check(pass, line);
    Ok(())
}

fn criterion_6(log: &mut Log) -> Result<()> {
    let unif = |x: f64| x.clamp(0.0, 1.0);
    let sol = solve_renewal_equation(unif, |x| (-x).exp(), 50.0, 1e-3)?;
    log.check(rel(sol.convolution, 2.0) <= 0.01, format!("key renewal, F = uniform(0,1), f = e^-s, t = 50: {:.6} (2 ± 1%)", sol.convolution));
    let lambda = 0.8;
    let t = 5.0;
    let exp_cdf = move |x: f64| if x <= 0.0 { 0.0 } else { 1.0 - (-lambda * x).exp() };
    let spec = RenewalSpec::new(Dist::Exponential { rate: lambda });
    let samples = last_renewal_samples(&spec, t, 20_000, &derive_stream(6, 0))?;
    let mut worst: f64 = 0.0;
    let mut all_mc = true;
    for s in [0.0, 1.0, 2.5, 4.0, 4.8] {
        let p = last_renewal_cdf(exp_cdf, t, s, 1e-3)?;
        worst = worst.max((p - (-lambda * (t - s)).exp()).abs());
        let hits: Vec<f64> = samples.iter().map(|&x| if x <= s { 1.0 } else { 0.0 }).collect();
        all_mc &= EstimateWithCI::from_samples(&hits).within(p, 3.0, 0.0);
    }
    log.check(worst <= 1e-3, format!("last-renewal cdf, exponential(0.8), t=5: max |error| vs e^(-λ(t-s)) = {worst:.2e}"));
    log.check(all_mc, "exponential last-renewal cdf within 3 SE of the empirical cdf at s ∈ {0, 1, 2.5, 4, 4.8}");
    let d = Dist::Uniform { lo: 0.5, hi: 1.5 };
    let spec = RenewalSpec::new(d.clone());
    let samples = last_renewal_samples(&spec, t, 20_000, &derive_stream(6, 1))?;
    let mut all_mc = true;
    for s in [3.0, 3.5, 4.0, 4.5] {
        let p = last_renewal_cdf(|x| d.cdf(x).expect("uniform has a cdf"), t, s, 1e-3)?;
        let hits: Vec<f64> = samples.iter().map(|&x| if x <= s { 1.0 } else { 0.0 }).collect();
        let e = EstimateWithCI::from_samples(&hits);
        all_mc &= e.within(p, 3.0, 0.0);
        log.note(format!("uniform(0.5,1.5), s = {s}: numeric {p:.5}, empirical {:.5} ± {:.1e}", e.value, e.stderr));
    }
    log.check(all_mc, "uniform(0.5,1.5) last-renewal cdf within 3 SE of the empirical cdf");
    Ok(())
}

/// Allowance coefficient for the Dynkin left-point bias.
const DYNKIN_ALLOWANCE: f64 = 1.0;

fn criterion_7(log: &mut Log) -> Result<()> {
    let ode = JumpDiffusionSpec::linear(0.7, 0.0);
    let sq = Polynomial::monomial(2);
    let r: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&dt| Ok(ito_residual(&ode, &sq, &simulate_jump_diffusion(&ode, 1.0, 1.0, dt, &derive_stream(7, 0))?).abs()))
        .collect::<Result<_>>()?;
    let ratios = (r[0] / r[1], r[1] / r[2]);
    log.check(
        (8.0..12.5).contains(&ratios.0) && (8.0..12.5).contains(&ratios.1),
        format!("Itô residual, dX = 0.7X dt, F = x²: {:.3e}, {:.3e}, {:.3e} (ratios {:.2}, {:.2})", r[0], r[1], r[2], ratios.0, ratios.1),
    );
    let bench = BenchmarkParams::default().problem()?.dynamics;
    let means: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&dt| {
            let total: f64 = (0..100)
                .map(|i| Ok(ito_residual(&bench, &sq, &simulate_jump_diffusion(&bench, 0.5, 1.0, dt, &derive_stream(7, 1 + i))?).abs()))
                .sum::<Result<f64>>()?;
            Ok(total / 100.0)
        })
        .collect::<Result<_>>()?;
    log.check(
        means[0] >= means[1] && means[1] >= means[2],
        format!("benchmark spec, mean |Itô residual| over 100 paths: {:.3e}, {:.3e}, {:.3e}", means[0], means[1], means[2]),
    );
    let polys = [
        Polynomial::monomial(1),
        Polynomial::monomial(2),
        Polynomial::monomial(3),
        Polynomial::monomial(4),
        Polynomial::new(vec![1.0, -2.0, 0.0, 0.5]),
    ];
    let dt = 1e-2;
    for (k, f) in polys.iter().enumerate() {
        let e = dynkin_residual(&bench, f, 0.5, 1.0, dt, 20_000, &derive_stream(7, 1000 + k as u64))?;
        log.check(
            e.within(0.0, 3.0, DYNKIN_ALLOWANCE * dt),
            format!("Dynkin residual, F = {:?}: {:+.3e} ± {:.2e} (bound 3 SE + {dt})", f.coeffs(), e.value, e.stderr),
        );
    }
    let marks = MarkDistribution::Discrete { values: vec![-0.5, 1.0], probs: vec![0.25, 0.75] };
    let (lambda, mu) = (1.5, marks.mean());
    let comp = JumpDiffusionSpec::diffusion(|_, x| -0.3 * x, |_, _| 0.4).with_additive_jumps(lambda, marks.clone())?.compensated(true);
    let shifted = JumpDiffusionSpec::diffusion(move |_, x| -0.3 * x - lambda * mu, |_, _| 0.4).with_additive_jumps(lambda, marks)?;
    let mut same = true;
    for i in 0..50 {
        let s = derive_stream(7, 5000 + i);
        same &= simulate_jump_diffusion(&comp, 0.3, 3.0, 0.01, &s)? == simulate_jump_diffusion(&shifted, 0.3, 3.0, 0.01, &s)?;
    }
    log.check(same, "compensated spec equals the drift-shifted uncompensated spec path-for-path (50 paths, bitwise)");
    Ok(())
}

fn criterion_8(log: &mut Log) -> Result<()> {
    let params = BenchmarkParams::default();
    let problem = params.problem()?;
    let sol = solve_benchmark_qvi(&params)?;
    let search = ZSearch::over(-params.half_width, params.half_width);
    let report = qvi_residual(&problem, &sol.value, &search)?;
    log.check(
        report.sup_norm <= 1e-3 && report.dichotomy_holds(1e-3),
        format!("benchmark QVI: {} sweeps, residual sup-norm {:.2e}, region dichotomy at 1e-3", sol.sweeps, report.sup_norm),
    );
    let policy = synthesize_policy(&problem, &sol.value, &search)?;
    let band = policy.continuation.iter().find(|i| i.contains(0.0)).ok_or_else(|| Error::Numerical("0 not in D".into()))?;
    let (lo, hi) = (band.lo.unwrap_or(f64::NAN), band.hi.unwrap_or(f64::NAN));
    log.note(format!("continuation band ({lo:.3}, {hi:.3}); targets {:?}", (policy.target(lo - 0.01), policy.target(hi + 0.01))));
    let alternatives = perturbed_policies(&policy)?;
    let options = VerifyOptions::default();
    log.note(format!("{} paths, dt = {}, allowance C = {}", options.n_paths, options.dt, options.allowance));
    for (k, y0) in [0.0, lo, hi].into_iter().enumerate() {
        let r = verify_value(&problem, &sol.value, &policy, y0, &alternatives, &options, &derive_stream(8, k as u64))?;
        for row in &r.rows {
            let rel_op = if row.label == "synthesized" { "|φ−Ĵ| ≤" } else { "Ĵ ≥ φ −" };
            log.check(
                row.pass,
                format!(
                    "y0 = {:+.3} {:<13} φ = {:.5}, Ĵ = {:.5} ± {:.1e} ({rel_op} {:.2e}), tail bound {:.1e}",
                    row.y0, row.label, row.phi, row.j_hat, row.stderr, row.bound, row.tail_bound
                ),
            );
        }
    }
    let sq = Polynomial::monomial(2);
    let cost = |_: f64, _: f64, z: f64| 1.0 + z.abs();
    let mut worst: f64 = 0.0;
    for y in [-2.0, -0.7, 0.3, 1.0, 2.5] {
        let m = intervention_operator(&sq, cost, 0.0, y, &ZSearch::over(-4.0, 4.0))?;
        let oracle = (0..=8_000_000)
            .map(|i| {
                let t = -4.0 + i as f64 * 1e-6;
                t * t + 1.0 + (t - y).abs()
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max((m.value - oracle).abs());
        if y == 1.0 {
            log.check((m.value - 1.75).abs() <= 1e-6 && (m.z + 0.5).abs() <= 1e-5, format!("Mφ(1) = {:.9}, ζ = {:.6}", m.value, m.z));
        }
    }
    log.check(worst <= 1e-6, format!("M-operator vs dense grid oracle (φ = y², K = 1 + |z|): max error {worst:.2e}"));
    Ok(())
}

const SCENARIOS: [(&str, &str); 6] = [
    ("simulate", r#"{"kind":"simulate","seed":5,"parameters":{"x0":0.5,"horizon":1,"dt":0.01,"a":0.25,"sigma":0.5,"jumps":{"intensity":1,"marks":{"type":"discrete","values":[-0.3,0.3],"probs":[0.5,0.5]},"compensated":true},"n_paths":500}}"#),
    ("renewal-check", r#"{"kind":"renewal-check","seed":5,"parameters":{"renewal":{"interarrival":{"type":"uniform","lo":0,"hi":1}},"t":20,"n_paths":2000,"checks":["elementary","blackwell","wald"]}}"#),
    ("pattern-expect", r#"{"kind":"pattern-expect","seed":5,"parameters":{"source":{"transition":[[0.3,0.7],[0.6,0.4]],"initial":0},"pattern":"0110","trials":2000}}"#),
    ("pattern-race", r#"{"kind":"pattern-race","seed":1,"parameters":{"source":{"probs":[0.5,0.5]},"alphabet":"TH","patterns":["HH","TT"],"trials":20000}}"#),
    ("impulse-solve", r#"{"kind":"impulse-solve","seed":5,"parameters":{"benchmark":{"h":0.02,"delta":0.3,"half_width":3}}}"#),
    ("impulse-verify", r#"{"kind":"impulse-verify","seed":5,"parameters":{"benchmark":{"h":0.02,"half_width":3},"n_paths":300,"dt":0.01}}"#),
];

fn run_cli(config: &std::path::Path, out: &std::path::Path, workers: usize) -> Result<Vec<(String, Vec<u8>)>> {
    let status = Command::new(env!("CARGO_BIN_EXE_stochsynth"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--workers")
        .arg(workers.to_string())
        .output()
        .map_err(|e| Error::Config(e.to_string()))?;
    if !status.status.success() {
        return Err(Error::Config(format!("CLI failed: {}", String::from_utf8_lossy(&status.stderr))));
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out)
        .map_err(|e| Error::Config(e.to_string()))?
        .map(|e| {
            let p = e.expect("directory entry").path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).expect("readable output"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn criterion_9(log: &mut Log) -> Result<()> {
    let dir = tempfile::tempdir().map_err(|e| Error::Config(e.to_string()))?;
    for (kind, doc) in SCENARIOS {
        let config = dir.path().join(format!("{kind}.json"));
        std::fs::write(&config, doc).map_err(|e| Error::Config(e.to_string()))?;
        let reference = run_cli(&config, &dir.path().join(format!("{kind}-1")), 1)?;
        let mut identical = !reference.is_empty();
        for workers in 2..=8 {
            identical &= run_cli(&config, &dir.path().join(format!("{kind}-{workers}")), workers)? == reference;
        }
        let bytes: usize = reference.iter().map(|f| f.1.len()).sum();
        log.check(identical, format!("{kind}: {} files, {bytes} bytes, byte-identical for workers 1..8", reference.len()));
    }
    Ok(())
}

type Criterion = (usize, &'static str, fn(&mut Log) -> Result<()>, Duration);

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "motivating-example waiting times", criterion_1, Duration::from_secs(1)),
        (2, "run-race probability", criterion_2, Duration::from_secs(120)),
        (3, "n=5, m=6 race pipelines", criterion_3, Duration::from_secs(600)),
        (4, "Markov pattern formula vs automaton", criterion_4, Duration::from_secs(10)),
        (5, "renewal limits", criterion_5, Duration::from_secs(300)),
        (6, "key renewal theorem", criterion_6, Duration::from_secs(60)),
        (7, "stochastic core", criterion_7, Duration::from_secs(180)),
        (8, "impulse control", criterion_8, Duration::from_secs(600)),
        (9, "CLI determinism", criterion_9, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (n, name, f, budget) in criteria {
        let start = Instant::now();
        let mut log = Log::new();
        if let Err(e) = f(&mut log) {
            log.check(false, format!("error: {e}"));
        }
        let elapsed = start.elapsed();
        log.check(elapsed <= budget, format!("runtime {:.2?} (limit {:?})", elapsed, budget));
        println!("criterion {n} {}: {name}", if log.ok { "PASS" } else { "FAIL" });
        print!("{}", log.lines);
        failed += usize::from(!log.ok);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
