use serde::{Deserialize, Serialize};

use super::dist::Dist;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::stats::{replicate, replicate_mean, EstimateWithCI};

/// Interarrival law `F`, optional first-gap law `G`, optional declared lattice
/// period `c` and optional per-renewal reward law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalSpec {
    pub interarrival: Dist,
    #[serde(default)]
    pub delay: Option<Dist>,
    #[serde(default)]
    pub lattice: Option<f64>,
    #[serde(default)]
    pub reward: Option<Dist>,
}

fn is_multiple(x: f64, c: f64) -> bool {
    let k = (x / c).round();
    (x - k * c).abs() <= 1e-9 * x.abs().max(c)
}

impl RenewalSpec {
    pub fn new(interarrival: Dist) -> Self {
        Self { interarrival, delay: None, lattice: None, reward: None }
    }

    pub fn with_delay(mut self, g: Dist) -> Self {
        self.delay = Some(g);
        self
    }

    pub fn with_lattice(mut self, c: f64) -> Self {
        self.lattice = Some(c);
        self
    }

    pub fn with_reward(mut self, r: Dist) -> Self {
        self.reward = Some(r);
        self
    }

    /// Mean interarrival time μ.
    pub fn mu(&self) -> Result<f64> {
        match self.interarrival.mean() {
            Some(m) if m.is_finite() && m > 0.0 => Ok(m),
            _ => Err(Error::param("interarrival mean must be finite and positive")),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.interarrival.validate()?;
        self.mu()?;
        if let Some(g) = &self.delay {
            g.validate()?;
            if !g.mean().is_some_and(f64::is_finite) {
                return Err(Error::param("delay law must have finite mean"));
            }
        }
        if let Some(r) = &self.reward {
            r.validate()?;
            if r.mean().is_none() {
                return Err(Error::param("reward law must have finite mean"));
            }
        }
        if let Some(c) = self.lattice {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::param("lattice period must be positive"));
            }
            for law in std::iter::once(&self.interarrival).chain(self.delay.as_ref()) {
                let atoms = law
                    .atoms()
                    .ok_or_else(|| Error::param("a lattice law must have atoms only (discrete or deterministic)"))?;
                if let Some(bad) = atoms.iter().find(|a| !is_multiple(**a, c)) {
                    return Err(Error::param(format!("support point {bad} is not an integer multiple of {c}")));
                }
            }
        }
        Ok(())
    }
}

/// Arrival-time generator. Lattice processes accumulate integer multiples of
/// `c` exactly; gap draws come from child 0 and rewards from child 1.
pub(crate) struct Arrivals<'a> {
    spec: &'a RenewalSpec,
    gaps: RandomStream,
    rewards: RandomStream,
    time: f64,
    units: u64,
    started: bool,
}

impl<'a> Arrivals<'a> {
    pub(crate) fn new(spec: &'a RenewalSpec, stream: &RandomStream) -> Self {
        Self { spec, gaps: stream.child(0), rewards: stream.child(1), time: 0.0, units: 0, started: false }
    }

    /// Next `(arrival time, gap)`.
    pub(crate) fn next_arrival(&mut self) -> Result<(f64, f64)> {
        let law = match (&self.spec.delay, self.started) {
            (Some(g), false) => g,
            _ => &self.spec.interarrival,
        };
        self.started = true;
        let gap = law.sample(&mut self.gaps);
        if !(gap.is_finite() && gap > 0.0) {
            return Err(Error::distribution(format!("sampled interarrival {gap} is not positive")));
        }
        match self.spec.lattice {
            Some(c) => {
                self.units += (gap / c).round() as u64;
                self.time = self.units as f64 * c;
            }
            None => self.time += gap,
        }
        Ok((self.time, gap))
    }

    /// Lattice index of the latest arrival.
    pub(crate) fn units(&self) -> u64 {
        self.units
    }

    pub(crate) fn reward(&mut self) -> f64 {
        match &self.spec.reward {
            Some(r) => r.sample(&mut self.rewards),
            None => 1.0,
        }
    }
}

/// Arrival times in `(0, horizon]`.
pub fn simulate_renewal(spec: &RenewalSpec, horizon: f64, stream: &RandomStream) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::param("horizon must be positive"));
    }
    spec.validate()?;
    let mut arr = Arrivals::new(spec, stream);
    let mut out = Vec::new();
    loop {
        let (t, _) = arr.next_arrival()?;
        if t > horizon {
            return Ok(out);
        }
        out.push(t);
    }
}

fn count_to(spec: &RenewalSpec, t: f64, stream: &RandomStream) -> Result<f64> {
    let mut arr = Arrivals::new(spec, stream);
    let mut n = 0u64;
    while arr.next_arrival()?.0 <= t {
        n += 1;
    }
    Ok(n as f64)
}

/// Monte Carlo estimate of `m(t) = E[N(t)]`.
pub fn estimate_mean_process(
    spec: &RenewalSpec,
    t: f64,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<EstimateWithCI> {
    check_horizon(t, n_paths)?;
    spec.validate()?;
    replicate_mean(stream, n_paths, |_, s| count_to(spec, t, s))
}

fn check_horizon(t: f64, n_paths: usize) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::param("t must be positive"));
    }
    if n_paths < 2 {
        return Err(Error::param("at least two replications are required"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlackwellMode {
    Nonlattice,
    Lattice,
    Reward,
    RandomWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitCheck {
    pub estimate: EstimateWithCI,
    pub limit: f64,
}

impl LimitCheck {
    pub fn passes(&self, k: f64) -> bool {
        self.estimate.within(self.limit, k, 0.0)
    }
}

/// Consecutive steps above the window after which a random walk is treated
/// as having left it for good.
pub const WALK_EXIT_RUN: usize = 50;
const WALK_STEP_CAP: u64 = 1 << 32;

/// Renewal-increment limits.
///
/// * `Nonlattice`: `m(t+a) − m(t) → a/μ`.
/// * `Lattice`: expected number of renewals at the lattice epoch `nc`,
///   `n = ⌈t/c⌉`, tends to `c/μ`.
/// * `Reward`: expected reward earned in `(t, t+a]` tends to `a ν/μ`.
/// * `RandomWalk`: with steps drawn from the interarrival law (which may take
///   negative values), `u(t+a) − u(t) → a/μ` where `u(t)` is the expected
///   number of partial sums `S_n ≤ t`, `n ≥ 1`.
pub fn blackwell_check(
    spec: &RenewalSpec,
    t: f64,
    a: f64,
    mode: BlackwellMode,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<LimitCheck> {
    check_horizon(t, n_paths)?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::param("a must be positive"));
    }
    if mode != BlackwellMode::RandomWalk {
        spec.validate()?;
    }
    let needs_nonlattice = |what: &str| -> Result<()> {
        if spec.lattice.is_some() {
            return Err(Error::hypothesis(format!("{what} mode requires a nonlattice interarrival law")));
        }
        Ok(())
    };
    match mode {
        BlackwellMode::Nonlattice => {
            needs_nonlattice("nonlattice")?;
            let mu = spec.mu()?;
            let estimate = replicate_mean(stream, n_paths, |_, s| {
                let mut arr = Arrivals::new(spec, s);
                let mut n = 0u64;
                loop {
                    let (x, _) = arr.next_arrival()?;
                    if x > t + a {
                        return Ok(n as f64);
                    }
                    if x > t {
                        n += 1;
                    }
                }
            })?;
            Ok(LimitCheck { estimate, limit: a / mu })
        }
        BlackwellMode::Lattice => {
            let c = spec
                .lattice
                .ok_or_else(|| Error::hypothesis("lattice mode requires a declared lattice period"))?;
            let mu = spec.mu()?;
            let target = (t / c).ceil() as u64;
            let estimate = replicate_mean(stream, n_paths, |_, s| {
                let mut arr = Arrivals::new(spec, s);
                loop {
                    arr.next_arrival()?;
                    let u = arr.units();
                    if u >= target {
                        return Ok(if u == target { 1.0 } else { 0.0 });
                    }
                }
            })?;
            Ok(LimitCheck { estimate, limit: c / mu })
        }
        BlackwellMode::Reward => {
            needs_nonlattice("reward")?;
            let r = spec.reward.as_ref().ok_or_else(|| Error::hypothesis("reward mode requires a reward law"))?;
            let nu = r.mean().ok_or_else(|| Error::hypothesis("reward law needs a finite mean"))?;
            let mu = spec.mu()?;
            let estimate = replicate_mean(stream, n_paths, |_, s| {
                let mut arr = Arrivals::new(spec, s);
                let mut total = 0.0;
                loop {
                    let (x, _) = arr.next_arrival()?;
                    let reward = arr.reward();
                    if x > t + a {
                        return Ok(total);
                    }
                    if x > t {
                        total += reward;
                    }
                }
            })?;
            Ok(LimitCheck { estimate, limit: a * nu / mu })
        }
        BlackwellMode::RandomWalk => {
            needs_nonlattice("random_walk")?;
            let step = &spec.interarrival;
            step.validate()?;
            let mu = match step.mean() {
                Some(m) if m > 0.0 && m.is_finite() => m,
                _ => return Err(Error::hypothesis("random_walk mode requires a positive step mean")),
            };
            let ceiling = t + a + 20.0 * mu;
            let estimate = replicate_mean(stream, n_paths, |_, s| {
                let mut rng = s.child(0);
                let (mut x, mut visits, mut above, mut steps) = (0.0, 0u64, 0usize, 0u64);
                while above < WALK_EXIT_RUN {
                    x += step.sample(&mut rng);
                    steps += 1;
                    if steps > WALK_STEP_CAP {
                        return Err(Error::numerical("random walk failed to leave the window"));
                    }
                    if x > t && x <= t + a {
                        visits += 1;
                    }
                    above = if x > ceiling { above + 1 } else { 0 };
                }
                Ok(visits as f64)
            })?;
            Ok(LimitCheck { estimate, limit: a / mu })
        }
    }
}

/// Blackwell estimates at `t ∈ {10μ, 50μ, 100μ}`; only the last is meant to
/// be held to the limit.
pub fn blackwell_curve(
    spec: &RenewalSpec,
    a: f64,
    mode: BlackwellMode,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<Vec<(f64, LimitCheck)>> {
    let mu = match mode {
        BlackwellMode::RandomWalk => spec.interarrival.mean().unwrap_or(f64::NAN),
        _ => spec.mu()?,
    };
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::hypothesis("the step mean must be positive"));
    }
    [10.0, 50.0, 100.0]
        .iter()
        .enumerate()
        .map(|(k, m)| Ok((m * mu, blackwell_check(spec, m * mu, a, mode, n_paths, &stream.child(k as u64))?)))
        .collect()
}

/// Wald's identity at the stopping time `N(t) + 1`.
pub fn wald_check(
    spec: &RenewalSpec,
    t: f64,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<(EstimateWithCI, EstimateWithCI)> {
    check_horizon(t, n_paths)?;
    spec.validate()?;
    if spec.delay.is_some() {
        return Err(Error::hypothesis("Wald's identity needs identically distributed gaps (no delay)"));
    }
    let mu = spec.mu()?;
    let pairs = replicate(stream, n_paths, |_, s| {
        let mut arr = Arrivals::new(spec, s);
        let mut n = 0u64;
        loop {
            let (x, _) = arr.next_arrival()?;
            n += 1;
            if x > t {
                return Ok((x, n as f64 * mu));
            }
        }
    })?;
    let lhs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let rhs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok((EstimateWithCI::from_samples(&lhs), EstimateWithCI::from_samples(&rhs)))
}

/// `R(t)/t` against `ν/μ`.
pub fn reward_rate_check(spec: &RenewalSpec, t: f64, n_paths: usize, stream: &RandomStream) -> Result<LimitCheck> {
    check_horizon(t, n_paths)?;
    spec.validate()?;
    let r = spec.reward.as_ref().ok_or_else(|| Error::hypothesis("a reward law is required"))?;
    let nu = r.mean().ok_or_else(|| Error::hypothesis("reward law needs a finite mean"))?;
    let mu = spec.mu()?;
    let estimate = replicate_mean(stream, n_paths, |_, s| {
        let mut arr = Arrivals::new(spec, s);
        let mut total = 0.0;
        loop {
            let (x, _) = arr.next_arrival()?;
            let reward = arr.reward();
            if x > t {
                return Ok(total / t);
            }
            total += reward;
        }
    })?;
    Ok(LimitCheck { estimate, limit: nu / mu })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayedStats {
    pub mean_process: EstimateWithCI,
    pub age: EstimateWithCI,
    pub age_limit: f64,
}

/// `m_D(t)`, the age `t − T_{N_D(t)}` and its limit `E[A²] / (2 E[A])`.
pub fn delayed_renewal_stats(
    spec: &RenewalSpec,
    t: f64,
    n_paths: usize,
    stream: &RandomStream,
) -> Result<DelayedStats> {
    check_horizon(t, n_paths)?;
    spec.validate()?;
    if spec.lattice.is_some() {
        return Err(Error::hypothesis("the age limit requires a nonlattice interarrival law"));
    }
    let m2 = spec
        .interarrival
        .second_moment()
        .ok_or_else(|| Error::hypothesis("the age limit requires a finite second moment"))?;
    let mu = spec.mu()?;
    let pairs = replicate(stream, n_paths, |_, s| {
        let mut arr = Arrivals::new(spec, s);
        let (mut n, mut last) = (0u64, 0.0);
        loop {
            let (x, _) = arr.next_arrival()?;
            if x > t {
                return Ok((n as f64, t - last));
            }
            n += 1;
            last = x;
        }
    })?;
    let counts: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ages: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(DelayedStats {
        mean_process: EstimateWithCI::from_samples(&counts),
        age: EstimateWithCI::from_samples(&ages),
        age_limit: m2 / (2.0 * mu),
    })
}

/// Samples of the last renewal epoch `T_{N(t)}` (0 when no renewal occurred).
pub fn last_renewal_samples(spec: &RenewalSpec, t: f64, n_paths: usize, stream: &RandomStream) -> Result<Vec<f64>> {
    check_horizon(t, n_paths)?;
    spec.validate()?;
    replicate(stream, n_paths, |_, s| {
        let mut arr = Arrivals::new(spec, s);
        let mut last = 0.0;
        loop {
            let (x, _) = arr.next_arrival()?;
            if x > t {
                return Ok(last);
            }
            last = x;
        }
    })
}
