use crate::error::{Error, Result};
use crate::rng::RandomStream;

use super::path::{InterventionRecord, JumpRecord, SamplePath};
use super::spec::{sample_jump_times, JumpDiffusionSpec};

/// Paths whose magnitude exceeds this are aborted.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// One grid node reached by the stepper.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepNode {
    pub t: f64,
    /// State at the end of the continuous step, before jump and impulse.
    pub x_pre: f64,
    /// `(mark, size)` of a jump located at `t`.
    pub jump: Option<(f64, f64)>,
    pub impulse: Option<f64>,
    /// State after jump and impulse.
    pub x: f64,
}

pub(crate) trait PathSink {
    /// Called once per node, including the initial node at `t0` (with
    /// `prev = None`).
    fn node(&mut self, prev: Option<(f64, f64)>, node: &StepNode);
}

/// Decides whether to intervene at a node with post-jump state `x`.
pub(crate) trait ImpulseRule {
    fn impulse(&self, t: f64, x: f64) -> Option<f64>;
}

pub(crate) struct NoControl;

impl ImpulseRule for NoControl {
    fn impulse(&self, _t: f64, _x: f64) -> Option<f64> {
        None
    }
}

fn check_state(t: f64, x: f64) -> Result<()> {
    if !x.is_finite() || x.abs() > BLOWUP_THRESHOLD {
        return Err(Error::Blowup { time: t, state: x });
    }
    Ok(())
}

/// Euler–Maruyama on the grid `t0 + k dt` refined by the exact jump epochs.
///
/// Jump epochs and marks come from `stream.child(0)` and Gaussian increments
/// from `stream.child(1)`, so two specs sharing jump law and stream see the
/// same noise path-for-path.
pub(crate) fn run_path<R: ImpulseRule, S: PathSink>(
    spec: &JumpDiffusionSpec,
    x0: f64,
    t0: f64,
    horizon: f64,
    dt: f64,
    stream: &RandomStream,
    rule: &R,
    max_impulses: usize,
    sink: &mut S,
) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param(format!("dt must be positive, got {dt}")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param(format!("horizon must be positive, got {horizon}")));
    }
    check_state(t0, x0)?;
    let mut jump_stream = stream.child(0);
    let mut noise = stream.child(1);
    let jumps = sample_jump_times(&mut jump_stream, spec.jump_intensity(), spec.marks(), horizon)?;
    let mut impulses = 0usize;

    let mut apply_rule = |t: f64, x: f64| -> Result<Option<f64>> {
        match rule.impulse(t, x) {
            Some(z) => {
                impulses += 1;
                if impulses > max_impulses {
                    return Err(Error::Chattering { cap: max_impulses, time: t });
                }
                Ok(Some(z))
            }
            None => Ok(None),
        }
    };

    let z0 = apply_rule(t0, x0)?;
    let mut x = x0 + z0.unwrap_or(0.0);
    check_state(t0, x)?;
    sink.node(None, &StepNode { t: t0, x_pre: x0, jump: None, impulse: z0, x });

    let n_steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let end = t0 + horizon;
    let mut t = t0;
    let mut next_jump = 0usize;
    for k in 1..=n_steps {
        let t_grid = if k == n_steps { end } else { t0 + k as f64 * dt };
        loop {
            let jump_here = jumps
                .get(next_jump)
                .map(|&(tj, z)| (t0 + tj, z))
                .filter(|&(tj, _)| tj <= t_grid);
            let (t_next, mark) = match jump_here {
                Some((tj, z)) => (tj, Some(z)),
                None => (t_grid, None),
            };
            if mark.is_some() {
                next_jump += 1;
            }
            let h = t_next - t;
            let mut x_pre = x;
            if h > 0.0 {
                let drift = spec.effective_drift(t, x)?;
                let sigma = spec.diffusion_coef(t, x);
                let dw = if sigma != 0.0 { h.sqrt() * noise.standard_normal() } else { 0.0 };
                x_pre = x + drift * h + sigma * dw;
            }
            check_state(t_next, x_pre)?;
            let jump = mark.map(|z| (z, spec.jump_size(t_next, x_pre, z)));
            let x_jump = x_pre + jump.map_or(0.0, |(_, s)| s);
            check_state(t_next, x_jump)?;
            let impulse = apply_rule(t_next, x_jump)?;
            let x_new = x_jump + impulse.unwrap_or(0.0);
            check_state(t_next, x_new)?;
            let node = StepNode { t: t_next, x_pre, jump, impulse, x: x_new };
            sink.node(Some((t, x)), &node);
            t = t_next;
            x = x_new;
            if t_next >= t_grid {
                break;
            }
        }
    }
    Ok(())
}

#[derive(Default)]
pub(crate) struct PathRecorder {
    pub path: SamplePath,
}

impl PathSink for PathRecorder {
    fn node(&mut self, _prev: Option<(f64, f64)>, node: &StepNode) {
        let p = &mut self.path;
        let index = p.times.len();
        if let Some(last) = p.times.last() {
            if node.t <= *last {
                // Coincident epoch: merge into the existing node.
                let k = index - 1;
                if let Some((mark, size)) = node.jump {
                    p.jumps.push(JumpRecord { index: k, time: *last, mark, size });
                }
                if let Some(z) = node.impulse {
                    p.interventions.push(InterventionRecord { index: k, time: *last, impulse: z });
                }
                p.states[k] = node.x;
                return;
            }
        }
        p.times.push(node.t);
        p.pre_states.push(node.x_pre);
        p.states.push(node.x);
        if let Some((mark, size)) = node.jump {
            p.jumps.push(JumpRecord { index, time: node.t, mark, size });
        }
        if let Some(z) = node.impulse {
            p.interventions.push(InterventionRecord { index, time: node.t, impulse: z });
        }
    }
}

/// Simulate one uncontrolled path on `[0, horizon]`.
pub fn simulate_jump_diffusion(
    spec: &JumpDiffusionSpec,
    x0: f64,
    horizon: f64,
    dt: f64,
    stream: &RandomStream,
) -> Result<SamplePath> {
    let mut rec = PathRecorder::default();
    run_path(spec, x0, 0.0, horizon, dt, stream, &NoControl, usize::MAX, &mut rec)?;
    Ok(rec.path)
}

pub(crate) fn record_path<R: ImpulseRule>(
    spec: &JumpDiffusionSpec,
    x0: f64,
    t0: f64,
    horizon: f64,
    dt: f64,
    stream: &RandomStream,
    rule: &R,
    max_impulses: usize,
) -> Result<SamplePath> {
    let mut rec = PathRecorder::default();
    run_path(spec, x0, t0, horizon, dt, stream, rule, max_impulses, &mut rec)?;
    Ok(rec.path)
}
