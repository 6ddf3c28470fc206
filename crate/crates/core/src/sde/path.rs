use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpRecord {
    /// Index into [`SamplePath::times`].
    pub index: usize,
    pub time: f64,
    pub mark: f64,
    /// Applied size ξ(t, x(t-), z).
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterventionRecord {
    pub index: usize,
    pub time: f64,
    pub impulse: f64,
}

/// One simulated trajectory on an increasing time grid.
///
/// `pre_states[k]` is `x(t_k-)`, the value reached by the continuous part of
/// the step ending at `t_k`; `states[k]` is `x(t_k)` after any jump and
/// intervention located at `t_k`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplePath {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub pre_states: Vec<f64>,
    pub jumps: Vec<JumpRecord>,
    pub interventions: Vec<InterventionRecord>,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> f64 {
        *self.states.last().expect("non-empty path")
    }

    pub fn jump_at(&self, index: usize) -> Option<&JumpRecord> {
        self.jumps.iter().find(|j| j.index == index)
    }

    pub fn intervention_at(&self, index: usize) -> Option<&InterventionRecord> {
        self.interventions.iter().find(|j| j.index == index)
    }

    /// Checks the structural invariants; returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.times.len() != self.states.len() || self.times.len() != self.pre_states.len() {
            return Err("times/states length mismatch".into());
        }
        if self.times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err("times not strictly increasing".into());
        }
        let (t0, tk) = (self.times[0], *self.times.last().unwrap());
        let mut applied = vec![0.0; self.times.len()];
        for j in &self.jumps {
            if j.time < t0 || j.time > tk || self.times[j.index] != j.time {
                return Err(format!("jump at {} off grid", j.time));
            }
            applied[j.index] += j.size;
        }
        for iv in &self.interventions {
            if iv.time < t0 || iv.time > tk || self.times[iv.index] != iv.time {
                return Err(format!("intervention at {} off grid", iv.time));
            }
            applied[iv.index] += iv.impulse;
        }
        for k in 0..self.times.len() {
            let d = self.states[k] - self.pre_states[k];
            let tol = 1e-9 * (1.0 + self.states[k].abs().max(self.pre_states[k].abs()));
            if (d - applied[k]).abs() > tol {
                return Err(format!("state jump {d} at t = {} does not match {}", self.times[k], applied[k]));
            }
        }
        Ok(())
    }
}
