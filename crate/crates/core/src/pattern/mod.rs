//! Pattern occurrence in iid and Markov symbol streams: overlaps, closed-form
//! waiting times, an automaton oracle, conditional times and pattern races.
//!
//! Symbols are `0..alphabet`. A Markov source is observed from a given
//! `X_0`, which is not part of the observed stream.

mod automaton;
mod chain;
mod formula;
mod race;
mod source;
mod word;

pub use automaton::{absorb, automaton_expected_time, conditional_expected_time, Absorption, Automaton, AutomatonStart};
pub use chain::{mean_hitting_times, stationary_distribution, MarkovChain};
pub use formula::{expected_time_iid, expected_time_iid_with, expected_time_markov, expected_time_markov_with, OverlapMode};
pub use race::{
    conditioning_system, race_automaton, race_solve, run_race_probability, simulate_pattern_race,
    two_pattern_closed_form, two_stage_race_probability, ConditioningSystem, EmpiricalRace, RaceResult,
    DEFAULT_STEP_CAP,
};
pub use source::Source;
pub use word::{failure_function, overlap_size, Pattern};
