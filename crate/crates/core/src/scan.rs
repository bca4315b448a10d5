//! Single-pass scans over outcome sequences.
//!
//! The longest at most 1+1 contaminated run ending at position `n` starts just
//! after the later of the second-to-last `+` and the second-to-last `-`. The
//! scan therefore only tracks the last two positions of each failure type,
//! which makes every step `O(1)` with constant memory.

use std::borrow::Borrow;

use crate::error::{Error, Result};
use crate::model::{Outcome, WindowSpec};

/// Bookkeeping for the suffix-run recursion. Positions are 1-based; 0 means
/// "no occurrence yet".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ScanState {
    pub last_plus: u64,
    pub prev_plus: u64,
    pub last_minus: u64,
    pub prev_minus: u64,
    pub position: u64,
    pub best: u64,
}

impl ScanState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Length of the longest valid run ending at the current position.
    #[inline]
    pub fn current_run(&self) -> u64 {
        self.position - self.prev_plus.max(self.prev_minus)
    }

    /// Advances by one outcome and returns the new suffix-run length.
    #[inline]
    pub fn push(&mut self, next: Outcome) -> u64 {
        self.position += 1;
        // Branch-free: outcomes are unpredictable, so selects beat jumps.
        let plus = 0u64.wrapping_sub((next == Outcome::FailPlus) as u64);
        let minus = 0u64.wrapping_sub((next == Outcome::FailMinus) as u64);
        self.prev_plus = (self.last_plus & plus) | (self.prev_plus & !plus);
        self.last_plus = (self.position & plus) | (self.last_plus & !plus);
        self.prev_minus = (self.last_minus & minus) | (self.prev_minus & !minus);
        self.last_minus = (self.position & minus) | (self.last_minus & !minus);
        let run = self.current_run();
        self.best = self.best.max(run);
        run
    }
}

/// Functional form of [`ScanState::push`].
pub fn streaming_update(state: ScanState, next: Outcome) -> ScanState {
    let mut s = state;
    s.push(next);
    s
}

/// `mu(N)`: length of the longest at most 1+1 contaminated run.
pub fn longest_run<I>(seq: I) -> Result<u64>
where
    I: IntoIterator,
    I::Item: Borrow<Outcome>,
{
    let mut state = ScanState::new();
    for o in seq {
        state.push(*o.borrow());
    }
    if state.position == 0 {
        return Err(Error::domain("longest_run of an empty sequence"));
    }
    Ok(state.best)
}

/// `tau_m`: end index (1-based) of the first `m`-window that is at most 1+1
/// contaminated, or `None` if the sequence ends first.
///
/// With this convention `{tau_m > N}` is exactly the event that none of the
/// windows starting at `1, ..., N - m + 1` qualifies.
pub fn first_hitting<I>(seq: I, m: WindowSpec) -> Option<u64>
where
    I: IntoIterator,
    I::Item: Borrow<Outcome>,
{
    let target = m.len() as u64;
    let mut state = ScanState::new();
    for o in seq {
        if state.push(*o.borrow()) >= target {
            return Some(state.position);
        }
    }
    None
}

/// Suffix-run lengths after each symbol.
pub fn run_trace<I>(seq: I) -> Vec<u64>
where
    I: IntoIterator,
    I::Item: Borrow<Outcome>,
{
    let mut state = ScanState::new();
    seq.into_iter().map(|o| state.push(*o.borrow())).collect()
}
