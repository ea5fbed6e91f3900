//! The advancing noise window over the frequency order.
//!
//! A frontier sweeps the orderable vocabulary from least to most frequent in
//! fixed-size steps. Every round the frontier advances by one window no
//! matter what happened; the widening policy only decides whether the
//! previously masked region is masked again along with the fresh window.
//! Because the previous mask always ends where the new window begins, every
//! mask stays one contiguous span of positions.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::meta::config::Policy;

#[derive(Debug, Clone)]
pub struct MaskerState {
    n: usize,
    wsize: usize,
    frontier: usize,
    prev: Range<usize>,
}

impl MaskerState {
    /// `n` orderable words, window = `ceil(step_size * n)` positions.
    pub fn new(n: usize, step_size: f64) -> Result<Self> {
        if !(step_size > 0.0 && step_size <= 1.0) {
            return Err(Error::Config(format!(
                "step size {step_size} outside (0, 1]"
            )));
        }
        let wsize = (step_size * n as f64).ceil() as usize;
        Ok(Self {
            n,
            wsize,
            frontier: 0,
            prev: 0..0,
        })
    }

    /// True once the frontier has swept the whole order.
    pub fn done(&self) -> bool {
        self.frontier >= self.n
    }

    pub fn window_size(&self) -> usize {
        self.wsize
    }

    pub fn frontier(&self) -> usize {
        self.frontier
    }

    /// Rounds of masking a full sweep takes: `ceil(n / wsize)`.
    pub fn total_windows(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.n.div_ceil(self.wsize)
        }
    }

    /// Advance the frontier by one window and return the span to mask,
    /// widened or not according to `policy` and whether the last round
    /// improved. Positions index the frequency order, not token ids.
    pub fn advance(&mut self, policy: Policy, improved: bool) -> Result<Range<usize>> {
        if self.done() {
            return Err(Error::Contract(
                "the frontier already covered the whole vocabulary".into(),
            ));
        }
        let window = self.frontier..(self.frontier + self.wsize).min(self.n);
        let widened = self.prev.start.min(window.start)..window.end;
        let mask = match (policy, improved) {
            (Policy::Gradual, true) | (Policy::Reversed, false) | (Policy::None, _) => window.clone(),
            (Policy::Gradual, false) | (Policy::Reversed, true) | (Policy::Both, _) => widened,
        };
        self.prev = mask.clone();
        self.frontier = window.end;
        Ok(mask)
    }
}
