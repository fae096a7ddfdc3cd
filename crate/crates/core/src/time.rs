//! The discrete time axis and sliding data windows.

use alloc::collections::VecDeque;

use crate::error::invalid;
use crate::{Result, Vector};

/// Discretized time axis: step `t` of `horizon`, spaced `delta` seconds apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    delta: f64,
    horizon: usize,
    t: usize,
}

impl TimeGrid {
    pub fn new(delta: f64, horizon: usize) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(invalid("sampling interval must be positive"));
        }
        Ok(Self {
            delta,
            horizon,
            t: 0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.horizon
    }

    /// Moves to the next step, returning its index, or `None` at end of stream.
    pub fn tick(&mut self) -> Option<usize> {
        if self.t >= self.horizon {
            None
        } else {
            self.t += 1;
            Some(self.t)
        }
    }

    /// Wall-clock time of the current step.
    pub fn seconds(&self) -> f64 {
        self.t as f64 * self.delta
    }
}

/// One datum `z_tau`. The payload layout is defined by the generator that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataRecord {
    pub tau: i64,
    pub values: Vector,
}

impl DataRecord {
    pub fn new(tau: i64, values: Vector) -> Self {
        Self { tau, values }
    }
}

/// FIFO window holding at most `window_length` records, ordered by `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataWindow {
    window_length: usize,
    buffer: VecDeque<DataRecord>,
}

impl DataWindow {
    pub fn new(window_length: usize) -> Result<Self> {
        if window_length == 0 {
            return Err(invalid("window length must be at least 1"));
        }
        Ok(Self {
            window_length,
            buffer: VecDeque::with_capacity(window_length),
        })
    }

    /// Window with no records, used by problems that carry no data stream.
    pub fn empty() -> Self {
        Self {
            window_length: 1,
            buffer: VecDeque::new(),
        }
    }

    /// Builds a window from records in arrival order, keeping the newest.
    pub fn from_records(
        window_length: usize,
        records: impl IntoIterator<Item = DataRecord>,
    ) -> Result<Self> {
        let mut w = Self::new(window_length)?;
        for r in records {
            w.push(r)?;
        }
        Ok(w)
    }

    /// Appends a record, evicting the oldest one when full. Returns the
    /// evicted record, if any.
    pub fn push(&mut self, record: DataRecord) -> Result<Option<DataRecord>> {
        if let Some(last) = self.buffer.back() {
            if record.tau <= last.tau {
                return Err(invalid("records must arrive in increasing tau"));
            }
        }
        let evicted = if self.buffer.len() == self.window_length {
            self.buffer.pop_front()
        } else {
            None
        };
        self.buffer.push_back(record);
        Ok(evicted)
    }

    pub fn window_length(&self) -> usize {
        self.window_length
    }

    pub fn len(&self) -> usize {
        self.buffer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buffer.is_empty()
    }

    pub fn records(&self) -> impl ExactSizeIterator<Item = &DataRecord> + '_ {
        self.buffer.iter()
    }

    pub fn taus(&self) -> impl Iterator<Item = i64> + '_ {
        self.buffer.iter().map(|r| r.tau)
    }

    pub fn newest(&self) -> Option<&DataRecord> {
        self.buffer.back()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn rec(tau: i64) -> DataRecord {
        DataRecord::new(tau, Vector::from_vec(vec![tau as f64]))
    }

    #[test]
    fn sliding_window_evicts_oldest_first() {
        let mut w = DataWindow::new(2).unwrap();
        let mut seen = Vec::new();
        for tau in 1..=3 {
            w.push(rec(tau)).unwrap();
            seen.push(w.taus().collect::<Vec<_>>());
        }
        assert_eq!(seen, vec![vec![1], vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn out_of_order_rejected() {
        let mut w = DataWindow::new(3).unwrap();
        w.push(rec(2)).unwrap();
        assert!(w.push(rec(2)).is_err());
    }

    #[test]
    fn grid_ticks_to_horizon() {
        let mut g = TimeGrid::new(0.5, 2).unwrap();
        assert_eq!(g.tick(), Some(1));
        assert_eq!(g.tick(), Some(2));
        assert_eq!(g.tick(), None);
        assert_eq!(g.seconds(), 1.0);
        assert!(TimeGrid::new(0.0, 3).is_err());
    }
}
