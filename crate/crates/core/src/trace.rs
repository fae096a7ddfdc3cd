//! Per-step records of an online run.

use alloc::string::String;
use alloc::vec::Vec;

use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub x: Vector,
    pub lambda: Option<Vector>,
    /// `f_t(x_t)`.
    pub objective: f64,
    /// Gradient estimate used by the first inner step.
    pub v: Vector,
    /// `||grad h_t(x_{t-1}) - v_t||`.
    pub grad_error: f64,
    /// Seconds spent on the step; zero when no clock was supplied.
    pub wall_time: f64,
}

/// The trajectory of one run, starting from `x0` (and `lambda0` for
/// primal-dual methods).
#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace {
    pub method: String,
    pub x0: Vector,
    pub lambda0: Option<Vector>,
    pub steps_per_slice: usize,
    records: Vec<TraceRecord>,
}

impl IterateTrace {
    pub fn new(method: impl Into<String>, x0: Vector, lambda0: Option<Vector>, steps_per_slice: usize) -> Self {
        Self {
            method: method.into(),
            x0,
            lambda0,
            steps_per_slice,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(record.grad_error >= 0.0);
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// Iterates `x_0, x_1, ..., x_T`.
    pub fn iterates_with_start(&self) -> impl Iterator<Item = &Vector> + '_ {
        core::iter::once(&self.x0).chain(self.records.iter().map(|r| &r.x))
    }
}
