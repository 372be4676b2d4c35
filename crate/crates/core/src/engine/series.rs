use std::io::Write;

use serde::{Deserialize, Serialize};

use super::model::SimState;
use crate::data::Economy;

/// Daily record of a simulation run. Index 0 is the initial steady state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSeries {
    pub codes: Vec<String>,
    pub t: Vec<usize>,
    pub output: Vec<f64>,
    pub labor: Vec<f64>,
    pub profits: Vec<f64>,
    pub consumption: Vec<f64>,
    pub value_added: Vec<f64>,
    /// Per-industry output, one row per day.
    pub x: Vec<Vec<f64>>,
    pub l: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub f: Vec<Vec<f64>>,
}

impl SimSeries {
    pub(crate) fn with_capacity(economy: &Economy, days: usize) -> Self {
        SimSeries {
            codes: economy.codes.clone(),
            t: Vec::with_capacity(days),
            output: Vec::with_capacity(days),
            labor: Vec::with_capacity(days),
            profits: Vec::with_capacity(days),
            consumption: Vec::with_capacity(days),
            value_added: Vec::with_capacity(days),
            x: Vec::with_capacity(days),
            l: Vec::with_capacity(days),
            c: Vec::with_capacity(days),
            f: Vec::with_capacity(days),
        }
    }

    pub(crate) fn push(&mut self, s: &SimState) {
        let l = s.l.sum();
        let pi = s.pi.sum();
        self.t.push(s.t);
        self.output.push(s.x.sum());
        self.labor.push(l);
        self.profits.push(pi);
        self.consumption.push(s.c.sum());
        self.value_added.push(pi + l);
        self.x.push(s.x.iter().copied().collect());
        self.l.push(s.l.iter().copied().collect());
        self.c.push(s.c.iter().copied().collect());
        self.f.push(s.f.iter().copied().collect());
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `values` divided by their day-0 level.
    pub fn relative(values: &[f64]) -> Vec<f64> {
        let base = values.first().copied().unwrap_or(1.0);
        values.iter().map(|v| v / base).collect()
    }

    /// Mean of `values` over days `from..to`.
    pub fn window_mean(values: &[f64], from: usize, to: usize) -> f64 {
        let w = &values[from..to];
        w.iter().sum::<f64>() / w.len() as f64
    }

    /// One row per day: aggregates followed by per-industry output.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = [
            "t",
            "output",
            "labor",
            "profits",
            "consumption",
            "value_added",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend(self.codes.iter().map(|c| format!("x_{c}")));
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![
                self.t[k].to_string(),
                format!("{:?}", self.output[k]),
                format!("{:?}", self.labor[k]),
                format!("{:?}", self.profits[k]),
                format!("{:?}", self.consumption[k]),
                format!("{:?}", self.value_added[k]),
            ];
            row.extend(self.x[k].iter().map(|v| format!("{v:?}")));
            w.write_record(&row)?;
        }
        w.flush()
    }
}
