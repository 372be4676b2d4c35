use serde::Serialize;

use crate::error::{Error, Result};

/// Compartment sizes on a fixed time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SirSeries {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}

impl SirSeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Mean daily log growth of the infected compartment between samples `a` and `b`.
    pub fn growth_rate(&self, a: usize, b: usize) -> f64 {
        (self.i[b] / self.i[a]).ln() / (self.t[b] - self.t[a])
    }
}

/// Explicit Euler integration of the SIR equations over `horizon` days.
pub fn sir_integrate(
    beta: f64,
    gamma: f64,
    s0: f64,
    i0: f64,
    r0: f64,
    horizon: f64,
    dt: f64,
) -> Result<SirSeries> {
    if [s0, i0, r0].iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Validation("compartments must be nonnegative".into()));
    }
    let m = s0 + i0 + r0;
    if !(m > 0.0) {
        return Err(Error::Validation("population must be positive".into()));
    }
    if !(dt > 0.0) || !(horizon >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0) {
        return Err(Error::Validation(
            "rates, step and horizon must be nonnegative".into(),
        ));
    }
    let steps = (horizon / dt).round() as usize;
    let mut out = SirSeries {
        t: Vec::with_capacity(steps + 1),
        s: Vec::with_capacity(steps + 1),
        i: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
    };
    let (mut s, mut i, mut r) = (s0, i0, r0);
    for k in 0..=steps {
        out.t.push(k as f64 * dt);
        out.s.push(s);
        out.i.push(i);
        out.r.push(r);
        let infections = (beta * s * i / m * dt).min(s);
        let recoveries = gamma * i * dt;
        s -= infections;
        i += infections - recoveries;
        r += recoveries;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disease_free_state_is_fixed() {
        let out = sir_integrate(0.38, 1.0 / 7.0, 1000.0, 0.0, 5.0, 50.0, 0.1).unwrap();
        assert!(out.s.iter().all(|v| *v == 1000.0));
        assert!(out.r.iter().all(|v| *v == 5.0));
    }

    #[test]
    fn balanced_rates_hold_infections_flat() {
        let out = sir_integrate(0.2, 0.2, 1e9, 10.0, 0.0, 20.0, 0.1).unwrap();
        assert!(out.growth_rate(0, 100).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(sir_integrate(0.3, 0.1, -1.0, 1.0, 0.0, 10.0, 0.1).is_err());
        assert!(sir_integrate(0.3, 0.1, 1.0, 1.0, 0.0, 10.0, 0.0).is_err());
    }
}
