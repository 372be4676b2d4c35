use nalgebra::{DMatrix, DVector};

use super::rules::{
    capacity_limit, consume_inputs_and_update_inventories, household_income, input_limit,
    intermediate_orders, labor_adjustment, labor_ceiling, preference_shares, profits,
    realize_and_ration, total_consumption_demand, total_demand,
};
use super::series::SimSeries;
use crate::data::{CriticalityMatrix, EconParams, Economy, InventoryTargets};
use crate::error::{Error, Result};

/// Exogenous inputs for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct DayShocks {
    pub t: usize,
    /// Labor supply reduction in force.
    pub eps_s: DVector<f64>,
    /// Consumption demand shock.
    pub eps_c: DVector<f64>,
    /// Other final demand.
    pub f_d: DVector<f64>,
    /// Permanent income factor.
    pub xi: f64,
}

/// Anything that can produce the shocks for a given day.
pub trait ShockSource {
    fn shocks(&self, t: usize) -> DayShocks;
}

/// No shocks at all: the economy should stay where it started.
pub struct NoShocks<'a>(pub &'a Economy);

impl ShockSource for NoShocks<'_> {
    fn shocks(&self, t: usize) -> DayShocks {
        let n = self.0.n();
        DayShocks {
            t,
            eps_s: DVector::zeros(n),
            eps_c: DVector::zeros(n),
            f_d: self.0.f0.clone(),
            xi: 1.0,
        }
    }
}

/// Full mutable state of the economy at the end of a day.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: usize,
    /// Input stocks held by each buyer (column) of each good (row).
    pub s: DMatrix<f64>,
    pub l: DVector<f64>,
    pub l_max: DVector<f64>,
    /// Total demand of the previous day.
    pub d_prev: DVector<f64>,
    pub orders: DMatrix<f64>,
    pub c_d: DVector<f64>,
    pub f_d: DVector<f64>,
    pub c_tilde_d: f64,
    pub xi: f64,
    pub theta: DVector<f64>,
    pub x: DVector<f64>,
    pub c: DVector<f64>,
    pub f: DVector<f64>,
    pub z: DMatrix<f64>,
    pub pi: DVector<f64>,
    pub l_star: f64,
    pub x_cap: DVector<f64>,
    pub x_inp: DVector<f64>,
}

impl SimState {
    /// Largest relative gap between output and deliveries.
    pub fn delivery_gap(&self) -> f64 {
        let delivered = self.z.column_sum() + &self.c + &self.f;
        (0..self.x.len())
            .map(|i| {
                let gap = (delivered[i] - self.x[i]).abs();
                if self.x[i] > 0.0 {
                    gap / self.x[i]
                } else {
                    gap
                }
            })
            .fold(0.0, f64::max)
    }
}

/// The economic model bound to one dataset and parameter set.
#[derive(Debug, Clone)]
pub struct Model<'a> {
    pub economy: &'a Economy,
    pub criticality: &'a CriticalityMatrix,
    pub targets: &'a InventoryTargets,
    pub params: &'a EconParams,
    m: f64,
    rho: f64,
    theta0: DVector<f64>,
    l0_total: f64,
}

impl<'a> Model<'a> {
    pub fn new(
        economy: &'a Economy,
        criticality: &'a CriticalityMatrix,
        targets: &'a InventoryTargets,
        params: &'a EconParams,
    ) -> Result<Self> {
        params.validate()?;
        let n = economy.n();
        if criticality.n() != n || targets.len() != n {
            return Err(Error::Validation(format!(
                "criticality ({}) and inventory targets ({}) must cover {n} industries",
                criticality.n(),
                targets.len()
            )));
        }
        if let Some(d) = targets.n_days.iter().find(|d| !(**d >= 0.0)) {
            return Err(Error::Validation(format!(
                "inventory target {d} is negative"
            )));
        }
        let c_total = economy.c0.sum();
        if !(c_total > 0.0) {
            return Err(Error::Validation("household consumption is zero".into()));
        }
        let l0_total = economy.l0.sum();
        if !(l0_total > 0.0) {
            return Err(Error::Validation("labor compensation is zero".into()));
        }
        Ok(Model {
            economy,
            criticality,
            targets,
            params,
            m: params.m_for(economy),
            rho: params.rho(),
            theta0: &economy.c0 / c_total,
            l0_total,
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn theta0(&self) -> &DVector<f64> {
        &self.theta0
    }

    pub fn init_steady_state(&self) -> SimState {
        let e = self.economy;
        let n = e.n();
        let s = DMatrix::from_fn(n, n, |i, j| self.targets.n_days[j] * e.z0[(i, j)]);
        let x_inp = input_limit(&s, e, self.criticality, self.params.prod_fn);
        SimState {
            t: 0,
            s,
            l: e.l0.clone(),
            l_max: e.l0.clone(),
            d_prev: e.x0.clone(),
            orders: e.z0.clone(),
            c_d: e.c0.clone(),
            f_d: e.f0.clone(),
            c_tilde_d: self.m * self.l0_total,
            xi: 1.0,
            theta: self.theta0.clone(),
            x: e.x0.clone(),
            c: e.c0.clone(),
            f: e.f0.clone(),
            z: e.z0.clone(),
            pi: e.pi0.clone(),
            l_star: self.l0_total,
            x_cap: e.x0.clone(),
            x_inp,
        }
    }

    /// Advances one day: labor, demand, production, rationing, then stocks and accounts.
    pub fn step(&self, state: &SimState, shocks: &DayShocks) -> Result<SimState> {
        let e = self.economy;
        let p = self.params;

        let l_max = labor_ceiling(e, &shocks.eps_s);
        let l = labor_adjustment(
            &state.l,
            e,
            &state.x_cap,
            &state.x_inp,
            &state.d_prev,
            &l_max,
            p.gamma_h,
            p.gamma_f,
        );
        let l_star = household_income(l.sum(), self.l0_total, p.b);

        let (theta, eps_tilde) =
            preference_shares(&self.theta0, &shocks.eps_c, p.delta_s_save, self.rho)?;
        let c_tilde_d = total_consumption_demand(
            state.c_tilde_d,
            l_star,
            shocks.xi,
            eps_tilde,
            self.l0_total,
            self.m,
            self.rho,
            p.cons_fn,
        )?;
        let c_d = &theta * c_tilde_d;
        let orders = intermediate_orders(
            &e.a,
            &state.d_prev,
            &self.targets.n_days,
            &e.z0,
            &state.s,
            p.tau,
        );
        let f_d = shocks.f_d.clone();
        let d = total_demand(&orders, &c_d, &f_d);

        let x_cap = capacity_limit(&l, e)?;
        let x_inp = input_limit(&state.s, e, self.criticality, p.prod_fn);
        let r = realize_and_ration(&x_cap, &x_inp, &orders, &c_d, &f_d)?;

        let s = consume_inputs_and_update_inventories(&state.s, &r.z, &e.a, &r.x);
        let pi = profits(e, &r.x, &r.z, &l);
        let n = e.n();
        let checks = [
            ("output", r.x.as_slice()),
            ("profits", pi.as_slice()),
            ("demand", d.as_slice()),
            ("inventories", s.as_slice()),
        ];
        for (what, v) in checks {
            if let Some(k) = v.iter().position(|v| !v.is_finite()) {
                // Inventory matrices are column-major with one column per holder.
                let holder = if v.len() == n { k } else { k / n };
                return Err(Error::Numerical(format!(
                    "non-finite {what} for industry {} on day {}",
                    e.codes[holder], shocks.t
                )));
            }
        }
        if !c_tilde_d.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite consumption demand on day {}",
                shocks.t
            )));
        }
        Ok(SimState {
            t: shocks.t,
            s,
            l,
            l_max,
            d_prev: d,
            orders,
            c_d,
            f_d,
            c_tilde_d,
            xi: shocks.xi,
            theta,
            x: r.x,
            c: r.c,
            f: r.f,
            z: r.z,
            pi,
            l_star,
            x_cap,
            x_inp,
        })
    }

    /// Runs `horizon` days from the steady state.
    pub fn run(&self, shocks: &dyn ShockSource, horizon: usize) -> Result<SimSeries> {
        self.run_observed(shocks, horizon, |_| {})
    }

    /// Like [`Model::run`], calling `observe` with every state including day 0.
    pub fn run_observed(
        &self,
        shocks: &dyn ShockSource,
        horizon: usize,
        mut observe: impl FnMut(&SimState),
    ) -> Result<SimSeries> {
        let mut state = self.init_steady_state();
        let mut series = SimSeries::with_capacity(self.economy, horizon + 1);
        observe(&state);
        series.push(&state);
        for t in 1..=horizon {
            state = self.step(&state, &shocks.shocks(t))?;
            observe(&state);
            series.push(&state);
        }
        Ok(series)
    }
}

/// Convenience wrapper around [`Model::run`].
pub fn run_simulation(
    economy: &Economy,
    criticality: &CriticalityMatrix,
    targets: &InventoryTargets,
    params: &EconParams,
    shocks: &dyn ShockSource,
    horizon: usize,
) -> Result<SimSeries> {
    Model::new(economy, criticality, targets, params)?.run(shocks, horizon)
}
