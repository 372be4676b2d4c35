//! The daily behavioral rules of the production network, as pure functions.

use nalgebra::{DMatrix, DVector};

use crate::data::{ConsFn, CriticalityMatrix, Economy, ProdFn};
use crate::error::{Error, Result};

/// Aggregate household consumption demand for the day.
///
/// `eps_tilde` lowers log demand; `l0_total` is pre-shock labor income.
#[allow(clippy::too_many_arguments)]
pub fn total_consumption_demand(
    prev: f64,
    l_star: f64,
    xi: f64,
    eps_tilde: f64,
    l0_total: f64,
    m: f64,
    rho: f64,
    cons_fn: ConsFn,
) -> Result<f64> {
    match cons_fn {
        ConsFn::Fixed => Ok(m * l0_total),
        ConsFn::Keynesian => Ok(m * l_star),
        ConsFn::Muellbauer => {
            if !(prev > 0.0 && l_star > 0.0 && xi > 0.0 && l0_total > 0.0 && m > 0.0) {
                return Err(Error::Numerical(format!(
                    "consumption needs positive incomes (previous demand {prev}, income {l_star}, xi {xi})"
                )));
            }
            let half = (1.0 - rho) / 2.0;
            let log_c =
                rho * prev.ln() + half * (m * l_star).ln() + half * (m * xi * l0_total).ln()
                    - eps_tilde;
            Ok(log_c.exp())
        }
    }
}

/// Shifted preference shares and the matching savings term.
pub fn preference_shares(
    theta0: &DVector<f64>,
    eps: &DVector<f64>,
    delta_s: f64,
    rho: f64,
) -> Result<(DVector<f64>, f64)> {
    let bar = theta0.component_mul(&eps.map(|e| 1.0 - e));
    let total = bar.sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("all preference weights vanished".into()));
    }
    let eps_tilde = delta_s * (1.0 - total) * (1.0 - rho);
    Ok((bar / total, eps_tilde))
}

/// Orders from each supplier (row) by each buyer (column), floored at zero.
pub fn intermediate_orders(
    a: &DMatrix<f64>,
    d_prev: &DVector<f64>,
    n_days: &[f64],
    z0: &DMatrix<f64>,
    s: &DMatrix<f64>,
    tau: f64,
) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        let o = a[(i, j)] * d_prev[j] + (n_days[j] * z0[(i, j)] - s[(i, j)]) / tau;
        o.max(0.0)
    })
}

/// Output that the current workforce can produce.
pub fn capacity_limit(l: &DVector<f64>, economy: &Economy) -> Result<DVector<f64>> {
    let mut cap = DVector::zeros(l.len());
    for i in 0..l.len() {
        let (l0, x0) = (economy.l0[i], economy.x0[i]);
        cap[i] = if l0 > 0.0 {
            l[i] / l0 * x0
        } else if x0 > 0.0 {
            return Err(Error::Validation(format!(
                "{} has output but no labor",
                economy.codes[i]
            )));
        } else {
            0.0
        };
    }
    Ok(cap)
}

/// Output allowed by input stocks; `+inf` where nothing binds.
pub fn input_limit(
    s: &DMatrix<f64>,
    economy: &Economy,
    criticality: &CriticalityMatrix,
    mode: ProdFn,
) -> DVector<f64> {
    let a = &economy.a;
    let n = economy.n();
    let ratio = |k: usize, i: usize| s[(k, i)] / a[(k, i)];
    DVector::from_fn(n, |i, _| {
        let positive = |k: &usize| a[(*k, i)] > 0.0;
        let strict_min = |set: &mut dyn Iterator<Item = usize>| {
            set.filter(positive)
                .map(|k| ratio(k, i))
                .fold(f64::INFINITY, f64::min)
        };
        match mode {
            ProdFn::Leontief => strict_min(&mut (0..n)),
            ProdFn::CriticalBaseline => strict_min(&mut criticality.critical[i].iter().copied()),
            ProdFn::ImportantCritical => strict_min(
                &mut criticality.critical[i]
                    .iter()
                    .chain(&criticality.important[i])
                    .copied(),
            ),
            ProdFn::ImportantHalf => {
                let hard = strict_min(&mut criticality.critical[i].iter().copied());
                let x0 = economy.x0[i];
                let soft = criticality.important[i]
                    .iter()
                    .copied()
                    .filter(positive)
                    .map(|k| 0.5 * (ratio(k, i) + x0))
                    .fold(f64::INFINITY, f64::min);
                hard.min(soft)
            }
            ProdFn::Linear => {
                let (stock, coef) = (0..n)
                    .filter(positive)
                    .fold((0.0, 0.0), |(s_sum, a_sum), k| {
                        (s_sum + s[(k, i)], a_sum + a[(k, i)])
                    });
                if coef > 0.0 {
                    stock / coef
                } else {
                    f64::INFINITY
                }
            }
        }
    })
}

/// Realized output and pro-rata deliveries.
#[derive(Debug, Clone)]
pub struct Rationed {
    pub x: DVector<f64>,
    pub z: DMatrix<f64>,
    pub c: DVector<f64>,
    pub f: DVector<f64>,
}

/// Produces the smallest of capacity, input limit and demand, shared pro rata.
pub fn realize_and_ration(
    x_cap: &DVector<f64>,
    x_inp: &DVector<f64>,
    orders: &DMatrix<f64>,
    c_d: &DVector<f64>,
    f_d: &DVector<f64>,
) -> Result<Rationed> {
    let n = x_cap.len();
    if orders.iter().chain(c_d.iter()).any(|v| *v < 0.0) {
        return Err(Error::Numerical("negative demand component".into()));
    }
    let d = total_demand(orders, c_d, f_d);
    let mut x = DVector::zeros(n);
    let mut share = DVector::zeros(n);
    for i in 0..n {
        if d[i] > 0.0 {
            x[i] = x_cap[i].min(x_inp[i]).min(d[i]);
            share[i] = x[i] / d[i];
        }
    }
    let z = DMatrix::from_fn(n, n, |i, j| orders[(i, j)] * share[i]);
    Ok(Rationed {
        c: c_d.component_mul(&share),
        f: f_d.component_mul(&share),
        x,
        z,
    })
}

pub fn total_demand(orders: &DMatrix<f64>, c_d: &DVector<f64>, f_d: &DVector<f64>) -> DVector<f64> {
    orders.column_sum() + c_d + f_d
}

/// New stocks after deliveries arrive and production draws inputs down.
///
/// Each input is used at its technical rate, capped by the stock on hand; for
/// binding inputs the cap never bites because output already respects the stock.
pub fn consume_inputs_and_update_inventories(
    s: &DMatrix<f64>,
    z: &DMatrix<f64>,
    a: &DMatrix<f64>,
    x: &DVector<f64>,
) -> DMatrix<f64> {
    DMatrix::from_fn(s.nrows(), s.ncols(), |i, j| {
        let used = (a[(i, j)] * x[j]).min(s[(i, j)]);
        (s[(i, j)] + z[(i, j)] - used).max(0.0)
    })
}

/// Hires towards yesterday's binding constraint, then clamps to available labor.
#[allow(clippy::too_many_arguments)]
pub fn labor_adjustment(
    l: &DVector<f64>,
    economy: &Economy,
    x_cap: &DVector<f64>,
    x_inp: &DVector<f64>,
    d: &DVector<f64>,
    l_max: &DVector<f64>,
    gamma_h: f64,
    gamma_f: f64,
) -> DVector<f64> {
    DVector::from_fn(l.len(), |i, _| {
        let x0 = economy.x0[i];
        let delta = if x0 > 0.0 {
            economy.l0[i] / x0 * (x_inp[i].min(d[i]) - x_cap[i])
        } else {
            0.0
        };
        let rate = if delta >= 0.0 { gamma_h } else { gamma_f };
        (l[i] + rate * delta).clamp(0.0, l_max[i])
    })
}

/// Labor income plus benefits replacing a share `b` of the loss.
pub fn household_income(l_tilde: f64, l0_tilde: f64, b: f64) -> f64 {
    l_tilde + b * (l0_tilde - l_tilde)
}

/// Profits after intermediate purchases, wages and output-proportional expenses.
pub fn profits(
    economy: &Economy,
    x: &DVector<f64>,
    z: &DMatrix<f64>,
    l: &DVector<f64>,
) -> DVector<f64> {
    let purchases = z.row_sum();
    DVector::from_fn(x.len(), |i, _| {
        let x0 = economy.x0[i];
        let expenses = if x0 > 0.0 {
            economy.e0[i] * x[i] / x0
        } else {
            0.0
        };
        x[i] - purchases[i] - l[i] - expenses
    })
}

/// Labor ceiling under the day's supply shock.
pub fn labor_ceiling(economy: &Economy, eps_s: &DVector<f64>) -> DVector<f64> {
    economy.l0.component_mul(&eps_s.map(|e| 1.0 - e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn two_input_economy() -> Economy {
        // industry 2 uses 0.1 of good 0 and 0.3 of good 1 per unit
        let z = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 10.0, 0.0, 0.0, 30.0, 0.0, 0.0, 0.0]);
        Economy::new(
            vec!["a".into(), "b".into(), "c".into()],
            z,
            v(&[100.0, 100.0, 100.0]),
            v(&[90.0, 70.0, 100.0]),
            v(&[0.0, 0.0, 0.0]),
            v(&[30.0, 30.0, 30.0]),
            v(&[0.0, 0.0, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn steady_state_consumption_unchanged() {
        let c = total_consumption_demand(
            82.0,
            100.0,
            1.0,
            0.0,
            100.0,
            0.82,
            0.987,
            ConsFn::Muellbauer,
        )
        .unwrap();
        assert!((c - 82.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_and_keynesian_forms() {
        let fixed = total_consumption_demand(1.0, 50.0, 0.5, 0.3, 100.0, 0.82, 0.9, ConsFn::Fixed);
        assert_eq!(fixed.unwrap(), 82.0);
        let k = total_consumption_demand(1.0, 50.0, 0.5, 0.3, 100.0, 0.82, 0.9, ConsFn::Keynesian);
        assert_eq!(k.unwrap(), 41.0);
    }

    #[test]
    fn no_persistence_jumps_to_target() {
        let c =
            total_consumption_demand(10.0, 100.0, 1.0, 0.0, 100.0, 0.82, 0.0, ConsFn::Muellbauer)
                .unwrap();
        assert!((c - 82.0).abs() < 1e-12);
    }

    #[test]
    fn muellbauer_rejects_zero_income() {
        let r = total_consumption_demand(1.0, 0.0, 1.0, 0.0, 100.0, 0.82, 0.9, ConsFn::Muellbauer);
        assert!(matches!(r, Err(Error::Numerical(_))));
    }

    #[test]
    fn preference_shift_example() {
        let (theta, eps_tilde) =
            preference_shares(&v(&[0.5, 0.5]), &v(&[1.0, 0.0]), 0.5, 0.987).unwrap();
        assert_eq!(theta, v(&[0.0, 1.0]));
        assert!((eps_tilde - 0.5 * 0.5 * 0.013).abs() < 1e-15);
        let (theta, eps_tilde) =
            preference_shares(&v(&[0.3, 0.7]), &v(&[0.0, 0.0]), 0.5, 0.987).unwrap();
        assert_eq!(theta, v(&[0.3, 0.7]));
        assert_eq!(eps_tilde, 0.0);
        assert!(preference_shares(&v(&[1.0]), &v(&[1.0]), 0.5, 0.9).is_err());
    }

    #[test]
    fn orders_with_inventory_gap() {
        let a = DMatrix::from_element(1, 1, 0.2);
        let z0 = DMatrix::from_element(1, 1, 20.0);
        let o = intermediate_orders(
            &a,
            &v(&[100.0]),
            &[10.0],
            &z0,
            &DMatrix::from_element(1, 1, 150.0),
            10.0,
        );
        assert!((o[(0, 0)] - 25.0).abs() < 1e-12);
        let o = intermediate_orders(
            &a,
            &v(&[100.0]),
            &[10.0],
            &z0,
            &DMatrix::from_element(1, 1, 400.0),
            10.0,
        );
        assert_eq!(o[(0, 0)], 0.0);
    }

    #[test]
    fn capacity_scales_with_labor() {
        let e = two_input_economy();
        let cap = capacity_limit(&v(&[15.0, 30.0, 0.0]), &e).unwrap();
        assert_eq!(cap, v(&[50.0, 100.0, 0.0]));
    }

    #[test]
    fn input_limit_modes() {
        let e = two_input_economy();
        let mut s = DMatrix::zeros(3, 3);
        s[(0, 2)] = 5.0;
        s[(1, 2)] = 12.0;
        let both = CriticalityMatrix::from_ratings(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0],
        ))
        .unwrap();
        let x = input_limit(&s, &e, &both, ProdFn::CriticalBaseline);
        assert!((x[2] - 40.0).abs() < 1e-12);
        assert!(x[0].is_infinite() && x[1].is_infinite());
        let x = input_limit(&s, &e, &both, ProdFn::Linear);
        assert!((x[2] - 42.5).abs() < 1e-12);

        // good 1 only important and fully depleted
        s[(1, 2)] = 0.0;
        s[(0, 2)] = 1e6;
        let half = CriticalityMatrix::from_ratings(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 1.0],
        ))
        .unwrap();
        let x = input_limit(&s, &e, &half, ProdFn::ImportantHalf);
        assert!((x[2] - 50.0).abs() < 1e-12);
        assert!(input_limit(&s, &e, &half, ProdFn::CriticalBaseline)[2].is_infinite());
        assert_eq!(
            input_limit(&s, &e, &half, ProdFn::ImportantCritical)[2],
            0.0
        );
        assert_eq!(input_limit(&s, &e, &half, ProdFn::Leontief)[2], 0.0);
    }

    #[test]
    fn rationing_is_pro_rata() {
        let orders = DMatrix::from_element(1, 1, 30.0);
        let r = realize_and_ration(&v(&[50.0]), &v(&[40.0]), &orders, &v(&[20.0]), &v(&[10.0]))
            .unwrap();
        assert_eq!(r.x[0], 40.0);
        assert!((r.z[(0, 0)] - 20.0).abs() < 1e-12);
        assert!((r.c[0] - 40.0 / 3.0).abs() < 1e-12);
        let r = realize_and_ration(
            &v(&[50.0]),
            &v(&[f64::INFINITY]),
            &orders,
            &v(&[5.0]),
            &v(&[5.0]),
        )
        .unwrap();
        assert_eq!(r.x[0], 40.0);
        assert_eq!(r.z[(0, 0)], 30.0);
        let zero = DMatrix::zeros(1, 1);
        let r =
            realize_and_ration(&v(&[50.0]), &v(&[40.0]), &zero, &v(&[0.0]), &v(&[0.0])).unwrap();
        assert_eq!(r.x[0], 0.0);
    }

    #[test]
    fn short_noncritical_input_runs_dry() {
        let s = DMatrix::from_element(1, 1, 3.0);
        let a = DMatrix::from_element(1, 1, 0.05);
        let next =
            consume_inputs_and_update_inventories(&s, &DMatrix::zeros(1, 1), &a, &v(&[100.0]));
        assert_eq!(next[(0, 0)], 0.0);
    }

    #[test]
    fn firing_example() {
        // l0/x0 = 0.3, min(inp, d) = 80, cap = 100
        let e = Economy::new(
            vec!["a".into()],
            DMatrix::zeros(1, 1),
            v(&[100.0]),
            v(&[100.0]),
            v(&[0.0]),
            v(&[30.0]),
            v(&[0.0]),
        )
        .unwrap();
        let l = labor_adjustment(
            &v(&[30.0]),
            &e,
            &v(&[100.0]),
            &v(&[f64::INFINITY]),
            &v(&[80.0]),
            &v(&[30.0]),
            1.0 / 30.0,
            1.0 / 15.0,
        );
        assert!((l[0] - 29.6).abs() < 1e-12);
    }

    #[test]
    fn benefits() {
        assert_eq!(household_income(80.0, 100.0, 0.0), 80.0);
        assert_eq!(household_income(80.0, 100.0, 1.0), 100.0);
        assert!((household_income(80.0, 100.0, 0.8) - 96.0).abs() < 1e-12);
    }
}
