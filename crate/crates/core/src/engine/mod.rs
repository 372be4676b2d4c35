//! Daily simulation of the production network.

mod model;
pub mod rules;
mod series;

pub use model::{run_simulation, DayShocks, Model, NoShocks, ShockSource, SimState};
pub use rules::{
    capacity_limit, consume_inputs_and_update_inventories, household_income, input_limit,
    intermediate_orders, labor_adjustment, preference_shares, realize_and_ration,
    total_consumption_demand, Rationed,
};
pub use series::SimSeries;
