//! Combines several analysts' input ratings into one criticality matrix.

use reopen_core::data::{aggregate_criticality, RatingGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    // Row i, column j: how badly industry j misses input i. None is unrated.
    let analysts = [
        vec![
            None,
            Some(1.0),
            Some(0.0),
            Some(0.5),
            None,
            Some(1.0),
            Some(0.0),
            Some(0.0),
            None,
        ],
        vec![
            None,
            Some(1.0),
            Some(0.5),
            Some(0.5),
            None,
            Some(0.5),
            None,
            Some(0.0),
            None,
        ],
        vec![
            None,
            Some(0.5),
            Some(0.5),
            Some(1.0),
            None,
            None,
            Some(0.0),
            Some(0.0),
            None,
        ],
    ];
    let grids = analysts
        .into_iter()
        .map(|cells| RatingGrid::new(n, cells))
        .collect::<Result<Vec<_>, _>>()?;
    let (m, warnings) = aggregate_criticality(&grids)?;
    println!("consensus ratings\n{}", m.ratings);
    for (j, inputs) in m.critical.iter().enumerate() {
        println!("industry {j}: critical inputs {inputs:?}");
    }
    for w in warnings {
        println!("warning: {w}");
    }
    Ok(())
}
