//! Final spin and residual motion over a range of transit times.

use spinwire::cli::{cmd_sweep, Scenario, SweepAxis, SweepSpec};

fn main() -> spinwire::Result<()> {
    let scenario = Scenario::from_json(
        r#"{ "params": { "lambda_so_over_sigma": 10 }, "profile": { "kind": "linear_ramp" } }"#,
        ".".as_ref(),
    )?;
    let sweep = SweepSpec {
        axis: SweepAxis::TOverT0,
        from: 0.5,
        to: 4.0,
        steps: 15,
    };
    let table = cmd_sweep(&scenario, &sweep)?;
    table
        .select(&["T_over_T0", "a_over_xi_T", "P0", "sz"])
        .expect("known columns")
        .write(std::io::stdout())?;
    Ok(())
}
