//! Spin, pseudo-spin, ground occupation and energy along a smooth sinusoidal transit.

use spinwire::observables::{sample_observables, time_series_table};
use spinwire::{solve_trajectory, DrivingKind, DrivingProfile, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::dimensionless(10.0, 0.0)?;
    let profile = DrivingProfile::new(
        DrivingKind::SinusoidalSmooth,
        0.5 * std::f64::consts::PI * p.lambda_so,
        3.0 * p.t0,
    )?;
    let traj = solve_trajectory(&profile, &p, profile.transit(), 13)?;
    let samples = sample_observables(&traj, &p);
    let table = time_series_table(&samples, &p);
    table
        .select(&["t_over_T0", "xi", "sz", "tz", "tz0", "P0", "E"])
        .expect("known columns")
        .write(std::io::stdout())?;
    Ok(())
}
