//! Checks the exact solution against the split-operator grid propagator.

use spinwire::oracle::{compare_with_analytic, GridSpec};
use spinwire::{solve_trajectory, DrivingKind, DrivingProfile, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::dimensionless(10.0, 0.0)?;
    let profile = DrivingProfile::new(
        DrivingKind::SinusoidalBroken,
        0.5 * std::f64::consts::PI * p.lambda_so,
        1.3 * p.t0,
    )?;
    let traj = solve_trajectory(&profile, &p, profile.transit() + 0.5 * p.t0, 41)?;
    let grid = GridSpec::default_for(&traj, &p)?;
    let cmp = compare_with_analytic(&traj, &p, grid)?;
    println!(
        "grid: {} points on [{:.2}, {:.2}], dt = T0/{:.0}",
        grid.n_points,
        grid.x_min,
        grid.x_max,
        p.t0 / grid.dt
    );
    println!("max |dsz| {:.2e}", cmp.max_dsz());
    println!("max |dP0| {:.2e}", cmp.max_dp0());
    println!("max |dE|  {:.2e}", cmp.max_denergy());
    println!("max infidelity {:.2e}", cmp.max_infidelity());
    Ok(())
}
