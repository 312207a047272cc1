//! Classical lag and residual oscillation for a linear ramp that misses resonance.

use spinwire::classical::{residual_amplitude, residual_closed_form};
use spinwire::{solve_trajectory, DrivingKind, DrivingProfile, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::dimensionless(10.0, 0.0)?;
    let transit = 1.5 * p.t0;
    let profile = DrivingProfile::new(
        DrivingKind::LinearRamp,
        0.5 * std::f64::consts::PI * p.lambda_so,
        transit,
    )?;
    let traj = solve_trajectory(&profile, &p, transit + 2.0 * p.t0, 15)?;
    println!(
        "{:>8} {:>9} {:>9} {:>9} {:>9}",
        "t/T0", "xi", "x_c", "v_c", "lag"
    );
    for s in traj.samples() {
        println!(
            "{:>8.3} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            s.t / p.t0,
            s.xi,
            s.x_c,
            s.v_c,
            s.lag()
        );
    }
    let solved = residual_amplitude(&traj, transit)?;
    let closed = residual_closed_form(DrivingKind::LinearRamp, transit, &p)?;
    println!(
        "residual amplitude: solved {:.12}, closed form {:.12}",
        solved.a, closed.a
    );
    Ok(())
}
