//! Drives the dot along an arbitrary sampled path, here a ramp with a pause.

use spinwire::observables::{ground_occupation, spin_from_state};
use spinwire::{solve_trajectory, DrivingProfile, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::dimensionless(10.0, 0.0)?;
    let xi_t = 0.5 * std::f64::consts::PI * p.lambda_so;
    let path = vec![
        (0.0, 0.0),
        (p.t0, 0.5 * xi_t),
        (2.0 * p.t0, 0.5 * xi_t),
        (3.0 * p.t0, xi_t),
    ];
    let profile = DrivingProfile::tabulated(path)?;
    let traj = solve_trajectory(&profile, &p, 4.0 * p.t0, 17)?;
    for s in traj.samples() {
        println!(
            "t/T0 = {:5.2}  xi = {:7.4}  sz = {:9.6}  P0 = {:.6}",
            s.t / p.t0,
            s.xi,
            spin_from_state(&s, &p).sz,
            ground_occupation(&s, &p)
        );
    }
    Ok(())
}
