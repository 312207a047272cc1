//! Transit times that flip the spin and leave the dot's electron at rest.

use spinwire::classical::residual_amplitude;
use spinwire::observables::spin_expectation;
use spinwire::{solve_trajectory, DrivingKind, DrivingProfile, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::dimensionless(10.0, 0.0)?;
    println!(
        "{:<18} {:>8} {:>10} {:>10}",
        "driving", "T/T0", "a/xi(T)", "final sz"
    );
    for kind in DrivingKind::NAMED {
        let profile = DrivingProfile::spin_flip(kind, &p)?;
        let t = profile.transit();
        let traj = solve_trajectory(&profile, &p, t, 101)?;
        let a = residual_amplitude(&traj, t)?.relative;
        let sz = spin_expectation(&traj, &p, t)?.sz;
        println!("{:<18} {:>8.4} {:>10.1e} {:>10.6}", kind, t / p.t0, a, sz);
    }
    Ok(())
}
