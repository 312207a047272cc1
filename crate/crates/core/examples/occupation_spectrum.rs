//! Oscillator-manifold occupations after a sudden step follow a Poisson law.

use spinwire::observables::{occupations, poisson_probability, poisson_tail_n_max};
use spinwire::{solve_trajectory, DrivingKind, DrivingProfile, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::dimensionless(10.0, 0.0)?;
    let step = DrivingProfile::new(DrivingKind::Step, 2.0 * p.sigma, p.t0)?;
    let t = 1.25 * p.t0;
    let traj = solve_trajectory(&step, &p, t, 11)?;
    let nu = 2.0;
    let spectrum = occupations(&traj, &p, t, poisson_tail_n_max(nu))?;
    println!(
        "mean nu = {:.6}, total = {:.12}",
        spectrum.mean_nu,
        spectrum.total()
    );
    for (n, pn) in spectrum.p.iter().enumerate().take(10) {
        println!(
            "n = {n:2}  P_n = {pn:.10}  Poisson = {:.10}",
            poisson_probability(nu, n)
        );
    }
    let t = spectrum.pseudo_spin();
    println!("pseudo-spin ({:.6}, {:.6}, {:.6})", t.tx, t.ty, t.tz);
    Ok(())
}
