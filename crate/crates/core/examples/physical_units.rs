//! Spin-flip schedule of an InSb-like nanowire dot in laboratory units.

use spinwire::{spin_flip_schedule, DrivingKind, PhysicalParams, SystemParams};

fn main() -> spinwire::Result<()> {
    let p = SystemParams::from_physical(PhysicalParams {
        mass_ratio: 0.015,
        omega_mev: 10.0,
        lambda_so_nm: 150.0,
        beta_over_alpha: 0.0,
    })?;
    let units = p.units.expect("built from physical parameters");
    println!(
        "oscillator length {:.2} nm, lambda_so/sigma = {:.3}",
        units.length_nm, p.lambda_so
    );
    println!("period T0 = {:.1} fs", p.t0 * units.time_fs);
    for kind in DrivingKind::NAMED {
        let (transit, xi_t) = spin_flip_schedule(kind, &p)?;
        println!(
            "{:<18} T = {:7.1} fs, xi(T) = {:6.1} nm",
            kind,
            transit * units.time_fs,
            xi_t * units.length_nm
        );
    }
    Ok(())
}
