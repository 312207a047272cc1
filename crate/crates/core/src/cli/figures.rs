//! Plot-ready data for the residual-oscillation and adiabaticity panels.
//!
//! All panels use `sigma = 0.1 xi(T)` with `xi(T) = pi lambda_so / 2`.

use std::fmt;
use std::str::FromStr;

use crate::classical::{residual_amplitude, solve_trajectory};
use crate::driving::{DrivingKind, DrivingProfile};
use crate::error::{Error, Result};
use crate::io::CsvTable;
use crate::observables::{ground_occupation, pseudo_spin_ground_from_state, spin_from_state};
use crate::params::{display_lambda_over_sigma, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
}

impl Panel {
    pub const ALL: [Panel; 6] = [
        Panel::Fig2a,
        Panel::Fig2b,
        Panel::Fig3a,
        Panel::Fig3b,
        Panel::Fig3c,
        Panel::Fig3d,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Panel::Fig2a => "fig2a",
            Panel::Fig2b => "fig2b",
            Panel::Fig3a => "fig3a",
            Panel::Fig3b => "fig3b",
            Panel::Fig3c => "fig3c",
            Panel::Fig3d => "fig3d",
        }
    }

    pub fn table(self) -> Result<CsvTable> {
        let p = figure_params()?;
        match self {
            Panel::Fig2a => residual_panel(&p, false),
            Panel::Fig2b => residual_panel(&p, true),
            Panel::Fig3a => displacement_panel(&p, false),
            Panel::Fig3b => displacement_panel(&p, true),
            Panel::Fig3c => ground_occupation_panel(&p),
            Panel::Fig3d => minimum_occupation_panel(&p),
        }
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Panel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Panel::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::domain("panel", format!("unknown panel `{s}`; expected one of fig2a, fig2b, fig3a, fig3b, fig3c, fig3d")))
    }
}

/// Transit times of the `T/T0` panels.
pub const FIG3_TRANSITS: [f64; 2] = [2.0, 5.0];
pub const FIG3C_TRANSITS: [f64; 5] = [2.0, 2.5, 3.5, 4.5, 6.5];
const CURVE_POINTS: usize = 501;

pub fn figure_params() -> Result<SystemParams> {
    SystemParams::dimensionless(display_lambda_over_sigma(), 0.0)
}

fn spin_flip_profile(
    kind: DrivingKind,
    p: &SystemParams,
    t_over_t0: f64,
) -> Result<DrivingProfile> {
    DrivingProfile::new(
        kind,
        0.5 * std::f64::consts::PI * p.lambda_so,
        t_over_t0 * p.t0,
    )
}

/// Residual amplitude `a / xi(T)` after a transit of `t_over_t0` periods.
pub fn residual_ratio(kind: DrivingKind, p: &SystemParams, t_over_t0: f64) -> Result<f64> {
    let profile = spin_flip_profile(kind, p, t_over_t0)?;
    let traj = solve_trajectory(&profile, p, profile.transit(), 2)?;
    Ok(residual_amplitude(&traj, profile.transit())?.a / profile.xi_t())
}

/// `T/T0 = k/100` for `k = 5..=1000`.
pub fn fig2_grid() -> Vec<f64> {
    (5..=1000).map(|k| k as f64 / 100.0).collect()
}

fn residual_panel(p: &SystemParams, occupation: bool) -> Result<CsvTable> {
    let mut headers = vec!["T_over_T0"];
    headers.extend(DrivingKind::NAMED.iter().map(|k| k.as_str()));
    let note = if occupation {
        "P0(T) = exp(-a^2 / (2 sigma^2)) per driving"
    } else {
        "a / xi(T) per driving"
    };
    let mut table = CsvTable::new(&headers).comment(note);
    let xi_t = 0.5 * std::f64::consts::PI * p.lambda_so;
    for r in fig2_grid() {
        let mut row = vec![r];
        for kind in DrivingKind::NAMED {
            let ratio = residual_ratio(kind, p, r)?;
            row.push(if occupation {
                let a = ratio * xi_t / p.sigma;
                (-0.5 * a * a).exp()
            } else {
                ratio
            });
        }
        table.push(row);
    }
    Ok(table)
}

fn displacement_panel(p: &SystemParams, ground_doublet: bool) -> Result<CsvTable> {
    let value = if ground_doublet { "tz0" } else { "sz" };
    let mut table = CsvTable::new(&["series", "t_over_T", "xi_over_xi_T", value])
        .comment("series: <driving>_T<T/T0>, or adiabatic");
    for kind in [DrivingKind::LinearRamp, DrivingKind::SinusoidalSmooth] {
        for r in FIG3_TRANSITS {
            let profile = spin_flip_profile(kind, p, r)?;
            let traj = solve_trajectory(&profile, p, profile.transit(), CURVE_POINTS)?;
            let label = format!("{}_T{}", kind.as_str(), r);
            for s in traj.samples() {
                let v = if ground_doublet {
                    pseudo_spin_ground_from_state(&s, p).tz
                } else {
                    spin_from_state(&s, p).sz
                };
                table.push_labelled(
                    &label,
                    vec![s.t / profile.transit(), s.xi / profile.xi_t(), v],
                );
            }
        }
    }
    let xi_t = 0.5 * std::f64::consts::PI * p.lambda_so;
    for i in 0..CURVE_POINTS {
        let f = i as f64 / (CURVE_POINTS - 1) as f64;
        let xi = f * xi_t;
        let state = crate::classical::ClassicalState {
            t: 0.0,
            xi,
            x_c: xi,
            v_c: 0.0,
            phase: 0.0,
        };
        let v = if ground_doublet {
            pseudo_spin_ground_from_state(&state, p).tz
        } else {
            spin_from_state(&state, p).sz
        };
        table.push_labelled("adiabatic", vec![f, f, v]);
    }
    Ok(table)
}

fn ground_occupation_panel(p: &SystemParams) -> Result<CsvTable> {
    let mut table = CsvTable::new(&["T_over_T0", "t_over_T", "t_over_T0", "P0"])
        .comment("smooth sinusoidal driving");
    for r in FIG3C_TRANSITS {
        let profile = spin_flip_profile(DrivingKind::SinusoidalSmooth, p, r)?;
        let traj = solve_trajectory(&profile, p, profile.transit(), CURVE_POINTS)?;
        for s in traj.samples() {
            table.push(vec![
                r,
                s.t / profile.transit(),
                s.t / p.t0,
                ground_occupation(&s, p),
            ]);
        }
    }
    Ok(table)
}

/// `min_t P0(t)` over `[0, T]` and its location, for smooth sinusoidal driving.
pub fn minimum_ground_occupation(p: &SystemParams, t_over_t0: f64) -> Result<(f64, f64)> {
    let profile = spin_flip_profile(DrivingKind::SinusoidalSmooth, p, t_over_t0)?;
    let t_end = profile.transit();
    let n = 2001;
    let traj = solve_trajectory(&profile, p, t_end, n)?;
    let p0 = |t: f64| -> Result<f64> { Ok(ground_occupation(&traj.state_at(t)?, p)) };
    let (mut best, mut best_i) = (f64::INFINITY, 0);
    for (i, s) in traj.samples().enumerate() {
        let v = ground_occupation(&s, p);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    // golden-section refinement between the neighbouring samples
    let h = t_end / (n - 1) as f64;
    let (mut lo, mut hi) = (
        (best_i as f64 - 1.0).max(0.0) * h,
        ((best_i + 1) as f64 * h).min(t_end),
    );
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fc, mut fd) = (p0(c)?, p0(d)?);
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = p0(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = p0(d)?;
        }
    }
    let t_min = 0.5 * (lo + hi);
    let v = p0(t_min)?;
    Ok(if v < best {
        (v, t_min / t_end)
    } else {
        (best, best_i as f64 * h / t_end)
    })
}

/// `T/T0 = k/20` for `k = 20..=400`.
pub fn fig3d_grid() -> Vec<f64> {
    (20..=400).map(|k| k as f64 / 20.0).collect()
}

fn minimum_occupation_panel(p: &SystemParams) -> Result<CsvTable> {
    let mut table = CsvTable::new(&["T_over_T0", "P0_min", "t_min_over_T"])
        .comment("smooth sinusoidal driving");
    for r in fig3d_grid() {
        let (v, at) = minimum_ground_occupation(p, r)?;
        table.push(vec![r, v, at]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_names() {
        for p in Panel::ALL {
            assert_eq!(p.as_str().parse::<Panel>().unwrap(), p);
        }
        assert!("fig9".parse::<Panel>().is_err());
    }

    #[test]
    fn linear_ramp_vanishes_at_resonance() {
        let p = figure_params().unwrap();
        assert!(residual_ratio(DrivingKind::LinearRamp, &p, 1.0).unwrap() < 1e-12);
        // sudden limit: the full displacement remains as residual motion
        assert!((residual_ratio(DrivingKind::LinearRamp, &p, 1e-6).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn adiabatic_curves_at_half_displacement() {
        let t = Panel::Fig3a.table().unwrap();
        let row = t
            .rows()
            .iter()
            .find(|r| r[0] == "adiabatic" && r[2] == "0.5")
            .expect("midpoint row");
        assert!(row[3].parse::<f64>().unwrap().abs() < 1e-15);
    }

    #[test]
    fn large_transit_is_nearly_adiabatic() {
        let p = figure_params().unwrap();
        // slow limit: the lag vanishes and P0 is set by the peak dot
        // velocity 2 xi(T) / T, giving exp(-2 (xi(T) / (sigma w T))^2)
        for r in [20.0, 40.0] {
            let (v, at) = minimum_ground_occupation(&p, r).unwrap();
            let speed = 2.0 * 10.0 / (r * p.t0);
            let estimate = (-0.5 * speed * speed).exp();
            assert!((v - estimate).abs() < 1e-4, "T/T0 = {r}: {v} vs {estimate}");
            assert!((at - 0.5).abs() < 0.02, "{at}");
        }
        assert!(minimum_ground_occupation(&p, 25.0).unwrap().0 > 0.99);
    }
}
