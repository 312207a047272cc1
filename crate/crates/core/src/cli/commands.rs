use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::figures::Panel;
use super::scenario::{GridOverrides, ParamsSpec, Resolved, Scenario, SweepAxis, SweepSpec};
use crate::classical::{residual_amplitude, solve_trajectory};
use crate::driving::{spin_flip_schedule, DrivingKind, DrivingProfile};
use crate::error::Result;
use crate::io::CsvTable;
use crate::observables::Spin;
use crate::observables::{
    ground_occupation, occupations_from_state, poisson_tail_n_max, pseudo_spin_at,
    sample_observables, spectrum_table, spin_from_state, time_series_table,
};
use crate::oracle::{
    compare_with_analytic, initial_kramers_state, Comparison, GridSpec, Propagator,
    DEFAULT_DT_OVER_T0, DEFAULT_POINTS,
};
use crate::params::SystemParams;

/// Oracle agreement tolerances for `sz`, `P0` and `E`.
pub const TOLERANCE: f64 = 1e-5;
/// Tolerance on the final ground-state occupation.
pub const FINAL_P0_TOLERANCE: f64 = 1e-6;

pub(crate) fn write_table(table: &CsvTable, path: PathBuf) -> Result<PathBuf> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    table.write(std::io::BufWriter::new(fs::File::create(&path)?))?;
    Ok(path)
}

/// Analytic time series and final occupation spectrum.
pub fn simulate_tables(scenario: &Scenario) -> Result<(CsvTable, CsvTable)> {
    let Resolved {
        params,
        profile,
        t_end,
    } = scenario.resolve()?;
    let traj = solve_trajectory(&profile, &params, t_end, scenario.samples)?;
    let samples = sample_observables(&traj, &params);
    let series = time_series_table(&samples, &params).comment(format!(
        "driving: {}, T = {}, xi_T = {}",
        profile.kind(),
        profile.transit(),
        profile.xi_t()
    ));
    let series = series
        .select(&scenario.columns())
        .expect("selected columns exist in the time series");
    let last = traj.sample(traj.times().len() - 1);
    let nu =
        crate::observables::displacement(&last, &params).norm_sqr() / (2.0 * params.sigma.powi(2));
    let spectrum = occupations_from_state(&last, &params, poisson_tail_n_max(nu));
    Ok((
        series,
        spectrum_table(&spectrum).comment(format!("t = {}", last.t)),
    ))
}

pub fn cmd_simulate(scenario: &Scenario, out: &Path) -> Result<Vec<PathBuf>> {
    let (series, spectrum) = simulate_tables(scenario)?;
    Ok(vec![
        write_table(&series, out.join(format!("{}.csv", scenario.name())))?,
        write_table(
            &spectrum,
            out.join(format!("{}_spectrum.csv", scenario.name())),
        )?,
    ])
}

pub fn cmd_figures(panels: &[Panel], out: &Path) -> Result<Vec<PathBuf>> {
    let tables: Vec<(Panel, CsvTable)> = panels
        .par_iter()
        .map(|&p| Ok((p, p.table()?)))
        .collect::<Result<_>>()?;
    tables
        .iter()
        .map(|(p, t)| write_table(t, out.join(format!("{p}.csv"))))
        .collect()
}

/// One pass/fail line of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.value < self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub comparison: Comparison,
    pub checks: Vec<Check>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{:<14} max|diff| = {:.3e}  tolerance {:.0e}  {}",
                    c.name,
                    c.value,
                    c.tolerance,
                    if c.passed() { "PASS" } else { "FAIL" }
                )
            })
            .collect()
    }
}

pub fn oracle_grid(
    traj: &crate::classical::ClassicalTrajectory,
    params: &SystemParams,
    grid: GridOverrides,
) -> Result<GridSpec> {
    GridSpec::sized_for(
        traj,
        params,
        grid.points.unwrap_or(DEFAULT_POINTS),
        grid.dt_over_t0.unwrap_or(DEFAULT_DT_OVER_T0),
    )
}

/// Analytic against oracle on the scenario's sample times.
pub fn cmd_compare(
    scenario: &Scenario,
    overrides: GridOverrides,
    out: Option<&Path>,
) -> Result<CompareReport> {
    let Resolved {
        params,
        profile,
        t_end,
    } = scenario.resolve()?;
    let traj = solve_trajectory(&profile, &params, t_end, scenario.samples)?;
    let grid = oracle_grid(&traj, &params, scenario.grid.merged(overrides))?;
    let comparison = compare_with_analytic(&traj, &params, grid)?;
    let last = comparison.last();
    let checks = vec![
        Check {
            name: "sz",
            value: comparison.max_dsz(),
            tolerance: TOLERANCE,
        },
        Check {
            name: "P0",
            value: comparison.max_dp0(),
            tolerance: TOLERANCE,
        },
        Check {
            name: "E",
            value: comparison.max_denergy(),
            tolerance: TOLERANCE,
        },
        Check {
            name: "final P0",
            value: (last.p0_oracle - last.p0_analytic).abs(),
            tolerance: FINAL_P0_TOLERANCE,
        },
    ];
    if let Some(dir) = out {
        write_table(
            &comparison.table(),
            dir.join(format!("{}_compare.csv", scenario.name())),
        )?;
        write_snapshots(scenario, &params, &profile, grid, dir)?;
    }
    Ok(CompareReport { comparison, checks })
}

fn write_snapshots(
    scenario: &Scenario,
    params: &SystemParams,
    profile: &DrivingProfile,
    grid: GridSpec,
    dir: &Path,
) -> Result<()> {
    let mut times: Vec<f64> = scenario
        .output
        .snapshots_over_t0
        .iter()
        .map(|r| r * params.t0)
        .collect();
    if times.is_empty() {
        return Ok(());
    }
    times.sort_by(f64::total_cmp);
    let mut field = initial_kramers_state(params, &grid, 0, Spin::Up, 0.0)?;
    let mut propagator = Propagator::new(grid, params, profile)?;
    for (r, t) in scenario.output.snapshots_over_t0.iter().zip(&times) {
        propagator.advance_to(&mut field, *t)?;
        write_table(
            &field.snapshot_table(),
            dir.join(format!("{}_snapshot_{r}T0.csv", scenario.name())),
        )?;
    }
    Ok(())
}

/// Columns of [`cmd_sweep`].
pub const SWEEP_COLUMNS: [&str; 8] = [
    "value",
    "T_over_T0",
    "lambda_so_over_sigma",
    "a",
    "a_over_xi_T",
    "P0",
    "sz",
    "tz",
];

/// Final-state observables at `t = T` across a parameter range.
pub fn cmd_sweep(scenario: &Scenario, sweep: &SweepSpec) -> Result<CsvTable> {
    let values = sweep.values()?;
    let rows: Vec<Vec<f64>> = values
        .par_iter()
        .map(|&v| sweep_point(scenario, sweep.axis, v))
        .collect::<Result<_>>()?;
    let mut table = CsvTable::new(&SWEEP_COLUMNS).comment(format!("axis: {}", sweep.axis.as_str()));
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}

fn sweep_point(scenario: &Scenario, axis: SweepAxis, value: f64) -> Result<Vec<f64>> {
    let mut s = scenario.clone();
    match axis {
        SweepAxis::TOverT0 => s.profile.t_over_t0 = Some(value),
        SweepAxis::LambdaSoOverSigma => {
            s.params = ParamsSpec {
                lambda_so_over_sigma: Some(value),
                beta_over_alpha: scenario.params.beta_over_alpha,
                ..ParamsSpec::default()
            }
        }
    }
    let Resolved {
        params, profile, ..
    } = s.resolve()?;
    let transit = profile.transit();
    let traj = solve_trajectory(&profile, &params, transit, 2)?;
    let a = residual_amplitude(&traj, transit)?.a;
    let end = traj.state_at(transit)?;
    Ok(vec![
        value,
        transit / params.t0,
        params.lambda_so / params.sigma,
        a,
        a / profile.xi_t().abs(),
        ground_occupation(&end, &params),
        spin_from_state(&end, &params).sz,
        pseudo_spin_at(end.xi, &params).tz,
    ])
}

/// Spin-flip transit time and final state for every named driving.
pub fn cmd_schedule(params: &SystemParams) -> Result<CsvTable> {
    let mut table = CsvTable::new(&[
        "kind",
        "T_over_T0",
        "xi_T_over_sigma",
        "xi_T_over_lambda_so",
        "a",
        "sz",
        "tz",
    ])
    .comment(format!(
        "lambda_so / sigma = {}",
        params.lambda_so / params.sigma
    ));
    for kind in DrivingKind::NAMED {
        let (transit, xi_t) = spin_flip_schedule(kind, params)?;
        let profile = DrivingProfile::new(kind, xi_t, transit)?;
        let traj = solve_trajectory(&profile, params, transit, 2)?;
        let end = traj.state_at(transit)?;
        table.push_labelled(
            kind.as_str(),
            vec![
                transit / params.t0,
                xi_t / params.sigma,
                xi_t / params.lambda_so,
                residual_amplitude(&traj, transit)?.a,
                spin_from_state(&end, params).sz,
                pseudo_spin_at(end.xi, params).tz,
            ],
        );
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::scenario::ProfileSpec;

    fn scenario(kind: DrivingKind, t_over_t0: f64) -> Scenario {
        Scenario::new(
            ParamsSpec {
                lambda_so_over_sigma: Some(10.0),
                ..ParamsSpec::default()
            },
            ProfileSpec::named(kind, t_over_t0),
        )
    }

    #[test]
    fn smooth_spin_flip_ends_flipped() {
        let mut s = scenario(DrivingKind::SinusoidalSmooth, 2.0);
        s.t_end_over_t0 = Some(2.0);
        let (series, _) = simulate_tables(&s).unwrap();
        let tz = series.column("tz").unwrap();
        assert!((tz.last().unwrap() + 0.5).abs() < 1e-9);
    }

    #[test]
    fn resting_dot_gives_constant_columns() {
        let mut s = scenario(DrivingKind::LinearRamp, 1.0);
        s.profile.xi_t_over_sigma = Some(0.0);
        let (series, _) = simulate_tables(&s).unwrap();
        for col in [
            "xi", "x_c", "v_c", "sx", "sy", "sz", "tx", "ty", "tz", "tz0", "P0", "E", "nu",
        ] {
            let v = series.column(col).unwrap();
            assert!(v.iter().all(|x| *x == v[0]), "{col}");
        }
    }

    #[test]
    fn linear_ramp_half_period_ground_occupation() {
        let s = scenario(DrivingKind::LinearRamp, 0.5);
        let (series, _) = simulate_tables(&s).unwrap();
        let p0 = *series.column("P0").unwrap().last().unwrap();
        let expected = (-50.0f64).exp();
        assert!((p0 - expected).abs() < 1e-9 * expected, "{p0}");
    }

    #[test]
    fn sweep_zeros_at_integer_periods() {
        let s = scenario(DrivingKind::LinearRamp, 1.0);
        let sweep = SweepSpec {
            axis: SweepAxis::TOverT0,
            from: 0.25,
            to: 8.0,
            steps: 32,
        };
        let t = cmd_sweep(&s, &sweep).unwrap();
        for (r, a) in t
            .column("T_over_T0")
            .unwrap()
            .iter()
            .zip(t.column("a").unwrap())
        {
            if r.fract() == 0.0 {
                assert!(a < 1e-12, "T/T0 = {r}: a = {a}");
            } else {
                assert!(a > 1e-3);
            }
        }
    }

    #[test]
    fn step_sweep_keeps_amplitude() {
        let mut s = scenario(DrivingKind::Step, 1.0);
        s.profile.xi_t_over_sigma = Some(1.5);
        let sweep = SweepSpec {
            axis: SweepAxis::TOverT0,
            from: 0.3,
            to: 7.0,
            steps: 12,
        };
        let t = cmd_sweep(&s, &sweep).unwrap();
        assert!(t
            .column("a")
            .unwrap()
            .iter()
            .all(|a| (a - 1.5).abs() < 1e-12));
    }

    #[test]
    fn lambda_sweep_is_monotone() {
        let s = scenario(DrivingKind::SinusoidalSmooth, 20.0);
        let sweep = SweepSpec {
            axis: SweepAxis::LambdaSoOverSigma,
            from: 2.0,
            to: 40.0,
            steps: 20,
        };
        let sz: Vec<f64> = cmd_sweep(&s, &sweep)
            .unwrap()
            .column("sz")
            .unwrap()
            .iter()
            .map(|v| v.abs())
            .collect();
        assert!(sz.windows(2).all(|w| w[1] > w[0]), "{sz:?}");
    }

    #[test]
    fn schedule_rows() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let t = cmd_schedule(&p).unwrap();
        assert_eq!(t.rows().len(), 4);
        let periods: Vec<&str> = t.rows().iter().map(|r| r[1].as_str()).collect();
        assert_eq!(periods[0], "0.5");
        assert!(t.rows().iter().all(|r| r[4].parse::<f64>().unwrap() < 1e-9));
    }
}
