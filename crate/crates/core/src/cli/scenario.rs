//! JSON scenario files.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::driving::{spin_flip_schedule, DrivingKind, DrivingProfile};
use crate::error::{Error, Result};
use crate::params::{display_lambda_over_sigma, PhysicalParams, SystemParams};

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parameter source: either `lambda_so_over_sigma` or the three physical inputs.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub lambda_so_over_sigma: Option<f64>,
    pub beta_over_alpha: Option<f64>,
    pub mass_ratio: Option<f64>,
    #[serde(rename = "omega_meV")]
    pub omega_mev: Option<f64>,
    pub lambda_so_nm: Option<f64>,
}

impl ParamsSpec {
    pub fn resolve(&self) -> Result<SystemParams> {
        let beta = self.beta_over_alpha.unwrap_or(0.0);
        let physical = [self.mass_ratio, self.omega_mev, self.lambda_so_nm];
        if physical.iter().any(Option::is_some) {
            if self.lambda_so_over_sigma.is_some() {
                return Err(config(
                    "params: give either lambda_so_over_sigma or mass_ratio/omega_meV/lambda_so_nm, not both",
                ));
            }
            let require = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| config(format!("params.{name} is required")))
            };
            return SystemParams::from_physical(PhysicalParams {
                mass_ratio: require(self.mass_ratio, "mass_ratio")?,
                omega_mev: require(self.omega_mev, "omega_meV")?,
                lambda_so_nm: require(self.lambda_so_nm, "lambda_so_nm")?,
                beta_over_alpha: beta,
            });
        }
        SystemParams::dimensionless(
            self.lambda_so_over_sigma
                .unwrap_or_else(display_lambda_over_sigma),
            beta,
        )
    }
}

/// Driving specification; lengths default to the spin-flip displacement.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: DrivingKind,
    #[serde(rename = "T_over_T0")]
    pub t_over_t0: Option<f64>,
    #[serde(rename = "xi_T_over_lambda_so")]
    pub xi_t_over_lambda_so: Option<f64>,
    #[serde(rename = "xi_T_over_sigma")]
    pub xi_t_over_sigma: Option<f64>,
    /// CSV with columns `t/T0, xi/sigma`, for `tabulated`.
    pub table: Option<PathBuf>,
}

impl ProfileSpec {
    pub fn named(kind: DrivingKind, t_over_t0: f64) -> Self {
        Self {
            kind,
            t_over_t0: Some(t_over_t0),
            xi_t_over_lambda_so: None,
            xi_t_over_sigma: None,
            table: None,
        }
    }

    pub fn resolve(&self, params: &SystemParams, base_dir: &Path) -> Result<DrivingProfile> {
        if self.kind == DrivingKind::Tabulated {
            let table = self
                .table
                .as_ref()
                .ok_or_else(|| config("profile.table is required for kind `tabulated`"))?;
            return DrivingProfile::tabulated_from_csv(
                base_dir.join(table),
                params.t0,
                params.sigma,
            );
        }
        if self.table.is_some() {
            return Err(config("profile.table is only valid for kind `tabulated`"));
        }
        let xi_t = match (self.xi_t_over_sigma, self.xi_t_over_lambda_so) {
            (Some(_), Some(_)) => {
                return Err(config(
                    "profile: give xi_T_over_sigma or xi_T_over_lambda_so, not both",
                ))
            }
            (Some(r), None) => r * params.sigma,
            (None, r) => {
                if !params.has_spin_orbit() {
                    return Err(config(
                        "profile.xi_T_over_sigma is required without spin-orbit coupling",
                    ));
                }
                r.unwrap_or(FRAC_PI_2) * params.lambda_so
            }
        };
        let transit = match self.t_over_t0 {
            Some(r) => r * params.t0,
            None if self.kind == DrivingKind::Step => {
                return Err(config("profile.T_over_T0 is required for kind `step`"))
            }
            None => spin_flip_schedule(self.kind, params)?.0,
        };
        DrivingProfile::new(self.kind, xi_t, transit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Trajectory,
    Spin,
    PseudoSpin,
    Occupation,
    Energy,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Trajectory,
        Observable::Spin,
        Observable::PseudoSpin,
        Observable::Occupation,
        Observable::Energy,
    ];

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Observable::Trajectory => &["xi", "x_c", "v_c", "phase"],
            Observable::Spin => &["sx", "sy", "sz"],
            Observable::PseudoSpin => &["tx", "ty", "tz", "tz0"],
            Observable::Occupation => &["P0", "nu"],
            Observable::Energy => &["E"],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub points: Option<usize>,
    #[serde(rename = "dt_over_T0")]
    pub dt_over_t0: Option<f64>,
}

impl GridOverrides {
    /// `other` wins where set.
    pub fn merged(self, other: GridOverrides) -> GridOverrides {
        GridOverrides {
            points: other.points.or(self.points),
            dt_over_t0: other.dt_over_t0.or(self.dt_over_t0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
pub enum SweepAxis {
    #[serde(rename = "T_over_T0")]
    #[value(name = "T_over_T0")]
    TOverT0,
    #[serde(rename = "lambda_so_over_sigma")]
    #[value(name = "lambda_so_over_sigma")]
    LambdaSoOverSigma,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::TOverT0 => "T_over_T0",
            SweepAxis::LambdaSoOverSigma => "lambda_so_over_sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps < 2 {
            return Err(Error::domain(
                "sweep.steps",
                format!("must be at least 2, got {}", self.steps),
            ));
        }
        if !(self.from.is_finite() && self.to.is_finite()) || self.from == self.to {
            return Err(Error::domain("sweep.from", "sweep range is empty"));
        }
        let n = self.steps - 1;
        Ok((0..=n)
            .map(|i| self.from + (self.to - self.from) * i as f64 / n as f64)
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Oracle snapshot times written by `compare`.
    #[serde(default, rename = "snapshots_over_T0")]
    pub snapshots_over_t0: Vec<f64>,
}

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: Option<String>,
    #[serde(default)]
    pub params: ParamsSpec,
    pub profile: ProfileSpec,
    /// Defaults to one period after the dot stops.
    #[serde(rename = "t_end_over_T0")]
    pub t_end_over_t0: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub observables: Option<Vec<Observable>>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub grid: GridOverrides,
    pub sweep: Option<SweepSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_samples() -> usize {
    201
}

impl Scenario {
    pub fn new(params: ParamsSpec, profile: ProfileSpec) -> Self {
        Self {
            name: None,
            params,
            profile,
            t_end_over_t0: None,
            samples: default_samples(),
            observables: None,
            output: OutputSpec::default(),
            grid: GridOverrides::default(),
            sweep: None,
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut s: Scenario =
            serde_json::from_str(text).map_err(|e| config(format!("scenario: {e}")))?;
        s.base_dir = base_dir.to_path_buf();
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut s = Self::from_json(&text, &base)?;
        if s.name.is_none() {
            s.name = path.file_stem().map(|n| n.to_string_lossy().into_owned());
        }
        Ok(s)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    pub fn resolve(&self) -> Result<Resolved> {
        if self.samples < 2 {
            return Err(Error::domain(
                "samples",
                format!("must be at least 2, got {}", self.samples),
            ));
        }
        let params = self.params.resolve()?;
        let profile = self.profile.resolve(&params, &self.base_dir)?;
        let t_end = match self.t_end_over_t0 {
            Some(r) if r.is_finite() && r > 0.0 => r * params.t0,
            Some(r) => {
                return Err(Error::domain(
                    "t_end_over_T0",
                    format!("must be positive, got {r}"),
                ))
            }
            None => profile.transit() + params.t0,
        };
        Ok(Resolved {
            params,
            profile,
            t_end,
        })
    }

    pub fn columns(&self) -> Vec<&'static str> {
        let selected = self.observables.as_deref().unwrap_or(&Observable::ALL);
        let mut cols = vec!["t", "t_over_T0"];
        for o in Observable::ALL {
            if selected.contains(&o) {
                cols.extend_from_slice(o.columns());
            }
        }
        cols
    }
}

/// Scenario with parameters and driving constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: SystemParams,
    pub profile: DrivingProfile,
    pub t_end: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        Scenario::from_json(text, Path::new("."))
    }

    #[test]
    fn minimal_scenario_defaults_to_spin_flip() {
        let s = parse(
            r#"{"params": {"lambda_so_over_sigma": 10}, "profile": {"kind": "linear_ramp"}}"#,
        )
        .unwrap();
        let r = s.resolve().unwrap();
        assert!((r.profile.transit() - r.params.t0).abs() < 1e-12);
        assert!((r.profile.xi_t() - FRAC_PI_2 * 10.0).abs() < 1e-12);
        assert!((r.t_end - 2.0 * r.params.t0).abs() < 1e-12);
        assert_eq!(s.columns().len(), 16);
    }

    #[test]
    fn errors_name_the_field() {
        let err = parse(r#"{"profile": {"kind": "linear_ramp", "T_over_T": 1}}"#).unwrap_err();
        assert!(err.to_string().contains("T_over_T"), "{err}");
        let err = parse(
            r#"{"params": {"mass_ratio": 0.015}, "profile": {"kind": "step", "T_over_T0": 1}}"#,
        )
        .unwrap()
        .resolve()
        .unwrap_err();
        assert!(err.to_string().contains("omega_meV"), "{err}");
        let err = parse(r#"{"profile": {"kind": "warp"}}"#).unwrap_err();
        assert!(err.to_string().contains("warp"), "{err}");
        let err = parse(r#"{"profile": {"kind": "step"}}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("T_over_T0"), "{err}");
        let err = parse(r#"{"samples": 1, "profile": {"kind": "two_step"}}"#)
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(err.to_string().contains("samples"), "{err}");
    }

    #[test]
    fn physical_parameters() {
        let s = parse(
            r#"{"params": {"mass_ratio": 0.015, "omega_meV": 10, "lambda_so_nm": 150},
                "profile": {"kind": "sinusoidal_smooth", "xi_T_over_sigma": 3, "T_over_T0": 2}}"#,
        )
        .unwrap();
        let r = s.resolve().unwrap();
        assert!(r.params.units.is_some());
        assert!((r.profile.xi_t() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn observable_selection() {
        let s = parse(r#"{"profile": {"kind": "two_step"}, "observables": ["energy", "spin"]}"#)
            .unwrap();
        assert_eq!(s.columns(), ["t", "t_over_T0", "sx", "sy", "sz", "E"]);
    }

    #[test]
    fn sweep_values() {
        let s = SweepSpec {
            axis: SweepAxis::TOverT0,
            from: 0.25,
            to: 8.0,
            steps: 32,
        };
        let v = s.values().unwrap();
        assert_eq!(v.len(), 32);
        assert_eq!(v[3], 1.0);
        assert!(SweepSpec { steps: 1, ..s }.values().is_err());
        assert!(SweepSpec { to: 0.25, ..s }.values().is_err());
    }
}
