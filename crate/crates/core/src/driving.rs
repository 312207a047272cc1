//! Schedules `xi(t)` for the position of the confining-potential minimum.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrivingKind {
    /// Two instantaneous half-displacements at `t = 0` and `t = T`.
    TwoStep,
    /// Constant velocity `xi(T) / T`.
    LinearRamp,
    /// `xi(T) [t/T + sin(2 pi t/T) / (2 pi)]`; the dot starts and stops with velocity `2 xi(T)/T`.
    SinusoidalBroken,
    /// `xi(T) [t/T - sin(2 pi t/T) / (2 pi)]`; zero velocity at both ends.
    SinusoidalSmooth,
    /// A single instantaneous displacement at `t = 0`; `T` only marks where the
    /// residual amplitude is read off.
    Step,
    /// Piecewise-linear interpolation of a sampled schedule.
    Tabulated,
}

impl DrivingKind {
    /// The four schedules that admit a residual-free spin flip.
    pub const NAMED: [DrivingKind; 4] = [
        DrivingKind::TwoStep,
        DrivingKind::LinearRamp,
        DrivingKind::SinusoidalBroken,
        DrivingKind::SinusoidalSmooth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DrivingKind::TwoStep => "two_step",
            DrivingKind::LinearRamp => "linear_ramp",
            DrivingKind::SinusoidalBroken => "sinusoidal_broken",
            DrivingKind::SinusoidalSmooth => "sinusoidal_smooth",
            DrivingKind::Step => "step",
            DrivingKind::Tabulated => "tabulated",
        }
    }
}

impl fmt::Display for DrivingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for DrivingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "two_step" => DrivingKind::TwoStep,
            "linear_ramp" => DrivingKind::LinearRamp,
            "sinusoidal_broken" => DrivingKind::SinusoidalBroken,
            "sinusoidal_smooth" => DrivingKind::SinusoidalSmooth,
            "step" => DrivingKind::Step,
            "tabulated" => DrivingKind::Tabulated,
            other => return Err(Error::domain("kind", format!("unknown driving `{other}`"))),
        })
    }
}

/// One smooth stretch of a schedule, as seen by the trajectory solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Piece {
    /// `xi = xi0 + slope (t - start)`.
    Affine { start: f64, xi0: f64, slope: f64 },
    /// `xi = amp [t/period + sign sin(2 pi t/period)/(2 pi)]`, always starting at `t = 0`.
    Sinusoid { amp: f64, period: f64, sign: f64 },
}

impl Piece {
    pub(crate) fn start(&self) -> f64 {
        match *self {
            Piece::Affine { start, .. } => start,
            Piece::Sinusoid { .. } => 0.0,
        }
    }

    pub(crate) fn xi(&self, t: f64) -> f64 {
        match *self {
            Piece::Affine { start, xi0, slope } => xi0 + slope * (t - start),
            Piece::Sinusoid { amp, period, sign } => {
                amp * (t / period + sign * (2.0 * PI * t / period).sin() / (2.0 * PI))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrivingProfile {
    kind: DrivingKind,
    xi_t: f64,
    transit: f64,
    table: Option<Vec<(f64, f64)>>,
    pieces: Vec<Piece>,
}

impl DrivingProfile {
    /// A closed-form schedule reaching `xi_t` at time `transit`.
    pub fn new(kind: DrivingKind, xi_t: f64, transit: f64) -> Result<Self> {
        if kind == DrivingKind::Tabulated {
            return Err(Error::domain("kind", "tabulated profiles need a table"));
        }
        if !xi_t.is_finite() {
            return Err(Error::domain("xi_T", "must be finite"));
        }
        if !(transit.is_finite() && transit > 0.0) {
            return Err(Error::domain("T", "transit time must be positive"));
        }
        Ok(Self {
            kind,
            xi_t,
            transit,
            table: None,
            pieces: Vec::new(),
        }
        .with_pieces())
    }

    /// Dot that never moves; observables stay at their initial values.
    pub fn at_rest(transit: f64) -> Result<Self> {
        Self::new(DrivingKind::LinearRamp, 0.0, transit)
    }

    /// The residual-free spin-flip schedule of `kind`.
    pub fn spin_flip(kind: DrivingKind, params: &SystemParams) -> Result<Self> {
        let (transit, xi_t) = spin_flip_schedule(kind, params)?;
        Self::new(kind, xi_t, transit)
    }

    /// Piecewise-linear schedule through `(t, xi)` samples.
    ///
    /// The table must start at `(0, 0)` with strictly increasing times; the dot
    /// holds the last value afterwards.
    pub fn tabulated(table: Vec<(f64, f64)>) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::domain("table", "needs at least two samples"));
        }
        if table.iter().any(|(t, x)| !t.is_finite() || !x.is_finite()) {
            return Err(Error::domain("table", "samples must be finite"));
        }
        if table[0] != (0.0, 0.0) {
            return Err(Error::domain("table", "must start at t = 0 with xi = 0"));
        }
        if table.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::domain("table", "times must be strictly increasing"));
        }
        let &(transit, xi_t) = table.last().unwrap();
        Ok(Self {
            kind: DrivingKind::Tabulated,
            xi_t,
            transit,
            table: Some(table),
            pieces: Vec::new(),
        }
        .with_pieces())
    }

    /// Reads a two-column CSV of `(t, xi)` in dimensionless units; rows that do
    /// not parse as numbers (headers) and `#` comments are skipped.
    pub fn tabulated_from_csv(
        path: impl AsRef<Path>,
        time_scale: f64,
        length_scale: f64,
    ) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path.as_ref())?;
        let mut table = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() < 2 {
                return Err(Error::Config(format!(
                    "table row {} has fewer than two columns",
                    i + 1
                )));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(t), Ok(x)) => table.push((t * time_scale, x * length_scale)),
                _ if table.is_empty() => continue,
                _ => return Err(Error::Config(format!("table row {} is not numeric", i + 1))),
            }
        }
        Self::tabulated(table)
    }

    pub fn kind(&self) -> DrivingKind {
        self.kind
    }

    /// Final displacement `xi(T)`.
    pub fn xi_t(&self) -> f64 {
        self.xi_t
    }

    /// Transit time `T`; the dot is at rest at `xi(T)` afterwards.
    pub fn transit(&self) -> f64 {
        self.transit
    }

    pub fn table(&self) -> Option<&[(f64, f64)]> {
        self.table.as_deref()
    }

    /// Dot position at time `t`.
    ///
    /// Instantaneous steps are right-continuous: `TwoStep` returns `xi(T)/2` on
    /// `[0, T)`, and `Step` is already displaced at `t = 0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain("t", "time must be non-negative"));
        }
        Ok(self.xi(t))
    }

    /// Unchecked [`DrivingProfile::evaluate`] for internal hot loops (`t >= 0`).
    pub(crate) fn xi(&self, t: f64) -> f64 {
        if t >= self.transit && self.kind != DrivingKind::Step {
            return self.xi_t;
        }
        self.piece_at(t).xi(t)
    }

    /// `d xi / dt` away from steps.
    pub fn velocity(&self, t: f64) -> f64 {
        if t >= self.transit {
            return 0.0;
        }
        match self.piece_at(t) {
            Piece::Affine { slope, .. } => slope,
            Piece::Sinusoid { amp, period, sign } => {
                amp / period * (1.0 + sign * (2.0 * PI * t / period).cos())
            }
        }
    }

    /// Times where `xi` or its derivative jumps, excluding `t = 0`.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            DrivingKind::Step => Vec::new(),
            DrivingKind::Tabulated => self.table().unwrap()[1..].iter().map(|p| p.0).collect(),
            _ => vec![self.transit],
        }
    }

    fn with_pieces(mut self) -> Self {
        self.pieces = self.build_pieces();
        self
    }

    /// Smooth pieces covering `[0, inf)`, in order.
    pub(crate) fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn build_pieces(&self) -> Vec<Piece> {
        let hold = Piece::Affine {
            start: self.transit,
            xi0: self.xi_t,
            slope: 0.0,
        };
        let (x, tt) = (self.xi_t, self.transit);
        match self.kind {
            DrivingKind::Step => vec![Piece::Affine {
                start: 0.0,
                xi0: x,
                slope: 0.0,
            }],
            DrivingKind::TwoStep => vec![
                Piece::Affine {
                    start: 0.0,
                    xi0: 0.5 * x,
                    slope: 0.0,
                },
                hold,
            ],
            DrivingKind::LinearRamp => vec![
                Piece::Affine {
                    start: 0.0,
                    xi0: 0.0,
                    slope: x / tt,
                },
                hold,
            ],
            DrivingKind::SinusoidalBroken | DrivingKind::SinusoidalSmooth => {
                let sign = if self.kind == DrivingKind::SinusoidalBroken {
                    1.0
                } else {
                    -1.0
                };
                vec![
                    Piece::Sinusoid {
                        amp: x,
                        period: tt,
                        sign,
                    },
                    hold,
                ]
            }
            DrivingKind::Tabulated => {
                let table = self.table().unwrap();
                let mut pieces: Vec<Piece> = table
                    .windows(2)
                    .map(|w| Piece::Affine {
                        start: w[0].0,
                        xi0: w[0].1,
                        slope: (w[1].1 - w[0].1) / (w[1].0 - w[0].0),
                    })
                    .collect();
                pieces.push(hold);
                pieces
            }
        }
    }

    fn piece_at(&self, t: f64) -> Piece {
        let pieces = &self.pieces;
        let idx = pieces.partition_point(|p| p.start() <= t).max(1) - 1;
        pieces[idx]
    }

    /// Earliest time in `[0, T]` at which the dot reaches `target`, by bisection.
    ///
    /// Meaningful for monotone schedules; `target` outside the travelled range
    /// is a domain error.
    pub fn time_at_displacement(&self, target: f64) -> Result<f64> {
        let (lo_x, hi_x) = (self.xi_t.min(0.0), self.xi_t.max(0.0));
        if target < lo_x || target > hi_x {
            return Err(Error::domain(
                "xi",
                "displacement outside the travelled range",
            ));
        }
        let forward = self.xi_t >= 0.0;
        let reached = |t: f64| {
            let x = self.xi(t);
            if forward {
                x >= target
            } else {
                x <= target
            }
        };
        if reached(0.0) {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, self.transit);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if reached(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// Residual-free spin-flip schedule `(T, xi(T))` for a named driving.
///
/// The displacement is always `pi lambda_so / 2`; the times are the shortest
/// transit times for which the classical oscillator ends at rest in the dot.
pub fn spin_flip_schedule(kind: DrivingKind, params: &SystemParams) -> Result<(f64, f64)> {
    if !params.has_spin_orbit() {
        return Err(Error::NoSpinOrbit);
    }
    let t0 = params.t0;
    let transit = match kind {
        DrivingKind::TwoStep => 0.5 * t0,
        DrivingKind::LinearRamp => t0,
        DrivingKind::SinusoidalBroken => t0 / SQRT_2,
        DrivingKind::SinusoidalSmooth => 2.0 * t0,
        DrivingKind::Step | DrivingKind::Tabulated => {
            return Err(Error::domain(
                "kind",
                format!("`{kind}` has no residual-free spin-flip schedule"),
            ))
        }
    };
    Ok((transit, 0.5 * PI * params.lambda_so))
}
