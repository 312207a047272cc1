//! Brute-force grid integrator for the two-component Schrödinger equation.
//!
//! `H = p^2/(2m) + p (alpha sigma_y - beta sigma_x) + m w^2 (x - xi(t))^2 / 2`
//! is propagated by Strang splitting. Kinetic energy and the spin-orbit term
//! commute, so both are exponentiated exactly per momentum `k`; the potential
//! is sampled at the midpoint of each step. Adjacent half-steps in momentum
//! space are merged, so a step costs one forward and one inverse transform
//! per spin component.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::classical::ClassicalTrajectory;
use crate::driving::DrivingProfile;
use crate::error::{Error, Result};
use crate::hermite::hermite_functions_into;
use crate::io::CsvTable;
use crate::observables::{OccupationSpectrum, Spin, SpinExpectation, SpinorWavefunction};
use crate::params::SystemParams;

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 2048;
/// Default time step in units of `T0`.
pub const DEFAULT_DT_OVER_T0: f64 = 1.0 / 16000.0;
/// Coarsest admissible time step in units of `T0`.
pub const MAX_DT_OVER_T0: f64 = 1.0 / 500.0;
const MIN_POINTS: usize = 256;
const MIN_POINTS_PER_SIGMA: f64 = 16.0;
const NORM_DRIFT_LIMIT: f64 = 1e-8;
const EDGE_WEIGHT_LIMIT: f64 = 1e-10;

/// Periodic spatial grid and time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, dt: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::domain("x_min", "box must satisfy x_min < x_max"));
        }
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::domain(
                "grid_points",
                format!("must be a power of two and at least {MIN_POINTS}, got {n_points}"),
            ));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain("dt", format!("must be positive, got {dt}")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dt,
        })
    }

    /// Symmetric box of half-width `max(|xi_T|, max |x_c|) + 10 sigma`.
    ///
    /// The trajectory term keeps strongly excited runs, whose packet
    /// overshoots the final dot position, away from the periodic boundary.
    pub fn default_for(traj: &ClassicalTrajectory, params: &SystemParams) -> Result<Self> {
        Self::sized_for(traj, params, DEFAULT_POINTS, DEFAULT_DT_OVER_T0)
    }

    pub fn sized_for(
        traj: &ClassicalTrajectory,
        params: &SystemParams,
        n_points: usize,
        dt_over_t0: f64,
    ) -> Result<Self> {
        let reach = traj
            .x_c()
            .iter()
            .chain(traj.xi())
            .fold(traj.profile().xi_t().abs(), |m, v| m.max(v.abs()));
        let half = reach + 10.0 * params.sigma;
        Self::new(-half, half, n_points, dt_over_t0 * params.t0)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points)
            .map(|i| self.x_min + i as f64 * dx)
            .collect()
    }

    /// Angular wavenumbers in transform order.
    pub fn k(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n)
            .map(|i| {
                if i < n / 2 {
                    i as f64 * dk
                } else {
                    (i as f64 - n as f64) * dk
                }
            })
            .collect()
    }

    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Checks resolution of `sigma`, box coverage of `[-reach, reach]` and the time step.
    pub fn validate(&self, params: &SystemParams, reach: f64) -> Result<()> {
        let per_sigma = params.sigma / self.dx();
        if per_sigma < MIN_POINTS_PER_SIGMA {
            return Err(Error::Grid(format!(
                "{per_sigma:.1} points per sigma, need at least {MIN_POINTS_PER_SIGMA}"
            )));
        }
        let needed = 2.0 * (reach.abs() + 8.0 * params.sigma);
        if self.x_max - self.x_min < needed {
            return Err(Error::Grid(format!(
                "box width {:.3} below the required {needed:.3}",
                self.x_max - self.x_min
            )));
        }
        if self.dt > MAX_DT_OVER_T0 * params.t0 * (1.0 + 1e-12) {
            return Err(Error::Convergence(format!(
                "dt = {:.3e} T0 exceeds T0/500; use a smaller --dt-over-T0",
                self.dt / params.t0
            )));
        }
        Ok(())
    }
}

/// Oracle state: spinor amplitudes on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: GridSpec,
    pub psi_up: Vec<Complex64>,
    pub psi_down: Vec<Complex64>,
    pub t: f64,
}

impl SpinorField {
    /// `sum |psi|^2 dx`.
    pub fn norm(&self) -> f64 {
        let s: f64 = self
            .psi_up
            .iter()
            .zip(&self.psi_down)
            .map(|(u, d)| u.norm_sqr() + d.norm_sqr())
            .sum();
        s * self.grid.dx()
    }

    /// `<other|self>` with the grid rule `sum ... dx`.
    pub fn overlap(&self, other: &SpinorWavefunction) -> Complex64 {
        assert_eq!(other.up.len(), self.grid.n_points, "grids differ");
        let s: Complex64 = (0..self.grid.n_points)
            .map(|i| other.up[i].conj() * self.psi_up[i] + other.down[i].conj() * self.psi_down[i])
            .sum();
        s * self.grid.dx()
    }

    /// `1 - |<other|self>|^2`.
    pub fn infidelity(&self, other: &SpinorWavefunction) -> f64 {
        1.0 - self.overlap(other).norm_sqr()
    }

    pub fn to_wavefunction(&self) -> SpinorWavefunction {
        SpinorWavefunction {
            x: self.grid.x(),
            up: self.psi_up.clone(),
            down: self.psi_down.clone(),
            t: self.t,
        }
    }

    /// Columns `x, re_up, im_up, re_down, im_down`.
    pub fn snapshot_table(&self) -> CsvTable {
        let mut table = CsvTable::new(&["x", "re_up", "im_up", "re_down", "im_down"])
            .comment(format!("t = {}", self.t));
        for (i, x) in self.grid.x().into_iter().enumerate() {
            let (u, d) = (self.psi_up[i], self.psi_down[i]);
            table.push(vec![x, u.re, u.im, d.re, d.im]);
        }
        table
    }

    pub fn write_snapshot<W: Write>(&self, out: W) -> Result<()> {
        self.snapshot_table().write(out)
    }

    /// Probability within `width` of either box edge.
    pub fn edge_weight(&self, width: f64) -> f64 {
        let dx = self.grid.dx();
        let x = self.grid.x();
        let s: f64 = (0..self.grid.n_points)
            .filter(|&i| x[i] - self.grid.x_min < width || self.grid.x_max - x[i] < width)
            .map(|i| self.psi_up[i].norm_sqr() + self.psi_down[i].norm_sqr())
            .sum();
        s * dx
    }
}

/// `exp(-i theta n.sigma) chi_s` as `[up, down]`.
fn rotated(params: &SystemParams, theta: f64, s: Spin) -> [Complex64; 2] {
    let (nx, ny) = params.spin_orbit_axis();
    let (sin, cos) = theta.sin_cos();
    let mis = Complex64::new(0.0, -sin);
    match s {
        Spin::Up => [Complex64::new(cos, 0.0), mis * Complex64::new(nx, ny)],
        Spin::Down => [mis * Complex64::new(nx, -ny), Complex64::new(cos, 0.0)],
    }
}

/// Kramers state `W(x - xi0) psi_n(x - xi0) chi_s`, normalized on the grid.
pub fn initial_kramers_state(
    params: &SystemParams,
    grid: &GridSpec,
    n: usize,
    s: Spin,
    xi0: f64,
) -> Result<SpinorField> {
    let per_sigma = params.sigma / grid.dx();
    if per_sigma < MIN_POINTS_PER_SIGMA {
        return Err(Error::Grid(format!(
            "{per_sigma:.1} points per sigma, need at least {MIN_POINTS_PER_SIGMA}"
        )));
    }
    let sigma = params.sigma;
    let rate = params.rotation_rate();
    let mut buf = Vec::with_capacity(n + 1);
    let mut psi_up = Vec::with_capacity(grid.n_points);
    let mut psi_down = Vec::with_capacity(grid.n_points);
    for x in grid.x() {
        hermite_functions_into(n, (x - xi0) / sigma, &mut buf);
        let orbital = buf[n] / sigma.sqrt();
        let [a, b] = rotated(params, (x - xi0) * rate, s);
        psi_up.push(a * orbital);
        psi_down.push(b * orbital);
    }
    let mut field = SpinorField {
        grid: *grid,
        psi_up,
        psi_down,
        t: 0.0,
    };
    let deficit = (1.0 - field.norm()).abs();
    if deficit > 1e-8 {
        return Err(Error::Grid(format!(
            "initial state norm deficit {deficit:.2e}; widen the box or refine the grid"
        )));
    }
    let scale = field.norm().sqrt().recip();
    field
        .psi_up
        .iter_mut()
        .chain(field.psi_down.iter_mut())
        .for_each(|v| *v *= scale);
    Ok(field)
}

/// `exp(-i tau (k^2/(2m) + k kappa n.sigma))` for every `k`, stored as
/// `[diag, upper, lower]`.
fn momentum_factors(k: &[f64], params: &SystemParams, tau: f64) -> Vec<[Complex64; 3]> {
    let m = params.effective_mass;
    let kappa = params.coupling();
    let (nx, ny) = params.spin_orbit_axis();
    let n01 = Complex64::new(nx, -ny);
    let n10 = Complex64::new(nx, ny);
    k.iter()
        .map(|&k| {
            let phase = Complex64::from_polar(1.0, -k * k * tau / (2.0 * m));
            let (sin, cos) = (k * kappa * tau).sin_cos();
            let mis = Complex64::new(0.0, -sin) * phase;
            [phase * cos, mis * n01, mis * n10]
        })
        .collect()
}

fn apply_momentum(factors: &[[Complex64; 3]], up: &mut [Complex64], down: &mut [Complex64]) {
    for ((f, u), d) in factors.iter().zip(up.iter_mut()).zip(down.iter_mut()) {
        let (a, b) = (*u, *d);
        *u = f[0] * a + f[1] * b;
        *d = f[2] * a + f[0] * b;
    }
}

/// Per-run propagation workspace; owns its transform plans and buffers.
pub struct Propagator<'a> {
    grid: GridSpec,
    params: &'a SystemParams,
    profile: &'a DrivingProfile,
    x: Vec<f64>,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    initial_norm: Option<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(
        grid: GridSpec,
        params: &'a SystemParams,
        profile: &'a DrivingProfile,
    ) -> Result<Self> {
        if grid.dt > MAX_DT_OVER_T0 * params.t0 * (1.0 + 1e-12) {
            return Err(Error::Convergence(format!(
                "dt = {:.3e} T0 exceeds T0/500; use a smaller --dt-over-T0",
                grid.dt / params.t0
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_points);
        let inverse = planner.plan_fft_inverse(grid.n_points);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            grid,
            params,
            profile,
            x: grid.x(),
            k: grid.k(),
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
            initial_norm: None,
        })
    }

    fn to_momentum(&mut self, field: &mut SpinorField) {
        self.forward
            .process_with_scratch(&mut field.psi_up, &mut self.scratch);
        self.forward
            .process_with_scratch(&mut field.psi_down, &mut self.scratch);
    }

    fn to_position(&mut self, field: &mut SpinorField) {
        self.inverse
            .process_with_scratch(&mut field.psi_up, &mut self.scratch);
        self.inverse
            .process_with_scratch(&mut field.psi_down, &mut self.scratch);
        let scale = 1.0 / self.grid.n_points as f64;
        field
            .psi_up
            .iter_mut()
            .chain(field.psi_down.iter_mut())
            .for_each(|v| *v *= scale);
    }

    /// Propagates `field` from `field.t` to `t_end`.
    ///
    /// Each interval between driving breakpoints gets a uniform step no
    /// larger than `grid.dt`, so discontinuities of `xi` or its slope fall on
    /// step boundaries.
    pub fn advance_to(&mut self, field: &mut SpinorField, t_end: f64) -> Result<()> {
        if t_end < field.t {
            return Err(Error::domain("t_end", "cannot propagate backwards"));
        }
        let norm0 = *self.initial_norm.get_or_insert_with(|| field.norm());
        let mut cuts: Vec<f64> = self
            .profile
            .breakpoints()
            .into_iter()
            .filter(|&b| b > field.t && b < t_end)
            .collect();
        cuts.push(t_end);
        let mut t0 = field.t;
        for t1 in cuts {
            self.segment(field, t0, t1);
            t0 = t1;
        }
        field.t = t_end;

        let drift = (field.norm() - norm0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::Convergence(format!(
                "norm drift {drift:.2e} at t = {t_end:.4}; reduce dt"
            )));
        }
        let edge = field.edge_weight(2.0 * self.params.sigma);
        if edge > EDGE_WEIGHT_LIMIT {
            return Err(Error::Convergence(format!(
                "probability {edge:.2e} reached the box edge at t = {t_end:.4}; enlarge the box"
            )));
        }
        Ok(())
    }

    fn segment(&mut self, field: &mut SpinorField, t0: f64, t1: f64) {
        if t1 <= t0 {
            return;
        }
        let steps = ((t1 - t0) / self.grid.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let dt = (t1 - t0) / steps as f64;
        let half = momentum_factors(&self.k, self.params, 0.5 * dt);
        let full = momentum_factors(&self.k, self.params, dt);
        let coef = 0.5 * self.params.effective_mass * self.params.omega.powi(2) * dt;

        self.to_momentum(field);
        apply_momentum(&half, &mut field.psi_up, &mut field.psi_down);
        for i in 0..steps {
            self.to_position(field);
            let xi = self.profile.xi(t0 + (i as f64 + 0.5) * dt);
            for ((x, u), d) in self
                .x
                .iter()
                .zip(field.psi_up.iter_mut())
                .zip(field.psi_down.iter_mut())
            {
                let phase = Complex64::from_polar(1.0, -coef * (x - xi).powi(2));
                *u *= phase;
                *d *= phase;
            }
            self.to_momentum(field);
            let factors = if i + 1 == steps { &half } else { &full };
            apply_momentum(factors, &mut field.psi_up, &mut field.psi_down);
        }
        self.to_position(field);
    }

    /// `<H(t)>` with the kinetic and spin-orbit part evaluated in momentum space.
    pub fn measure_energy(&mut self, field: &SpinorField) -> f64 {
        let xi = self.profile.xi(field.t);
        let m = self.params.effective_mass;
        let w = self.params.omega;
        let dx = self.grid.dx();
        let potential: f64 = self
            .x
            .iter()
            .zip(field.psi_up.iter().zip(&field.psi_down))
            .map(|(x, (u, d))| 0.5 * m * w * w * (x - xi).powi(2) * (u.norm_sqr() + d.norm_sqr()))
            .sum::<f64>()
            * dx;
        let kappa = self.params.coupling();
        let kinetic = self.momentum_expectation(field, |k, u, d, n01| {
            k * k / (2.0 * m) * (u.norm_sqr() + d.norm_sqr())
                + k * kappa * 2.0 * (u.conj() * n01 * d).re
        });
        potential + kinetic
    }

    /// `<dH/dp> = <p/m + alpha sigma_y - beta sigma_x>`.
    pub fn measure_velocity(&mut self, field: &SpinorField) -> f64 {
        let m = self.params.effective_mass;
        let kappa = self.params.coupling();
        self.momentum_expectation(field, |k, u, d, n01| {
            k / m * (u.norm_sqr() + d.norm_sqr()) + kappa * 2.0 * (u.conj() * n01 * d).re
        })
    }

    /// `(dx/N) sum_k f(k, u_k, d_k, <up|n.sigma|down>)`.
    fn momentum_expectation(
        &mut self,
        field: &SpinorField,
        f: impl Fn(f64, Complex64, Complex64, Complex64) -> f64,
    ) -> f64 {
        let mut up = field.psi_up.clone();
        let mut down = field.psi_down.clone();
        self.forward
            .process_with_scratch(&mut up, &mut self.scratch);
        self.forward
            .process_with_scratch(&mut down, &mut self.scratch);
        let (nx, ny) = self.params.spin_orbit_axis();
        let n01 = Complex64::new(nx, -ny);
        let s: f64 = self
            .k
            .iter()
            .zip(up.iter().zip(&down))
            .map(|(&k, (&u, &d))| f(k, u, d, n01))
            .sum();
        s * self.grid.dx() / self.grid.n_points as f64
    }

    /// Projections onto the instantaneous eigenstates at the field's time.
    pub fn project_instantaneous(
        &mut self,
        field: &SpinorField,
        n_max: usize,
    ) -> Result<OccupationSpectrum> {
        let xi = self.profile.xi(field.t);
        let mut spectrum = project_at(field, self.params, xi, n_max)?;
        let mean_x = measure_position(field);
        let v = self.measure_velocity(field);
        let d = Complex64::new(mean_x - xi, -v / self.params.omega);
        spectrum.displacement_d = d;
        spectrum.mean_nu = d.norm_sqr() / (2.0 * self.params.sigma.powi(2));
        Ok(spectrum)
    }
}

/// `<x>` by grid quadrature.
pub fn measure_position(field: &SpinorField) -> f64 {
    field
        .grid
        .x()
        .iter()
        .zip(field.psi_up.iter().zip(&field.psi_down))
        .map(|(x, (u, d))| x * (u.norm_sqr() + d.norm_sqr()))
        .sum::<f64>()
        * field.grid.dx()
}

/// `<sigma>/2` by grid quadrature.
pub fn measure_spin(field: &SpinorField) -> SpinExpectation {
    let mut s = SpinExpectation::default();
    for (u, d) in field.psi_up.iter().zip(&field.psi_down) {
        let cross = u.conj() * d;
        s.sx += cross.re;
        s.sy += cross.im;
        s.sz += 0.5 * (u.norm_sqr() - d.norm_sqr());
    }
    let dx = field.grid.dx();
    s.sx *= dx;
    s.sy *= dx;
    s.sz *= dx;
    s
}

/// `<H(t)>` for a field driven by `profile`; see [`Propagator::measure_energy`].
pub fn measure_energy(
    field: &SpinorField,
    profile: &DrivingProfile,
    params: &SystemParams,
    t: f64,
) -> Result<f64> {
    let mut at_t = field.clone();
    at_t.t = t;
    let mut grid = field.grid;
    grid.dt = grid.dt.min(MAX_DT_OVER_T0 * params.t0);
    Ok(Propagator::new(grid, params, profile)?.measure_energy(&at_t))
}

/// Projections `c_ns = <Psi~_ns(t)|field>` onto the eigenstates of the potential at `t`.
pub fn project_instantaneous(
    field: &SpinorField,
    profile: &DrivingProfile,
    params: &SystemParams,
    t: f64,
    n_max: usize,
) -> Result<OccupationSpectrum> {
    let mut at_t = field.clone();
    at_t.t = t;
    let mut grid = field.grid;
    grid.dt = grid.dt.min(MAX_DT_OVER_T0 * params.t0);
    Propagator::new(grid, params, profile)?.project_instantaneous(&at_t, n_max)
}

/// Projections onto eigenstates of the potential centred at `xi`.
///
/// The displacement fields of the result are left at zero.
pub fn project_at(
    field: &SpinorField,
    params: &SystemParams,
    xi: f64,
    n_max: usize,
) -> Result<OccupationSpectrum> {
    let grid = &field.grid;
    let sigma = params.sigma;
    let reach = sigma * (2.0 * n_max as f64 + 1.0).sqrt() + 4.0 * sigma;
    if xi - reach < grid.x_min || xi + reach > grid.x_max {
        return Err(Error::Grid(format!(
            "psi_{n_max} around xi = {xi:.3} extends beyond the box [{:.3}, {:.3}]",
            grid.x_min, grid.x_max
        )));
    }
    let k_needed = 2.0 * (2.0 * n_max as f64 + 1.0).sqrt() / sigma;
    if k_needed > grid.k_max() {
        return Err(Error::Grid(format!(
            "psi_{n_max} is not resolved by dx = {:.4}",
            grid.dx()
        )));
    }
    let rate = params.rotation_rate();
    let mut c = vec![[Complex64::default(); 2]; n_max + 1];
    let mut buf = Vec::with_capacity(n_max + 1);
    for (i, x) in grid.x().into_iter().enumerate() {
        let u = (x - xi) / sigma;
        hermite_functions_into(n_max, u, &mut buf);
        let theta = (x - xi) * rate;
        let w_up = rotated(params, theta, Spin::Up);
        let w_down = rotated(params, theta, Spin::Down);
        let (a, b) = (field.psi_up[i], field.psi_down[i]);
        let spin_up = w_up[0].conj() * a + w_up[1].conj() * b;
        let spin_down = w_down[0].conj() * a + w_down[1].conj() * b;
        for (cn, h) in c.iter_mut().zip(&buf) {
            cn[0] += spin_up * *h;
            cn[1] += spin_down * *h;
        }
    }
    let scale = grid.dx() / sigma.sqrt();
    for cn in &mut c {
        cn[0] *= scale;
        cn[1] *= scale;
    }
    Ok(OccupationSpectrum {
        n_max,
        p: c.iter().map(|[u, d]| u.norm_sqr() + d.norm_sqr()).collect(),
        c,
        displacement_d: Complex64::default(),
        mean_nu: 0.0,
    })
}

/// Evolves `field` under `profile` until `t_end`.
pub fn evolve(
    field: SpinorField,
    profile: &DrivingProfile,
    params: &SystemParams,
    t_end: f64,
) -> Result<SpinorField> {
    let mut field = field;
    Propagator::new(field.grid, params, profile)?.advance_to(&mut field, t_end)?;
    Ok(field)
}

/// Analytic and oracle observables at one sample time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSample {
    pub t: f64,
    pub sz_analytic: f64,
    pub sz_oracle: f64,
    pub p0_analytic: f64,
    pub p0_oracle: f64,
    pub energy_analytic: f64,
    pub energy_oracle: f64,
    pub infidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub grid: GridSpec,
    pub samples: Vec<ComparisonSample>,
}

impl Comparison {
    fn max_of(&self, f: impl Fn(&ComparisonSample) -> f64) -> f64 {
        self.samples.iter().map(f).fold(0.0, f64::max)
    }

    pub fn max_dsz(&self) -> f64 {
        self.max_of(|s| (s.sz_oracle - s.sz_analytic).abs())
    }

    pub fn max_dp0(&self) -> f64 {
        self.max_of(|s| (s.p0_oracle - s.p0_analytic).abs())
    }

    pub fn max_denergy(&self) -> f64 {
        self.max_of(|s| (s.energy_oracle - s.energy_analytic).abs())
    }

    pub fn max_infidelity(&self) -> f64 {
        self.max_of(|s| s.infidelity)
    }

    pub fn last(&self) -> &ComparisonSample {
        self.samples.last().expect("at least one sample")
    }

    pub fn table(&self) -> CsvTable {
        let mut table = CsvTable::new(&[
            "t",
            "sz_analytic",
            "sz_oracle",
            "P0_analytic",
            "P0_oracle",
            "E_analytic",
            "E_oracle",
            "infidelity",
        ])
        .comment(format!(
            "grid: [{}, {}] with {} points, dt = {}",
            self.grid.x_min, self.grid.x_max, self.grid.n_points, self.grid.dt
        ));
        for s in &self.samples {
            table.push(vec![
                s.t,
                s.sz_analytic,
                s.sz_oracle,
                s.p0_analytic,
                s.p0_oracle,
                s.energy_analytic,
                s.energy_oracle,
                s.infidelity,
            ]);
        }
        table
    }
}

/// Runs the oracle from the Kramers ground state along `traj` and compares
/// it with the closed-form observables at every trajectory sample.
pub fn compare_with_analytic(
    traj: &ClassicalTrajectory,
    params: &SystemParams,
    grid: GridSpec,
) -> Result<Comparison> {
    let reach = traj
        .x_c()
        .iter()
        .chain(traj.xi())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    grid.validate(params, reach)?;
    let profile = traj.profile();
    let x = grid.x();
    let mut field = initial_kramers_state(params, &grid, 0, Spin::Up, 0.0)?;
    let mut propagator = Propagator::new(grid, params, profile)?;
    let mut samples = Vec::with_capacity(traj.times().len());
    for state in traj.samples() {
        propagator.advance_to(&mut field, state.t)?;
        let analytic = crate::observables::sample_from_state(&state, params);
        let exact = crate::observables::wavefunction_from_state(&state, params, &x, 0, Spin::Up)?;
        let spectrum = project_at(&field, params, state.xi, 0)?;
        samples.push(ComparisonSample {
            t: state.t,
            sz_analytic: analytic.spin.sz,
            sz_oracle: measure_spin(&field).sz,
            p0_analytic: analytic.p0,
            p0_oracle: spectrum.p[0],
            energy_analytic: analytic.energy,
            energy_oracle: propagator.measure_energy(&field),
            infidelity: field.infidelity(&exact),
        });
    }
    Ok(Comparison { grid, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::solve_trajectory;
    use crate::driving::DrivingKind;
    use crate::observables::{instantaneous_state, poisson_probability};

    fn grid(half: f64, n: usize, dt: f64) -> GridSpec {
        GridSpec::new(-half, half, n, dt).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(-1.0, 1.0, 1000, 0.01).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 128, 0.01).is_err());
        assert!(GridSpec::new(1.0, -1.0, 256, 0.01).is_err());
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let g = grid(20.0, 256, 0.001);
        assert!(matches!(g.validate(&p, 0.0), Err(Error::Grid(_))));
        let g = grid(20.0, 1024, p.t0 / 100.0);
        assert!(matches!(g.validate(&p, 0.0), Err(Error::Convergence(_))));
        assert!(matches!(g.validate(&p, 15.0), Err(Error::Grid(_))));
        assert!(grid(20.0, 1024, p.t0 / 600.0).validate(&p, 10.0).is_ok());
    }

    #[test]
    fn wavenumbers_in_transform_order() {
        let g = grid(PI, 256, 0.01);
        let k = g.k();
        assert_eq!(k[1], 1.0);
        assert_eq!(k[255], -1.0);
        assert_eq!(k[128], -128.0);
    }

    #[test]
    fn initial_states() {
        let none = SystemParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let g = grid(12.0, 1024, 0.001);
        let f = initial_kramers_state(&none, &g, 0, Spin::Up, 0.0).unwrap();
        assert!((measure_spin(&f).sz - 0.5).abs() < 1e-14);

        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let f = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let s = measure_spin(&f);
        assert!((s.sz - 0.5 * (-0.01f64).exp()).abs() < 1e-12, "{}", s.sz);
        assert!(s.sx.abs() < 1e-14);

        let e = measure_energy(&f, &DrivingProfile::at_rest(1.0).unwrap(), &p, 0.0).unwrap();
        assert!((e - (p.e_so + 0.5)).abs() < 1e-12, "{e}");

        let coarse = grid(12.0, 256, 0.001);
        assert!(matches!(
            initial_kramers_state(&p, &coarse, 0, Spin::Up, 0.0),
            Err(Error::Grid(_))
        ));
        let narrow = grid(2.0, 1024, 0.001);
        assert!(matches!(
            initial_kramers_state(&p, &narrow, 0, Spin::Up, 0.0),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn projections_of_basis_states() {
        let p = SystemParams::dimensionless(5.0, 0.4).unwrap();
        let g = grid(16.0, 1024, 0.001);
        let f = initial_kramers_state(&p, &g, 0, Spin::Up, 1.0).unwrap();
        let spec = project_at(&f, &p, 1.0, 6).unwrap();
        assert!((spec.c[0][0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let rest: f64 = spec.p.iter().skip(1).sum::<f64>() + spec.c[0][1].norm_sqr();
        assert!(rest < 1e-16);

        let f = initial_kramers_state(&p, &g, 3, Spin::Down, 0.0).unwrap();
        let spec = project_at(&f, &p, 0.0, 5).unwrap();
        assert!((spec.c[3][1].norm() - 1.0).abs() < 1e-12);
        assert!(matches!(project_at(&f, &p, 0.0, 200), Err(Error::Grid(_))));
    }

    #[test]
    fn kramers_partner_is_degenerate_and_orthogonal() {
        let p = SystemParams::dimensionless(3.0, 0.0).unwrap();
        let g = grid(14.0, 1024, p.t0 / 1000.0);
        let up = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let down = initial_kramers_state(&p, &g, 0, Spin::Down, 0.0).unwrap();
        let rest = DrivingProfile::at_rest(1.0).unwrap();
        let e_up = measure_energy(&up, &rest, &p, 0.0).unwrap();
        let e_down = measure_energy(&down, &rest, &p, 0.0).unwrap();
        assert!((e_up - e_down).abs() < 1e-12);
        assert!(up.overlap(&down.to_wavefunction()).norm() < 1e-14);
    }

    #[test]
    fn stationary_state_only_acquires_phase() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let g = grid(12.0, 1024, p.t0 / 2000.0);
        let rest = DrivingProfile::at_rest(1.0).unwrap();
        let f0 = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let t = 2.0 * p.t0;
        let f = evolve(f0.clone(), &rest, &p, t).unwrap();
        let overlap = f.overlap(&f0.to_wavefunction());
        let expected = Complex64::from_polar(1.0, -(p.e_so + 0.5) * t);
        assert!(1.0 - overlap.norm_sqr() < 1e-8, "{overlap}");
        // splitting shifts the quasi-energy by O(dt^2)
        assert!(
            (overlap - expected).norm() < 1e-5,
            "{overlap} vs {expected}"
        );
    }

    #[test]
    fn coarse_time_step_is_a_convergence_error() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let g = grid(12.0, 1024, p.t0 / 100.0);
        let f0 = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let rest = DrivingProfile::at_rest(1.0).unwrap();
        assert!(matches!(
            evolve(f0, &rest, &p, 1.0),
            Err(Error::Convergence(_))
        ));
    }

    #[test]
    fn boundary_contact_is_a_convergence_error() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let g = grid(9.0, 1024, p.t0 / 1000.0);
        let f0 = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let step = DrivingProfile::new(DrivingKind::Step, 6.0, 1.0).unwrap();
        let err = evolve(f0, &step, &p, 0.5 * p.t0).unwrap_err();
        assert!(matches!(err, Error::Convergence(_)), "{err}");
    }

    #[test]
    fn sudden_step_populates_poisson() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let g = grid(14.0, 1024, p.t0 / 2000.0);
        let f0 = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let step = DrivingProfile::new(DrivingKind::Step, 1.0, 1.0).unwrap();
        let f = evolve(f0, &step, &p, 0.7).unwrap();
        let spec = project_instantaneous(&f, &step, &p, f.t, 10).unwrap();
        for n in 0..=8 {
            let expected = poisson_probability(0.5, n);
            assert!(
                (spec.p[n] - expected).abs() < 1e-6,
                "n={n}: {} vs {expected}",
                spec.p[n]
            );
        }
        assert!((spec.mean_nu - 0.5).abs() < 1e-6);
    }

    #[test]
    fn matches_exact_state_under_linear_ramp() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let profile = DrivingProfile::spin_flip(DrivingKind::LinearRamp, &p).unwrap();
        let traj = solve_trajectory(&profile, &p, profile.transit(), 3).unwrap();
        let g = GridSpec::default_for(&traj, &p).unwrap();
        let f0 = initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).unwrap();
        let f = evolve(f0, &profile, &p, profile.transit()).unwrap();
        let exact = crate::observables::wavefunction(&traj, &p, &g.x(), f.t, 0, Spin::Up).unwrap();
        let overlap = f.overlap(&exact);
        assert!(
            (overlap - Complex64::new(1.0, 0.0)).norm() < 1e-5,
            "{overlap}"
        );
        let flipped = instantaneous_state(&p, profile.xi_t(), &g.x(), 0, Spin::Down);
        assert!(f.overlap(&flipped).norm_sqr() > 1.0 - 1e-6);
    }

    #[test]
    fn snapshot_columns() {
        let p = SystemParams::dimensionless(10.0, 0.0).unwrap();
        let g = grid(12.0, 256, 0.001);
        let none = SystemParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let f = initial_kramers_state(&none, &grid(30.0, 1024, 0.001), 0, Spin::Up, 0.0).unwrap();
        let table = f.snapshot_table();
        assert_eq!(
            table.headers(),
            ["x", "re_up", "im_up", "re_down", "im_down"]
        );
        assert_eq!(table.rows().len(), 1024);
        assert!(initial_kramers_state(&p, &g, 0, Spin::Up, 0.0).is_err());
    }
}
