//! Exact observables of the driven dot, expressed through the classical trajectory.
//!
//! The exact state started from the pseudo-spin-up Kramers ground state is
//!
//! ```text
//! Psi(x, t) = exp(i[-(E_so + w/2) t + Phi(t) + m v_c x]) psi_0(x - x_c) W(x) chi_up,
//! W(x)      = exp(-i (x / lambda_so) n.sigma),
//! ```
//!
//! with `n.sigma = (alpha sigma_y - beta sigma_x) / sqrt(alpha^2 + beta^2)`.
//! Everything here is a closed-form function of `(xi, x_c, v_c, Phi)`.

use num_complex::Complex64;

use crate::classical::{ClassicalState, ClassicalTrajectory};
use crate::driving::DrivingProfile;
use crate::error::{Error, Result};
use crate::hermite::hermite_functions_into;
use crate::io::CsvTable;
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// `<sigma_i>/2` for the real electron spin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpinExpectation {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl SpinExpectation {
    pub fn norm_sqr(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PseudoSpinExpectation {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    /// Set when only the ground Kramers doublet contributes.
    pub doublet_restricted: bool,
}

impl PseudoSpinExpectation {
    pub fn norm_sqr(&self) -> f64 {
        self.tx * self.tx + self.ty * self.ty + self.tz * self.tz
    }

    fn scaled(self, factor: f64) -> Self {
        Self {
            tx: self.tx * factor,
            ty: self.ty * factor,
            tz: self.tz * factor,
            doublet_restricted: true,
        }
    }
}

/// Populations of the instantaneous oscillator manifolds.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationSpectrum {
    pub n_max: usize,
    /// `P_n = |c_{n,up}|^2 + |c_{n,down}|^2`.
    pub p: Vec<f64>,
    /// `[c_{n,up}, c_{n,down}]` in the instantaneous basis.
    pub c: Vec<[Complex64; 2]>,
    /// Complex displacement `d = (x_c - xi) - i v_c / w`.
    pub displacement_d: Complex64,
    /// Poisson mean `|d|^2 / (2 sigma^2)`.
    pub mean_nu: f64,
}

impl OccupationSpectrum {
    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Pseudo-spin summed over all resolved manifolds.
    pub fn pseudo_spin(&self) -> PseudoSpinExpectation {
        let mut t = PseudoSpinExpectation::default();
        for [up, down] in &self.c {
            let cross = up.conj() * down;
            t.tx += cross.re;
            t.ty += cross.im;
            t.tz += 0.5 * (up.norm_sqr() - down.norm_sqr());
        }
        t
    }

    /// Pseudo-spin restricted to the ground doublet.
    pub fn ground_pseudo_spin(&self) -> PseudoSpinExpectation {
        let [up, down] = self.c[0];
        let cross = up.conj() * down;
        PseudoSpinExpectation {
            tx: cross.re,
            ty: cross.im,
            tz: 0.5 * (up.norm_sqr() - down.norm_sqr()),
            doublet_restricted: true,
        }
    }
}

/// Two-component wavefunction sampled on a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorWavefunction {
    pub x: Vec<f64>,
    pub up: Vec<Complex64>,
    pub down: Vec<Complex64>,
    pub t: f64,
}

impl SpinorWavefunction {
    /// `int |up|^2 + |down|^2 dx` by the trapezoidal rule.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.x, |i| self.up[i].norm_sqr() + self.down[i].norm_sqr())
    }

    /// `<self|other>` by the trapezoidal rule; both must share the grid.
    pub fn inner(&self, other: &SpinorWavefunction) -> Complex64 {
        assert_eq!(self.x.len(), other.x.len(), "grids differ");
        let re = trapezoid(&self.x, |i| {
            (self.up[i].conj() * other.up[i] + self.down[i].conj() * other.down[i]).re
        });
        let im = trapezoid(&self.x, |i| {
            (self.up[i].conj() * other.up[i] + self.down[i].conj() * other.down[i]).im
        });
        Complex64::new(re, im)
    }

    pub fn density(&self) -> Vec<f64> {
        self.up
            .iter()
            .zip(&self.down)
            .map(|(u, d)| u.norm_sqr() + d.norm_sqr())
            .collect()
    }
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len())
        .map(|i| 0.5 * (x[i] - x[i - 1]) * (f(i) + f(i - 1)))
        .sum()
}

/// Manifold cut-off keeping the Poisson tail below `1e-10`.
pub fn poisson_tail_n_max(mean_nu: f64) -> usize {
    (mean_nu + 10.0 * mean_nu.sqrt() + 10.0).ceil() as usize
}

/// `e^{-nu} nu^n / n!` evaluated in log space.
pub fn poisson_probability(nu: f64, n: usize) -> f64 {
    if nu == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    (-nu + n as f64 * nu.ln() - ln_fact).exp()
}

/// Spin matrix elements of `W = exp(-i theta n.sigma)` acting on `chi_s`.
fn rotated_spinor(params: &SystemParams, theta: f64, s: Spin) -> [Complex64; 2] {
    let (nx, ny) = params.spin_orbit_axis();
    let (sin, cos) = theta.sin_cos();
    let minus_i_sin = Complex64::new(0.0, -sin);
    match s {
        // <down| n.sigma |up> = nx + i ny
        Spin::Up => [
            Complex64::new(cos, 0.0),
            minus_i_sin * Complex64::new(nx, ny),
        ],
        // <up| n.sigma |down> = nx - i ny
        Spin::Down => [
            minus_i_sin * Complex64::new(nx, -ny),
            Complex64::new(cos, 0.0),
        ],
    }
}

/// Mean spin at the given classical state.
pub fn spin_from_state(state: &ClassicalState, params: &SystemParams) -> SpinExpectation {
    let theta = 2.0 * state.x_c * params.rotation_rate();
    let half = 0.5 * params.spread_factor();
    let (nx, ny) = params.spin_orbit_axis();
    let (sin, cos) = theta.sin_cos();
    // the spin precesses about n, starting from +z
    SpinExpectation {
        sx: half * ny * sin,
        sy: -half * nx * sin,
        sz: half * cos,
    }
}

/// Mean spin `<sigma>/2` at time `t`.
///
/// For `beta = 0` this is `sz = cos(2 x_c/lambda_so) f / 2`,
/// `sx = sin(2 x_c/lambda_so) f / 2`, `sy = 0` with the spread factor
/// `f = exp(-sigma^2/lambda_so^2)`. Without spin-orbit coupling the spin stays
/// at `(0, 0, 1/2)`.
pub fn spin_expectation(
    traj: &ClassicalTrajectory,
    params: &SystemParams,
    t: f64,
) -> Result<SpinExpectation> {
    Ok(spin_from_state(&traj.state_at(t)?, params))
}

/// Full pseudo-spin for a dot at position `xi`.
pub fn pseudo_spin_at(xi: f64, params: &SystemParams) -> PseudoSpinExpectation {
    let phi = 2.0 * xi * params.rotation_rate();
    let (nx, ny) = params.spin_orbit_axis();
    let (sin, cos) = phi.sin_cos();
    PseudoSpinExpectation {
        tx: 0.5 * ny * sin,
        ty: -0.5 * nx * sin,
        tz: 0.5 * cos,
        doublet_restricted: false,
    }
}

/// Full pseudo-spin at time `t`; depends on the dot position only.
pub fn pseudo_spin(
    profile: &DrivingProfile,
    params: &SystemParams,
    t: f64,
) -> Result<PseudoSpinExpectation> {
    Ok(pseudo_spin_at(profile.evaluate(t)?, params))
}

/// Ground-manifold probability `P_0 = exp(-(x_c - xi)^2/(2 sigma^2) - v_c^2/(2 sigma^2 w^2))`.
pub fn ground_occupation(state: &ClassicalState, params: &SystemParams) -> f64 {
    let s2 = params.sigma * params.sigma;
    let lag = state.lag();
    let v = state.v_c / params.omega;
    (-(lag * lag) / (2.0 * s2) - v * v / (2.0 * s2)).exp()
}

pub fn pseudo_spin_ground_from_state(
    state: &ClassicalState,
    params: &SystemParams,
) -> PseudoSpinExpectation {
    pseudo_spin_at(state.xi, params).scaled(ground_occupation(state, params))
}

/// Ground-doublet pseudo-spin `T_i P_0`.
pub fn pseudo_spin_ground(
    traj: &ClassicalTrajectory,
    params: &SystemParams,
    t: f64,
) -> Result<PseudoSpinExpectation> {
    Ok(pseudo_spin_ground_from_state(&traj.state_at(t)?, params))
}

/// Complex displacement `d = (x_c - xi) - i v_c / w`.
pub fn displacement(state: &ClassicalState, params: &SystemParams) -> Complex64 {
    Complex64::new(state.lag(), -state.v_c / params.omega)
}

/// Instantaneous-basis coefficients and manifold populations.
pub fn occupations_from_state(
    state: &ClassicalState,
    params: &SystemParams,
    n_max: usize,
) -> OccupationSpectrum {
    let sigma = params.sigma;
    let d = displacement(state, params);
    let nu = d.norm_sqr() / (2.0 * sigma * sigma);

    // The packet exp(i m v x) psi_0(x - x_c), seen from the dot centre, is a
    // coherent state with amplitude conj(d)/(sqrt(2) sigma); the extra phase
    // m v (x_c + xi)/2 comes from the ordering of the displacement operator.
    let amp = d.conj() / (std::f64::consts::SQRT_2 * sigma);
    let (amp_abs, amp_arg) = (amp.norm(), amp.arg());
    let m = params.effective_mass;
    let global = Complex64::from_polar(
        1.0,
        -(params.manifold_energy(0) * state.t - state.phase)
            + 0.5 * m * state.v_c * (state.x_c + state.xi),
    );
    let spin = rotated_spinor(params, state.xi * params.rotation_rate(), Spin::Up);

    let mut p = Vec::with_capacity(n_max + 1);
    let mut c = Vec::with_capacity(n_max + 1);
    let mut ln_fact = 0.0;
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let modulus = if amp_abs == 0.0 {
            if n == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-0.5 * nu + n as f64 * amp_abs.ln() - 0.5 * ln_fact).exp()
        };
        let i_n = global * Complex64::from_polar(modulus, n as f64 * amp_arg);
        p.push(modulus * modulus);
        c.push([spin[0] * i_n, spin[1] * i_n]);
    }
    OccupationSpectrum {
        n_max,
        p,
        c,
        displacement_d: d,
        mean_nu: nu,
    }
}

/// [`occupations_from_state`] at time `t` of a trajectory.
pub fn occupations(
    traj: &ClassicalTrajectory,
    params: &SystemParams,
    t: f64,
    n_max: usize,
) -> Result<OccupationSpectrum> {
    Ok(occupations_from_state(&traj.state_at(t)?, params, n_max))
}

/// `E = E_so + (n + 1/2) w + m v_c^2/2 + m w^2 (x_c - xi)^2/2`.
pub fn energy_from_state(state: &ClassicalState, params: &SystemParams, n: usize) -> f64 {
    let m = params.effective_mass;
    let w = params.omega;
    let lag = state.lag();
    params.manifold_energy(n) + 0.5 * m * state.v_c * state.v_c + 0.5 * m * w * w * lag * lag
}

pub fn energy(traj: &ClassicalTrajectory, params: &SystemParams, t: f64, n: usize) -> Result<f64> {
    Ok(energy_from_state(&traj.state_at(t)?, params, n))
}

/// Exact state `Psi_ns(x, t)` of the driven Hamiltonian on `x_grid`.
pub fn wavefunction_from_state(
    state: &ClassicalState,
    params: &SystemParams,
    x_grid: &[f64],
    n: usize,
    s: Spin,
) -> Result<SpinorWavefunction> {
    if x_grid.len() < 2 || x_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(
            "x_grid",
            "must be strictly increasing with two or more points",
        ));
    }
    let sigma = params.sigma;
    let m = params.effective_mass;
    let rate = params.rotation_rate();
    let base = -params.manifold_energy(n) * state.t + state.phase;
    let mut buf = Vec::with_capacity(n + 1);
    let mut up = Vec::with_capacity(x_grid.len());
    let mut down = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        hermite_functions_into(n, (x - state.x_c) / sigma, &mut buf);
        let orbital = Complex64::from_polar(buf[n] / sigma.sqrt(), base + m * state.v_c * x);
        let [a, b] = rotated_spinor(params, x * rate, s);
        up.push(orbital * a);
        down.push(orbital * b);
    }
    let psi = SpinorWavefunction {
        x: x_grid.to_vec(),
        up,
        down,
        t: state.t,
    };
    let deficit = (1.0 - psi.norm()).abs();
    if deficit > 1e-8 {
        return Err(Error::Grid(format!(
            "norm deficit {deficit:.2e} on the supplied grid; widen it to cover x_c +- 8 sigma"
        )));
    }
    Ok(psi)
}

/// Exact state at time `t`, see [`wavefunction_from_state`].
pub fn wavefunction(
    traj: &ClassicalTrajectory,
    params: &SystemParams,
    x_grid: &[f64],
    t: f64,
    n: usize,
    s: Spin,
) -> Result<SpinorWavefunction> {
    wavefunction_from_state(&traj.state_at(t)?, params, x_grid, n, s)
}

/// Instantaneous eigenstate `W(x - xi) psi_n(x - xi) chi_s` of the frozen potential.
///
/// No normalization check is made, so states that overhang the grid are
/// returned as they are.
pub fn instantaneous_state(
    params: &SystemParams,
    xi: f64,
    x_grid: &[f64],
    n: usize,
    s: Spin,
) -> SpinorWavefunction {
    let sigma = params.sigma;
    let rate = params.rotation_rate();
    let mut buf = Vec::with_capacity(n + 1);
    let mut up = Vec::with_capacity(x_grid.len());
    let mut down = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        hermite_functions_into(n, (x - xi) / sigma, &mut buf);
        let orbital = buf[n] / sigma.sqrt();
        let [a, b] = rotated_spinor(params, (x - xi) * rate, s);
        up.push(a * orbital);
        down.push(b * orbital);
    }
    SpinorWavefunction {
        x: x_grid.to_vec(),
        up,
        down,
        t: 0.0,
    }
}

/// `sum_ns c_ns Psi~_ns(x)` for the coefficients of `spectrum` around dot position `xi`.
pub fn instantaneous_expansion(
    spectrum: &OccupationSpectrum,
    params: &SystemParams,
    xi: f64,
    x_grid: &[f64],
) -> SpinorWavefunction {
    let sigma = params.sigma;
    let rate = params.rotation_rate();
    let mut buf = Vec::with_capacity(spectrum.n_max + 1);
    let mut up = Vec::with_capacity(x_grid.len());
    let mut down = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        hermite_functions_into(spectrum.n_max, (x - xi) / sigma, &mut buf);
        let (mut a, mut b) = (Complex64::default(), Complex64::default());
        for (h, [cu, cd]) in buf.iter().zip(&spectrum.c) {
            a += cu * *h;
            b += cd * *h;
        }
        let scale = sigma.sqrt().recip();
        let w_up = rotated_spinor(params, (x - xi) * rate, Spin::Up);
        let w_down = rotated_spinor(params, (x - xi) * rate, Spin::Down);
        up.push((w_up[0] * a + w_down[0] * b) * scale);
        down.push((w_up[1] * a + w_down[1] * b) * scale);
    }
    SpinorWavefunction {
        x: x_grid.to_vec(),
        up,
        down,
        t: 0.0,
    }
}

/// Every analytic observable at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSample {
    pub state: ClassicalState,
    pub spin: SpinExpectation,
    pub pseudo_spin: PseudoSpinExpectation,
    pub pseudo_spin_ground: PseudoSpinExpectation,
    pub p0: f64,
    pub energy: f64,
}

pub fn sample_from_state(state: &ClassicalState, params: &SystemParams) -> ObservableSample {
    ObservableSample {
        state: *state,
        spin: spin_from_state(state, params),
        pseudo_spin: pseudo_spin_at(state.xi, params),
        pseudo_spin_ground: pseudo_spin_ground_from_state(state, params),
        p0: ground_occupation(state, params),
        energy: energy_from_state(state, params, 0),
    }
}

/// Observables at every sample of the trajectory.
pub fn sample_observables(
    traj: &ClassicalTrajectory,
    params: &SystemParams,
) -> Vec<ObservableSample> {
    traj.samples()
        .map(|s| sample_from_state(&s, params))
        .collect()
}

/// Column names of [`time_series_table`].
pub const TIME_SERIES_COLUMNS: [&str; 16] = [
    "t",
    "t_over_T0",
    "xi",
    "x_c",
    "v_c",
    "phase",
    "sx",
    "sy",
    "sz",
    "tx",
    "ty",
    "tz",
    "tz0",
    "P0",
    "E",
    "nu",
];

pub fn time_series_table(samples: &[ObservableSample], params: &SystemParams) -> CsvTable {
    let mut table = CsvTable::new(&TIME_SERIES_COLUMNS)
        .comment(format!("lambda_so = {}", params.lambda_so))
        .comment("tz0: ground-doublet pseudo-spin; E includes E_so; nu: Poisson mean");
    for s in samples {
        let st = &s.state;
        let nu = displacement(st, params).norm_sqr() / (2.0 * params.sigma * params.sigma);
        table.push(vec![
            st.t,
            st.t / params.t0,
            st.xi,
            st.x_c,
            st.v_c,
            st.phase,
            s.spin.sx,
            s.spin.sy,
            s.spin.sz,
            s.pseudo_spin.tx,
            s.pseudo_spin.ty,
            s.pseudo_spin.tz,
            s.pseudo_spin_ground.tz,
            s.p0,
            s.energy,
            nu,
        ]);
    }
    table
}

/// Columns `n, P_n, poisson, re_c_up, im_c_up, re_c_down, im_c_down`.
pub fn spectrum_table(spectrum: &OccupationSpectrum) -> CsvTable {
    let mut table = CsvTable::new(&[
        "n",
        "P_n",
        "poisson",
        "re_c_up",
        "im_c_up",
        "re_c_down",
        "im_c_down",
    ])
    .comment(format!("nu = {}", spectrum.mean_nu));
    for (n, (p, [u, d])) in spectrum.p.iter().zip(&spectrum.c).enumerate() {
        table.push(vec![
            n as f64,
            *p,
            poisson_probability(spectrum.mean_nu, n),
            u.re,
            u.im,
            d.re,
            d.im,
        ]);
    }
    table
}
