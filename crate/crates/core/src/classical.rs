//! The classical driven oscillator `x'' + w^2 x = w^2 xi(t)` with `x(0) = x'(0) = 0`.
//!
//! Every quantum observable of the driven dot is a function of the classical
//! position `x_c`, velocity `v_c` and the action phase
//! `Phi(t) = -int_0^t L dt'` with `L = m v_c^2/2 - m w^2 (x_c^2 - xi^2)/2`.
//!
//! Trajectories are evaluated in closed form on each smooth piece of the
//! schedule and stitched together with matched `(x_c, v_c)`, so steps and kinks
//! cost nothing in accuracy. Only `Phi` is obtained by quadrature.

use std::io::Write;

use crate::driving::{DrivingKind, DrivingProfile, Piece};
use crate::error::{Error, Result};
use crate::io::CsvTable;
use crate::params::SystemParams;
use crate::quadrature;

/// Classical quantities at a single instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub t: f64,
    /// Dot position `xi(t)`.
    pub xi: f64,
    pub x_c: f64,
    pub v_c: f64,
    /// Action phase `Phi(t)`.
    pub phase: f64,
}

impl ClassicalState {
    /// Offset of the packet from the dot minimum.
    pub fn lag(&self) -> f64 {
        self.x_c - self.xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualAmplitude {
    /// Radius of the leftover phase-space circle, `sqrt(u^2 + v^2/w^2)`.
    pub a: f64,
    /// `a / |xi(T)|`.
    pub relative: f64,
}

impl ResidualAmplitude {
    fn new(a: f64, xi_t: f64) -> Self {
        let relative = if a == 0.0 { 0.0 } else { a / xi_t.abs() };
        Self { a, relative }
    }
}

/// Sampled classical solution; also evaluates exactly between samples.
#[derive(Debug, Clone)]
pub struct ClassicalTrajectory {
    profile: DrivingProfile,
    mass: f64,
    omega: f64,
    /// `(x_c, v_c)` at the start of each schedule piece.
    starts: Vec<(f64, f64)>,
    times: Vec<f64>,
    xi: Vec<f64>,
    x_c: Vec<f64>,
    v_c: Vec<f64>,
    phase: Vec<f64>,
}

impl ClassicalTrajectory {
    pub fn profile(&self) -> &DrivingProfile {
        &self.profile
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn x_c(&self) -> &[f64] {
        &self.x_c
    }

    pub fn v_c(&self) -> &[f64] {
        &self.v_c
    }

    pub fn phase(&self) -> &[f64] {
        &self.phase
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Sample `i` of the stored grid.
    pub fn sample(&self, i: usize) -> ClassicalState {
        ClassicalState {
            t: self.times[i],
            xi: self.xi[i],
            x_c: self.x_c[i],
            v_c: self.v_c[i],
            phase: self.phase[i],
        }
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = ClassicalState> + '_ {
        (0..self.times.len()).map(|i| self.sample(i))
    }

    /// Exact state at any `t >= 0`, including times beyond the sample grid.
    pub fn state_at(&self, t: f64) -> Result<ClassicalState> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain("t", "time must be non-negative"));
        }
        let (x_c, v_c) = self.position_velocity(t);
        let i = self.times.partition_point(|&s| s <= t).max(1) - 1;
        let phase = self.phase[i] + self.phase_increment(self.times[i], t);
        Ok(ClassicalState {
            t,
            xi: self.profile.xi(t),
            x_c,
            v_c,
            phase,
        })
    }

    fn piece_index(&self, t: f64) -> usize {
        self.profile
            .pieces()
            .partition_point(|p| p.start() <= t)
            .max(1)
            - 1
    }

    fn position_velocity(&self, t: f64) -> (f64, f64) {
        let i = self.piece_index(t);
        let piece = self.profile.pieces()[i];
        advance(piece, self.starts[i], t, self.omega)
    }

    /// `L(t)`, the integrand of the action phase.
    pub fn lagrangian_at(&self, t: f64) -> f64 {
        let (x, v) = self.position_velocity(t);
        let xi = self.profile.xi(t);
        let w2 = self.omega * self.omega;
        0.5 * self.mass * v * v - 0.5 * self.mass * w2 * (x * x - xi * xi)
    }

    /// `Phi(b) - Phi(a)`, splitting at schedule discontinuities.
    fn phase_increment(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let panel = self.max_panel();
        let mut edges = vec![a];
        edges.extend(
            self.profile
                .pieces()
                .iter()
                .map(|p| p.start())
                .filter(|&s| s > a && s < b),
        );
        edges.push(b);
        -edges
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let i = self.piece_index(lo);
                let piece = self.profile.pieces()[i];
                let start = self.starts[i];
                let w2 = self.omega * self.omega;
                let m = self.mass;
                let omega = self.omega;
                quadrature::integrate(
                    |t| {
                        let (x, v) = advance(piece, start, t, omega);
                        let xi = piece.xi(t);
                        0.5 * m * v * v - 0.5 * m * w2 * (x * x - xi * xi)
                    },
                    lo,
                    hi,
                    panel,
                )
            })
            .sum::<f64>()
    }

    fn max_panel(&self) -> f64 {
        let fastest = self
            .profile
            .pieces()
            .iter()
            .map(|p| match *p {
                Piece::Sinusoid { period, .. } => 2.0 * std::f64::consts::PI / period,
                Piece::Affine { .. } => 0.0,
            })
            .fold(self.omega, f64::max);
        0.5 / fastest
    }

    /// Writes `t, xi, x_c, v_c, phase` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut table = CsvTable::new(&["t", "xi", "x_c", "v_c", "phase"]);
        for s in self.samples() {
            table.push(vec![s.t, s.xi, s.x_c, s.v_c, s.phase]);
        }
        table.write(out)
    }
}

/// Solves the driven oscillator on `n_samples` equally spaced times in `[0, t_end]`.
pub fn solve_trajectory(
    profile: &DrivingProfile,
    params: &SystemParams,
    t_end: f64,
    n_samples: usize,
) -> Result<ClassicalTrajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::domain("t_end", "must be positive"));
    }
    if n_samples < 2 {
        return Err(Error::domain("n_samples", "need at least two samples"));
    }
    let omega = params.omega;
    let pieces = profile.pieces();
    let mut starts = Vec::with_capacity(pieces.len());
    let mut state = (0.0, 0.0);
    starts.push(state);
    for w in pieces.windows(2) {
        state = advance(w[0], state, w[1].start(), omega);
        starts.push(state);
    }

    // the last sample is exactly t_end so a jump at t_end is included
    let times: Vec<f64> = (0..n_samples)
        .map(|i| {
            if i + 1 == n_samples {
                t_end
            } else {
                t_end * i as f64 / (n_samples - 1) as f64
            }
        })
        .collect();
    let mut traj = ClassicalTrajectory {
        profile: profile.clone(),
        mass: params.effective_mass,
        omega,
        starts,
        xi: times.iter().map(|&t| profile.xi(t)).collect(),
        x_c: Vec::with_capacity(n_samples),
        v_c: Vec::with_capacity(n_samples),
        phase: Vec::with_capacity(n_samples),
        times,
    };
    let mut phase = 0.0;
    for i in 0..n_samples {
        let t = traj.times[i];
        let (x, v) = traj.position_velocity(t);
        if i > 0 {
            phase += traj.phase_increment(traj.times[i - 1], t);
        }
        traj.x_c.push(x);
        traj.v_c.push(v);
        traj.phase.push(phase);
    }
    Ok(traj)
}

/// `sin(z)/z` with the removable point filled in.
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Evolves `(x, v)` from the start of `piece` to time `t` inside it.
fn advance(piece: Piece, (x0, v0): (f64, f64), t: f64, omega: f64) -> (f64, f64) {
    match piece {
        Piece::Affine { start, xi0, slope } => {
            let tau = t - start;
            let (s, c) = (omega * tau).sin_cos();
            let u0 = x0 - xi0;
            let w0 = v0 - slope;
            let u = u0 * c + w0 / omega * s;
            let du = -u0 * omega * s + w0 * c;
            (xi0 + slope * tau + u, slope + du)
        }
        Piece::Sinusoid { amp, period, sign } => {
            // free motion from the initial state plus the driven response from rest
            let (s, c) = (omega * t).sin_cos();
            let mut x = x0 * c + v0 / omega * s;
            let mut v = -x0 * omega * s + v0 * c;

            let ramp = amp / period;
            x += ramp * (t - s / omega);
            v += ramp * (1.0 - c);

            // response to w^2 A sin(W t), written so that W -> w stays finite
            let a = sign * amp / (2.0 * std::f64::consts::PI);
            let big = 2.0 * std::f64::consts::PI / period;
            let half_sum = 0.5 * (big + omega) * t;
            let sc = sinc(0.5 * (big - omega) * t);
            x += omega * a * (s - omega * t * half_sum.cos() * sc) / (omega + big);
            v += omega * omega * a * big * t * half_sum.sin() * sc / (omega + big);
            (x, v)
        }
    }
}

/// Residual oscillation amplitude about `xi(T)` read off the trajectory at `T`.
pub fn residual_amplitude(traj: &ClassicalTrajectory, transit: f64) -> Result<ResidualAmplitude> {
    if !(0.0..=traj.t_end()).contains(&transit) {
        return Err(Error::domain("T", "outside the trajectory time range"));
    }
    let s = traj.state_at(transit)?;
    let xi_t = traj.profile().xi_t();
    let w = traj.omega;
    Ok(ResidualAmplitude::new(
        (s.x_c - xi_t).hypot(s.v_c / w),
        xi_t,
    ))
}

/// Closed-form residual amplitude for the spin-flip displacement `pi lambda_so / 2`.
pub fn residual_closed_form(
    kind: DrivingKind,
    transit: f64,
    params: &SystemParams,
) -> Result<ResidualAmplitude> {
    if !params.has_spin_orbit() {
        return Err(Error::NoSpinOrbit);
    }
    let xi_t = 0.5 * std::f64::consts::PI * params.lambda_so;
    residual_closed_form_for(kind, transit, xi_t, params)
}

/// Closed-form residual amplitude for an arbitrary displacement `xi_t`.
///
/// The amplitude is linear in `xi_t`. The sinusoidal forms have a removable
/// singularity at `T = T0`, where this returns [`Error::Singular`].
pub fn residual_closed_form_for(
    kind: DrivingKind,
    transit: f64,
    xi_t: f64,
    params: &SystemParams,
) -> Result<ResidualAmplitude> {
    if !(transit.is_finite() && transit > 0.0) {
        return Err(Error::domain("T", "transit time must be positive"));
    }
    let t0 = params.t0;
    let r = transit / t0;
    let ramp = xi_t.abs() / (std::f64::consts::PI * r) * (std::f64::consts::PI * r).sin().abs();
    let a = match kind {
        DrivingKind::LinearRamp => ramp,
        DrivingKind::SinusoidalSmooth | DrivingKind::SinusoidalBroken => {
            if transit == t0 {
                return Err(Error::Singular(
                    "sinusoidal residual at T = T0; solve the trajectory instead".into(),
                ));
            }
            let (tt, t02) = (transit * transit, t0 * t0);
            let numerator = if kind == DrivingKind::SinusoidalSmooth {
                t02
            } else {
                2.0 * tt - t02
            };
            ramp * (numerator / (tt - t02)).abs()
        }
        DrivingKind::TwoStep => xi_t.abs() * (std::f64::consts::PI * r).cos().abs(),
        DrivingKind::Step => xi_t.abs(),
        DrivingKind::Tabulated => {
            return Err(Error::domain(
                "kind",
                "no closed form for tabulated profiles",
            ))
        }
    };
    Ok(ResidualAmplitude::new(a, xi_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit() -> SystemParams {
        SystemParams::dimensionless(10.0, 0.0).unwrap()
    }

    #[test]
    fn last_sample_sees_a_jump_at_t_end() {
        let p = unit();
        let profile = DrivingProfile::new(DrivingKind::TwoStep, 3.0, 5.0 * p.t0).unwrap();
        let traj = solve_trajectory(&profile, &p, profile.transit(), 201).unwrap();
        assert_eq!(*traj.times().last().unwrap(), profile.transit());
        assert_eq!(*traj.xi().last().unwrap(), 3.0);
    }

    /// Duhamel convolution `x(t) = w int_0^t sin(w(t-s)) xi(s) ds` by brute force.
    fn duhamel(profile: &DrivingProfile, omega: f64, t: f64) -> f64 {
        let mut edges = vec![0.0];
        edges.extend(profile.breakpoints().into_iter().filter(|&b| b < t));
        edges.push(t);
        edges
            .windows(2)
            .map(|w| {
                quadrature::integrate(
                    |s| omega * (omega * (t - s)).sin() * profile.xi(s),
                    w[0],
                    w[1],
                    0.01,
                )
            })
            .sum()
    }

    #[test]
    fn linear_ramp_matches_convolution() {
        let p = unit();
        let profile = DrivingProfile::new(DrivingKind::LinearRamp, 7.0, 9.0).unwrap();
        let traj = solve_trajectory(&profile, &p, 9.0, 31).unwrap();
        let v = 7.0 / 9.0;
        for s in traj.samples() {
            let closed = v * (s.t - s.t.sin());
            assert!((s.x_c - closed).abs() < 1e-12);
            assert!((s.x_c - duhamel(&profile, 1.0, s.t)).abs() < 1e-10);
        }
    }

    #[test]
    fn step_matches_convolution() {
        let p = unit();
        let profile = DrivingProfile::new(DrivingKind::Step, 2.5, 1.0).unwrap();
        let traj = solve_trajectory(&profile, &p, 20.0, 41).unwrap();
        for s in traj.samples() {
            assert!((s.x_c - 2.5 * (1.0 - s.t.cos())).abs() < 1e-12);
            assert!((s.x_c - duhamel(&profile, 1.0, s.t)).abs() < 1e-10);
        }
    }

    #[test]
    fn sinusoids_match_convolution_including_resonance() {
        let p = unit();
        for kind in [DrivingKind::SinusoidalSmooth, DrivingKind::SinusoidalBroken] {
            for transit in [0.7 * p.t0, p.t0, p.t0 * (1.0 + 1e-7), 2.3 * p.t0] {
                let profile = DrivingProfile::new(kind, 5.0, transit).unwrap();
                let traj = solve_trajectory(&profile, &p, 1.5 * transit, 25).unwrap();
                for s in traj.samples() {
                    let d = duhamel(&profile, 1.0, s.t);
                    assert!(
                        (s.x_c - d).abs() < 1e-10,
                        "{kind} T={transit} t={} {} {d}",
                        s.t,
                        s.x_c
                    );
                }
            }
        }
    }

    #[test]
    fn at_rest_is_trivial() {
        let p = unit();
        let traj = solve_trajectory(&DrivingProfile::at_rest(3.0).unwrap(), &p, 10.0, 11).unwrap();
        assert!(traj
            .samples()
            .all(|s| s.x_c == 0.0 && s.v_c == 0.0 && s.phase == 0.0));
    }

    #[test]
    fn residuals() {
        let p = unit();
        let xi_t = 0.5 * PI * p.lambda_so;
        let ramp = |transit: f64| {
            let profile = DrivingProfile::new(DrivingKind::LinearRamp, xi_t, transit).unwrap();
            let traj = solve_trajectory(&profile, &p, transit, 3).unwrap();
            residual_amplitude(&traj, transit).unwrap()
        };
        assert!(ramp(p.t0).a < 1e-12);
        assert_relative_eq!(ramp(p.t0 / 2.0).a, p.lambda_so, max_relative = 1e-12);

        let step = DrivingProfile::new(DrivingKind::Step, 1.7, 1.0).unwrap();
        let traj = solve_trajectory(&step, &p, 30.0, 5).unwrap();
        for t in [0.0, 0.3, 4.0, 29.0] {
            assert_relative_eq!(
                residual_amplitude(&traj, t).unwrap().a,
                1.7,
                max_relative = 1e-12
            );
        }
        assert!(residual_amplitude(&traj, 31.0).is_err());
    }

    #[test]
    fn closed_form_values() {
        let p = unit();
        let a = residual_closed_form(DrivingKind::LinearRamp, 1.5 * p.t0, &p).unwrap();
        assert_relative_eq!(a.a, p.lambda_so / 3.0, max_relative = 1e-12);
        let a = residual_closed_form(DrivingKind::SinusoidalSmooth, 2.0 * p.t0, &p).unwrap();
        assert!(a.a < 1e-14);
        let a = residual_closed_form(DrivingKind::LinearRamp, 1e6 * p.t0, &p).unwrap();
        assert!(a.relative < 1e-6);
        assert!(matches!(
            residual_closed_form(DrivingKind::SinusoidalSmooth, p.t0, &p),
            Err(Error::Singular(_))
        ));
        assert!(residual_closed_form(DrivingKind::Tabulated, p.t0, &p).is_err());
    }

    #[test]
    fn spin_flip_schedules_leave_no_residual() {
        let p = unit();
        for kind in DrivingKind::NAMED {
            let profile = DrivingProfile::spin_flip(kind, &p).unwrap();
            let traj = solve_trajectory(&profile, &p, profile.transit(), 2).unwrap();
            let a = residual_amplitude(&traj, profile.transit()).unwrap();
            assert!(a.a < 1e-10 * profile.xi_t(), "{kind}: {}", a.a);
        }
    }

    #[test]
    fn ode_residual_by_central_differences() {
        let p = unit();
        let h = 1e-3;
        for kind in [
            DrivingKind::LinearRamp,
            DrivingKind::SinusoidalSmooth,
            DrivingKind::SinusoidalBroken,
        ] {
            let profile = DrivingProfile::new(kind, 4.0, 1.3 * p.t0).unwrap();
            let traj = solve_trajectory(&profile, &p, 2.0 * p.t0, 401).unwrap();
            for &t in &traj.times()[1..traj.times().len() - 1] {
                if (t - profile.transit()).abs() < 2.0 * h {
                    continue;
                }
                let x = |s: f64| traj.state_at(s).unwrap().x_c;
                let acc = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
                let res = acc + x(t) - profile.evaluate(t).unwrap();
                assert!(res.abs() < 1e-5, "{kind} t={t} residual {res}");
            }
        }
    }

    #[test]
    fn energy_conserved_while_dot_rests() {
        let p = unit();
        let profile = DrivingProfile::new(DrivingKind::TwoStep, 6.0, 2.0).unwrap();
        let traj = solve_trajectory(&profile, &p, 8.0, 801).unwrap();
        let energy = |s: ClassicalState| 0.5 * (s.v_c * s.v_c + s.lag() * s.lag());
        let before: Vec<f64> = traj.samples().filter(|s| s.t < 2.0).map(energy).collect();
        let after: Vec<f64> = traj.samples().filter(|s| s.t >= 2.0).map(energy).collect();
        for set in [before, after] {
            let e0 = set[0];
            assert!(set.iter().all(|e| (e - e0).abs() < 1e-12));
        }
    }

    #[test]
    fn phase_matches_refined_trapezoid() {
        let p = unit();
        for kind in DrivingKind::NAMED {
            let profile = DrivingProfile::new(kind, 5.0, 1.7 * p.t0).unwrap();
            let t_end = 2.5 * p.t0;
            let traj = solve_trajectory(&profile, &p, t_end, 101).unwrap();
            // trapezoid at half the sample spacing, refined once by Richardson and
            // split at the stop time so the TwoStep jump is never straddled
            let l = |t: f64| traj.lagrangian_at(t);
            let trap = |a: f64, b: f64, n: usize| {
                let h = (b - a) / n as f64;
                let inner: f64 = (1..n).map(|i| l(a + i as f64 * h)).sum();
                h * (0.5 * (l(a) + l(b)) + inner)
            };
            let integral = |a: f64, b: f64| {
                let n = 20_000;
                let coarse = trap(a, b, n);
                let fine = trap(a, b, 2 * n);
                fine + (fine - coarse) / 3.0
            };
            let stop = profile.transit();
            let reference = -(integral(0.0, stop - 1e-12) + integral(stop, t_end));
            let phi = *traj.phase().last().unwrap();
            assert!(
                (phi - reference).abs() < 1e-8 * (1.0 + phi.abs()),
                "{kind}: {phi} vs {reference}"
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn superposition(
                a in prop::collection::vec(-2.0f64..2.0, 6),
                b in prop::collection::vec(-2.0f64..2.0, 6),
            ) {
                let p = SystemParams::dimensionless(5.0, 0.0).unwrap();
                let table = |v: &[f64]| {
                    let mut t = vec![(0.0, 0.0)];
                    t.extend(v.iter().enumerate().map(|(i, &x)| (0.9 * (i + 1) as f64, x)));
                    t
                };
                let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                let solve = |v: &[f64]| {
                    let profile = DrivingProfile::tabulated(table(v)).unwrap();
                    solve_trajectory(&profile, &p, 8.0, 33).unwrap()
                };
                let (ta, tb, ts) = (solve(&a), solve(&b), solve(&sum));
                for i in 0..33 {
                    prop_assert!((ta.x_c()[i] + tb.x_c()[i] - ts.x_c()[i]).abs() < 1e-12);
                    prop_assert!((ta.v_c()[i] + tb.v_c()[i] - ts.v_c()[i]).abs() < 1e-12);
                }
            }

            #[test]
            fn tabulated_ramp_equals_closed_form(xi_t in 0.1f64..20.0, transit in 0.3f64..30.0) {
                let p = SystemParams::dimensionless(5.0, 0.0).unwrap();
                let tab = DrivingProfile::tabulated(vec![(0.0, 0.0), (transit, xi_t)]).unwrap();
                let ramp = DrivingProfile::new(DrivingKind::LinearRamp, xi_t, transit).unwrap();
                let a = solve_trajectory(&tab, &p, 2.0 * transit, 17).unwrap();
                let b = solve_trajectory(&ramp, &p, 2.0 * transit, 17).unwrap();
                for i in 0..17 {
                    prop_assert!((a.x_c()[i] - b.x_c()[i]).abs() < 1e-12 * (1.0 + xi_t));
                    prop_assert!((a.phase()[i] - b.phase()[i]).abs() < 1e-9 * (1.0 + b.phase()[i].abs()));
                }
            }
        }
    }
}
