//! Physical constants of the wire and the dimensionless frame.
//!
//! Everything downstream works in units where `hbar = m* = omega = 1`, so the
//! oscillator length `sigma` is 1 and the period `T0` is `2*pi`. Physical
//! units survive only in [`PhysicalUnits`], which is kept for labelling output
//! and for converting back.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `hbar^2 / m_e` in eV nm^2 (from `hbar c = 197.3269804 eV nm`, `m_e c^2 = 510998.95 eV`).
pub const HBAR2_OVER_ME_EV_NM2: f64 = 197.326_980_4 * 197.326_980_4 / 510_998.95;

/// `hbar` in meV fs.
pub const HBAR_MEV_FS: f64 = 658.211_956_9;

/// Material parameters as given in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Effective mass in units of the free-electron mass.
    pub mass_ratio: f64,
    /// Confinement level spacing `hbar*omega` in meV.
    #[serde(rename = "omega_meV")]
    pub omega_mev: f64,
    /// Total spin-orbit length in nm.
    pub lambda_so_nm: f64,
    #[serde(default)]
    pub beta_over_alpha: f64,
}

/// Conversion factors from the dimensionless frame to laboratory units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalUnits {
    pub mass_ratio: f64,
    /// One dimensionless length unit (the oscillator length) in nm.
    pub length_nm: f64,
    /// One dimensionless energy unit (`hbar*omega`) in meV.
    pub energy_mev: f64,
    /// One dimensionless time unit (`1/omega`) in fs.
    pub time_fs: f64,
}

/// Parameters of the driven dot Hamiltonian plus the scales derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub effective_mass: f64,
    pub omega: f64,
    /// Rashba coupling (velocity units).
    pub alpha: f64,
    /// Dresselhaus coupling (velocity units).
    pub beta: f64,
    /// Oscillator length `(m* omega)^(-1/2)`.
    pub sigma: f64,
    /// Spin-orbit length `1 / (m* sqrt(alpha^2 + beta^2))`; `+inf` without coupling.
    pub lambda_so: f64,
    /// Energy shift `-m* (alpha^2 + beta^2) / 2`.
    pub e_so: f64,
    /// Oscillator period `2 pi / omega`.
    pub t0: f64,
    pub units: Option<PhysicalUnits>,
}

impl SystemParams {
    /// Builds parameters from the raw Hamiltonian constants (`hbar = 1`).
    pub fn new(effective_mass: f64, omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(effective_mass.is_finite() && effective_mass > 0.0) {
            return Err(Error::domain(
                "effective_mass",
                "must be positive and finite",
            ));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::domain("omega", "must be positive and finite"));
        }
        if !alpha.is_finite() {
            return Err(Error::domain("alpha", "must be finite"));
        }
        if !beta.is_finite() {
            return Err(Error::domain("beta", "must be finite"));
        }
        let coupling = alpha.hypot(beta);
        let lambda_so = if coupling == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (effective_mass * coupling)
        };
        Ok(Self {
            effective_mass,
            omega,
            alpha,
            beta,
            sigma: (effective_mass * omega).sqrt().recip(),
            lambda_so,
            e_so: -0.5 * effective_mass * coupling * coupling,
            t0: 2.0 * PI / omega,
            units: None,
        })
    }

    /// Dimensionless parameters with `lambda_so` given in oscillator lengths.
    ///
    /// `lambda_so_over_sigma = inf` switches spin-orbit coupling off.
    pub fn dimensionless(lambda_so_over_sigma: f64, beta_over_alpha: f64) -> Result<Self> {
        if lambda_so_over_sigma.is_nan() || lambda_so_over_sigma <= 0.0 {
            return Err(Error::domain("lambda_so_over_sigma", "must be positive"));
        }
        if !(beta_over_alpha.is_finite() && beta_over_alpha >= 0.0) {
            return Err(Error::domain(
                "beta_over_alpha",
                "must be non-negative and finite",
            ));
        }
        let coupling = lambda_so_over_sigma.recip();
        let alpha = coupling / beta_over_alpha.hypot(1.0);
        Self::new(1.0, 1.0, alpha, beta_over_alpha * alpha)
    }

    /// Converts laboratory parameters into the dimensionless frame.
    pub fn from_physical(p: PhysicalParams) -> Result<Self> {
        if !(p.mass_ratio.is_finite() && p.mass_ratio > 0.0) {
            return Err(Error::domain("mass_ratio", "must be positive"));
        }
        if !(p.omega_mev.is_finite() && p.omega_mev > 0.0) {
            return Err(Error::domain("omega_meV", "must be positive"));
        }
        if !(p.lambda_so_nm.is_finite() && p.lambda_so_nm > 0.0) {
            return Err(Error::domain("lambda_so_nm", "must be positive"));
        }
        // sigma^2 = hbar^2 / (m* hbar omega)
        let sigma_nm = (HBAR2_OVER_ME_EV_NM2 / (p.mass_ratio * p.omega_mev * 1e-3)).sqrt();
        let mut params = Self::dimensionless(p.lambda_so_nm / sigma_nm, p.beta_over_alpha)?;
        params.units = Some(PhysicalUnits {
            mass_ratio: p.mass_ratio,
            length_nm: sigma_nm,
            energy_mev: p.omega_mev,
            time_fs: HBAR_MEV_FS / p.omega_mev,
        });
        Ok(params)
    }

    /// Inverse of [`SystemParams::from_physical`]; `None` for parameters built without units.
    pub fn to_physical(&self) -> Option<PhysicalParams> {
        let units = self.units?;
        let ratio = if self.alpha == 0.0 {
            0.0
        } else {
            self.beta / self.alpha
        };
        Some(PhysicalParams {
            mass_ratio: units.mass_ratio,
            omega_mev: units.energy_mev * self.omega,
            lambda_so_nm: self.lambda_so * units.length_nm,
            beta_over_alpha: ratio,
        })
    }

    /// `sqrt(alpha^2 + beta^2)`.
    pub fn coupling(&self) -> f64 {
        self.alpha.hypot(self.beta)
    }

    pub fn has_spin_orbit(&self) -> bool {
        self.lambda_so.is_finite()
    }

    /// In-plane unit vector `n` with `n . sigma = (alpha sigma_y - beta sigma_x) / |coupling|`.
    ///
    /// Returns `(0, 1)` when there is no coupling so formulas stay finite.
    pub fn spin_orbit_axis(&self) -> (f64, f64) {
        let c = self.coupling();
        if c == 0.0 {
            (0.0, 1.0)
        } else {
            (-self.beta / c, self.alpha / c)
        }
    }

    /// Spin-orbit rotation angle per unit length, `m* sqrt(alpha^2 + beta^2) = 1/lambda_so`.
    pub fn rotation_rate(&self) -> f64 {
        self.effective_mass * self.coupling()
    }

    /// Attenuation of the mean spin due to the finite wave-packet width,
    /// `exp(-sigma^2 / lambda_so^2)`.
    ///
    /// This is the gaussian average of `cos(2x/lambda_so)` over `|psi_0|^2`,
    /// whose variance is `sigma^2 / 2`.
    pub fn spread_factor(&self) -> f64 {
        let r = self.sigma * self.rotation_rate();
        (-r * r).exp()
    }

    /// Energy of manifold `n` in the co-moving frame, `E_so + (n + 1/2) omega`.
    pub fn manifold_energy(&self, n: usize) -> f64 {
        self.e_so + (n as f64 + 0.5) * self.omega
    }
}

/// Oscillator length used by the figure scenarios: one tenth of the total displacement.
pub fn sigma_from_display_convention(xi_t: f64) -> Result<f64> {
    if !(xi_t.is_finite() && xi_t > 0.0) {
        return Err(Error::domain("xi_T", "displacement must be positive"));
    }
    Ok(0.1 * xi_t)
}

/// `lambda_so / sigma` implied by the figure convention `sigma = 0.1 xi(T)` with `xi(T) = pi lambda_so / 2`.
pub fn display_lambda_over_sigma() -> f64 {
    20.0 / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn insb() -> PhysicalParams {
        PhysicalParams {
            mass_ratio: 0.015,
            omega_mev: 10.0,
            lambda_so_nm: 150.0,
            beta_over_alpha: 0.0,
        }
    }

    #[test]
    fn insb_scales() {
        let p = SystemParams::from_physical(insb()).unwrap();
        let u = p.units.unwrap();
        // sigma = sqrt(7.62 eV A^2 / (0.015 * 0.010 eV)) = 225.4 A
        assert!((u.length_nm - 22.54).abs() < 0.01, "{}", u.length_nm);
        assert!((p.lambda_so - 6.655).abs() < 2e-3, "{}", p.lambda_so);
        let e_so = -1.0 / (2.0 * p.lambda_so * p.lambda_so);
        assert_relative_eq!(p.e_so, e_so, max_relative = 1e-12);
        assert!((p.e_so + 0.0113).abs() < 1e-4);
        assert_eq!(p.sigma, 1.0);
        assert_relative_eq!(p.t0, 2.0 * PI);
    }

    #[test]
    fn unit_frame_identity() {
        let p = SystemParams::dimensionless(1.0, 0.0).unwrap();
        assert_eq!(p.lambda_so, 1.0);
        assert_eq!(p.effective_mass * p.alpha * p.lambda_so, 1.0);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        for (patch, name) in [
            (
                PhysicalParams {
                    mass_ratio: 0.0,
                    ..insb()
                },
                "mass_ratio",
            ),
            (
                PhysicalParams {
                    omega_mev: -1.0,
                    ..insb()
                },
                "omega_meV",
            ),
            (
                PhysicalParams {
                    lambda_so_nm: 0.0,
                    ..insb()
                },
                "lambda_so_nm",
            ),
            (
                PhysicalParams {
                    beta_over_alpha: -0.5,
                    ..insb()
                },
                "beta_over_alpha",
            ),
        ] {
            match SystemParams::from_physical(patch) {
                Err(Error::Domain { field, .. }) => assert_eq!(field, name),
                other => panic!("expected domain error for {name}, got {other:?}"),
            }
        }
    }

    #[test]
    fn no_coupling_sentinel() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(p.lambda_so.is_infinite());
        assert_eq!(p.e_so, 0.0);
        assert_eq!(p.spread_factor(), 1.0);
        assert!(!p.has_spin_orbit());
    }

    #[test]
    fn display_convention() {
        let xi_t = PI * 150.0 / 2.0;
        assert!((sigma_from_display_convention(xi_t).unwrap() - 23.56).abs() < 5e-3);
        // xi_T = 10 sigma reproduces sigma exactly when lambda/sigma = 20/pi
        let lam = display_lambda_over_sigma();
        assert_relative_eq!(PI * lam / 2.0, 10.0, max_relative = 1e-15);
        assert!(sigma_from_display_convention(0.0).is_err());
    }

    #[test]
    fn beta_splits_total_coupling() {
        let p = SystemParams::dimensionless(10.0, 1.0).unwrap();
        assert_relative_eq!(p.lambda_so, 10.0, max_relative = 1e-14);
        assert_relative_eq!(p.alpha, p.beta);
        let (nx, ny) = p.spin_orbit_axis();
        assert_relative_eq!(nx * nx + ny * ny, 1.0, max_relative = 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn physical_round_trip(
                mass in 0.005f64..1.0,
                omega in 0.1f64..50.0,
                lambda in 10.0f64..2000.0,
                ratio in 0.0f64..3.0,
            ) {
                let input = PhysicalParams { mass_ratio: mass, omega_mev: omega, lambda_so_nm: lambda, beta_over_alpha: ratio };
                let p = SystemParams::from_physical(input).unwrap();
                let back = p.to_physical().unwrap();
                prop_assert!((back.mass_ratio / mass - 1.0).abs() < 1e-12);
                prop_assert!((back.omega_mev / omega - 1.0).abs() < 1e-12);
                prop_assert!((back.lambda_so_nm / lambda - 1.0).abs() < 1e-12);
                prop_assert!((back.beta_over_alpha - ratio).abs() < 1e-12 * (1.0 + ratio));
            }

            #[test]
            fn oscillator_length_identity(
                m in 0.01f64..100.0, w in 0.01f64..100.0, a in -5.0f64..5.0, b in -5.0f64..5.0,
            ) {
                let p = SystemParams::new(m, w, a, b).unwrap();
                prop_assert!((p.sigma * p.sigma * m * w - 1.0).abs() < 1e-12);
                prop_assert!(p.e_so <= 0.0);
                if b == 0.0 && a != 0.0 {
                    prop_assert!((p.lambda_so * m * a.abs() - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
