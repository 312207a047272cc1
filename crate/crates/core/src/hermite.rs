//! Normalized harmonic-oscillator eigenfunctions.

use std::f64::consts::PI;

const RESCALE: f64 = 1e200;

/// `phi_0(u), ..., phi_{n_max}(u)` for unit oscillator length.
///
/// Uses the three-term recurrence
/// `phi_{n+1} = sqrt(2/(n+1)) u phi_n - sqrt(n/(n+1)) phi_{n-1}`,
/// carrying the gaussian envelope as a separate logarithm so that neither the
/// envelope nor the polynomial growth overflows far from the origin.
pub fn hermite_functions(n_max: usize, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    hermite_functions_into(n_max, u, &mut out);
    out
}

pub fn hermite_functions_into(n_max: usize, u: f64, out: &mut Vec<f64>) {
    out.clear();
    let mut log_scale = -0.5 * u * u - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    out.push(scaled(cur, log_scale));
    for n in 0..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * u * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(scaled(cur, log_scale));
    }
}

fn scaled(value: f64, log_scale: f64) -> f64 {
    if log_scale > -700.0 || value == 0.0 {
        value * log_scale.exp()
    } else {
        value.signum() * (value.abs().ln() + log_scale).exp()
    }
}

/// Single eigenfunction `psi_n(x)` for oscillator length `sigma`.
pub fn psi(n: usize, x: f64, sigma: f64) -> f64 {
    let values = hermite_functions(n, x / sigma);
    values[n] / sigma.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit physicists' Hermite polynomial and factorial normalization.
    fn direct(n: usize, u: f64) -> f64 {
        let mut h = vec![1.0, 2.0 * u];
        for k in 1..n {
            h.push(2.0 * u * h[k] - 2.0 * k as f64 * h[k - 1]);
        }
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        h[n] * (-0.5 * u * u).exp() / (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt()
    }

    #[test]
    fn matches_explicit_polynomials() {
        for n in 0..12 {
            for &u in &[-3.1, -0.4, 0.0, 0.9, 2.5] {
                let v = hermite_functions(n, u)[n];
                assert!((v - direct(n, u)).abs() < 1e-13, "n={n} u={u}");
            }
        }
    }

    #[test]
    fn orthonormal_up_to_200() {
        let n_max = 200;
        let h = 0.02;
        let grid: Vec<f64> = (-2500..=2500).map(|i| i as f64 * h).collect();
        let table: Vec<Vec<f64>> = grid.iter().map(|&u| hermite_functions(n_max, u)).collect();
        for (a, b) in [
            (0, 0),
            (1, 1),
            (57, 57),
            (200, 200),
            (0, 2),
            (199, 200),
            (100, 3),
        ] {
            let s: f64 = table.iter().map(|r| r[a] * r[b]).sum::<f64>() * h;
            let expected = if a == b { 1.0 } else { 0.0 };
            assert!((s - expected).abs() < 1e-10, "<{a}|{b}> = {s}");
        }
    }

    #[test]
    fn far_tail_is_finite() {
        let v = hermite_functions(200, 45.0);
        assert!(v.iter().all(|x| x.is_finite()));
        assert!(v[200] > 0.0);
        assert_eq!(hermite_functions(3, 0.0)[1], 0.0);
    }

    #[test]
    fn scaled_normalization() {
        let sigma = 2.5;
        let h = 0.01;
        let s: f64 = (-4000..=4000)
            .map(|i| psi(3, i as f64 * h, sigma).powi(2))
            .sum::<f64>()
            * h;
        assert!((s - 1.0).abs() < 1e-12);
    }
}
