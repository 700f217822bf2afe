//! De la Vallée-Poussin interpolatory means on the torus.
//!
//! With `t_k = πk/(3n)`, `k = 0..6n`,
//!
//! ```text
//! V_n f(φ) = (1/(3n)) Σ_k f(t_k) K_n(φ - t_k)
//! ```
//!
//! and the bivariate mean is the tensor product of two such passes.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{lp_norm_torus, NormSpec};
use crate::testbed::TorusFunction;

/// `K_n(φ) = 1/2 + Σ_{k≤2n} cos kφ + Σ_{2n<k<4n} ((4n-k)/(2n)) cos kφ`.
pub fn vdv_kernel(n: usize, phi: f64) -> f64 {
    let mut s = 0.5;
    for k in 1..4 * n {
        s += multiplier(n, k) * (k as f64 * phi).cos();
    }
    s
}

#[inline]
fn multiplier(n: usize, k: usize) -> f64 {
    if k <= 2 * n {
        1.0
    } else if k < 4 * n {
        (4 * n - k) as f64 / (2 * n) as f64
    } else {
        0.0
    }
}

/// The sample parameters `πk/(3n)`, `k = 0..6n`.
pub fn sample_params(n: usize) -> Vec<f64> {
    (0..6 * n).map(|k| PI * k as f64 / (3 * n) as f64).collect()
}

fn check_samples(samples: &[f64], n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if samples.len() != 6 * n {
        return Err(Error::Domain(format!(
            "expected {} samples for n = {n}, got {}",
            6 * n,
            samples.len()
        )));
    }
    if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Data(format!("sample {k} is not finite: {}", samples[k])));
    }
    Ok(())
}

/// Kernel form of `V_n f(φ)`.
pub fn vdv_apply_1d(samples: &[f64], n: usize, phi: f64) -> Result<f64> {
    check_samples(samples, n)?;
    let s: f64 = sample_params(n)
        .iter()
        .zip(samples)
        .map(|(t, f)| f * vdv_kernel(n, phi - t))
        .sum();
    Ok(s / (3 * n) as f64)
}

/// `V_n f` stored through its Fourier coefficients, so that evaluation costs
/// `O(n)` per point instead of `O(n²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VdvOperator1D {
    n: usize,
    samples: Vec<f64>,
    /// `a_0/2, μ_1 a_1, …`
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
}

impl VdvOperator1D {
    pub fn new(samples: Vec<f64>, n: usize) -> Result<Self> {
        check_samples(&samples, n)?;
        let big = 6 * n;
        // cos/sin of 2πr/(6n), indexed by (j·k) mod 6n
        let table: Vec<(f64, f64)> = (0..big)
            .map(|r| (2.0 * PI * r as f64 / big as f64).sin_cos())
            .collect();
        let scale = 1.0 / (3 * n) as f64;
        let mut cos_coeffs = Vec::with_capacity(4 * n);
        let mut sin_coeffs = Vec::with_capacity(4 * n);
        for j in 0..4 * n {
            let (mut a, mut b) = (0.0, 0.0);
            for (k, f) in samples.iter().enumerate() {
                let (s, c) = table[(j * k) % big];
                a += f * c;
                b += f * s;
            }
            let mu = if j == 0 { 0.5 } else { multiplier(n, j) };
            cos_coeffs.push(mu * scale * a);
            sin_coeffs.push(mu * scale * b);
        }
        Ok(Self {
            n,
            samples,
            cos_coeffs,
            sin_coeffs,
        })
    }

    pub fn from_fn(f: impl Fn(f64) -> f64, n: usize) -> Result<Self> {
        Self::new(sample_params(n).into_iter().map(f).collect(), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_params(&self) -> Vec<f64> {
        sample_params(self.n)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let (s1, c1) = phi.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        let mut acc = self.cos_coeffs[0];
        for j in 1..self.cos_coeffs.len() {
            // rotate (cos (j-1)φ, sin (j-1)φ) by φ, renormalising every 64 steps
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
            if j % 64 == 0 {
                let (sj, cj) = (j as f64 * phi).sin_cos();
                c = cj;
                s = sj;
            }
            acc += self.cos_coeffs[j] * c + self.sin_coeffs[j] * s;
        }
        acc
    }
}

/// `V_{m,n} f`, applied as a pass in `ψ` on each of the `6m` sample rows
/// followed by a pass in `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct VdvOperator2D {
    m: usize,
    n: usize,
    rows: Vec<VdvOperator1D>,
}

impl VdvOperator2D {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Sync, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDegree(0));
        }
        let rows = sample_params(m)
            .into_par_iter()
            .map(|phi| VdvOperator1D::from_fn(|psi| f(phi, psi), n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { m, n, rows })
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn eval(&self, phi: f64, psi: f64) -> f64 {
        let column: Vec<f64> = self.rows.iter().map(|r| r.eval(psi)).collect();
        VdvOperator1D::new(column, self.m)
            .expect("row count is 6m")
            .eval(phi)
    }
}

/// One-shot `V_{m,n} f(φ, ψ)`.
pub fn vdv_apply_2d(f: impl Fn(f64, f64) -> f64 + Sync, m: usize, n: usize, phi: f64, psi: f64) -> Result<f64> {
    Ok(VdvOperator2D::new(f, m, n)?.eval(phi, psi))
}

/// Highest Fourier mode of `V_n f` visible on a `16n`-point grid.
pub fn vdv_spectral_degree_check(samples: &[f64], n: usize) -> Result<usize> {
    let op = VdvOperator1D::new(samples.to_vec(), n)?;
    let q = 16 * n;
    let vals: Vec<f64> = (0..q).map(|k| op.eval(2.0 * PI * k as f64 / q as f64)).collect();
    let amps: Vec<f64> = (0..q / 2)
        .map(|j| {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, v) in vals.iter().enumerate() {
                let (s, c) = (2.0 * PI * ((j * k) % q) as f64 / q as f64).sin_cos();
                re += v * c;
                im -= v * s;
            }
            (re * re + im * im).sqrt() / q as f64
        })
        .collect();
    let peak = amps.iter().copied().fold(0.0, f64::max);
    let threshold = (1e-9 * peak).max(1e-13);
    Ok(amps.iter().rposition(|&a| a > threshold).unwrap_or(0))
}

/// Numerical check of the three interpolatory-mean properties for one `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanPropertiesReport {
    pub n: usize,
    pub degree: usize,
    pub degree_bound: usize,
    pub interpolation_residual: f64,
    pub reproduction_error: f64,
    pub tolerance: f64,
}

impl MeanPropertiesReport {
    pub fn passed(&self) -> bool {
        self.degree <= self.degree_bound
            && self.interpolation_residual <= self.tolerance
            && self.reproduction_error <= self.tolerance
    }
}

/// Random samples give the degree and interpolation checks, a random
/// trigonometric polynomial of degree `2n` (including `cos 2nφ`) the
/// reproduction check on 101 angles.
pub fn check_mean_properties(n: usize, seed: u64, tolerance: f64) -> Result<MeanPropertiesReport> {
    if n == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..6 * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let degree = vdv_spectral_degree_check(&samples, n)?;
    let op = VdvOperator1D::new(samples.clone(), n)?;
    let interpolation_residual = sample_params(n)
        .iter()
        .zip(&samples)
        .map(|(t, f)| (op.eval(*t) - f).abs())
        .fold(0.0, f64::max);

    let a: Vec<f64> = (0..=2 * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let b: Vec<f64> = (0..=2 * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let trig = |phi: f64| -> f64 {
        (0..=2 * n)
            .map(|j| a[j] * (j as f64 * phi).cos() + b[j] * (j as f64 * phi).sin())
            .sum::<f64>()
            + (2.0 * n as f64 * phi).cos()
    };
    let rep = VdvOperator1D::from_fn(trig, n)?;
    let reproduction_error = (0..101)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / 101.0;
            (rep.eval(phi) - trig(phi)).abs()
        })
        .fold(0.0, f64::max);

    Ok(MeanPropertiesReport {
        n,
        degree,
        degree_bound: 4 * n - 1,
        interpolation_residual,
        reproduction_error,
        tolerance,
    })
}

/// `‖g - V_n g‖_{L_p(𝕋)}` on 2^14 quadrature points split at the jumps of `g`.
pub fn torus_error(g: &TorusFunction, n: usize, p: f64) -> Result<f64> {
    let op = VdvOperator1D::from_fn(|t| g.eval(t), n)?;
    let spec = NormSpec {
        p,
        quadrature_points_per_axis: 1 << 14,
        refinement_tolerance: 1e-6,
        max_refinements: 2,
    };
    lp_norm_torus(|t| g.eval(t) - op.eval(t), &g.breakpoints, &spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        for n in [1, 2, 3, 8] {
            assert!((vdv_kernel(n, 0.0) - 3.0 * n as f64).abs() < 1e-12);
            assert!((vdv_kernel(n, 0.7) - vdv_kernel(n, -0.7)).abs() < 1e-13);
        }
        assert!(vdv_kernel(1, PI).abs() < 1e-14);
    }

    #[test]
    fn constant_is_reproduced() {
        let ones = vec![1.0; 24];
        for phi in [0.0, 0.3, 2.0, 5.9] {
            assert!((vdv_apply_1d(&ones, 4, phi).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(vdv_apply_1d(&ones, 3, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn coefficient_form_matches_kernel_form() {
        let n = 5;
        let samples: Vec<f64> = (0..6 * n).map(|k| ((k * 7919) % 13) as f64 - 6.0).collect();
        let op = VdvOperator1D::new(samples.clone(), n).unwrap();
        for k in 0..50 {
            let phi = 0.13 * k as f64;
            let direct = vdv_apply_1d(&samples, n, phi).unwrap();
            assert!((op.eval(phi) - direct).abs() < 1e-11, "{phi}");
        }
    }

    #[test]
    fn interpolates_and_reproduces() {
        for n in [1, 2, 4, 8, 16] {
            let r = check_mean_properties(n, 11, 1e-9).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        let n = 3;
        let c2n = VdvOperator1D::from_fn(|t| (2.0 * n as f64 * t).cos(), n).unwrap();
        for k in 0..101 {
            let phi = 0.0621 * k as f64;
            assert!((c2n.eval(phi) - (6.0 * phi).cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_degree_examples() {
        assert_eq!(vdv_spectral_degree_check(&[2.5; 24], 4).unwrap(), 0);
        let n = 4;
        let s: Vec<f64> = sample_params(n).iter().map(|t| (2.0 * n as f64 * t).cos()).collect();
        assert_eq!(vdv_spectral_degree_check(&s, n).unwrap(), 2 * n);
        let r: Vec<f64> = (0..24).map(|k| ((k * 31) % 7) as f64).collect();
        assert!(vdv_spectral_degree_check(&r, 4).unwrap() <= 15);
    }

    #[test]
    fn bivariate_mean() {
        let one = VdvOperator2D::new(|_, _| 1.0, 3, 2).unwrap();
        assert!((one.eval(0.4, 1.9) - 1.0).abs() < 1e-12);

        let g = |phi: f64| (phi.sin() * 3.0).exp();
        let two = VdvOperator2D::new(|phi, _| g(phi), 3, 5).unwrap();
        let samples: Vec<f64> = sample_params(3).into_iter().map(g).collect();
        for phi in [0.1, 1.3, 4.4] {
            let a = two.eval(phi, 0.77);
            let b = vdv_apply_1d(&samples, 3, phi).unwrap();
            assert!((a - b).abs() < 1e-12);
        }

        let (m, n) = (4, 3);
        let f = |phi: f64, psi: f64| ((phi * 5.0).sin() + psi * psi).fract();
        let op = VdvOperator2D::new(f, m, n).unwrap();
        for phi in sample_params(m) {
            for psi in sample_params(n) {
                assert!((op.eval(phi, psi) - f(phi, psi)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn torus_step_error_shrinks() {
        let g = crate::testbed::find_torus("torus_step").unwrap();
        let e8 = torus_error(&g, 8, 2.0).unwrap();
        let e32 = torus_error(&g, 32, 2.0).unwrap();
        assert!(e32 < e8);
    }
}
