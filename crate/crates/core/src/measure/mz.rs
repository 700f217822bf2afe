use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{series_weighted_norm, NormSpec};
use crate::cheb::ChebSeries2D;
use crate::error::{Error, Result};
use crate::nodes::{node_set_from_grid, spectral_set, DegreePair};

/// Band of `R(P) = (Σ λ |P(node)|^p)^{1/p} / ‖P‖_{L_{p,w}}` over an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzReport {
    pub degrees: DegreePair,
    pub p: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub trials: usize,
    pub seed: u64,
}

/// `trials` series over `Γ_{m,n}` with i.i.d. uniform `[-1, 1]` coefficients,
/// each scaled to unit ℓ₂ norm. Deterministic in `seed`.
pub fn random_series(d: DegreePair, trials: usize, seed: u64) -> Vec<ChebSeries2D> {
    let gamma = spectral_set(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let mut c: Vec<f64> = (0..gamma.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                c.iter_mut().for_each(|v| *v /= norm);
            } else {
                c[0] = 1.0;
            }
            ChebSeries2D::from_parts(gamma.exponents().to_vec(), c)
        })
        .collect()
}

/// Quadrature used for the continuous side: enough points to resolve degree
/// `max(m, n)` comfortably. `|P|^p` is smooth only for even `p`; otherwise
/// its kinks on the zero set of `P` limit convergence, hence 1e-4.
pub fn mz_norm_spec(d: DegreePair, p: f64) -> NormSpec {
    let deg = d.m().max(d.n());
    let points = (8 * (deg + 1)).next_power_of_two().max(128);
    let even = p.fract() == 0.0 && (p as u64).is_multiple_of(2);
    NormSpec {
        p,
        quadrature_points_per_axis: points,
        refinement_tolerance: if even { 1e-6 } else { 1e-4 },
        max_refinements: 3,
    }
}

pub fn mz_ratio(d: DegreePair, p: f64, trials: usize, seed: u64) -> Result<MzReport> {
    mz_ratio_with(d, trials, seed, &mz_norm_spec(d, p))
}

pub fn mz_ratio_with(d: DegreePair, trials: usize, seed: u64, spec: &NormSpec) -> Result<MzReport> {
    spec.validate()?;
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let p = spec.p;
    let nodes = node_set_from_grid(d);
    let ratios: Vec<Result<f64>> = random_series(d, trials, seed)
        .par_iter()
        .map(|s| {
            let discrete = nodes
                .nodes()
                .iter()
                .map(|nd| nd.weight * s.eval_unchecked(nd.x, nd.y).abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p);
            let continuous = series_weighted_norm(s, spec)?;
            Ok(discrete / continuous)
        })
        .collect();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for r in ratios {
        let r = r?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(MzReport {
        degrees: d,
        p,
        ratio_min: lo,
        ratio_max: hi,
        trials,
        seed,
    })
}
