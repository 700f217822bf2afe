//! Weighted `L_{p,w}` norms, discrete `ℓ̃_p` norms, Marcinkiewicz-Zygmund ratio
//! ensembles, Lebesgue constants and log-log rate fitting.
//!
//! Continuous norms are always computed after the substitution `x = cos φ`,
//! `y = cos ψ`. The Chebyshev weight `w = ((1-x²)(1-y²))^{-1/(2p)}` then
//! cancels the Jacobian exactly and
//!
//! ```text
//! ‖f‖^p_{L_{p,w}(J²)} = ∫_0^π ∫_0^π |f(cos φ, cos ψ)|^p dφ dψ,
//! ```
//!
//! so no endpoint singularity is ever sampled.

mod lebesgue;
mod mz;
pub mod quadrature;
mod rate;

use std::f64::consts::PI;

use rayon::prelude::*;

pub use lebesgue::{lebesgue_constant, lebesgue_grid};
pub use mz::{mz_norm_spec, mz_ratio, mz_ratio_with, random_series, MzReport};
pub use rate::{fit_rate, RateRecord, RateReport};

use crate::cheb::{AngleGridEvaluator, ChebSeries2D};
use crate::error::{Error, Result};
use crate::interp::Interpolant;
use crate::testbed::{Regularity, SampledFunction};
use quadrature::PanelRule;

/// Parameters for one continuous norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub p: f64,
    pub quadrature_points_per_axis: usize,
    /// Accepted relative change between `N/2` and `N` points per axis.
    pub refinement_tolerance: f64,
    /// How many times `N` may be doubled before giving up.
    pub max_refinements: usize,
}

/// Absolute floor below which two quadrature results count as equal.
const ABSOLUTE_FLOOR: f64 = 1e-14;
/// ψ-columns per parallel work item.
const BLOCK: usize = 128;

impl NormSpec {
    /// 2^11 points per axis, relative tolerance 1e-6.
    pub fn smooth(p: f64) -> Self {
        Self {
            p,
            quadrature_points_per_axis: 2048,
            refinement_tolerance: 1e-6,
            max_refinements: 2,
        }
    }

    /// As [`NormSpec::smooth`] but with relative tolerance 1e-4.
    pub fn discontinuous(p: f64) -> Self {
        Self {
            refinement_tolerance: 1e-4,
            ..Self::smooth(p)
        }
    }

    /// Tolerance by regularity: [`NormSpec::smooth`] for polynomials and
    /// analytic functions, [`NormSpec::discontinuous`] for everything else.
    pub fn for_function(f: &SampledFunction, p: f64) -> Self {
        match f.regularity {
            Regularity::MemberOfSpace { .. } | Regularity::Analytic => Self::smooth(p),
            _ => Self::discontinuous(p),
        }
    }

    pub fn with_points(self, points: usize) -> Self {
        Self {
            quadrature_points_per_axis: points,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::Domain(format!("p = {} must lie in [1, ∞)", self.p)));
        }
        if self.quadrature_points_per_axis < 2 {
            return Err(Error::Domain("need at least two quadrature points per axis".into()));
        }
        if !(self.refinement_tolerance > 0.0) {
            return Err(Error::Domain("refinement tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[inline]
fn abs_pow(v: f64, p: f64) -> f64 {
    if p == 1.0 {
        v.abs()
    } else if p == 2.0 {
        v * v
    } else {
        v.abs().powf(p)
    }
}

/// Runs `integral(points)` (which must return `∫|F|^p`) at `N/2` and `N`
/// points and keeps doubling until the `p`-th roots agree.
fn refine(spec: &NormSpec, integral: impl Fn(usize) -> f64) -> Result<f64> {
    spec.validate()?;
    let root = |v: f64| v.max(0.0).powf(1.0 / spec.p);
    let mut points = spec.quadrature_points_per_axis;
    let mut coarse = root(integral((points / 2).max(1)));
    for attempt in 0..=spec.max_refinements {
        let fine = root(integral(points));
        let change = (fine - coarse).abs();
        if change <= spec.refinement_tolerance * fine.abs() + ABSOLUTE_FLOOR {
            return Ok(fine);
        }
        if attempt == spec.max_refinements {
            return Err(Error::Quadrature {
                change: change / fine.abs().max(f64::MIN_POSITIVE),
                tolerance: spec.refinement_tolerance,
                points,
            });
        }
        coarse = fine;
        points *= 2;
    }
    unreachable!()
}

type BlockFn<'a> = dyn Fn(&[f64], &[f64], &mut [f64]) + Sync + 'a;

/// `Σ_a Σ_b w_a w_b |F(φ_a, ψ_b)|^p` where `block(phis, psis, out)` fills the
/// row-major `phis × psis` block of `F`. Blocks run in parallel and are
/// reduced in a fixed order.
pub(crate) fn tensor_power_sum(
    phi_rule: &PanelRule,
    psi_rule: &PanelRule,
    p: f64,
    block: &BlockFn,
) -> f64 {
    let nphi = phi_rule.len();
    let partials: Vec<f64> = psi_rule
        .nodes
        .par_chunks(BLOCK)
        .zip(psi_rule.weights.par_chunks(BLOCK))
        .map(|(psis, wpsi)| {
            let mut out = vec![0.0; nphi * psis.len()];
            block(&phi_rule.nodes, psis, &mut out);
            let mut acc = 0.0;
            for (a, wa) in phi_rule.weights.iter().enumerate() {
                let row = &out[a * psis.len()..(a + 1) * psis.len()];
                let inner: f64 = row.iter().zip(wpsi).map(|(v, wb)| wb * abs_pow(*v, p)).sum();
                acc += wa * inner;
            }
            acc
        })
        .collect();
    partials.into_iter().sum()
}

fn pointwise_block<'a>(
    f: &'a (dyn Fn(f64, f64) -> f64 + Sync),
) -> impl Fn(&[f64], &[f64], &mut [f64]) + Sync + 'a {
    move |phis: &[f64], psis: &[f64], out: &mut [f64]| {
        let ys: Vec<f64> = psis.iter().map(|t| t.cos()).collect();
        for (a, phi) in phis.iter().enumerate() {
            let x = phi.cos();
            for (b, &y) in ys.iter().enumerate() {
                out[a * psis.len() + b] = f(x, y);
            }
        }
    }
}

fn angle_breaks(bps: &[f64]) -> Vec<f64> {
    bps.iter().map(|b| b.acos()).collect()
}

/// `‖f‖_{L_{p,w}(J²)}` for a closure, with jump locations `breaks_x`, `breaks_y`
/// given in the `x`/`y` coordinates.
pub fn lp_weighted_norm_2d_fn(
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    breaks_x: &[f64],
    breaks_y: &[f64],
    spec: &NormSpec,
) -> Result<f64> {
    let (bx, by) = (angle_breaks(breaks_x), angle_breaks(breaks_y));
    let block = pointwise_block(f);
    refine(spec, |points| {
        let rx = PanelRule::new(0.0, PI, &bx, points);
        let ry = PanelRule::new(0.0, PI, &by, points);
        tensor_power_sum(&rx, &ry, spec.p, &block)
    })
}

/// `‖f‖_{L_{p,w}(J²)}` using the function's registered breakpoints.
pub fn lp_weighted_norm_2d(f: &SampledFunction, spec: &NormSpec) -> Result<f64> {
    let g = |x: f64, y: f64| f.eval(x, y);
    lp_weighted_norm_2d_fn(&g, &f.breakpoints_x, &f.breakpoints_y, spec)
}

/// `‖P‖_{L_{p,w}(J²)}` for a Chebyshev series.
pub fn series_weighted_norm(series: &ChebSeries2D, spec: &NormSpec) -> Result<f64> {
    refine(spec, |points| {
        let r = PanelRule::new(0.0, PI, &[], points);
        let ev = AngleGridEvaluator::new(series, &r.nodes);
        let block = |_: &[f64], psis: &[f64], out: &mut [f64]| ev.eval_block(psis, out);
        tensor_power_sum(&r, &r, spec.p, &block)
    })
}

/// `‖f - L_{m,n} f‖_{L_{p,w}(J²)}`.
pub fn interpolation_error(f: &SampledFunction, ip: &Interpolant, spec: &NormSpec) -> Result<f64> {
    let (bx, by) = (f.angle_breaks_x(), f.angle_breaks_y());
    refine(spec, |points| {
        let rx = PanelRule::new(0.0, PI, &bx, points);
        let ry = PanelRule::new(0.0, PI, &by, points);
        let ev = AngleGridEvaluator::new(ip.series(), &rx.nodes);
        let xs: Vec<f64> = rx.nodes.iter().map(|t| t.cos()).collect();
        let block = |_: &[f64], psis: &[f64], out: &mut [f64]| {
            ev.eval_block(psis, out);
            let ys: Vec<f64> = psis.iter().map(|t| t.cos()).collect();
            for (a, &x) in xs.iter().enumerate() {
                for (b, &y) in ys.iter().enumerate() {
                    let v = &mut out[a * psis.len() + b];
                    *v = f.eval(x, y) - *v;
                }
            }
        };
        tensor_power_sum(&rx, &ry, spec.p, &block)
    })
}

/// `‖g‖_{L_{p,w}(J)} = (∫_0^π |g(cos φ)|^p dφ)^{1/p}`.
pub fn lp_weighted_norm_1d(g: impl Fn(f64) -> f64, breaks: &[f64], spec: &NormSpec) -> Result<f64> {
    let b = angle_breaks(breaks);
    refine(spec, |points| {
        quadrature::integrate_abs_pow(|t| g(t.cos()), 0.0, PI, &b, points, spec.p)
    })
}

/// `‖g‖_{L_p(𝕋)} = (∫_0^{2π} |g(φ)|^p dφ)^{1/p}`, with jump locations in `[0, 2π)`.
pub fn lp_norm_torus(g: impl Fn(f64) -> f64 + Sync, breaks: &[f64], spec: &NormSpec) -> Result<f64> {
    refine(spec, |points| {
        let edges = quadrature::panel_edges(0.0, 2.0 * PI, breaks, points);
        let parts: Vec<f64> = edges
            .par_chunks(256)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&(lo, hi)| quadrature::integrate_abs_pow(&g, lo, hi, &[], 1, spec.p))
                    .sum()
            })
            .collect();
        parts.into_iter().sum::<f64>()
    })
}

/// `((1/N) Σ |a_k|^p)^{1/p}`
pub fn discrete_lp_norm(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("discrete norm of an empty sequence".into()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p = {p} must lie in [1, ∞)")));
    }
    let mean = values.iter().map(|&v| abs_pow(v, p)).sum::<f64>() / values.len() as f64;
    Ok(mean.powf(1.0 / p))
}
