//! Variation functionals and smoothness estimators.
//!
//! Everything here is grid-restricted: a variation computed on a partition is
//! a lower bound for the supremum over all partitions, and equals it once the
//! partition contains every breakpoint and local extremum. The modulus
//! estimator is likewise a lower bound for the supremum over `0 < h ≤ t`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::testbed::{Regularity, SampledFunction};

/// A strictly increasing list of finite points.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition1D(Vec<f64>);

impl Partition1D {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("partition points must be finite".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "partition is not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(Self(points))
    }

    /// `count` equispaced points on `[a, b]`.
    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::Domain("a uniform partition needs two points".into()));
        }
        Self::new(
            (0..count)
                .map(|k| a + (b - a) * k as f64 / (count - 1) as f64)
                .collect(),
        )
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Samples of a bivariate function on `xs × ys`, row-major in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    xs: Partition1D,
    ys: Partition1D,
    values: Vec<f64>,
}

impl GridFunction2D {
    pub fn new(xs: Partition1D, ys: Partition1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != xs.len() * ys.len() {
            return Err(Error::Domain(format!(
                "expected {}×{} values, got {}",
                xs.len(),
                ys.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("grid values must be finite".into()));
        }
        Ok(Self { xs, ys, values })
    }

    pub fn sample(xs: Partition1D, ys: Partition1D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = xs
            .points()
            .iter()
            .flat_map(|&x| ys.points().iter().map(move |&y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(xs, ys, values)
    }

    pub fn xs(&self) -> &Partition1D {
        &self.xs
    }

    pub fn ys(&self) -> &Partition1D {
        &self.ys
    }

    #[inline]
    pub fn at(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.ys.len() + l]
    }
}

/// `Σ |f(ξ_{k+1}) - f(ξ_k)|` over the partition.
pub fn total_variation_1d(partition: &Partition1D, values: &[f64]) -> Result<f64> {
    if partition.len() < 2 {
        return Err(Error::Domain("variation needs at least two points".into()));
    }
    if values.len() != partition.len() {
        return Err(Error::Domain(format!(
            "{} values for a partition of {} points",
            values.len(),
            partition.len()
        )));
    }
    Ok(values.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

/// `Σ_k Σ_l |Δf(ξ_k, η_l)|` with the mixed difference over each grid cell.
pub fn hardy_krause(g: &GridFunction2D) -> Result<f64> {
    let (nx, ny) = (g.xs.len(), g.ys.len());
    if nx < 2 || ny < 2 {
        return Err(Error::Domain(format!(
            "mixed variation needs at least a 2×2 grid, got {nx}×{ny}"
        )));
    }
    let mut total = 0.0;
    for k in 0..nx - 1 {
        for l in 0..ny - 1 {
            let delta = g.at(k + 1, l + 1) - g.at(k + 1, l) - g.at(k, l + 1) + g.at(k, l);
            total += delta.abs();
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativePath {
    /// Central differences in `(φ, ψ)`; total order at most 2.
    Numeric,
    /// Registered closed forms.
    Analytic,
}

const FIRST_ORDER_STEP: f64 = 1e-5;
const SECOND_ORDER_STEP: f64 = 1e-4;

fn numeric_trig_derivative(f: &SampledFunction, r: usize, s: usize, phi: f64, psi: f64) -> f64 {
    let big_f = |a: f64, b: f64| f.eval_trig(a, b);
    match (r, s) {
        (0, 0) => big_f(phi, psi),
        (1, 0) => {
            let h = FIRST_ORDER_STEP;
            (big_f(phi + h, psi) - big_f(phi - h, psi)) / (2.0 * h)
        }
        (0, 1) => {
            let h = FIRST_ORDER_STEP;
            (big_f(phi, psi + h) - big_f(phi, psi - h)) / (2.0 * h)
        }
        (2, 0) => {
            let h = SECOND_ORDER_STEP;
            (big_f(phi + h, psi) - 2.0 * big_f(phi, psi) + big_f(phi - h, psi)) / (h * h)
        }
        (0, 2) => {
            let h = SECOND_ORDER_STEP;
            (big_f(phi, psi + h) - 2.0 * big_f(phi, psi) + big_f(phi, psi - h)) / (h * h)
        }
        (1, 1) => {
            let h = SECOND_ORDER_STEP;
            (big_f(phi + h, psi + h) - big_f(phi + h, psi - h) - big_f(phi - h, psi + h)
                + big_f(phi - h, psi - h))
                / (4.0 * h * h)
        }
        _ => unreachable!("checked by d_tilde"),
    }
}

/// `D̃^{(r,s)} f`: the `(φ, ψ)` derivative of `f(cos φ, cos ψ)` pulled back to `J²`.
pub fn d_tilde(f: &SampledFunction, r: usize, s: usize, path: DerivativePath) -> Result<SampledFunction> {
    if r == 0 && s == 0 {
        return Ok(f.clone());
    }
    let id = format!("dtilde({r},{s})[{}]", f.id);
    let regularity = match f.regularity {
        Regularity::Analytic => Regularity::Analytic,
        _ => Regularity::HBVOnly,
    };
    let shifted = f.trig_derivatives.clone().map(|d| {
        move |a: usize, b: usize, phi: f64, psi: f64| d(a + r, b + s, phi, psi)
    });
    let out = match path {
        DerivativePath::Numeric => {
            if r + s > 2 {
                return Err(Error::Capability(format!(
                    "numeric D~({r},{s}) supports total order at most 2"
                )));
            }
            let g = f.clone();
            SampledFunction::new(id, move |x, y| {
                numeric_trig_derivative(&g, r, s, x.acos(), y.acos())
            })
        }
        DerivativePath::Analytic => {
            let Some(d) = f.trig_derivatives.clone() else {
                return Err(Error::Capability(format!(
                    "{} registers no trig-domain derivatives",
                    f.id
                )));
            };
            if d(r, s, 1.0, 1.0).is_none() {
                return Err(Error::Capability(format!(
                    "{} registers no closed form for D~({r},{s})",
                    f.id
                )));
            }
            SampledFunction::new(id, move |x, y| {
                d(r, s, x.acos(), y.acos()).expect("probed at construction")
            })
        }
    };
    let mut out = out
        .with_breakpoints(f.breakpoints_x.clone(), f.breakpoints_y.clone())
        .with_regularity(regularity);
    if let Some(shifted) = shifted {
        out = out.with_trig_derivatives(shifted);
    }
    Ok(out)
}

/// `φ(x) = √(1 - x²)`
#[inline]
pub fn phi_weight(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

/// `W_δ(x) = ((1 - x - δφ(x)/2)(1 + x - δφ(x)/2))^{1/2}`, clamped to 0 where a factor is nonpositive.
pub fn weight_w(delta: f64, x: f64) -> f64 {
    let half = 0.5 * delta * phi_weight(x);
    let (a, b) = (1.0 - x - half, 1.0 + x - half);
    if a <= 0.0 || b <= 0.0 {
        0.0
    } else {
        (a * b).sqrt()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ν`-th symmetric difference of `g` at `x` with step `step`, zero when
/// `x ± ν·step/2` leaves `[-1, 1]`.
fn symmetric_difference(g: impl Fn(f64) -> f64, x: f64, step: f64, nu: usize) -> f64 {
    let reach = 0.5 * nu as f64 * step;
    if x - reach < -1.0 || x + reach > 1.0 {
        return 0.0;
    }
    (0..=nu)
        .map(|i| {
            let sign = if (nu - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(nu, i) * g(x + (i as f64 - 0.5 * nu as f64) * step)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessQuery {
    pub nu: usize,
    pub alpha: f64,
    pub t: f64,
    pub p: f64,
    pub h_grid_size: usize,
    pub x_grid_size: usize,
}

impl SmoothnessQuery {
    pub fn new(nu: usize, alpha: f64, t: f64, p: f64) -> Self {
        Self {
            nu,
            alpha,
            t,
            p,
            h_grid_size: 64,
            x_grid_size: 2048,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nu == 0 {
            return Err(Error::Domain("order ν must be positive".into()));
        }
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(Error::Domain(format!("step cap t = {} must lie in (0, 1]", self.t)));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::Domain(format!("p = {} must lie in [1, ∞)", self.p)));
        }
        if self.h_grid_size == 0 || self.x_grid_size == 0 {
            return Err(Error::Domain("grid sizes must be positive".into()));
        }
        Ok(())
    }

    /// `h_k = t · 2^{-k/8}`, `k = 0..h_grid_size`; doubling `t` shifts the grid by 8 slots.
    pub fn h_grid(&self) -> Vec<f64> {
        (0..self.h_grid_size)
            .map(|k| self.t * (-(k as f64) / 8.0).exp2())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Mixed,
}

/// Discretized `ω^φ_{ν,α}`: the maximum over the `h` grid of the `L_p` norm of
/// `W^α_{νh} Δ^ν_{hφ} f`, taken along `axis`.
///
/// The norm is computed in angle variables with a midpoint rule. Along the
/// differencing direction it is unweighted (Jacobian `sin φ`); the other
/// direction carries the Chebyshev weight, which cancels the Jacobian. The
/// mixed version is unweighted in both directions and sweeps `h₁` and `h₂`
/// independently over the same grid.
pub fn modulus_estimate(f: &SampledFunction, q: &SmoothnessQuery, axis: Axis) -> Result<f64> {
    q.validate()?;
    let n = q.x_grid_size;
    let dtheta = PI / n as f64;
    let angles: Vec<f64> = (0..n).map(|a| (a as f64 + 0.5) * dtheta).collect();
    let coords: Vec<f64> = angles.iter().map(|t| t.cos()).collect();
    let jac: Vec<f64> = angles.iter().map(|t| t.sin()).collect();
    let hs = q.h_grid();
    let nu = q.nu;
    let wpow = |delta: f64, x: f64| {
        let w = weight_w(delta, x);
        if q.alpha == 0.0 {
            1.0
        } else {
            w.powf(q.alpha)
        }
    };

    let norm_for = |h1: f64, h2: f64| -> f64 {
        let mut acc = 0.0;
        for (a, &x) in coords.iter().enumerate() {
            for (b, &y) in coords.iter().enumerate() {
                let (g, w) = match axis {
                    Axis::X => (
                        wpow(nu as f64 * h1, x)
                            * symmetric_difference(|u| f.eval(u, y), x, h1 * phi_weight(x), nu),
                        jac[a],
                    ),
                    Axis::Y => (
                        wpow(nu as f64 * h2, y)
                            * symmetric_difference(|v| f.eval(x, v), y, h2 * phi_weight(y), nu),
                        jac[b],
                    ),
                    Axis::Mixed => {
                        let inner = |u: f64| {
                            symmetric_difference(|v| f.eval(u, v), y, h2 * phi_weight(y), nu)
                        };
                        (
                            wpow(nu as f64 * h1, x)
                                * wpow(nu as f64 * h2, y)
                                * symmetric_difference(inner, x, h1 * phi_weight(x), nu),
                            jac[a] * jac[b],
                        )
                    }
                };
                acc += w * g.abs().powf(q.p);
            }
        }
        (acc * dtheta * dtheta).powf(1.0 / q.p)
    };

    let pairs: Vec<(f64, f64)> = match axis {
        Axis::X | Axis::Y => hs.iter().map(|&h| (h, h)).collect(),
        Axis::Mixed => hs
            .iter()
            .flat_map(|&h1| hs.iter().map(move |&h2| (h1, h2)))
            .collect(),
    };
    let values: Vec<f64> = pairs.par_iter().map(|&(h1, h2)| norm_for(h1, h2)).collect();
    Ok(values.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::find;

    #[test]
    fn variation_examples() {
        let p = Partition1D::uniform(-1.0, 1.0, 101).unwrap();
        let step: Vec<f64> = p.points().iter().map(|&x| if x >= 0.37 { 1.0 } else { 0.0 }).collect();
        assert_eq!(total_variation_1d(&p, &step).unwrap(), 1.0);
        let lin: Vec<f64> = p.points().to_vec();
        assert!((total_variation_1d(&p, &lin).unwrap() - 2.0).abs() < 1e-14);

        let cgl = Partition1D::new(crate::cheb::cgl_points(1024).unwrap().into_iter().rev().collect()).unwrap();
        let t3: Vec<f64> = cgl.points().iter().map(|&x| 4.0 * x * x * x - 3.0 * x).collect();
        assert!((total_variation_1d(&cgl, &t3).unwrap() - 6.0).abs() < 1e-4);

        let single = Partition1D::new(vec![0.0]).unwrap();
        assert!(total_variation_1d(&single, &[1.0]).is_err());
        assert!(Partition1D::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn hardy_krause_examples() {
        let xs = Partition1D::uniform(-1.0, 1.0, 11).unwrap();
        let ys = Partition1D::uniform(-1.0, 1.0, 9).unwrap();
        let g = GridFunction2D::sample(xs.clone(), ys.clone(), |x, y| {
            if x >= 0.37 && y >= -0.21 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(hardy_krause(&g).unwrap(), 1.0);

        let g = GridFunction2D::sample(xs.clone(), ys, |x, _| x.sin()).unwrap();
        assert_eq!(hardy_krause(&g).unwrap(), 0.0);

        let u = Partition1D::uniform(-1.0, 1.0, 65).unwrap();
        let g = GridFunction2D::sample(u.clone(), u, |x, y| x * y).unwrap();
        assert!((hardy_krause(&g).unwrap() - 4.0).abs() < 1e-12);

        let thin = Partition1D::new(vec![0.0]).unwrap();
        let g = GridFunction2D::sample(thin, xs, |_, _| 0.0).unwrap();
        assert!(hardy_krause(&g).is_err());
    }

    #[test]
    fn weight_w_examples() {
        for delta in [0.1, 0.5, 1.5] {
            assert!((weight_w(delta, 0.0) - (1.0 - delta / 2.0)).abs() < 1e-15);
        }
        for x in [-0.9, -0.3, 0.2, 0.8] {
            assert!((weight_w(1e-12, x) - phi_weight(x)).abs() < 1e-10);
        }
        assert_eq!(weight_w(0.5, 0.999), 0.0);
        assert_eq!(weight_w(0.5, -0.999), 0.0);
    }

    #[test]
    fn symmetric_difference_matches_binomial_form() {
        let g = |u: f64| u * u * u;
        // second difference of u³ at x with step s is 6·x·s²
        let (x, s) = (0.2, 0.1);
        assert!((symmetric_difference(g, x, s, 2) - 6.0 * x * s * s).abs() < 1e-14);
        assert_eq!(symmetric_difference(g, 0.99, 0.1, 1), 0.0);
    }

    #[test]
    fn d_tilde_examples() {
        let lin = find("linear_x").unwrap();
        let same = d_tilde(&lin, 0, 0, DerivativePath::Numeric).unwrap();
        assert_eq!(same.eval(0.3, 0.1), 0.3);
        for path in [DerivativePath::Numeric, DerivativePath::Analytic] {
            let d = d_tilde(&lin, 1, 0, path).unwrap();
            for x in [-0.8, -0.1, 0.5, 0.9] {
                assert!((d.eval(x, 0.2) + (1.0 - x * x).sqrt()).abs() < 1e-9);
            }
        }
        let t2 = SampledFunction::new("t2", |x, _| 2.0 * x * x - 1.0);
        let d = d_tilde(&t2, 1, 0, DerivativePath::Numeric).unwrap();
        for x in [-0.7f64, 0.0, 0.4] {
            let expect = -2.0 * 2.0 * x * (1.0 - x * x).sqrt();
            assert!((d.eval(x, 0.0) - expect).abs() < 1e-6);
        }
        assert!(matches!(
            d_tilde(&t2, 2, 1, DerivativePath::Numeric),
            Err(Error::Capability(_))
        ));
        assert!(matches!(
            d_tilde(&t2, 1, 0, DerivativePath::Analytic),
            Err(Error::Capability(_))
        ));
    }

    fn small_query(t: f64) -> SmoothnessQuery {
        SmoothnessQuery {
            h_grid_size: 16,
            x_grid_size: 128,
            ..SmoothnessQuery::new(1, 0.0, t, 2.0)
        }
    }

    #[test]
    fn modulus_of_constant_vanishes() {
        let one = find("const_one").unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Mixed] {
            assert_eq!(modulus_estimate(&one, &small_query(0.2), axis).unwrap(), 0.0);
        }
    }

    #[test]
    fn modulus_grows_with_t() {
        let f = find("kink").unwrap();
        for axis in [Axis::X, Axis::Y] {
            let a = modulus_estimate(&f, &small_query(0.1), axis).unwrap();
            let b = modulus_estimate(&f, &small_query(0.2), axis).unwrap();
            assert!(a <= b, "{axis:?}: {a} > {b}");
            assert!(a > 0.0);
        }
    }

    #[test]
    fn modulus_rejects_bad_queries() {
        let f = find("kink").unwrap();
        let mut q = small_query(0.1);
        q.t = 1.5;
        assert!(modulus_estimate(&f, &q, Axis::X).is_err());
        let mut q = small_query(0.1);
        q.nu = 0;
        assert!(modulus_estimate(&f, &q, Axis::X).is_err());
    }
}
