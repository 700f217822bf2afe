//! The Lagrange interpolation operator on `LC_{m,n}` with values in the span of
//! `{Ĉ_i(x) Ĉ_j(y) : (i, j) ∈ Γ_{m,n}}`.
//!
//! Coefficients come from the discrete transform
//!
//! ```text
//! c_{i,j} = Σ_{(k,l)} λ_{k,l} f(x_k, y_l) Ĉ_i(x_k) Ĉ_j(y_l),
//! ```
//!
//! followed by halving the single coefficient at `(0, n)`. That halving is the
//! `-½ Ĉ_n(y_l) Ĉ_n(y)` correction in the fundamental polynomials.

use crate::cheb::{normalized_table_at_cgl, ChebSeries2D};
use crate::error::{check_unit_interval, Error, Result};
use crate::nodes::{node_set_from_grid, spectral_set, DegreePair, Node, NodeSet};

/// An interpolation polynomial together with the samples it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    degrees: DegreePair,
    series: ChebSeries2D,
    nodes: NodeSet,
    node_values: Vec<f64>,
}

impl Interpolant {
    pub fn degrees(&self) -> DegreePair {
        self.degrees
    }

    pub fn series(&self) -> &ChebSeries2D {
        &self.series
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    /// Samples aligned with `self.nodes().nodes()`.
    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        evaluate(self, x, y)
    }
}

/// Applies the halving post-pass to the `(0, n)` coefficient.
fn halve_corner(series_coeffs: &mut [f64], index_set: &[(usize, usize)], n: usize) {
    let pos = index_set
        .binary_search(&(0, n))
        .expect("(0, n) always belongs to the spectral set");
    series_coeffs[pos] *= 0.5;
}

/// The fundamental polynomial attached to `node`, as a series over `Γ_{m,n}`.
pub fn fundamental_polynomial(d: DegreePair, node: &Node) -> Result<ChebSeries2D> {
    let nodes = node_set_from_grid(d);
    let pos = nodes
        .position(node.i, node.j)
        .ok_or_else(|| Error::Domain(format!("({}, {}) is not a node index of LC{d}", node.i, node.j)))?;
    let canonical = nodes.nodes()[pos];
    let tx = normalized_table_at_cgl(d.m(), d.m(), &cgl(d.m()));
    let ty = normalized_table_at_cgl(d.n() + 1, d.n(), &cgl(d.n()));
    let gamma = spectral_set(d);
    let mut coeffs: Vec<f64> = gamma
        .exponents()
        .iter()
        .map(|&(i, j)| canonical.weight * tx[i][canonical.i] * ty[j][canonical.j])
        .collect();
    halve_corner(&mut coeffs, gamma.exponents(), d.n());
    Ok(ChebSeries2D::from_parts(gamma.exponents().to_vec(), coeffs))
}

fn cgl(n: usize) -> Vec<f64> {
    crate::cheb::cgl_points(n).expect("degree >= 1")
}

/// Interpolates from samples aligned with `node_set_from_grid(d)`.
pub fn interpolate_values(d: DegreePair, values: Vec<f64>) -> Result<Interpolant> {
    let nodes = node_set_from_grid(d);
    if values.len() != nodes.len() {
        return Err(Error::Domain(format!(
            "expected {} node values, got {}",
            nodes.len(),
            values.len()
        )));
    }
    if let Some(p) = values.iter().position(|v| !v.is_finite()) {
        let nd = nodes.nodes()[p];
        return Err(Error::Data(format!(
            "sample at node ({}, {}) = ({}, {}) is not finite: {}",
            nd.i, nd.j, nd.x, nd.y, values[p]
        )));
    }
    let (m, n) = (d.m(), d.n());
    let tx = normalized_table_at_cgl(m, m, &cgl(m));
    let ty = normalized_table_at_cgl(n + 1, n, &cgl(n));

    // partial[i][l] = Σ_k λ_{k,l} f_{k,l} Ĉ_i(x_k)
    let mut partial = vec![vec![0.0; n + 1]; m];
    for (nd, &v) in nodes.nodes().iter().zip(&values) {
        let wv = nd.weight * v;
        for (i, row) in partial.iter_mut().enumerate() {
            row[nd.j] += wv * tx[i][nd.i];
        }
    }
    let gamma = spectral_set(d);
    let mut coeffs: Vec<f64> = gamma
        .exponents()
        .iter()
        .map(|&(i, j)| {
            partial[i]
                .iter()
                .zip(&ty[j])
                .map(|(g, t)| g * t)
                .sum::<f64>()
        })
        .collect();
    halve_corner(&mut coeffs, gamma.exponents(), n);

    Ok(Interpolant {
        degrees: d,
        series: ChebSeries2D::from_parts(gamma.exponents().to_vec(), coeffs),
        nodes,
        node_values: values,
    })
}

/// Samples `f` on `LC_{m,n}` and builds its interpolant.
pub fn interpolate(f: impl Fn(f64, f64) -> f64, d: DegreePair) -> Result<Interpolant> {
    let values = node_set_from_grid(d)
        .nodes()
        .iter()
        .map(|nd| f(nd.x, nd.y))
        .collect();
    interpolate_values(d, values)
}

pub fn evaluate(ip: &Interpolant, x: f64, y: f64) -> Result<f64> {
    check_unit_interval(x, "x")?;
    check_unit_interval(y, "y")?;
    Ok(ip.series.eval_unchecked(x, y))
}

/// Largest `|L f(x_k, y_l) - f(x_k, y_l)|` over the nodes.
pub fn residual_at_nodes(ip: &Interpolant) -> f64 {
    ip.nodes
        .nodes()
        .iter()
        .zip(&ip.node_values)
        .map(|(nd, v)| (ip.series.eval_unchecked(nd.x, nd.y) - v).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    fn pair(m: usize, n: usize) -> DegreePair {
        DegreePair::new(m, n).unwrap()
    }

    #[test]
    fn constant_function() {
        let ip = interpolate(|_, _| 1.0, pair(5, 4)).unwrap();
        for ((i, j), c) in ip.series().iter() {
            let expect = if (i, j) == (0, 0) { 1.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-12, "({i},{j}) -> {c}");
        }
        assert!(residual_at_nodes(&ip) < 1e-14);
    }

    #[test]
    fn zero_function_is_zero_everywhere() {
        let ip = interpolate(|_, _| 0.0, pair(7, 5)).unwrap();
        for &(x, y) in &[(0.1, 0.2), (-1.0, 1.0), (0.77, -0.3)] {
            assert_eq!(ip.evaluate(x, y).unwrap(), 0.0);
        }
    }

    #[test]
    fn reproduces_basis_element() {
        let ip = interpolate(|x, y| 2.0 * x * y, pair(3, 2)).unwrap();
        for ((i, j), c) in ip.series().iter() {
            let expect = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn fundamental_polynomial_coefficients() {
        let d = pair(3, 2);
        let nodes = node_set_from_grid(d);
        let node = nodes.nodes()[nodes.position(1, 1).unwrap()];
        let ell = fundamental_polynomial(d, &node).unwrap();
        assert!((ell.coeff(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        // Ĉ_2(y_1) = √2·cos(π) = -√2, halved
        assert!((ell.coeff(0, 2) - 0.5 * (1.0 / 3.0) * (-SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn fundamental_polynomial_rejects_foreign_node() {
        let d = pair(3, 2);
        let mut node = node_set_from_grid(d).nodes()[0];
        node.i = 1;
        node.j = 0;
        assert!(matches!(fundamental_polynomial(d, &node), Err(Error::Domain(_))));
    }

    #[test]
    fn non_finite_sample_reports_node() {
        let err = interpolate(|x, _| if x == 1.0 { f64::NAN } else { 0.0 }, pair(3, 2)).unwrap_err();
        match err {
            Error::Data(msg) => assert!(msg.contains("(0, 0)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn step_function_is_exact_at_nodes() {
        let ip = interpolate(|x, _| if x >= 0.37 { 1.0 } else { 0.0 }, pair(13, 12)).unwrap();
        assert!(residual_at_nodes(&ip) <= 1e-10);
    }

    #[test]
    fn evaluate_rejects_outside_square() {
        let ip = interpolate(|x, _| x, pair(3, 2)).unwrap();
        assert!(ip.evaluate(1.2, 0.0).is_err());
    }
}
