use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cheb::{cgl_points, matmul, normalized_table_at_angles, normalized_table_at_cgl};
use crate::error::{Error, Result};
use crate::nodes::{node_set_from_grid, row_len, DegreePair};

/// The evaluation abscissae `cos(aπ/G)`, `a = 0..=G`. Doubling `G` keeps every
/// old point, so the estimate can only grow under refinement.
pub fn lebesgue_grid(grid_per_axis: usize) -> Vec<f64> {
    let g = grid_per_axis.max(1);
    (0..=g).map(|a| (a as f64 * PI / g as f64).cos()).collect()
}

/// Max of `Σ_{nodes} |ℓ(x, y; x_k, y_l)|` over the tensor grid of
/// [`lebesgue_grid`] points.
pub fn lebesgue_constant(d: DegreePair, grid_per_axis: usize) -> Result<f64> {
    if grid_per_axis < 64 {
        return Err(Error::Domain(format!(
            "grid_per_axis = {grid_per_axis} is below the minimum of 64"
        )));
    }
    let (m, n) = (d.m(), d.n());
    let nodes = node_set_from_grid(d);
    let tx = normalized_table_at_cgl(m, m, &cgl_points(m)?);
    let ty = normalized_table_at_cgl(n + 1, n, &cgl_points(n)?);
    let lens: Vec<usize> = (0..m).map(|i| row_len(d, i)).collect();

    let angles: Vec<f64> = (0..=grid_per_axis)
        .map(|a| a as f64 * PI / grid_per_axis as f64)
        .collect();
    let gx = normalized_table_at_angles(&angles, m); // (G+1) × m
    let gy = normalized_table_at_angles(&angles, n + 1); // (G+1) × (n+1)
    let npts = angles.len();
    let nn = nodes.len();

    let per_column: Vec<f64> = (0..npts)
        .into_par_iter()
        .map(|b| {
            let cy = &gy[b * (n + 1)..(b + 1) * (n + 1)];
            // mrow[i][l] = Σ_{j < len_i} Ĉ_j(y_l) Ĉ_j(v_b), plus the halved corner in row 0
            let mut prefix = vec![vec![0.0; n + 1]; n + 2];
            for j in 0..=n {
                for l in 0..=n {
                    prefix[j + 1][l] = prefix[j][l] + ty[j][l] * cy[j];
                }
            }
            let mut z = vec![0.0; m * nn];
            for (q, nd) in nodes.nodes().iter().enumerate() {
                for i in 0..m {
                    let mut s = prefix[lens[i]][nd.j];
                    if i == 0 {
                        s += 0.5 * ty[n][nd.j] * cy[n];
                    }
                    z[i * nn + q] = nd.weight * tx[i][nd.i] * s;
                }
            }
            let mut ell = vec![0.0; npts * nn];
            matmul((npts, m, nn), &gx, (m, 1), &z, (nn, 1), &mut ell);
            ell.chunks(nn)
                .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(per_column.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::fundamental_polynomial;

    fn brute_force(d: DegreePair, grid: usize) -> f64 {
        let nodes = node_set_from_grid(d);
        let ells: Vec<_> = nodes
            .nodes()
            .iter()
            .map(|nd| fundamental_polynomial(d, nd).unwrap())
            .collect();
        let pts = lebesgue_grid(grid);
        let mut best: f64 = 0.0;
        for &x in &pts {
            for &y in &pts {
                let s: f64 = ells.iter().map(|e| e.eval(x, y).unwrap().abs()).sum();
                best = best.max(s);
            }
        }
        best
    }

    #[test]
    fn one_two_pair_is_five_quarters() {
        // LC_{1,2} reduces to 3-point CGL interpolation in y: Λ = 5/4
        let d = DegreePair::new(1, 2).unwrap();
        // the maximiser y = 1/2 = cos(π/3) lies on the grid when 3 | G
        let v = lebesgue_constant(d, 1536).unwrap();
        assert!((v - 1.25).abs() < 1e-12, "{v}");
        let coarse = lebesgue_constant(d, 1024).unwrap();
        assert!((brute_force(d, 1024) - coarse).abs() < 1e-12);
        assert!(coarse <= v && v - coarse < 1e-5);
    }

    #[test]
    fn matches_brute_force() {
        for (m, n) in [(3, 2), (5, 4), (4, 7)] {
            let d = DegreePair::new(m, n).unwrap();
            let fast = lebesgue_constant(d, 64).unwrap();
            let slow = brute_force(d, 64);
            assert!((fast - slow).abs() < 1e-10 * slow, "({m},{n}): {fast} vs {slow}");
            assert!(fast >= 1.0);
        }
    }

    #[test]
    fn monotone_under_refinement() {
        let d = DegreePair::new(5, 6).unwrap();
        let a = lebesgue_constant(d, 64).unwrap();
        let b = lebesgue_constant(d, 128).unwrap();
        assert!(b >= a - 1e-12);
    }

    #[test]
    fn rejects_small_grid() {
        assert!(lebesgue_constant(DegreePair::new(3, 2).unwrap(), 63).is_err());
    }
}
