//! Chebyshev polynomials of the first kind, Chebyshev-Gauss-Lobatto points and
//! series evaluation against the normalized basis
//!
//! ```text
//! Ĉ_0(x) = 1,   Ĉ_k(x) = √2 · C_k(x)  (k ≥ 1),   C_k(x) = cos(k arccos x).
//! ```
//!
//! All evaluation goes through the Clenshaw recurrence; `arccos` is never
//! called on the hot path.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{check_unit_interval, Error, Result};

/// Chebyshev-Gauss-Lobatto points `cos(kπ/n)`, `k = 0..=n`, in decreasing order.
///
/// Values are symmetrized so that `x_k = -x_{n-k}` holds bit for bit and the
/// midpoint of an even `n` is exactly zero.
pub fn cgl_points(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let raw: Vec<f64> = (0..=n).map(|k| (k as f64 * PI / n as f64).cos()).collect();
    Ok((0..=n).map(|k| 0.5 * (raw[k] - raw[n - k])).collect())
}

/// `C_k(x)` by the three-term recurrence.
pub fn cheb_t(k: usize, x: f64) -> Result<f64> {
    check_unit_interval(x, "x")?;
    Ok(cheb_t_unchecked(k, x))
}

pub(crate) fn cheb_t_unchecked(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Normalized Chebyshev polynomial `Ĉ_k(x)`.
pub fn cheb_t_hat(k: usize, x: f64) -> Result<f64> {
    let t = cheb_t(k, x)?;
    Ok(if k == 0 { t } else { SQRT_2 * t })
}

/// Clenshaw summation of `Σ c_k Ĉ_k(x)`.
pub(crate) fn clenshaw_normalized(coeffs: &[f64], x: f64) -> f64 {
    let Some((&c0, rest)) = coeffs.split_first() else {
        return 0.0;
    };
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in rest.iter().rev() {
        let b0 = SQRT_2 * c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // b1 now holds b_1 and b2 holds b_2
    c0 + x * b1 - b2
}

/// A univariate series `Σ_{k=0}^{max_degree} c_k Ĉ_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries1D {
    coeffs: Vec<f64>,
}

impl ChebSeries1D {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Data("a series needs at least one coefficient".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Data(format!("coefficient {k} is not finite")));
        }
        Ok(Self { coeffs })
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit_interval(x, "x")?;
        Ok(clenshaw_normalized(&self.coeffs, x))
    }
}

/// A bivariate series `Σ_{(i,j)} c_{i,j} Ĉ_i(x) Ĉ_j(y)` over an explicit exponent set.
///
/// Exponents are kept sorted; coefficients are aligned with them. A dense
/// row layout (`rows[i][j]`) is cached for Clenshaw evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries2D {
    index_set: Vec<(usize, usize)>,
    coeffs: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl ChebSeries2D {
    /// Builds a series over `index_set`; every key of `terms` must belong to it.
    /// Missing exponents get a zero coefficient.
    pub fn with_index_set(
        index_set: impl IntoIterator<Item = (usize, usize)>,
        terms: impl IntoIterator<Item = ((usize, usize), f64)>,
    ) -> Result<Self> {
        let mut index_set: Vec<(usize, usize)> = index_set.into_iter().collect();
        index_set.sort_unstable();
        index_set.dedup();
        let mut coeffs = vec![0.0; index_set.len()];
        for (key, c) in terms {
            if !c.is_finite() {
                return Err(Error::Data(format!("coefficient at {key:?} is not finite")));
            }
            let pos = index_set.binary_search(&key).map_err(|_| {
                Error::Domain(format!("exponent {key:?} is not in the index set"))
            })?;
            coeffs[pos] += c;
        }
        Ok(Self::from_parts(index_set, coeffs))
    }

    /// Series whose index set is exactly the support of `terms`.
    pub fn from_terms(terms: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let keys: Vec<_> = terms.iter().map(|t| t.0).collect();
        Self::with_index_set(keys, terms)
    }

    /// `index_set` must be sorted and deduplicated, `coeffs` aligned and finite.
    pub(crate) fn from_parts(index_set: Vec<(usize, usize)>, coeffs: Vec<f64>) -> Self {
        debug_assert!(index_set.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(index_set.len(), coeffs.len());
        let rows_len = index_set.last().map_or(0, |&(i, _)| i + 1);
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); rows_len];
        for (&(i, j), &c) in index_set.iter().zip(&coeffs) {
            let row = &mut rows[i];
            if row.len() <= j {
                row.resize(j + 1, 0.0);
            }
            row[j] = c;
        }
        Self {
            index_set,
            coeffs,
            rows,
        }
    }

    pub fn index_set(&self) -> &[(usize, usize)] {
        &self.index_set
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_set.is_empty()
    }

    /// Coefficient at `(i, j)`, zero when the exponent is absent.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.index_set
            .binary_search(&(i, j))
            .map_or(0.0, |pos| self.coeffs[pos])
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.index_set.iter().copied().zip(self.coeffs.iter().copied())
    }

    /// Dense rows `rows[i][j]`; rows may have different lengths.
    pub(crate) fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        eval_series_2d(self, x, y)
    }

    pub(crate) fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        let inner: Vec<f64> = self
            .rows
            .iter()
            .map(|row| clenshaw_normalized(row, y))
            .collect();
        clenshaw_normalized(&inner, x)
    }

    /// Largest coefficient-wise absolute difference over the union of both index sets.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let mine = self.iter().map(|(k, c)| (c - other.coeff(k.0, k.1)).abs());
        let theirs = other.iter().map(|(k, c)| (c - self.coeff(k.0, k.1)).abs());
        mine.chain(theirs).fold(0.0, f64::max)
    }
}

/// Evaluates `Σ c_{i,j} Ĉ_i(x) Ĉ_j(y)`: Clenshaw in `y` per row, then in `x`.
pub fn eval_series_2d(s: &ChebSeries2D, x: f64, y: f64) -> Result<f64> {
    check_unit_interval(x, "x")?;
    check_unit_interval(y, "y")?;
    Ok(s.eval_unchecked(x, y))
}

/// Table `t[i][k] = Ĉ_i(cos(kπ/n))` for `i = 0..rows`, `k = 0..=n`, from exact
/// angle reduction onto the CGL points of degree `n`.
pub(crate) fn normalized_table_at_cgl(rows: usize, n: usize, cgl: &[f64]) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|i| {
            (0..=n)
                .map(|k| {
                    let mut r = (i * k) % (2 * n);
                    if r > n {
                        r = 2 * n - r;
                    }
                    if i == 0 {
                        1.0
                    } else {
                        SQRT_2 * cgl[r]
                    }
                })
                .collect()
        })
        .collect()
}

/// Row-major table `t[a * cols + i] = Ĉ_i(cos θ_a)` for arbitrary angles.
pub(crate) fn normalized_table_at_angles(angles: &[f64], cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; angles.len() * cols];
    for (a, &theta) in angles.iter().enumerate() {
        let row = &mut out[a * cols..(a + 1) * cols];
        for (i, v) in row.iter_mut().enumerate() {
            *v = if i == 0 {
                1.0
            } else {
                SQRT_2 * (i as f64 * theta).cos()
            };
        }
    }
    out
}

/// `c = a · b` for row/column-strided matrices; `a` is `m×k`, `b` is `k×n`,
/// `c` is a dense row-major `m×n` buffer that gets overwritten.
#[allow(clippy::too_many_arguments)]
pub(crate) fn matmul(
    (m, k, n): (usize, usize, usize),
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(k == 0 || (m - 1) * rsa + (k - 1) * csa < a.len());
    assert!(k == 0 || (k - 1) * rsb + (n - 1) * csb < b.len());
    assert!(c.len() >= m * n);
    // SAFETY: the asserts above keep every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            0.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// Evaluates a bivariate series on tensor grids of angles `(φ_a, ψ_b)`,
/// i.e. at the points `(cos φ_a, cos ψ_b)`, with two dense matrix products.
#[derive(Debug, Clone)]
pub(crate) struct AngleGridEvaluator {
    rows: usize,
    cols: usize,
    /// `rows × cols`, row-major
    dense: Vec<f64>,
    /// `phis.len() × rows`, row-major
    x_table: Vec<f64>,
    nphi: usize,
}

impl AngleGridEvaluator {
    pub(crate) fn new(series: &ChebSeries2D, phis: &[f64]) -> Self {
        let rows = series.rows().len().max(1);
        let cols = series.rows().iter().map(Vec::len).max().unwrap_or(0).max(1);
        let mut dense = vec![0.0; rows * cols];
        for (i, row) in series.rows().iter().enumerate() {
            dense[i * cols..i * cols + row.len()].copy_from_slice(row);
        }
        Self {
            rows,
            cols,
            dense,
            x_table: normalized_table_at_angles(phis, rows),
            nphi: phis.len(),
        }
    }

    /// Writes the `nphi × psis.len()` block of values, row-major, into `out`.
    pub(crate) fn eval_block(&self, psis: &[f64], out: &mut [f64]) {
        let nb = psis.len();
        // y_table is nb × cols row-major, read as cols × nb with strides (1, cols)
        let y_table = normalized_table_at_angles(psis, self.cols);
        let mut partial = vec![0.0; self.rows * nb];
        matmul(
            (self.rows, self.cols, nb),
            &self.dense,
            (self.cols, 1),
            &y_table,
            (1, self.cols),
            &mut partial,
        );
        matmul(
            (self.nphi, self.rows, nb),
            &self.x_table,
            (self.rows, 1),
            &partial,
            (nb, 1),
            out,
        );
    }
}
