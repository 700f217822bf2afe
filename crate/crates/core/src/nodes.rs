//! Lissajous-Chebyshev node sets `LC_{m,n}`, their quadrature weights and the
//! matching spectral index set `Γ_{m,n}`.
//!
//! The canonical constructor enumerates the parity grid
//! `{(i, j) : 0 ≤ i ≤ m, 0 ≤ j ≤ n, i + j even}` on the tensor CGL grid. The
//! curve-sampling constructor walks `γ(t) = (cos nt, cos mt)` at
//! `t = πk/(mn)` and exists to cross-check the grid description.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::cheb::cgl_points;
use crate::error::{Error, Result};

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A validated pair of relatively prime degrees `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreePair {
    m: usize,
    n: usize,
}

impl DegreePair {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDegree(m));
        }
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        let g = gcd(m, n);
        if g != 1 {
            return Err(Error::Coprimality { m, n, gcd: g });
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(m + 1)(n + 1) / 2`, the size of both `LC_{m,n}` and `Γ_{m,n}`.
    pub fn node_count(&self) -> usize {
        (self.m + 1) * (self.n + 1) / 2
    }
}

impl fmt::Display for DegreePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

/// Accepts signed input, as a CLI or config layer would hand it over.
pub fn make_degree_pair(m: i64, n: i64) -> Result<DegreePair> {
    if m < 1 || n < 1 {
        return Err(Error::Domain(format!(
            "degrees must be positive, got ({m}, {n})"
        )));
    }
    DegreePair::new(m as usize, n as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeClass {
    Vertex,
    Edge,
    Interior,
}

impl NodeClass {
    fn of(i: usize, j: usize, d: DegreePair) -> Self {
        let on_x = i == 0 || i == d.m;
        let on_y = j == 0 || j == d.n;
        match (on_x, on_y) {
            (true, true) => NodeClass::Vertex,
            (true, false) | (false, true) => NodeClass::Edge,
            (false, false) => NodeClass::Interior,
        }
    }

    /// Quadrature weight `λ` for a node of this class.
    pub fn weight(self, d: DegreePair) -> f64 {
        let mn = (d.m * d.n) as f64;
        match self {
            NodeClass::Vertex => 1.0 / (2.0 * mn),
            NodeClass::Edge => 1.0 / mn,
            NodeClass::Interior => 2.0 / mn,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Vertex => "vertex",
            NodeClass::Edge => "edge",
            NodeClass::Interior => "interior",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    pub class: NodeClass,
    pub weight: f64,
}

/// The node set `LC_{m,n}`, sorted by index pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    degrees: DegreePair,
    nodes: Vec<Node>,
}

impl NodeSet {
    pub fn degrees(&self) -> DegreePair {
        self.degrees
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Position of the node with index pair `(i, j)`.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        self.nodes
            .binary_search_by(|nd| (nd.i, nd.j).cmp(&(i, j)))
            .ok()
    }

    pub fn weight_sum(&self) -> f64 {
        self.nodes.iter().map(|nd| nd.weight).sum()
    }

    /// Largest coordinate distance to `other`, node by node; `None` when the
    /// index sets differ.
    pub fn max_coordinate_gap(&self, other: &NodeSet) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        let mut gap: f64 = 0.0;
        for (a, b) in self.nodes.iter().zip(&other.nodes) {
            if (a.i, a.j) != (b.i, b.j) {
                return None;
            }
            gap = gap.max((a.x - b.x).abs()).max((a.y - b.y).abs());
        }
        Some(gap)
    }
}

pub fn node_set_from_grid(d: DegreePair) -> NodeSet {
    let xs = cgl_points(d.m).expect("m >= 1");
    let ys = cgl_points(d.n).expect("n >= 1");
    let mut nodes = Vec::with_capacity(d.node_count());
    for (i, &x) in xs.iter().enumerate() {
        for j in (i % 2..=d.n).step_by(2) {
            let class = NodeClass::of(i, j, d);
            nodes.push(Node {
                i,
                j,
                x,
                y: ys[j],
                class,
                weight: class.weight(d),
            });
        }
    }
    NodeSet { degrees: d, nodes }
}

/// Reduces `k mod 2n` onto `0..=n` using evenness of the cosine.
fn fold_index(k: usize, n: usize) -> usize {
    let r = k % (2 * n);
    if r > n {
        2 * n - r
    } else {
        r
    }
}

/// Samples the curve at its `mn + 1` node parameters.
///
/// Node identity is decided on the integer indices; each sampled point must
/// lie within `tol` of the grid point it maps to, and the deduplicated set
/// must have `(m + 1)(n + 1) / 2` members.
pub fn node_set_from_curve(d: DegreePair, tol: f64) -> Result<NodeSet> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (m, n) = (d.m, d.n);
    let xs = cgl_points(m)?;
    let ys = cgl_points(n)?;
    let mn = (m * n) as f64;
    let mut seen: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
    for k in 0..=m * n {
        let t = PI * k as f64 / mn;
        let (px, py) = ((n as f64 * t).cos(), (m as f64 * t).cos());
        let (i, j) = (fold_index(k, m), fold_index(k, n));
        if (px - xs[i]).abs() > tol || (py - ys[j]).abs() > tol {
            return Err(Error::Consistency(format!(
                "curve sample k={k} at ({px}, {py}) is not within {tol:e} of grid point ({i}, {j})"
            )));
        }
        seen.entry((i, j)).or_insert((px, py));
    }
    if seen.len() != d.node_count() {
        return Err(Error::Consistency(format!(
            "curve sampling produced {} distinct points, expected {}",
            seen.len(),
            d.node_count()
        )));
    }
    let nodes = seen
        .into_iter()
        .map(|((i, j), (x, y))| {
            let class = NodeClass::of(i, j, d);
            Node {
                i,
                j,
                x,
                y,
                class,
                weight: class.weight(d),
            }
        })
        .collect();
    Ok(NodeSet { degrees: d, nodes })
}

/// The exponent set `{(i, j) : i/m + j/n < 1} ∪ {(0, n)}`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralIndexSet {
    degrees: DegreePair,
    exponents: Vec<(usize, usize)>,
}

impl SpectralIndexSet {
    pub fn degrees(&self) -> DegreePair {
        self.degrees
    }

    pub fn exponents(&self) -> &[(usize, usize)] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.exponents.binary_search(&(i, j)).is_ok()
    }

    /// Number of exponents `j` present in row `i`; every row is a prefix
    /// `0..len`, except that row 0 also carries the extra `(0, n)`.
    pub fn row_len(&self, i: usize) -> usize {
        row_len(self.degrees, i)
    }
}

/// `#{j ≥ 0 : i·n + j·m < m·n}` for `i < m`, else 0.
pub(crate) fn row_len(d: DegreePair, i: usize) -> usize {
    if i >= d.m {
        return 0;
    }
    let budget = (d.m - i) * d.n; // need j*m < budget
    (budget - 1) / d.m + 1
}

pub fn spectral_set(d: DegreePair) -> SpectralIndexSet {
    let mut exponents = Vec::with_capacity(d.node_count());
    for i in 0..d.m {
        for j in 0..row_len(d, i) {
            exponents.push((i, j));
        }
        if i == 0 {
            exponents.push((0, d.n));
        }
    }
    SpectralIndexSet {
        degrees: d,
        exponents,
    }
}
