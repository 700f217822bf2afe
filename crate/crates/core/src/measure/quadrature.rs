//! Composite Gauss-Legendre rules split at breakpoints.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Nodes per panel.
pub const PANEL_ORDER: usize = 8;

fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let gl = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).expect("nonzero"));
        let mut pairs = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// A one-dimensional rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PanelRule {
    /// About `points` nodes on `[a, b]`. Breakpoints strictly inside the
    /// interval become panel boundaries, so piecewise-smooth integrands are
    /// only ever sampled on smooth pieces.
    pub fn new(a: f64, b: f64, breaks: &[f64], points: usize) -> Self {
        let panels = panel_edges(a, b, breaks, points);
        let mut nodes = Vec::with_capacity(panels.len() * PANEL_ORDER);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (lo, hi) in panels {
            push_panel(lo, hi, &mut nodes, &mut weights);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

/// Panels of roughly equal width covering `[a, b]`, with every interior
/// breakpoint on a panel boundary.
pub fn panel_edges(a: f64, b: f64, breaks: &[f64], points: usize) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&t| t > a && t < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let total_panels = points.div_ceil(PANEL_ORDER).max(1);
    let mut out = Vec::with_capacity(total_panels + cuts.len());
    for piece in cuts.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        let panels = ((total_panels as f64) * (hi - lo) / (b - a)).ceil().max(1.0) as usize;
        let width = (hi - lo) / panels as f64;
        for p in 0..panels {
            let left = lo + p as f64 * width;
            let right = if p + 1 == panels { hi } else { left + width };
            out.push((left, right));
        }
    }
    out
}

fn push_panel(lo: f64, hi: f64, nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let half = 0.5 * (hi - lo);
    for &(t, w) in reference_rule() {
        nodes.push(lo + half * (t + 1.0));
        weights.push(half * w);
    }
}

fn bisect(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, glo: f64) -> f64 {
    let lo_sign = glo > 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫_a^b |g|^p` on the panels of [`panel_edges`], where each panel is further
/// split at the sign changes of `g` seen on a fine sampling of it, so that the
/// kinks of `|g|^p` are panel boundaries too.
pub fn integrate_abs_pow(g: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], points: usize, p: f64) -> f64 {
    let pow = |v: f64| if p == 1.0 { v.abs() } else { v.abs().powf(p) };
    let mut total = 0.0;
    let (mut nodes, mut weights) = (Vec::new(), Vec::new());
    for (lo, hi) in panel_edges(a, b, breaks, points) {
        // probe strictly inside the panel so one-sided limits at jumps are respected
        let probes = 2 * PANEL_ORDER;
        let eps = 1e-9 * (hi - lo);
        let ts: Vec<f64> = (0..=probes)
            .map(|k| (lo + (hi - lo) * k as f64 / probes as f64).clamp(lo + eps, hi - eps))
            .collect();
        let gs: Vec<f64> = ts.iter().map(|&t| g(t)).collect();
        let mut cuts = vec![lo];
        for k in 0..ts.len() - 1 {
            if gs[k] != 0.0 && gs[k + 1] != 0.0 && (gs[k] > 0.0) != (gs[k + 1] > 0.0) {
                cuts.push(bisect(&g, ts[k], ts[k + 1], gs[k]));
            }
        }
        cuts.push(hi);
        for w in cuts.windows(2) {
            nodes.clear();
            weights.clear();
            push_panel(w[0], w[1], &mut nodes, &mut weights);
            total += nodes.iter().zip(&weights).map(|(&t, &wt)| wt * pow(g(t))).sum::<f64>();
        }
    }
    total
}
