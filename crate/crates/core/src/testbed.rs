//! Registered test functions with regularity metadata.
//!
//! Breakpoints sit at 0.37, -0.21, 0.3 and -0.4 (and 1.0, 4.0 on the torus),
//! away from every CGL point of degree up to 129. Ids are stable and appear
//! verbatim in CSV output.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::nodes::{spectral_set, DegreePair};
use crate::variation::{
    hardy_krause, total_variation_1d, GridFunction2D, Partition1D,
};

pub type EvalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Closed-form `∂^{r+s}/∂φ^r ∂ψ^s f(cos φ, cos ψ)`; `None` when not registered.
pub type TrigDerivFn = Arc<dyn Fn(usize, usize, f64, f64) -> Option<f64> + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub enum Regularity {
    /// A polynomial with the given Chebyshev support; it lies in the
    /// interpolation space of `(m, n)` whenever the support is inside `Γ_{m,n}`.
    MemberOfSpace { support: Vec<(usize, usize)> },
    Analytic,
    /// `D̃^{(r,s)} f` has bounded Hardy-Krause variation.
    SmoothBV { r: usize, s: usize },
    HBVOnly,
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularity::MemberOfSpace { .. } => write!(f, "member"),
            Regularity::Analytic => write!(f, "analytic"),
            Regularity::SmoothBV { r, s } => write!(f, "smooth_bv({r},{s})"),
            Regularity::HBVOnly => write!(f, "hbv"),
        }
    }
}

/// Which variation functional a registered fact measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    HardyKrause,
    /// `sup_y V_{1,J}(g(·, y))`
    SupVariationX,
    /// `sup_x V_{2,J}(g(x, ·))`
    SupVariationY,
}

/// The function a fact is about.
#[derive(Clone)]
pub enum FactTarget {
    Itself,
    /// `D̃^{(r,s)} f`, through the registered trig derivatives.
    DTilde(usize, usize),
    /// Any other closed form, e.g. a classical partial derivative.
    Custom(EvalFn),
}

#[derive(Clone)]
pub struct AnalyticFact {
    pub name: &'static str,
    pub functional: Functional,
    pub target: FactTarget,
    pub value: f64,
}

#[derive(Clone)]
pub struct SampledFunction {
    pub id: String,
    eval: EvalFn,
    pub breakpoints_x: Vec<f64>,
    pub breakpoints_y: Vec<f64>,
    pub regularity: Regularity,
    pub analytic_facts: Vec<AnalyticFact>,
    pub trig_derivatives: Option<TrigDerivFn>,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("id", &self.id)
            .field("regularity", &self.regularity)
            .field("breakpoints_x", &self.breakpoints_x)
            .field("breakpoints_y", &self.breakpoints_y)
            .finish_non_exhaustive()
    }
}

impl SampledFunction {
    pub fn new(id: impl Into<String>, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            id: id.into(),
            eval: Arc::new(eval),
            breakpoints_x: Vec::new(),
            breakpoints_y: Vec::new(),
            regularity: Regularity::HBVOnly,
            analytic_facts: Vec::new(),
            trig_derivatives: None,
        }
    }

    pub fn with_breakpoints(mut self, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        self.breakpoints_x = xs;
        self.breakpoints_y = ys;
        self
    }

    pub fn with_regularity(mut self, regularity: Regularity) -> Self {
        self.regularity = regularity;
        self
    }

    pub fn with_fact(mut self, fact: AnalyticFact) -> Self {
        self.analytic_facts.push(fact);
        self
    }

    pub fn with_trig_derivatives(
        mut self,
        d: impl Fn(usize, usize, f64, f64) -> Option<f64> + Send + Sync + 'static,
    ) -> Self {
        self.trig_derivatives = Some(Arc::new(d));
        self
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn eval_fn(&self) -> EvalFn {
        Arc::clone(&self.eval)
    }

    /// `f(cos φ, cos ψ)`
    #[inline]
    pub fn eval_trig(&self, phi: f64, psi: f64) -> f64 {
        (self.eval)(phi.cos(), psi.cos())
    }

    /// True when `f` lies in the interpolation space of `d`.
    pub fn is_member_of(&self, d: DegreePair) -> bool {
        match &self.regularity {
            Regularity::MemberOfSpace { support } => {
                let gamma = spectral_set(d);
                support.iter().all(|&(i, j)| gamma.contains(i, j))
            }
            _ => false,
        }
    }

    pub fn fact(&self, name: &str) -> Option<&AnalyticFact> {
        self.analytic_facts.iter().find(|f| f.name == name)
    }

    /// Breakpoints mapped to the angle variable `φ = arccos x`, ascending.
    pub fn angle_breaks_x(&self) -> Vec<f64> {
        to_angles(&self.breakpoints_x)
    }

    pub fn angle_breaks_y(&self) -> Vec<f64> {
        to_angles(&self.breakpoints_y)
    }
}

fn to_angles(bps: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = bps.iter().map(|b| b.acos()).collect();
    a.sort_by(f64::total_cmp);
    a
}

/// A 2π-periodic function of one angle, with jump locations in `[0, 2π)`.
#[derive(Clone)]
pub struct TorusFunction {
    pub id: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub breakpoints: Vec<f64>,
    /// Total variation over one period.
    pub variation: f64,
}

impl fmt::Debug for TorusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusFunction")
            .field("id", &self.id)
            .field("breakpoints", &self.breakpoints)
            .field("variation", &self.variation)
            .finish_non_exhaustive()
    }
}

impl TorusFunction {
    pub fn new(
        id: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        breakpoints: Vec<f64>,
        variation: f64,
    ) -> Self {
        Self {
            id: id.into(),
            eval: Arc::new(eval),
            breakpoints,
            variation,
        }
    }

    /// Evaluates at `phi` reduced into `[0, 2π)`.
    pub fn eval(&self, phi: f64) -> f64 {
        (self.eval)(phi.rem_euclid(2.0 * PI))
    }
}

const STEP_X: f64 = 0.37;
const STEP_Y: f64 = -0.21;
const KINK_X: f64 = 0.3;
const KINK_Y: f64 = -0.4;

fn step(t: f64, at: f64) -> f64 {
    if t >= at {
        1.0
    } else {
        0.0
    }
}

fn signed_square(t: f64) -> f64 {
    t * t.abs() / 2.0
}

/// `∂^r/∂φ^r cos φ`
fn cos_derivative(r: usize, phi: f64) -> f64 {
    match r % 4 {
        0 => phi.cos(),
        1 => -phi.sin(),
        2 => -phi.cos(),
        _ => phi.sin(),
    }
}

/// Trig-domain derivatives of `u ↦ (u - a)|u - a| / 2` composed with `cos`, up to order 2.
fn kink_trig_derivative(order: usize, theta: f64, a: f64) -> Option<f64> {
    let u = theta.cos();
    let d = u - a;
    match order {
        0 => Some(signed_square(d)),
        1 => Some(-d.abs() * theta.sin()),
        2 => Some(d.signum() * theta.sin().powi(2) - d.abs() * u),
        _ => None,
    }
}

// sup over the fact's grid of the variation of -|u - a|·√(1 - u²); computed
// with a bounded scalar optimizer on each side of the kink (twice the two
// local extrema).
const KINK_DTILDE_VAR_X: f64 = 2.045_518_112_014_372;
const KINK_DTILDE_VAR_Y: f64 = 2.081_668_905_831_367_3;

/// The registered corpus.
pub fn corpus() -> Vec<SampledFunction> {
    let mut out = Vec::new();

    out.push(
        SampledFunction::new("const_one", |_, _| 1.0)
            .with_regularity(Regularity::MemberOfSpace {
                support: vec![(0, 0)],
            })
            .with_trig_derivatives(|r, s, _, _| Some(if r + s == 0 { 1.0 } else { 0.0 })),
    );

    out.push(
        SampledFunction::new("linear_x", |x, _| x)
            .with_regularity(Regularity::MemberOfSpace {
                support: vec![(1, 0)],
            })
            .with_trig_derivatives(|r, s, phi, _| Some(if s == 0 { cos_derivative(r, phi) } else { 0.0 })),
    );

    out.push(
        SampledFunction::new("cheb_1_1", |x, y| 2.0 * x * y)
            .with_regularity(Regularity::MemberOfSpace {
                support: vec![(1, 1)],
            })
            .with_trig_derivatives(|r, s, phi, psi| {
                Some(2.0 * cos_derivative(r, phi) * cos_derivative(s, psi))
            }),
    );

    // 0.5 - 0.3 Ĉ_2(x) + 0.7 Ĉ_1(x)Ĉ_2(y) + 0.2 Ĉ_3(y)
    out.push(
        SampledFunction::new("poly_mix", |x, y| {
            let t2x = 2.0 * x * x - 1.0;
            let t2y = 2.0 * y * y - 1.0;
            let t3y = 4.0 * y * y * y - 3.0 * y;
            0.5 - 0.3 * 2f64.sqrt() * t2x + 0.7 * 2.0 * x * t2y + 0.2 * 2f64.sqrt() * t3y
        })
        .with_regularity(Regularity::MemberOfSpace {
            support: vec![(0, 0), (2, 0), (1, 2), (0, 3)],
        })
        .with_trig_derivatives(|r, s, phi, psi| {
            let c = |k: f64, order: usize, t: f64| k.powi(order as i32) * cos_derivative(order, k * t);
            let r2 = std::f64::consts::SQRT_2;
            let mut v = 0.7 * 2.0 * c(1.0, r, phi) * c(2.0, s, psi);
            if s == 0 {
                v += -0.3 * r2 * c(2.0, r, phi);
            }
            if r == 0 {
                v += 0.2 * r2 * c(3.0, s, psi);
            }
            if r == 0 && s == 0 {
                v += 0.5;
            }
            Some(v)
        }),
    );

    out.push(
        SampledFunction::new("analytic_cos", |x, y| (3.0 * x + 2.0 * y).cos())
            .with_regularity(Regularity::Analytic)
            .with_trig_derivatives(|r, s, phi, psi| {
                // F = cos(3 cos φ + 2 cos ψ); derivatives up to total order 2
                let arg = 3.0 * phi.cos() + 2.0 * psi.cos();
                let (a1, a2) = (-3.0 * phi.sin(), -2.0 * psi.sin());
                let (a11, a22) = (-3.0 * phi.cos(), -2.0 * psi.cos());
                let (c, sn) = (arg.cos(), arg.sin());
                match (r, s) {
                    (0, 0) => Some(c),
                    (1, 0) => Some(-sn * a1),
                    (0, 1) => Some(-sn * a2),
                    (2, 0) => Some(-c * a1 * a1 - sn * a11),
                    (0, 2) => Some(-c * a2 * a2 - sn * a22),
                    (1, 1) => Some(-c * a1 * a2),
                    _ => None,
                }
            }),
    );

    let hbv_step = SampledFunction::new("hbv_step", |x, y| step(x, STEP_X) * step(y, STEP_Y))
        .with_breakpoints(vec![STEP_X], vec![STEP_Y])
        .with_regularity(Regularity::HBVOnly)
        .with_fact(AnalyticFact {
            name: "H_{J^2}",
            functional: Functional::HardyKrause,
            target: FactTarget::Itself,
            value: 1.0,
        })
        .with_fact(AnalyticFact {
            name: "V_{1,J}",
            functional: Functional::SupVariationX,
            target: FactTarget::Itself,
            value: 1.0,
        })
        .with_fact(AnalyticFact {
            name: "V_{2,J}",
            functional: Functional::SupVariationY,
            target: FactTarget::Itself,
            value: 1.0,
        });
    out.push(hbv_step);

    let kink = SampledFunction::new("kink", |x, y| {
        signed_square(x - KINK_X) + signed_square(y - KINK_Y)
    })
    .with_breakpoints(vec![KINK_X], vec![KINK_Y])
    .with_regularity(Regularity::SmoothBV { r: 1, s: 1 })
    .with_trig_derivatives(|r, s, phi, psi| match (r, s) {
        (0, 0) => Some(signed_square(phi.cos() - KINK_X) + signed_square(psi.cos() - KINK_Y)),
        (r, 0) => kink_trig_derivative(r, phi, KINK_X),
        (0, s) => kink_trig_derivative(s, psi, KINK_Y),
        _ => Some(0.0),
    })
    .with_fact(AnalyticFact {
        name: "V_{1,J}(f_x)",
        functional: Functional::SupVariationX,
        target: FactTarget::Custom(Arc::new(|x, _| (x - KINK_X).abs())),
        value: 2.0,
    })
    .with_fact(AnalyticFact {
        name: "V_{2,J}(f_y)",
        functional: Functional::SupVariationY,
        target: FactTarget::Custom(Arc::new(|_, y| (y - KINK_Y).abs())),
        value: 2.0,
    })
    .with_fact(AnalyticFact {
        name: "V_{1,J}(D~(1,0)f)",
        functional: Functional::SupVariationX,
        target: FactTarget::DTilde(1, 0),
        value: KINK_DTILDE_VAR_X,
    })
    .with_fact(AnalyticFact {
        name: "V_{2,J}(D~(0,1)f)",
        functional: Functional::SupVariationY,
        target: FactTarget::DTilde(0, 1),
        value: KINK_DTILDE_VAR_Y,
    })
    .with_fact(AnalyticFact {
        name: "H_{J^2}(D~(1,1)f)",
        functional: Functional::HardyKrause,
        target: FactTarget::DTilde(1, 1),
        value: 0.0,
    });
    out.push(kink);

    out
}

pub fn find(id: &str) -> Option<SampledFunction> {
    corpus().into_iter().find(|f| f.id == id)
}

pub fn torus_corpus() -> Vec<TorusFunction> {
    vec![TorusFunction::new(
        "torus_step",
        |phi| if (1.0..4.0).contains(&phi) { 1.0 } else { 0.0 },
        vec![1.0, 4.0],
        2.0,
    )]
}

pub fn find_torus(id: &str) -> Option<TorusFunction> {
    torus_corpus().into_iter().find(|f| f.id == id)
}

/// Dense partition of `[-1, 1]` with `points` equispaced nodes plus the breakpoints.
pub fn dense_partition(points: usize, breakpoints: &[f64]) -> Partition1D {
    let mut xs: Vec<f64> = (0..points)
        .map(|k| -1.0 + 2.0 * k as f64 / (points - 1) as f64)
        .chain(breakpoints.iter().copied())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    Partition1D::new(xs).expect("sorted and deduplicated")
}

/// Re-evaluates a registered fact on dense grids (4096 points per axis plus
/// breakpoints; `sup` functionals scan 65 cross-sections).
pub fn recompute_fact(f: &SampledFunction, fact: &AnalyticFact) -> crate::error::Result<f64> {
    let target: EvalFn = match &fact.target {
        FactTarget::Itself => f.eval_fn(),
        FactTarget::Custom(g) => Arc::clone(g),
        FactTarget::DTilde(r, s) => {
            let dt = crate::variation::d_tilde(f, *r, *s, crate::variation::DerivativePath::Analytic)?;
            dt.eval_fn()
        }
    };
    let px = dense_partition(4096, &f.breakpoints_x);
    let py = dense_partition(4096, &f.breakpoints_y);
    match fact.functional {
        Functional::HardyKrause => {
            let g = GridFunction2D::sample(px, py, |x, y| target(x, y))?;
            hardy_krause(&g)
        }
        Functional::SupVariationX => {
            let sections = dense_partition(65, &f.breakpoints_y);
            let mut best: f64 = 0.0;
            for &y in sections.points() {
                let vals: Vec<f64> = px.points().iter().map(|&x| target(x, y)).collect();
                best = best.max(total_variation_1d(&px, &vals)?);
            }
            Ok(best)
        }
        Functional::SupVariationY => {
            let sections = dense_partition(65, &f.breakpoints_x);
            let mut best: f64 = 0.0;
            for &x in sections.points() {
                let vals: Vec<f64> = py.points().iter().map(|&y| target(x, y)).collect();
                best = best.max(total_variation_1d(&py, &vals)?);
            }
            Ok(best)
        }
    }
}
