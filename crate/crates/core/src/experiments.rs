//! Experiment runners behind the `lcinterp` subcommands. Each runner returns
//! the CSV text it would write together with the outcome of its checks, so
//! that the same code path is exercised by the binary and by the tests.
//!
//! Every CSV starts with a header row and ends with one `# lcinterp ...`
//! metadata comment naming the version and configuration. Floats are written
//! in shortest round-trip form, so equal numbers give equal bytes.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::{interpolate, residual_at_nodes};
use crate::measure::{
    fit_rate, interpolation_error, lebesgue_constant, mz_ratio, NormSpec, RateRecord,
};
use crate::nodes::{make_degree_pair, node_set_from_curve, node_set_from_grid, spectral_set, DegreePair};
use crate::testbed::{self, SampledFunction};
use crate::vdv::{check_mean_properties, torus_error, vdv_kernel};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for the grid/curve agreement and the weight sum.
const NODE_TOLERANCE: f64 = 1e-12;
/// Number of trailing records used by the slope fits.
pub const FIT_WINDOW: usize = 5;

/// CSV output of one run plus whether every requested check held.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    pub passed: bool,
    /// Human-readable notes for stderr.
    pub notes: Vec<String>,
}

fn metadata(csv: &mut String, command: &str, config: &str) {
    let _ = writeln!(csv, "# lcinterp {VERSION} {command} config: {config}");
}

fn pairs_label(pairs: &[DegreePair]) -> String {
    pairs
        .iter()
        .map(|d| format!("{},{}", d.m(), d.n()))
        .collect::<Vec<_>>()
        .join(";")
}

/// `"7,5"`
pub fn parse_pair(s: &str) -> Result<DegreePair> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Domain(format!("pair '{s}' must look like m,n")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|_| Error::Domain(format!("'{t}' is not an integer")))
    };
    make_degree_pair(parse(a)?, parse(b)?)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Domain(format!("range '{s}' must look like a..b")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Error::Domain(format!("'{t}' is not a positive integer")))
    };
    let (lo, hi) = (parse(a)?, parse(b)?);
    if lo == 0 || lo > hi {
        return Err(Error::Domain(format!("range '{s}' must satisfy 1 <= a <= b")));
    }
    Ok((lo, hi))
}

/// `a, 2a, 4a, ...` up to `b`.
pub fn doubling(s: &str) -> Result<Vec<usize>> {
    let (lo, hi) = parse_range(s)?;
    let mut out = vec![];
    let mut n = lo;
    while n <= hi {
        out.push(n);
        n *= 2;
    }
    Ok(out)
}

/// `padua:a..b` gives `(n, n+1)` and `skew:a..b` gives `(2n+1, n)` for
/// `n = a, 2a, ... ≤ b`; anything else is a `;`-separated list of pairs.
pub fn parse_sequence(s: &str) -> Result<Vec<DegreePair>> {
    if let Some(r) = s.strip_prefix("padua:") {
        return doubling(r)?.into_iter().map(|n| DegreePair::new(n, n + 1)).collect();
    }
    if let Some(r) = s.strip_prefix("skew:") {
        return doubling(r)?
            .into_iter()
            .map(|n| DegreePair::new(2 * n + 1, n))
            .collect();
    }
    let pairs: Vec<DegreePair> = s
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_pair)
        .collect::<Result<_>>()?;
    if pairs.is_empty() {
        return Err(Error::Domain("empty degree sequence".into()));
    }
    Ok(pairs)
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} must lie in [1, ∞)")))
    }
}

fn corpus_function(id: &str) -> Result<SampledFunction> {
    testbed::find(id).ok_or_else(|| Error::Domain(format!("unknown corpus id '{id}'")))
}

pub fn run_nodes(d: DegreePair) -> Result<Report> {
    let grid = node_set_from_grid(d);
    let curve = node_set_from_curve(d, 1e-9)?;
    let gap = grid
        .max_coordinate_gap(&curve)
        .ok_or_else(|| Error::Consistency("grid and curve give different index sets".into()))?;
    let sum = grid.weight_sum();
    let gamma = spectral_set(d).len();

    let mut csv = String::from("i,j,x,y,class,weight\n");
    for nd in grid.nodes() {
        let _ = writeln!(csv, "{},{},{},{},{},{}", nd.i, nd.j, nd.x, nd.y, nd.class.as_str(), nd.weight);
    }
    let passed = gap <= NODE_TOLERANCE
        && (sum - 1.0).abs() <= NODE_TOLERANCE
        && grid.len() == d.node_count()
        && gamma == grid.len();
    let _ = writeln!(
        csv,
        "# consistency: nodes={} expected={} spectral={} curve_grid_gap={} weight_sum={}",
        grid.len(),
        d.node_count(),
        gamma,
        gap,
        sum
    );
    metadata(&mut csv, "nodes", &format!("pair={},{}", d.m(), d.n()));
    Ok(Report {
        csv,
        passed,
        notes: vec![],
    })
}

/// One error row, or with `coefficients` the coefficient table of `L_{m,n} f`.
pub fn run_interp(id: &str, d: DegreePair, p: f64, coefficients: bool) -> Result<Report> {
    check_p(p)?;
    let f = corpus_function(id)?;
    let ip = interpolate(|x, y| f.eval(x, y), d)?;
    let residual = residual_at_nodes(&ip);
    let mut csv = String::new();
    let config = format!("id={id} pair={},{} p={p} coefficients={coefficients}", d.m(), d.n());
    if coefficients {
        csv.push_str("i,j,c\n");
        for ((i, j), c) in ip.series().iter() {
            let _ = writeln!(csv, "{i},{j},{c}");
        }
    } else {
        let error = interpolation_error(&f, &ip, &NormSpec::for_function(&f, p))?;
        csv.push_str("id,m,n,p,error,node_residual\n");
        let _ = writeln!(csv, "{id},{},{},{p},{error},{residual}", d.m(), d.n());
    }
    metadata(&mut csv, "interp", &config);
    Ok(Report {
        csv,
        passed: residual <= 1e-10,
        notes: vec![],
    })
}

/// Optional pass/fail thresholds for [`run_converge`]. `max_slope` is either
/// empty, a single limit for every `p`, or one limit per `p`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergeChecks {
    pub max_slope: Vec<f64>,
    pub max_final_error: Option<f64>,
}

fn slope_limit(limits: &[f64], k: usize) -> Option<f64> {
    match limits.len() {
        0 => None,
        1 => Some(limits[0]),
        _ => limits.get(k).copied(),
    }
}

fn slope_check(notes: &mut Vec<String>, experiment: &str, slope: Option<f64>, limit: f64) -> bool {
    let ok = slope.is_some_and(|s| s <= limit);
    notes.push(format!(
        "{experiment}: slope {} (limit {limit}) {}",
        slope.map_or("nan".into(), |s| s.to_string()),
        if ok { "pass" } else { "FAIL" }
    ));
    ok
}

fn rate_rows(
    csv: &mut String,
    notes: &mut Vec<String>,
    experiment: &str,
    outcomes: Vec<(usize, usize, Result<f64>)>,
) -> Option<f64> {
    let mut ok = vec![];
    for (m, n, r) in &outcomes {
        match r {
            Ok(e) => ok.push(RateRecord { m: *m, n: *n, error: *e }),
            Err(err) => notes.push(format!("{experiment} ({m},{n}): {err}")),
        }
    }
    let start = ok.len().saturating_sub(FIT_WINDOW);
    let slope = fit_rate(experiment, ok.clone(), start..ok.len())
        .map(|r| r.fitted_slope)
        .map_err(|e| notes.push(format!("{experiment}: {e}")))
        .ok();
    let slope_s = slope.map_or_else(|| "nan".to_string(), |s| s.to_string());
    for (m, n, r) in outcomes {
        match r {
            Ok(e) => {
                let _ = writeln!(csv, "{experiment},{m},{n},{e},{slope_s}");
            }
            Err(_) => {
                let _ = writeln!(csv, "{experiment},{m},{n},nan,{slope_s}");
            }
        }
    }
    slope
}

/// `‖f - L_{m,n} f‖_{L_{p,w}}` along a degree sequence, with a slope fitted
/// over the last [`FIT_WINDOW`] pairs. A pair whose quadrature fails is
/// recorded as `nan` and skipped by the fit.
pub fn run_converge(
    ids: &[String],
    sequence: &[DegreePair],
    ps: &[f64],
    checks: &ConvergeChecks,
    sequence_label: &str,
) -> Result<Report> {
    for &p in ps {
        check_p(p)?;
    }
    let functions: Vec<SampledFunction> = ids.iter().map(|id| corpus_function(id)).collect::<Result<_>>()?;
    let mut csv = String::from("experiment,m,n,error,slope\n");
    let mut notes = vec![];
    let mut passed = true;
    for f in &functions {
        let interpolants: Vec<_> = sequence
            .par_iter()
            .map(|&d| interpolate(|x, y| f.eval(x, y), d))
            .collect::<Result<_>>()?;
        for (k, &p) in ps.iter().enumerate() {
            let spec = NormSpec::for_function(f, p);
            let outcomes: Vec<(usize, usize, Result<f64>)> = interpolants
                .iter()
                .map(|ip| {
                    let d = ip.degrees();
                    (d.m(), d.n(), interpolation_error(f, ip, &spec))
                })
                .collect();
            let last = outcomes.last().and_then(|o| o.2.as_ref().ok().copied());
            let experiment = format!("{}_p{p}", f.id);
            let slope = rate_rows(&mut csv, &mut notes, &experiment, outcomes);
            if let Some(limit) = slope_limit(&checks.max_slope, k) {
                passed &= slope_check(&mut notes, &experiment, slope, limit);
            }
            if let Some(limit) = checks.max_final_error {
                let ok = last.is_some_and(|e| e < limit);
                notes.push(format!(
                    "{experiment}: final error {} (limit {limit}) {}",
                    last.map_or("nan".into(), |e| e.to_string()),
                    if ok { "pass" } else { "FAIL" }
                ));
                passed &= ok;
            }
        }
    }
    metadata(
        &mut csv,
        "converge",
        &format!(
            "ids={} seq={sequence_label} p={} window={FIT_WINDOW}",
            ids.join(";"),
            ps.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
        ),
    );
    Ok(Report { csv, passed, notes })
}

/// `Λ_{m,n}` and `Λ / (log(m+1) log(n+1))` along a sequence; passes when the
/// normalized value grows by less than `max_growth` from first to last.
pub fn run_lebesgue(sequence: &[DegreePair], grid: usize, max_growth: f64, sequence_label: &str) -> Result<Report> {
    let values: Vec<f64> = sequence
        .iter()
        .map(|&d| lebesgue_constant(d, grid))
        .collect::<Result<_>>()?;
    let mut csv = String::from("m,n,grid,value,ratio\n");
    let mut ratios = vec![];
    for (d, v) in sequence.iter().zip(&values) {
        let ratio = v / (((d.m() + 1) as f64).ln() * ((d.n() + 1) as f64).ln());
        ratios.push(ratio);
        let _ = writeln!(csv, "{},{},{grid},{v},{ratio}", d.m(), d.n());
    }
    let growth = ratios.last().unwrap_or(&1.0) / ratios.first().unwrap_or(&1.0);
    let passed = growth < max_growth;
    metadata(
        &mut csv,
        "lebesgue",
        &format!("seq={sequence_label} grid={grid} max_growth={max_growth}"),
    );
    Ok(Report {
        csv,
        passed,
        notes: vec![format!(
            "normalized growth last/first = {growth} (limit {max_growth}) {}",
            if passed { "pass" } else { "FAIL" }
        )],
    })
}

pub fn run_mz(pairs: &[DegreePair], ps: &[f64], trials: usize, seed: u64) -> Result<Report> {
    for &p in ps {
        check_p(p)?;
    }
    let mut csv = String::from("m,n,p,ratio_min,ratio_max,trials,seed\n");
    for &d in pairs {
        for &p in ps {
            let r = mz_ratio(d, p, trials, seed)?;
            let _ = writeln!(
                csv,
                "{},{},{p},{},{},{trials},{seed}",
                d.m(),
                d.n(),
                r.ratio_min,
                r.ratio_max
            );
        }
    }
    metadata(
        &mut csv,
        "mz",
        &format!(
            "pairs={} p={} trials={trials} seed={seed}",
            pairs_label(pairs),
            ps.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
        ),
    );
    Ok(Report {
        csv,
        passed: true,
        notes: vec![],
    })
}

/// `K_n` on `steps` equispaced angles of `[0, 2π)`.
pub fn run_vdv_kernel(n: usize, steps: usize) -> Result<Report> {
    if n == 0 || steps == 0 {
        return Err(Error::Domain("kernel table needs n >= 1 and steps >= 1".into()));
    }
    let mut csv = String::from("n,phi,kernel\n");
    for k in 0..steps {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
        let _ = writeln!(csv, "{n},{phi},{}", vdv_kernel(n, phi));
    }
    metadata(&mut csv, "vdv-kernel", &format!("n={n} steps={steps}"));
    Ok(Report {
        csv,
        passed: true,
        notes: vec![],
    })
}

/// Degree bound, interpolation at the sample parameters and reproduction of
/// degree-`2n` trigonometric polynomials, for each `n`.
pub fn run_vdv_check(ns: &[usize], seed: u64, tolerance: f64) -> Result<Report> {
    let mut csv = String::from("n,degree,degree_bound,interpolation_residual,reproduction_error,passed\n");
    let mut passed = true;
    for &n in ns {
        let r = check_mean_properties(n, seed, tolerance)?;
        passed &= r.passed();
        let _ = writeln!(
            csv,
            "{n},{},{},{},{},{}",
            r.degree,
            r.degree_bound,
            r.interpolation_residual,
            r.reproduction_error,
            r.passed()
        );
    }
    metadata(
        &mut csv,
        "vdv-check",
        &format!(
            "n={} seed={seed} tolerance={tolerance}",
            ns.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
        ),
    );
    Ok(Report {
        csv,
        passed,
        notes: vec![],
    })
}

/// `‖g - V_n g‖_{L_p(𝕋)}` for a torus corpus function, in the rate CSV layout
/// with `m = n`.
pub fn run_vdv_rate(id: &str, ns: &[usize], ps: &[f64], max_slope: &[f64]) -> Result<Report> {
    for &p in ps {
        check_p(p)?;
    }
    let g = testbed::find_torus(id).ok_or_else(|| Error::Domain(format!("unknown torus corpus id '{id}'")))?;
    let mut csv = String::from("experiment,m,n,error,slope\n");
    let mut notes = vec![];
    let mut passed = true;
    for (k, &p) in ps.iter().enumerate() {
        let outcomes: Vec<(usize, usize, Result<f64>)> =
            ns.par_iter().map(|&n| (n, n, torus_error(&g, n, p))).collect();
        let experiment = format!("{id}_p{p}");
        let slope = rate_rows(&mut csv, &mut notes, &experiment, outcomes);
        if let Some(limit) = slope_limit(max_slope, k) {
            passed &= slope_check(&mut notes, &experiment, slope, limit);
        }
    }
    metadata(
        &mut csv,
        "vdv-rate",
        &format!(
            "id={id} n={} p={} window={FIT_WINDOW}",
            ns.iter().map(usize::to_string).collect::<Vec<_>>().join(";"),
            ps.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
        ),
    );
    Ok(Report { csv, passed, notes })
}

/// Registered functions with their regularity class and facts.
pub fn run_corpus() -> Report {
    let mut csv = String::from("id,regularity,breakpoints_x,breakpoints_y,facts\n");
    for f in testbed::corpus() {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        let facts = f
            .analytic_facts
            .iter()
            .map(|a| format!("{}={}", a.name, a.value))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            f.id,
            f.regularity,
            join(&f.breakpoints_x),
            join(&f.breakpoints_y),
            facts
        );
    }
    for g in testbed::torus_corpus() {
        let bps = g.breakpoints.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        let _ = writeln!(csv, "{},torus_bv,{bps},,V_T={}", g.id, g.variation);
    }
    metadata(&mut csv, "corpus", "");
    Report {
        csv,
        passed: true,
        notes: vec![],
    }
}
