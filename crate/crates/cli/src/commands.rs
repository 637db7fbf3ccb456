use std::io::Write;
use std::path::{Path, PathBuf};

use coneretract::analysis::{
    check_isotone, check_mutual_polarity, check_retraction_axioms, check_subadditive,
    find_halo_witness, find_mprj_witness, ConeRegion, Map, ProjectionTarget, WitnessSearch,
};
use coneretract::moreau::{
    decompose, project_circular, project_polyhedral, CircularProjectionPair, ProjectionPair,
};
use coneretract::retractions::{build_one_range, OneRangeRetraction, TransversalRetractionPair};
use coneretract::{
    build_transversal, is_transversal, BuiltCone, CircularCone, ConeSpecFile, Error,
    PolyhedralCone, PropertyReport, RetractionPair, SampleSpec, ToleranceConfig, TransversalSearch,
    Vector,
};
use serde_json::{json, Value};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::HypothesisNotMet(_)
            | Error::NotTransversal2D(_)
            | Error::TransversalNotFound
            | Error::ConesIntersect
            | Error::NotPointed(_)
            | Error::PreconditionViolated(_)
            | Error::SliceDegenerate(_)
            | Error::NoStrictFunctional => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(e.to_string())
    }
}

pub type CliResult = Result<u8, CliError>;

/// JSON to stdout, or to `out` with `summary` on stdout.
pub fn emit(value: &Value, out: Option<PathBuf>, summary: &str) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    let mut stdout = std::io::stdout().lock();
    // a closed pipe on stdout is not an error worth reporting
    let _ = match out {
        Some(path) => {
            std::fs::write(&path, text + "\n")?;
            writeln!(stdout, "{summary}\nwrote {}", path.display())
        }
        None => writeln!(stdout, "{text}"),
    };
    Ok(())
}

pub fn load(spec: &Path) -> Result<ConeSpecFile, CliError> {
    Ok(ConeSpecFile::load(spec)?)
}

fn polyhedral(
    spec: &ConeSpecFile,
    name: &str,
    tol: &ToleranceConfig,
) -> Result<PolyhedralCone, CliError> {
    match spec.build(name, tol)? {
        BuiltCone::Circular(_) => Err(CliError::usage(format!(
            "{name}: a polyhedral cone is needed here"
        ))),
        built => Ok(built.polyhedral().expect("polyhedral kind").clone()),
    }
}

fn points(dim: usize, raw: &[Vec<f64>]) -> Result<Vec<Vector>, CliError> {
    raw.iter()
        .map(|p| {
            if p.len() != dim {
                return Err(CliError::usage(format!(
                    "point has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            Ok(Vector::new(p.clone())?)
        })
        .collect()
}

pub fn project(
    spec: &Path,
    cone: &str,
    raw: &[Vec<f64>],
    out: Option<PathBuf>,
    tol: &ToleranceConfig,
) -> CliResult {
    let spec = load(spec)?;
    let built = spec.build(cone, tol)?;
    let xs = points(built.dim(), raw)?;
    let mut rows = Vec::new();
    let mut failed = 0;
    for x in &xs {
        let scale = 1.0 + x.norm();
        let row = match &built {
            BuiltCone::Circular(c) => {
                let p = project_circular(c, x);
                let q = x - &p;
                json!({
                    "x": x, "p": p, "q": q, "inner": p.dot(&q),
                    "residuals": {
                        "sum": (&(&p + &q) - x).norm() / scale,
                        "p-membership": c.distance(&p) / scale,
                        "q-polar-membership": c.polar().distance(&q) / scale,
                    },
                    "status": "ok",
                })
            }
            other => {
                let k = other.polyhedral().expect("polyhedral kind");
                match decompose(k, x) {
                    Ok(d) => json!({
                        "x": d.x, "p": d.p, "q": d.q, "inner": d.inner,
                        "residuals": { "sum": d.sum_residual() / scale },
                        "status": "ok",
                    }),
                    Err(Error::DecompositionInvariant(why)) => {
                        failed += 1;
                        let p = project_polyhedral(k, x)?;
                        let q = x - &p;
                        json!({ "x": x, "p": p, "q": q, "inner": p.dot(&q), "status": "invariant-failed", "error": why })
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        };
        rows.push(row);
    }
    let value = json!({ "cone": cone, "decompositions": rows });
    emit(
        &value,
        out,
        &format!("{} decompositions, {failed} failed", xs.len()),
    )?;
    Ok(if failed > 0 { 2 } else { 0 })
}

/// The pair with ranges `M` and `N`.
enum Constructed {
    OneRange(Box<OneRangeRetraction>),
    Transversal(Box<TransversalRetractionPair>),
}

impl Constructed {
    fn pair(&self) -> &dyn RetractionPair {
        match self {
            Constructed::OneRange(p) => p.as_ref(),
            Constructed::Transversal(p) => p.as_ref(),
        }
    }
}

fn construct(m: &PolyhedralCone, n: &PolyhedralCone) -> Result<Constructed, CliError> {
    if m.dim() != n.dim() {
        return Err(CliError::usage("M and N live in different dimensions"));
    }
    if let [u] = n.generators() {
        if m.is_solid() {
            return Ok(Constructed::OneRange(Box::new(build_one_range(m, u)?)));
        }
    }
    let cert = match is_transversal(m, n)? {
        TransversalSearch::Found(c) => c,
        TransversalSearch::NotFound => return Err(Error::TransversalNotFound.into()),
    };
    Ok(Constructed::Transversal(Box::new(build_transversal(
        m, n, &cert,
    )?)))
}

pub fn retract(
    spec: &Path,
    m: &str,
    n: &str,
    raw: &[Vec<f64>],
    out: Option<PathBuf>,
    tol: &ToleranceConfig,
) -> CliResult {
    let spec = load(spec)?;
    let (mc, nc) = (polyhedral(&spec, m, tol)?, polyhedral(&spec, n, tol)?);
    let xs = points(mc.dim(), raw)?;
    let constructed = construct(&mc, &nc)?;
    let pair = constructed.pair();
    let mut rows = Vec::new();
    for x in &xs {
        let (qx, rx) = pair.eval(x)?;
        let scale = 1.0 + x.norm();
        rows.push(json!({
            "x": x, "qx": qx, "rx": rx,
            "residuals": {
                "sum": (&(&qx + &rx) - x).norm() / scale,
                "q-of-r": pair.q(&rx)?.norm() / scale,
                "r-of-q": pair.r(&qx)?.norm() / scale,
                "q-in-m": mc.violation(&qx)? / scale,
                "r-in-n": nc.violation(&rx)? / scale,
            },
        }));
    }
    let mut value = json!({ "m": m, "n": n, "construction": pair.construction(), "points": rows });
    if let Constructed::Transversal(p) = &constructed {
        value["delta_dir"] = json!(p.delta_dir());
    }
    emit(
        &value,
        out,
        &format!(
            "{} points through the {} pair",
            xs.len(),
            pair.construction()
        ),
    )?;
    Ok(0)
}

pub enum CheckTarget {
    Cone(String),
    Pair(String, String),
}

/// Generators pairwise orthogonal, one per dimension.
fn is_orthant_like(k: &PolyhedralCone) -> bool {
    let g = k.generators();
    g.len() == k.dim()
        && g.iter().enumerate().all(|(i, a)| {
            g[i + 1..]
                .iter()
                .all(|b| a.dot(b).abs() <= 1e-9 * a.norm() * b.norm())
        })
}

fn is_simplicial(k: &PolyhedralCone) -> bool {
    k.generators().len() == k.dim() && k.rank() == k.dim()
}

fn same_cone(a: &PolyhedralCone, b: &PolyhedralCone) -> Result<bool, CliError> {
    for g in a.generators() {
        if !b.contains_by_generators(g)? {
            return Ok(false);
        }
    }
    for g in b.generators() {
        if !a.contains_by_generators(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn label(mut r: PropertyReport, side: &str) -> PropertyReport {
    r.property = format!("{}[{side}]", r.property);
    r
}

fn pair_reports(
    pair: &dyn RetractionPair,
    q_range: &dyn ConeRegion,
    r_range: &dyn ConeRegion,
    spec: &SampleSpec,
    tol: &ToleranceConfig,
) -> Vec<PropertyReport> {
    let q = |x: &Vector| pair.q(x);
    let r = |x: &Vector| pair.r(x);
    let (q, r): (&Map<'_>, &Map<'_>) = (&q, &r);
    vec![
        label(check_retraction_axioms(q, q_range, spec, tol), "Q"),
        label(check_retraction_axioms(r, r_range, spec, tol), "R"),
        check_mutual_polarity(pair, spec, tol),
        label(check_subadditive(q, q_range, spec, tol), "Q"),
        label(check_subadditive(r, r_range, spec, tol), "R"),
        label(check_isotone(q, q_range, spec, tol), "Q"),
        label(check_isotone(r, r_range, spec, tol), "R"),
    ]
}

pub fn check(
    spec_path: &Path,
    target: CheckTarget,
    seed: u64,
    samples: usize,
    out: Option<PathBuf>,
    tol: &ToleranceConfig,
) -> CliResult {
    let spec = load(spec_path)?;
    let (name, construction, reports, required, search): (
        String,
        &str,
        Vec<PropertyReport>,
        bool,
        _,
    ) = match &target {
        CheckTarget::Cone(name) => {
            let built = spec.build(name, tol)?;
            let sample = SampleSpec::new(built.dim(), samples, seed);
            match &built {
                BuiltCone::Circular(c) => {
                    let pair = CircularProjectionPair::new(c.clone());
                    let polar = c.polar();
                    let reports = pair_reports(&pair, c, &polar, &sample, tol);
                    let search = witness_if_quiet(&reports, || {
                        find_mprj_witness(ProjectionTarget::Circular(c), &budget(&sample), tol)
                    })?;
                    (name.clone(), pair.construction(), reports, true, search)
                }
                other => {
                    let k = other.polyhedral().expect("polyhedral kind");
                    let polar = k.polar()?;
                    let pair = ProjectionPair::new(k.clone());
                    let reports = pair_reports(&pair, k, &polar, &sample, tol);
                    let required = k.is_solid() && !is_orthant_like(k);
                    let search = if required {
                        witness_if_quiet(&reports, || {
                            find_mprj_witness(
                                ProjectionTarget::Polyhedral(k),
                                &budget(&sample),
                                tol,
                            )
                        })?
                    } else {
                        None
                    };
                    (name.clone(), pair.construction(), reports, required, search)
                }
            }
        }
        CheckTarget::Pair(m, n) => {
            let (mc, nc) = (polyhedral(&spec, m, tol)?, polyhedral(&spec, n, tol)?);
            let constructed = construct(&mc, &nc)?;
            let pair = constructed.pair();
            let sample = SampleSpec::new(mc.dim(), samples, seed);
            let reports = pair_reports(pair, &mc, &nc, &sample, tol);
            let required = !is_simplicial(&mc) && same_cone(&nc, &mc.negated())?;
            let search = if required {
                witness_if_quiet(&reports, || find_halo_witness(&mc, &budget(&sample)))?
            } else {
                None
            };
            (
                format!("{m},{n}"),
                pair.construction(),
                reports,
                required,
                search,
            )
        }
    };

    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let found = search.as_ref().is_some_and(WitnessSearch::found);
    let code = if violations > 0 || found {
        2
    } else if required {
        4
    } else {
        0
    };
    let mut summary = String::new();
    for r in &reports {
        let verdict = if r.passed() { "pass" } else { "FAIL" };
        summary.push_str(&format!(
            "{verdict} {:<26} violations {:>6}/{:<6} worst {:.3e}\n",
            r.property, r.violations, r.samples, r.worst_residual
        ));
    }
    if let Some(s) = &search {
        let status = if s.found() { "found" } else { "exhausted" };
        summary.push_str(&format!(
            "witness search {}: {status} after {} samples\n",
            s.property, s.tested
        ));
    }
    let value = json!({
        "target": name,
        "construction": construction,
        "seed": seed,
        "reports": reports,
        "witness_required": required,
        "witness_search": search,
        "exit_code": code,
    });
    emit(&value, out, summary.trim_end())?;
    Ok(code)
}

fn budget(sample: &SampleSpec) -> SampleSpec {
    SampleSpec {
        samples: sample.samples.saturating_mul(10),
        ..*sample
    }
}

/// Runs the search only when sampling found no subadditivity violation.
fn witness_if_quiet(
    reports: &[PropertyReport],
    search: impl FnOnce() -> coneretract::Result<WitnessSearch>,
) -> Result<Option<WitnessSearch>, CliError> {
    let quiet = reports
        .iter()
        .filter(|r| r.property.starts_with("subadditive"))
        .all(PropertyReport::passed);
    if quiet {
        Ok(Some(search()?))
    } else {
        Ok(None)
    }
}

pub fn one_range(
    spec: &Path,
    m: &str,
    n: &str,
    raw: &[Vec<f64>],
    out: Option<PathBuf>,
    tol: &ToleranceConfig,
) -> CliResult {
    let spec = load(spec)?;
    let (mc, nc) = (polyhedral(&spec, m, tol)?, polyhedral(&spec, n, tol)?);
    let [u] = nc.generators() else {
        return Err(Error::PreconditionViolated(format!("{n} must be a single ray")).into());
    };
    if mc.dim() != u.dim() {
        return Err(CliError::usage("M and N live in different dimensions"));
    }
    let pair = build_one_range(&mc, u)?;
    let xs = points(mc.dim(), raw)?;
    let basis = pair.basis_data();
    let range = pair.range_cone_of_q()?;
    let facets: Vec<Value> = basis
        .base_d
        .facets()
        .iter()
        .map(|(normal, offset)| json!({ "normal": normal, "offset": offset }))
        .collect();
    let mut rows = Vec::new();
    for x in &xs {
        let (t, y) = pair.chart(x);
        let (qx, rx) = pair.eval_one_range(x)?;
        rows.push(json!({
            "x": x, "t": t, "y": y, "g": pair.gauge(&y), "q": pair.q_value(x), "qx": qx, "rx": rx,
        }));
    }
    let value = json!({
        "m": m,
        "n": n,
        "f": basis.functional_f,
        "u": basis.u,
        "level": basis.level,
        "base_vertices": basis.base_vertices,
        "d_vertices": basis.base_d.vertices(),
        "d_facets": facets,
        "q_range_generators": range.vrep().generators(),
        "points": rows,
    });
    emit(
        &value,
        out,
        &format!(
            "D has {} vertices and {} facets; {} points evaluated",
            basis.base_d.vertices().len(),
            facets.len(),
            xs.len()
        ),
    )?;
    Ok(0)
}

pub enum FuzzTarget {
    Projection(String),
    Opposite(String),
}

pub fn fuzz(
    spec_path: &Path,
    target: FuzzTarget,
    seed: u64,
    samples: usize,
    out: Option<PathBuf>,
    tol: &ToleranceConfig,
) -> CliResult {
    let spec = load(spec_path)?;
    let (search, required) = match &target {
        FuzzTarget::Projection(name) => match spec.build(name, tol)? {
            BuiltCone::Circular(c) => (circular_search(&c, samples, seed, tol)?, true),
            built => {
                let k = built.polyhedral().expect("polyhedral kind");
                let sample = SampleSpec::new(k.dim(), samples, seed);
                let required = k.is_solid() && !is_orthant_like(k);
                (
                    find_mprj_witness(ProjectionTarget::Polyhedral(k), &sample, tol)?,
                    required,
                )
            }
        },
        FuzzTarget::Opposite(name) => {
            let m = polyhedral(&spec, name, tol)?;
            let sample = SampleSpec::new(m.dim(), samples, seed);
            (find_halo_witness(&m, &sample)?, !is_simplicial(&m))
        }
    };
    let code = match (search.found(), required) {
        (true, _) => 2,
        (false, true) => 4,
        (false, false) => 0,
    };
    let status = if search.found() { "found" } else { "exhausted" };
    let summary = format!(
        "{}: {status} after {} of {} samples",
        search.property, search.tested, search.budget
    );
    emit(
        &json!({ "search": search, "witness_required": required }),
        out,
        &summary,
    )?;
    Ok(code)
}

fn circular_search(
    c: &CircularCone,
    samples: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> coneretract::Result<WitnessSearch> {
    find_mprj_witness(
        ProjectionTarget::Circular(c),
        &SampleSpec::new(c.dim(), samples, seed),
        tol,
    )
}
