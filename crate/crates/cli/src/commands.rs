//! The five subcommands. Each one writes its data files and `report.json`.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use strata_lgt::costrat::{
    monotonicity_residual, stratum_projection_t, tunneling_overlap, vertex_projection, ProjectionDump,
    StratumProjection, TruncatedHilbert,
};
use strata_lgt::dynamics::{coupling_scan, hbar_scan, log_grid, HamiltonianParams, ScanRow};
use strata_lgt::liecore::{format_signs, AlgebraElement, GroupElement, Mat2, PhasePoint, Sign};
use strata_lgt::quasichar::{invariant_basis, QuasiCharacterBasis, Side, SB_CONVENTION};
use strata_lgt::strata::{
    classify_by_relations, momentum_residual, sample_level_set, sample_vertex, stabilizer_analysis, SampleMode,
};
use strata_lgt::tproc::{hereditary_and_projection, ConstraintFile, TProcReport};
use strata_lgt::{CMatrix, C64};

use crate::config::{MatrixSpec, PointSpec, RunConfig, DEFAULT_LAMBDA_GRID, DEFAULT_N_MAX, DEFAULT_S_GRID};
use crate::report::{Run, RunReport};
use crate::CliError;

fn matrix_from_spec(m: &MatrixSpec) -> Mat2 {
    Mat2::from_row_iterator(m.iter().map(|[re, im]| C64::new(*re, *im)))
}

fn matrix_to_spec(m: &Mat2) -> MatrixSpec {
    let mut out = [[0.0; 2]; 4];
    for r in 0..2 {
        for c in 0..2 {
            out[2 * r + c] = [m[(r, c)].re, m[(r, c)].im];
        }
    }
    out
}

fn point_from_spec(spec: &PointSpec, n: usize, tol: f64) -> Result<PhasePoint, CliError> {
    let point = match spec {
        PointSpec::Vertex { vertex } => PhasePoint::vertex(&strata_lgt::liecore::parse_signs(vertex)?)?,
        PointSpec::Links { links } => PhasePoint::new(
            links
                .iter()
                .map(|l| {
                    Ok((
                        GroupElement::with_tolerance(matrix_from_spec(&l.a), tol)?,
                        AlgebraElement::with_tolerance(matrix_from_spec(&l.big_a), tol)?,
                    ))
                })
                .collect::<Result<_, strata_lgt::Error>>()?,
        )?,
    };
    if point.n() != n {
        return Err(CliError::Config(format!("point has {} links but N = {n}", point.n())));
    }
    Ok(point)
}

#[derive(Serialize)]
struct LinkRecord {
    a: MatrixSpec,
    #[serde(rename = "A")]
    big_a: MatrixSpec,
}

#[derive(Serialize)]
struct VertexResidual {
    nu: String,
    residual: f64,
}

#[derive(Serialize)]
struct ClassifyRecord {
    index: usize,
    links: Vec<LinkRecord>,
    orbit_type: String,
    orbit_type_by_relations: String,
    vertex_distance: f64,
    commutator_residual: f64,
    momentum_residual: f64,
    t_residual: f64,
    vertex_residuals: Vec<VertexResidual>,
}

pub fn classify(config: &RunConfig) -> Result<RunReport, CliError> {
    let n = config.n()?;
    let tol = config.tolerances;
    let spec = &config.classify;
    let mut run = Run::new("classify", &config.output_dir(), &config.canonical_json())?;
    let mode = spec.mode.as_deref().unwrap_or("generic");
    let points: Vec<PhasePoint> = match &spec.points {
        Some(points) => points.iter().map(|p| point_from_spec(p, n, tol.unit)).collect::<Result<_, _>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            run.time("sample", || {
                (0..spec.samples)
                    .map(|_| match mode {
                        "vertex" => Ok(sample_vertex(&mut rng, n)),
                        other => Ok(sample_level_set(&mut rng, n, other.parse::<SampleMode>()?)?),
                    })
                    .collect::<Result<Vec<_>, CliError>>()
            })?
        }
    };
    let records: Vec<ClassifyRecord> = run.time("classify", || {
        points
            .iter()
            .enumerate()
            .map(|(index, p)| {
                let stab = stabilizer_analysis(p, tol.classify);
                let rel = classify_by_relations(&p.complexify(), tol.classify);
                ClassifyRecord {
                    index,
                    links: p
                        .links()
                        .iter()
                        .map(|(a, x)| LinkRecord { a: matrix_to_spec(a.matrix()), big_a: matrix_to_spec(x.matrix()) })
                        .collect(),
                    orbit_type: stab.orbit_type.to_string(),
                    orbit_type_by_relations: rel.orbit_type(n).to_string(),
                    vertex_distance: stab.vertex_distance,
                    commutator_residual: stab.commutator_residual,
                    momentum_residual: momentum_residual(p),
                    t_residual: rel.t_residual,
                    vertex_residuals: rel
                        .vertex_residuals
                        .iter()
                        .map(|(nu, r)| VertexResidual { nu: format_signs(nu), residual: *r })
                        .collect(),
                }
            })
            .collect()
    });
    let mut counts = serde_json::Map::new();
    let mut disagreements = 0;
    for r in &records {
        let entry = counts.entry(r.orbit_type.clone()).or_insert(json!(0));
        *entry = json!(entry.as_u64().unwrap_or(0) + 1);
        if r.orbit_type != r.orbit_type_by_relations {
            disagreements += 1;
        }
    }
    if disagreements > 0 {
        run.warn(format!("{disagreements} points classify differently by stabilizer and by relations"));
    }
    let mut lines = Vec::new();
    for r in &records {
        serde_json::to_writer(&mut lines, r).map_err(|e| CliError::Output(e.to_string()))?;
        lines.push(b'\n');
    }
    run.emit("classify.jsonl", &lines)?;
    let source = if spec.points.is_some() { "explicit" } else { mode };
    run.set_summary(json!({
        "N": n,
        "points": records.len(),
        "source": source,
        "counts": counts,
        "disagreements": disagreements,
    }));
    run.finish()
}

pub fn tproc(config: &RunConfig) -> Result<RunReport, CliError> {
    let spec = config.tproc.as_ref().ok_or_else(|| CliError::Config("missing \"tproc\" section".into()))?;
    let text = std::fs::read_to_string(&spec.constraints)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", spec.constraints.display())))?;
    let file: ConstraintFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", spec.constraints.display())))?;
    let mut run = Run::new("tproc", &config.output_dir(), &config.canonical_json())?;
    let system = file.to_system(config.tolerances.unit)?;
    let result = run.time("tproc", || hereditary_and_projection(&system, config.tolerances.rank));
    let report = TProcReport::from_result(&result);
    run.emit_json("tproc.json", &report)?;
    run.set_summary(json!({
        "blocks": report.blocks,
        "constraints": file.constraints.len(),
        "first_class": report.first_class,
        "dims": report.dims,
        "dirac_vectors": report.dirac_vectors.len(),
    }));
    run.finish()
}

fn basis_matches(b: &QuasiCharacterBasis, n: usize, jmax_twice: u32, hbar: f64, beta: f64) -> bool {
    b.n() == n
        && b.jmax_twice() == jmax_twice
        && b.hbar() == hbar
        && b.beta() == beta
        && b.side() == Side::SquareIntegrable
}

/// Loads the cached L² basis when its header matches, otherwise builds it.
/// The basis is always emitted as `basis.bin` in the output directory.
fn obtain_basis(run: &mut Run, config: &RunConfig) -> Result<(QuasiCharacterBasis, bool), CliError> {
    let n = config.n()?;
    let jmax = config.j_max()?;
    let cache = config.basis_cache();
    let cached = if cache.exists() {
        match QuasiCharacterBasis::load(&cache) {
            Ok(b) if basis_matches(&b, n, jmax.0, config.hbar, config.beta) => Some(b),
            Ok(_) => {
                log::info!("basis cache {} does not match the configuration; rebuilding", cache.display());
                None
            }
            Err(e) => {
                run.warn(format!("ignoring unreadable basis cache {}: {e}", cache.display()));
                None
            }
        }
    } else {
        None
    };
    let from_cache = cached.is_some();
    let basis = match cached {
        Some(b) => b,
        None => run.time("basis", || invariant_basis(n, jmax.0, config.hbar, config.beta))?,
    };
    let mut bytes = Vec::new();
    basis.write_to(&mut bytes)?;
    run.emit("basis.bin", &bytes)?;
    if !from_cache && cache != run.dir().join("basis.bin") {
        if let Some(parent) = cache.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Output(format!("{}: {e}", parent.display())))?;
        }
        std::fs::write(&cache, &bytes).map_err(|e| CliError::Output(format!("{}: {e}", cache.display())))?;
    }
    Ok((basis, from_cache))
}

pub fn basis(config: &RunConfig) -> Result<RunReport, CliError> {
    let mut run = Run::new("basis", &config.output_dir(), &config.canonical_json())?;
    let (basis, from_cache) = obtain_basis(&mut run, config)?;
    let gram_deviation = if config.basis.check_gram {
        let gram = run.time("gram", || basis.l2_gram_by_quadrature())?;
        let dev = (gram - CMatrix::identity(basis.len(), basis.len())).norm();
        if dev > config.tolerances.gram {
            return Err(CliError::Numeric(format!(
                "Gram matrix deviates from the identity by {dev:.3e} (tolerance {:.1e})",
                config.tolerances.gram
            )));
        }
        Some(dev)
    } else {
        None
    };
    let blocks: Vec<_> = basis
        .blocks()
        .iter()
        .map(|(spins, range)| json!({ "twice_spins": spins.twice(), "count": range.len() }))
        .collect();
    let summary = json!({
        "N": basis.n(),
        "j_max": config.j_max()?,
        "hbar": basis.hbar(),
        "beta": basis.beta(),
        "s": basis.s(),
        "convention": SB_CONVENTION,
        "dim": basis.len(),
        "blocks": blocks,
        "gram_deviation": gram_deviation,
    });
    run.emit_json("basis.json", &summary)?;
    run.set_summary(json!({ "dim": basis.len(), "from_cache": from_cache, "gram_deviation": gram_deviation }));
    run.finish()
}

fn sign_file_label(nu: &[Sign]) -> String {
    nu.iter().map(|s| if *s == Sign::Plus { 'p' } else { 'm' }).collect()
}

#[derive(Serialize)]
struct OverlapRecord {
    nu: String,
    nu2: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct MonotonicityRecord {
    inner: String,
    outer: String,
    residual: f64,
}

fn note_exclusions(run: &mut Run, proj: &StratumProjection) {
    let report = &proj.truncation_report;
    if !report.excluded.is_empty() {
        let worst = report.excluded.iter().map(|e| e.relative_loss).fold(0.0, f64::max);
        run.warn(format!(
            "{} stratum: {} constraint products excluded for truncation loss above tolerance (largest {worst:.3e})",
            proj.stratum,
            report.excluded.len()
        ));
    }
}

pub fn costrat(config: &RunConfig) -> Result<RunReport, CliError> {
    let tol = config.tolerances;
    let mut run = Run::new("costrat", &config.output_dir(), &config.canonical_json())?;
    let (basis, from_cache) = obtain_basis(&mut run, config)?;
    let h = TruncatedHilbert::new(&basis);
    let n = h.n();
    let signs = Sign::all_sequences(n);

    let mut vertices = Vec::new();
    for nu in &signs {
        let proj = run.time("vertex", || vertex_projection(&h, nu))?;
        run.emit_json(
            &format!("projections/vertex_{}.json", sign_file_label(nu)),
            &ProjectionDump::new(&proj, tol.rank),
        )?;
        vertices.push(proj);
    }
    let torus = if n >= 2 {
        let proj = run.time("torus", || stratum_projection_t(&h, tol.rank, tol.loss))?;
        note_exclusions(&mut run, &proj);
        run.emit_json("projections/torus.json", &ProjectionDump::new(&proj, tol.rank))?;
        Some(proj)
    } else {
        None
    };

    let mut overlaps = Vec::new();
    for a in &signs {
        for b in &signs {
            let z = tunneling_overlap(&h, a, b)?;
            overlaps.push(OverlapRecord { nu: format_signs(a), nu2: format_signs(b), re: z.re, im: z.im });
        }
    }
    run.emit_csv("overlaps.csv", &overlaps)?;

    let identity = CMatrix::identity(h.dim(), h.dim());
    let mut monotonicity = Vec::new();
    for v in &vertices {
        if let Some(t) = &torus {
            monotonicity.push(MonotonicityRecord {
                inner: v.stratum.to_string(),
                outer: t.stratum.to_string(),
                residual: monotonicity_residual(&t.p, &v.p),
            });
        }
        monotonicity.push(MonotonicityRecord {
            inner: v.stratum.to_string(),
            outer: "principal".into(),
            residual: monotonicity_residual(&identity, &v.p),
        });
    }
    if let Some(t) = &torus {
        monotonicity.push(MonotonicityRecord {
            inner: t.stratum.to_string(),
            outer: "principal".into(),
            residual: monotonicity_residual(&identity, &t.p),
        });
    }
    run.emit_csv("monotonicity.csv", &monotonicity)?;

    let max_residual = monotonicity.iter().map(|m| m.residual).fold(0.0, f64::max);
    let max_off_diagonal =
        overlaps.iter().filter(|o| o.nu != o.nu2).map(|o| C64::new(o.re, o.im).norm()).fold(0.0, f64::max);
    let summary = json!({
        "N": n,
        "j_max": config.j_max()?,
        "s": basis.s(),
        "dim": h.dim(),
        "vertex_ranks": vertices.iter().map(|v| json!({ "stratum": v.stratum.to_string(), "rank": v.rank(tol.rank), "defect": v.defect() })).collect::<Vec<_>>(),
        "torus": torus.as_ref().map(|t| json!({
            "rank": t.rank(tol.rank),
            "defect": t.defect(),
            "truncation_report": t.truncation_report,
        })),
        "max_vertex_overlap": max_off_diagonal,
        "max_monotonicity_residual": max_residual,
    });
    run.emit_json("costrat.json", &summary)?;
    let mut summary = summary;
    summary["basis_from_cache"] = json!(from_cache);
    run.set_summary(summary);
    run.finish()
}

pub fn spectrum(config: &RunConfig) -> Result<RunReport, CliError> {
    let n = config.n.unwrap_or(1);
    if n != 1 {
        return Err(CliError::Unsupported(format!(
            "the spectrum scan is implemented for a single plaquette (N = 1), got N = {n}"
        )));
    }
    let delta = config.delta.ok_or_else(|| CliError::Config("spectrum needs \"delta\"".into()))?;
    let spec = &config.spectrum;
    let n_max = spec.n_max.unwrap_or(DEFAULT_N_MAX);
    let lambdas = match (&spec.lambdas, &spec.lambda_grid, config.lambda) {
        (Some(l), _, _) => l.clone(),
        (None, Some(g), _) => grid(g.min, g.max, g.points)?,
        (None, None, Some(l)) => vec![l],
        (None, None, None) => grid(DEFAULT_LAMBDA_GRID.min, DEFAULT_LAMBDA_GRID.max, DEFAULT_LAMBDA_GRID.points)?,
    };
    if lambdas.is_empty() || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(CliError::Config(format!("couplings must be positive, got {lambdas:?}")));
    }
    let s_grid = spec.s_grid.clone().unwrap_or_else(|| DEFAULT_S_GRID.to_vec());
    if s_grid.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(CliError::Config(format!("s values must be positive, got {s_grid:?}")));
    }
    let base = HamiltonianParams { lambda: lambdas[0], delta, hbar: config.hbar, beta: config.beta, n_max };
    base.validate()?;

    let mut run = Run::new("spectrum", &config.output_dir(), &config.canonical_json())?;
    let rows: Vec<ScanRow> = run.time("coupling_scan", || coupling_scan(&base, &lambdas))?;
    let conv_tol = config.tolerances.convergence;
    for r in rows.iter().filter(|r| !r.converged(conv_tol)) {
        run.warn(format!(
            "lambda = {}: ground energy shift {:.3e} between n_max {} and {} exceeds {conv_tol:.1e}",
            r.lambda,
            r.convergence_shift,
            r.n_max,
            r.n_max.saturating_sub(strata_lgt::dynamics::CONVERGENCE_STEP)
        ));
    }
    run.emit_csv("spectrum.csv", &rows)?;
    let overlap_rows = run.time("overlap_scan", || hbar_scan(&s_grid, n_max))?;
    run.emit_csv("overlap_scan.csv", &overlap_rows)?;

    let converged: Vec<&ScanRow> = rows.iter().filter(|r| r.converged(conv_tol)).collect();
    let peak = converged.iter().max_by(|a, b| a.localization_plus.total_cmp(&b.localization_plus));
    run.set_summary(json!({
        "points": rows.len(),
        "converged": converged.len(),
        "s": base.s(),
        "n_max": n_max,
        "peak_localization_plus": peak.map(|r| r.localization_plus),
        "peak_lambda": peak.map(|r| r.lambda),
        "overlap": rows[0].overlap,
        "overlap_scan": overlap_rows.iter().map(|r| json!({ "s": r.s, "overlap": r.overlap })).collect::<Vec<_>>(),
    }));
    run.finish()
}

fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(min > 0.0 && max >= min && points > 0) {
        return Err(CliError::Config(format!("bad coupling grid {min}..{max} with {points} points")));
    }
    Ok(log_grid(min, max, points))
}
