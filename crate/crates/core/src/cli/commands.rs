use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{osp22_generators, verify_relations, Bracket, FockBasis};
use crate::hamiltonian::{build_algebraic, build_pair};
use crate::oracle::{termination_residual, validate_point, ConvergedSpectrum, SpectrumOptions, ValidationReport};
use crate::params::{block_constants, DimensionlessParams};
use crate::qes::{
    block_for, build_block, compare_with_published, det_polynomial, operator_matrix, qes_roots,
    transcription_errata, DiscrepancyReport, EnergyPolynomial, TranscriptionErrata, Verdict, IMAG_THRESHOLD,
    SERIES_TERMINATION_THRESHOLD,
};
use crate::rational::{frac, Rationalization};

use super::config::{load_params, RunConfig, SweepSpec};
use super::output::{cell, float, short, Writer};
use super::{CommonArgs, SweepArgs, VerifyArgs, EXIT_MISMATCH, EXIT_NONCONVERGED, EXIT_OK};

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("--workers: {e}")))
}

fn options(a: &CommonArgs) -> Result<SpectrumOptions> {
    let opts = SpectrumOptions { levels: a.levels, rel_tol: a.tol, n_max_cap: a.nmax_cap, ..SpectrumOptions::default() };
    opts.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(opts)
}

fn common_config(command: &'static str, a: &CommonArgs) -> Result<(RunConfig, Vec<Rationalization>)> {
    let (params, rec, source, physical) = load_params(&a.params)?;
    let config = RunConfig {
        command,
        source,
        params,
        physical,
        j_max: Some(a.jmax),
        n_max_cap: Some(a.nmax_cap),
        tol: Some(a.tol),
        levels: Some(a.levels),
        sweep: None,
        workers: a.workers,
    };
    Ok((config, rec))
}

pub const QES_ROOTS_CSV_HEADER: &str = "j,re,im,residual,series_terminating,multiplicity,consistency_residual";

fn qes_roots_csv(p: &DimensionlessParams, j_max: u32) -> Result<String> {
    let mut out = format!("{QES_ROOTS_CSV_HEADER}\n");
    for j in 0..=j_max {
        let block = block_for(j, p);
        for root in qes_roots(&block)? {
            let res = termination_residual(&block, root.value);
            out.push_str(&format!(
                "{j},{},{},{},{},{},{}\n",
                float(root.value.re),
                float(root.value.im),
                short(root.residual),
                res < SERIES_TERMINATION_THRESHOLD,
                root.multiplicity,
                short(res)
            ));
        }
    }
    Ok(out)
}

fn determinants(p: &DimensionlessParams, j_max: u32) -> Result<Vec<EnergyPolynomial>> {
    (0..=j_max).map(|j| det_polynomial(&block_for(j, p))).collect()
}

fn spectrum_and_report(a: &CommonArgs, p: &DimensionlessParams) -> Result<(ConvergedSpectrum, ValidationReport)> {
    let opts = options(a)?;
    pool(a.workers)?.install(|| validate_point(p, a.jmax, &opts))
}

fn status_of(spectrum: &ConvergedSpectrum) -> (&'static str, i32) {
    if spectrum.converged() {
        ("ok", EXIT_OK)
    } else {
        eprintln!(
            "warning: {} oracle levels did not converge by n_max = {}; they are marked converged=false",
            spectrum.nonconverged_levels(),
            spectrum.options.n_max_cap
        );
        ("non-converged", EXIT_NONCONVERGED)
    }
}

/// `spectrum`: the full six-file bundle.
pub fn run_spectrum(a: &CommonArgs) -> Result<i32> {
    let (config, rec) = common_config("spectrum", a)?;
    let p = &config.params;
    let (spectrum, report) = spectrum_and_report(a, p)?;
    let mut w = Writer::new(&a.out)?;
    w.text("spectrum.csv", &spectrum.to_csv())?;
    w.text("qes_roots.csv", &qes_roots_csv(p, a.jmax)?)?;
    w.text("validation.csv", &report.to_csv())?;
    w.json("validation.json", &report)?;
    w.json("determinants.json", &determinants(p, a.jmax)?)?;
    let (status, code) = status_of(&spectrum);
    w.finish(&config, &rec, status)?;
    Ok(code)
}

/// `validate`: only the validation report.
pub fn run_validate(a: &CommonArgs) -> Result<i32> {
    let (config, rec) = common_config("validate", a)?;
    let (spectrum, report) = spectrum_and_report(a, &config.params)?;
    let mut w = Writer::new(&a.out)?;
    w.text("validation.csv", &report.to_csv())?;
    w.json("validation.json", &report)?;
    let (status, code) = status_of(&spectrum);
    w.finish(&config, &rec, status)?;
    Ok(code)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Finding,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationLine {
    pub relation: String,
    pub bracket: Bracket,
    pub residual: f64,
    pub negated_rhs_residual: Option<f64>,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationSection {
    pub n_max: usize,
    pub margin: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub lines: Vec<RelationLine>,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleBuildPoint {
    pub params: DimensionlessParams,
    pub max_difference: f64,
    pub conserved_commutator: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleBuildSection {
    pub n_max: usize,
    pub margin: usize,
    pub tolerance: f64,
    pub points: Vec<DoubleBuildPoint>,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorSection {
    pub cases: usize,
    pub failures: Vec<String>,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminantSection {
    pub reports: Vec<DiscrepancyReport>,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptionSection {
    #[serde(flatten)]
    pub errata: TranscriptionErrata,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrySection {
    pub j_max: u32,
    pub similarity_exact: bool,
    pub determinants_equal: bool,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub params: DimensionlessParams,
    pub relations: RelationSection,
    pub double_build: DoubleBuildSection,
    pub generator_equivalence: GeneratorSection,
    pub determinants: DeterminantSection,
    pub transcription: TranscriptionSection,
    pub kappa_symmetry: SymmetrySection,
    pub overall: CheckStatus,
}

/// Seeded rational parameter triples with `0 <= r < 2`, `kappa >= 0`.
pub fn sample_params(seed: u64, count: usize) -> Vec<DimensionlessParams> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = frac(rng.random_range(0..20), 10);
            let b = frac(rng.random_range(-12..=12), 8);
            let kappa = frac(rng.random_range(0..=30), rng.random_range(1..=10));
            DimensionlessParams::new(r, b, kappa).expect("sampled inside the domain")
        })
        .collect()
}

const RELATION_N_MAX: usize = 8;
const RELATION_MARGIN: usize = 2;
const RELATION_TOL: f64 = 1e-12;
const DOUBLE_BUILD_TOL: f64 = 1e-13;

fn relation_section() -> Result<RelationSection> {
    let g = osp22_generators(FockBasis::square(RELATION_N_MAX));
    let report = verify_relations(&g, RELATION_MARGIN, RELATION_TOL)?;
    let lines: Vec<RelationLine> = report
        .relations
        .iter()
        .map(|c| RelationLine {
            relation: c.relation_name.clone(),
            bracket: c.bracket,
            residual: c.residual,
            negated_rhs_residual: c.negated_rhs_residual,
            status: if c.pass {
                "pass"
            } else if c.sign_flip_suspected() {
                "sign-typo-suspected"
            } else {
                "fail"
            },
        })
        .collect();
    let status = if report.all_pass() {
        CheckStatus::Pass
    } else if report.failures().all(|c| c.sign_flip_suspected()) {
        CheckStatus::Finding
    } else {
        CheckStatus::Mismatch
    };
    Ok(RelationSection {
        n_max: RELATION_N_MAX,
        margin: RELATION_MARGIN,
        tolerance: RELATION_TOL,
        max_residual: report.max_residual(),
        lines,
        status,
    })
}

fn double_build_section(points: &[DimensionlessParams], inject_fault: bool) -> Result<DoubleBuildSection> {
    let basis = FockBasis::square(RELATION_N_MAX);
    let points = points
        .par_iter()
        .map(|p| {
            let mut pair = build_pair(basis, p);
            if inject_fault {
                pair.algebraic = build_algebraic(pair.generators(), &p.mirrored());
            }
            Ok(DoubleBuildPoint {
                params: p.clone(),
                max_difference: pair.max_difference(RELATION_MARGIN)?,
                conserved_commutator: pair.conserved_commutator_residual(RELATION_MARGIN)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = points
        .iter()
        .all(|x| x.max_difference < DOUBLE_BUILD_TOL && x.conserved_commutator < RELATION_TOL);
    Ok(DoubleBuildSection {
        n_max: RELATION_N_MAX,
        margin: RELATION_MARGIN,
        tolerance: DOUBLE_BUILD_TOL,
        points,
        status: if ok { CheckStatus::Pass } else { CheckStatus::Mismatch },
    })
}

fn generator_section(points: &[DimensionlessParams]) -> Result<GeneratorSection> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in points {
        for j in 0..=3 {
            cases += 1;
            let bc = block_constants(j, p);
            if operator_matrix(&bc, p.kappa())?.as_slice() != build_block(&bc, p.kappa()).rows() {
                failures.push(format!("j = {j}, r = {}, b = {}, kappa = {}", p.r(), p.b(), p.kappa()));
            }
        }
    }
    let status = if failures.is_empty() { CheckStatus::Pass } else { CheckStatus::Mismatch };
    Ok(GeneratorSection { cases, failures, status })
}

fn determinant_section(p: &DimensionlessParams) -> Result<DeterminantSection> {
    let reports: Vec<DiscrepancyReport> =
        (0..=2).map(|j| compare_with_published(j, &block_constants(j, p), p.kappa())).collect::<Result<_>>()?;
    let status = reports
        .iter()
        .map(|r| match r.verdict {
            Verdict::Match => CheckStatus::Pass,
            Verdict::TypoSuspected => CheckStatus::Finding,
            Verdict::Mismatch => CheckStatus::Mismatch,
        })
        .max()
        .unwrap_or(CheckStatus::Pass);
    Ok(DeterminantSection { reports, status })
}

fn transcription_section() -> TranscriptionSection {
    let errata = transcription_errata();
    let status = if !errata.recurrence_reproduces_leading_term {
        CheckStatus::Mismatch
    } else if errata.errata.is_empty() {
        CheckStatus::Pass
    } else {
        CheckStatus::Finding
    };
    TranscriptionSection { errata, status }
}

fn symmetry_section(p: &DimensionlessParams) -> Result<SymmetrySection> {
    let j_max = 4;
    let mut similarity_exact = true;
    let mut determinants_equal = true;
    let mirrored = p.mirrored();
    for j in 0..=j_max {
        let plus = block_for(j, p);
        let minus = block_for(j, &mirrored);
        similarity_exact &= plus.alternating_similarity().as_slice() == minus.rows();
        determinants_equal &= det_polynomial(&plus)?.poly == det_polynomial(&minus)?.poly;
    }
    let status = if similarity_exact && determinants_equal { CheckStatus::Pass } else { CheckStatus::Mismatch };
    Ok(SymmetrySection { j_max, similarity_exact, determinants_equal, status })
}

/// Runs every algebraic and exact check at `p` (plus seeded extra points for
/// the double build and generator equivalence).
pub fn verification_report(p: &DimensionlessParams, inject_fault: bool) -> Result<VerificationReport> {
    let mut build_points = vec![p.clone()];
    build_points.extend(sample_params(0xB01D, 20));
    let mut gen_points = vec![p.clone()];
    gen_points.extend(sample_params(0x6E4, 9));

    let relations = relation_section()?;
    let double_build = double_build_section(&build_points, inject_fault)?;
    let generator_equivalence = generator_section(&gen_points)?;
    let determinants = determinant_section(p)?;
    let transcription = transcription_section();
    let kappa_symmetry = symmetry_section(p)?;
    let overall = [
        relations.status,
        double_build.status,
        generator_equivalence.status,
        determinants.status,
        transcription.status,
        kappa_symmetry.status,
    ]
    .into_iter()
    .max()
    .unwrap();
    Ok(VerificationReport {
        params: p.clone(),
        relations,
        double_build,
        generator_equivalence,
        determinants,
        transcription,
        kappa_symmetry,
        overall,
    })
}

/// `verify`: exit 0 when every check passes or only typo findings occur.
pub fn run_verify(a: &VerifyArgs) -> Result<i32> {
    let none_given = a.params.r.is_none() && a.params.b.is_none() && a.params.kappa.is_none() && a.params.physical.is_none();
    let (params, rec, source, physical) = if none_given {
        let p = DimensionlessParams::parse("1/2", "1/4", "3/10")?;
        (p, Vec::new(), super::config::ParamSource::Default, None)
    } else {
        load_params(&a.params)?
    };
    let report = verification_report(&params, a.inject_fault)?;
    let config = RunConfig {
        command: "verify",
        source,
        params,
        physical,
        j_max: None,
        n_max_cap: None,
        tol: None,
        levels: None,
        sweep: None,
        workers: None,
    };
    let mut w = Writer::new(&a.out)?;
    w.json("verification.json", &report)?;
    let (status, code) = match report.overall {
        CheckStatus::Pass => ("pass", EXIT_OK),
        CheckStatus::Finding => ("findings", EXIT_OK),
        CheckStatus::Mismatch => ("mismatch", EXIT_MISMATCH),
    };
    w.finish(&config, &rec, status)?;
    Ok(code)
}

pub const SWEEP_CSV_HEADER: &str = "point,axis,value,r,b,kappa,j,root_index,re,im,multiplicity,residual,series_terminating,nearest_level,gap,verdict,status";

struct PointOutcome {
    rows: Vec<String>,
    converged: bool,
}

fn sweep_point(
    index: usize,
    spec: &SweepSpec,
    value: &crate::Rational,
    base: &DimensionlessParams,
    a: &CommonArgs,
    opts: &SpectrumOptions,
) -> PointOutcome {
    let prefix = |p: Option<&DimensionlessParams>| {
        let (r, b, k) = match p {
            Some(p) => (p.r().to_string(), p.b().to_string(), p.kappa().to_string()),
            None => Default::default(),
        };
        format!("{index},{},{value},{r},{b},{k}", spec.axis.name())
    };
    let failed = |p: Option<&DimensionlessParams>, e: &Error| {
        let msg = cell(&format!("error: {e}"));
        let rows = (0..=a.jmax)
            .flat_map(|j| (0..2 * (j as usize + 1)).map(move |i| (j, i)))
            .map(|(j, i)| format!("{},{j},{i},,,,,,,,,{msg}", prefix(p)))
            .collect();
        PointOutcome { rows, converged: true }
    };
    let p = match base.with_field(spec.axis.name(), value.clone()) {
        Ok(p) => p,
        Err(e) => return failed(None, &e),
    };
    let (spectrum, report) = match validate_point(&p, a.jmax, opts) {
        Ok(x) => x,
        Err(e) => return failed(Some(&p), &e),
    };
    let mut rows = Vec::new();
    for j in 0..=a.jmax {
        let block = block_for(j, &p);
        let roots = match qes_roots(&block) {
            Ok(r) => r,
            Err(e) => return failed(Some(&p), &e),
        };
        let mut index = 0;
        for root in roots {
            let real = root.value.im.abs() <= IMAG_THRESHOLD;
            let entry = report.entries.iter().find(|e| real && e.j == j && e.root == root.value.re);
            let (terminating, nearest, gap, verdict) = match entry {
                Some(e) => (e.series_terminating, float(e.nearest_level), short(e.gap), e.verdict.as_str()),
                None => {
                    let res = termination_residual(&block, root.value);
                    (res < SERIES_TERMINATION_THRESHOLD, String::new(), String::new(), "complex")
                }
            };
            let status = if spectrum.converged() { "ok" } else { "non-converged" };
            for _ in 0..root.multiplicity {
                rows.push(format!(
                    "{},{j},{index},{},{},{},{},{terminating},{nearest},{gap},{verdict},{status}",
                    prefix(Some(&p)),
                    float(root.value.re),
                    float(root.value.im),
                    root.multiplicity,
                    short(root.residual),
                ));
                index += 1;
            }
        }
    }
    PointOutcome { rows, converged: spectrum.converged() }
}

/// `sweep`: points are independent and run on the worker pool; rows are
/// written in point order by a single writer.
pub fn run_sweep(a: &SweepArgs) -> Result<i32> {
    let spec = SweepSpec::parse(&a.sweep)?;
    let mut common = a.common.clone();
    if common.params.physical.is_none() {
        let slot = match spec.axis {
            super::SweepAxis::Kappa => &mut common.params.kappa,
            super::SweepAxis::R => &mut common.params.r,
            super::SweepAxis::B => &mut common.params.b,
        };
        slot.get_or_insert_with(|| spec.start.to_string());
    }
    let a = SweepArgs { common, sweep: a.sweep.clone() };
    let (mut config, rec) = common_config("sweep", &a.common)?;
    config.sweep = Some(spec.clone());
    let opts = options(&a.common)?;
    let values = spec.values();
    let base = config.params.clone();
    let outcomes: Vec<PointOutcome> = pool(a.common.workers)?.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, v)| sweep_point(i, &spec, v, &base, &a.common, &opts))
            .collect()
    });
    let mut csv = format!("{SWEEP_CSV_HEADER}\n");
    for row in outcomes.iter().flat_map(|o| &o.rows) {
        csv.push_str(row);
        csv.push('\n');
    }
    let mut w = Writer::new(&a.common.out)?;
    w.text("sweep.csv", &csv)?;
    let converged = outcomes.iter().all(|o| o.converged);
    let (status, code) = if converged { ("ok", EXIT_OK) } else { ("non-converged", EXIT_NONCONVERGED) };
    w.finish(&config, &rec, status)?;
    Ok(code)
}
