//! Brute-force diagonalisation of the truncated Hamiltonian, sector by
//! sector, and the harness that matches QES roots against it.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{BasisState, Spin};
use crate::hamiltonian::KValue;
use crate::params::DimensionlessParams;
use crate::qes::{block_for, null_spinor, qes_roots, QesBlock, IMAG_THRESHOLD, SERIES_TERMINATION_THRESHOLD};

/// Basis of sector `m`: spin-up states with `n₁ − n₂ = m` and spin-down
/// states with `n₁ − n₂ = m + 1`, both quanta at most `n_max`. Ordered by `n₂`,
/// up before down.
pub fn sector_states(m: i64, n_max: usize) -> Vec<BasisState> {
    let mut out = Vec::new();
    for n2 in 0..=n_max as i64 {
        for (spin, shift) in [(Spin::Up, 0), (Spin::Down, 1)] {
            let n1 = n2 + m + shift;
            if (0..=n_max as i64).contains(&n1) {
                out.push(BasisState::new(n1 as usize, n2 as usize, spin));
            }
        }
    }
    out
}

/// Real symmetric Hamiltonian of sector `m` at truncation `n_max`, built
/// straight from the matrix elements:
/// diagonal `n₁ + n₂ + 1 + (r/2)(n₁ − n₂) + b σ₀`, and from `|n₁, n₂, ↓⟩`
/// the couplings `−κ√(n₂+1)` to `|n₁, n₂+1, ↑⟩` and `κ√n₁` to `|n₁−1, n₂, ↑⟩`.
pub fn sector_hamiltonian(p: &DimensionlessParams, m: i64, n_max: usize) -> DMatrix<f64> {
    let states = sector_states(m, n_max);
    let index: HashMap<BasisState, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let (r, b, kappa) = (p.r_f64(), p.b_f64(), p.kappa_f64());
    let d = states.len();
    let mut h = DMatrix::zeros(d, d);
    for (i, s) in states.iter().enumerate() {
        let (n1, n2) = (s.n1 as f64, s.n2 as f64);
        h[(i, i)] = n1 + n2 + 1.0 + 0.5 * r * (n1 - n2) + b * s.spin.sigma0() as f64;
        if s.spin == Spin::Down {
            let targets = [
                (s.n1 as i64, s.n2 as i64 + 1, -kappa * (n2 + 1.0).sqrt()),
                (s.n1 as i64 - 1, s.n2 as i64, kappa * n1.sqrt()),
            ];
            for (t1, t2, amp) in targets {
                if t1 < 0 {
                    continue;
                }
                if let Some(&k) = index.get(&BasisState::new(t1 as usize, t2 as usize, Spin::Up)) {
                    h[(k, i)] += amp;
                    h[(i, k)] += amp;
                }
            }
        }
    }
    h
}

/// Sorted eigenvalues of one sector block.
pub fn sector_eigenvalues(p: &DimensionlessParams, m: i64, n_max: usize) -> Vec<f64> {
    let h = sector_hamiltonian(p, m, n_max);
    if h.is_empty() {
        return Vec::new();
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Which sectors to keep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SectorSelection {
    /// Offsets `−radius − 1 ..= radius`, i.e. `|K| <= radius + 1/2`.
    Radius { radius: usize },
    /// Grow the radius until the ground level of both boundary sectors lies
    /// above the energy ceiling.
    Automatic { max_radius: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumOptions {
    /// Minimum number of tracked levels per sector.
    pub levels: usize,
    pub rel_tol: f64,
    pub n_max_start: usize,
    pub n_max_cap: usize,
    pub sectors: SectorSelection,
    /// Also track every level at or below this energy, plus the first above.
    pub energy_ceiling: Option<f64>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            levels: 10,
            rel_tol: 1e-8,
            n_max_start: 10,
            n_max_cap: 160,
            sectors: SectorSelection::Radius { radius: 6 },
            energy_ceiling: None,
        }
    }
}

impl SpectrumOptions {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::InvalidArgument("levels must be >= 1".into()));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("rel_tol must be > 0, got {}", self.rel_tol)));
        }
        if self.n_max_start == 0 || self.n_max_cap < self.n_max_start {
            return Err(Error::InvalidArgument(format!(
                "truncation schedule {}..{} is empty",
                self.n_max_start, self.n_max_cap
            )));
        }
        if matches!(self.sectors, SectorSelection::Automatic { .. }) && self.energy_ceiling.is_none() {
            return Err(Error::InvalidArgument("automatic sector selection needs an energy ceiling".into()));
        }
        Ok(())
    }

    /// Doubling schedule from `n_max_start`, ending exactly at the cap.
    pub fn schedule(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut n = self.n_max_start;
        while n < self.n_max_cap {
            out.push(n);
            n *= 2;
        }
        out.push(self.n_max_cap);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub index: usize,
    pub energy: f64,
    /// `|ΔE|` between the two largest truncations; `None` when the level
    /// did not exist at the smaller one.
    pub change: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorSpectrum {
    pub k: KValue,
    pub offset: i64,
    pub truncations: Vec<usize>,
    pub n_max: usize,
    pub dimension: usize,
    pub levels: Vec<Level>,
    /// First eigenvalue above the tracked ones at the final truncation.
    pub next_untracked: Option<f64>,
}

impl SectorSpectrum {
    pub fn converged(&self) -> bool {
        self.levels.iter().all(|l| l.converged)
    }

    pub fn ground(&self) -> Option<f64> {
        self.levels.first().map(|l| l.energy)
    }

    /// Energy below which every level of this sector is tracked.
    pub fn covered_up_to(&self) -> f64 {
        self.next_untracked.unwrap_or(f64::INFINITY)
    }
}

fn tracked_count(ev: &[f64], opts: &SpectrumOptions) -> usize {
    let by_energy = opts
        .energy_ceiling
        .map(|c| ev.iter().take_while(|&&e| e <= c).count() + 1)
        .unwrap_or(0);
    opts.levels.max(by_energy).min(ev.len())
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

/// Runs the doubling schedule on one sector until its tracked levels settle.
pub fn converge_sector(p: &DimensionlessParams, m: i64, opts: &SpectrumOptions) -> SectorSpectrum {
    let min_n = m.unsigned_abs() as usize + 1;
    let schedule: Vec<usize> = opts.schedule().into_iter().filter(|&n| n >= min_n).collect();
    let schedule = if schedule.is_empty() { vec![opts.n_max_cap.max(min_n)] } else { schedule };

    let mut truncations = vec![schedule[0]];
    let mut history = vec![sector_eigenvalues(p, m, schedule[0])];
    for &n in &schedule[1..] {
        let cur = sector_eigenvalues(p, m, n);
        let prev = history.last().unwrap();
        truncations.push(n);
        let k = tracked_count(&cur, opts);
        let settled = k > 0 && k <= prev.len() && (0..k).all(|i| relative_change(cur[i], prev[i]) < opts.rel_tol);
        history.push(cur);
        if settled {
            break;
        }
    }
    let cur = history.pop().unwrap();
    let prev = history.pop();
    let k = tracked_count(&cur, opts);
    let levels = (0..k)
        .map(|i| {
            let before = prev.as_ref().and_then(|v| v.get(i).copied());
            let change = before.map(|e| (cur[i] - e).abs());
            let converged = before.is_some_and(|e| relative_change(cur[i], e) < opts.rel_tol);
            Level { index: i, energy: cur[i], change, converged }
        })
        .collect();
    SectorSpectrum {
        k: KValue::from_offset(m),
        offset: m,
        n_max: *truncations.last().unwrap(),
        dimension: cur.len(),
        next_untracked: cur.get(k).copied(),
        truncations,
        levels,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergedSpectrum {
    pub params: DimensionlessParams,
    pub options: SpectrumOptions,
    pub sector_radius: usize,
    /// False when automatic selection hit its radius cap.
    pub coverage_complete: bool,
    pub sectors: Vec<SectorSpectrum>,
}

impl ConvergedSpectrum {
    pub fn converged(&self) -> bool {
        self.sectors.iter().all(SectorSpectrum::converged)
    }

    pub fn nonconverged_levels(&self) -> usize {
        self.sectors.iter().flat_map(|s| &s.levels).filter(|l| !l.converged).count()
    }

    /// Every level below this energy is tracked in some retained sector.
    pub fn covered_energy(&self) -> f64 {
        let mut covered = self.sectors.iter().map(SectorSpectrum::covered_up_to).fold(f64::INFINITY, f64::min);
        if !self.coverage_complete {
            let boundary = self.sectors.iter().filter(|s| is_boundary(s.offset, self.sector_radius));
            covered = boundary.filter_map(SectorSpectrum::ground).fold(covered, f64::min);
        }
        covered
    }

    /// All tracked levels, sorted by energy.
    pub fn all_levels(&self) -> Vec<(&SectorSpectrum, &Level)> {
        let mut v: Vec<_> = self.sectors.iter().flat_map(|s| s.levels.iter().map(move |l| (s, l))).collect();
        v.sort_by(|a, b| a.1.energy.total_cmp(&b.1.energy).then(a.0.offset.cmp(&b.0.offset)));
        v
    }

    pub fn nearest_level(&self, energy: f64) -> Option<(&SectorSpectrum, &Level)> {
        self.sectors
            .iter()
            .flat_map(|s| s.levels.iter().map(move |l| (s, l)))
            .min_by(|a, b| (a.1.energy - energy).abs().total_cmp(&(b.1.energy - energy).abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,level,energy,change,converged,n_max\n");
        for s in &self.sectors {
            for l in &s.levels {
                let change = l.change.map(|c| format!("{c:.6e}")).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{:.15e},{},{},{}\n",
                    s.k.as_f64(),
                    l.index,
                    l.energy,
                    change,
                    l.converged,
                    s.n_max
                ));
            }
        }
        out
    }
}

fn is_boundary(m: i64, radius: usize) -> bool {
    m == radius as i64 || m == -(radius as i64) - 1
}

fn offsets(radius: usize) -> impl Iterator<Item = i64> {
    -(radius as i64) - 1..=radius as i64
}

/// Converged spectrum with the default options but the given level count
/// and tolerance.
pub fn converged_spectrum(p: &DimensionlessParams, levels: usize, rel_tol: f64) -> Result<ConvergedSpectrum> {
    converged_spectrum_with(p, &SpectrumOptions { levels, rel_tol, ..SpectrumOptions::default() })
}

pub fn converged_spectrum_with(p: &DimensionlessParams, opts: &SpectrumOptions) -> Result<ConvergedSpectrum> {
    opts.validate()?;
    let run = |ms: Vec<i64>| -> Vec<SectorSpectrum> { ms.into_par_iter().map(|m| converge_sector(p, m, opts)).collect() };
    let (radius, coverage_complete, mut sectors) = match opts.sectors {
        SectorSelection::Radius { radius } => (radius, true, run(offsets(radius).collect())),
        SectorSelection::Automatic { max_radius } => {
            let ceiling = opts.energy_ceiling.expect("checked in validate");
            let mut radius = 0;
            let mut sectors = run(offsets(0).collect());
            loop {
                let above = |s: &SectorSpectrum| s.ground().is_none_or(|g| g > ceiling);
                let done = sectors.iter().filter(|s| is_boundary(s.offset, radius)).all(above);
                if done || radius >= max_radius {
                    break (radius, done, sectors);
                }
                radius += 1;
                sectors.extend(run(vec![-(radius as i64) - 1, radius as i64]));
            }
        }
    };
    sectors.sort_by_key(|s| s.offset);
    Ok(ConvergedSpectrum {
        params: p.clone(),
        options: opts.clone(),
        sector_radius: radius,
        coverage_complete,
        sectors,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchVerdict {
    Confirmed,
    Unconfirmed,
    OutOfRange,
}

impl MatchVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchVerdict::Confirmed => "confirmed",
            MatchVerdict::Unconfirmed => "unconfirmed",
            MatchVerdict::OutOfRange => "out-of-range",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub j: u32,
    pub root: f64,
    pub multiplicity: usize,
    pub polynomial_residual: f64,
    pub nearest_level: f64,
    pub nearest_sector: KValue,
    pub nearest_level_converged: bool,
    pub gap: f64,
    pub tolerance: f64,
    pub consistency_residual: f64,
    pub series_terminating: bool,
    pub verdict: MatchVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexRoot {
    pub j: u32,
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

/// Counts of verdict against series termination.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossTab {
    pub confirmed_terminating: usize,
    pub confirmed_nonterminating: usize,
    pub unconfirmed_terminating: usize,
    pub unconfirmed_nonterminating: usize,
    pub out_of_range_terminating: usize,
    pub out_of_range_nonterminating: usize,
}

impl CrossTab {
    fn add(&mut self, verdict: MatchVerdict, terminating: bool) {
        let slot = match (verdict, terminating) {
            (MatchVerdict::Confirmed, true) => &mut self.confirmed_terminating,
            (MatchVerdict::Confirmed, false) => &mut self.confirmed_nonterminating,
            (MatchVerdict::Unconfirmed, true) => &mut self.unconfirmed_terminating,
            (MatchVerdict::Unconfirmed, false) => &mut self.unconfirmed_nonterminating,
            (MatchVerdict::OutOfRange, true) => &mut self.out_of_range_terminating,
            (MatchVerdict::OutOfRange, false) => &mut self.out_of_range_nonterminating,
        };
        *slot += 1;
    }

    pub fn merge(&mut self, other: &CrossTab) {
        self.confirmed_terminating += other.confirmed_terminating;
        self.confirmed_nonterminating += other.confirmed_nonterminating;
        self.unconfirmed_terminating += other.unconfirmed_terminating;
        self.unconfirmed_nonterminating += other.unconfirmed_nonterminating;
        self.out_of_range_terminating += other.out_of_range_terminating;
        self.out_of_range_nonterminating += other.out_of_range_nonterminating;
    }

    pub fn total(&self) -> usize {
        self.confirmed_terminating
            + self.confirmed_nonterminating
            + self.unconfirmed_terminating
            + self.unconfirmed_nonterminating
            + self.out_of_range_terminating
            + self.out_of_range_nonterminating
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub real_roots: usize,
    pub complex_roots: usize,
    pub confirmed: usize,
    pub unconfirmed: usize,
    pub out_of_range: usize,
    pub max_confirmed_gap: Option<f64>,
    pub min_unconfirmed_gap: Option<f64>,
    pub spectrum_converged: bool,
    pub covered_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub params: DimensionlessParams,
    pub j_max: u32,
    pub entries: Vec<ValidationEntry>,
    pub complex_roots: Vec<ComplexRoot>,
    pub crosstab: CrossTab,
    pub summary: ValidationSummary,
}

pub const VALIDATION_CSV_HEADER: &str =
    "j,root_re,root_im,nearest_level,gap,consistency_residual,verdict,series_terminating,nearest_sector";

impl ValidationReport {
    pub fn csv_rows(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| {
                format!(
                    "{},{:.15e},{:.15e},{:.15e},{:.6e},{:.6e},{},{},{}",
                    e.j,
                    e.root,
                    0.0,
                    e.nearest_level,
                    e.gap,
                    e.consistency_residual,
                    e.verdict.as_str(),
                    e.series_terminating,
                    e.nearest_sector.as_f64()
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{VALIDATION_CSV_HEADER}\n");
        for row in self.csv_rows() {
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Minimum consistency residual over the null directions at `energy`.
pub fn termination_residual(block: &QesBlock, energy: Complex64) -> f64 {
    null_spinor(block, energy)
        .iter()
        .map(|n| n.consistency_residual)
        .fold(f64::INFINITY, f64::min)
}

/// Largest real QES root over `j <= j_max`, if any.
pub fn max_real_root(p: &DimensionlessParams, j_max: u32) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for j in 0..=j_max {
        for r in qes_roots(&block_for(j, p))? {
            if r.value.im.abs() <= IMAG_THRESHOLD {
                best = Some(best.map_or(r.value.re, |b| b.max(r.value.re)));
            }
        }
    }
    Ok(best)
}

/// Matches every real root of the blocks `j <= j_max` against `spectrum`.
pub fn validate(p: &DimensionlessParams, j_max: u32, spectrum: &ConvergedSpectrum) -> Result<ValidationReport> {
    if spectrum.params != *p {
        return Err(Error::InvalidArgument("spectrum was computed for different parameters".into()));
    }
    let covered = spectrum.covered_energy();
    let mut entries = Vec::new();
    let mut complex_roots = Vec::new();
    let mut crosstab = CrossTab::default();
    for j in 0..=j_max {
        let block = block_for(j, p);
        for root in qes_roots(&block)? {
            if root.value.im.abs() > IMAG_THRESHOLD {
                complex_roots.push(ComplexRoot { j, re: root.value.re, im: root.value.im, multiplicity: root.multiplicity });
                continue;
            }
            let e = root.value.re;
            let (sector, level) = spectrum
                .nearest_level(e)
                .ok_or_else(|| Error::Consistency("spectrum has no levels".into()))?;
            let gap = (level.energy - e).abs();
            let tolerance = 1e-6_f64.max(10.0 * level.change.unwrap_or(f64::INFINITY));
            let residual = termination_residual(&block, root.value);
            let terminating = residual < SERIES_TERMINATION_THRESHOLD;
            let verdict = if e > covered {
                MatchVerdict::OutOfRange
            } else if gap < tolerance {
                MatchVerdict::Confirmed
            } else {
                MatchVerdict::Unconfirmed
            };
            crosstab.add(verdict, terminating);
            entries.push(ValidationEntry {
                j,
                root: e,
                multiplicity: root.multiplicity,
                polynomial_residual: root.residual,
                nearest_level: level.energy,
                nearest_sector: sector.k,
                nearest_level_converged: level.converged,
                gap,
                tolerance,
                consistency_residual: residual,
                series_terminating: terminating,
                verdict,
            });
        }
    }
    let count = |v: MatchVerdict| entries.iter().filter(|e| e.verdict == v).count();
    let gaps = |v: MatchVerdict| entries.iter().filter(move |e| e.verdict == v).map(|e| e.gap);
    let summary = ValidationSummary {
        real_roots: entries.len(),
        complex_roots: complex_roots.len(),
        confirmed: count(MatchVerdict::Confirmed),
        unconfirmed: count(MatchVerdict::Unconfirmed),
        out_of_range: count(MatchVerdict::OutOfRange),
        max_confirmed_gap: gaps(MatchVerdict::Confirmed).reduce(f64::max),
        min_unconfirmed_gap: gaps(MatchVerdict::Unconfirmed).reduce(f64::min),
        spectrum_converged: spectrum.converged(),
        covered_energy: covered,
    };
    Ok(ValidationReport { params: p.clone(), j_max, entries, complex_roots, crosstab, summary })
}

/// Options that make a spectrum cover every real root of `j <= j_max`:
/// energy ceiling one unit above the largest root, automatic sector range.
pub fn validation_options(p: &DimensionlessParams, j_max: u32, base: &SpectrumOptions) -> Result<SpectrumOptions> {
    let ceiling = max_real_root(p, j_max)?.unwrap_or(0.0) + 1.0;
    Ok(SpectrumOptions {
        energy_ceiling: Some(ceiling),
        sectors: SectorSelection::Automatic { max_radius: 64 },
        ..base.clone()
    })
}

/// Spectrum plus validation in one call.
pub fn validate_point(
    p: &DimensionlessParams,
    j_max: u32,
    base: &SpectrumOptions,
) -> Result<(ConvergedSpectrum, ValidationReport)> {
    let opts = validation_options(p, j_max, base)?;
    let spectrum = converged_spectrum_with(p, &opts)?;
    let report = validate(p, j_max, &spectrum)?;
    Ok((spectrum, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::decoupled_energy;

    fn params(r: &str, b: &str, k: &str) -> DimensionlessParams {
        DimensionlessParams::parse(r, b, k).unwrap()
    }

    #[test]
    fn sector_states_have_common_k() {
        for m in -4..4 {
            let states = sector_states(m, 6);
            assert!(!states.is_empty());
            assert!(states.iter().all(|s| KValue::of(*s) == KValue::from_offset(m)));
        }
        assert_eq!(sector_states(0, 0), vec![BasisState::new(0, 0, Spin::Up)]);
        assert_eq!(sector_states(-1, 0), vec![BasisState::new(0, 0, Spin::Down)]);
    }

    #[test]
    fn sector_blocks_are_symmetric() {
        let p = params("1/3", "1/5", "7/10");
        for m in -3..3 {
            let h = sector_hamiltonian(&p, m, 8);
            assert_eq!(h, h.transpose());
        }
    }

    #[test]
    fn decoupled_sector_is_closed_form() {
        let p = params("2/3", "1/4", "0");
        for m in -3..3 {
            let mut expected: Vec<f64> = sector_states(m, 12).iter().map(|s| decoupled_energy(*s, 2.0 / 3.0, 0.25)).collect();
            expected.sort_by(f64::total_cmp);
            let got = sector_eigenvalues(&p, m, 12);
            for (a, b) in got.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_level_of_free_oscillator() {
        let s = converged_spectrum(&params("0", "0", "0"), 3, 1e-10).unwrap();
        assert!(s.converged());
        let levels = s.all_levels();
        assert_eq!(levels[0].1.energy, 1.0);
        let twos = levels.iter().filter(|(_, l)| (l.energy - 2.0).abs() < 1e-12).count();
        assert_eq!(twos, 4);
    }

    #[test]
    fn schedule_doubles_to_cap() {
        let o = SpectrumOptions::default();
        assert_eq!(o.schedule(), vec![10, 20, 40, 80, 160]);
        let o = SpectrumOptions { n_max_cap: 50, ..o };
        assert_eq!(o.schedule(), vec![10, 20, 40, 50]);
    }

    #[test]
    fn cap_without_convergence_is_marked() {
        let opts = SpectrumOptions { levels: 5, rel_tol: 1e-15, n_max_cap: 20, ..SpectrumOptions::default() };
        let s = converged_spectrum_with(&params("1/2", "0", "2"), &opts).unwrap();
        assert!(!s.converged());
        assert!(s.nonconverged_levels() > 0);
    }

    #[test]
    fn j0_coupled_root_zero_is_reported() {
        let p = params("0", "0", "1/2");
        let (_, report) = validate_point(&p, 0, &SpectrumOptions::default()).unwrap();
        let roots: Vec<f64> = report.entries.iter().map(|e| e.root).collect();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].abs() < 1e-12 && (roots[1] - 1.0).abs() < 1e-12);
        assert!(report.entries[0].gap > 1e-3);
        assert_eq!(report.entries[0].verdict, MatchVerdict::Unconfirmed);
        assert_eq!(report.crosstab.total(), 2);
    }
}
