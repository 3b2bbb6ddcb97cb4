//! Randomized optimization campaigns and their statistics.
//!
//! A campaign fixes `(g, d)`, a range of levels, and a functional family,
//! then repeatedly minimizes random functionals over random (or one
//! shared) bounded irreducible pencils and classifies every optimizer.
//! Each attempted run yields exactly one record, including the
//! ill-conditioned ones, so discard rates stay visible. Tallies reproduce
//! the headline ratios: the share of irreducible extreme optimizers that
//! are free extreme, the kernel-dimension histogram conditioned on
//! irreducible optimizers, and the reducible proportion `p_n`. Histograms
//! are fit by Gaussian densities under plain or weighted least squares,
//! and `p_n` series by a decaying exponential.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extremality::{self, ExtremeVerdict, Policies};
use crate::pencil::{
    self, FunctionalKind, LinearPencil, PencilGenConfig,
};
use crate::solver::{self, SolveStatus};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("invalid campaign config: {0}")]
    BadConfig(&'static str),
    #[error("fixed-pencil generation failed: {0}")]
    Generation(#[from] pencil::PencilError),
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("histogram is empty")]
    Empty,
    #[error("histogram frequencies sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("single-bin histogram cannot pin both parameters")]
    Degenerate,
    #[error("exponential fits need at least 3 points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CampaignMode {
    /// A fresh `(A, ℓ)` pair per run.
    Pairs,
    /// One pencil shared by the whole campaign, fresh `ℓ` per run.
    FixedA,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub mode: CampaignMode,
    pub g: usize,
    pub d: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub kind: FunctionalKind,
    pub runs_per_cell: usize,
    pub seed: u64,
    /// Wall time is volatile; campaigns write zeros unless asked so that
    /// identical seeds produce byte-identical output.
    #[serde(default)]
    pub record_wall_time: bool,
    /// Retry a failed solve with fresh functionals (up to three draws)
    /// instead of recording the failure outright.
    #[serde(default)]
    pub retry_failed_runs: bool,
    #[serde(default = "default_entry_bound")]
    pub pencil_entry_bound: i64,
    #[serde(default = "default_scale_divisor")]
    pub pencil_scale_divisor: f64,
    /// Zero-decision tolerances; defaults follow the published table.
    #[serde(default)]
    pub policies: Policies,
    /// Explicit defining tuple for fixed-pencil campaigns; when absent a
    /// random one is generated from the seed.
    #[serde(default)]
    pub pencil: Option<LinearPencil>,
}

fn default_entry_bound() -> i64 {
    25
}

fn default_scale_divisor() -> f64 {
    10.0
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.runs_per_cell < 1 {
            return Err(CampaignError::BadConfig("runs_per_cell must be >= 1"));
        }
        if self.n_min < 1 || self.n_max < self.n_min {
            return Err(CampaignError::BadConfig("level range must be 1 <= n_min <= n_max"));
        }
        if self.g < 1 || self.d < 1 {
            return Err(CampaignError::BadConfig("g and d must be positive"));
        }
        if let Some(p) = &self.pencil {
            if p.var_count() != self.g || p.order() != self.d {
                return Err(CampaignError::BadConfig(
                    "explicit pencil does not match the configured (g, d)",
                ));
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> impl Iterator<Item = usize> {
        self.n_min..=self.n_max
    }
}

/// One attempted run. Discarded (ill-conditioned) runs keep their record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub run_id: u64,
    pub seed: u64,
    pub cell_index: usize,
    pub run_index: usize,
    pub g: usize,
    pub d: usize,
    pub n: usize,
    pub kind: FunctionalKind,
    pub verdict: ExtremeVerdict,
    pub k: Option<usize>,
    pub commutant_dim: Option<usize>,
    pub status: SolveStatus,
    pub value: Option<f64>,
    pub wall_ms: u64,
}

impl CampaignRecord {
    /// Solver succeeded and every zero decision was clean.
    pub fn is_clean(&self) -> bool {
        self.status == SolveStatus::Optimal && self.verdict != ExtremeVerdict::IllConditioned
    }

    pub fn is_irreducible(&self) -> Option<bool> {
        self.commutant_dim.map(|c| c == 1)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn run_seed(campaign_seed: u64, cell: usize, run: usize) -> u64 {
    splitmix64(campaign_seed ^ splitmix64((cell as u64) << 32 | run as u64))
}

const PENCIL_SALT: u64 = 0x70656e63696c; // "pencil"
const FUNCTIONAL_SALT: u64 = 0x66756e63; // "func"

/// Executes every `(cell, run)` job. Runs are independent and execute on
/// a work pool; records come back in `(cell, run)` order regardless of
/// scheduling, so reruns with one seed are byte-identical.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Vec<CampaignRecord>, CampaignError> {
    run_campaign_resuming(cfg, &[])
}

/// [`run_campaign`] with a checkpoint: records already computed for this
/// config (matched by `(cell_index, run_index)`) are reused instead of
/// recomputed. Because every record is a deterministic function of the
/// config and its indices, the merged output is identical to a fresh run.
pub fn run_campaign_resuming(
    cfg: &CampaignConfig,
    checkpoint: &[CampaignRecord],
) -> Result<Vec<CampaignRecord>, CampaignError> {
    cfg.validate()?;
    let cache: std::collections::BTreeMap<(usize, usize), &CampaignRecord> = checkpoint
        .iter()
        .filter(|r| r.seed == cfg.seed && r.g == cfg.g && r.d == cfg.d && r.kind == cfg.kind)
        .map(|r| ((r.cell_index, r.run_index), r))
        .collect();

    let shared_pencil = match (cfg.mode, &cfg.pencil) {
        (CampaignMode::FixedA, Some(p)) => Some(p.clone()),
        (CampaignMode::FixedA, None) => Some(pencil::random_pencil(&PencilGenConfig {
            g: cfg.g,
            d: cfg.d,
            entry_bound: cfg.pencil_entry_bound,
            scale_divisor: cfg.pencil_scale_divisor,
            seed: splitmix64(cfg.seed ^ PENCIL_SALT),
            retry_cap: 1000,
        })?),
        (CampaignMode::Pairs, _) => None,
    };

    let jobs: Vec<(usize, usize, usize)> = cfg
        .levels()
        .enumerate()
        .flat_map(|(ci, n)| (0..cfg.runs_per_cell).map(move |ri| (ci, n, ri)))
        .collect();

    let mut records: Vec<CampaignRecord> = jobs
        .par_iter()
        .map(|&(cell_index, n, run_index)| {
            if let Some(&cached) = cache.get(&(cell_index, run_index)) {
                return cached.clone();
            }
            run_one(cfg, shared_pencil.as_ref(), cell_index, n, run_index)
        })
        .collect();
    for (i, r) in records.iter_mut().enumerate() {
        r.run_id = i as u64;
    }
    Ok(records)
}

fn run_one(
    cfg: &CampaignConfig,
    shared: Option<&LinearPencil>,
    cell_index: usize,
    n: usize,
    run_index: usize,
) -> CampaignRecord {
    let seed = run_seed(cfg.seed, cell_index, run_index);
    let start = Instant::now();
    let mut record = CampaignRecord {
        run_id: 0,
        seed: cfg.seed,
        cell_index,
        run_index,
        g: cfg.g,
        d: cfg.d,
        n,
        kind: cfg.kind,
        verdict: ExtremeVerdict::IllConditioned,
        k: None,
        commutant_dim: None,
        status: SolveStatus::IllConditioned,
        value: None,
        wall_ms: 0,
    };
    let finish = |mut rec: CampaignRecord| {
        if cfg.record_wall_time {
            rec.wall_ms = start.elapsed().as_millis() as u64;
        }
        rec
    };

    let owned_pencil;
    let pencil_ref = match shared {
        Some(p) => p,
        None => {
            match pencil::random_pencil(&PencilGenConfig {
                g: cfg.g,
                d: cfg.d,
                entry_bound: cfg.pencil_entry_bound,
                scale_divisor: cfg.pencil_scale_divisor,
                seed: splitmix64(seed ^ PENCIL_SALT),
                retry_cap: 1000,
            }) {
                Ok(p) => {
                    owned_pencil = p;
                    &owned_pencil
                }
                Err(_) => return finish(record),
            }
        }
    };

    let draws = if cfg.retry_failed_runs { 3 } else { 1 };
    let mut solved = None;
    for draw in 0..draws {
        let fseed = splitmix64(seed ^ FUNCTIONAL_SALT ^ (draw as u64) << 56);
        let ell = pencil::random_functional(cfg.kind, pencil_ref, n, fseed);
        match solver::minimize_functional(pencil_ref, &ell, n) {
            Ok((xhat, solve)) => {
                record.status = solve.status;
                record.value = Some(solve.objective);
                if solve.status == SolveStatus::Optimal {
                    solved = Some(xhat);
                    break;
                }
            }
            Err(_) => {}
        }
    }
    let Some(xhat) = solved else {
        return finish(record);
    };

    match extremality::classify_with(pencil_ref, &xhat, &cfg.policies) {
        Ok(c) => {
            record.verdict = c.verdict;
            record.k = Some(c.kernel.dim);
            record.commutant_dim = c.commutant_dim;
        }
        Err(_) => {
            record.verdict = ExtremeVerdict::IllConditioned;
        }
    }
    finish(record)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub free_extreme: usize,
    pub arveson_reducible: usize,
    pub euclidean_not_arveson: usize,
    pub not_euclidean_extreme: usize,
    pub ill_conditioned: usize,
}

impl VerdictCounts {
    fn bump(&mut self, v: ExtremeVerdict) {
        match v {
            ExtremeVerdict::FreeExtreme => self.free_extreme += 1,
            ExtremeVerdict::ArvesonReducible => self.arveson_reducible += 1,
            ExtremeVerdict::EuclideanNotArveson => self.euclidean_not_arveson += 1,
            ExtremeVerdict::NotEuclideanExtreme => self.not_euclidean_extreme += 1,
            ExtremeVerdict::IllConditioned => self.ill_conditioned += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.free_extreme
            + self.arveson_reducible
            + self.euclidean_not_arveson
            + self.not_euclidean_extreme
            + self.ill_conditioned
    }
}

/// Per-(g, d, n) statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellStats {
    pub g: usize,
    pub d: usize,
    pub n: usize,
    pub total: usize,
    pub counts: VerdictCounts,
    /// Clean optimizers split by reducibility.
    pub reducible: usize,
    pub irreducible: usize,
    /// `reducible / (reducible + irreducible)` over clean optimizers.
    pub p_n: f64,
    pub discard_rate: f64,
    /// Kernel dimensions of irreducible clean optimizers.
    pub k_histogram: BTreeMap<usize, usize>,
    /// Run ids of irreducible clean optimizers with k > 2n; the bound is
    /// an empirical observation, so violations are reported, not asserted.
    pub k_upper_violations: Vec<u64>,
    /// Irreducible optimizers that are extreme (free or non-Arveson).
    pub irreducible_extreme: usize,
    pub irreducible_non_arveson: usize,
    /// `free_extreme / irreducible_extreme`, when the denominator is
    /// nonzero.
    pub free_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignStats {
    pub cells: Vec<CellStats>,
}

impl CampaignStats {
    pub fn cell(&self, n: usize) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.n == n)
    }

    /// `p_n` series over cells, for exponential fitting.
    pub fn reducible_series(&self) -> Vec<(f64, f64)> {
        self.cells
            .iter()
            .map(|c| (c.n as f64, c.p_n))
            .collect()
    }

    /// Pooled kernel histogram over all cells, as frequencies.
    pub fn pooled_k_frequencies(&self) -> BTreeMap<usize, f64> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for c in &self.cells {
            for (&k, &v) in &c.k_histogram {
                *counts.entry(k).or_insert(0) += v;
            }
        }
        normalize_histogram(&counts)
    }
}

/// Turns a count histogram into frequencies summing to one.
pub fn normalize_histogram(counts: &BTreeMap<usize, usize>) -> BTreeMap<usize, f64> {
    let total: usize = counts.values().sum();
    counts
        .iter()
        .map(|(&k, &v)| (k, v as f64 / total.max(1) as f64))
        .collect()
}

/// Aggregates records into per-cell statistics. Ill-conditioned runs are
/// counted and excluded from every denominator, mirroring how published
/// tables treat their error columns.
pub fn tally(records: &[CampaignRecord]) -> CampaignStats {
    let mut cells: BTreeMap<(usize, usize, usize), Vec<&CampaignRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.g, r.d, r.n)).or_default().push(r);
    }
    let cells = cells
        .into_iter()
        .map(|((g, d, n), rs)| {
            let mut counts = VerdictCounts::default();
            let mut reducible = 0;
            let mut irreducible = 0;
            let mut k_histogram = BTreeMap::new();
            let mut k_upper_violations = Vec::new();
            let mut irreducible_extreme = 0;
            let mut irreducible_non_arveson = 0;
            for r in &rs {
                counts.bump(r.verdict);
                if !r.is_clean() {
                    continue;
                }
                match r.is_irreducible() {
                    Some(true) => {
                        irreducible += 1;
                        if let Some(k) = r.k {
                            *k_histogram.entry(k).or_insert(0) += 1;
                            if k > 2 * n {
                                k_upper_violations.push(r.run_id);
                            }
                        }
                        match r.verdict {
                            ExtremeVerdict::FreeExtreme => irreducible_extreme += 1,
                            ExtremeVerdict::EuclideanNotArveson => {
                                irreducible_extreme += 1;
                                irreducible_non_arveson += 1;
                            }
                            _ => {}
                        }
                    }
                    Some(false) => reducible += 1,
                    None => {}
                }
            }
            let clean_total = reducible + irreducible;
            let free = counts.free_extreme;
            CellStats {
                g,
                d,
                n,
                total: rs.len(),
                counts,
                reducible,
                irreducible,
                p_n: if clean_total > 0 {
                    reducible as f64 / clean_total as f64
                } else {
                    0.0
                },
                discard_rate: if rs.is_empty() {
                    0.0
                } else {
                    rs.iter().filter(|r| !r.is_clean()).count() as f64 / rs.len() as f64
                },
                k_histogram,
                k_upper_violations,
                irreducible_extreme,
                irreducible_non_arveson,
                free_ratio: if irreducible_extreme > 0 {
                    Some(free as f64 / irreducible_extreme as f64)
                } else {
                    None
                },
            }
        })
        .collect();
    CampaignStats { cells }
}

/// Fit models and their parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FitResult {
    Gaussian {
        mu: f64,
        sigma: f64,
        error: f64,
    },
    GaussianWeighted {
        mu: f64,
        sigma: f64,
        error: f64,
        /// Zero-frequency bins cannot enter the weighted error; they are
        /// dropped and listed here.
        excluded_bins: Vec<usize>,
    },
    Exponential {
        a: f64,
        r: f64,
        error: f64,
    },
}

fn gaussian_density(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// Nelder-Mead on two parameters. Small and deterministic; good enough
/// for the smooth one-basin objectives the fits produce locally.
fn nelder_mead_2d(f: impl Fn(f64, f64) -> f64, start: (f64, f64), scale: (f64, f64)) -> (f64, f64, f64) {
    let mut simplex = [
        (start.0, start.1),
        (start.0 + scale.0, start.1),
        (start.0, start.1 + scale.1),
    ];
    let mut values = [0.0f64; 3];
    for i in 0..3 {
        values[i] = f(simplex[i].0, simplex[i].1);
    }
    for _ in 0..300 {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let (best, mid, worst) = (order[0], order[1], order[2]);
        if (values[worst] - values[best]).abs() <= 1e-14 * (1.0 + values[best].abs()) {
            break;
        }
        let centroid = (
            (simplex[best].0 + simplex[mid].0) / 2.0,
            (simplex[best].1 + simplex[mid].1) / 2.0,
        );
        let reflect = (
            centroid.0 + (centroid.0 - simplex[worst].0),
            centroid.1 + (centroid.1 - simplex[worst].1),
        );
        let fr = f(reflect.0, reflect.1);
        if fr < values[best] {
            let expand = (
                centroid.0 + 2.0 * (centroid.0 - simplex[worst].0),
                centroid.1 + 2.0 * (centroid.1 - simplex[worst].1),
            );
            let fe = f(expand.0, expand.1);
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[mid] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract = (
                centroid.0 + 0.5 * (simplex[worst].0 - centroid.0),
                centroid.1 + 0.5 * (simplex[worst].1 - centroid.1),
            );
            let fc = f(contract.0, contract.1);
            if fc < values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                for i in 0..3 {
                    if i != best {
                        simplex[i] = (
                            simplex[best].0 + 0.5 * (simplex[i].0 - simplex[best].0),
                            simplex[best].1 + 0.5 * (simplex[i].1 - simplex[best].1),
                        );
                        values[i] = f(simplex[i].0, simplex[i].1);
                    }
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best].0, simplex[best].1, values[best])
}

/// Fits a Gaussian density to a frequency histogram by (optionally
/// weighted) root-mean-square error, seeding the local search with every
/// mean on a 0.01 grid across the data range and the sample standard
/// deviation.
pub fn fit_gaussian(
    histogram: &BTreeMap<usize, f64>,
    weighted: bool,
) -> Result<FitResult, FitError> {
    if histogram.is_empty() {
        return Err(FitError::Empty);
    }
    let total: f64 = histogram.values().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(FitError::NotNormalized(total));
    }

    let (bins, excluded): (Vec<(f64, f64)>, Vec<usize>) = if weighted {
        let kept = histogram
            .iter()
            .filter(|(_, &v)| v > 0.0)
            .map(|(&k, &v)| (k as f64, v))
            .collect();
        let dropped = histogram
            .iter()
            .filter(|(_, &v)| v <= 0.0)
            .map(|(&k, _)| k)
            .collect();
        (kept, dropped)
    } else {
        (
            histogram.iter().map(|(&k, &v)| (k as f64, v)).collect(),
            Vec::new(),
        )
    };
    if bins.len() < 2 {
        return Err(FitError::Degenerate);
    }

    let mean: f64 = bins.iter().map(|(k, v)| k * v).sum::<f64>() / total;
    let var: f64 = bins.iter().map(|(k, v)| v * (k - mean) * (k - mean)).sum::<f64>() / total;
    let sigma0 = var.sqrt().max(0.05);

    let objective = |mu: f64, sigma: f64| -> f64 {
        if sigma <= 1e-6 {
            return f64::INFINITY;
        }
        let mut sum = 0.0;
        for &(k, v) in &bins {
            let diff = gaussian_density(k, mu, sigma) - v;
            let term = if weighted { diff / v } else { diff };
            sum += term * term;
        }
        (sum / bins.len() as f64).sqrt()
    };

    let lo = bins.first().unwrap().0;
    let hi = bins.last().unwrap().0;
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    let steps = ((hi - lo) / 0.01).round() as usize;
    for i in 0..=steps {
        let mu0 = lo + i as f64 * 0.01;
        let candidate = nelder_mead_2d(objective, (mu0, sigma0), (0.05, 0.05));
        if candidate.2 < best.2 {
            best = candidate;
        }
    }
    let (mu, sigma, error) = best;
    let sigma = sigma.abs();
    Ok(if weighted {
        FitResult::GaussianWeighted {
            mu,
            sigma,
            error,
            excluded_bins: excluded,
        }
    } else {
        FitResult::Gaussian { mu, sigma, error }
    })
}

/// Fits `f(n) = a e^{-r n}` to a series by least squares: a log-linear
/// seed on the positive points, polished on the full residual with all
/// points kept.
pub fn fit_exponential(series: &[(f64, f64)]) -> Result<FitResult, FitError> {
    if series.len() < 3 {
        return Err(FitError::TooFewPoints(series.len()));
    }
    let positive: Vec<(f64, f64)> = series.iter().copied().filter(|&(_, p)| p > 0.0).collect();
    let (mut ln_a, mut r) = (0.0, 0.0);
    if positive.len() >= 2 {
        let m = positive.len() as f64;
        let sx: f64 = positive.iter().map(|(n, _)| n).sum();
        let sy: f64 = positive.iter().map(|(_, p)| p.ln()).sum();
        let sxx: f64 = positive.iter().map(|(n, _)| n * n).sum();
        let sxy: f64 = positive.iter().map(|(n, p)| n * p.ln()).sum();
        let denom = m * sxx - sx * sx;
        if denom.abs() > 1e-12 {
            let slope = (m * sxy - sx * sy) / denom;
            ln_a = (sy - slope * sx) / m;
            r = -slope;
        } else {
            ln_a = sy / m;
        }
    } else if let Some(&(_, p)) = positive.first() {
        ln_a = p.ln();
    }

    let objective = |ln_a: f64, r: f64| -> f64 {
        let mut sum = 0.0;
        for &(n, p) in series {
            let diff = ln_a.exp() * (-r * n).exp() - p;
            sum += diff * diff;
        }
        (sum / series.len() as f64).sqrt()
    };
    let (ln_a, r, error) = nelder_mead_2d(objective, (ln_a, r), (0.1, 0.05));
    Ok(FitResult::Exponential {
        a: ln_a.exp(),
        r,
        error,
    })
}

/// Fixed CSV header for bulk records.
pub const CSV_HEADER: &str = "run_id,g,d,n,kind,verdict,k,commutant_dim,status,value,wall_ms";

fn kind_str(k: FunctionalKind) -> &'static str {
    match k {
        FunctionalKind::Rc => "rc",
        FunctionalKind::Rpt => "rpt",
    }
}

fn status_str(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::IllConditioned => "ill_conditioned",
    }
}

/// Renders records as CSV with the fixed header; `None` fields are empty.
pub fn records_to_csv(records: &[CampaignRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let k = r.k.map(|v| v.to_string()).unwrap_or_default();
        let cd = r.commutant_dim.map(|v| v.to_string()).unwrap_or_default();
        let value = r.value.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.run_id,
            r.g,
            r.d,
            r.n,
            kind_str(r.kind),
            r.verdict,
            k,
            cd,
            status_str(r.status),
            value,
            r.wall_ms
        ));
    }
    out
}

/// One JSON object per line, full record fidelity.
pub fn records_to_jsonl(records: &[CampaignRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Plot-ready `(x, observed, fitted)` CSV for a Gaussian fit.
pub fn gaussian_plot_csv(histogram: &BTreeMap<usize, f64>, fit: &FitResult) -> String {
    let (mu, sigma) = match fit {
        FitResult::Gaussian { mu, sigma, .. }
        | FitResult::GaussianWeighted { mu, sigma, .. } => (*mu, *sigma),
        FitResult::Exponential { .. } => panic!("gaussian plot needs a gaussian fit"),
    };
    let mut out = String::from("x,observed,fitted\n");
    for (&k, &v) in histogram {
        out.push_str(&format!(
            "{},{},{}\n",
            k,
            v,
            gaussian_density(k as f64, mu, sigma)
        ));
    }
    out
}

/// Plot-ready `(x, observed, fitted)` CSV for an exponential fit.
pub fn exponential_plot_csv(series: &[(f64, f64)], fit: &FitResult) -> String {
    let (a, r) = match fit {
        FitResult::Exponential { a, r, .. } => (*a, *r),
        _ => panic!("exponential plot needs an exponential fit"),
    };
    let mut out = String::from("x,observed,fitted\n");
    for &(n, p) in series {
        out.push_str(&format!("{},{},{}\n", n, p, a * (-r * n).exp()));
    }
    out
}
