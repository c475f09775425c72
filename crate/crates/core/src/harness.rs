//! Experiment orchestration: per-state threshold reports, randomized
//! verification of the entropy/singlet-fraction implication, and Werner sweeps.

use std::fmt;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy;
use crate::error::{Error, Result};
use crate::families::{self, WernerParams};
use crate::fef::{self, FefBounds, OptimizerConfig, TeleportVerdict};
use crate::io::{self, StateFile};
use crate::linalg::{self, CMatrix};
use crate::protocols::{self, DenseCodingVerdict};
use crate::sampling::SamplerSpec;
use crate::states::{self, DensityMatrix};

/// Margin above `1/N` a lower bound must clear to count against the theorem.
pub const VIOLATION_MARGIN: f64 = 1e-7;
/// Slack on the entropy side of the contrapositive check.
pub const ENTROPY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntropyVerdict {
    AboveThreshold,
    BelowThreshold,
}

impl EntropyVerdict {
    fn of(s: f64, threshold: f64) -> Self {
        if s > threshold {
            EntropyVerdict::AboveThreshold
        } else {
            EntropyVerdict::BelowThreshold
        }
    }
}

/// Everything the toolkit can say about one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    #[serde(rename = "S_vn")]
    pub s_vn: f64,
    #[serde(rename = "S_linear")]
    pub s_linear: f64,
    #[serde(rename = "T_vn")]
    pub t_vn: f64,
    #[serde(rename = "T_linear")]
    pub t_linear: f64,
    #[serde(rename = "densecoding_T")]
    pub densecoding_t: f64,
    pub fef_lower: f64,
    pub fef_upper: f64,
    pub teleport_verdict: TeleportVerdict,
    pub entropy_verdict_teleport: EntropyVerdict,
    pub entropy_verdict_densecoding: EntropyVerdict,
    pub holevo_chi: f64,
    pub densecoding_verdict: DenseCodingVerdict,
}

/// A state that contradicts the entropy/singlet-fraction implication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub kind: String,
    pub n: usize,
    pub sample_index: Option<u64>,
    pub entropy: f64,
    pub threshold: f64,
    pub fef_lower: f64,
    pub state: StateFile,
}

impl fmt::Display for ViolationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at n = {} (sample {:?}): S = {}, T = {}, F_lower = {}",
            self.kind, self.n, self.sample_index, self.entropy, self.threshold, self.fef_lower
        )
    }
}

fn violation(
    kind: &str,
    rho: &DensityMatrix,
    index: Option<u64>,
    entropy: f64,
    threshold: f64,
    fef_lower: f64,
) -> Error {
    Error::TheoremViolation(Box::new(ViolationRecord {
        kind: kind.to_string(),
        n: rho.n(),
        sample_index: index,
        entropy,
        threshold,
        fef_lower,
        state: StateFile::from_density(rho),
    }))
}

/// Full threshold report for `rho`.
pub fn analyze(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<ThresholdReport> {
    let n = rho.n();
    let s_vn = entropy::von_neumann_entropy(rho)?;
    let t_vn = entropy::teleport_threshold_vn(n)?;
    let densecoding_t = entropy::densecoding_threshold(n)?;
    let bounds = fef::fef_certified(rho, cfg)?;
    let teleport_verdict = fef::usable_for_teleportation(&bounds, n);
    let holevo_chi = protocols::densecoding_holevo(&protocols::densecoding_ensemble(rho)?)?;
    let report = ThresholdReport {
        n,
        s_vn,
        s_linear: entropy::linear_entropy(rho),
        t_vn,
        t_linear: entropy::teleport_threshold_linear(n)?,
        densecoding_t,
        fef_lower: bounds.lower,
        fef_upper: bounds.upper,
        teleport_verdict,
        entropy_verdict_teleport: EntropyVerdict::of(s_vn, t_vn),
        entropy_verdict_densecoding: EntropyVerdict::of(s_vn, densecoding_t),
        holevo_chi,
        densecoding_verdict: protocols::verdict_from_chi(holevo_chi, n),
    };
    if report.entropy_verdict_teleport == EntropyVerdict::AboveThreshold
        && report.teleport_verdict == TeleportVerdict::UsableCertified
    {
        return Err(violation(
            "entropy above threshold with certified F > 1/N",
            rho,
            None,
            s_vn,
            t_vn,
            bounds.lower,
        ));
    }
    Ok(report)
}

pub fn analyze_state(path: impl AsRef<Path>, cfg: &OptimizerConfig) -> Result<ThresholdReport> {
    analyze(&io::read_state(path)?, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdsReport {
    pub n: usize,
    #[serde(rename = "T_vn")]
    pub t_vn: f64,
    #[serde(rename = "T_linear")]
    pub t_linear: f64,
    #[serde(rename = "log2_N")]
    pub log2_n: f64,
}

pub fn thresholds_report(n: usize) -> Result<ThresholdsReport> {
    states::check_dim(n)?;
    Ok(ThresholdsReport {
        n,
        t_vn: entropy::teleport_threshold_vn(n)?,
        t_linear: entropy::teleport_threshold_linear(n)?,
        log2_n: entropy::densecoding_threshold(n)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FefReport {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub restarts_used: usize,
    pub iterations_total: usize,
    pub converged: bool,
    pub verdict: TeleportVerdict,
    /// Row-major `[re, im]` entries of the witness unitary.
    pub best_unitary: Vec<Vec<[f64; 2]>>,
}

pub fn fef_report(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<FefReport> {
    let b = fef::fef_certified(rho, cfg)?;
    let u = &b.best_unitary;
    Ok(FefReport {
        n: rho.n(),
        lower: b.lower,
        upper: b.upper,
        gap: b.gap,
        restarts_used: b.restarts_used,
        iterations_total: b.iterations_total,
        converged: b.converged,
        verdict: fef::usable_for_teleportation(&b, rho.n()),
        best_unitary: (0..u.nrows())
            .map(|i| (0..u.ncols()).map(|j| [u[(i, j)].re, u[(i, j)].im]).collect())
            .collect(),
    })
}

/// `(U†⊗I) ρ (U⊗I)` with `U` the optimizer's witness, so that the canonical
/// Bell measurement sees the best maximally entangled overlap.
pub fn align_to_witness(rho: &DensityMatrix, bounds: &FefBounds) -> Result<DensityMatrix> {
    let n = rho.n();
    let local = linalg::tensor(&bounds.best_unitary.adjoint(), &CMatrix::identity(n, n));
    rho.conjugate_by(&local)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub n: usize,
    /// Whether the resource was first rotated onto the optimizer's witness.
    pub aligned: bool,
    pub f_phi: f64,
    pub f_avg_exact: f64,
    pub f_avg_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub n_samples: usize,
    pub classical_fidelity: f64,
    pub beats_classical: bool,
}

pub fn teleport_report(
    rho: &DensityMatrix,
    mc_samples: Option<usize>,
    seed: u64,
    align: Option<&OptimizerConfig>,
) -> Result<TeleportReport> {
    let resource = match align {
        Some(cfg) => align_to_witness(rho, &fef::fef_certified(rho, cfg)?)?,
        None => rho.clone(),
    };
    let r = match mc_samples {
        Some(k) => protocols::teleportation_avg_fidelity_mc(&resource, k, seed)?,
        None => protocols::teleportation_avg_fidelity_exact(&resource)?,
    };
    let classical = protocols::classical_fidelity(rho.n());
    Ok(TeleportReport {
        n: rho.n(),
        aligned: align.is_some(),
        f_phi: r.f_phi,
        f_avg_exact: r.f_avg_exact,
        f_avg_mc: r.f_avg_mc,
        mc_std_error: r.mc_std_error,
        n_samples: r.n_samples,
        classical_fidelity: classical,
        beats_classical: r.f_avg_exact > classical + fef::VERDICT_MARGIN,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseCodeReport {
    pub n: usize,
    #[serde(rename = "S_vn")]
    pub s_vn: f64,
    #[serde(rename = "S_average")]
    pub s_average: f64,
    pub holevo_chi: f64,
    #[serde(rename = "log2_N")]
    pub log2_n: f64,
    pub verdict: DenseCodingVerdict,
}

pub fn densecode_report(rho: &DensityMatrix) -> Result<DenseCodeReport> {
    let ensemble = protocols::densecoding_ensemble(rho)?;
    let chi = protocols::densecoding_holevo(&ensemble)?;
    Ok(DenseCodeReport {
        n: rho.n(),
        s_vn: entropy::von_neumann_entropy(rho)?,
        s_average: entropy::von_neumann_entropy(&ensemble.average_state()?)?,
        holevo_chi: chi,
        log2_n: entropy::densecoding_threshold(rho.n())?,
        verdict: protocols::verdict_from_chi(chi, rho.n()),
    })
}

/// Cell counts of {S > T, S ≤ T} × {F_lower ≥ 1/N + margin, otherwise}.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub above_t_fef_high: usize,
    pub above_t_fef_low: usize,
    pub below_t_fef_high: usize,
    pub below_t_fef_low: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub n: usize,
    pub samples: usize,
    pub sampler: SamplerSpec,
    pub optimizer: OptimizerConfig,
    pub threshold: f64,
    pub counts: CellCounts,
    pub violations: usize,
    pub contrapositive_violations: usize,
    pub fraction_above_threshold: f64,
    /// Largest optimizer lower bound among states above the threshold.
    pub max_fef_lower_above_threshold: Option<f64>,
    /// Largest entropy among states with F_lower ≥ 1/N + margin.
    pub max_entropy_fef_high: Option<f64>,
}

struct SampleOutcome {
    entropy: f64,
    fef_lower: f64,
}

/// Samples states from `sampler` and checks `S > T ⟹ F < 1/N` on each.
///
/// Fails with [`Error::TheoremViolation`] on the first offending sample
/// (lowest index), carrying the state for reproduction.
pub fn verify_theorem(n: usize, samples: usize, sampler: &SamplerSpec, cfg: &OptimizerConfig) -> Result<VerifySummary> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if sampler.dim != n * n {
        return Err(Error::dims(format!("sampler dim {}", n * n), sampler.dim));
    }
    sampler.validate()?;
    cfg.validate()?;
    let threshold = entropy::teleport_threshold_vn(n)?;
    let cutoff = 1.0 / n as f64 + VIOLATION_MARGIN;

    let outcomes: Vec<SampleOutcome> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let rho = sampler.density(i)?;
            let entropy = entropy::von_neumann_entropy(&rho)?;
            let fef_lower = fef::fef_lower_bound(&rho, cfg)?.lower;
            Ok(SampleOutcome { entropy, fef_lower })
        })
        .collect::<Result<_>>()?;

    let mut counts = CellCounts::default();
    let mut violations = 0;
    let mut contrapositive_violations = 0;
    let mut first_bad: Option<(u64, &'static str)> = None;
    let mut max_fef_above: Option<f64> = None;
    let mut max_entropy_high: Option<f64> = None;
    for (i, o) in outcomes.iter().enumerate() {
        let above = o.entropy > threshold;
        let high = o.fef_lower >= cutoff;
        match (above, high) {
            (true, true) => counts.above_t_fef_high += 1,
            (true, false) => counts.above_t_fef_low += 1,
            (false, true) => counts.below_t_fef_high += 1,
            (false, false) => counts.below_t_fef_low += 1,
        }
        if above {
            max_fef_above = Some(max_fef_above.map_or(o.fef_lower, |m| m.max(o.fef_lower)));
        }
        if high {
            max_entropy_high = Some(max_entropy_high.map_or(o.entropy, |m| m.max(o.entropy)));
        }
        if above && high {
            violations += 1;
            first_bad.get_or_insert((i as u64, "S > T with F_lower >= 1/N + margin"));
        }
        if high && o.entropy > threshold + ENTROPY_SLACK {
            contrapositive_violations += 1;
            first_bad.get_or_insert((i as u64, "F_lower >= 1/N + margin with S > T + slack"));
        }
    }

    if let Some((index, kind)) = first_bad {
        let rho = sampler.density(index)?;
        let o = &outcomes[index as usize];
        return Err(violation(kind, &rho, Some(index), o.entropy, threshold, o.fef_lower));
    }

    Ok(VerifySummary {
        n,
        samples,
        sampler: sampler.clone(),
        optimizer: *cfg,
        threshold,
        counts,
        violations,
        contrapositive_violations,
        fraction_above_threshold: (counts.above_t_fef_high + counts.above_t_fef_low) as f64 / samples as f64,
        max_fef_lower_above_threshold: max_fef_above,
        max_entropy_fef_high: max_entropy_high,
    })
}

/// One Werner-sweep row. `marker` names the critical ε a row was inserted for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "S_L")]
    pub s_linear: f64,
    #[serde(rename = "F_closed")]
    pub f_closed: f64,
    pub chi: f64,
    pub f_avg: f64,
    pub above_t_vn: bool,
    pub above_t_dc: bool,
    pub marker: Option<String>,
}

pub const SWEEP_CSV_HEADER: [&str; 8] = [
    "epsilon",
    "S_bits",
    "S_linear",
    "F",
    "chi_bits",
    "f_avg",
    "above_T_vn",
    "above_T_dc",
];

fn sweep_row(n: usize, epsilon: f64, marker: Option<&str>) -> Result<SweepRow> {
    let params = WernerParams::new(n, epsilon)?;
    let rho = families::werner(params)?;
    let s = entropy::von_neumann_entropy(&rho)?;
    let chi = protocols::densecoding_holevo(&protocols::densecoding_ensemble(&rho)?)?;
    let f_avg = protocols::teleportation_avg_fidelity_exact(&rho)?.f_avg_exact;
    Ok(SweepRow {
        epsilon,
        s,
        s_linear: entropy::linear_entropy(&rho),
        f_closed: families::werner_fef_closed_form(params),
        chi,
        f_avg,
        above_t_vn: s > entropy::teleport_threshold_vn(n)?,
        above_t_dc: s > entropy::densecoding_threshold(n)?,
        marker: marker.map(str::to_string),
    })
}

/// Rows on a uniform ε grid over [0, 1] plus the critical ε values, ordered by ε.
pub fn sweep_werner(n: usize, grid_points: usize) -> Result<Vec<SweepRow>> {
    if grid_points < 2 {
        return Err(Error::InvalidParameter("grid_points must be at least 2".into()));
    }
    let crit = families::critical_epsilons(n)?;
    let mut points: Vec<(f64, Option<&str>)> = (0..grid_points)
        .map(|k| (k as f64 / (grid_points - 1) as f64, None))
        .collect();
    points.push((crit.eps_fef_above, Some("eps_fef_above")));
    points.push((
        crit.eps_entropy_at_teleport_threshold,
        Some("eps_entropy_at_teleport_threshold"),
    ));
    points.push((
        crit.eps_entropy_at_densecoding_threshold,
        Some("eps_entropy_at_densecoding_threshold"),
    ));
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.is_some().cmp(&b.1.is_some())));

    points
        .par_iter()
        .map(|&(eps, marker)| sweep_row(n, eps, marker))
        .collect()
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(SWEEP_CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            fmt6(r.epsilon),
            fmt6(r.s),
            fmt6(r.s_linear),
            fmt6(r.f_closed),
            fmt6(r.chi),
            fmt6(r.f_avg),
            r.above_t_vn.to_string(),
            r.above_t_dc.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(num) if num.is_f64() => {
            let x = round_sig(num.as_f64().unwrap_or(0.0), 12);
            if let Some(r) = serde_json::Number::from_f64(x) {
                *num = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    round_json(&mut v);
    serde_json::to_string_pretty(&v).map_err(|e| Error::Parse(e.to_string()))
}
