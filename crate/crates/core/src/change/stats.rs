//! The three self-normalized change-point statistics.

use serde::{Deserialize, Serialize};

use super::kernel::KernelField;
use super::process::{u_at, var_v1v2, var_vt, vl_radius_term, Centering};
use crate::error::{Error, Result};

/// The statistics this crate can compute and calibrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StatisticId {
    /// Sup-type statistic normalized per radius by `V_T(r)`.
    Dmax,
    /// Cramér-von Mises type statistic normalized by `V^L_T`.
    DL,
    /// Quadratic form normalized by `V_{1,T} + V_{2,T}` at each split point.
    Q,
}

impl StatisticId {
    pub const ALL: [StatisticId; 3] = [StatisticId::Dmax, StatisticId::DL, StatisticId::Q];

    pub fn name(&self) -> &'static str {
        match self {
            StatisticId::Dmax => "Dmax",
            StatisticId::DL => "DL",
            StatisticId::Q => "Q",
        }
    }
}

impl std::fmt::Display for StatisticId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StatisticId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dmax" => Ok(StatisticId::Dmax),
            "dl" => Ok(StatisticId::DL),
            "q" => Ok(StatisticId::Q),
            _ => Err(Error::input(format!("unknown statistic '{s}' (expected Dmax, DL or Q)"))),
        }
    }
}

/// What to do with radii (or split points) whose normalizer is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegeneratePolicy {
    Skip,
    Fail,
}

/// A statistic value with the location of its supremum and per-radius detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub statistic: StatisticId,
    pub value: f64,
    /// Time index `k` (of `u = k/T`) and radius attaining the supremum, for
    /// the sup-type statistics.
    pub argmax: Option<Argmax>,
    /// Per-radius value (sup over `u` for Dmax and Q, the radius' share of
    /// the numerator for DL); `None` for skipped radii.
    pub per_radius: Vec<Option<f64>>,
    /// Grid indices of radii excluded as degenerate.
    pub skipped_radii: Vec<usize>,
    /// Split points evaluated (Q only): `k_min..=k_max`.
    pub k_range: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Argmax {
    pub k: usize,
    pub radius: f64,
}

fn degenerate_radius(policy: DegeneratePolicy, stat: StatisticId, r: f64) -> Result<()> {
    match policy {
        DegeneratePolicy::Skip => Ok(()),
        DegeneratePolicy::Fail => Err(Error::degenerate(format!(
            "{stat}: normalizer vanishes at radius {r} (kernel partial sums are exactly quadratic)"
        ))),
    }
}

/// `D^max_T = sup_r sup_k sqrt(T) |U_T(k/T, r)| / V_T(r)^{1/2}`, `k = 1..=T`.
pub fn stat_dmax(k: &KernelField, policy: DegeneratePolicy) -> Result<StatisticValue> {
    let t = k.len();
    let radii = k.grid().values();
    let mut best: Option<(f64, Argmax)> = None;
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut skipped = Vec::new();
    for (ri, &r) in radii.iter().enumerate() {
        let v = var_vt(k, ri, Centering::Raw)?;
        if v.degenerate {
            degenerate_radius(policy, StatisticId::Dmax, r)?;
            skipped.push(ri);
            per_radius.push(None);
            continue;
        }
        let scale = (t as f64).sqrt() / v.value.sqrt();
        let mut local: Option<(f64, usize)> = None;
        for step in 1..=t {
            let x = u_at(k, ri, step).abs() * scale;
            if local.is_none_or(|(bv, _)| x > bv) {
                local = Some((x, step));
            }
        }
        let (x, step) = local.expect("T >= 1");
        per_radius.push(Some(x));
        if best.is_none_or(|(bv, _)| x > bv) {
            best = Some((x, Argmax { k: step, radius: r }));
        }
    }
    let (value, argmax) = best.ok_or_else(|| {
        Error::degenerate("Dmax: every radius of the grid has a vanishing normalizer")
    })?;
    Ok(StatisticValue {
        statistic: StatisticId::Dmax,
        value,
        argmax: Some(argmax),
        per_radius,
        skipped_radii: skipped,
        k_range: (1, t),
    })
}

/// `D^L_T = T (R_max / (R T)) Σ_i Σ_k U_T(k/T, r_i)^2 / V^L_T`.
///
/// Degenerate radii contribute zero to numerator and denominator alike; the
/// statistic fails only when the whole denominator vanishes, or when the
/// policy is [`DegeneratePolicy::Fail`] and any radius is degenerate.
pub fn stat_dl(k: &KernelField, policy: DegeneratePolicy) -> Result<StatisticValue> {
    let t = k.len();
    if t < 2 {
        return Err(Error::input("DL needs T >= 2"));
    }
    let grid = k.grid();
    let weight = grid.r_max() / grid.len() as f64;
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    let mut per_radius = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for (ri, &r) in grid.values().iter().enumerate() {
        let (term, zero) = vl_radius_term(k, ri);
        if zero {
            degenerate_radius(policy, StatisticId::DL, r)?;
            skipped.push(ri);
            per_radius.push(None);
            continue;
        }
        let squares: f64 = (1..=t).map(|step| u_at(k, ri, step).powi(2)).sum();
        let contribution = t as f64 * weight / t as f64 * squares;
        numerator += contribution;
        denominator += weight * term;
        per_radius.push(Some(contribution));
    }
    if denominator == 0.0 {
        return Err(Error::degenerate("DL: the normalizer V^L_T vanishes on the whole grid"));
    }
    Ok(StatisticValue {
        statistic: StatisticId::DL,
        value: numerator / denominator,
        argmax: None,
        per_radius: per_radius
            .into_iter()
            .map(|c| c.map(|c| c / denominator))
            .collect(),
        skipped_radii: skipped,
        k_range: (1, t),
    })
}

/// Split points `⌈εT⌉ ..= ⌊(1-ε)T⌋`, clipped to `1..=T-1`.
pub fn trimmed_range(t: usize, trim: f64) -> Result<(usize, usize)> {
    if !(trim > 0.0 && trim < 0.5) {
        return Err(Error::input(format!("trim must lie in (0, 0.5), got {trim}")));
    }
    // Snap products that land within rounding of an integer.
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r
        } else {
            x
        }
    };
    let lo = (snap(trim * t as f64).ceil() as usize).max(1);
    let hi = (snap((1.0 - trim) * t as f64).floor() as usize).min(t.saturating_sub(1));
    if lo > hi {
        return Err(Error::input(format!(
            "trimmed split range is empty for T = {t} and trim = {trim}"
        )));
    }
    Ok((lo, hi))
}

/// `Q_T = sup_r sup_k T U_T(k/T, r)^2 / (V_{1,T}(k, r) + V_{2,T}(k, r))` over
/// the trimmed split points.
pub fn stat_q(k: &KernelField, trim: f64, policy: DegeneratePolicy) -> Result<StatisticValue> {
    let t = k.len();
    let (lo, hi) = trimmed_range(t, trim)?;
    let radii = k.grid().values();
    let mut best: Option<(f64, Argmax)> = None;
    let mut per_radius = Vec::with_capacity(radii.len());
    let mut skipped = Vec::new();
    for (ri, &r) in radii.iter().enumerate() {
        let mut local: Option<f64> = None;
        for step in lo..=hi {
            let (v1, v2) = var_v1v2(k, step, ri, Centering::Raw)?;
            if v1.degenerate && v2.degenerate {
                degenerate_radius(policy, StatisticId::Q, r)
                    .map_err(|e| e.context(format!("split point k = {step}")))?;
                continue;
            }
            let u = u_at(k, ri, step);
            let x = t as f64 * u * u / (v1.value + v2.value);
            if local.is_none_or(|bv| x > bv) {
                local = Some(x);
            }
            if best.is_none_or(|(bv, _)| x > bv) {
                best = Some((x, Argmax { k: step, radius: r }));
            }
        }
        if local.is_none() {
            skipped.push(ri);
        }
        per_radius.push(local);
    }
    let (value, argmax) = best.ok_or_else(|| {
        Error::degenerate("Q: every (split point, radius) cell has a vanishing normalizer")
    })?;
    Ok(StatisticValue {
        statistic: StatisticId::Q,
        value,
        argmax: Some(argmax),
        per_radius,
        skipped_radii: skipped,
        k_range: (lo, hi),
    })
}

/// Dispatch on `id`; `trim` is only used by Q.
pub fn compute_statistic(
    k: &KernelField,
    id: StatisticId,
    trim: f64,
    policy: DegeneratePolicy,
) -> Result<StatisticValue> {
    match id {
        StatisticId::Dmax => stat_dmax(k, policy),
        StatisticId::DL => stat_dl(k, policy),
        StatisticId::Q => stat_q(k, trim, policy),
    }
}
