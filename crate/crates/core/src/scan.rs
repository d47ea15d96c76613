//! Grid evaluation of the Werner pipeline, Bell-violation maps and the
//! minimal-indistinguishability threshold search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::Statistics;
use crate::entangle::analyze;
use crate::indist::degree_lr;
use crate::noise::{werner_direct, BellTarget, WernerSpec};
use crate::slocc::{project, OperationalRegionSet};
use crate::{Error, Result};

/// Rows whose detection probability falls below this are flagged undetectable.
pub const DETECTION_FLOOR: f64 = 1e-12;
/// CHSH classical bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

/// `steps` evenly spaced values from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        let g = Self { start, stop, steps };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if self.start > self.stop {
            return Err(Error::Config(format!("grid start {} exceeds stop {}", self.start, self.stop)));
        }
        if self.steps == 0 {
            return Err(Error::Config("grid needs at least one step".into()));
        }
        if self.steps == 1 && self.start != self.stop {
            return Err(Error::Config("a one-step grid needs start == stop".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.stop } else { self.start + span * i as f64 / last })
            .collect()
    }
}

/// Parses `start:stop:steps`.
impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Config(format!("grid `{s}` is not start:stop:steps"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].parse().map_err(|_| bad())?;
        let stop = parts[1].parse().map_err(|_| bad())?;
        let steps = parts[2].parse().map_err(|_| bad())?;
        Grid::new(start, stop, steps)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

/// How `ψ₂` is tied to `ψ₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `l = r'` (so `l' = r`); `𝓘_LR` ranges over `[0, 1]`.
    LEqRprime,
    /// `l = l'`; always `𝓘_LR = 1`.
    LEqLprime,
    /// `l` swept, `l'` fixed.
    Free,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::LEqRprime => "l_eq_rprime",
            Constraint::LEqLprime => "l_eq_lprime",
            Constraint::Free => "free",
        })
    }
}

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l_eq_rprime" => Ok(Constraint::LEqRprime),
            "l_eq_lprime" => Ok(Constraint::LEqLprime),
            "free" => Ok(Constraint::Free),
            other => Err(Error::Config(format!("unknown constraint `{other}`"))),
        }
    }
}

/// Outer axis of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterAxis {
    /// Degree of indistinguishability; only meaningful with `l = r'`.
    Indist(Grid),
    /// Weight `l` of `ψ₁` on `L`.
    L(Grid),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub statistics: Statistics,
    pub theta: f64,
    pub target: BellTarget,
    pub constraint: Constraint,
    pub p_grid: Grid,
    pub outer: OuterAxis,
    /// Fixed `l'` for [`Constraint::Free`].
    pub lprime: Option<f64>,
}

impl SweepPlan {
    pub fn validate(&self) -> Result<()> {
        self.p_grid.validate()?;
        if self.p_grid.start < 0.0 || self.p_grid.stop > 1.0 {
            return Err(Error::Config("noise grid must lie in [0, 1]".into()));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("theta must be finite".into()));
        }
        match (self.outer, self.constraint) {
            (OuterAxis::Indist(g), Constraint::LEqRprime) => {
                g.validate()?;
                if g.start < 0.0 || g.stop > 1.0 {
                    return Err(Error::Config("indistinguishability grid must lie in [0, 1]".into()));
                }
            }
            (OuterAxis::Indist(_), c) => {
                return Err(Error::Config(format!("an indistinguishability grid needs l_eq_rprime, not {c}")))
            }
            (OuterAxis::L(g), _) => {
                g.validate()?;
                if g.start < 0.0 || g.stop > 1.0 {
                    return Err(Error::Config("l grid must lie in [0, 1]".into()));
                }
            }
        }
        match (self.constraint, self.lprime) {
            (Constraint::Free, None) => Err(Error::Config("constraint `free` needs a fixed lprime".into())),
            (Constraint::Free, Some(lp)) if !(0.0..=1.0).contains(&lp) => {
                Err(Error::Config(format!("lprime {lp} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// `(l, l')` pairs of the outer axis, in order.
    pub fn outer_points(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        match self.outer {
            OuterAxis::Indist(g) => g
                .values()
                .into_iter()
                .map(|i| {
                    let l = l_for_indist(i)?;
                    Ok((l, partner(l)))
                })
                .collect(),
            OuterAxis::L(g) => Ok(g
                .values()
                .into_iter()
                .map(|l| match self.constraint {
                    Constraint::LEqRprime => (l, partner(l)),
                    Constraint::LEqLprime => (l, l),
                    Constraint::Free => (l, self.lprime.unwrap_or_default()),
                })
                .collect()),
        }
    }
}

/// `√(1 − x²)`.
pub fn partner(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

/// `𝓘_LR` on the `l = r'` family.
pub fn indist_of_l(l: f64) -> f64 {
    let r = partner(l);
    degree_lr(l, r, r, l).unwrap_or(0.0)
}

/// Inverts `𝓘_LR(l)` on the `l = r'` branch `l ∈ [1/√2, 1]`, where it
/// decreases from 1 to 0.
pub fn l_for_indist(indist: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&indist) {
        return Err(Error::Config(format!("indistinguishability {indist} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (std::f64::consts::FRAC_1_SQRT_2, 1.0);
    if indist >= 1.0 {
        return Ok(lo);
    }
    if indist <= 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if indist_of_l(mid) > indist {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One grid point of a sweep. Metric fields are `None` when the point is
/// undetectable (post-selection probability below [`DETECTION_FLOOR`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub p: f64,
    pub l: f64,
    pub lprime: f64,
    pub theta: f64,
    pub statistics: Statistics,
    pub indist: Option<f64>,
    pub concurrence: Option<f64>,
    pub eof: Option<f64>,
    pub p_lr: f64,
    pub bell: Option<f64>,
}

impl SweepRecord {
    pub fn detectable(&self) -> bool {
        self.concurrence.is_some()
    }
}

/// Full pipeline at one point: Werner state → projection → metrics.
pub fn evaluate_point(
    statistics: Statistics,
    theta: f64,
    target: BellTarget,
    l: f64,
    lprime: f64,
    p: f64,
) -> Result<SweepRecord> {
    let spec = WernerSpec::from_weights(l, lprime, theta, p, target, statistics)?;
    let (r, rp) = (spec.psi1.r, spec.psi2.r);
    let indist = degree_lr(l, r, lprime, rp).ok();
    let mut record = SweepRecord {
        p,
        l,
        lprime,
        theta,
        statistics,
        indist,
        concurrence: None,
        eof: None,
        p_lr: 0.0,
        bell: None,
    };
    let state = werner_direct(&spec)?;
    match project(&state, &OperationalRegionSet::lr()) {
        Ok(rho) if rho.probability() >= DETECTION_FLOOR => {
            let report = analyze(&rho)?;
            record.p_lr = rho.probability();
            record.concurrence = Some(report.concurrence);
            record.eof = Some(report.eof);
            record.bell = Some(report.bell);
        }
        Ok(rho) => record.p_lr = rho.probability(),
        Err(Error::ZeroProjection) | Err(Error::NonPositiveTrace(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(record)
}

/// Evaluates every `(outer, p)` point, outer axis major. Evaluation is
/// parallel; row order is fixed by the grids.
pub fn run_sweep(plan: &SweepPlan) -> Result<Vec<SweepRecord>> {
    let outer = plan.outer_points()?;
    let ps = plan.p_grid.values();
    let points: Vec<(f64, f64, f64)> =
        outer.iter().flat_map(|&(l, lp)| ps.iter().map(move |&p| (l, lp, p))).collect();
    points
        .par_iter()
        .map(|&(l, lp, p)| evaluate_point(plan.statistics, plan.theta, plan.target, l, lp, p))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellRegionRow {
    pub p: f64,
    pub indist: Option<f64>,
    pub bell: Option<f64>,
    pub violated: bool,
}

/// Bell values and violation flags over the sweep grid.
pub fn bell_region(plan: &SweepPlan) -> Result<Vec<BellRegionRow>> {
    Ok(run_sweep(plan)?
        .into_iter()
        .map(|r| BellRegionRow {
            p: r.p,
            indist: r.indist,
            bell: r.bell,
            violated: r.bell.is_some_and(|b| b > CLASSICAL_BOUND),
        })
        .collect())
}

fn bell_at(statistics: Statistics, theta: f64, target: BellTarget, l: f64, lp: f64, p: f64) -> Result<f64> {
    let rec = evaluate_point(statistics, theta, target, l, lp, p)?;
    // undetectable points cannot certify a violation
    Ok(rec.bell.unwrap_or(0.0))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section_min<F>(mut a: f64, mut b: f64, tol: f64, mut f: F) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Worst-case (minimal) Bell value over `p ∈ [0, 1]`: a uniform grid of
/// `grid_points` followed by golden-section refinement around the grid
/// minimum. Returns `(p, B)`.
pub fn worst_case_bell(
    statistics: Statistics,
    theta: f64,
    target: BellTarget,
    l: f64,
    lp: f64,
    grid_points: usize,
) -> Result<(f64, f64)> {
    let grid = Grid::new(0.0, 1.0, grid_points.max(2))?.values();
    let values = grid
        .iter()
        .map(|&p| bell_at(statistics, theta, target, l, lp, p))
        .collect::<Result<Vec<_>>>()?;
    let (k, _) = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty grid");
    let (a, b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let (p, bell) = golden_section_min(a, b, 1e-9, |p| bell_at(statistics, theta, target, l, lp, p))?;
    Ok(if bell < values[k] { (p, bell) } else { (grid[k], values[k]) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub statistics: Statistics,
    pub theta: f64,
    pub target: BellTarget,
    /// Bisection stops once the bracket on `𝓘_LR` is narrower than this.
    pub tolerance: f64,
    pub p_grid_points: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            statistics: Statistics::Fermion,
            theta: 0.0,
            target: BellTarget::OneMinus,
            tolerance: 1e-4,
            p_grid_points: 101,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Smallest `𝓘_LR` (within tolerance) at which `B > 2` for every `p`.
    pub indist: f64,
    pub l: f64,
    /// Noise probability minimizing `B` at the threshold.
    pub worst_p: f64,
    pub worst_bell: f64,
    /// Minimum over `p` of the projected concurrence at the threshold.
    pub min_concurrence: f64,
}

/// Bisection on `𝓘_LR` (family `l = r'`) for the predicate
/// `min_p B(p) > 2`. `None` when even `𝓘_LR = 1` fails it.
pub fn find_threshold(cfg: &ThresholdConfig) -> Result<Option<ThresholdResult>> {
    if !(cfg.tolerance > 0.0) {
        return Err(Error::Config("threshold tolerance must be positive".into()));
    }
    let worst = |indist: f64| -> Result<(f64, f64, f64)> {
        let l = l_for_indist(indist)?;
        let (p, b) = worst_case_bell(cfg.statistics, cfg.theta, cfg.target, l, partner(l), cfg.p_grid_points)?;
        Ok((l, p, b))
    };
    if worst(1.0)?.2 <= CLASSICAL_BOUND {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if worst(0.0)?.2 > CLASSICAL_BOUND {
        hi = 0.0;
    }
    while hi - lo > cfg.tolerance {
        let mid = 0.5 * (lo + hi);
        if worst(mid)?.2 > CLASSICAL_BOUND {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let indist = hi;
    let (l, worst_p, worst_bell) = worst(indist)?;
    let min_concurrence = Grid::new(0.0, 1.0, cfg.p_grid_points.max(2))?
        .values()
        .into_iter()
        .map(|p| {
            evaluate_point(cfg.statistics, cfg.theta, cfg.target, l, partner(l), p)
                .map(|r| r.concurrence.unwrap_or(0.0))
        })
        .try_fold(f64::INFINITY, |acc, c| c.map(|c| acc.min(c)))?;
    Ok(Some(ThresholdResult { indist, l, worst_p, worst_bell, min_concurrence }))
}

/// Smallest `p` at which `B(p)` drops to the classical bound, located by a
/// grid scan and bisection on the first crossing. `None` if `B > 2` on all
/// of `[0, 1]` or `B ≤ 2` already at `p = 0`.
pub fn violation_boundary(
    statistics: Statistics,
    theta: f64,
    target: BellTarget,
    l: f64,
    lp: f64,
) -> Result<Option<f64>> {
    let f = |p: f64| bell_at(statistics, theta, target, l, lp, p).map(|b| b - CLASSICAL_BOUND);
    if f(0.0)? <= 0.0 {
        return Ok(None);
    }
    let grid = Grid::new(0.0, 1.0, 201)?.values();
    for w in grid.windows(2) {
        if f(w[1])? <= 0.0 {
            let (mut lo, mut hi) = (w[0], w[1]);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if f(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
    }
    Ok(None)
}
