//! Self-verification suites: closed forms and cross-implementations checked
//! against the full numeric pipeline on seeded random inputs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amplitude::{amplitude_fast, amplitude_permsum, ElementaryKet, Statistics};
use crate::entangle::eof;
use crate::indist::degree_lr;
use crate::mixedstate::mixed_trace;
use crate::noise::{
    depolarize_then_deform, oracle_concurrence_minus, oracle_concurrence_plus, oracle_probability_minus,
    oracle_probability_plus, oracle_theta, werner_direct, werner_global_trace, BellTarget, WernerSpec,
};
use crate::scan::{evaluate_point, partner};
use crate::slocc::{project, OperationalRegionSet};
use crate::spstate::{ModeBasis, Orbital, SingleParticleState};
use crate::Result;

/// Oracle comparisons are skipped below this detection probability.
pub const MIN_PROBABILITY: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random tuples per randomized suite.
    pub samples: usize,
    /// Added to every closed-form value before comparison. Non-zero values
    /// inject a fault that the suites must detect.
    pub oracle_offset: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 0x5eed, samples: 500, oracle_offset: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl SuiteReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, checks: 0, failures: 0, max_error: 0.0, tolerance }
    }

    fn record(&mut self, error: f64) {
        self.checks += 1;
        if error.is_nan() || error > self.tolerance {
            self.failures += 1;
        }
        if error.is_nan() {
            self.max_error = f64::NAN;
        } else if !self.max_error.is_nan() {
            self.max_error = self.max_error.max(error);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

/// Runs every suite in a fixed order.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        oracle_suite(opts, BellTarget::OneMinus)?,
        oracle_suite(opts, BellTarget::OnePlus)?,
        channel_suite(opts)?,
        global_trace_suite(opts)?,
        amplitude_suite(opts)?,
        limits_suite(opts)?,
    ])
}

fn rng(opts: &VerifyOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn statistics(rng: &mut ChaCha8Rng) -> Statistics {
    if rng.gen_bool(0.5) {
        Statistics::Boson
    } else {
        Statistics::Fermion
    }
}

/// Concurrence and detection probability against the closed forms.
pub fn oracle_suite(opts: &VerifyOptions, target: BellTarget) -> Result<SuiteReport> {
    let name = match target {
        BellTarget::OneMinus => "oracle_minus",
        BellTarget::OnePlus => "oracle_plus",
    };
    let mut report = SuiteReport::new(name, 1e-9);
    let mut rng = rng(opts, target as u64 + 1);
    let mut accepted = 0;
    while accepted < opts.samples {
        let (l, lp, p): (f64, f64, f64) = (rng.gen(), rng.gen(), rng.gen());
        let stats = statistics(&mut rng);
        let (r, rp) = (partner(l), partner(lp));
        let rec = evaluate_point(stats, oracle_theta(target, stats), target, l, lp, p)?;
        if rec.p_lr <= MIN_PROBABILITY || rec.concurrence.is_none() {
            continue;
        }
        accepted += 1;
        let (c, prob) = match target {
            BellTarget::OneMinus => {
                (oracle_concurrence_minus(l, r, lp, rp, p), oracle_probability_minus(l, r, lp, rp, p, stats))
            }
            BellTarget::OnePlus => {
                (oracle_concurrence_plus(l, r, lp, rp, p), oracle_probability_plus(l, r, lp, rp, p, stats))
            }
        };
        report.record((c + opts.oracle_offset - rec.concurrence.unwrap_or(f64::NAN)).abs());
        report.record((prob + opts.oracle_offset - rec.p_lr).abs());
    }
    Ok(report)
}

/// Depolarize-then-deform against the direct Werner construction.
pub fn channel_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("channel_equivalence", 1e-10);
    let mut rng = rng(opts, 11);
    let regions = OperationalRegionSet::lr();
    let runs = (opts.samples / 5).max(1);
    let mut accepted = 0;
    while accepted < runs {
        let stats = statistics(&mut rng);
        let target = if rng.gen_bool(0.5) { BellTarget::OnePlus } else { BellTarget::OneMinus };
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let spec = WernerSpec::from_weights(rng.gen(), rng.gen(), theta, rng.gen(), target, stats)?;
        let direct = match project(&werner_direct(&spec)?, &regions) {
            Ok(rho) if rho.probability() > MIN_PROBABILITY => rho,
            _ => continue,
        };
        accepted += 1;
        let channel =
            project(&depolarize_then_deform(spec.p, target, &spec.psi1, &spec.psi2, stats)?, &regions)?;
        report.record((direct.matrix() - channel.matrix()).camax() + opts.oracle_offset);
        report.record((direct.probability() - channel.probability()).abs() + opts.oracle_offset);
    }
    Ok(report)
}

/// Global trace of the unnormalized Werner state against its closed form.
pub fn global_trace_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("werner_trace", 1e-12);
    let mut rng = rng(opts, 12);
    let mut accepted = 0;
    while accepted < (opts.samples / 2).max(1) {
        let stats = statistics(&mut rng);
        let target = if rng.gen_bool(0.5) { BellTarget::OnePlus } else { BellTarget::OneMinus };
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let spec = WernerSpec::from_weights(rng.gen(), rng.gen(), theta, rng.gen(), target, stats)?;
        let expected = werner_global_trace(&spec) + opts.oracle_offset;
        // vanishing traces are rejected by design
        let Ok(trace) = mixed_trace(&werner_direct(&spec)?) else { continue };
        accepted += 1;
        report.record((trace - expected).abs());
    }
    Ok(report)
}

fn random_ket(rng: &mut ChaCha8Rng, basis: &ModeBasis, n: usize, stats: Statistics) -> Result<ElementaryKet> {
    let particles = (0..n)
        .map(|_| {
            let amps = (0..basis.orbital_count()).map(|k| {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (Orbital::from_index(k), c)
            });
            SingleParticleState::from_orbitals(basis, amps)
        })
        .collect::<Result<Vec<_>>>()?;
    ElementaryKet::new(particles, stats)
}

/// Permutation sum against Ryser and the determinant.
pub fn amplitude_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("amplitude_engines", 1e-10);
    let mut rng = rng(opts, 13);
    let basis = ModeBasis::new(["A", "B", "C"])?;
    for k in 0..opts.samples {
        let stats = if k % 2 == 0 { Statistics::Boson } else { Statistics::Fermion };
        let n = 2 + k % 5;
        let bra = random_ket(&mut rng, &basis, n, stats)?;
        let ket = random_ket(&mut rng, &basis, n, stats)?;
        let slow = amplitude_permsum(&bra, &ket)?;
        let fast = amplitude_fast(&bra, &ket)?;
        let scale = slow.norm().max(1.0);
        report.record((slow - fast).norm() / scale + opts.oracle_offset);
    }
    Ok(report)
}

/// Noise-free, W⁺, distinguishable and indistinguishability limits.
pub fn limits_suite(opts: &VerifyOptions) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("closed_limits", 1e-9);
    let off = opts.oracle_offset;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for k in 0..=20 {
        let p = k as f64 / 20.0;
        for stats in [Statistics::Fermion, Statistics::Boson] {
            let minus = evaluate_point(stats, oracle_theta(BellTarget::OneMinus, stats), BellTarget::OneMinus, 0.6, 0.6, p)?;
            report.record((minus.concurrence.unwrap_or(f64::NAN) - 1.0 - off).abs());
            let plus = evaluate_point(stats, oracle_theta(BellTarget::OnePlus, stats), BellTarget::OnePlus, h, h, p)?;
            let w_plus = ((4.0 - 5.0 * p) / (4.0 - p)).max(0.0);
            report.record((plus.concurrence.unwrap_or(f64::NAN) - w_plus - off).abs());
            let dist = evaluate_point(stats, 0.0, BellTarget::OneMinus, 1.0, 0.0, p)?;
            report.record((dist.concurrence.unwrap_or(f64::NAN) - (1.0 - 1.5 * p).max(0.0) - off).abs());
            let c = dist.concurrence.unwrap_or(f64::NAN);
            report.record((dist.eof.unwrap_or(f64::NAN) - eof(c) - off).abs());
        }
        let fermion = evaluate_point(Statistics::Fermion, 0.0, BellTarget::OneMinus, 0.6, 0.6, p)?;
        report.record((fermion.p_lr - 2.0 * 0.36 * 0.64 - off).abs());
    }
    report.record((degree_lr(0.6, 0.8, 0.6, 0.8)? - 1.0 - off).abs());
    report.record((degree_lr(1.0, 0.0, 0.0, 1.0)? - off).abs());
    Ok(report)
}
