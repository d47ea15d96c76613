//! Entropic degree of spatial indistinguishability.
//!
//! For N particles and N detection regions, every permutation `P` of the
//! wave functions onto the regions has joint probability
//! `Π_i |⟨R_i|ψ_{P_i}⟩|²`; the degree of indistinguishability is the Shannon
//! entropy (bits) of these probabilities after normalization. Spin is
//! summed out.

use std::collections::BTreeMap;

use crate::amplitude::for_each_permutation;
use crate::slocc::OperationalRegionSet;
use crate::spstate::SingleParticleState;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct IndistinguishabilityBreakdown {
    /// Permutation `P` (region `i` fed by state `P[i]`) → joint probability.
    pub joint_probs: BTreeMap<Vec<usize>, f64>,
    pub normalizer: f64,
    pub entropy: f64,
}

impl IndistinguishabilityBreakdown {
    pub fn probability(&self, perm: &[usize]) -> f64 {
        self.joint_probs.get(perm).copied().unwrap_or(0.0)
    }
}

/// `−x log₂ x` with `0 log₂ 0 = 0`.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Two-particle degree `𝓘_LR` over regions `[L, R]`.
pub fn degree_two(
    psi1: &SingleParticleState,
    psi2: &SingleParticleState,
    regions: &OperationalRegionSet,
) -> Result<IndistinguishabilityBreakdown> {
    if regions.len() != 2 {
        return Err(Error::InvalidRegions(format!("has {} regions, expected 2", regions.len())));
    }
    degree_n(&[psi1.clone(), psi2.clone()], regions)
}

/// N-particle degree `𝓘_α`.
pub fn degree_n(
    states: &[SingleParticleState],
    regions: &OperationalRegionSet,
) -> Result<IndistinguishabilityBreakdown> {
    let n = states.len();
    if n == 0 {
        return Err(Error::NoParticles);
    }
    if regions.len() != n {
        return Err(Error::InvalidRegions(format!("has {} regions for {n} states", regions.len())));
    }
    let basis = states[0].basis();
    if states.iter().any(|s| s.basis() != basis) {
        return Err(Error::BasisMismatch);
    }
    let modes = regions.modes(basis)?;
    // weight[i][j] = P(region i | state j)
    let weight: Vec<Vec<f64>> =
        modes.iter().map(|&m| states.iter().map(|s| s.mode_weight(m)).collect()).collect();

    let mut joint_probs = BTreeMap::new();
    for_each_permutation(n, |perm, _| {
        let p: f64 = perm.iter().enumerate().map(|(i, &j)| weight[i][j]).product();
        joint_probs.insert(perm.to_vec(), p);
    });
    let normalizer: f64 = joint_probs.values().sum();
    if !(normalizer > 0.0) {
        return Err(Error::Undetectable);
    }
    let entropy = joint_probs.values().map(|&p| xlog2x(p / normalizer)).sum::<f64>().max(0.0);
    Ok(IndistinguishabilityBreakdown { joint_probs, normalizer, entropy })
}

/// Closed form of `𝓘_LR` for `ψ₁ = l|L⟩ + r|R⟩`, `ψ₂ = l'|L⟩ + r'|R⟩`.
pub fn degree_lr(l: f64, r: f64, lp: f64, rp: f64) -> Result<f64> {
    let p12 = (l * rp).powi(2);
    let p21 = (lp * r).powi(2);
    let z = p12 + p21;
    if !(z > 0.0) {
        return Err(Error::Undetectable);
    }
    Ok(xlog2x(p12 / z) + xlog2x(p21 / z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spstate::{make_peaked, ModeBasis, PeakedParams, Spin};
    use num_complex::Complex64;

    fn peaked(l: f64, r: f64) -> SingleParticleState {
        make_peaked(&PeakedParams::new(l, r, 0.0, Spin::Up).unwrap(), &ModeBasis::lr()).unwrap()
    }

    #[test]
    fn distinguishable_is_zero() {
        let d = degree_two(&peaked(1.0, 0.0), &peaked(0.0, 1.0), &OperationalRegionSet::lr()).unwrap();
        assert_eq!(d.entropy, 0.0);
        assert_eq!(d.probability(&[0, 1]), 1.0);
        assert_eq!(d.probability(&[1, 0]), 0.0);
    }

    #[test]
    fn equal_profiles_are_maximal() {
        for l in [0.1, 0.5, std::f64::consts::FRAC_1_SQRT_2, 0.93] {
            let r = (1.0f64 - l * l).sqrt();
            let d = degree_two(&peaked(l, r), &peaked(l, r), &OperationalRegionSet::lr()).unwrap();
            assert_eq!(d.entropy, 1.0, "l = {l}");
        }
    }

    #[test]
    fn partial_overlap_value() {
        let d = degree_two(&peaked(0.8, 0.6), &peaked(0.6, 0.8), &OperationalRegionSet::lr()).unwrap();
        assert!((d.probability(&[0, 1]) - 0.4096).abs() < 1e-15);
        assert!((d.probability(&[1, 0]) - 0.1296).abs() < 1e-15);
        // 50-digit reference
        assert!((d.entropy - 0.795_631_931_823_832_9).abs() < 1e-14);
        assert!((degree_lr(0.8, 0.6, 0.6, 0.8).unwrap() - d.entropy).abs() < 1e-15);
        assert!((d.normalizer - d.joint_probs.values().sum::<f64>()).abs() < 1e-15);
    }

    #[test]
    fn three_regions() {
        let b = ModeBasis::new(["R1", "R2", "R3"]).unwrap();
        let regions = OperationalRegionSet::new(["R1", "R2", "R3"]).unwrap();
        let local: Vec<_> = ["R1", "R2", "R3"]
            .iter()
            .map(|l| SingleParticleState::localized(&b, l, Spin::Up).unwrap())
            .collect();
        assert_eq!(degree_n(&local, &regions).unwrap().entropy, 0.0);

        let a = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        let uniform =
            SingleParticleState::from_labels(&b, [("R1", Spin::Up, a), ("R2", Spin::Up, a), ("R3", Spin::Down, a)])
                .unwrap();
        let d = degree_n(&[uniform.clone(), uniform.clone(), uniform], &regions).unwrap();
        assert!((d.entropy - 6f64.log2()).abs() < 1e-12);
        assert_eq!(d.joint_probs.len(), 6);
    }

    #[test]
    fn undetectable_errors() {
        let l = peaked(1.0, 0.0);
        assert_eq!(degree_two(&l, &l, &OperationalRegionSet::lr()).unwrap_err(), Error::Undetectable);
        assert_eq!(degree_lr(1.0, 0.0, 1.0, 0.0).unwrap_err(), Error::Undetectable);
        let three = OperationalRegionSet::new(["L", "R", "X"]).unwrap();
        assert!(matches!(degree_two(&l, &l, &three), Err(Error::InvalidRegions(_))));
    }
}
