//! Werner states of two identical qubits.
//!
//! Two constructions are provided and must agree after projection:
//!
//! * [`werner_direct`] mixes the (unnormalized) Bell states
//!   `|1_±⟩, |2_±⟩` built on `ψ₁, ψ₂`;
//! * [`depolarize_then_deform`] starts from a Bell state on separated modes
//!   `L1, L2`, applies a depolarizing channel to the spin in `L1` and then
//!   substitutes `|L1⟩ → |ψ₁⟩`, `|L2⟩ → |ψ₂⟩`.
//!
//! The closed forms for the projected concurrence and detection probability
//! (valid for the statistics/phase pairings documented on each function)
//! serve as oracles for the numeric pipeline.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{ElementaryKet, Statistics};
use crate::mixedstate::{MixedState, PureNState};
use crate::spstate::{
    make_peaked, ModeBasis, SingleParticleOperator, SingleParticleState, SpatialProfile, Spin,
};
use crate::{Error, Result};

/// Target Bell state of the preparation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellTarget {
    #[serde(rename = "1_plus")]
    OnePlus,
    #[serde(rename = "1_minus")]
    OneMinus,
}

impl BellTarget {
    pub fn label(self) -> BellLabel {
        match self {
            BellTarget::OnePlus => BellLabel::OnePlus,
            BellTarget::OneMinus => BellLabel::OneMinus,
        }
    }
}

impl fmt::Display for BellTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellTarget::OnePlus => "1_plus",
            BellTarget::OneMinus => "1_minus",
        })
    }
}

impl FromStr for BellTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1_plus" | "1+" | "plus" | "one_plus" => Ok(BellTarget::OnePlus),
            "1_minus" | "1-" | "minus" | "one_minus" => Ok(BellTarget::OneMinus),
            other => Err(Error::Config(format!("unknown target `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellLabel {
    OnePlus,
    OneMinus,
    TwoPlus,
    TwoMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] =
        [BellLabel::OnePlus, BellLabel::OneMinus, BellLabel::TwoPlus, BellLabel::TwoMinus];
}

/// `|1_±⟩ = (|ψ₁↑,ψ₂↓⟩ ± |ψ₁↓,ψ₂↑⟩)/√2`, `|2_±⟩ = (|ψ₁↑,ψ₂↑⟩ ± |ψ₁↓,ψ₂↓⟩)/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellStates {
    pub one_plus: PureNState,
    pub one_minus: PureNState,
    pub two_plus: PureNState,
    pub two_minus: PureNState,
}

impl BellStates {
    pub fn get(&self, label: BellLabel) -> &PureNState {
        match label {
            BellLabel::OnePlus => &self.one_plus,
            BellLabel::OneMinus => &self.one_minus,
            BellLabel::TwoPlus => &self.two_plus,
            BellLabel::TwoMinus => &self.two_minus,
        }
    }

    fn from_orbital_fn<F>(wave: F, statistics: Statistics) -> Result<Self>
    where
        F: Fn(usize, Spin) -> Result<SingleParticleState>,
    {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let pair = |s1: Spin, s2: Spin| -> Result<ElementaryKet> {
            ElementaryKet::new(vec![wave(0, s1)?, wave(1, s2)?], statistics)
        };
        let combo = |a: ElementaryKet, b: ElementaryKet, sign: f64| PureNState::new(vec![(h, a), (h * sign, b)]);
        use Spin::{Down, Up};
        Ok(Self {
            one_plus: combo(pair(Up, Down)?, pair(Down, Up)?, 1.0)?,
            one_minus: combo(pair(Up, Down)?, pair(Down, Up)?, -1.0)?,
            two_plus: combo(pair(Up, Up)?, pair(Down, Down)?, 1.0)?,
            two_minus: combo(pair(Up, Up)?, pair(Down, Down)?, -1.0)?,
        })
    }
}

/// The four unnormalized Bell states on the `[L, R]` basis.
pub fn bell_states(psi1: &SpatialProfile, psi2: &SpatialProfile, statistics: Statistics) -> Result<BellStates> {
    psi1.validate()?;
    psi2.validate()?;
    let basis = ModeBasis::lr();
    let profiles = [psi1, psi2];
    BellStates::from_orbital_fn(|k, s| make_peaked(&profiles[k].with_spin(s), &basis), statistics)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerSpec {
    pub p: f64,
    pub target: BellTarget,
    pub psi1: SpatialProfile,
    pub psi2: SpatialProfile,
    pub statistics: Statistics,
}

impl WernerSpec {
    pub fn new(
        p: f64,
        target: BellTarget,
        psi1: SpatialProfile,
        psi2: SpatialProfile,
        statistics: Statistics,
    ) -> Result<Self> {
        let spec = Self { p, target, psi1, psi2, statistics };
        spec.validate()?;
        Ok(spec)
    }

    /// `ψ₁ = l|L⟩ + r|R⟩`, `ψ₂ = l'|L⟩ + r' e^{iθ}|R⟩` with `r, r'` fixed by normalization.
    pub fn from_weights(
        l: f64,
        lp: f64,
        theta: f64,
        p: f64,
        target: BellTarget,
        statistics: Statistics,
    ) -> Result<Self> {
        Self::new(p, target, SpatialProfile::from_l(l, 0.0)?, SpatialProfile::from_l(lp, theta)?, statistics)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidProbability(self.p));
        }
        self.psi1.validate()?;
        self.psi2.validate()
    }
}

/// `𝒲^± = (1−p)|1_±⟩⟨1_±| + (p/4) Σ_{i,s} |i_s⟩⟨i_s|`, unnormalized.
pub fn werner_direct(spec: &WernerSpec) -> Result<MixedState> {
    spec.validate()?;
    let bell = bell_states(&spec.psi1, &spec.psi2, spec.statistics)?;
    werner_from_bell(&bell, spec.p, spec.target)
}

fn werner_from_bell(bell: &BellStates, p: f64, target: BellTarget) -> Result<MixedState> {
    let mut ensemble = vec![(1.0 - p, bell.get(target.label()).clone())];
    ensemble.extend(BellLabel::ALL.iter().map(|&l| (p / 4.0, bell.get(l).clone())));
    MixedState::new(ensemble)
}

/// Kraus operators of a single-qubit depolarizing channel localized in one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    pub operators: [Matrix2<Complex64>; 4],
    pub acting_mode: String,
}

impl KrausSet {
    /// `K₀ = √(1 − 3p/4) 𝕀₂`, `K_i = √(p/4) σ_i`.
    pub fn depolarizing(p: f64, acting_mode: &str) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        let c = |x: f64| Complex64::new(x, 0.0);
        let i = Complex64::i();
        let a = c((1.0 - 0.75 * p).sqrt());
        let b = c((p / 4.0).sqrt());
        Ok(Self {
            operators: [
                Matrix2::new(a, c(0.0), c(0.0), a),
                Matrix2::new(c(0.0), b, b, c(0.0)),
                Matrix2::new(c(0.0), -i * b, i * b, c(0.0)),
                Matrix2::new(b, c(0.0), c(0.0), -b),
            ],
            acting_mode: acting_mode.to_owned(),
        })
    }

    /// `max |Σ K†K − 𝕀|`.
    pub fn completeness_defect(&self) -> f64 {
        let sum: Matrix2<Complex64> = self.operators.iter().map(|k| k.adjoint() * k).sum();
        (sum - Matrix2::identity()).camax()
    }

    fn single_particle(&self, basis: &ModeBasis) -> Result<Vec<SingleParticleOperator>> {
        self.operators
            .iter()
            .map(|k| {
                let rows = [[k[(0, 0)], k[(0, 1)]], [k[(1, 0)], k[(1, 1)]]];
                SingleParticleOperator::on_spin(basis, &self.acting_mode, rows)
            })
            .collect()
    }

    /// `ρ → Σ_i K_i ρ K_i†` with each `K_i` acting on the spin in `acting_mode`.
    pub fn apply(&self, m: &MixedState) -> Result<MixedState> {
        let ops = self.single_particle(m.basis())?;
        let mut ensemble = Vec::with_capacity(m.ensemble().len() * ops.len());
        for (w, s) in m.ensemble() {
            for op in &ops {
                ensemble.push((*w, s.map_particles(op)?));
            }
        }
        MixedState::new(ensemble)
    }
}

/// Mode basis used by the channel construction: `[L, R, L1, L2]`.
pub fn channel_basis() -> ModeBasis {
    ModeBasis::new(["L", "R", "L1", "L2"]).expect("static labels are distinct")
}

/// Target Bell state on separated modes `L1, L2` after the depolarizing
/// channel acts on the spin in `L1`.
pub fn depolarized_bell(p: f64, target: BellTarget, statistics: Statistics) -> Result<MixedState> {
    let basis = channel_basis();
    let modes = ["L1", "L2"];
    let bell = BellStates::from_orbital_fn(|k, s| SingleParticleState::localized(&basis, modes[k], s), statistics)?;
    let initial = MixedState::pure(bell.get(target.label()).clone());
    KrausSet::depolarizing(p, "L1")?.apply(&initial)
}

/// Spatial deformation `|L1⟩ → |ψ₁⟩`, `|L2⟩ → |ψ₂⟩` applied to every particle.
pub fn deform(m: &MixedState, psi1: &SpatialProfile, psi2: &SpatialProfile) -> Result<MixedState> {
    let basis = m.basis();
    let (l, r) = (basis.require("L")?, basis.require("R")?);
    let mut op = SingleParticleOperator::identity(basis);
    for (label, psi) in [("L1", psi1), ("L2", psi2)] {
        psi.validate()?;
        let (al, ar) = psi.amplitudes();
        op.deform_mode(label, &[(l, al), (r, ar)])?;
    }
    m.map_particles(&op)
}

/// Physical route to `𝒲^±`: localized depolarizing channel, then deformation.
pub fn depolarize_then_deform(
    p: f64,
    target: BellTarget,
    psi1: &SpatialProfile,
    psi2: &SpatialProfile,
    statistics: Statistics,
) -> Result<MixedState> {
    deform(&depolarized_bell(p, target, statistics)?, psi1, psi2)
}

/// Phase of `ψ₂` for which the closed forms hold: `|1_−⟩` needs θ = 0 for
/// fermions and π for bosons, `|1_+⟩` the opposite.
pub fn oracle_theta(target: BellTarget, statistics: Statistics) -> f64 {
    match (target, statistics) {
        (BellTarget::OneMinus, Statistics::Fermion) | (BellTarget::OnePlus, Statistics::Boson) => 0.0,
        _ => std::f64::consts::PI,
    }
}

fn cross_weight(l: f64, r: f64, lp: f64, rp: f64, k: f64) -> f64 {
    l * l * rp * rp + lp * lp * r * r + l * rp * r * lp * k
}

/// Projected concurrence of `𝒲^−` (fermions θ = 0, bosons θ = π).
pub fn oracle_concurrence_minus(l: f64, r: f64, lp: f64, rp: f64, p: f64) -> f64 {
    let num = (4.0 - 3.0 * p) * (l * rp + lp * r).powi(2) - 3.0 * p * (l * rp - lp * r).powi(2);
    let den = 4.0 * cross_weight(l, r, lp, rp, 2.0 - 3.0 * p);
    (num / den).max(0.0)
}

/// Detection probability of `𝒲^−` (fermions θ = 0, bosons θ = π).
pub fn oracle_probability_minus(l: f64, r: f64, lp: f64, rp: f64, p: f64, statistics: Statistics) -> f64 {
    let eta = statistics.eta();
    let num = 2.0 * cross_weight(l, r, lp, rp, 2.0 - 3.0 * p);
    num / (2.0 - eta * (2.0 - 3.0 * p) * (l * lp - eta * r * rp).powi(2))
}

/// Projected concurrence of `𝒲^+` (fermions θ = π, bosons θ = 0).
pub fn oracle_concurrence_plus(l: f64, r: f64, lp: f64, rp: f64, p: f64) -> f64 {
    let num = (4.0 - 5.0 * p) * (l * rp + lp * r).powi(2) - p * (l * rp - lp * r).powi(2);
    let den = 4.0 * cross_weight(l, r, lp, rp, 2.0 - p);
    (num / den).max(0.0)
}

/// Detection probability of `𝒲^+` (fermions θ = π, bosons θ = 0).
pub fn oracle_probability_plus(l: f64, r: f64, lp: f64, rp: f64, p: f64, statistics: Statistics) -> f64 {
    let eta = statistics.eta();
    let num = 2.0 * cross_weight(l, r, lp, rp, 2.0 - p);
    num / (2.0 + eta * (2.0 - p) * (l * lp + eta * r * rp).powi(2))
}

/// Closed-form global trace `1 + η|⟨ψ₁|ψ₂⟩|²[p/2 ± (1−p)]`.
pub fn werner_global_trace(spec: &WernerSpec) -> f64 {
    let (a1, b1) = spec.psi1.amplitudes();
    let (a2, b2) = spec.psi2.amplitudes();
    let s = (a1.conj() * a2 + b1.conj() * b2).norm_sqr();
    let sign = match spec.target {
        BellTarget::OnePlus => 1.0,
        BellTarget::OneMinus => -1.0,
    };
    1.0 + spec.statistics.eta() * s * (spec.p / 2.0 + sign * (1.0 - spec.p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixedstate::{mixed_trace, pure_norm_sq};
    use crate::slocc::{project, OperationalRegionSet};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn prof(l: f64, theta: f64) -> SpatialProfile {
        SpatialProfile::from_l(l, theta).unwrap()
    }

    #[test]
    fn bell_norms() {
        let sep = bell_states(&prof(1.0, 0.0), &prof(0.0, 0.0), Statistics::Fermion).unwrap();
        for l in BellLabel::ALL {
            assert!((pure_norm_sq(sep.get(l)) - 1.0).abs() < 1e-15);
        }
        let same = bell_states(&prof(0.6, 0.0), &prof(0.6, 0.0), Statistics::Fermion).unwrap();
        assert!(pure_norm_sq(&same.one_plus) < 1e-15);
        // |⟨ψ₁|ψ₂⟩|² = 1/2 with l = 1, l' = 1/√2
        let half = bell_states(&prof(1.0, 0.0), &prof(FRAC_1_SQRT_2, 0.0), Statistics::Boson).unwrap();
        assert!((pure_norm_sq(&half.two_plus) - 1.5).abs() < 1e-15);
        assert!((pure_norm_sq(&half.two_minus) - 1.5).abs() < 1e-15);
        assert!((pure_norm_sq(&half.one_minus) - 0.5).abs() < 1e-15);
        let half_f = bell_states(&prof(1.0, 0.0), &prof(FRAC_1_SQRT_2, 0.0), Statistics::Fermion).unwrap();
        assert!((pure_norm_sq(&half_f.one_minus) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn kraus_completeness() {
        for p in [0.0, 0.3, 1.0] {
            assert!(KrausSet::depolarizing(p, "L1").unwrap().completeness_defect() < 1e-15);
        }
        assert!(KrausSet::depolarizing(1.5, "L1").is_err());
    }

    #[test]
    fn channel_preserves_trace() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for p in [0.0, 0.37, 1.0] {
                let m = depolarized_bell(p, BellTarget::OneMinus, stats).unwrap();
                assert!((mixed_trace(&m).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn noiseless_limits() {
        let spec = WernerSpec::from_weights(0.6, 0.8, 0.0, 0.0, BellTarget::OneMinus, Statistics::Fermion).unwrap();
        let m = werner_direct(&spec).unwrap();
        let regions = OperationalRegionSet::lr();
        let direct = project(&m, &regions).unwrap();
        let target = MixedState::pure(bell_states(&spec.psi1, &spec.psi2, spec.statistics).unwrap().one_minus);
        let pure = project(&target, &regions).unwrap();
        assert!((direct.matrix() - pure.matrix()).camax() < 1e-15);
        let chan = project(&depolarize_then_deform(0.0, spec.target, &spec.psi1, &spec.psi2, spec.statistics).unwrap(), &regions)
            .unwrap();
        assert!((chan.matrix() - pure.matrix()).camax() < 1e-14);
    }

    #[test]
    fn global_trace_closed_form() {
        for stats in [Statistics::Boson, Statistics::Fermion] {
            for target in [BellTarget::OnePlus, BellTarget::OneMinus] {
                let spec = WernerSpec::from_weights(0.3, 0.9, 1.2, 0.45, target, stats).unwrap();
                let m = werner_direct(&spec).unwrap();
                assert!((mixed_trace(&m).unwrap() - werner_global_trace(&spec)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn oracle_special_values() {
        let h = FRAC_1_SQRT_2;
        for p in [0.0, 0.3, 1.0] {
            assert!((oracle_concurrence_minus(h, h, h, h, p) - 1.0).abs() < 1e-15);
            assert!((oracle_probability_minus(h, h, h, h, p, Statistics::Fermion) - 0.5).abs() < 1e-15);
            assert!((oracle_probability_minus(h, h, h, h, p, Statistics::Boson) - (1.0 - 0.75 * p)).abs() < 1e-15);
            assert!((oracle_probability_plus(h, h, h, h, p, Statistics::Fermion) - (1.0 - p / 4.0)).abs() < 1e-15);
            assert!((oracle_probability_plus(h, h, h, h, p, Statistics::Boson) - 0.5).abs() < 1e-15);
        }
        assert!((oracle_concurrence_minus(1.0, 0.0, 0.0, 1.0, 0.4) - 0.4).abs() < 1e-15);
        assert!((oracle_concurrence_plus(h, h, h, h, 0.4) - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(oracle_concurrence_plus(h, h, h, h, 0.8), 0.0);
        assert_eq!(oracle_concurrence_plus(h, h, h, h, 0.95), 0.0);
        // 50-digit reference
        assert!((oracle_concurrence_minus(0.8, 0.6, 0.6, 0.8, 0.5) - 0.910_146_699_266_503_7).abs() < 1e-15);
        assert_eq!(oracle_theta(BellTarget::OneMinus, Statistics::Boson), PI);
        assert_eq!(oracle_theta(BellTarget::OnePlus, Statistics::Boson), 0.0);
    }

    #[test]
    fn target_parsing() {
        assert_eq!("1_minus".parse::<BellTarget>().unwrap(), BellTarget::OneMinus);
        assert_eq!("1+".parse::<BellTarget>().unwrap(), BellTarget::OnePlus);
        assert!("2_plus".parse::<BellTarget>().is_err());
        assert_eq!(BellTarget::OnePlus.to_string(), "1_plus");
    }
}
