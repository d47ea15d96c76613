//! Post-selection on one particle per separated operational region.
//!
//! The projected matrix lives on the computational basis `|R₁τ₁, …, R_Nτ_N⟩`
//! ordered with the first region as the most significant bit and `↑ = 0`, so
//! for two regions the order is `{↑↑, ↑↓, ↓↑, ↓↓}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::amplitude::ElementaryKet;
use crate::mixedstate::{mixed_trace, MixedState};
use crate::spstate::{ModeBasis, SingleParticleState, Spin};
use crate::{Error, Result};

/// Detection probabilities at or below this are treated as zero.
pub const ZERO_PROBABILITY: f64 = 1e-14;
/// Eigenvalues above `-PSD_TOLERANCE` are clamped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationalRegionSet {
    labels: Vec<String>,
}

impl OperationalRegionSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidRegions("is empty".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidRegions(format!("repeats `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    /// `[L, R]`.
    pub fn lr() -> Self {
        Self { labels: vec!["L".into(), "R".into()] }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn modes(&self, basis: &ModeBasis) -> Result<Vec<usize>> {
        self.labels.iter().map(|l| basis.require(l)).collect()
    }

    /// Spins of computational-basis index `idx`.
    pub fn spins_of(&self, idx: usize) -> Vec<Spin> {
        let n = self.len();
        (0..n).map(|k| Spin::from_index((idx >> (n - 1 - k)) & 1)).collect()
    }

    /// `|R₁τ₁, …, R_Nτ_N⟩` for every computational index, in order.
    pub fn computational_kets(
        &self,
        basis: &ModeBasis,
        statistics: crate::amplitude::Statistics,
    ) -> Result<Vec<ElementaryKet>> {
        let modes = self.modes(basis)?;
        (0..1usize << self.len())
            .map(|idx| {
                let particles = modes
                    .iter()
                    .zip(self.spins_of(idx))
                    .map(|(&m, s)| SingleParticleState::localized(basis, &basis.labels()[m], s))
                    .collect::<Result<Vec<_>>>()?;
                ElementaryKet::new(particles, statistics)
            })
            .collect()
    }
}

/// Normalized state on the computational basis after post-selection, with the
/// probability of the post-selection succeeding.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedDensityMatrix {
    matrix: DMatrix<Complex64>,
    probability: f64,
}

impl ProjectedDensityMatrix {
    /// Wraps an explicit density matrix (probability 1), checking it is
    /// square with a power-of-two size, Hermitian, unit-trace and PSD.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self { matrix, probability: 1.0 };
        rho.validate()?;
        Ok(rho)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Eigenvalues in ascending order, tiny negatives clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev.into_iter().map(|x| if x < 0.0 && x > -PSD_TOLERANCE { 0.0 } else { x }).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let (rows, cols) = self.matrix.shape();
        if rows != cols || !rows.is_power_of_two() || rows < 2 {
            let expected = rows.next_power_of_two().max(2);
            return Err(Error::Dimension { expected, rows, cols });
        }
        let asym = (&self.matrix - self.matrix.adjoint()).camax();
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::Config(format!("matrix is not Hermitian (deviation {asym:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::Config(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOLERANCE {
            return Err(Error::Config(format!("negative eigenvalue {min:e}")));
        }
        if !(0.0..=1.0 + 1e-12).contains(&self.probability) {
            return Err(Error::InvalidProbability(self.probability));
        }
        Ok(())
    }
}

/// `ρ_R = Π ρ Π / Tr(Π ρ)` with `P = Tr(Π ρ) / Tr ρ`.
pub fn project(m: &MixedState, regions: &OperationalRegionSet) -> Result<ProjectedDensityMatrix> {
    if regions.len() != m.particle_count() {
        return Err(Error::InvalidRegions(format!(
            "has {} regions for {} particles",
            regions.len(),
            m.particle_count()
        )));
    }
    let global = mixed_trace(m)?;
    let kets = regions.computational_kets(m.basis(), m.statistics())?;
    let dim = kets.len();
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (w, s) in m.ensemble() {
        if *w == 0.0 {
            continue;
        }
        let amps = kets.iter().map(|k| s.overlap_with(k)).collect::<Result<Vec<_>>>()?;
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += *w * amps[i] * amps[j].conj();
            }
        }
    }
    let captured: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    let probability = captured / global;
    if !(probability > ZERO_PROBABILITY) {
        return Err(Error::ZeroProjection);
    }
    rho /= Complex64::new(captured, 0.0);
    Ok(ProjectedDensityMatrix { matrix: rho, probability })
}

/// Post-selection success probability alone.
pub fn slocc_probability(m: &MixedState, regions: &OperationalRegionSet) -> Result<f64> {
    project(m, regions).map(|r| r.probability)
}
