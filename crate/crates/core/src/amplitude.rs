//! No-label N-particle amplitudes.
//!
//! `⟨χ'₁…χ'ₙ|χ₁…χₙ⟩ = Σ_P η^P Π_i ⟨χ'_i|χ_{P_i}⟩`, i.e. the permanent (bosons)
//! or determinant (fermions) of the single-particle overlap matrix. Two routes
//! are kept: the literal permutation sum and a fast permanent/determinant
//! evaluation. They check each other.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spstate::{ModeBasis, SingleParticleOperator, SingleParticleState};
use crate::{Error, Result};

/// Largest N accepted by [`amplitude_permsum`] (8! = 40320 terms).
pub const DEFAULT_PERMSUM_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// η: +1 for bosons, −1 for fermions.
    pub fn eta(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    /// η^P for a permutation of the given parity sign.
    fn weight(self, parity: i32) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => parity as f64,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        })
    }
}

impl FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "b" => Ok(Statistics::Boson),
            "fermion" | "fermions" | "f" => Ok(Statistics::Fermion),
            other => Err(Error::Config(format!("unknown statistics `{other}`"))),
        }
    }
}

/// Product ket `|χ₁, …, χ_N⟩` of identical particles.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementaryKet {
    particles: Vec<SingleParticleState>,
    statistics: Statistics,
}

impl ElementaryKet {
    pub fn new(particles: Vec<SingleParticleState>, statistics: Statistics) -> Result<Self> {
        let first = particles.first().ok_or(Error::NoParticles)?;
        if particles.iter().any(|p| p.basis() != first.basis()) {
            return Err(Error::BasisMismatch);
        }
        Ok(Self { particles, statistics })
    }

    pub fn particles(&self) -> &[SingleParticleState] {
        &self.particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn basis(&self) -> &ModeBasis {
        self.particles[0].basis()
    }

    /// Applies the same single-particle map to every particle.
    pub fn map_particles(&self, op: &SingleParticleOperator) -> Result<Self> {
        let particles = self.particles.iter().map(|p| p.apply(op)).collect::<Result<_>>()?;
        Ok(Self { particles, statistics: self.statistics })
    }

    /// `⟨Ψ|Ψ⟩`, clamped at zero.
    pub fn norm_sqr(&self) -> f64 {
        amplitude(self, self).map(|a| a.re.max(0.0)).unwrap_or(0.0)
    }
}

/// `M[i][j] = ⟨χ'_i|χ_j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix(DMatrix<Complex64>);

impl OverlapMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension { expected: m.nrows(), rows: m.nrows(), cols: m.ncols() });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// `Σ_P η^P Π_i M[i][P_i]` by explicit enumeration.
    pub fn permutation_sum(&self, statistics: Statistics) -> Complex64 {
        let m = &self.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for_each_permutation(self.dim(), |perm, parity| {
            let term: Complex64 = perm.iter().enumerate().map(|(i, &j)| m[(i, j)]).product();
            acc += term * statistics.weight(parity);
        });
        acc
    }

    /// Permanent by Ryser's formula with Gray-code subset updates.
    ///
    /// The outer sum is compensated since its terms cancel heavily.
    pub fn permanent(&self) -> Complex64 {
        let n = self.dim();
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let m = &self.0;
        let mut row_sums = vec![NeumaierSum::default(); n];
        let mut total = NeumaierSum::default();
        let mut gray: u64 = 0;
        for k in 1..(1u64 << n) {
            let next = k ^ (k >> 1);
            let col = (next ^ gray).trailing_zeros() as usize;
            let sign = if next & (1 << col) != 0 { 1.0 } else { -1.0 };
            for (i, s) in row_sums.iter_mut().enumerate() {
                s.add(m[(i, col)] * sign);
            }
            gray = next;
            let prod: Complex64 = row_sums.iter().map(NeumaierSum::value).product();
            let sign = if (n - next.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
            total.add(prod * sign);
        }
        total.value()
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }
}

/// Neumaier-compensated complex sum.
#[derive(Clone, Default)]
struct NeumaierSum {
    re: (f64, f64),
    im: (f64, f64),
}

impl NeumaierSum {
    fn add(&mut self, z: Complex64) {
        fn step((sum, comp): &mut (f64, f64), x: f64) {
            let t = *sum + x;
            *comp += if sum.abs() >= x.abs() { (*sum - t) + x } else { (x - t) + *sum };
            *sum = t;
        }
        step(&mut self.re, z.re);
        step(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn check_compatible(bra: &ElementaryKet, ket: &ElementaryKet) -> Result<()> {
    if bra.len() != ket.len() {
        return Err(Error::ParticleCountMismatch { bra: bra.len(), ket: ket.len() });
    }
    if bra.statistics != ket.statistics {
        return Err(Error::StatisticsMismatch);
    }
    if bra.basis() != ket.basis() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

pub fn overlap_matrix(bra: &ElementaryKet, ket: &ElementaryKet) -> Result<OverlapMatrix> {
    check_compatible(bra, ket)?;
    let n = bra.len();
    let m = DMatrix::from_fn(n, n, |i, j| bra.particles[i].inner_unchecked(&ket.particles[j]));
    Ok(OverlapMatrix(m))
}

/// Literal permutation sum, refusing `N > DEFAULT_PERMSUM_CAP`.
pub fn amplitude_permsum(bra: &ElementaryKet, ket: &ElementaryKet) -> Result<Complex64> {
    amplitude_permsum_capped(bra, ket, DEFAULT_PERMSUM_CAP)
}

pub fn amplitude_permsum_capped(
    bra: &ElementaryKet,
    ket: &ElementaryKet,
    cap: usize,
) -> Result<Complex64> {
    check_compatible(bra, ket)?;
    if bra.len() > cap {
        return Err(Error::PermutationCapExceeded { n: bra.len(), cap });
    }
    Ok(overlap_matrix(bra, ket)?.permutation_sum(bra.statistics))
}

/// Permanent (bosons) or determinant (fermions) of the overlap matrix.
pub fn amplitude_fast(bra: &ElementaryKet, ket: &ElementaryKet) -> Result<Complex64> {
    let m = overlap_matrix(bra, ket)?;
    Ok(match bra.statistics {
        Statistics::Boson => m.permanent(),
        Statistics::Fermion => m.determinant(),
    })
}

/// The amplitude used by the rest of the crate.
pub fn amplitude(bra: &ElementaryKet, ket: &ElementaryKet) -> Result<Complex64> {
    check_compatible(bra, ket)?;
    if bra.len() == 2 {
        // closed two-particle form, ⟨1|1⟩⟨2|2⟩ + η⟨1|2⟩⟨2|1⟩
        let (b, k) = (&bra.particles, &ket.particles);
        let direct = b[0].inner_unchecked(&k[0]) * b[1].inner_unchecked(&k[1]);
        let exchange = b[0].inner_unchecked(&k[1]) * b[1].inner_unchecked(&k[0]);
        return Ok(direct + exchange * bra.statistics.eta());
    }
    amplitude_fast(bra, ket)
}

/// Visits every permutation of `0..n` with its parity sign (+1 even, −1 odd).
///
/// Heap's algorithm: consecutive permutations differ by one transposition, so
/// the sign flips at every step.
pub fn for_each_permutation<F: FnMut(&[usize], i32)>(n: usize, mut f: F) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1;
    f(&a, sign);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            f(&a, sign);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}
