//! Superpositions and ensembles of identical-particle elementary kets.
//!
//! States are left unnormalized; the global trace is evaluated over a
//! symmetrized basis of orbital products so that `Tr ρ` is defined even when
//! the elementary kets overlap.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::amplitude::{amplitude, ElementaryKet, Statistics};
use crate::spstate::{ModeBasis, Orbital, SingleParticleOperator, SingleParticleState};
use crate::{Error, Result};

/// Smallest global trace accepted as a physical state.
pub const TRACE_FLOOR: f64 = 1e-12;

/// `Σ_t c_t |ket_t⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureNState {
    terms: Vec<(Complex64, ElementaryKet)>,
    statistics: Statistics,
}

impl PureNState {
    pub fn new(terms: Vec<(Complex64, ElementaryKet)>) -> Result<Self> {
        let (_, first) = terms.first().ok_or(Error::EmptyState)?;
        let statistics = first.statistics();
        for (_, k) in &terms[1..] {
            if k.statistics() != statistics {
                return Err(Error::StatisticsMismatch);
            }
            if k.len() != first.len() {
                return Err(Error::ParticleCountMismatch { bra: first.len(), ket: k.len() });
            }
            if k.basis() != first.basis() {
                return Err(Error::BasisMismatch);
            }
        }
        Ok(Self { terms, statistics })
    }

    pub fn from_ket(ket: ElementaryKet) -> Self {
        let statistics = ket.statistics();
        Self { terms: vec![(Complex64::new(1.0, 0.0), ket)], statistics }
    }

    pub fn terms(&self) -> &[(Complex64, ElementaryKet)] {
        &self.terms
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particle_count(&self) -> usize {
        self.terms[0].1.len()
    }

    pub fn basis(&self) -> &ModeBasis {
        self.terms[0].1.basis()
    }

    /// `⟨bra|self⟩`.
    pub fn overlap_with(&self, bra: &ElementaryKet) -> Result<Complex64> {
        self.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, (c, k)| Ok(acc + c * amplitude(bra, k)?))
    }

    pub fn map_particles(&self, op: &SingleParticleOperator) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(c, k)| Ok((*c, k.map_particles(op)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { terms, statistics: self.statistics })
    }

    fn support(&self) -> BTreeSet<Orbital> {
        self.terms
            .iter()
            .flat_map(|(_, k)| k.particles().iter())
            .flat_map(|p| p.entries().iter().map(|(o, _)| *o))
            .collect()
    }
}

/// `⟨s|s⟩ = Σ_{a,b} c̄_a c_b ⟨ket_a|ket_b⟩`, clamped at zero.
pub fn pure_norm_sq(s: &PureNState) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (ca, ka) in &s.terms {
        for (cb, kb) in &s.terms {
            acc += ca.conj() * cb * amplitude(ka, kb).expect("terms validated at construction");
        }
    }
    acc.re.max(0.0)
}

/// `Σ_k w_k |s_k⟩⟨s_k|` with `w_k ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    ensemble: Vec<(f64, PureNState)>,
    statistics: Statistics,
}

impl MixedState {
    pub fn new(ensemble: Vec<(f64, PureNState)>) -> Result<Self> {
        let (_, first) = ensemble.first().ok_or(Error::EmptyState)?;
        let statistics = first.statistics();
        for (w, s) in &ensemble {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidWeight(*w));
            }
            if s.statistics() != statistics {
                return Err(Error::StatisticsMismatch);
            }
            if s.particle_count() != first.particle_count() {
                return Err(Error::ParticleCountMismatch {
                    bra: first.particle_count(),
                    ket: s.particle_count(),
                });
            }
            if s.basis() != first.basis() {
                return Err(Error::BasisMismatch);
            }
        }
        if ensemble.iter().all(|(w, _)| *w == 0.0) {
            return Err(Error::ZeroEnsemble);
        }
        Ok(Self { ensemble, statistics })
    }

    pub fn pure(s: PureNState) -> Self {
        let statistics = s.statistics();
        Self { ensemble: vec![(1.0, s)], statistics }
    }

    pub fn ensemble(&self) -> &[(f64, PureNState)] {
        &self.ensemble
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn particle_count(&self) -> usize {
        self.ensemble[0].1.particle_count()
    }

    pub fn basis(&self) -> &ModeBasis {
        self.ensemble[0].1.basis()
    }

    pub fn map_particles(&self, op: &SingleParticleOperator) -> Result<Self> {
        let ensemble =
            self.ensemble.iter().map(|(w, s)| Ok((*w, s.map_particles(op)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { ensemble, statistics: self.statistics })
    }

    fn support(&self) -> Vec<Orbital> {
        let mut all = BTreeSet::new();
        for (_, s) in &self.ensemble {
            all.extend(s.support());
        }
        all.into_iter().collect()
    }
}

/// Orthogonal N-particle kets built from orbital products, with their
/// squared norms: occupation factorials for bosons, 1 for fermions.
#[derive(Clone, Debug)]
pub struct SymmetrizedBasis {
    elements: Vec<ElementaryKet>,
    norms_sq: Vec<f64>,
}

impl SymmetrizedBasis {
    /// All size-`n` multisets (bosons) or sets (fermions) drawn from `orbitals`.
    pub fn over(basis: &ModeBasis, orbitals: &[Orbital], n: usize, statistics: Statistics) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoParticles);
        }
        let mut orbitals = orbitals.to_vec();
        orbitals.sort();
        orbitals.dedup();
        let states = orbitals
            .iter()
            .map(|&o| SingleParticleState::from_orbitals(basis, [(o, Complex64::new(1.0, 0.0))]))
            .collect::<Result<Vec<_>>>()?;
        let mut elements = Vec::new();
        let mut norms_sq = Vec::new();
        let mut idx = Vec::with_capacity(n);
        let repeat = statistics == Statistics::Boson;
        combinations(orbitals.len(), n, repeat, &mut idx, &mut |choice| {
            let ket = ElementaryKet::new(choice.iter().map(|&i| states[i].clone()).collect(), statistics)
                .expect("non-empty, shared basis");
            elements.push(ket);
            norms_sq.push(occupation_factorial(choice));
        });
        Ok(Self { elements, norms_sq })
    }

    /// Basis spanning the orbitals that the ensemble actually occupies.
    pub fn for_state(m: &MixedState) -> Result<Self> {
        Self::over(m.basis(), &m.support(), m.particle_count(), m.statistics())
    }

    pub fn elements(&self) -> &[ElementaryKet] {
        &self.elements
    }

    pub fn norms_sq(&self) -> &[f64] {
        &self.norms_sq
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn combinations<F: FnMut(&[usize])>(k: usize, n: usize, repeat: bool, idx: &mut Vec<usize>, f: &mut F) {
    if idx.len() == n {
        f(idx);
        return;
    }
    let start = match idx.last() {
        Some(&last) if repeat => last,
        Some(&last) => last + 1,
        None => 0,
    };
    for i in start..k {
        idx.push(i);
        combinations(k, n, repeat, idx, f);
        idx.pop();
    }
}

fn occupation_factorial(sorted: &[usize]) -> f64 {
    let mut acc = 1.0;
    let mut run = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == *v {
            run += 1.0;
        } else {
            run = 1.0;
        }
        acc *= run;
    }
    acc
}

/// Global trace `Σ_e ⟨e|ρ|e⟩ / ⟨e|e⟩` over the symmetrized basis.
pub fn mixed_trace(m: &MixedState) -> Result<f64> {
    let basis = SymmetrizedBasis::for_state(m)?;
    let mut trace = 0.0;
    for (e, norm_sq) in basis.elements.iter().zip(&basis.norms_sq) {
        for (w, s) in &m.ensemble {
            if *w > 0.0 {
                trace += w * s.overlap_with(e)?.norm_sqr() / norm_sq;
            }
        }
    }
    if !(trace > TRACE_FLOOR) {
        return Err(Error::NonPositiveTrace(trace));
    }
    Ok(trace)
}

/// `⟨bra|ρ|ket⟩ = Σ_k w_k ⟨bra|s_k⟩⟨s_k|ket⟩`.
pub fn matrix_element(bra: &ElementaryKet, m: &MixedState, ket: &ElementaryKet) -> Result<Complex64> {
    m.ensemble.iter().try_fold(Complex64::new(0.0, 0.0), |acc, (w, s)| {
        Ok(acc + *w * s.overlap_with(bra)? * s.overlap_with(ket)?.conj())
    })
}
