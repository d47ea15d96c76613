//! Single-particle states on a finite orthonormal basis of spatial modes
//! tensored with a two-level pseudospin.
//!
//! A spatial wave function such as `l|L⟩ + r e^{iθ}|R⟩` is exactly a vector
//! over mode labels, so every overlap reduces to a finite sum. Amplitudes are
//! stored sparsely and sorted by [`Orbital`], which keeps inner products a
//! single merge pass.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on `l² + r² = 1` for peaked wave functions.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Ordered list of distinct spatial-mode labels.
#[derive(Clone)]
pub struct ModeBasis {
    labels: Arc<[String]>,
}

impl ModeBasis {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyBasis);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateMode(label.clone()));
            }
        }
        Ok(Self { labels: labels.into() })
    }

    /// The two-region basis `[L, R]`.
    pub fn lr() -> Self {
        Self::new(["L", "R"]).expect("static labels are distinct")
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

    /// Number of (mode, spin) orbitals.
    pub fn orbital_count(&self) -> usize {
        2 * self.labels.len()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index(label).ok_or_else(|| Error::UnknownMode(label.to_owned()))
    }

    pub fn orbital(&self, label: &str, spin: Spin) -> Result<Orbital> {
        Ok(Orbital { mode: self.require(label)?, spin })
    }
}

impl PartialEq for ModeBasis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for ModeBasis {}

impl fmt::Debug for ModeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.labels.iter()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    /// `0` for up, `1` for down; the computational-basis bit.
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Spin {
        if i == 0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// A (mode, spin) pair; one element of the single-particle basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orbital {
    pub mode: usize,
    pub spin: Spin,
}

impl Orbital {
    pub fn new(mode: usize, spin: Spin) -> Self {
        Self { mode, spin }
    }

    /// Dense index `2·mode + spin`.
    pub fn index(self) -> usize {
        2 * self.mode + self.spin.index()
    }

    pub fn from_index(i: usize) -> Self {
        Self { mode: i / 2, spin: Spin::from_index(i % 2) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleState {
    basis: ModeBasis,
    // sorted by orbital, no explicit zeros
    amps: Vec<(Orbital, Complex64)>,
}

impl SingleParticleState {
    /// Builds a state from orbital amplitudes; repeated orbitals are summed.
    pub fn from_orbitals<I>(basis: &ModeBasis, amps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Orbital, Complex64)>,
    {
        let mut map: BTreeMap<Orbital, Complex64> = BTreeMap::new();
        for (orb, c) in amps {
            if orb.mode >= basis.len() {
                return Err(Error::UnknownMode(format!("#{}", orb.mode)));
            }
            *map.entry(orb).or_default() += c;
        }
        let amps = map.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect();
        Ok(Self { basis: basis.clone(), amps })
    }

    /// Builds a state from `(mode label, spin) → amplitude` entries.
    pub fn from_labels<'a, I>(basis: &ModeBasis, amps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Spin, Complex64)>,
    {
        let amps = amps
            .into_iter()
            .map(|(label, spin, c)| Ok((basis.orbital(label, spin)?, c)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_orbitals(basis, amps)
    }

    /// `|X σ⟩`, fully localized in one mode.
    pub fn localized(basis: &ModeBasis, label: &str, spin: Spin) -> Result<Self> {
        Self::from_labels(basis, [(label, spin, Complex64::new(1.0, 0.0))])
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    /// Non-zero `(orbital, amplitude)` entries in orbital order.
    pub fn entries(&self) -> &[(Orbital, Complex64)] {
        &self.amps
    }

    pub fn amplitude(&self, orb: Orbital) -> Complex64 {
        match self.amps.binary_search_by(|(o, _)| o.cmp(&orb)) {
            Ok(i) => self.amps[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn amplitude_at(&self, label: &str, spin: Spin) -> Result<Complex64> {
        Ok(self.amplitude(self.basis.orbital(label, spin)?))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|(_, c)| c.norm_sqr()).sum()
    }

    /// Probability of finding the particle in a spatial mode, summed over spin.
    pub fn mode_weight(&self, mode: usize) -> f64 {
        self.amps.iter().filter(|(o, _)| o.mode == mode).map(|(_, c)| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Self) -> Complex64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = Complex64::new(0.0, 0.0);
        while i < self.amps.len() && j < other.amps.len() {
            let (oa, ca) = self.amps[i];
            let (ob, cb) = other.amps[j];
            match oa.cmp(&ob) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += ca.conj() * cb;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Dense amplitude vector indexed by [`Orbital::index`].
    pub fn to_dense(&self) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.basis.orbital_count());
        for &(o, c) in &self.amps {
            v[o.index()] = c;
        }
        v
    }

    /// Applies a linear single-particle map.
    pub fn apply(&self, op: &SingleParticleOperator) -> Result<Self> {
        if self.basis != op.basis {
            return Err(Error::BasisMismatch);
        }
        let mut out = Vec::with_capacity(self.amps.len());
        for &(o, c) in &self.amps {
            match op.columns.get(&o) {
                Some(col) => out.extend(col.iter().map(|&(to, k)| (to, k * c))),
                None => out.push((o, c)),
            }
        }
        Self::from_orbitals(&self.basis, out)
    }
}

/// `⟨a|b⟩` for two single-particle states on the same basis.
pub fn inner(a: &SingleParticleState, b: &SingleParticleState) -> Result<Complex64> {
    a.inner(b)
}

/// Sparse linear map on single-particle orbitals. Orbitals without an explicit
/// column are mapped to themselves.
#[derive(Clone, Debug)]
pub struct SingleParticleOperator {
    basis: ModeBasis,
    columns: BTreeMap<Orbital, Vec<(Orbital, Complex64)>>,
}

impl SingleParticleOperator {
    pub fn identity(basis: &ModeBasis) -> Self {
        Self { basis: basis.clone(), columns: BTreeMap::new() }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    /// Sets the image of one orbital.
    pub fn set_column(&mut self, from: Orbital, image: Vec<(Orbital, Complex64)>) {
        self.columns.insert(from, image);
    }

    /// `|X⟩⟨X| ⊗ K + (𝕀 − |X⟩⟨X|) ⊗ 𝕀₂`: a 2×2 matrix acting on the spin of
    /// whatever sits in mode `X`. `k[row][col]` with rows/cols ordered (↑, ↓).
    pub fn on_spin(basis: &ModeBasis, label: &str, k: [[Complex64; 2]; 2]) -> Result<Self> {
        let mode = basis.require(label)?;
        let mut op = Self::identity(basis);
        for from in Spin::ALL {
            let image = Spin::ALL
                .iter()
                .map(|&to| (Orbital::new(mode, to), k[to.index()][from.index()]))
                .collect();
            op.set_column(Orbital::new(mode, from), image);
        }
        Ok(op)
    }

    /// Spatial substitution `|X⟩ → Σ_Y c_Y |Y⟩`, spin untouched.
    pub fn deform_mode(&mut self, label: &str, target: &[(usize, Complex64)]) -> Result<()> {
        let mode = self.basis.require(label)?;
        for spin in Spin::ALL {
            let image = target.iter().map(|&(m, c)| (Orbital::new(m, spin), c)).collect();
            self.set_column(Orbital::new(mode, spin), image);
        }
        Ok(())
    }
}

/// Parameters of `l|L⟩ + r e^{iθ}|R⟩` without the spin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialProfile {
    pub l: f64,
    pub r: f64,
    pub theta: f64,
}

impl SpatialProfile {
    pub fn new(l: f64, r: f64, theta: f64) -> Result<Self> {
        let p = Self { l, r, theta };
        p.validate()?;
        Ok(p)
    }

    /// `r = √(1 − l²)`.
    pub fn from_l(l: f64, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::InvalidParams(format!("l = {l} outside [0, 1]")));
        }
        Self::new(l, (1.0 - l * l).max(0.0).sqrt(), theta)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { l, r, theta } = *self;
        if !(l.is_finite() && r.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if l < 0.0 || r < 0.0 {
            return Err(Error::InvalidParams(format!("negative weight (l = {l}, r = {r})")));
        }
        let norm = l * l + r * r;
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParams(format!("l² + r² = {norm}")));
        }
        Ok(())
    }

    pub fn with_spin(self, spin: Spin) -> PeakedParams {
        PeakedParams { l: self.l, r: self.r, theta: self.theta, spin }
    }

    /// Spatial amplitudes on `L` and `R`.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.l, 0.0), Complex64::from_polar(self.r, self.theta))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakedParams {
    pub l: f64,
    pub r: f64,
    pub theta: f64,
    pub spin: Spin,
}

impl PeakedParams {
    pub fn new(l: f64, r: f64, theta: f64, spin: Spin) -> Result<Self> {
        SpatialProfile::new(l, r, theta).map(|p| p.with_spin(spin))
    }

    pub fn profile(&self) -> SpatialProfile {
        SpatialProfile { l: self.l, r: self.r, theta: self.theta }
    }
}

/// `(l|L⟩ + r e^{iθ}|R⟩) ⊗ |σ⟩` on a basis containing `L` and `R`.
pub fn make_peaked(params: &PeakedParams, basis: &ModeBasis) -> Result<SingleParticleState> {
    let profile = params.profile();
    profile.validate()?;
    let (al, ar) = profile.amplitudes();
    SingleParticleState::from_labels(basis, [("L", params.spin, al), ("R", params.spin, ar)])
}
