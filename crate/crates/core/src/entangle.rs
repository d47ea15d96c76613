//! Two-qubit entanglement and nonlocality of a projected state: Wootters
//! concurrence, entanglement of formation and the Horodecki CHSH value.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::indist::xlog2x;
use crate::slocc::ProjectedDensityMatrix;
use crate::{Error, Result};

/// Entries off the diagonal and anti-diagonal below this count as zero.
pub const X_SHAPE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    /// Eigenvalues of `ρρ̃`, descending.
    pub lambdas: [f64; 4],
    pub eof: f64,
    pub bell: f64,
    pub bell_p: f64,
    pub bell_q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Concurrence {
    pub concurrence: f64,
    pub lambdas: [f64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XStateBell {
    pub bell: f64,
    pub p: f64,
    pub q: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn as_matrix4(rho: &ProjectedDensityMatrix) -> Result<Matrix4<Complex64>> {
    let m = rho.matrix();
    if m.shape() != (4, 4) {
        return Err(Error::Dimension { expected: 4, rows: m.nrows(), cols: m.ncols() });
    }
    Ok(Matrix4::from_fn(|i, j| m[(i, j)]))
}

/// `σ_y ⊗ σ_y`, real in the `{↑↑, ↑↓, ↓↑, ↓↓}` basis.
fn sigma_yy() -> Matrix4<Complex64> {
    let mut y = Matrix4::zeros();
    y[(0, 3)] = c(-1.0);
    y[(1, 2)] = c(1.0);
    y[(2, 1)] = c(1.0);
    y[(3, 0)] = c(-1.0);
    y
}

fn flip4(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let y = sigma_yy();
    y * m.conjugate() * y
}

/// `ρ̃ = (σ_y ⊗ σ_y) ρ* (σ_y ⊗ σ_y)`.
pub fn spin_flip(rho: &ProjectedDensityMatrix) -> Result<DMatrix<Complex64>> {
    let f = flip4(&as_matrix4(rho)?);
    Ok(DMatrix::from_fn(4, 4, |i, j| f[(i, j)]))
}

fn hermitian_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = m.symmetric_eigen();
    let roots = eig.eigenvalues.map(|x| c(x.max(0.0).sqrt()));
    let u = eig.eigenvectors;
    u * Matrix4::from_diagonal(&roots) * u.adjoint()
}

/// Wootters concurrence.
///
/// `√λ_i` are taken as the singular values of `√ρ √ρ̃` (equivalently the
/// eigenvalues of `√(√ρ ρ̃ √ρ)`), which keeps vanishing roots at round-off
/// level instead of the `√ε` error a direct eigen-solve of `ρρ̃` leaves.
pub fn concurrence(rho: &ProjectedDensityMatrix) -> Result<Concurrence> {
    let m = as_matrix4(rho)?;
    let sqrt_rho = hermitian_sqrt(&m);
    let sqrt_flipped = flip4(&sqrt_rho);
    let product = sqrt_rho * sqrt_flipped;
    let mut roots: Vec<f64> = product.singular_values().iter().copied().collect();
    if roots.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure);
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    let lambdas = [roots[0] * roots[0], roots[1] * roots[1], roots[2] * roots[2], roots[3] * roots[3]];
    let value = (roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0);
    Ok(Concurrence { concurrence: value, lambdas })
}

/// Eigenvalues of the non-Hermitian `R = ρρ̃` from a complex Schur
/// decomposition: real parts, descending, before any clamping.
pub fn r_eigenvalues(rho: &ProjectedDensityMatrix) -> Result<[f64; 4]> {
    let m = as_matrix4(rho)?;
    let r = m * flip4(&m);
    let ev = r.schur().eigenvalues().ok_or(Error::EigenFailure)?;
    let mut out = [ev[0].re, ev[1].re, ev[2].re, ev[3].re];
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    xlog2x(x) + xlog2x(1.0 - x)
}

/// Entanglement of formation `h((1 + √(1 − C²)) / 2)`.
pub fn eof(concurrence: f64) -> f64 {
    let c = concurrence.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

fn pauli() -> [Matrix2<Complex64>; 3] {
    let i = Complex64::i();
    [
        Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0)),
        Matrix2::new(c(0.0), -i, i, c(0.0)),
        Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0)),
    ]
}

/// Spin correlation matrix `T_ij = Tr(ρ σ_i ⊗ σ_j)`.
pub fn correlation_matrix(rho: &ProjectedDensityMatrix) -> Result<Matrix3<f64>> {
    let m = as_matrix4(rho)?;
    let s = pauli();
    Ok(Matrix3::from_fn(|i, j| {
        let k: Matrix4<Complex64> = s[i].kronecker(&s[j]);
        (m * k).trace().re
    }))
}

/// Maximal CHSH value `2√(u₁ + u₂)` with `u₁ ≥ u₂` the two largest
/// eigenvalues of `TᵀT`. The inequality is violated iff the value exceeds 2.
pub fn bell_horodecki(rho: &ProjectedDensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let mut u: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    u.sort_by(|a, b| b.total_cmp(a));
    Ok(2.0 * (u[0] + u[1]).max(0.0).sqrt())
}

/// `𝓟 = ρ₁₁ + ρ₄₄ − ρ₂₂ − ρ₃₃` and `𝓠 = 2(|ρ₁₄| + |ρ₂₃|)`.
pub fn xstate_pq(rho: &ProjectedDensityMatrix) -> Result<(f64, f64)> {
    let m = as_matrix4(rho)?;
    let p = m[(0, 0)].re + m[(3, 3)].re - m[(1, 1)].re - m[(2, 2)].re;
    let q = 2.0 * (m[(0, 3)].norm() + m[(1, 2)].norm());
    Ok((p, q))
}

/// Largest magnitude among entries off the diagonal and anti-diagonal.
pub fn off_x_magnitude(rho: &ProjectedDensityMatrix) -> Result<f64> {
    let m = as_matrix4(rho)?;
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// `B = 2√(𝓟² + 𝓠²)` for X-shaped states.
pub fn bell_xstate(rho: &ProjectedDensityMatrix) -> Result<XStateBell> {
    let off = off_x_magnitude(rho)?;
    if off > X_SHAPE_TOLERANCE {
        return Err(Error::NotXShaped(off));
    }
    let (p, q) = xstate_pq(rho)?;
    Ok(XStateBell { bell: 2.0 * (p * p + q * q).sqrt(), p, q })
}

/// Whether `2√(𝓟² + 𝓠²)` equals the Horodecki maximum for an X-state. The
/// formula keeps the `zz` correlation, which is only among the two largest
/// when `𝓟² ≥ (2||ρ₁₄| − |ρ₂₃||)²`.
pub fn xstate_formula_exact(rho: &ProjectedDensityMatrix) -> Result<bool> {
    let m = as_matrix4(rho)?;
    let (p, _) = xstate_pq(rho)?;
    let q_minor = 2.0 * (m[(0, 3)].norm() - m[(1, 2)].norm()).abs();
    Ok(p * p + 1e-12 >= q_minor * q_minor)
}

/// All metrics of a projected two-qubit state. The Bell value always comes
/// from the general criterion.
pub fn analyze(rho: &ProjectedDensityMatrix) -> Result<EntanglementReport> {
    let Concurrence { concurrence, lambdas } = concurrence(rho)?;
    let (bell_p, bell_q) = xstate_pq(rho)?;
    Ok(EntanglementReport {
        concurrence,
        lambdas,
        eof: eof(concurrence),
        bell: bell_horodecki(rho)?,
        bell_p,
        bell_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn pure(v: [Complex64; 4]) -> ProjectedDensityMatrix {
        let v = nalgebra::DVector::from_row_slice(&v);
        ProjectedDensityMatrix::from_matrix(&v * v.adjoint()).unwrap()
    }

    fn singlet() -> ProjectedDensityMatrix {
        let a = FRAC_1_SQRT_2;
        pure([c(0.0), c(a), c(-a), c(0.0)])
    }

    fn werner(p: f64) -> ProjectedDensityMatrix {
        let s = singlet();
        let m = s.matrix() * c(1.0 - p) + DMatrix::identity(4, 4) * c(p / 4.0);
        ProjectedDensityMatrix::from_matrix(m).unwrap()
    }

    #[test]
    fn spin_flip_examples() {
        let s = singlet();
        assert!((spin_flip(&s).unwrap() - s.matrix()).camax() < 1e-15);
        let upup = pure([c(1.0), c(0.0), c(0.0), c(0.0)]);
        let flipped = spin_flip(&upup).unwrap();
        assert_eq!(flipped[(3, 3)], c(1.0));
        assert!(flipped.iter().filter(|z| z.norm() > 0.0).count() == 1);
        let mixed = werner(0.3);
        let twice = spin_flip(&ProjectedDensityMatrix::from_matrix(spin_flip(&mixed).unwrap()).unwrap()).unwrap();
        assert!((twice - mixed.matrix()).camax() < 1e-15);
    }

    #[test]
    fn bell_states_have_unit_concurrence() {
        let a = FRAC_1_SQRT_2;
        for v in [
            [c(0.0), c(a), c(-a), c(0.0)],
            [c(0.0), c(a), c(a), c(0.0)],
            [c(a), c(0.0), c(0.0), c(a)],
            [c(a), c(0.0), c(0.0), c(-a)],
        ] {
            let r = concurrence(&pure(v)).unwrap();
            assert!((r.concurrence - 1.0).abs() < 1e-14);
            assert!(r.lambdas[1] < 1e-28);
        }
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        let (a, b) = (0.6, 0.8);
        let (x, y) = (Complex64::from_polar(0.28, 0.4), Complex64::from_polar(0.96, -1.1));
        let r = concurrence(&pure([c(a) * x, c(a) * y, c(b) * x, c(b) * y])).unwrap();
        assert!(r.concurrence < 1e-14);
    }

    #[test]
    fn distinguishable_werner() {
        let r = concurrence(&werner(0.4)).unwrap();
        assert!((r.concurrence - 0.4).abs() < 1e-13);
        assert_eq!(concurrence(&werner(0.8)).unwrap().concurrence, 0.0);
        let b = bell_horodecki(&werner(1.0 - FRAC_1_SQRT_2)).unwrap();
        assert!((b - 2.0).abs() < 1e-13);
        let b = bell_horodecki(&werner(0.2929)).unwrap();
        assert!((b - 2.0).abs() < 1e-3);
    }

    #[test]
    fn r_eigenvalues_agree_with_roots() {
        for p in [0.0, 0.2, 0.5, 0.9] {
            let rho = werner(p);
            let direct = r_eigenvalues(&rho).unwrap();
            let via_roots = concurrence(&rho).unwrap().lambdas;
            for (a, b) in direct.iter().zip(via_roots) {
                assert!((a - b).abs() < 1e-12, "{direct:?} vs {via_roots:?}");
            }
        }
    }

    #[test]
    fn eof_values() {
        assert_eq!(eof(1.0), 1.0);
        assert_eq!(eof(0.0), 0.0);
        // 50-digit reference
        assert!((eof(0.5) - 0.354_578_902_665_269_88).abs() < 1e-15);
    }

    #[test]
    fn bell_values() {
        assert!((bell_horodecki(&singlet()).unwrap() - 2.0 * SQRT_2).abs() < 1e-14);
        let mixed = ProjectedDensityMatrix::from_matrix(DMatrix::identity(4, 4) * c(0.25)).unwrap();
        assert_eq!(bell_horodecki(&mixed).unwrap(), 0.0);

        let x = bell_xstate(&singlet()).unwrap();
        assert!((x.p + 1.0).abs() < 1e-15 && (x.q - 1.0).abs() < 1e-15);
        assert!((x.bell - 2.0 * SQRT_2).abs() < 1e-14);
        let x = bell_xstate(&mixed).unwrap();
        assert_eq!((x.p, x.q, x.bell), (0.0, 0.0, 0.0));
    }

    #[test]
    fn non_x_state_is_rejected() {
        let a = 0.5;
        let plus_plus = pure([c(a), c(a), c(a), c(a)]);
        assert!(matches!(bell_xstate(&plus_plus), Err(Error::NotXShaped(_))));
        // |++⟩ is a product state: |T| has a single unit entry
        assert!((bell_horodecki(&plus_plus).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn analyze_bundles_metrics() {
        let r = analyze(&werner(0.4)).unwrap();
        assert!((r.concurrence - 0.4).abs() < 1e-13);
        assert!((r.eof - eof(0.4)).abs() < 1e-15);
        assert!((r.bell - 2.0 * SQRT_2 * 0.6).abs() < 1e-13);
        assert!((r.bell_p + 0.6).abs() < 1e-15);
    }

    #[test]
    fn xstate_formula_undercounts_transverse_correlations() {
        // a|Ψ⁺⟩⟨Ψ⁺| + b(|↑↑⟩⟨↑↑| + |↓↓⟩⟨↓↓|): T = diag(a, a, 2b − a)
        let (a, b) = (0.75, 0.125);
        let h = FRAC_1_SQRT_2;
        let psi = nalgebra::DVector::from_row_slice(&[c(0.0), c(h), c(h), c(0.0)]);
        let mut m = &psi * psi.adjoint() * c(a);
        m[(0, 0)] += c(b);
        m[(3, 3)] += c(b);
        let rho = ProjectedDensityMatrix::from_matrix(m).unwrap();
        assert!((bell_horodecki(&rho).unwrap() - 2.0 * SQRT_2 * a).abs() < 1e-13);
        let x = bell_xstate(&rho).unwrap();
        assert!((x.bell - 2.0 * (0.5f64 * 0.5 + a * a).sqrt()).abs() < 1e-13);
        assert!(!xstate_formula_exact(&rho).unwrap());
        assert!(xstate_formula_exact(&werner(0.3)).unwrap());
    }
}
