use islocc_core::amplitude::{amplitude, amplitude_fast, amplitude_permsum, ElementaryKet, Statistics};
use islocc_core::entangle::{analyze, concurrence, eof};
use islocc_core::indist::degree_n;
use islocc_core::noise::{werner_direct, BellTarget, WernerSpec};
use islocc_core::slocc::{project, OperationalRegionSet, ProjectedDensityMatrix};
use islocc_core::spstate::{ModeBasis, Orbital, SingleParticleState};
use islocc_core::Complex64;
use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;

const MODES: [&str; 3] = ["A", "B", "C"];

fn basis() -> ModeBasis {
    ModeBasis::new(MODES).unwrap()
}

fn stats() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

fn target() -> impl Strategy<Value = BellTarget> {
    prop_oneof![Just(BellTarget::OnePlus), Just(BellTarget::OneMinus)]
}

fn state(amps: &[(f64, f64)]) -> SingleParticleState {
    let b = basis();
    SingleParticleState::from_orbitals(
        &b,
        amps.iter().enumerate().map(|(k, &(re, im))| (Orbital::from_index(k), Complex64::new(re, im))),
    )
    .unwrap()
}

/// `count` kets of `n` particles each, all over the same basis.
fn kets(count: usize) -> impl Strategy<Value = (Statistics, Vec<Vec<SingleParticleState>>)> {
    (2usize..=6, stats()).prop_flat_map(move |(n, s)| {
        let amp = (-1.0f64..1.0, -1.0f64..1.0);
        let particle = prop::collection::vec(amp, 2 * MODES.len()).prop_map(|a| state(&a));
        (Just(s), prop::collection::vec(prop::collection::vec(particle, n), count))
    })
}

fn ket(particles: Vec<SingleParticleState>, s: Statistics) -> ElementaryKet {
    ElementaryKet::new(particles, s).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn spec() -> impl Strategy<Value = WernerSpec> {
    (0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..std::f64::consts::TAU, 0.0f64..=1.0, target(), stats())
        .prop_map(|(l, lp, th, p, t, s)| WernerSpec::from_weights(l, lp, th, p, t, s).unwrap())
}

fn unitary(a: f64, b: f64, c: f64) -> Matrix2<Complex64> {
    // a U(2) element: phases a, b and a rotation by c
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (cg, sg) = ((c / 2.0).cos(), (c / 2.0).sin());
    Matrix2::new(
        e(a - b / 2.0 - c) * cg,
        -e(a - b / 2.0 + c) * sg,
        e(a + b / 2.0 - c) * sg,
        e(a + b / 2.0 + c) * cg,
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn fast_engine_matches_permutation_sum((s, k) in kets(2)) {
        let (bra, kt) = (ket(k[0].clone(), s), ket(k[1].clone(), s));
        let slow = amplitude_permsum(&bra, &kt).unwrap();
        prop_assert!(rel(slow, amplitude_fast(&bra, &kt).unwrap()) < 1e-10);
        prop_assert!(rel(slow, amplitude(&bra, &kt).unwrap()) < 1e-10);
    }

    #[test]
    fn amplitude_is_conjugate_symmetric((s, k) in kets(2)) {
        let (a, b) = (ket(k[0].clone(), s), ket(k[1].clone(), s));
        let ab = amplitude(&a, &b).unwrap();
        let ba = amplitude(&b, &a).unwrap();
        prop_assert!(rel(ab, ba.conj()) < 1e-12);
    }

    #[test]
    fn swapping_two_particles_multiplies_by_eta((s, k) in kets(2), i in 0usize..6, j in 0usize..6) {
        let n = k[1].len();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let bra = ket(k[0].clone(), s);
        let mut swapped = k[1].clone();
        swapped.swap(i, j);
        let a = amplitude(&bra, &ket(k[1].clone(), s)).unwrap();
        let b = amplitude(&bra, &ket(swapped, s)).unwrap();
        prop_assert!((a * s.eta() - b).norm() <= 1e-14 * a.norm().max(1.0) * 64.0);
    }

    #[test]
    fn self_overlap_is_real_and_nonnegative((s, k) in kets(1)) {
        let a = ket(k[0].clone(), s);
        let n = amplitude(&a, &a).unwrap();
        prop_assert!(n.re >= -1e-12 * n.norm().max(1.0));
        prop_assert!(n.im.abs() <= 1e-10 * n.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn projected_werner_states_are_density_matrices(spec in spec()) {
        let m = werner_direct(&spec).unwrap();
        if let Ok(rho) = project(&m, &OperationalRegionSet::lr()) {
            rho.validate().unwrap();
            prop_assert!(rho.probability() <= 1.0 + 1e-12);
            let r = analyze(&rho).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.concurrence));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&r.eof));
            prop_assert!(r.bell <= 2.0 * std::f64::consts::SQRT_2 + 1e-12);
            prop_assert!((r.eof - eof(r.concurrence)).abs() < 1e-15);
        }
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(
        spec in spec(),
        u in (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3),
        v in (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3),
    ) {
        let Ok(rho) = project(&werner_direct(&spec).unwrap(), &OperationalRegionSet::lr()) else {
            return Ok(());
        };
        let k = unitary(u.0, u.1, u.2).kronecker(&unitary(v.0, v.1, v.2));
        let k = DMatrix::from_iterator(4, 4, k.iter().copied());
        let mut rotated = &k * rho.matrix() * k.adjoint();
        rotated = (&rotated + rotated.adjoint()) * Complex64::new(0.5, 0.0);
        let rotated = ProjectedDensityMatrix::from_matrix(rotated).unwrap();
        let (a, b) = (concurrence(&rho).unwrap().concurrence, concurrence(&rotated).unwrap().concurrence);
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn eof_is_monotone(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(eof(lo) <= eof(hi) + 1e-15);
    }

    #[test]
    fn indistinguishability_is_bounded_and_relabeling_invariant((_, k) in kets(1)) {
        let states = &k[0];
        let n = states.len().min(MODES.len());
        let states = &states[..n];
        let regions = OperationalRegionSet::new(MODES[..n].iter().copied()).unwrap();
        let Ok(d) = degree_n(states, &regions) else { return Ok(()) };
        let max = (1..=n).map(|x| x as f64).product::<f64>().log2();
        prop_assert!(d.entropy >= 0.0 && d.entropy <= max + 1e-12);
        let mut reversed = states.to_vec();
        reversed.reverse();
        let e = degree_n(&reversed, &regions).unwrap().entropy;
        prop_assert!((e - d.entropy).abs() < 1e-12);
    }
}
