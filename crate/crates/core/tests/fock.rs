use std::sync::Arc;

use bosefermi::fock::{
    car_check, hermiticity_residual, inequality_suite, momentum_conservation_residual, particle_hole_check,
    pull_through_check, random_state, BasisKind, BosonModes, Couplings, FockBasis, FockState, ModeSet, Operator,
    OperatorKind, Term,
};
use bosefermi::lattice::{norm2, FermiRadius, Momentum};
use bosefermi::potentials::FourierPotential;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn kf1() -> FermiRadius {
    FermiRadius::from_kf2(1).unwrap()
}

fn six_modes() -> Arc<ModeSet> {
    Arc::new(ModeSet::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0], [1, 1, 0], [-1, -1, 0], [2, 0, 0]], kf1()).unwrap())
}

fn three_bosons() -> Arc<BosonModes> {
    Arc::new(BosonModes::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0]]).unwrap())
}

fn sample_couplings(rng: &mut impl Rng) -> Couplings {
    let v_modes: [Momentum; 4] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]];
    let w_modes: [Momentum; 3] = [[0, 0, 0], [1, 0, 0], [2, 0, 0]];
    let mut draw = |modes: &[Momentum]| -> Vec<(Momentum, f64)> {
        let mut out = Vec::new();
        for &k in modes {
            if rng.random_bool(0.75) {
                out.push((k, rng.random_range(-1.0..1.0)));
            }
        }
        out
    };
    let v = draw(&v_modes);
    let w = draw(&w_modes);
    Couplings {
        lambda: rng.random_range(0.1..1.0),
        v: FourierPotential::from_coefficients(&v, 3).unwrap(),
        w: FourierPotential::from_coefficients(&w, 3).unwrap(),
    }
}

fn generic_couplings() -> Couplings {
    Couplings {
        lambda: 0.37,
        v: FourierPotential::from_coefficients(&[([0, 0, 0], 0.4), ([1, 0, 0], 0.8), ([1, 1, 0], -0.3), ([0, 1, 0], 0.5)], 3)
            .unwrap(),
        w: FourierPotential::from_coefficients(&[([0, 0, 0], 0.9), ([1, 0, 0], -0.6), ([2, 0, 0], 0.25)], 3).unwrap(),
    }
}

#[test]
fn particle_hole_identity_on_six_modes() {
    for n in [1, 2] {
        let r = particle_hole_check(six_modes(), three_bosons(), n, &generic_couplings()).unwrap();
        assert_eq!(r.dim, if n == 1 { 60 } else { 120 });
        assert!(r.residual <= 1e-10, "N = {n}: {}", r.residual);
        assert!(r.conjugated_residual <= 1e-10, "N = {n}: {}", r.conjugated_residual);
    }
}

#[test]
fn particle_hole_identity_without_interactions_is_exact() {
    let c = Couplings { lambda: 0.5, v: FourierPotential::zero(3), w: FourierPotential::zero(3) };
    let r = particle_hole_check(six_modes(), three_bosons(), 2, &c).unwrap();
    assert_eq!(r.residual, 0.0);
    assert_eq!(r.constant, 2.0);
}

#[test]
fn particle_hole_identity_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let c = sample_couplings(&mut rng);
        let r = particle_hole_check(six_modes(), three_bosons(), 1, &c).unwrap();
        assert!(r.residual <= 1e-10, "{}", r.residual);
    }
}

#[test]
fn canonical_anticommutation() {
    let r = car_check(&six_modes()).unwrap();
    assert!(r.max() <= 1e-12, "{r:?}");
    let ball = ModeSet::ball(kf1(), 1).unwrap();
    assert!(car_check(&ball).unwrap().max() <= 1e-12);
}

fn free_one_pair(modes: Arc<ModeSet>) -> FockBasis {
    let bosons = Arc::new(BosonModes::new(vec![[0, 0, 0]]).unwrap());
    FockBasis::build(modes, bosons, 1, BasisKind::Free { max_particles: 1, max_holes: 1 }, None, 10_000).unwrap()
}

#[test]
fn pull_through_formulas() {
    let modes = six_modes();
    let basis = free_one_pair(modes.clone());
    for &k in modes.modes() {
        assert!(pull_through_check(&basis, |t| t, k, 3).unwrap() <= 1e-12);
        assert_eq!(pull_through_check(&basis, |_| 2.5, k, 3).unwrap(), 0.0);
        assert!(pull_through_check(&basis, |t| 1.0 / (3.0 + t), k, 3).unwrap() <= 1e-10);
    }
    let zero_inside = Arc::new(ModeSet::new(vec![[0, 0, 0], [1, 1, 0], [-1, -1, 0], [2, 0, 0], [1, 1, 1]], kf1()).unwrap());
    let basis = free_one_pair(zero_inside.clone());
    for &k in zero_inside.modes() {
        assert!(pull_through_check(&basis, |t| 1.0 / (1.0 + t), k, 5).unwrap() <= 1e-10);
    }
}

fn small_excitation_basis(n: usize, max_pairs: usize, sector: Option<Momentum>) -> FockBasis {
    let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
    let bosons = Arc::new(BosonModes::axis([1, 0, 0], 2).unwrap());
    FockBasis::excitation(modes, bosons, n, max_pairs, sector).unwrap()
}

#[test]
fn adjointness_and_symmetry() {
    let c = generic_couplings();
    let basis = small_excitation_basis(2, 2, Some([0, 0, 0]));
    let vp = Operator::new(OperatorKind::VPlus, &c);
    let vm = Operator::new(OperatorKind::VMinus, &c);
    assert!(hermiticity_residual(&vm, &vp, &basis).unwrap() <= 1e-12);
    for kind in [OperatorKind::H, OperatorKind::VDiag, OperatorKind::HW, OperatorKind::RConjugatedH] {
        let op = Operator::new(kind, &c);
        assert!(hermiticity_residual(&op, &op, &basis).unwrap() <= 1e-12, "{kind:?}");
    }
}

#[test]
fn total_momentum_is_conserved() {
    let c = generic_couplings();
    let basis = small_excitation_basis(1, 1, None);
    assert_eq!(momentum_conservation_residual(&Operator::new(OperatorKind::H, &c), &basis), 0.0);
}

#[test]
fn charge_and_number_operators() {
    let c = generic_couplings();
    let basis = small_excitation_basis(1, 2, None);
    let nm = Operator::new(OperatorKind::NMinus, &c).assemble(&basis);
    assert_eq!(nm.max_abs(), 0.0);
    let np = Operator::new(OperatorKind::NPlus, &c).assemble(&basis);
    for i in 0..basis.dim() {
        assert_eq!(np.get(i, i), basis.pair_count(i) as f64);
    }
}

#[test]
fn excitation_kinetic_energy() {
    let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
    let bosons = Arc::new(BosonModes::new(vec![[0, 0, 0]]).unwrap());
    let basis = FockBasis::excitation(modes.clone(), bosons, 1, 1, None).unwrap();
    let c = generic_couplings();
    let t = Operator::new(OperatorKind::T, &c).assemble(&basis);
    let kf2 = 1;
    for (i, s) in basis.states().iter().enumerate().skip(1) {
        let (h, p) = (s.fermions.iter().find(|&&f| modes.is_inside(f)).unwrap(), s.fermions.iter().find(|&&f| !modes.is_inside(f)).unwrap());
        let (p2, h2) = (norm2(modes.mode(*p)), norm2(modes.mode(*h)));
        assert_eq!(t.get(i, i), (p2 - h2) as f64);
        assert_eq!(p2 - h2, (p2 - kf2).abs() + (kf2 - h2).abs());
    }
}

#[test]
fn v_minus_kills_the_vacuum_sector() {
    let c = generic_couplings();
    let basis = small_excitation_basis(2, 1, None);
    let mut x = vec![0.0; basis.dim()];
    for i in basis.vacuum_indices() {
        x[i] = 1.0 + i as f64;
    }
    let y = Operator::new(OperatorKind::VMinus, &c).apply(&basis, &x).unwrap();
    assert!(y.iter().all(|&v| v == 0.0));
}

#[test]
fn matrix_free_apply_matches_assembly_and_is_deterministic() {
    let c = generic_couplings();
    let basis = small_excitation_basis(2, 1, Some([0, 0, 0]));
    let h = Operator::new(OperatorKind::H, &c);
    let x = random_state(basis.dim(), 9, 0);
    let y1 = h.apply(&basis, &x).unwrap();
    let y2 = h.apply(&basis, &x).unwrap();
    let y3 = h.assemble(&basis).matvec(&x).unwrap();
    assert_eq!(y1, y2);
    for (a, b) in y1.iter().zip(&y3) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert!(h.apply(&basis, &[1.0]).is_err());
}

#[test]
fn random_states_are_reproducible_unit_vectors() {
    let a = random_state(3000, 7, 2);
    assert_eq!(a, random_state(3000, 7, 2));
    assert_ne!(a, random_state(3000, 7, 3));
    assert!((a.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn inequality_suite_has_no_violations() {
    let v = FourierPotential::from_coefficients(&[([1, 0, 0], 0.7), ([0, 1, 1], -0.4), ([0, 0, 0], 0.2)], 3).unwrap();
    for n in [1, 2] {
        let modes = Arc::new(ModeSet::ball(kf1(), 4).unwrap());
        let bosons = Arc::new(BosonModes::ball(1));
        let basis = FockBasis::excitation(modes, bosons, n, 1, None).unwrap();
        let r = inequality_suite(&basis, &v, 1000, 42).unwrap();
        assert_eq!(r.violations(), 0, "{r:?}");
        let zero = inequality_suite(&basis, &FourierPotential::zero(3), 10, 1).unwrap();
        assert!(zero.diagonal_bound.worst_margin >= 0.0);
    }
    let vacuum_only = small_excitation_basis(1, 0, None);
    let r = inequality_suite(&vacuum_only, &v, 5, 1).unwrap();
    assert_eq!(r.number_vs_kinetic.worst_margin, 0.0);
}

/// `(1/N) Σ_{i<j} W(x_i − x_j)` on two bosons, from position-space quadrature of `W`.
#[test]
fn two_boson_interaction_matches_quadrature() {
    let w = FourierPotential::from_coefficients(&[([0, 0, 0], 1.3), ([1, 0, 0], 0.6), ([1, 1, 0], -0.45), ([0, 0, 2], 0.2)], 3)
        .unwrap();
    let modes = Arc::new(ModeSet::ball(kf1(), 1).unwrap());
    let bosons = Arc::new(BosonModes::ball(1));
    let basis = FockBasis::bosonic(modes, bosons.clone(), 2, None).unwrap();
    let c = Couplings { lambda: 0.0, v: FourierPotential::zero(3), w: w.clone() };
    let dense = Operator::new(OperatorKind::HW, &c).dense(&basis);

    let n = 12;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut samples = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                let x = [a as f64 * h, b as f64 * h, d as f64 * h];
                samples.push((x, w.eval(x)));
            }
        }
    }
    // (2π)^{-3} ∫ W(r) e^{iκ·r} dr
    let fourier = |kappa: Momentum| -> f64 {
        let s: f64 = samples
            .iter()
            .map(|(x, wx)| wx * (kappa[0] as f64 * x[0] + kappa[1] as f64 * x[1] + kappa[2] as f64 * x[2]).cos())
            .sum();
        s * h.powi(3) / (2.0 * std::f64::consts::PI).powi(3)
    };
    let pair = |s: &FockState| (bosons.mode(s.bosons[0]), bosons.mode(s.bosons[1]));
    let product = |p: Momentum, q: Momentum, p2: Momentum, q2: Momentum| -> f64 {
        let total = [p[0] + q[0] - p2[0] - q2[0], p[1] + q[1] - p2[1] - q2[1], p[2] + q[2] - p2[2] - q2[2]];
        if total != [0, 0, 0] {
            return 0.0;
        }
        fourier([p[0] - p2[0], p[1] - p2[1], p[2] - p2[2]])
    };
    for i in 0..basis.dim() {
        for j in 0..basis.dim() {
            let (p2, q2) = pair(basis.state(i));
            let (p, q) = pair(basis.state(j));
            let norm = |a: Momentum, b: Momentum| if a == b { 2.0f64 } else { 1.0 };
            let sym = product(p, q, p2, q2) + product(q, p, p2, q2) + product(p, q, q2, p2) + product(q, p, q2, p2);
            let expect = 0.5 * sym / (2.0 * (norm(p, q) * norm(p2, q2)).sqrt());
            assert!((dense[(i, j)] - expect).abs() < 1e-12, "({i},{j}): {} vs {expect}", dense[(i, j)]);
        }
    }
}

#[test]
fn basis_metadata_exports() {
    let basis = small_excitation_basis(1, 1, Some([0, 0, 0]));
    let json: serde_json::Value = serde_json::from_str(&basis.metadata_json()).unwrap();
    assert_eq!(json["dimension"], basis.dim());
    let t = Operator::from_terms(vec![(1.0, Term::ExcitationKinetic)]).assemble(&basis);
    assert!(t.to_csv().starts_with("row,col,value"));
}
