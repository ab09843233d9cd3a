use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use bosefermi::fock::{
    car_check, hermiticity_residual, inequality_suite, momentum_conservation_residual, particle_hole_check,
    pull_through_check, random_state, BasisKind, BosonModes, Couplings, FockBasis, ModeSet, Operator, OperatorKind,
};
use bosefermi::lattice::{resolvent_sum, resolvent_sum_exact, summation_formula, FermiRadius, LuneSumTable, Momentum};
use bosefermi::potentials::{convolve, coupling, effective_potential_kf, two_pi_three_halves, FourierPotential};
use bosefermi::scattering::{critical_couplings, radial_convolution, scattering_length, RadialPotential};
use bosefermi::spectra::{quadratic_decomposition_check, trial_state_energy, trial_state_energy_explicit};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::output::{csv_header, emit, num};
use crate::{Outcome, VerifyArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lattice,
    Potentials,
    Scattering,
    Fock,
    Spectra,
}

impl Suite {
    const ALL: [Suite; 5] = [Suite::Lattice, Suite::Potentials, Suite::Scattering, Suite::Fock, Suite::Spectra];

    fn name(self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Potentials => "potentials",
            Suite::Scattering => "scattering",
            Suite::Fock => "fock",
            Suite::Spectra => "spectra",
        }
    }
}

/// One property with its worst observed value and the bound it must respect.
struct Check {
    name: &'static str,
    worst: f64,
    bound: f64,
}

impl Check {
    fn new(name: &'static str, worst: f64, bound: f64) -> Self {
        Check { name, worst, bound }
    }

    fn pass(&self) -> bool {
        self.worst <= self.bound
    }
}

fn kf(n: u64) -> FermiRadius {
    FermiRadius::from_kf2(n).expect("positive k_F²")
}

fn lattice(table: &LuneSumTable) -> anyhow::Result<Vec<Check>> {
    let e1 = [1, 0, 0];
    let d1 = resolvent_sum_exact(1, e1, 1)?;
    let d2 = resolvent_sum_exact(2, e1, 1)?;
    let exact = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let rational_miss = f64::from(u8::from(d1 != exact(13, 3))) + f64::from(u8::from(d2 != exact(37, 9)));
    let float_err = (table.value(1.0, e1, kf(1)) - 13.0 / 3.0).abs().max((table.value(2.0, e1, kf(1)) - 37.0 / 9.0).abs());

    let mut symmetry: f64 = 0.0;
    for k in [[1, 2, 0], [2, 1, 1], [0, 3, 1]] {
        let base = resolvent_sum(1.0, k, kf(30)).value;
        for s in [[-k[0], k[1], k[2]], [k[2], k[0], k[1]], [k[1], -k[2], -k[0]]] {
            symmetry = symmetry.max((resolvent_sum(1.0, s, kf(30)).value - base).abs());
        }
    }

    let mut formula: f64 = 0.0;
    for k in [[1, 0, 0], [1, 1, 0], [1, 1, 1]] {
        for n in [100, 400] {
            for alpha in [1.0, 2.0] {
                let f = summation_formula(k, kf(n), alpha)?;
                formula = formula.max((f.approximation() - table.value(alpha, k, kf(n))).abs() / f.error_scale);
            }
        }
    }
    Ok(vec![
        Check::new("exact D1, D2 at unit radius", rational_miss, 0.0),
        Check::new("float vs exact", float_err, 1e-12),
        Check::new("signed permutation symmetry", symmetry, 0.0),
        Check::new("summation formula / error scale", formula, 1.0),
    ])
}

fn potentials(table: &LuneSumTable, seed: u64) -> anyhow::Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conv: f64 = 0.0;
    let mut origin: f64 = 0.0;
    for _ in 0..5 {
        let entries: Vec<(Momentum, f64)> =
            [[0, 0, 0], [1, 0, 0], [0, 1, 1], [2, 1, 0]].iter().map(|&k| (k, rng.random_range(-1.0..1.0))).collect();
        let v = FourierPotential::from_coefficients(&entries, 2)?;
        let vv = convolve(&v, &v);
        origin = origin.max((vv.eval([0.0; 3]) - v.l2_sq()).abs());
        // Riemann sums on an 8³ grid integrate these trigonometric polynomials exactly.
        let n = 8;
        let h = 2.0 * PI / n as f64;
        let x = [rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)];
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let y = [i as f64 * h, j as f64 * h, l as f64 * h];
                    quad += v.eval(y) * v.eval([x[0] - y[0], x[1] - y[1], x[2] - y[2]]);
                }
            }
        }
        conv = conv.max((quad * h.powi(3) - vv.eval(x)).abs());
    }

    let c = 0.6;
    let v = FourierPotential::single_mode([1, 0, 0], c, 2)?;
    let eff = effective_potential_kf(&v, kf(1), table);
    let mediated = (eff.value_at_origin() - 13.0 * c * c / (3.0 * PI)).abs();
    let coeff = (eff.potential.coeff([1, 0, 0]) - two_pi_three_halves() * c * c * 13.0 / 3.0 / (2.0 * PI)).abs();
    Ok(vec![
        Check::new("convolution theorem", conv, 1e-10),
        Check::new("self-convolution at the origin", origin, 1e-12),
        Check::new("mediated single mode at unit radius", mediated.max(coeff), 1e-12),
    ])
}

fn bump(radius: f64) -> anyhow::Result<RadialPotential> {
    Ok(RadialPotential::from_fn(radius, 400, |r| (1.0 - (r / radius).powi(2)).powi(2))?)
}

fn scattering() -> anyhow::Result<Vec<Check>> {
    let barrier = scattering_length(&RadialPotential::step(2.0, 1.0)?)?;
    let closed = (barrier.a - (1.0 - 1f64.tanh())).abs();

    let profile = RadialPotential::from_fn(1.0, 2000, |r| 1.0 + r - 2.0 * r * r)?;
    let t = 1e-3;
    let born = scattering_length(&profile.scale(t))?;
    let born_ratio = ((born.a / t) / (profile.integral_3d() / (8.0 * PI)) - 1.0).abs();

    let smooth = scattering_length(&bump(1.0)?.scale(3.0))?;
    let formulas = barrier.discrepancy.max(smooth.discrepancy);

    let v = bump(1.0)?;
    let vv = radial_convolution(&v, &v);
    let (mut g0, mut g_star): (f64, f64) = (0.0, 0.0);
    for alpha in [0.5, 2.0] {
        let c = critical_couplings(&vv.scale(alpha), &v)?;
        g0 = g0.max((c.g0 - alpha.sqrt()).abs());
        g_star = g_star.max((c.g_star - alpha).abs());
    }
    Ok(vec![
        Check::new("square barrier 1 - tanh 1", closed, 1e-6),
        Check::new("Born limit ratio at t = 1e-3", born_ratio, 1e-3),
        Check::new("boundary vs integral formula", formulas, 1e-6),
        Check::new("g0 for proportional inputs", g0, 1e-6),
        Check::new("g_star for proportional inputs", g_star, 1e-9),
    ])
}

fn six_modes() -> anyhow::Result<Arc<ModeSet>> {
    Ok(Arc::new(ModeSet::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0], [1, 1, 0], [-1, -1, 0], [2, 0, 0]], kf(1))?))
}

fn random_potential(rng: &mut ChaCha8Rng, modes: &[Momentum]) -> anyhow::Result<FourierPotential> {
    let entries: Vec<(Momentum, f64)> = modes.iter().map(|&k| (k, rng.random_range(-1.0..1.0))).collect();
    Ok(FourierPotential::from_coefficients(&entries, 3)?)
}

fn fock(seed: u64) -> anyhow::Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = six_modes()?;
    let car = car_check(&modes)?.max();

    let free = FockBasis::build(
        modes.clone(),
        Arc::new(BosonModes::new(vec![[0, 0, 0]])?),
        1,
        BasisKind::Free { max_particles: 1, max_holes: 1 },
        None,
        10_000,
    )?;
    let mut pull: f64 = 0.0;
    for &k in modes.modes() {
        pull = pull.max(pull_through_check(&free, |t| 1.0 / (3.0 + t), k, seed)?);
    }

    let bosons = Arc::new(BosonModes::new(vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0]])?);
    let mut ph: f64 = 0.0;
    for _ in 0..20 {
        let c = Couplings {
            lambda: rng.random_range(0.1..1.0),
            v: random_potential(&mut rng, &[[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])?,
            w: random_potential(&mut rng, &[[0, 0, 0], [1, 0, 0], [2, 0, 0]])?,
        };
        let r = particle_hole_check(modes.clone(), bosons.clone(), 1, &c)?;
        ph = ph.max(r.residual).max(r.conjugated_residual);
    }

    let c = Couplings {
        lambda: 0.37,
        v: random_potential(&mut rng, &[[0, 0, 0], [1, 0, 0], [1, 1, 0]])?,
        w: random_potential(&mut rng, &[[0, 0, 0], [1, 0, 0]])?,
    };
    let ball = Arc::new(ModeSet::ball(kf(1), 4)?);
    let exc = FockBasis::excitation(ball.clone(), Arc::new(BosonModes::axis([1, 0, 0], 2)?), 2, 1, None)?;
    let adjoint =
        hermiticity_residual(&Operator::new(OperatorKind::VMinus, &c), &Operator::new(OperatorKind::VPlus, &c), &exc)?;
    let momentum = momentum_conservation_residual(&Operator::new(OperatorKind::H, &c), &exc);

    let mut violations = 0usize;
    for n in [1, 2] {
        let basis = FockBasis::excitation(ball.clone(), Arc::new(BosonModes::ball(1)), n, 1, None)?;
        violations += inequality_suite(&basis, &c.v, 1000, seed)?.violations();
    }
    Ok(vec![
        Check::new("canonical anticommutation", car, 1e-10),
        Check::new("pull-through", pull, 1e-10),
        Check::new("particle-hole identity (20 draws)", ph, 1e-10),
        Check::new("V- is the adjoint of V+", adjoint, 1e-10),
        Check::new("total momentum conservation", momentum, 1e-10),
        Check::new("inequality violations", violations as f64, 0.0),
    ])
}

fn spectra(seed: u64) -> anyhow::Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trial: f64 = 0.0;
    for t in 0..4u64 {
        let kf2 = 1 + t % 2;
        let r = kf(kf2);
        let m = Arc::new(ModeSet::ball(r, if kf2 == 1 { 4 } else { 5 })?);
        let bosons = Arc::new(BosonModes::ball(1));
        let n = 1 + (t as usize % 2);
        let basis = FockBasis::bosonic(m.clone(), bosons.clone(), n, None)?;
        let pairs = FockBasis::excitation(m, bosons, n, 1, None)?;
        let c = Couplings {
            lambda: coupling(n, r) * rng.random_range(0.5..3.0),
            v: random_potential(&mut rng, &[[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])?,
            w: random_potential(&mut rng, &[[0, 0, 0], [1, 0, 0], [0, 0, 1]])?,
        };
        let phi = random_state(basis.dim(), seed, t);
        let closed = trial_state_energy(&basis, &phi, &c)?;
        let explicit = trial_state_energy_explicit(&basis, &phi, &pairs, &c)?;
        trial = trial.max((closed.rayleigh - explicit.rayleigh).abs()).max((closed.norm_sq - explicit.norm_sq).abs());
    }

    let v = FourierPotential::single_mode([1, 0, 0], 0.7, 3)?;
    let d = quadratic_decomposition_check(&v, 1, kf(1), 4, BosonModes::axis([1, 0, 0], 2)?)?;
    Ok(vec![
        Check::new("trial energy closed form vs Fock space", trial, 1e-10),
        Check::new("vacuum sector closed form", d.vacuum_closed_form_residual.max(d.vacuum_mediated_residual), 1e-10),
        Check::new("sum of the four blocks", d.sum_residual, 1e-10),
        Check::new("-A2, -A3 positivity (minus min eigenvalue)", -d.min_eig_neg_a2.min(d.min_eig_neg_a3), 1e-10),
        Check::new("completed square", d.completed_square_residual, 1e-9),
    ])
}

pub fn run(a: &crate::VerifyArgs, table: &LuneSumTable) -> anyhow::Result<()> {
    let VerifyArgs { suite, seed, output } = a;
    let suites: Vec<Suite> = match suite {
        Some(s) => vec![*s],
        None => Suite::ALL.to_vec(),
    };
    let config = json!({ "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(), "seed": seed });
    let mut text = csv_header("verify", &config);
    text.push_str("suite,check,worst,bound,status\n");
    let mut failed = Vec::new();
    for s in suites {
        let checks = match s {
            Suite::Lattice => lattice(table)?,
            Suite::Potentials => potentials(table, *seed)?,
            Suite::Scattering => scattering()?,
            Suite::Fock => fock(*seed)?,
            Suite::Spectra => spectra(*seed)?,
        };
        for c in &checks {
            let status = if c.pass() { "pass" } else { "FAIL" };
            writeln!(text, "{},{},{},{},{status}", s.name(), c.name, num(c.worst), num(c.bound))?;
            if !c.pass() {
                failed.push(format!("{}: {}", s.name(), c.name));
            }
        }
    }
    emit(output.as_deref(), &text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Outcome::Failed(failed.join("; ")).into())
    }
}
