use normlab_core::blocks::{build_z, reduced_core, InstanceKind};
use normlab_core::explorer::{
    generate_instance, haar_unitary, run_sweep, ParamGrid, Record, SpectrumLaw, SweepConfig, SweepTarget,
};
use normlab_core::linalg::{
    hermitian_eig, matrix_abs, matrix_power, polar_unitary, ComplexMatrix, HermitianMatrix, SpdMatrix,
};
use normlab_core::means::{t_geometric_mean, MeanParams};
use normlab_core::norms::{
    hermitian_singular_values, ky_fan_dominance_values, norm_eval, singular_values, standard_norms, NormSelector,
    NormSpec, SingularValueList,
};
use normlab_core::scalar::Complex;
use normlab_core::suite::{ChainEvaluator, ChainId, ChainParams, SuiteConfig};
use normlab_core::{Instance, Matrix, Spd};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SCHATTEN: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

fn law() -> SpectrumLaw {
    SpectrumLaw::default()
}

fn instance(seed: u64, n: usize, m: usize) -> Instance {
    generate_instance(InstanceKind::Generic, n, m, seed, &law()).unwrap()
}

fn pair(seed: u64, n: usize) -> (Spd, Spd) {
    let inst = instance(seed, n, 1);
    (inst.a()[0].clone(), inst.b()[0].clone())
}

fn gaussian(seed: u64, n: usize) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    })
}

fn unitary(seed: u64, n: usize) -> Matrix {
    haar_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn rel(x: &Matrix, reference: &Matrix) -> f64 {
    (x - reference).frobenius_norm() / reference.frobenius_norm()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_composition(seed in any::<u64>(), n in 1usize..6, x in 0.0f64..3.0, y in 0.0f64..3.0) {
        let (a, _) = pair(seed, n);
        let lhs = matrix_power(&matrix_power(a.hermitian(), x).unwrap(), y).unwrap();
        let rhs = matrix_power(a.hermitian(), x * y).unwrap();
        prop_assert!(rel(lhs.matrix(), rhs.matrix()) <= 1e-9);
    }

    #[test]
    fn abs_and_polar(seed in any::<u64>(), n in 1usize..6) {
        let m = gaussian(seed, n);
        let abs = matrix_abs(&m).unwrap();
        let sv_abs = hermitian_singular_values(&abs).unwrap();
        let sv = singular_values(&m).unwrap();
        for (x, y) in sv_abs.values().iter().zip(sv.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * sv.largest());
        }
        let u = polar_unitary(&m).unwrap();
        prop_assert!(rel(&(&u * abs.matrix()), &m) <= 1e-10);
    }

    #[test]
    fn eigenvalues_unitarily_invariant(seed in any::<u64>(), n in 1usize..6) {
        let h = HermitianMatrix::symmetrize(&gaussian(seed, n).hermitian_part());
        let u = unitary(seed ^ 1, n);
        let rotated = h.congruence(&u);
        let l1 = hermitian_eig(&h).unwrap().eigenvalues;
        let l2 = hermitian_eig(&rotated).unwrap().eigenvalues;
        let scale = l1.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        for (x, y) in l1.iter().zip(&l2) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn mean_scaling(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..=1.0, alpha in 0.1f64..10.0, beta in 0.1f64..10.0) {
        let (a, b) = pair(seed, n);
        let tp = MeanParams::new(t).unwrap();
        let sa = SpdMatrix::new(a.hermitian().scale(alpha)).unwrap();
        let sb = SpdMatrix::new(b.hermitian().scale(beta)).unwrap();
        let lhs = t_geometric_mean(&sa, &sb, tp).unwrap();
        let rhs = t_geometric_mean(&a, &b, tp).unwrap().matrix().scale(alpha.powf(1.0 - t) * beta.powf(t));
        prop_assert!(rel(lhs.matrix(), &rhs) <= 1e-10);
    }

    #[test]
    fn mean_congruence(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..=1.0) {
        let (a, b) = pair(seed, n);
        let (c, _) = pair(seed ^ 7, n);
        let m = c.matrix() * &unitary(seed ^ 3, n);
        let tp = MeanParams::new(t).unwrap();
        let lhs = t_geometric_mean(&a, &b, tp).unwrap().hermitian().congruence(&m);
        let ma = SpdMatrix::new(a.hermitian().congruence(&m)).unwrap();
        let mb = SpdMatrix::new(b.hermitian().congruence(&m)).unwrap();
        let rhs = t_geometric_mean(&ma, &mb, tp).unwrap();
        prop_assert!(rel(lhs.matrix(), rhs.matrix()) <= 1e-8);
    }

    #[test]
    fn mean_of_commuting_pair(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..=1.0) {
        let inst = generate_instance(InstanceKind::Commuting, n, 1, seed, &law()).unwrap();
        let (a, b) = (&inst.a()[0], &inst.b()[0]);
        let mean = t_geometric_mean(a, b, MeanParams::new(t).unwrap()).unwrap();
        let product = matrix_power(a.hermitian(), 1.0 - t).unwrap().matrix() * matrix_power(b.hermitian(), t).unwrap().matrix();
        prop_assert!(rel(mean.matrix(), &product) <= 1e-9);
    }

    #[test]
    fn mean_symmetric_at_half(seed in any::<u64>(), n in 1usize..6) {
        let (a, b) = pair(seed, n);
        let ab = t_geometric_mean(&a, &b, MeanParams::half()).unwrap();
        let ba = t_geometric_mean(&b, &a, MeanParams::half()).unwrap();
        prop_assert!(rel(ab.matrix(), ba.matrix()) <= 1e-10);
    }

    #[test]
    fn norms_unitarily_invariant_and_subadditive(seed in any::<u64>(), n in 1usize..6) {
        let m = gaussian(seed, n);
        let k = gaussian(seed ^ 5, n);
        let (u, v) = (unitary(seed ^ 11, n), unitary(seed ^ 13, n));
        let umv = &(&u * &m) * &v;
        let sum = &m + &k;
        let mut specs = standard_norms(n, &SCHATTEN);
        specs.extend([NormSpec::Trace, NormSpec::Operator, NormSpec::Frobenius]);
        for spec in specs {
            let base = norm_eval(&m, spec).unwrap();
            prop_assert!(close(norm_eval(&umv, spec).unwrap(), base, 1e-10));
            let bound = base + norm_eval(&k, spec).unwrap();
            prop_assert!(norm_eval(&sum, spec).unwrap() <= bound + 1e-10 * bound.max(1.0));
        }
    }

    #[test]
    fn gram_swap(seed in any::<u64>(), n in 1usize..6, ai in 0usize..3) {
        let a = [0.5, 1.0, 2.0][ai];
        let y = gaussian(seed, n);
        let left = matrix_power(&HermitianMatrix::symmetrize(&(&y.adjoint() * &y)), a).unwrap();
        let right = matrix_power(&HermitianMatrix::symmetrize(&(&y * &y.adjoint())), a).unwrap();
        for spec in standard_norms(n, &SCHATTEN) {
            prop_assert!(close(norm_eval(left.matrix(), spec).unwrap(), norm_eval(right.matrix(), spec).unwrap(), 1e-9));
        }
    }

    #[test]
    fn normal_product_swap(seed in any::<u64>(), n in 1usize..6) {
        let inst = generate_instance(InstanceKind::Commuting, n, 1, seed, &law()).unwrap();
        let (a, b) = (inst.a()[0].matrix(), inst.b()[0].matrix());
        for spec in standard_norms(n, &SCHATTEN) {
            let ab = norm_eval(&(a * b), spec).unwrap();
            let ba = norm_eval(&(b * a), spec).unwrap();
            prop_assert!(ab <= ba + 1e-10 * ba.max(1.0));
        }
    }

    #[test]
    fn norm_aliases(seed in any::<u64>(), n in 1usize..6) {
        let m = gaussian(seed, n);
        let pairs = [
            (NormSpec::Trace, NormSpec::KyFan(n)),
            (NormSpec::Trace, NormSpec::Schatten(1.0)),
            (NormSpec::Operator, NormSpec::KyFan(1)),
            (NormSpec::Operator, NormSpec::Schatten(f64::INFINITY)),
            (NormSpec::Frobenius, NormSpec::Schatten(2.0)),
        ];
        for (alias, base) in pairs {
            prop_assert!(close(norm_eval(&m, alias).unwrap(), norm_eval(&m, base).unwrap(), 1e-12));
        }
    }

    #[test]
    fn z_rank_and_reduced_form(seed in any::<u64>(), n in 1usize..5, m in 1usize..4, a in 0.0f64..3.0) {
        let inst = instance(seed, n, m);
        let z = build_z(&inst).unwrap();
        let eig = hermitian_eig(&z.data).unwrap();
        for l in &eig.eigenvalues[n..] {
            prop_assert!(l.abs() <= 1e-10 * eig.max_eigenvalue());
        }
        let core = reduced_core(&inst).unwrap();
        let za = hermitian_singular_values(&matrix_power(&z.data, a).unwrap()).unwrap();
        let ca = hermitian_singular_values(&matrix_power(core.hermitian(), a).unwrap()).unwrap();
        for k in 1..=n * m {
            prop_assert!(close(za.ky_fan(k), ca.ky_fan(k.min(n)), 1e-9));
        }
    }
}

fn main_chain_matrices(
    inst: &Instance,
    p: &ChainParams,
) -> (HermitianMatrix<f64>, HermitianMatrix<f64>, HermitianMatrix<f64>) {
    let n = inst.n();
    let mut lhs = HermitianMatrix::symmetrize(&ComplexMatrix::zeros(n, n));
    for (a, b) in inst.a().iter().zip(inst.b()) {
        let mean = t_geometric_mean(
            &a.spd_power(p.s).unwrap(),
            &b.spd_power(p.s).unwrap(),
            MeanParams::half(),
        )
        .unwrap();
        lhs = lhs.add(&matrix_power(mean.hermitian(), p.r).unwrap());
    }
    let mid = matrix_power(&build_z(inst).unwrap().data, p.s * p.r / 2.0).unwrap();
    let e = p.s * p.r * p.p;
    let (sa, sb) = (inst.sum_a().unwrap(), inst.sum_b().unwrap());
    let outer = matrix_power(sa.hermitian(), e / 4.0).unwrap();
    let inner = matrix_power(sb.hermitian(), e / 2.0)
        .unwrap()
        .congruence(outer.matrix());
    let rhs = matrix_power(&inner, 1.0 / p.p).unwrap();
    (lhs, mid, rhs)
}

fn spectrum(h: &HermitianMatrix<f64>) -> SingularValueList<f64> {
    hermitian_singular_values(h).unwrap()
}

#[test]
fn chain_consistency_and_dominance_aggregation() {
    let points = [(2.0, 1.0, 1.0), (3.0, 2.0, 0.5), (2.5, 1.5, 2.0), (4.0, 1.0, 1.0)];
    for j in 0..50u64 {
        let (n, m) = (1 + (j % 4) as usize, 1 + (j / 4 % 3) as usize);
        let inst = instance(9000 + j, n, m);
        let mut ev = ChainEvaluator::new(&inst, SuiteConfig::default()).unwrap();
        let dim = n * m;
        let (s, r, p) = points[(j % 4) as usize];
        let params = ChainParams::main(s, r, p).unwrap();
        let kyfan: Vec<NormSpec> = (1..=dim).map(NormSpec::KyFan).collect();
        let mut norms = kyfan.clone();
        norms.extend(SCHATTEN.map(NormSpec::Schatten));
        let reports = ev.evaluate(ChainId::Main, params, &norms).unwrap();
        let (lhs, mid, rhs) = main_chain_matrices(&inst, &params);
        for rep in &reports {
            let independent = norm_eval(mid.matrix(), rep.norm).unwrap();
            assert!(
                close(rep.mid.unwrap(), independent, 1e-10),
                "mid {} vs {independent}",
                rep.mid.unwrap()
            );
        }
        let tol = 1e-8;
        let step1 = ky_fan_dominance_values(&spectrum(&lhs), &spectrum(&mid), dim, tol).dominated;
        let step2 = ky_fan_dominance_values(&spectrum(&mid), &spectrum(&rhs), dim, tol).dominated;
        let all_kyfan = reports
            .iter()
            .filter(|r| matches!(r.norm, NormSpec::KyFan(_)))
            .all(|r| r.pass);
        assert_eq!(all_kyfan, step1 && step2);
        if step1 && step2 {
            assert!(reports.iter().all(|r| r.pass));
        }
    }
}

#[test]
fn gating_soundness() {
    let cfg = SweepConfig {
        n_values: vec![2, 3, 4],
        m_values: vec![1, 2, 3],
        instance_count: 60,
        base_seed: 77,
        generator: InstanceKind::Generic,
        spectrum_law: SpectrumLaw::Loguniform { lo: 1e-6, hi: 1.0 },
        param_grid: ParamGrid {
            s: vec![2.0, 3.0],
            r: vec![1.0],
            p: vec![1.0],
            t: vec![0.5],
        },
        norms: vec![NormSelector::KyFanAll],
        tol_rel: 1e-8,
        condition_cap: 1e8,
        chains: vec![SweepTarget::Main],
    };
    let rs = run_sweep(&cfg).unwrap();
    assert!(rs.summary.gated > 0, "stress law should trigger the gate");
    for rec in &rs.records {
        let Record::Chain(c) = rec else { continue };
        let inst = generate_instance(InstanceKind::Generic, c.n, c.m, c.instance_seed, &cfg.spectrum_law).unwrap();
        let mut conds: Vec<f64> = inst.a().iter().chain(inst.b()).map(|x| x.condition_number()).collect();
        conds.extend(conds.clone().iter().map(|k| k.powf(c.params.s)));
        conds.push(inst.sum_a().unwrap().condition_number());
        conds.push(inst.sum_b().unwrap().condition_number());
        conds.push(reduced_core(&inst).unwrap().condition_number());
        let worst = conds.iter().copied().fold(1.0, f64::max);
        assert_eq!(c.gated, worst > cfg.condition_cap, "seed {}", c.instance_seed);
    }
}
