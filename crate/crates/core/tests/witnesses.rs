//! Every reported witness is re-checked from freshly computed sides.

use oplab::linalg::{frac_power, unitary_conjugate, ComplexMatrix, HermitianMatrix, PsdMatrix, WitnessKind};
use oplab::pairs::{make_power_pair, random_monotone_pair, MonotonePair};
use oplab::posmaps::apply_power;
use oplab::rng::{gaussian_matrix, random_psd, SplitMix64};
use oplab::verify::checks::{check_bk, check_c12, check_c22, check_c24, check_c25, check_p13, check_t11, check_t21, check_triangle_28, factorize_t23};
use oplab::verify::InequalityCheckReport;

mod common;
use common::{map, min_eig, modulus, projection, tol, unitary_witness_gap, SECTION1, UNITAL};

const WITNESS_REL: f64 = 1e-8;

fn assert_unitary_witness(report: &InequalityCheckReport, abs_x: &HermitianMatrix, y: &HermitianMatrix) {
    let gap = unitary_witness_gap(report, abs_x, y).unwrap();
    assert!(gap >= -WITNESS_REL, "{}: witness fails re-check, gap {gap:.3e}", report.case_id);
}

fn trials(f: impl FnMut(usize, &mut SplitMix64)) {
    common::trials("witness", 40, f);
}

#[test]
fn modulus_dominance_witnesses() {
    trials(|n, rng| {
        let phi = map(&SECTION1, n, rng);
        let a = random_psd(n, 0.0, 3.0, rng);
        let q = rng.uniform(0.1, 3.0);
        let p = rng.uniform(0.0, q);
        let r = rng.uniform(0.0, q);
        let p3 = p.min(q / 2.0);

        let rep = check_c12(&phi, &a, p, q, &tol()).unwrap();
        assert!(rep.holds);
        let x = apply_power(&phi, &a, p, &tol()).unwrap().as_matrix().matmul(apply_power(&phi, &a, q, &tol()).unwrap().as_matrix());
        let y = apply_power(&phi, &a, p + q, &tol()).unwrap();
        assert_unitary_witness(&rep, modulus(&x).as_hermitian(), y.as_hermitian());

        let rep = check_p13(&phi, &a, p3, q, r, &tol()).unwrap();
        assert!(rep.holds);
        let x = apply_power(&phi, &a, p3, &tol()).unwrap().as_matrix()
            .matmul(apply_power(&phi, &a, q, &tol()).unwrap().as_matrix())
            .matmul(apply_power(&phi, &a, r, &tol()).unwrap().as_matrix());
        let y = apply_power(&phi, &a, p3 + q + r, &tol()).unwrap();
        assert_unitary_witness(&rep, modulus(&x).as_hermitian(), y.as_hermitian());
    });
}

#[test]
fn bhatia_kittaneh_witnesses() {
    trials(|n, rng| {
        let x = gaussian_matrix(n, n, rng);
        let y = gaussian_matrix(n, n, rng);
        let rep = check_bk(&x, &y, &tol()).unwrap();
        assert!(rep.holds);
        let avg = HermitianMatrix::from_hermitian_part(&(&x.adjoint_mul(&x) + &y.adjoint_mul(&y)).scale(0.5));
        assert_unitary_witness(&rep, modulus(&x.matmul(&y.adjoint())).as_hermitian(), &avg);
    });
}

fn pair(n: usize, rng: &mut SplitMix64) -> MonotonePair {
    if rng.bernoulli(0.5) {
        let a = random_psd(n, 0.1, 3.0, rng);
        let q = rng.uniform(0.2, 2.0);
        make_power_pair(&a, rng.uniform(0.1, q), q).unwrap()
    } else {
        random_monotone_pair(n, rng, true).unwrap()
    }
}

#[test]
fn projection_and_map_witnesses() {
    trials(|n, rng| {
        let pr = pair(n, rng);
        let e = projection(n, rng);
        let rep = check_t21(&pr, &e, &tol()).unwrap();
        assert!(rep.holds);
        let (a, b, em) = (pr.a.as_matrix(), pr.b.as_matrix(), e.as_matrix());
        let abe = modulus(&a.matmul(b).matmul(em));
        assert_unitary_witness(&rep, modulus(&a.matmul(em).matmul(b)).as_hermitian(), abe.as_hermitian());

        let phi = map(&UNITAL, n, rng);
        let rep = check_c22(&phi, &pr, &tol()).unwrap();
        assert!(rep.holds);
        let fa = phi.apply_psd(&pr.a, &tol()).unwrap();
        let fb = phi.apply_psd(&pr.b, &tol()).unwrap();
        let lhs = HermitianMatrix::from_hermitian_part(&fa.as_matrix().matmul(fb.as_matrix()).matmul(fa.as_matrix()));
        let aba = pr.a.as_matrix().matmul(pr.b.as_matrix()).matmul(pr.a.as_matrix());
        let rhs = phi.apply(&HermitianMatrix::from_hermitian_part(&aba)).unwrap();
        assert_unitary_witness(&rep, &lhs, &rhs);
    });
}

#[test]
fn factorization_and_average_witnesses() {
    trials(|n, rng| {
        let pr = pair(n, rng);
        let phi = map(&UNITAL, n, rng);
        let fa = phi.apply_psd(&pr.a, &tol()).unwrap();
        let fb = phi.apply_psd(&pr.b, &tol()).unwrap();
        let ab = pr.a.as_matrix().matmul(pr.b.as_matrix());
        let p = PsdMatrix::from_matrix(phi.apply_general(&ab).unwrap().hermitian_part(), &tol()).unwrap();

        let f = factorize_t23(&phi, &pr, &tol()).unwrap();
        assert!(f.report.holds, "{:?}", f.report);
        let w = f.report.witness.as_ref().unwrap();
        assert_eq!(w.kind, WitnessKind::Pair);
        let x = fb.as_matrix().matmul(fa.as_matrix());
        let sq = frac_power(&p, 0.5).unwrap();
        let recon = sq.as_matrix().matmul(&f.k).matmul(sq.as_matrix()).matmul(&f.u);
        assert!((&recon - &x).frobenius_norm() <= 1e-8 * x.frobenius_norm().max(1.0));
        let kk = PsdMatrix::from_matrix(f.k.adjoint_mul(&f.k), &tol()).unwrap();
        assert!(kk.norm().sqrt() <= 1.0 + 1e-8);
        assert!((&f.u.adjoint_mul(&f.u) - &ComplexMatrix::identity(f.u.rows())).frobenius_norm() < 1e-9);

        let rep = check_c24(&phi, &pr, &tol()).unwrap();
        assert!(rep.holds);
        let v = &rep.witness.as_ref().unwrap().matrix;
        let avg = p.as_hermitian().add(&unitary_conjugate(v, p.as_hermitian())).scale(0.5);
        let y = fa.as_matrix().matmul(fb.as_matrix());
        let gap = min_eig(&avg.sub(modulus(&y).as_hermitian()));
        assert!(gap >= -WITNESS_REL * p.norm().max(1.0), "C2.4 witness gap {gap:.3e}");
    });
}

#[test]
fn triangle_witnesses() {
    trials(|n, rng| {
        let a = gaussian_matrix(n, n, rng);
        let b = if rng.bernoulli(0.3) { a.scale(-1.0) } else { gaussian_matrix(n, n, rng) };
        let rep = check_triangle_28(&a, &b, &tol()).unwrap();
        assert!(rep.holds);
        let v = &rep.witness.as_ref().unwrap().matrix;
        let vv = v.adjoint_mul(v);
        assert!((&vv.matmul(&vv) - &vv).frobenius_norm() < 1e-9);
        let s = &a + &b;
        let star = modulus(&a.adjoint()).as_hermitian().add(modulus(&b.adjoint()).as_hermitian());
        let plain = modulus(&a).as_hermitian().add(modulus(&b).as_hermitian());
        let rhs = plain.add(&star.congruence(v)).scale(0.5);
        let gap = min_eig(&rhs.sub(modulus(&s).as_hermitian()));
        assert!(gap >= -WITNESS_REL * rhs.frobenius_norm().max(1.0), "tri2.8 witness gap {gap:.3e}");
    });
}

#[test]
fn stronger_statements_imply_weaker_ones() {
    trials(|n, rng| {
        let phi = map(&SECTION1, n, rng);
        let a = random_psd(n, 0.0, 3.0, rng);
        let q = rng.uniform(0.1, 3.0);
        let p = rng.uniform(0.0, q);
        let t11 = check_t11(&phi, &a, p, q, &tol(), false).unwrap();
        let c12 = check_c12(&phi, &a, p, q, &tol()).unwrap();
        assert!(!t11.holds || c12.holds);

        let pr = pair(n, rng);
        let phi = map(&UNITAL, n, rng);
        let c25 = check_c25(&phi, &pr, &tol()).unwrap();
        assert!(!c25.margin("wlog").unwrap().holds() || c25.margin("kyfan").unwrap().holds());
    });
}
