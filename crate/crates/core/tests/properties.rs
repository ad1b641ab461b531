use jms_core::analysis::{det_l_formula, random_rank_one_square_zero};
use jms_core::factor::{coordinate_idempotent, det_match_word, word_for_sl};
use jms_core::jordan::{op_assoc_mult, op_l, op_u, trace_pairing};
use jms_core::transvect::{four_factor_scalars, word_standard_tau, word_u_of_n};
use jms_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fields() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13])
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix<F: Field>(f: &F, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix<F> {
    Matrix::from_fn(f.clone(), rows, cols, |_, _| f.random(rng))
}

/// `B C` with `B: d x r`, `C: r x d`, so the rank is at most `r`.
fn random_of_rank<F: Field>(f: &F, d: usize, r: usize, rng: &mut ChaCha8Rng) -> Matrix<F> {
    random_matrix(f, d, r, rng).mul(&random_matrix(f, r, d, rng))
}

fn field_axioms<F: Field>(f: &F, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let (a, b, c) = (f.random(rng), f.random(rng), f.random(rng));
    prop_assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
    prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
    prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
    prop_assert_eq!(f.add(&a, &f.neg(&a)), f.zero());
    if !f.is_zero(&a) {
        prop_assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
    }
    prop_assert_eq!(f.parse(&f.render(&a)).unwrap(), a);
    Ok(())
}

fn jordan_identities<F: Field>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let a = random_matrix(f, n, n, rng);
    let b = random_matrix(f, n, n, rng);
    let la = op_l(&a).unwrap();
    let lb = op_l(&b).unwrap();
    let two = f.from_i64(2);
    let quad = la.compose(&la).unwrap().scale(&two).sub(&op_l(&a.mul(&a)).unwrap()).unwrap();
    prop_assert_eq!(quad, op_u(&a).unwrap());
    let ab = a.mul(&b).sub(&b.mul(&a)).unwrap();
    let lhs = la.compose(&lb).unwrap().sub(&lb.compose(&la).unwrap()).unwrap().scale(&f.from_i64(4));
    let rhs = op_assoc_mult(&ab, Side::Left).unwrap().sub(&op_assoc_mult(&ab, Side::Right).unwrap()).unwrap();
    prop_assert_eq!(lhs, rhs);
    let left = op_assoc_mult(&a, Side::Left).unwrap();
    let right = op_assoc_mult(&b, Side::Right).unwrap();
    prop_assert_eq!(left.compose(&right).unwrap(), right.compose(&left).unwrap());
    if n >= 2 {
        let nm = random_rank_one_square_zero(f, n, rng).unwrap();
        let ln = op_l(&nm).unwrap();
        let un = op_u(&nm).unwrap();
        prop_assert_eq!(ln.compose(&ln).unwrap(), un.scale(&f.half(&f.one())));
        let x = random_matrix(f, n, n, rng);
        prop_assert_eq!(un.apply(&x).unwrap(), nm.scale(&trace_pairing(&nm, &x).unwrap()));
    }
    Ok(())
}

fn linalg_properties<F: Field>(f: &F, d: usize, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let r = rng.random_range(0..=d);
    let t = random_of_rank(f, d, r, rng);
    let rnf = t.rank_normal_form().unwrap();
    prop_assert_eq!(rnf.rank, t.rank());
    prop_assert_eq!(rnf.reconstruct(), t.clone());
    prop_assert!(rnf.u.inverse().is_ok() && rnf.w.inverse().is_ok());
    let kernel = t.kernel_basis();
    prop_assert_eq!(kernel.len(), d - t.rank());
    for v in &kernel {
        prop_assert!(t.mul_vec(v).unwrap().iter().all(|x| f.is_zero(x)));
    }
    let a = random_matrix(f, d, d, rng);
    let b = random_matrix(f, d, d, rng);
    let det_ab = a.mul(&b).determinant().unwrap();
    prop_assert_eq!(det_ab, f.mul(&a.determinant().unwrap(), &b.determinant().unwrap()));
    Ok(())
}

fn word_properties<F: Field>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let k1 = rng.random_range(0..5);
    let k2 = rng.random_range(0..5);
    let w1 = Word::new(f.clone(), n, (0..k1).map(|_| random_matrix(f, n, n, rng)).collect()).unwrap();
    let w2 = Word::new(f.clone(), n, (0..k2).map(|_| random_matrix(f, n, n, rng)).collect()).unwrap();
    let joined = w1.concat(&w2).unwrap();
    prop_assert_eq!(joined.evaluate(), w1.evaluate().compose(&w2.evaluate()).unwrap());
    let mut padded = joined.factors().to_vec();
    let at = rng.random_range(0..=padded.len());
    padded.insert(at, Matrix::identity(f.clone(), n));
    prop_assert_eq!(Word::new(f.clone(), n, padded).unwrap().evaluate(), joined.evaluate());
    Ok(())
}

fn transvection_properties<F: Field>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let nm = random_rank_one_square_zero(f, n, rng).unwrap();
    let t = f.random(rng);
    let id = OperatorMatrix::identity(f.clone(), n);
    let plus = word_u_of_n(&nm, &t).unwrap().evaluate();
    prop_assert_eq!(&plus, &id.add(&op_u(&nm).unwrap().scale(&t)).unwrap());
    let minus = word_u_of_n(&nm, &f.neg(&t)).unwrap().evaluate();
    prop_assert!(plus.compose(&minus).unwrap().is_identity());
    let sigma = f.random(rng);
    if let Ok(v) = four_factor_scalars(f, &sigma) {
        let prod = v.iter().fold(f.one(), |acc, x| f.mul(&acc, x));
        let shifted = v.iter().fold(f.one(), |acc, x| f.mul(&acc, &f.add(x, &f.one())));
        prop_assert!(f.is_one(&prod));
        prop_assert_eq!(shifted, sigma);
    }
    Ok(())
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> (usize, usize) {
    (rng.random_range(0..n), rng.random_range(0..n))
}

fn tau_fixes_other_units<F: Field>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let a = random_unit(n, rng);
    let mut b = random_unit(n, rng);
    while b == a {
        b = random_unit(n, rng);
    }
    let t = f.random(rng);
    let op = word_standard_tau(f, n, a, b, &t).unwrap().evaluate();
    let basis = BasisMap::new(n);
    let (ia, ib) = (basis.index(a.0, a.1), basis.index(b.0, b.1));
    let expected = OperatorMatrix::transvection(f.clone(), n, ia, ib, &t);
    prop_assert_eq!(&op, &expected);
    for k in 0..n * n {
        if k != ib {
            let (i, j) = basis.unit(k);
            prop_assert_eq!(op.apply(&Matrix::unit(f.clone(), n, i, j)).unwrap(), Matrix::unit(f.clone(), n, i, j));
        }
    }
    Ok(())
}

fn det_formula_property<F: Field>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> Result<(), TestCaseError> {
    let upper = rng.random_bool(0.5);
    let a = Matrix::from_fn(f.clone(), n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => f.from_i64(rng.random_range(-3..=3)),
        std::cmp::Ordering::Less if upper => f.random(rng),
        std::cmp::Ordering::Greater if !upper => f.random(rng),
        _ => f.zero(),
    });
    let direct = op_l(&a).unwrap().determinant();
    prop_assert_eq!(det_l_formula(&a).unwrap(), direct.clone());
    let criterion = (0..n).any(|i| (0..n).any(|j| f.is_zero(&f.add(a.get(i, i), a.get(j, j)))));
    prop_assert_eq!(criterion, f.is_zero(&direct));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms_hold(p in fields(), seed in any::<u64>()) {
        let mut r = rng(seed);
        field_axioms(&Rationals, &mut r)?;
        field_axioms(&PrimeField::new(p).unwrap(), &mut r)?;
    }

    #[test]
    fn fermat(p in fields(), x in 1u64..1000) {
        let f = PrimeField::new(p).unwrap();
        let x = f.from_u64(x);
        prop_assume!(x != 0);
        prop_assert!(f.is_one(&f.pow(&x, p - 1)));
    }

    #[test]
    fn rational_render_round_trip(num in any::<i64>(), den in 1i64..i64::MAX) {
        let q = Rational::new(num, den).unwrap();
        prop_assert_eq!(Rationals.parse(&Rationals.render(&q)).unwrap(), q);
    }

    #[test]
    fn exact_linear_algebra(p in fields(), d in 1usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        linalg_properties(&PrimeField::new(p).unwrap(), d * d.min(4), &mut r)?;
        linalg_properties(&Rationals, d, &mut r)?;
    }

    #[test]
    fn jordan_operator_identities(p in fields(), n in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        jordan_identities(&PrimeField::new(p).unwrap(), n, &mut r)?;
        jordan_identities(&Rationals, n, &mut r)?;
    }

    #[test]
    fn word_evaluation(p in fields(), n in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        word_properties(&PrimeField::new(p).unwrap(), n, &mut r)?;
        word_properties(&Rationals, n, &mut r)?;
    }

    #[test]
    fn determinant_formula(p in fields(), n in 1usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        det_formula_property(&PrimeField::new(p).unwrap(), n, &mut r)?;
        det_formula_property(&Rationals, n, &mut r)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn root_transvections(p in fields(), n in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        transvection_properties(&PrimeField::new(p).unwrap(), n, &mut r)?;
        transvection_properties(&Rationals, n, &mut r)?;
    }

    #[test]
    fn standard_tau_fixes_other_units(p in fields(), n in 2usize..=3, seed in any::<u64>()) {
        let mut r = rng(seed);
        tau_fixes_other_units(&PrimeField::new(p).unwrap(), n, &mut r)?;
        tau_fixes_other_units(&Rationals, n, &mut r)?;
    }

    #[test]
    fn rational_determinants_are_matched(num in -50i64..=50, den in 1i64..=50, n in 2usize..=3) {
        prop_assume!(num != 0);
        let gamma = Rational::new(num, den).unwrap();
        let w = det_match_word(&Rationals, &gamma, n).unwrap();
        prop_assert_eq!(w.evaluate().determinant(), gamma);
    }

    #[test]
    fn sl_words_evaluate_back(p in prop::sample::select(vec![3u64, 5, 7]), seed in any::<u64>()) {
        let f = PrimeField::new(p).unwrap();
        let mut r = rng(seed);
        let g = loop {
            let m = random_matrix(&f, 4, 4, &mut r);
            let det = m.determinant().unwrap();
            if det != 0 {
                // fix the determinant by scaling the first column
                let mut m = m;
                m.scale_col(0, &f.inv(&det).unwrap());
                break OperatorMatrix::from_matrix(2, m).unwrap();
            }
        };
        prop_assert_eq!(word_for_sl(&g).unwrap().evaluate(), g);
    }
}

#[test]
fn coordinate_idempotents_commute() {
    let f = PrimeField::new(5).unwrap();
    for n in 2..=3 {
        let d = n * n;
        let es: Vec<_> = (0..d).map(|k| coordinate_idempotent(&f, n, k)).collect();
        for a in &es {
            for b in &es {
                assert_eq!(a.compose(b).unwrap(), b.compose(a).unwrap());
            }
        }
        for r in 0..=d {
            let prod = es[r..].iter().fold(OperatorMatrix::identity(f, n), |acc, e| acc.compose(e).unwrap());
            assert_eq!(prod.body(), &Matrix::partial_identity(f, d, r));
        }
    }
}
