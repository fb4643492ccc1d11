mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use l2chi::expansion::{mu_sweep, normalized_valuation, ExpansionJob, ValuationOptions};
use l2chi::parse::{parse_expr, InputFile, Scope};
use l2chi::quotient::{regular_action_matrix, zl_mul, ZLMatrix};
use l2chi::rank::group_matrix_rank;
use l2chi::{
    abelian_quotient, find_lift, fox_derivative, free_by_cyclic, make_character, perm_quotient,
    subgroup_closure, CharacterSpec, Elementary, FiniteQuotient, GroupRingElement, Presentation,
    RankMethod, RankPolicy, Word,
};

use common::{det, random_matrix, to_ring, z2, Bi};

fn word_strategy(rank: u32) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, -3i64..=3), 0..5)
        .prop_map(|s| Word::from_syllables(s.into_iter().map(|(g, e)| (g as usize, e))))
}

fn element_strategy(rank: u32) -> impl Strategy<Value = GroupRingElement> {
    prop::collection::vec((word_strategy(rank), -4i64..=4), 0..5).prop_map(|ts| {
        GroupRingElement::from_terms(ts.into_iter().map(|(w, c)| (w, BigInt::from(c))))
    })
}

fn exact_opts() -> ValuationOptions {
    ValuationOptions {
        policy: RankPolicy {
            probes: 3,
            exact: false,
            seed: 7,
        },
        ..ValuationOptions::default()
    }
}

/// Symmetric group on three points as a quotient of the free group of rank 2.
fn s3() -> FiniteQuotient {
    perm_quotient(
        &Presentation::new(2, vec![]),
        vec![vec![1, 0, 2], vec![1, 2, 0]],
    )
    .unwrap()
}

fn dense_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b[0].len();
    let mut c = vec![vec![0i64; m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k] != 0 {
                for j in 0..m {
                    c[i][j] += a[i][k] * bk[j];
                }
            }
        }
    }
    c
}

proptest! {
    #[test]
    fn ring_axioms(x in element_strategy(2), y in element_strategy(2), z in element_strategy(2)) {
        let xy = x.mul_ref(&y);
        prop_assert_eq!(xy.mul_ref(&z), x.mul_ref(&y.mul_ref(&z)));
        let mut yz = y.clone();
        yz.add_assign_ref(&z);
        let mut lhs = x.mul_ref(&y);
        lhs.add_assign_ref(&x.mul_ref(&z));
        prop_assert_eq!(x.mul_ref(&yz), lhs);
        prop_assert_eq!(xy.adjoint(), y.adjoint().mul_ref(&x.adjoint()));
        prop_assert_eq!(x.adjoint().adjoint(), x.clone());
        prop_assert_eq!(xy.augmentation(), x.augmentation() * y.augmentation());
    }

    #[test]
    fn fox_fundamental_formula(r in word_strategy(3)) {
        let mut sum = GroupRingElement::zero();
        for j in 0..3 {
            let mut xm1 = GroupRingElement::from_word(Word::gen(j));
            xm1.sub_assign_ref(&GroupRingElement::one());
            sum.add_assign_ref(&fox_derivative(&r, j).mul_ref(&xm1));
        }
        let mut expected = GroupRingElement::from_word(r.clone());
        expected.sub_assign_ref(&GroupRingElement::one());
        prop_assert_eq!(sum, expected);
    }

    #[test]
    fn expression_round_trip(x in element_strategy(3)) {
        let names = vec!['a', 'b', 'c'];
        let text = x.display_with(&names);
        let back = parse_expr(&text, &Scope::new(names)).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn presentation_file_round_trip(gens in prop::collection::vec((0usize..3, 1usize..4, 1usize..4), 1..5)) {
        let els: Vec<Elementary> = gens
            .iter()
            .filter(|(k, i, j)| *k == 2 || i != j)
            .map(|&(k, i, j)| match k {
                0 => Elementary::Eta(i - 1, j - 1),
                1 => Elementary::Sigma(i - 1, j - 1),
                _ => Elementary::Tau(i - 1),
            })
            .collect();
        let p = free_by_cyclic(3, &els).unwrap();
        let text = InputFile::from_presentation("random", &p).serialize();
        let again = InputFile::parse(&text).unwrap();
        prop_assert_eq!(again.serialize(), text.clone());
        let (q, _) = again.build().unwrap();
        prop_assert_eq!(q.relators, p.relators);
    }

    #[test]
    fn elementary_names_parse(i in 1usize..5, j in 1usize..5) {
        prop_assume!(i != j);
        prop_assert_eq!(Elementary::parse(&format!("eta_{i}_{j}")).unwrap(), Elementary::Eta(i - 1, j - 1));
        prop_assert_eq!(Elementary::parse(&format!("sigma_{i}_{j}")).unwrap(), Elementary::Sigma(i - 1, j - 1));
        prop_assert_eq!(Elementary::parse(&format!("tau_{i}")).unwrap(), Elementary::Tau(i - 1));
    }

    #[test]
    fn regular_representation_is_multiplicative(x in element_strategy(2), y in element_strategy(2)) {
        let q = s3();
        let t = subgroup_closure(&q, &[Word::gen(0), Word::gen(1)], 100).unwrap();
        let a = t.eval_element(&x).unwrap();
        let b = t.eval_element(&y).unwrap();
        let ab = zl_mul(&a, &b, &t).unwrap();
        let one = |e| ZLMatrix { rows: 1, cols: 1, entries: vec![e] };
        let ra = regular_action_matrix(&one(a), &t).unwrap().to_dense();
        let rb = regular_action_matrix(&one(b), &t).unwrap().to_dense();
        let rab = regular_action_matrix(&one(ab), &t).unwrap().to_dense();
        prop_assert_eq!(dense_mul(&ra, &rb), rab);
    }

    #[test]
    fn unit_shrink_preserves_rank(
        rows in 1usize..4,
        cols in 1usize..4,
        entries in prop::collection::vec((element_strategy(2), any::<bool>(), word_strategy(2)), 9),
    ) {
        let q = s3();
        let t = subgroup_closure(&q, &[Word::gen(0), Word::gen(1)], 100).unwrap();
        let mut m = ZLMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let (x, unit, w) = &entries[i * 3 + j];
                // mix in plenty of ±g entries so pivoting actually happens
                let e = if *unit { GroupRingElement::from_word(w.clone()) } else { x.clone() };
                m.set(i, j, t.eval_element(&e).unwrap());
            }
        }
        let policy = RankPolicy { probes: 1, exact: true, seed: 0 };
        let with = group_matrix_rank(&m, &t, true, RankMethod::Regular, &policy).unwrap();
        let without = group_matrix_rank(&m, &t, false, RankMethod::Regular, &policy).unwrap();
        prop_assert_eq!(with.rank, without.rank);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn psi_is_monotone_and_concave(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = z2();
        let m = to_ring(&random_matrix(&mut rng, n, 2, 1));
        let phi = make_character(&p, &CharacterSpec::Images(vec![1, 0])).unwrap();
        let job = ExpansionJob::new(&m, &phi, &find_lift(&phi), 0).unwrap();
        let q = abelian_quotient(&p, &[(3, 1)]).unwrap();
        let opts = ValuationOptions { cap_mu: false, ..exact_opts() };
        let sweep = mu_sweep(&job, 1..=job.certified_mu() + 2, &q, &opts);
        prop_assert!(sweep.is_ok(), "{:?}", sweep.err());
    }
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Valuation along `t` of random commutative Laurent matrices against the
/// lowest `t`-power of the determinant, over `Z²` mod a large prime.
#[test]
fn commutative_valuation_matches_determinant_order() {
    let p = z2();
    let phi = make_character(&p, &CharacterSpec::Images(vec![1, 0])).unwrap();
    let lift = find_lift(&phi);
    let prime = 1009u64;
    let q = abelian_quotient(&p, &[(prime, 1)]).unwrap();
    let opts = exact_opts();
    let mut exact_hits = 0;
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + case);
        let n = if case % 2 == 0 { 2 } else { 3 };
        let a = random_matrix(&mut rng, n, 2, 1);
        let d: Bi = det(&a);
        let ord = d.t_order().unwrap();
        let job = ExpansionJob::new(&to_ring(&a), &phi, &lift, 0).unwrap();
        let mu = job.certified_mu();
        let r = normalized_valuation(&job, mu, &q, &opts).unwrap();
        let diff = &r.v - rat(job.n_shift) - rat(ord);
        let bound = BigRational::new(
            BigInt::from(d.low_coeff_s_span() as usize * mu * n),
            BigInt::from(prime),
        );
        assert!(
            !diff.is_negative(),
            "case {case}: v − N below ord det ({diff})"
        );
        assert!(diff <= bound, "case {case}: diff {diff} exceeds {bound}");
        assert_eq!((&r.v - rat(job.n_shift)).round(), rat(ord), "case {case}");
        if diff.is_zero() {
            exact_hits += 1;
        }
    }
    assert!(exact_hits > 50, "only {exact_hits} exact cases");
}

/// Over `Z = ⟨t⟩` with the trivial quotient the valuation at the certified
/// expansion parameter is exactly the order of the determinant.
#[test]
fn single_variable_valuation_is_exact() {
    let p = Presentation::with_names(vec!['t', 's'], vec![Word::gen(1)]);
    let phi = make_character(&p, &CharacterSpec::Images(vec![1, 0])).unwrap();
    let lift = find_lift(&phi);
    let q = FiniteQuotient::trivial(2);
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + case);
        let n = 2 + (case % 2) as usize;
        let a = random_matrix(&mut rng, n, 3, 0);
        let ord = det(&a).t_order().unwrap();
        let job = ExpansionJob::new(&to_ring(&a), &phi, &lift, 0).unwrap();
        let r = normalized_valuation(&job, job.certified_mu(), &q, &exact_opts()).unwrap();
        assert_eq!(r.v - rat(job.n_shift), rat(ord), "case {case}");
        assert_eq!(r.l_order, 1);
        assert!(r.rank.rank.to_i64().is_some());
    }
}

#[test]
fn determinant_oracle_sanity() {
    // (1 − t)(1 + t) − t·t·s = 1 − 2t² s⁰… checked by hand
    let e = |ts: &[((i64, i64), i128)]| Bi(ts.iter().copied().collect());
    let m = vec![
        vec![e(&[((0, 0), 1), ((1, 0), -1)]), e(&[((1, 0), 1)])],
        vec![e(&[((1, 1), 1)]), e(&[((0, 0), 1), ((1, 0), 1)])],
    ];
    let d = det(&m);
    assert_eq!(d, e(&[((0, 0), 1), ((2, 0), -1), ((2, 1), -1)]));
    assert_eq!(d.t_order(), Some(0));
    assert!(BigRational::one() > BigRational::zero());
}
