use num_bigint::BigInt;
use proptest::prelude::*;

use pellrank::arith::{self, FamilyStatus};
use pellrank::f2linalg::{self, F2Matrix, Rational};
use pellrank::quadform::{self, ClassGroup, Representation, SolveOutcome};
use pellrank::scan::{aggregate, compute_record};

fn squarefree(max: u64) -> impl Strategy<Value = u64> {
    (2..max).prop_filter("squarefree", |&d| arith::is_squarefree(d).unwrap())
}

fn fundamental(max: u64) -> impl Strategy<Value = i64> {
    squarefree(max).prop_map(|d| quadform::principal_form(d).unwrap().disc() as i64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_is_transpose_invariant(m in 0usize..14, n in 0usize..14, seed: u64) {
        let a = f2linalg::sample_matrix(m, n, seed);
        let r = f2linalg::rank(&a);
        prop_assert_eq!(r, f2linalg::rank(&a.transpose()));
        let right = f2linalg::right_kernel_basis(&a);
        let left = f2linalg::left_kernel_basis(&a);
        prop_assert_eq!(right.len(), n - r);
        prop_assert_eq!(left.len(), m - r);
        for v in &right {
            prop_assert!(a.mul_vec(v).is_zero());
        }
        for v in &left {
            prop_assert!(a.vec_mul(v).is_zero());
        }
        prop_assert_eq!(f2linalg::rank(&F2Matrix::from_row_vectors(n, &right)), right.len());
    }

    #[test]
    fn intersection_lies_in_both(n in 1usize..10, s1: u64, s2: u64) {
        let a = f2linalg::sample_matrix(n, n, s1);
        let b = f2linalg::sample_matrix(n, n, s2);
        let ka = f2linalg::right_kernel_basis(&a);
        let kb = f2linalg::right_kernel_basis(&b);
        let both = f2linalg::subspace_intersection(n, &ka, &kb);
        for v in &both {
            prop_assert!(a.mul_vec(v).is_zero() && b.mul_vec(v).is_zero());
        }
        // dim(A ∩ B) = dim A + dim B − dim(A + B)
        let mut sum = ka.clone();
        sum.extend(kb.iter().cloned());
        let span = f2linalg::rank(&F2Matrix::from_row_vectors(n, &sum));
        prop_assert_eq!(both.len(), ka.len() + kb.len() - span);
    }

    #[test]
    fn kernel_rank_law_sums_to_one(m in 0usize..20, n in 0usize..20) {
        let s: Rational = (0..=n).map(|j| f2linalg::prob_kernel_rank(m, n, j)).sum();
        prop_assert_eq!(s, Rational::from_integer(1.into()));
    }

    #[test]
    fn jacobi_reciprocity(a in (1i64..100_000).prop_map(|x| 2 * x + 1),
                          b in (1i64..100_000).prop_map(|x| 2 * x + 1)) {
        let ja = arith::jacobi(a, b).unwrap();
        let jb = arith::jacobi(b, a).unwrap();
        if num_integer::gcd(a, b) != 1 {
            prop_assert_eq!((ja, jb), (0, 0));
        } else {
            let sign = if a % 4 == 3 && b % 4 == 3 { -1 } else { 1 };
            prop_assert_eq!(ja * jb, sign);
        }
    }

    #[test]
    fn jacobi_is_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000,
                                n in (0i64..50_000).prop_map(|x| 2 * x + 1)) {
        let lhs = arith::jacobi(a * b, n).unwrap();
        prop_assert_eq!(lhs, arith::jacobi(a, n).unwrap() * arith::jacobi(b, n).unwrap());
    }

    #[test]
    fn characters_multiply_to_kronecker(d in squarefree(200_000), q in 1u64..1_000_000) {
        let f = arith::genus_components(d).unwrap();
        prop_assume!(num_integer::gcd(q, f.delta) == 1);
        let bits: u8 = f.components.iter().map(|c| arith::eval_character(c, q).unwrap()).sum::<u8>() % 2;
        let kr = arith::kronecker(f.delta as i64, q as i64);
        prop_assert_eq!(if bits == 0 { 1 } else { -1 }, kr);
    }

    #[test]
    fn sqrt_mod_roots_square(a in -5000i64..5000, m in 1u64..5000) {
        let roots = arith::sqrt_mod(a, m).unwrap();
        let target = a.rem_euclid(m as i64) as u64;
        for &r in &roots {
            prop_assert_eq!(r * r % m, target);
        }
        let brute = (0..m).filter(|&x| x * x % m == target).count();
        prop_assert_eq!(roots.len(), brute);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn composition_is_a_group_law(delta in fundamental(3000), i: usize, j: usize, k: usize) {
        let g = ClassGroup::new(delta).unwrap();
        let h = g.h_plus();
        let (a, b, c) = (&g.classes[i % h], &g.classes[j % h], &g.classes[k % h]);
        let e = &g.classes[g.identity];
        let ab = quadform::compose(a, b).unwrap();
        let ba = quadform::compose(b, a).unwrap();
        prop_assert_eq!(&ab.canonical, &ba.canonical);
        let l = quadform::compose(&ab, c).unwrap();
        let r = quadform::compose(a, &quadform::compose(b, c).unwrap()).unwrap();
        prop_assert_eq!(&l.canonical, &r.canonical);
        prop_assert_eq!(&quadform::compose(a, e).unwrap().canonical, &a.canonical);
        let inv = quadform::cycle(&a.canonical.inverse()).unwrap();
        prop_assert_eq!(&quadform::compose(a, &inv).unwrap().canonical, &e.canonical);
        prop_assert_eq!(h as u64 % g.order(i % h), 0);
    }

    #[test]
    fn ordinary_group_matches_negative_pell(d in squarefree(20_000)) {
        let delta = quadform::principal_form(d).unwrap().disc() as i64;
        let cg = quadform::narrow_class_group(delta).unwrap();
        prop_assert!(cg.h == cg.h_plus || 2 * cg.h == cg.h_plus);
        let neg = quadform::negative_pell_decide(d).unwrap();
        prop_assert_eq!(cg.negative_pell, neg);
        prop_assert_eq!(cg.h == cg.h_plus, neg);
        // the continued fraction of √d has odd period exactly when −1 is a norm
        let (_, period) = quadform::cf_sqrt(d).unwrap();
        prop_assert_eq!(period.len() % 2 == 1, neg);
        prop_assert_eq!(quadform::represents_principal(d, -1).unwrap().is_yes(), neg);
        prop_assert!(cg.rk4plus <= cg.rk2plus && cg.rk8plus <= cg.rk4plus);
    }

    #[test]
    fn witnesses_validate(d in squarefree(50_000), l in prop::sample::select(vec![-1i64, 3, -3, 7, -7, 11, -11, 19])) {
        match quadform::solve_generalized(d, l).unwrap() {
            SolveOutcome::Soluble(Some((x, y))) => {
                let n = quadform::principal_form(d).unwrap();
                prop_assert_eq!(n.eval(&x, &y), BigInt::from(l));
            }
            SolveOutcome::Soluble(None) => {}
            SolveOutcome::Insoluble => {
                prop_assert_eq!(arith::in_family(d, l).unwrap(), FamilyStatus::Yes);
            }
            SolveOutcome::NotInFamily(s) | SolveOutcome::QInsoluble(s) => {
                prop_assert_ne!(s, FamilyStatus::Yes);
            }
        }
    }

    #[test]
    fn representation_agrees_with_small_search(d in squarefree(3000), m in -60i64..60) {
        prop_assume!(m != 0);
        let n = quadform::principal_form(d).unwrap();
        let rep = quadform::represents_principal(d, m).unwrap();
        let (a, b, c) = (n.a as i128, n.b as i128, n.c as i128);
        let found = (0i128..300).any(|y| (-3000i128..3000).any(|x| {
            a * x * x + b * x * y + c * y * y == m as i128
        }));
        if found {
            prop_assert!(rep.is_yes());
        }
        if let Representation::Yes(Some((x, y))) = rep {
            prop_assert_eq!(n.eval(&x, &y), BigInt::from(m));
        }
    }

    #[test]
    fn aggregation_is_order_independent(start in 2u64..2000, shuffle_seed: u64, split in 0usize..50) {
        let recs: Vec<_> = (start..start + 400)
            .filter_map(|d| {
                let f = arith::factor(d).unwrap();
                if f.iter().any(|&(_, e)| e > 1) {
                    return None;
                }
                let ps = f.into_iter().map(|(p, _)| p).collect();
                let r = compute_record(d, ps, -1, false, 40).unwrap();
                (r.in_family == FamilyStatus::Yes).then_some(r)
            })
            .collect();
        let base = aggregate(&recs).unwrap();
        let mut perm = recs.clone();
        let mut s = shuffle_seed | 1;
        for i in (1..perm.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(&aggregate(&perm).unwrap(), &base);
        // counting is additive over a partition
        let cut = split.min(recs.len());
        let (a, b) = (aggregate(&recs[..cut]).unwrap(), aggregate(&recs[cut..]).unwrap());
        prop_assert_eq!(a.count_q + b.count_q, base.count_q);
        prop_assert_eq!(a.count_z + b.count_z, base.count_z);
        for (j, c) in &base.rk4_histogram {
            let part = a.rk4_histogram.get(j).unwrap_or(&0) + b.rk4_histogram.get(j).unwrap_or(&0);
            prop_assert_eq!(part, *c);
        }
        prop_assert_eq!(base.rk4_histogram.values().sum::<u64>(), base.count_q);
        prop_assert!(base.conditional.values().all(|&f| (0.0..=1.0).contains(&f)));
    }
}
