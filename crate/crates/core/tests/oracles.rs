//! Library results against independent computations.

use num_bigint::BigInt;
use num_traits::Zero;

use pellrank::arith;
use pellrank::f2linalg::{self, Rational};
use pellrank::model;
use pellrank::quadform::{self, NegPell};
use pellrank::redei;

fn brute_primes(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| (2..k).take_while(|i| i * i <= k).all(|i| k % i != 0)).collect()
}

fn euler(a: i64, p: u64) -> i32 {
    let r = arith::pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[test]
fn jacobi_matches_euler_criterion() {
    for p in brute_primes(600).into_iter().skip(1) {
        for a in -700i64..700 {
            assert_eq!(arith::jacobi(a, p as i64).unwrap(), euler(a, p), "({a}/{p})");
        }
    }
}

#[test]
fn jacobi_is_product_over_prime_factors() {
    for n in (3i64..1500).step_by(2) {
        let f = arith::factor(n as u64).unwrap();
        for a in -60i64..60 {
            let prod: i32 = f
                .iter()
                .map(|&(p, e)| euler(a, p).pow(e))
                .product();
            assert_eq!(arith::jacobi(a, n).unwrap(), prod, "({a}/{n})");
        }
    }
}

#[test]
fn kronecker_at_two() {
    for a in -200i64..200 {
        let want = match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
        assert_eq!(arith::kronecker(a, 2), want);
    }
}

#[test]
fn primes_and_factorizations() {
    let ps = brute_primes(20_000);
    assert_eq!(arith::primes_up_to(20_000), ps);
    for n in 2u64..20_000 {
        assert_eq!(arith::is_prime(n), ps.binary_search(&n).is_ok());
        let f = arith::factor(n).unwrap();
        assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
    }
    // Carmichael numbers and a large semiprime
    for n in [561u64, 1105, 1729, 2465, 3_215_031_751] {
        assert!(!arith::is_prime(n));
    }
    assert!(arith::is_prime(999_999_999_989));
}

#[test]
fn squarefree_sieve_matches_trial_division() {
    let brute: Vec<u64> = (2u64..=120_000)
        .filter(|&n| (2u64..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0))
        .collect();
    assert_eq!(arith::squarefree_sieve(120_000).collect::<Vec<_>>(), brute);
    let primes = arith::primes_up_to(400);
    let fac = arith::factor_squarefree_range(100_000, 120_001, &primes);
    for (i, f) in fac.iter().enumerate() {
        let n = 100_000 + i as u64;
        let expect = arith::is_squarefree(n)
            .unwrap()
            .then(|| arith::factor(n).unwrap().into_iter().map(|(p, _)| p).collect());
        assert_eq!(*f, expect, "n = {n}");
    }
}

/// Hilbert symbol (a, b)_p, with p = 0 for the real place.
fn hilbert(a: i64, b: i64, p: u64) -> i32 {
    if p == 0 {
        return if a < 0 && b < 0 { -1 } else { 1 };
    }
    let split = |mut x: i64| {
        let mut e = 0u32;
        while x % p as i64 == 0 {
            x /= p as i64;
            e += 1;
        }
        (e, x)
    };
    let (al, u) = split(a);
    let (be, v) = split(b);
    if p == 2 {
        let eps = |x: i64| ((x - 1) / 2).rem_euclid(2);
        let om = |x: i64| ((x * x - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + al as i64 * om(v) + be as i64 * om(u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let sign = if (al * be) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
    sign * euler(u, p).pow(be) * euler(v, p).pow(al)
}

#[test]
fn conic_solver_matches_local_conditions() {
    let sf: Vec<i64> = (-40i64..=40)
        .filter(|&x| x != 0 && arith::is_squarefree(x.unsigned_abs()).unwrap())
        .collect();
    for &a in &sf {
        for &b in &sf {
            let mut places = vec![0u64, 2];
            for x in [a, b] {
                for (p, _) in arith::factor(x.unsigned_abs().max(1)).unwrap_or_default() {
                    if p != 2 {
                        places.push(p);
                    }
                }
            }
            let local = places.iter().all(|&p| hilbert(a, b, p) == 1);
            match redei::solve_conic(a, b) {
                Ok((x, y, z)) => {
                    assert!(local, "({a}, {b}) solved but locally obstructed");
                    assert_eq!(&x * &x - &y * &y * a, &z * &z * b);
                    assert!(!z.is_zero());
                }
                Err(_) => assert!(!local, "({a}, {b}) is locally soluble"),
            }
        }
    }
}

#[test]
fn negative_pell_matches_search() {
    for d in 2u64..600 {
        if arith::is_square(d) {
            continue;
        }
        let found = (1u64..20_000).find(|&y| arith::is_square(d * y * y - 1));
        let res = quadform::negative_pell(d).unwrap();
        let soluble = matches!(res, NegPell::Yes(_));
        if let Some(y) = found {
            let x = arith::isqrt(d * y * y - 1);
            match res {
                NegPell::Yes(Some((px, py))) => {
                    assert_eq!(&px * &px - BigInt::from(d) * &py * &py, BigInt::from(-1));
                    // the fundamental solution is the smallest one
                    assert_eq!((px, py), (BigInt::from(x), BigInt::from(y)), "d = {d}");
                }
                other => panic!("d = {d}: search found ({x}, {y}) but got {other:?}"),
            }
        }
        let (_, period) = quadform::cf_sqrt(d).unwrap();
        assert_eq!(period.len() % 2 == 1, soluble, "d = {d}");
    }
}

#[test]
fn kernel_law_and_g_match_enumeration() {
    for m in 0..=4 {
        for n in 0..=4 {
            let st = f2linalg::enumerate_matrix_stats(m, n).unwrap();
            for j in 0..=n {
                let seen = st.kernel_rank.get(&j).cloned().unwrap_or_else(Rational::zero);
                assert_eq!(seen, f2linalg::prob_kernel_rank(m, n, j), "P({m}, {n}, {j})");
            }
        }
    }
    for n in 1..=4 {
        let st = f2linalg::enumerate_matrix_stats(n, n).unwrap();
        for (&k, freq) in &st.trivial_intersection {
            assert_eq!(*freq, f2linalg::g_exact(n, k), "g({n}, {k})");
        }
    }
}

#[test]
fn conditional_law_by_simulation() {
    let c = f2linalg::simulate_tu(1, 200_000, 7).unwrap();
    assert_eq!(c.frequency(0), Some(1.0));
    let f = c.frequency(1).unwrap();
    assert!((f - 1.0 / 3.0).abs() < 0.01, "{f}");
}

#[test]
fn published_constants() {
    assert!((model::alpha() - 0.4194).abs() < 5e-5);
    assert!((model::alpha() * model::beta() - 0.53823).abs() < 5e-6);
    let b = model::pell_bounds(40).unwrap();
    assert!((b.lower.value - 0.54302).abs() < 5e-6);
    assert!((b.upper.value - 0.59944).abs() < 5e-6);
    let g = model::gamma_constant(1e-12);
    assert!(g.value > 0.49 && g.value < 0.51);
}

#[test]
fn alpha_product_against_float_loop() {
    let mut p = 1.0f64;
    for j in 1..200 {
        p /= 1.0 + 0.5f64.powi(j);
    }
    assert!((model::alpha() - p).abs() < 1e-14);
    let beta: f64 = (0..40).map(|n| 0.5f64.powi(n * (n + 3) / 2)).sum();
    assert!((model::beta() - beta).abs() < 1e-14);
}
