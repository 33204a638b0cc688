//! Density constants and model probabilities. Rational cores are exact; each
//! infinite product or sum is truncated with an explicit bound on the tail.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::f2linalg::{g_exact, prob_kernel_rank, Rational};

/// Numerical value of γ, fixed by the tail-bounded summation in [`gamma_constant`].
pub const GAMMA_REGRESSION: f64 = 0.5;

/// Truncation depth for the internal infinite products.
const DEPTH: usize = 96;

/// A truncated value with an upper bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounded {
    pub value: f64,
    pub tail_bound: f64,
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

fn ratio(n: BigInt, d: BigInt) -> Rational {
    BigRational::new(n, d)
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// η_k = ∏_{j=1}^{k} (1 − 2^{−j}).
pub fn eta(k: usize) -> Rational {
    let mut num = BigInt::one();
    for j in 1..=k {
        num *= pow2(j) - 1;
    }
    ratio(num, pow2(k * (k + 1) / 2))
}

fn eta_deep() -> &'static Rational {
    static V: OnceLock<Rational> = OnceLock::new();
    V.get_or_init(|| eta(DEPTH))
}

/// η_∞ truncated once 2^{−k} < tol; the tail factor lies in [1 − 2^{−k}, 1].
pub fn eta_inf(tol: f64) -> Bounded {
    let mut k = 1;
    while 0.5f64.powi(k as i32) >= tol && k < 1000 {
        k += 1;
    }
    let v = to_f64(&eta(k));
    Bounded {
        value: v,
        tail_bound: v * 0.5f64.powi(k as i32),
    }
}

fn eta_inf_f64() -> f64 {
    to_f64(eta_deep())
}

/// 2^{−j²} η_∞ η_j^{−2}: the probability of 4-rank j.
pub fn fourrank_prob(j: usize) -> f64 {
    eta_inf_f64() * to_f64(&fourrank_factor(j))
}

/// 2^{−j²} η_j^{−2}, exactly.
pub fn fourrank_factor(j: usize) -> Rational {
    let e = eta(j);
    ratio(BigInt::one(), pow2(j * j)) / (&e * &e)
}

/// Σ_j fourrank_prob(j) / (2^{j+1} − 1), truncated with a certified tail.
pub fn gamma_constant(tol: f64) -> Bounded {
    let tol = tol.max(1e-14);
    let bound_after = |j: usize| {
        // Σ_{i>j} 2^{−i²} η_∞ η_i^{−2} ≤ 2 · 2^{−(j+1)²} / η_∞
        2.0 * 0.5f64.powi(((j + 1) * (j + 1)) as i32) / eta_inf_f64()
    };
    let mut j = 0;
    let mut sum = Rational::zero();
    loop {
        sum += fourrank_factor(j) / ratio(pow2(j + 1) - 1, BigInt::one());
        if bound_after(j) < tol {
            break;
        }
        j += 1;
    }
    Bounded {
        value: eta_inf_f64() * to_f64(&sum),
        tail_bound: bound_after(j),
    }
}

fn alpha_partial(k: usize) -> Rational {
    let mut num = BigInt::one();
    for j in 1..=k {
        num *= pow2(j) + 1;
    }
    ratio(pow2(k * (k + 1) / 2), num)
}

/// α = ∏_{j≥1} (1 + 2^{−j})^{−1}; the tail factor lies in [1 − 2^{−k}, 1].
pub fn alpha_bounded() -> Bounded {
    static V: OnceLock<f64> = OnceLock::new();
    let v = *V.get_or_init(|| to_f64(&alpha_partial(DEPTH)));
    Bounded {
        value: v,
        tail_bound: v * 0.5f64.powi(DEPTH as i32),
    }
}

pub fn alpha() -> f64 {
    alpha_bounded().value
}

fn beta_partial(n_max: usize) -> Rational {
    let mut s = Rational::zero();
    for n in 0..=n_max {
        s += ratio(BigInt::one(), pow2(n * (n + 3) / 2));
    }
    s
}

/// β = Σ_{n≥0} 2^{−n(n+3)/2}.
pub fn beta_bounded() -> Bounded {
    let n = 40;
    Bounded {
        value: to_f64(&beta_partial(n)),
        tail_bound: 2.0 * 0.5f64.powi(((n + 1) * (n + 4) / 2) as i32),
    }
}

pub fn beta() -> f64 {
    beta_bounded().value
}

/// Local density factor δ(l), by l mod 8.
pub fn delta_l(l: i64) -> Result<Rational> {
    let p = l.unsigned_abs();
    if p % 4 != 3 || !arith::is_prime(p) {
        return Err(Error::UnsupportedL(l));
    }
    let r = |a: i64, b: i64| ratio(a.into(), b.into());
    Ok(match l.rem_euclid(8) {
        1 => r(3, 2),
        3 | 7 => r(3, 4),
        5 => r(1, 1),
        _ => unreachable!("odd l"),
    })
}

/// 1 / (2^{n+1} − 1).
pub fn conditional_solubility(n: usize) -> Rational {
    ratio(BigInt::one(), pow2(n + 1) - 1)
}

/// f(n, m) / α = P(n, n, m) / (2^n ∏_{j=1}^{n} (2^j − 1)).
pub fn f_nm_over_alpha(n: usize, m: usize) -> Rational {
    let mut den = pow2(n);
    for j in 1..=n {
        den *= pow2(j) - 1;
    }
    prob_kernel_rank(n, n, m) / ratio(den, BigInt::one())
}

/// Joint density of (rk₄, rk₈) = (n, m) in the negative Pell family.
pub fn f_nm(n: usize, m: usize) -> Result<f64> {
    if m > n || n > 64 {
        return Err(Error::OutOfRange(n as i64, "f_nm needs 0 <= m <= n <= 64"));
    }
    Ok(alpha() * to_f64(&f_nm_over_alpha(n, m)))
}

/// Σ_{m ≤ n ≤ N} f(n, m) / α with the bound on Σ_{n > N} f(n, ·) / α.
fn f_tail_bound(n_t: usize) -> f64 {
    let n = n_t + 1;
    2.0 * 0.5f64.powi((n * (n + 3) / 2) as i32) / eta_inf_f64()
}

/// Σ_{n ≥ m ≥ 0} f(n, m), truncated at n ≤ N.
pub fn f_total(n_t: usize) -> Bounded {
    let mut s = Rational::zero();
    for n in 0..=n_t {
        for m in 0..=n {
            s += f_nm_over_alpha(n, m);
        }
    }
    let a = alpha();
    Bounded {
        value: a * to_f64(&s),
        tail_bound: a * f_tail_bound(n_t),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PellBounds {
    pub lower: Bounded,
    pub upper: Bounded,
}

/// Lower and upper density bounds for negative Pell solubility:
/// lower = βα + Σ f g / (2^{m+1} − 1),
/// upper = 2/3 − Σ f (2^m − 1)/2^m − Σ f g (2^m − 1) / (2^m (2^{m+1} − 1)),
/// sums over N ≥ n ≥ m ≥ 1.
pub fn pell_bounds(n_t: usize) -> Result<PellBounds> {
    if n_t < 20 {
        return Err(Error::OutOfRange(n_t as i64, "truncation must be at least 20"));
    }
    let mut low = Rational::zero();
    let mut up = Rational::zero();
    for n in 1..=n_t {
        for m in 1..=n {
            let f = f_nm_over_alpha(n, m);
            if f.is_zero() {
                continue;
            }
            let g = g_exact(n, m);
            let two_m = ratio(pow2(m), BigInt::one());
            let two_m1 = ratio(pow2(m + 1) - 1, BigInt::one());
            let frac = (&two_m - Rational::one()) / &two_m;
            low += &f * &g / &two_m1;
            up += &f * &frac + &f * &g * &frac / &two_m1;
        }
    }
    let a = alpha_bounded();
    let b = beta_bounded();
    let tail = a.value * f_tail_bound(n_t);
    let lower = a.value * (b.value + to_f64(&low));
    let upper = 2.0 / 3.0 - a.value * to_f64(&up);
    let prec = a.tail_bound * 2.0 + b.tail_bound;
    Ok(PellBounds {
        lower: Bounded {
            value: lower,
            tail_bound: tail + prec,
        },
        upper: Bounded {
            value: upper,
            tail_bound: 2.0 * tail + prec,
        },
    })
}

/// One row of the constants table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    pub tail_bound: f64,
    /// Published approximation, where one exists.
    pub expected: Option<f64>,
}

/// All model constants with tail bounds.
pub fn constants_table(tol: f64) -> Result<Vec<ConstantRow>> {
    let row = |name: &str, b: Bounded, expected: Option<f64>| ConstantRow {
        name: name.into(),
        value: b.value,
        tail_bound: b.tail_bound,
        expected,
    };
    let a = alpha_bounded();
    let b = beta_bounded();
    let pb = pell_bounds(40)?;
    let four_sum: f64 = (0..=60).map(fourrank_prob).sum();
    Ok(vec![
        row("eta_inf", eta_inf(tol), None),
        row("alpha", a, Some(0.4194)),
        row("beta", b, Some(1.2832)),
        row(
            "beta_alpha",
            Bounded {
                value: a.value * b.value,
                tail_bound: a.tail_bound * b.value + b.tail_bound,
            },
            Some(0.53823),
        ),
        row("gamma", gamma_constant(tol), Some(GAMMA_REGRESSION)),
        row(
            "fourrank_sum",
            Bounded {
                value: four_sum,
                tail_bound: 1e-300,
            },
            Some(1.0),
        ),
        row("pell_lower", pb.lower, Some(0.54302)),
        row("pell_upper", pb.upper, Some(0.59944)),
    ])
}
