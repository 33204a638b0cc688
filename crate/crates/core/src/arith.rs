//! Elementary number theory: symbols, sieves, factoring, modular square
//! roots, genus characters of real quadratic fields, and family membership.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jacobi symbol (a/n) for odd n ≥ 1.
pub fn jacobi(a: i64, n: i64) -> Result<i32> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::BadJacobiModulus(n));
    }
    Ok(jacobi_u(a.rem_euclid(n) as u64, n as u64))
}

/// Jacobi symbol with a already reduced into [0, n).
pub(crate) fn jacobi_u(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut s = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            s = -s;
        }
        a >>= tz;
        if a % 4 == 3 && n % 4 == 3 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        s
    } else {
        0
    }
}

/// Kronecker symbol (a/n) for arbitrary integers.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut s = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && a < 0 {
        s = -s;
    }
    let tz = m.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            s = -s;
        }
        m >>= tz;
    }
    s * jacobi_u(a.rem_euclid(m as i64) as u64, m)
}

/// Kronecker symbol (a/w) with a small and w arbitrary.
pub fn kronecker_big(a: i64, w: &BigInt) -> i32 {
    if w.is_zero() {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut s = 1;
    if w.is_negative() && a < 0 {
        s = -s;
    }
    let mut m = w.abs();
    let tz = m.trailing_zeros().unwrap_or(0);
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            s = -s;
        }
        m >>= tz;
    }
    // (a/m) for odd m: reciprocity brings it to (m mod |a| / ...)
    if let Some(mu) = m.to_u64() {
        return s * jacobi_u((a as i128).rem_euclid(mu as i128) as u64, mu);
    }
    // m huge and odd: (a/m) = (sign)(2^e/m)(a'/m) with a' odd, then flip.
    let mut a_abs = a.unsigned_abs();
    if a < 0 {
        // (-1/m)
        if (&m % 4u32) == BigInt::from(3) {
            s = -s;
        }
    }
    let m8 = (&m % 8u32).to_u64().unwrap();
    let e = a_abs.trailing_zeros();
    if e % 2 == 1 && (m8 == 3 || m8 == 5) {
        s = -s;
    }
    a_abs >>= e;
    if a_abs == 1 {
        return s;
    }
    if a_abs % 4 == 3 && m8 % 4 == 3 {
        s = -s;
    }
    let r = (&m % a_abs).to_u64().unwrap();
    s * jacobi_u(r, a_abs)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Largest n with 10^12 accepted by [`factor`].
pub const FACTOR_LIMIT: u64 = 1_000_000_000_000;
const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorization as ascending (prime, exponent) pairs.
pub fn factor(n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::OutOfRange(0, "factor needs n >= 1"));
    }
    if n > FACTOR_LIMIT {
        return Err(Error::OutOfRange(n as i64, "factor needs n <= 10^12"));
    }
    let mut out = Vec::new();
    let mut m = n;
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0;
        while (*m).is_multiple_of(p) {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut m);
    push(3, &mut m);
    let mut p = 5;
    while p <= TRIAL_LIMIT && p * p <= m {
        push(p, &mut m);
        push(p + 2, &mut m);
        p += 6;
    }
    if m > 1 {
        if !is_prime(m) {
            return Err(Error::Unfactored(n, m));
        }
        out.push((m, 1));
    }
    Ok(out)
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factor(n)?.iter().all(|&(_, e)| e == 1))
}

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

const SEGMENT: u64 = 1 << 16;

/// Squarefree integers in [2, N], ascending, sieved segment by segment.
pub struct SquarefreeSieve {
    n: u64,
    next_lo: u64,
    primes: Vec<u64>,
    buf: VecDeque<u64>,
}

pub fn squarefree_sieve(n: u64) -> SquarefreeSieve {
    SquarefreeSieve {
        n,
        next_lo: 2,
        primes: primes_up_to(isqrt(n)),
        buf: VecDeque::new(),
    }
}

impl SquarefreeSieve {
    fn fill(&mut self) {
        while self.buf.is_empty() && self.next_lo <= self.n {
            let lo = self.next_lo;
            let hi = (lo + SEGMENT).min(self.n + 1);
            let mut sf = vec![true; (hi - lo) as usize];
            for &p in &self.primes {
                let q = p * p;
                if q >= hi {
                    break;
                }
                let mut k = lo.div_ceil(q) * q;
                while k < hi {
                    sf[(k - lo) as usize] = false;
                    k += q;
                }
            }
            self.buf
                .extend((lo..hi).filter(|&x| sf[(x - lo) as usize]));
            self.next_lo = hi;
        }
    }
}

impl Iterator for SquarefreeSieve {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        self.fill();
        self.buf.pop_front()
    }
}

/// Factor every integer of [lo, hi) at once. Entries are `None` for
/// non-squarefree integers, else the ascending prime list.
pub fn factor_squarefree_range(lo: u64, hi: u64, primes: &[u64]) -> Vec<Option<Vec<u64>>> {
    let len = hi.saturating_sub(lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut fac: Vec<Option<Vec<u64>>> = vec![Some(Vec::new()); len];
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let mut k = lo.div_ceil(p) * p;
        while k < hi {
            let i = (k - lo) as usize;
            if let Some(f) = fac[i].as_mut() {
                rem[i] /= p;
                if rem[i].is_multiple_of(p) {
                    fac[i] = None;
                } else {
                    f.push(p);
                }
            }
            k += p;
        }
    }
    for i in 0..len {
        if let Some(f) = fac[i].as_mut() {
            if rem[i] > 1 {
                f.push(rem[i]);
            }
        }
    }
    if lo == 0 && len > 0 {
        fac[0] = None;
    }
    fac
}

/// All x mod m with x² ≡ a (mod m), ascending.
pub fn sqrt_mod(a: i64, m: u64) -> Result<Vec<u64>> {
    if m == 0 {
        return Err(Error::OutOfRange(0, "modulus must be positive"));
    }
    if m == 1 {
        return Ok(vec![0]);
    }
    let mut acc: Vec<u64> = vec![0];
    let mut modulus: u64 = 1;
    for (p, e) in factor(m)? {
        let pk = p.pow(e);
        let roots = sqrt_mod_prime_power(a.rem_euclid(pk as i64) as u64, p, e);
        if roots.is_empty() {
            return Ok(Vec::new());
        }
        let mut next = Vec::with_capacity(acc.len() * roots.len());
        for &x in &acc {
            for &y in &roots {
                next.push(crt(x, modulus, y, pk));
            }
        }
        acc = next;
        modulus *= pk;
    }
    acc.sort_unstable();
    Ok(acc)
}

fn crt(a: u64, m: u64, b: u64, n: u64) -> u64 {
    // x ≡ a mod m, x ≡ b mod n, gcd(m, n) = 1
    let (m_i, n_i) = (m as i128, n as i128);
    let inv = mod_inverse(m_i.rem_euclid(n_i), n_i).expect("coprime moduli");
    let t = ((b as i128 - a as i128).rem_euclid(n_i) * inv).rem_euclid(n_i);
    (a as i128 + m_i * t) as u64
}

pub(crate) fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let g = a.extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m))
}

/// Square roots of a mod p for odd prime p (Tonelli–Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// All roots of x² ≡ a (mod p^e), a already reduced.
fn sqrt_mod_prime_power(a: u64, p: u64, e: u32) -> Vec<u64> {
    let pk = p.pow(e);
    if a.is_multiple_of(pk) {
        let step = p.pow(e.div_ceil(2));
        return (0..pk / step).map(|i| i * step).collect();
    }
    let mut v = 0;
    let mut u = a;
    while u.is_multiple_of(p) {
        u /= p;
        v += 1;
    }
    if v % 2 == 1 {
        return Vec::new();
    }
    let half = p.pow(v / 2);
    let unit_mod = p.pow(e - v);
    let ys = sqrt_unit_prime_power(u % unit_mod, p, e - v);
    // x = p^{v/2} (y + t p^{e-v}), distinct mod p^e for t < p^{v/2}
    let mut out: Vec<u64> = Vec::new();
    for y in ys {
        for t in 0..half {
            out.push((half * (y + t * unit_mod)) % pk);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

fn sqrt_unit_prime_power(a: u64, p: u64, e: u32) -> Vec<u64> {
    if e == 0 {
        return vec![0];
    }
    if p == 2 {
        // lift the full root set one bit at a time
        let mut roots: Vec<u64> = vec![1];
        for k in 2..=e {
            let m = 1u64 << k;
            let mut next = Vec::new();
            for &x in &roots {
                for y in [x, x + (m >> 1)] {
                    if mul_mod(y, y, m) == a % m {
                        next.push(y);
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            roots = next;
        }
        return if a % 2 == 1 { roots } else { Vec::new() };
    }
    let Some(mut r) = sqrt_mod_prime(a, p) else {
        return Vec::new();
    };
    // Hensel: r ← r − (r² − a)/(2r)
    let mut m = p;
    for _ in 1..e {
        m *= p;
        let r2 = (mul_mod(r, r, m) + m - a % m) % m;
        let inv = mod_inverse((2 * r % m) as i128, m as i128).unwrap() as u64;
        r = (r + m - mul_mod(r2, inv, m)) % m;
    }
    let mut v = vec![r, m - r];
    v.sort_unstable();
    v.dedup();
    v
}

/// 2-adic or odd-prime component of χ_Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p_star", rename_all = "snake_case")]
pub enum CharKind {
    /// χ_{p*} with p* ≡ 1 mod 4, |p*| = p.
    OddPrime(i64),
    MinusFour,
    MinusEight,
    Eight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusCharacter {
    pub kind: CharKind,
    /// The ramified prime this component belongs to.
    pub prime: u64,
}

impl GenusCharacter {
    /// Fundamental discriminant of the component.
    pub fn disc(&self) -> i64 {
        match self.kind {
            CharKind::OddPrime(ps) => ps,
            CharKind::MinusFour => -4,
            CharKind::MinusEight => -8,
            CharKind::Eight => 8,
        }
    }

    pub fn name(&self) -> String {
        format!("chi_{}", self.disc())
    }

    fn bit(sym: i32) -> u8 {
        u8::from(sym == -1)
    }

    /// Value in F₂ at an integer q coprime to the conductor (0 = split).
    pub fn eval(&self, q: i64) -> Result<u8> {
        if q.unsigned_abs().is_multiple_of(self.prime) {
            return Err(Error::DividesConductor { q });
        }
        Ok(Self::bit(kronecker(self.disc(), q)))
    }

    /// Same as [`Self::eval`] for a big argument.
    pub fn eval_big(&self, w: &BigInt) -> Result<u8> {
        if (w % self.prime).is_zero() {
            return Err(Error::DividesConductor {
                q: (w % 1_000_000_007u64).to_i64().unwrap_or(0),
            });
        }
        Ok(Self::bit(kronecker_big(self.disc(), w)))
    }
}

/// Evaluate a genus character at a prime q not dividing its conductor.
pub fn eval_character(c: &GenusCharacter, q: u64) -> Result<u8> {
    c.eval(q as i64)
}

/// A real quadratic field Q(√d) with its genus-character decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadField {
    pub d: u64,
    pub prime_factors: Vec<u64>,
    pub delta: u64,
    pub components: Vec<GenusCharacter>,
}

impl QuadField {
    /// Number of ramified primes.
    pub fn t(&self) -> usize {
        self.components.len()
    }

    /// Ramified primes, in the order of `components`.
    pub fn ramified_primes(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.prime).collect()
    }

    /// Build from a known ascending prime list of squarefree d.
    pub fn from_primes(d: u64, primes: Vec<u64>) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange(d as i64, "d must exceed 1"));
        }
        if primes.iter().product::<u64>() != d || primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotSquarefree(d as i64));
        }
        let delta = if d % 4 == 1 { d } else { 4 * d };
        let mut components = Vec::with_capacity(primes.len() + 1);
        let two = if d.is_multiple_of(2) {
            Some(if (d / 2) % 4 == 1 {
                CharKind::Eight
            } else {
                CharKind::MinusEight
            })
        } else if d % 4 == 3 {
            Some(CharKind::MinusFour)
        } else {
            None
        };
        if let Some(kind) = two {
            components.push(GenusCharacter { kind, prime: 2 });
        }
        for &p in primes.iter().filter(|&&p| p != 2) {
            let ps = if p % 4 == 1 { p as i64 } else { -(p as i64) };
            components.push(GenusCharacter {
                kind: CharKind::OddPrime(ps),
                prime: p,
            });
        }
        let prod: i64 = components.iter().map(|c| c.disc()).product::<i64>();
        if prod as i128 != delta as i128 {
            return Err(Error::Invariant(format!(
                "genus components of {d} multiply to {prod}, not {delta}"
            )));
        }
        Ok(Self {
            d,
            prime_factors: primes,
            delta,
            components,
        })
    }
}

pub fn genus_components(d: u64) -> Result<QuadField> {
    if d < 2 {
        return Err(Error::OutOfRange(d as i64, "d must exceed 1"));
    }
    let f = factor(d)?;
    if f.iter().any(|&(_, e)| e > 1) {
        return Err(Error::NotSquarefree(d as i64));
    }
    QuadField::from_primes(d, f.into_iter().map(|(p, _)| p).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyStatus {
    Yes,
    FailsEd,
    FailsEd2,
    NotDivisible,
    NotSquarefree,
}

impl FamilyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyStatus::Yes => "yes",
            FamilyStatus::FailsEd => "fails_ed",
            FamilyStatus::FailsEd2 => "fails_ed2",
            FamilyStatus::NotDivisible => "not_divisible",
            FamilyStatus::NotSquarefree => "not_squarefree",
        }
    }
}

/// Accept l = −1 or l = ±p with p prime, p ≡ 3 mod 4.
pub fn check_l(l: i64) -> Result<()> {
    let p = l.unsigned_abs();
    if l == -1 || (p % 4 == 3 && is_prime(p)) {
        Ok(())
    } else {
        Err(Error::UnsupportedL(l))
    }
}

pub fn in_family(d: u64, l: i64) -> Result<FamilyStatus> {
    check_l(l)?;
    if d == 0 {
        return Err(Error::OutOfRange(0, "d must be positive"));
    }
    let f = factor(d)?;
    if f.iter().any(|&(_, e)| e > 1) {
        return Ok(FamilyStatus::NotSquarefree);
    }
    let primes: Vec<u64> = f.into_iter().map(|(p, _)| p).collect();
    in_family_with_primes(d, &primes, l)
}

/// Family test for squarefree d with known prime list.
pub fn in_family_with_primes(d: u64, primes: &[u64], l: i64) -> Result<FamilyStatus> {
    check_l(l)?;
    if l == -1 {
        let ok = primes.iter().all(|&p| p == 2 || p % 4 == 1);
        return Ok(if ok {
            FamilyStatus::Yes
        } else {
            FamilyStatus::FailsEd
        });
    }
    let p_l = l.unsigned_abs();
    if !d.is_multiple_of(p_l) {
        return Ok(FamilyStatus::NotDivisible);
    }
    let q = (d / p_l) as i64 * l.signum();
    for &p in primes.iter().filter(|&&p| p != 2 && p != p_l) {
        if kronecker(l, p as i64) != 1 {
            return Ok(FamilyStatus::FailsEd);
        }
    }
    if jacobi(-q, p_l as i64)? != 1 {
        return Ok(FamilyStatus::FailsEd2);
    }
    Ok(FamilyStatus::Yes)
}
