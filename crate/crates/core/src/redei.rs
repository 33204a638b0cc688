//! Rédei matrices and the 4-rank, ternary conics, classical Rédei symbols
//! with a reciprocity harness, and the 8-rank from the second Artin pairing.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{self, QuadField};
use crate::error::{Error, Result};
use crate::f2linalg::{self, F2Matrix, F2Vector};

/// Rédei matrix of Q(√d) with its 4-rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedeiProfile {
    pub field: QuadField,
    pub matrix: F2Matrix,
    pub rk4: usize,
    /// Whether the class attached to l is trivial, when the matrix decides it.
    pub l_class_trivial: Option<bool>,
}

impl RedeiProfile {
    pub fn from_field(field: QuadField) -> Self {
        let matrix = redei_matrix_of(&field);
        let rk4 = field.t() - 1 - f2linalg::rank(&matrix);
        Self {
            field,
            matrix,
            rk4,
            l_class_trivial: None,
        }
    }

    /// Fill in `l_class_trivial` for a target l with l | d or l = −1.
    pub fn with_l(mut self, l: i64) -> Result<Self> {
        let s = l_vector(&self.field, l)?;
        let in_2cl = in_left_kernel(&self.matrix, &s);
        self.l_class_trivial = if !in_2cl {
            Some(false)
        } else if self.rk4 == 0 {
            Some(true)
        } else {
            None
        };
        Ok(self)
    }
}

fn in_left_kernel(m: &F2Matrix, s: &F2Vector) -> bool {
    m.vec_mul(s).is_zero()
}

fn redei_matrix_of(field: &QuadField) -> F2Matrix {
    let t = field.t();
    let mut m = F2Matrix::zeros(t, t);
    for (i, ci) in field.components.iter().enumerate() {
        let mut sum = false;
        for (j, cj) in field.components.iter().enumerate() {
            if i != j {
                let v = cj.eval(ci.prime as i64).expect("distinct ramified primes") == 1;
                m.put(i, j, v);
                sum ^= v;
            }
        }
        m.put(i, i, sum);
    }
    m
}

pub fn redei_matrix(d: u64) -> Result<RedeiProfile> {
    Ok(RedeiProfile::from_field(arith::genus_components(d)?))
}

/// Subset of ramified primes whose ideal product is the class of norm l:
/// {|l|} for l > 0, the primes of d for l = −1, their sum for l < −1.
pub fn l_vector(field: &QuadField, l: i64) -> Result<F2Vector> {
    arith::check_l(l)?;
    let primes = field.ramified_primes();
    let mut v = F2Vector::zeros(primes.len());
    if l != -1 {
        let p = l.unsigned_abs();
        let Some(i) = primes.iter().position(|&q| q == p) else {
            return Err(Error::Excluded("l must divide d"));
        };
        v.set(i, true);
    }
    if l < 0 {
        for (i, &q) in primes.iter().enumerate() {
            if field.d.is_multiple_of(q) {
                v.set(i, !v.get(i));
            }
        }
    }
    Ok(v)
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Squarefree part s₀ and square root s of |k| = s₀ s².
fn squarefree_split(k: u64) -> Result<(u64, u64)> {
    let mut s0 = 1;
    let mut s = 1;
    for (p, e) in arith::factor(k)? {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            s0 *= p;
        }
    }
    Ok((s0, s))
}

fn primitive(x: BigInt, y: BigInt, z: BigInt) -> (BigInt, BigInt, BigInt) {
    let g = x.gcd(&y).gcd(&z);
    if g.is_zero() {
        return (x, y, z);
    }
    let (x, y, z) = (x / &g, y / &g, z / &g);
    if z.is_negative() {
        (-x, -y, -z)
    } else {
        (x, y, z)
    }
}

/// A primitive solution of x² − a y² = b z² with z ≠ 0, by Lagrange descent.
pub fn solve_conic(a: i64, b: i64) -> Result<(BigInt, BigInt, BigInt)> {
    if a == 0 || b == 0 {
        return Err(Error::NoConicSolution { a, b });
    }
    let sol = descend(a, b, 0)?.ok_or(Error::NoConicSolution { a, b })?;
    let (x, y, z) = primitive(sol.0, sol.1, sol.2);
    debug_assert_eq!(&x * &x - &y * &y * a, &z * &z * b);
    Ok((x, y, z))
}

fn descend(a: i64, b: i64, depth: u32) -> Result<Option<(BigInt, BigInt, BigInt)>> {
    if depth > 200 {
        return Err(Error::Invariant(format!("conic descent did not terminate for ({a}, {b})")));
    }
    if b == 1 {
        return Ok(Some((BigInt::one(), BigInt::zero(), BigInt::one())));
    }
    if a == 1 {
        return Ok(Some((big(b) + 1, big(b) - 1, big(2))));
    }
    if a.unsigned_abs() > b.unsigned_abs() {
        return Ok(descend(b, a, depth + 1)?.map(|(x, y, z)| (x, z, y)));
    }
    if a == b {
        // x = a w with u² + v² = a w²
        return Ok(descend(-1, a, depth + 1)?.map(|(u, v, w)| (w * a, u, v)));
    }
    let m = b.unsigned_abs();
    let roots = arith::sqrt_mod(a, m)?;
    let Some(&r) = roots.first() else {
        return Ok(None);
    };
    let t = if r > m / 2 { r as i64 - m as i64 } else { r as i64 };
    let k = (t as i128 * t as i128 - a as i128) / b as i128;
    if k == 0 {
        return Ok(None);
    }
    let (s0, s) = squarefree_split(k.unsigned_abs() as u64)?;
    let k0 = s0 as i64 * k.signum() as i64;
    let Some((x1, y1, z1)) = descend(a, k0, depth + 1)? else {
        return Ok(None);
    };
    let x = &x1 * t + &y1 * a;
    let y = &x1 + &y1 * t;
    let z = z1 * k0 * s as i64;
    Ok(Some(primitive(x, y, z)))
}

/// Further solutions of the same conic, by reflecting through lines.
pub fn other_conic_solutions(
    a: i64,
    b: i64,
    p: &(BigInt, BigInt, BigInt),
    count: usize,
) -> Vec<(BigInt, BigInt, BigInt)> {
    let q = |v: &(BigInt, BigInt, BigInt)| &v.0 * &v.0 - &v.1 * &v.1 * a - &v.2 * &v.2 * b;
    let bil = |u: &(BigInt, BigInt, BigInt), v: &(BigInt, BigInt, BigInt)| {
        (&u.0 * &v.0 - &u.1 * &v.1 * a - &u.2 * &v.2 * b) * 2
    };
    let same = |u: &(BigInt, BigInt, BigInt), v: &(BigInt, BigInt, BigInt)| {
        &u.0 * &v.1 == &u.1 * &v.0 && &u.0 * &v.2 == &u.2 * &v.0 && &u.1 * &v.2 == &u.2 * &v.1
    };
    let mut out: Vec<(BigInt, BigInt, BigInt)> = Vec::new();
    let dirs: Vec<(i64, i64, i64)> = (0..6i64)
        .flat_map(|i| (0..6i64).flat_map(move |j| (0..4i64).map(move |k| (i - 2, j - 2, k))))
        .filter(|v| *v != (0, 0, 0))
        .collect();
    for (i, j, k) in dirs {
        if out.len() >= count {
            break;
        }
        let v = (big(i), big(j), big(k));
        let qv = q(&v);
        if qv.is_zero() {
            continue;
        }
        let bpv = bil(p, &v);
        let np = (
            &qv * &p.0 - &bpv * &v.0,
            &qv * &p.1 - &bpv * &v.1,
            &qv * &p.2 - &bpv * &v.2,
        );
        let np = primitive(np.0, np.1, np.2);
        if np.2.is_zero() || same(&np, p) || out.iter().any(|o| same(o, &np)) {
            continue;
        }
        debug_assert!(q(&np).is_zero());
        out.push(np);
    }
    out
}

/// Multiplication table of Z[ω_a, ω_b] modulo 4, basis 1, ω_a, ω_b, ω_a ω_b.
#[derive(Clone, Copy)]
struct BiquadMod4 {
    alpha: i64,
    beta: i64,
}

type E4 = [i64; 4];

impl BiquadMod4 {
    fn new(a: i64, b: i64) -> Self {
        Self {
            alpha: ((a - 1) / 4).rem_euclid(4),
            beta: ((b - 1) / 4).rem_euclid(4),
        }
    }

    /// (u₀ + u₁A)(v₀ + v₁A) in Z[A], A² = A + α, coefficients mod 4.
    fn mul_quad(u: [i64; 2], v: [i64; 2], alpha: i64) -> [i64; 2] {
        let cc = u[1] * v[1];
        [
            (u[0] * v[0] + cc * alpha).rem_euclid(4),
            (u[0] * v[1] + u[1] * v[0] + cc).rem_euclid(4),
        ]
    }

    fn mul(&self, u: E4, v: E4) -> E4 {
        // write elements as p + q B with p, q ∈ Z[A]
        let (up, uq) = ([u[0], u[1]], [u[2], u[3]]);
        let (vp, vq) = ([v[0], v[1]], [v[2], v[3]]);
        let a = self.alpha;
        let pp = Self::mul_quad(up, vp, a);
        let pq = Self::mul_quad(up, vq, a);
        let qp = Self::mul_quad(uq, vp, a);
        let qq = Self::mul_quad(uq, vq, a);
        // B² = B + β
        let c0 = [
            (pp[0] + qq[0] * self.beta).rem_euclid(4),
            (pp[1] + qq[1] * self.beta).rem_euclid(4),
        ];
        let c1 = [
            (pq[0] + qp[0] + qq[0]).rem_euclid(4),
            (pq[1] + qp[1] + qq[1]).rem_euclid(4),
        ];
        [c0[0], c0[1], c1[0], c1[1]]
    }

    fn is_square_mod4(&self, x: E4) -> bool {
        (0..16).any(|m| {
            let w = [m & 1, m >> 1 & 1, m >> 2 & 1, m >> 3 & 1];
            self.mul(w, w) == x
        })
    }
}

/// One admissibility condition for a Rédei triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

/// A Rédei triple with the conditions checked for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedeiSymbolInput {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub conditions: Vec<Condition>,
}

impl RedeiSymbolInput {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self {
            a,
            b,
            c,
            conditions: admissibility_conditions(a, b, c),
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.holds)
    }
}

fn odd_primes_of(n: i64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    arith::factor(n.unsigned_abs())
        .map(|f| f.into_iter().map(|(p, _)| p).filter(|&p| p != 2).collect())
        .unwrap_or_default()
}

/// The condition set under which [a, b, c] is defined: a, b, c squarefree,
/// ≡ 1 mod 4, pairwise coprime, at most one negative, and every prime of
/// each entry splits in the fields of the other two.
pub fn admissibility_conditions(a: i64, b: i64, c: i64) -> Vec<Condition> {
    let mut out = Vec::new();
    let mut push = |name: String, holds: bool| out.push(Condition { name, holds });
    for (n, v) in [("a", a), ("b", b), ("c", c)] {
        let sf = v != 0 && arith::is_squarefree(v.unsigned_abs()).unwrap_or(false);
        push(format!("{n} squarefree"), sf);
        push(format!("{n} = 1 mod 4"), v.rem_euclid(4) == 1);
    }
    push("a, b coprime".into(), a.gcd(&b) == 1);
    push("a, c coprime".into(), a.gcd(&c) == 1);
    push("b, c coprime".into(), b.gcd(&c) == 1);
    push(
        "at most one negative".into(),
        [a, b, c].iter().filter(|&&v| v < 0).count() <= 1,
    );
    let split = |x: i64, p: u64| arith::kronecker(x, p as i64) == 1;
    for (n, v, others) in [("c", c, [("a", a), ("b", b)]), ("a", a, [("b", b), ("c", c)]), ("b", b, [("a", a), ("c", c)])] {
        for p in odd_primes_of(v) {
            for (on, ov) in others {
                push(format!("({on}/{p}) = 1 for {p} | {n}"), split(ov, p));
            }
        }
    }
    out
}

/// β = x + y√a in the basis 1, ω_a of Z[ω_a], with its O-content removed.
fn beta_from_solution(sol: &(BigInt, BigInt, BigInt)) -> (BigInt, BigInt, BigInt) {
    let (x, y, z) = sol;
    // x + y√a = (x − y) + 2y ω_a
    let (u, v) = (x - y, y * 2);
    let c = u.gcd(&v);
    (u / &c, v / &c, z / &c)
}

/// [a, b, c] for an admissible triple.
pub fn redei_symbol(a: i64, b: i64, c: i64) -> Result<u8> {
    let input = RedeiSymbolInput::new(a, b, c);
    if let Some(f) = input.first_failure() {
        return Err(Error::Inadmissible {
            a,
            b,
            c,
            condition: f.name.clone(),
        });
    }
    if a == 1 || b == 1 || c == 1 {
        return Ok(0);
    }
    let first = solve_conic(a, b)?;
    let mut sols = vec![first.clone()];
    sols.extend(other_conic_solutions(a, b, &first, 24));
    let mut values = Vec::new();
    for s in &sols {
        if let Some(v) = symbol_from_solution(a, b, c, s) {
            values.push(v);
            if values.len() == 2 {
                break;
            }
        }
    }
    match values.as_slice() {
        [v, w] if v == w => Ok(*v),
        [_, _] => Err(Error::Invariant(format!(
            "[{a}, {b}, {c}] depends on the conic solution"
        ))),
        [v] => Ok(*v),
        _ => Err(Error::Invariant(format!(
            "no normalizable conic solution for [{a}, {b}, {c}]"
        ))),
    }
}

/// Symbol value from one solution, or None when it cannot be normalized.
fn symbol_from_solution(a: i64, b: i64, c: i64, sol: &(BigInt, BigInt, BigInt)) -> Option<u8> {
    let (u, v, w) = beta_from_solution(sol);
    if w.is_even() || w.is_zero() {
        return None;
    }
    let ring = BiquadMod4::new(a, b);
    let m4 = |t: &BigInt| t.mod_floor(&big(4)).to_i64().unwrap();
    let beta = [m4(&u), m4(&v), 0, 0];
    let neg = beta.map(|t| (-t).rem_euclid(4));
    let r = match (ring.is_square_mod4(beta), ring.is_square_mod4(neg)) {
        (true, false) => 1,
        (false, true) => -1,
        _ => return None,
    };
    let mut total = 0u8;
    for q in odd_primes_of(c) {
        let qi = q as i64;
        let root = arith::sqrt_mod_prime(a.rem_euclid(qi) as u64, q)? as i64;
        // ω_a ≡ (1 + s)/2 mod q at a prime above q
        let inv2 = (qi + 1) / 2;
        let mut val = 0;
        for s in [root, (qi - root) % qi] {
            let omega = ((1 + s) * inv2).rem_euclid(qi);
            let e = (m_mod(&u, qi) + m_mod(&v, qi) * omega).rem_euclid(qi) * r;
            val = arith::jacobi(e, qi).ok()?;
            if val != 0 {
                break;
            }
        }
        if val == 0 {
            return None;
        }
        total ^= u8::from(val == -1);
    }
    if c < 0 {
        // sign of rβ at the real embedding √a > 0
        let sqrt_a = (a as f64).sqrt();
        let beta_val = u.to_f64()? + v.to_f64()? * (1.0 + sqrt_a) / 2.0;
        if beta_val == 0.0 {
            return None;
        }
        total ^= u8::from(beta_val * (r as f64) < 0.0);
    }
    Some(total)
}

fn m_mod(x: &BigInt, q: i64) -> i64 {
    x.mod_floor(&big(q)).to_i64().unwrap()
}

/// Outcome of a reciprocity run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReciprocityReport {
    pub tested: usize,
    pub failures: usize,
    pub triples: Vec<(i64, i64, i64)>,
    pub failed: Vec<(i64, i64, i64)>,
}

/// Admissible triples drawn pseudo-randomly from entries of size ≤ bound.
pub fn admissible_triples(count: usize, bound: i64, seed: u64) -> Vec<(i64, i64, i64)> {
    let pool: Vec<i64> = (-bound..=bound)
        .filter(|&v| {
            v != 1
                && v.rem_euclid(4) == 1
                && arith::is_squarefree(v.unsigned_abs()).unwrap_or(false)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if pool.is_empty() {
        return out;
    }
    let mut attempts = 0u64;
    while out.len() < count && attempts < 50_000_000 {
        attempts += 1;
        let a = pool[rng.gen_range(0..pool.len())];
        let b = pool[rng.gen_range(0..pool.len())];
        let c = pool[rng.gen_range(0..pool.len())];
        if RedeiSymbolInput::new(a, b, c).is_admissible() {
            out.push((a, b, c));
        }
    }
    out
}

/// Check [a, b, c] = [c, b, a] on generated admissible triples.
pub fn reciprocity_suite(count: usize, bound: i64, seed: u64) -> ReciprocityReport {
    let triples = admissible_triples(count, bound, seed);
    let mut failed = Vec::new();
    for &(a, b, c) in &triples {
        let ok = matches!(
            (redei_symbol(a, b, c), redei_symbol(c, b, a)),
            (Ok(x), Ok(y)) if x == y
        );
        if !ok {
            failed.push((a, b, c));
        }
    }
    ReciprocityReport {
        tested: triples.len(),
        failures: failed.len(),
        triples,
        failed,
    }
}

/// The pairing on 2Cl⁺[2]-kernel data whose rank measures 4-rank minus 8-rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artin2Pairing {
    /// Subsets of ramified primes whose ideal lies in 2Cl⁺.
    pub left_basis: Vec<F2Vector>,
    /// Subsets of genus characters trivial on Cl⁺[2], modulo χ_Δ.
    pub right_basis: Vec<F2Vector>,
    /// Entry (i, j) = χ_{T_j}(𝔠_i) with 𝔞_{S_i} = 𝔠_i⁻² in Cl⁺.
    pub matrix: F2Matrix,
    pub rk4: usize,
    pub rk8: usize,
    /// For a supplied l: whether its ideal class lies in 2Cl⁺, and if so its row.
    pub l_row: Option<(bool, Option<F2Vector>)>,
}

/// w with 𝔞_S ~ 𝔠² and N𝔠 = |w|, from a point of x² − d y² = n_S z².
fn square_root_norm(field: &QuadField, s: &F2Vector) -> Result<BigInt> {
    let primes = field.ramified_primes();
    let n_s: i64 = s.support().iter().map(|&i| primes[i] as i64).product();
    let d = field.d as i64;
    let (x, y, z) = solve_conic(d, n_s)?;
    let c = if d % 4 == 1 {
        (&x - &y).gcd(&(&y * 2))
    } else {
        x.gcd(&y)
    };
    if !(&z % &c).is_zero() {
        return Err(Error::Invariant(format!("content {c} does not divide z = {z}")));
    }
    let w = (z / c).abs();
    for &p in &primes {
        if (&w % p).is_zero() {
            return Err(Error::Invariant(format!("norm {w} meets the ramified prime {p}")));
        }
    }
    Ok(w)
}

fn pairing_row(field: &QuadField, s: &F2Vector, right: &[F2Vector]) -> Result<F2Vector> {
    let w = square_root_norm(field, s)?;
    let vals: Vec<u8> = field
        .components
        .iter()
        .map(|c| c.eval_big(&w))
        .collect::<Result<_>>()?;
    let mut row = F2Vector::zeros(right.len());
    for (j, t) in right.iter().enumerate() {
        let bit = t.support().iter().fold(0u8, |acc, &k| acc ^ vals[k]);
        row.set(j, bit == 1);
    }
    Ok(row)
}

pub fn artin2_pairing(d: u64, l: Option<i64>) -> Result<Artin2Pairing> {
    artin2_pairing_of(&RedeiProfile::from_field(arith::genus_components(d)?), l)
}

pub fn artin2_pairing_of(profile: &RedeiProfile, l: Option<i64>) -> Result<Artin2Pairing> {
    let field = &profile.field;
    let t = field.t();
    let left = f2linalg::left_kernel_basis(&profile.matrix);
    // complete {all-ones} to a basis of the right kernel and drop it
    let ones = F2Vector::from_bits(&vec![true; t]);
    let mut right = Vec::new();
    let mut span = F2Matrix::from_row_vectors(t, std::slice::from_ref(&ones));
    for v in f2linalg::right_kernel_basis(&profile.matrix) {
        let mut rows: Vec<F2Vector> = (0..span.rows()).map(|i| span.row(i)).collect();
        rows.push(v.clone());
        let cand = F2Matrix::from_row_vectors(t, &rows);
        if f2linalg::rank(&cand) > span.rows() {
            span = cand;
            right.push(v);
        }
    }
    let mut matrix = F2Matrix::zeros(left.len(), right.len());
    for (i, s) in left.iter().enumerate() {
        let row = pairing_row(field, s, &right)?;
        for j in 0..right.len() {
            matrix.put(i, j, row.get(j));
        }
    }
    let rank = f2linalg::rank(&matrix);
    let l_row = match l {
        Some(l) => {
            let s = l_vector(field, l)?;
            if in_left_kernel(&profile.matrix, &s) {
                Some((true, Some(pairing_row(field, &s, &right)?)))
            } else {
                Some((false, None))
            }
        }
        None => None,
    };
    Ok(Artin2Pairing {
        left_basis: left,
        right_basis: right,
        matrix,
        rk4: profile.rk4,
        rk8: profile.rk4 - rank,
        l_row,
    })
}

/// Narrow 8-rank of Q(√d) from the pairing.
pub fn rank8_via_symbols(d: u64) -> Result<usize> {
    Ok(artin2_pairing(d, None)?.rk8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_examples() {
        let p = redei_matrix(34).unwrap();
        assert!(p.matrix.is_zero());
        assert_eq!((p.matrix.rows(), p.rk4), (2, 1));
        let p = redei_matrix(21).unwrap();
        assert_eq!(p.matrix, F2Matrix::from_u8_rows(&[&[1, 1], &[0, 0]]));
        assert_eq!(p.rk4, 0);
        let p = redei_matrix(105).unwrap();
        assert_eq!(
            p.matrix,
            F2Matrix::from_u8_rows(&[&[0, 1, 1], &[1, 0, 1], &[0, 1, 1]])
        );
        assert_eq!(p.rk4, 0);
        assert!(redei_matrix(50).is_err());
    }

    #[test]
    fn conic_solutions_check() {
        for (a, b) in [(34, 17), (34, 2), (5, 11), (-3, 7), (13, -1), (2, 7), (-1, 5), (10, 10), (41, 5)] {
            let (x, y, z) = solve_conic(a, b).unwrap();
            assert_eq!(&x * &x - &y * &y * a, &z * &z * b, "({a}, {b})");
            assert!(!z.is_zero());
            for (x, y, z) in other_conic_solutions(a, b, &(x, y, z), 3) {
                assert_eq!(&x * &x - &y * &y * a, &z * &z * b);
            }
        }
        assert!(solve_conic(3, 5).is_err());
        assert!(solve_conic(-1, -1).is_err());
    }

    #[test]
    fn symbol_trivial_and_inadmissible() {
        assert_eq!(redei_symbol(5, 29, 1).unwrap(), 0);
        assert!(matches!(redei_symbol(5, 7, 1), Err(Error::Inadmissible { .. })));
        assert!(matches!(redei_symbol(5, 13, 29), Err(Error::Inadmissible { .. })));
    }

    #[test]
    fn pairing_example_34() {
        let p = artin2_pairing(34, None).unwrap();
        assert_eq!(p.rk4, 1);
        assert_eq!(p.rk8, 0);
        assert_ne!(f2linalg::rank(&p.matrix), 0);
        let p = artin2_pairing(21, None).unwrap();
        assert_eq!(p.rk4, 0);
        assert_eq!(p.right_basis.len(), 0);
    }

    #[test]
    fn reciprocity_small() {
        let r = reciprocity_suite(60, 300, 11);
        assert_eq!(r.tested, 60);
        assert_eq!(r.failures, 0, "{:?}", r.failed);
        assert_eq!(reciprocity_suite(0, 300, 1).tested, 0);
        assert_eq!(admissible_triples(20, 300, 4), admissible_triples(20, 300, 4));
    }
}
