//! Indefinite binary quadratic forms: reduction, cycles, composition, narrow
//! and ordinary class groups, and representation by the principal class.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, FamilyStatus};
use crate::error::{Error, Result};

/// The form a x² + b xy + c y².
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Debug for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl fmt::Display for Bqf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Check primitivity and a positive nonsquare discriminant.
    pub fn validate(&self) -> Result<()> {
        let disc = self.disc();
        let err = |reason| Error::InvalidForm {
            a: self.a,
            b: self.b,
            c: self.c,
            reason,
        };
        if disc <= 0 {
            return Err(err("discriminant must be positive"));
        }
        if disc > i64::MAX as i128 / 4 {
            return Err(err("discriminant too large"));
        }
        if arith::is_square(disc as u64) {
            return Err(err("discriminant is a perfect square"));
        }
        if !self.is_primitive() {
            return Err(err("form is not primitive"));
        }
        Ok(())
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        x * x * self.a + x * y * self.b + y * y * self.c
    }

    /// Whether the form is reduced; `s` is ⌊√Δ⌋.
    pub fn is_reduced_with(&self, s: i64) -> bool {
        let a2 = 2 * self.a.abs();
        0 < self.b && self.b <= s && s < a2 + self.b && a2 - self.b <= s
    }

    pub fn is_reduced(&self) -> bool {
        self.is_reduced_with(isqrt_disc(self.disc()))
    }

    /// The inverse class: (a, −b, c) is improperly equivalent to (c, b, a).
    pub fn inverse(&self) -> Bqf {
        Bqf::new(self.a, -self.b, self.c)
    }
}

fn isqrt_disc(disc: i128) -> i64 {
    arith::isqrt(disc as u64) as i64
}

/// Proper 2×2 integer matrix [[p, q], [r, s]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub s: BigInt,
}

impl Mat2 {
    pub fn identity() -> Self {
        Self {
            p: BigInt::one(),
            q: BigInt::zero(),
            r: BigInt::zero(),
            s: BigInt::one(),
        }
    }

    /// self · [[0, −1], [1, k]]
    fn mul_step(&self, k: i64) -> Self {
        Self {
            p: self.q.clone(),
            q: -&self.p + &self.q * k,
            r: self.s.clone(),
            s: -&self.r + &self.s * k,
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            p: &self.p * &o.p + &self.q * &o.r,
            q: &self.p * &o.q + &self.q * &o.s,
            r: &self.r * &o.p + &self.s * &o.r,
            s: &self.r * &o.q + &self.s * &o.s,
        }
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Mat2 {
        Mat2 {
            p: self.s.clone(),
            q: -&self.q,
            r: -&self.r,
            s: self.p.clone(),
        }
    }

    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.p * x + &self.q * y, &self.r * x + &self.s * y)
    }

    pub fn det(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }
}

/// One reduction step; returns the new form and k with step matrix [[0,−1],[1,k]].
pub fn rho_step(f: &Bqf, s: i64) -> (Bqf, i64) {
    let disc = f.disc();
    let c = f.c;
    let ac = c.abs();
    let m = 2 * ac;
    // r ≡ −b (mod 2|c|) in the normalizing interval
    let r = if ac > s {
        let mut r = (-f.b).rem_euclid(m);
        if r > ac {
            r -= m;
        }
        r
    } else {
        let lo = s + 1 - m;
        lo + (-f.b - lo).rem_euclid(m)
    };
    let new_c = ((r as i128 * r as i128 - disc) / (4 * c as i128)) as i64;
    let k = (r + f.b) / (2 * c);
    (Bqf::new(c, r, new_c), k)
}

pub fn rho(f: &Bqf) -> Bqf {
    rho_step(f, isqrt_disc(f.disc())).0
}

/// Reduce by iterating ρ.
pub fn reduce(f: &Bqf) -> Result<Bqf> {
    f.validate()?;
    let s = isqrt_disc(f.disc());
    let mut g = *f;
    while !g.is_reduced_with(s) {
        g = rho_step(&g, s).0;
    }
    Ok(g)
}

/// Reduce, also returning M with reduced(v) = f(M v).
pub fn reduce_with_matrix(f: &Bqf) -> Result<(Bqf, Mat2)> {
    f.validate()?;
    let s = isqrt_disc(f.disc());
    let mut g = *f;
    let mut m = Mat2::identity();
    while !g.is_reduced_with(s) {
        let (h, k) = rho_step(&g, s);
        m = m.mul_step(k);
        g = h;
    }
    Ok((g, m))
}

/// A narrow class represented by its full ρ-cycle of reduced forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormClass {
    pub canonical: Bqf,
    pub cycle: Vec<Bqf>,
}

impl PartialEq for FormClass {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl Eq for FormClass {}

impl FormClass {
    pub fn disc(&self) -> i128 {
        self.canonical.disc()
    }

    pub fn contains(&self, f: &Bqf) -> bool {
        self.cycle.contains(f)
    }

    /// A cycle member with positive leading coefficient.
    fn positive_rep(&self) -> Bqf {
        *self
            .cycle
            .iter()
            .find(|f| f.a > 0)
            .expect("reduced indefinite cycles alternate sign")
    }
}

/// The full ρ-orbit through the reduction of `f`.
pub fn cycle(f: &Bqf) -> Result<FormClass> {
    let start = reduce(f)?;
    let s = isqrt_disc(start.disc());
    let mut forms = vec![start];
    let mut g = rho_step(&start, s).0;
    while g != start {
        forms.push(g);
        g = rho_step(&g, s).0;
    }
    let canonical = *forms.iter().min().unwrap();
    Ok(FormClass {
        canonical,
        cycle: forms,
    })
}

/// Gauss composition of primitive forms with a1, a2 > 0.
fn compose_forms(f1: &Bqf, f2: &Bqf) -> Bqf {
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let disc = f1.disc();
    let (a1, b1) = (f1.a as i128, f1.b as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
    let s = (b1 + b2) / 2;
    let n = b2 - s;
    let (y1, d) = if a2 % a1 == 0 {
        (0, a1)
    } else {
        let e = a2.extended_gcd(&a1);
        (e.x, e.gcd)
    };
    let (x2, y2, d1) = if s % d == 0 {
        (0, -1, d)
    } else {
        let e = s.extended_gcd(&d);
        (e.x, -e.y, e.gcd)
    };
    let v1 = a1 / d1;
    let v2 = a2 / d1;
    let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
    let a3 = v1 * v2;
    // b3 = b2 + 2 v2 r, shifted into (−a3, a3] to keep the entries small
    let b3 = b2 + 2 * v2 * r;
    let b3 = b3 - 2 * a3 * (b3 + a3 - 1).div_euclid(2 * a3);
    let num = b3 * b3 - disc;
    debug_assert_eq!(num % (4 * a3), 0);
    Bqf::new(a3 as i64, b3 as i64, (num / (4 * a3)) as i64)
}

pub fn compose(f: &FormClass, g: &FormClass) -> Result<FormClass> {
    let (df, dg) = (f.disc(), g.disc());
    if df != dg {
        return Err(Error::DiscriminantMismatch(df as i64, dg as i64));
    }
    cycle(&compose_forms(&f.positive_rep(), &g.positive_rep()))
}

/// N_d as a form of discriminant Δ_{Q(√d)}.
pub fn principal_form(d: u64) -> Result<Bqf> {
    if d < 2 {
        return Err(Error::OutOfRange(d as i64, "d must exceed 1"));
    }
    if !arith::is_squarefree(d)? {
        return Err(Error::NotSquarefree(d as i64));
    }
    Ok(principal_form_unchecked(d))
}

pub(crate) fn principal_form_unchecked(d: u64) -> Bqf {
    let d = d as i64;
    if d % 4 == 1 {
        Bqf::new(1, 1, -(d - 1) / 4)
    } else {
        Bqf::new(1, 0, -d)
    }
}

pub fn is_fundamental(delta: i64) -> bool {
    if delta <= 1 {
        return false;
    }
    let sf = |n: i64| arith::is_squarefree(n as u64).unwrap_or(false);
    match delta.rem_euclid(4) {
        1 => sf(delta),
        0 => matches!((delta / 4) % 4, 2 | 3) && sf(delta / 4),
        _ => false,
    }
}

/// 2-power data of the narrow and ordinary class groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassGroup2Data {
    pub delta: i64,
    pub h_plus: u64,
    pub h: u64,
    /// Invariant factors n₁ | n₂ | … (ones dropped).
    pub narrow: Vec<u64>,
    pub ordinary: Vec<u64>,
    pub rk2plus: u32,
    pub rk4plus: u32,
    pub rk8plus: u32,
    pub rk2ord: u32,
    pub rk4ord: u32,
    pub rk8ord: u32,
    pub negative_pell: bool,
}

fn rk(factors: &[u64], q: u64) -> u32 {
    factors.iter().filter(|&&n| n % q == 0).count() as u32
}

/// Invariant factors from element orders; `orders` lists each element once.
fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let h = orders.len() as u64;
    let mut cyclic_powers: Vec<Vec<u64>> = Vec::new();
    for (p, _) in arith::factor(h).unwrap_or_default() {
        // |G[p^k]| for k = 0, 1, … until it stops growing
        let mut counts = vec![1u64];
        let mut pk = p;
        loop {
            let c = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
            if c == *counts.last().unwrap() {
                break;
            }
            counts.push(c);
            pk *= p;
        }
        // number of cyclic factors of order ≥ p^k
        let ge: Vec<u32> = counts
            .windows(2)
            .map(|w| ilog(w[1] / w[0], p))
            .collect();
        let mut parts = Vec::new();
        for (k, &g) in ge.iter().enumerate() {
            let next = ge.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(g - next) {
                parts.push(p.pow(k as u32 + 1));
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        cyclic_powers.push(parts);
    }
    let len = cyclic_powers.iter().map(Vec::len).max().unwrap_or(0);
    let mut out: Vec<u64> = (0..len)
        .map(|i| cyclic_powers.iter().filter_map(|v| v.get(i)).product())
        .collect();
    out.reverse();
    out
}

fn ilog(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n > 1 {
        n /= p;
        e += 1;
    }
    e
}

/// All narrow classes of a fundamental discriminant with a composition oracle.
pub struct ClassGroup {
    pub delta: i64,
    pub classes: Vec<FormClass>,
    index: HashMap<Bqf, usize>,
    pub identity: usize,
}

impl ClassGroup {
    pub fn new(delta: i64) -> Result<Self> {
        if !(5..=20_000_000).contains(&delta) {
            return Err(Error::OutOfRange(delta, "class groups need 5 <= delta <= 2*10^7"));
        }
        if !is_fundamental(delta) {
            return Err(Error::NotFundamental(delta));
        }
        let s = arith::isqrt(delta as u64) as i64;
        let mut index: HashMap<Bqf, usize> = HashMap::new();
        let mut classes = Vec::new();
        let mut b = if delta % 2 == 0 { 2 } else { 1 };
        while b <= s {
            let n = (delta - b * b) / 4;
            let lo = (s - b) / 2 + 1;
            let hi = (s + b) / 2;
            for a in lo..=hi {
                if n % a != 0 {
                    continue;
                }
                for sign in [1, -1] {
                    let f = Bqf::new(sign * a, b, -sign * (n / a));
                    if index.contains_key(&f) || !f.is_primitive() {
                        continue;
                    }
                    let cls = cycle(&f)?;
                    let id = classes.len();
                    for g in &cls.cycle {
                        index.insert(*g, id);
                    }
                    classes.push(cls);
                }
            }
            b += 2;
        }
        let principal = Bqf::new(1, delta % 2, -(delta - delta % 2) / 4);
        let identity = index[&reduce(&principal)?];
        Ok(Self {
            delta,
            classes,
            index,
            identity,
        })
    }

    pub fn h_plus(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, f: &Bqf) -> Result<usize> {
        let r = reduce(f)?;
        self.index
            .get(&r)
            .copied()
            .ok_or_else(|| Error::Invariant(format!("form {r} missing from class list")))
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let f = compose_forms(&self.classes[i].positive_rep(), &self.classes[j].positive_rep());
        self.class_of(&f).expect("composition stays in the group")
    }

    pub fn order(&self, i: usize) -> u64 {
        let mut k = 1;
        let mut x = i;
        while x != self.identity {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    /// Class of the form with leading coefficient −1.
    pub fn minus_one_class(&self) -> usize {
        let d = self.delta;
        self.class_of(&Bqf::new(-1, d % 2, (d - d % 2) / 4))
            .expect("(-1, b, c) has the right discriminant")
    }

    pub fn two_data(&self) -> ClassGroup2Data {
        let orders: Vec<u64> = (0..self.h_plus()).map(|i| self.order(i)).collect();
        let j = self.minus_one_class();
        let negative_pell = j == self.identity;
        let narrow = invariant_factors(&orders);
        // quotient by ⟨J⟩: one element per coset, order = least k with x^k ∈ ⟨J⟩
        let mut seen = vec![false; self.h_plus()];
        let mut q_orders = Vec::new();
        for i in 0..self.h_plus() {
            if seen[i] {
                continue;
            }
            seen[i] = true;
            seen[self.mul(i, j)] = true;
            let mut k = 1;
            let mut x = i;
            while x != self.identity && x != j {
                x = self.mul(x, i);
                k += 1;
            }
            q_orders.push(k);
        }
        let ordinary = invariant_factors(&q_orders);
        ClassGroup2Data {
            delta: self.delta,
            h_plus: self.h_plus() as u64,
            h: q_orders.len() as u64,
            rk2plus: rk(&narrow, 2),
            rk4plus: rk(&narrow, 4),
            rk8plus: rk(&narrow, 8),
            rk2ord: rk(&ordinary, 2),
            rk4ord: rk(&ordinary, 4),
            rk8ord: rk(&ordinary, 8),
            narrow,
            ordinary,
            negative_pell,
        }
    }
}

pub fn narrow_class_group(delta: i64) -> Result<ClassGroup2Data> {
    Ok(ClassGroup::new(delta)?.two_data())
}

/// Outcome of asking whether the principal class represents m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Representation {
    No,
    /// Represented; the witness is omitted when it would exceed the digit cap.
    Yes(Option<(BigInt, BigInt)>),
}

impl Representation {
    pub fn is_yes(&self) -> bool {
        matches!(self, Representation::Yes(_))
    }

    pub fn witness(&self) -> Option<&(BigInt, BigInt)> {
        match self {
            Representation::Yes(w) => w.as_ref(),
            Representation::No => None,
        }
    }
}

/// Decimal digits of the largest entry after the steps `ks`, estimated in f64.
fn estimate_digits(ks: impl Iterator<Item = i64>) -> f64 {
    let (mut p, mut q, mut r, mut s) = (1.0f64, 0.0f64, 0.0f64, 1.0f64);
    let mut scale = 0.0f64;
    for k in ks {
        let k = k as f64;
        (p, q, r, s) = (q, -p + q * k, s, -r + s * k);
        let m = p.abs().max(q.abs()).max(r.abs()).max(s.abs());
        if m > 1e100 {
            p /= m;
            q /= m;
            r /= m;
            s /= m;
            scale += m.log10();
        }
    }
    scale + p.abs().max(q.abs()).max(r.abs()).max(s.abs()).max(1.0).log10()
}

/// Reduced principal cycle of discriminant Δ with its step parameters.
struct PrincipalCycle {
    to_start: Mat2,
    forms: Vec<Bqf>,
    steps: Vec<i64>,
}

impl PrincipalCycle {
    fn new(d: u64) -> Result<Self> {
        let n = principal_form_unchecked(d);
        let (start, to_start) = reduce_with_matrix(&n)?;
        let s = isqrt_disc(start.disc());
        let mut forms = vec![start];
        let mut steps = Vec::new();
        loop {
            let (g, k) = rho_step(forms.last().unwrap(), s);
            steps.push(k);
            if g == start {
                break;
            }
            forms.push(g);
        }
        Ok(Self {
            to_start,
            forms,
            steps,
        })
    }

    fn position(&self, f: &Bqf) -> Option<usize> {
        self.forms.iter().position(|g| g == f)
    }

    /// Matrix B with forms[k](v) = start(B v).
    fn walk_matrix(&self, k: usize) -> Mat2 {
        self.steps[..k]
            .iter()
            .fold(Mat2::identity(), |m, &s| m.mul_step(s))
    }
}

/// Candidate forms (m, b, c) of disc Δ for primitive representations of m.
fn candidate_forms(delta: i64, m: i64) -> Result<Vec<Bqf>> {
    let am = m.unsigned_abs();
    let modulus = 4 * am;
    let mut out = Vec::new();
    for b in arith::sqrt_mod(delta, modulus)? {
        let b = b as i64;
        if b >= 2 * am as i64 {
            continue;
        }
        let c = (b as i128 * b as i128 - delta as i128) / (4 * m as i128);
        let f = Bqf::new(m, b, c as i64);
        if f.is_primitive() {
            out.push(f);
        }
    }
    Ok(out)
}

/// Smallest of ±w and ±conj(w) by (|y|, |x|), then preferring positive entries.
fn canonical_witness(d: u64, w: (BigInt, BigInt)) -> (BigInt, BigInt) {
    let (x, y) = w;
    let conj = if d % 4 == 1 {
        (&x + &y, -&y)
    } else {
        (x.clone(), -&y)
    };
    let cands = [
        (x.clone(), y.clone()),
        (-&x, -&y),
        (conj.0.clone(), conj.1.clone()),
        (-conj.0, -conj.1),
    ];
    cands
        .into_iter()
        .min_by(|a, b| {
            (a.1.abs(), a.0.abs(), a.0.is_negative(), a.1.is_negative()).cmp(&(
                b.1.abs(),
                b.0.abs(),
                b.0.is_negative(),
                b.1.is_negative(),
            ))
        })
        .unwrap()
}

fn witness_key(w: &(BigInt, BigInt)) -> (BigInt, BigInt) {
    (w.1.abs(), w.0.abs())
}

/// Default cap on witness size for library calls.
pub const DEFAULT_MAX_DIGITS: usize = 5000;

pub fn represents_principal(d: u64, m: i64) -> Result<Representation> {
    represents_principal_capped(d, m, Some(DEFAULT_MAX_DIGITS))
}

/// As [`represents_principal`]; the witness is dropped when its estimated
/// size exceeds `max_digits` (`Some(0)` skips witness work entirely).
pub fn represents_principal_capped(
    d: u64,
    m: i64,
    max_digits: Option<usize>,
) -> Result<Representation> {
    if m == 0 {
        return Err(Error::ZeroTarget);
    }
    if m.unsigned_abs() > 1_000_000 {
        return Err(Error::OutOfRange(m, "|m| must be at most 10^6"));
    }
    let pf = principal_form(d)?;
    represent_with_form(d, pf, m, max_digits)
}

pub(crate) fn represent_with_form(
    d: u64,
    pf: Bqf,
    m: i64,
    max_digits: Option<usize>,
) -> Result<Representation> {
    let delta = pf.disc() as i64;
    let pc = PrincipalCycle::new(d)?;
    let am = m.unsigned_abs();
    // m = g² m′: primitive representations of m′ scaled by g
    let mut hits: Vec<(u64, Bqf, Mat2, usize)> = Vec::new();
    let mut g = 1u64;
    while g * g <= am {
        if am.is_multiple_of(g * g) {
            let mp = m / (g * g) as i64;
            for f in candidate_forms(delta, mp)? {
                let (red, to_red) = reduce_with_matrix(&f)?;
                if let Some(k) = pc.position(&red) {
                    hits.push((g, f, to_red, k));
                }
            }
        }
        g += 1;
    }
    if hits.is_empty() {
        return Ok(Representation::No);
    }
    let cap = max_digits.unwrap_or(usize::MAX);
    if cap == 0 {
        return Ok(Representation::Yes(None));
    }
    // the period automorph must fit too, since it canonicalizes the witness
    let digits = estimate_digits(pc.steps.iter().copied());
    if digits + 2.0 > cap as f64 {
        return Ok(Representation::Yes(None));
    }
    let period = pc.to_start.mul(&pc.walk_matrix(pc.steps.len())).mul(&pc.to_start.inverse());
    let period_inv = period.inverse();
    let mut best: Option<(BigInt, BigInt)> = None;
    for (g, f, to_red, k) in hits {
        // f(G v) = N(A B_k v)  ⇒  f(w) = N(A B_k G⁻¹ w)
        let t = pc.to_start.mul(&pc.walk_matrix(k)).mul(&to_red.inverse());
        let (x, y) = t.apply(&BigInt::one(), &BigInt::zero());
        let gg = BigInt::from(g);
        let mut w = (x * &gg, y * &gg);
        debug_assert_eq!(f.a * (g * g) as i64, m);
        // walk along the unit orbit while |y| shrinks
        loop {
            let up = period.apply(&w.0, &w.1);
            let down = period_inv.apply(&w.0, &w.1);
            let key = witness_key(&w);
            if witness_key(&down) < key {
                w = down;
            } else if witness_key(&up) < key {
                w = up;
            } else {
                break;
            }
        }
        let w = canonical_witness(d, w);
        if pf.eval(&w.0, &w.1) != BigInt::from(m) {
            return Err(Error::Invariant(format!(
                "witness ({}, {}) does not give N_{d} = {m}",
                w.0, w.1
            )));
        }
        if best.as_ref().is_none_or(|b| witness_key(&w) < witness_key(b)) {
            best = Some(w);
        }
    }
    Ok(Representation::Yes(best))
}

/// Continued fraction of √d as (a₀, one full period).
pub fn cf_sqrt(d: u64) -> Result<(u64, Vec<u64>)> {
    if !(2..=arith::FACTOR_LIMIT).contains(&d) {
        return Err(Error::OutOfRange(d as i64, "cf_sqrt needs 2 <= d <= 10^12"));
    }
    if arith::is_square(d) {
        return Err(Error::PerfectSquare(d));
    }
    let a0 = arith::isqrt(d);
    let (mut m, mut q, mut a) = (0u64, 1u64, a0);
    let mut period = Vec::new();
    loop {
        m = q * a - m;
        q = (d - m * m) / q;
        a = (a0 + m) / q;
        period.push(a);
        if a == 2 * a0 {
            break;
        }
    }
    Ok((a0, period))
}

/// Whether x² − dy² = −1 is soluble, by period parity.
pub fn negative_pell_decide(d: u64) -> Result<bool> {
    Ok(cf_sqrt(d)?.1.len() % 2 == 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NegPell {
    No,
    Yes(Option<(BigInt, BigInt)>),
}

pub fn negative_pell(d: u64) -> Result<NegPell> {
    negative_pell_capped(d, Some(DEFAULT_MAX_DIGITS))
}

pub fn negative_pell_capped(d: u64, max_digits: Option<usize>) -> Result<NegPell> {
    let (a0, period) = cf_sqrt(d)?;
    if period.len() % 2 == 0 {
        return Ok(NegPell::No);
    }
    let digits: f64 = std::iter::once(a0)
        .chain(period.iter().copied())
        .map(|a| ((a + 1) as f64).log10())
        .sum();
    if digits > max_digits.unwrap_or(usize::MAX) as f64 {
        return Ok(NegPell::Yes(None));
    }
    let (mut p0, mut p1) = (BigInt::one(), BigInt::from(a0));
    let (mut q0, mut q1) = (BigInt::zero(), BigInt::one());
    for &a in &period[..period.len() - 1] {
        let p2 = &p1 * a + &p0;
        let q2 = &q1 * a + &q0;
        (p0, p1, q0, q1) = (p1, p2, q1, q2);
    }
    if &p1 * &p1 - &q1 * &q1 * d != BigInt::from(-1) {
        return Err(Error::Invariant(format!("convergent fails x^2 - {d} y^2 = -1")));
    }
    Ok(NegPell::Yes(Some((p1, q1))))
}

/// Result of deciding N_d(x, y) = l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    NotInFamily(FamilyStatus),
    QInsoluble(FamilyStatus),
    Soluble(Option<(BigInt, BigInt)>),
    Insoluble,
}

impl SolveOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            SolveOutcome::NotInFamily(_) => "not_in_family",
            SolveOutcome::QInsoluble(_) => "q_insoluble",
            SolveOutcome::Soluble(_) => "soluble",
            SolveOutcome::Insoluble => "insoluble",
        }
    }

    pub fn is_soluble(&self) -> bool {
        matches!(self, SolveOutcome::Soluble(_))
    }
}

pub fn solve_generalized(d: u64, l: i64) -> Result<SolveOutcome> {
    solve_generalized_capped(d, l, Some(DEFAULT_MAX_DIGITS))
}

pub fn solve_generalized_capped(d: u64, l: i64, max_digits: Option<usize>) -> Result<SolveOutcome> {
    arith::check_l(l)?;
    if d < 2 {
        return Err(Error::OutOfRange(d as i64, "d must exceed 1"));
    }
    let status = arith::in_family(d, l)?;
    match status {
        FamilyStatus::NotSquarefree => return Err(Error::NotSquarefree(d as i64)),
        FamilyStatus::NotDivisible => return Ok(SolveOutcome::NotInFamily(status)),
        FamilyStatus::FailsEd | FamilyStatus::FailsEd2 => {
            return Ok(SolveOutcome::QInsoluble(status))
        }
        FamilyStatus::Yes => {}
    }
    Ok(match represents_principal_capped(d, l, max_digits)? {
        Representation::No => SolveOutcome::Insoluble,
        Representation::Yes(w) => SolveOutcome::Soluble(w),
    })
}

/// Index of the subfield unit product in the units of Q(√−l, √d).
pub fn hasse_unit_index(l: u64, d: u64) -> Result<u8> {
    if l <= 3 || l % 4 != 3 || !arith::is_prime(l) {
        return Err(Error::UnsupportedL(l as i64));
    }
    if d == 0 || !arith::is_squarefree(d)? {
        return Err(Error::NotSquarefree(d as i64));
    }
    if d == l || d == 3 * l {
        return Err(Error::Excluded("d must not be l or 3l"));
    }
    if !d.is_multiple_of(l) {
        return Ok(1);
    }
    for sl in [l as i64, -(l as i64)] {
        if solve_generalized_capped(d, sl, Some(0))?.is_soluble() {
            return Ok(2);
        }
    }
    Ok(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn principal_examples() {
        let f = principal_form(33).unwrap();
        assert_eq!(f, Bqf::new(1, 1, -8));
        assert_eq!(f.eval(&bi(5), &bi(2)), bi(3));
        assert_eq!(principal_form(10).unwrap(), Bqf::new(1, 0, -10));
        let f = principal_form(5).unwrap();
        assert_eq!(f, Bqf::new(1, 1, -1));
        assert_eq!(f.eval(&bi(1), &bi(1)), bi(1));
        assert!(principal_form(12).is_err());
    }

    #[test]
    fn cycle_examples() {
        let c = cycle(&Bqf::new(1, 2, -2)).unwrap();
        let mut leads: Vec<i64> = c.cycle.iter().map(|f| f.a).collect();
        leads.sort();
        assert_eq!(leads, vec![-2, 1]);
        let c = cycle(&principal_form(10).unwrap()).unwrap();
        assert!(c.cycle.iter().any(|f| f.a == -1));
        for f in &c.cycle {
            assert!(f.is_reduced());
            assert_eq!(reduce(f).unwrap(), *f);
        }
        assert_eq!(c.cycle.len() % 2, 0);
        assert!(reduce(&Bqf::new(2, 2, 2)).is_err());
        assert!(reduce(&Bqf::new(1, 2, 0)).is_err());
    }

    #[test]
    fn reduce_matrix_is_proper() {
        for f in [Bqf::new(3, 5, -7), Bqf::new(-11, 1, 13), Bqf::new(101, 301, 7)] {
            let (g, m) = reduce_with_matrix(&f).unwrap();
            assert_eq!(m.det(), BigInt::one());
            assert!(g.is_reduced());
            let (x, y) = m.apply(&bi(1), &bi(0));
            assert_eq!(f.eval(&x, &y), bi(g.a));
        }
    }

    #[test]
    fn composition_examples() {
        let g = ClassGroup::new(40).unwrap();
        assert_eq!(g.h_plus(), 2);
        let p = &g.classes[g.identity];
        for c in &g.classes {
            assert_eq!(compose(p, c).unwrap(), *c);
        }
        let x = g.classes.iter().find(|c| *c != p).unwrap();
        assert_eq!(compose(x, x).unwrap(), *p);
        let other = ClassGroup::new(12).unwrap();
        assert!(compose(p, &other.classes[0]).is_err());
    }

    #[test]
    fn class_group_examples() {
        let c = narrow_class_group(40).unwrap();
        assert_eq!(c.narrow, vec![2]);
        assert!(c.negative_pell);
        assert_eq!(c.ordinary, vec![2]);
        let c = narrow_class_group(5).unwrap();
        assert!(c.narrow.is_empty() && c.ordinary.is_empty());
        assert!(c.negative_pell);
        let c = narrow_class_group(136).unwrap();
        assert_eq!(c.narrow, vec![4]);
        assert!(!c.negative_pell);
        assert_eq!(c.ordinary, vec![2]);
        assert!(narrow_class_group(44 * 4).is_err());
        assert!(narrow_class_group(4).is_err());
    }

    #[test]
    fn invariant_factor_shapes() {
        // Z/2 × Z/4 has orders 1,2,2,2,4,4,4,4
        assert_eq!(invariant_factors(&[1, 2, 2, 2, 4, 4, 4, 4]), vec![2, 4]);
        // Z/6 = Z/2 × Z/3
        assert_eq!(invariant_factors(&[1, 2, 3, 3, 6, 6]), vec![6]);
        assert_eq!(invariant_factors(&[1]), Vec::<u64>::new());
    }

    #[test]
    fn representation_examples() {
        let r = represents_principal(10, -1).unwrap();
        let (x, y) = r.witness().unwrap();
        assert_eq!(x * x - y * y * 10, bi(-1));
        assert_eq!(represents_principal(10, 3).unwrap(), Representation::No);
        assert_eq!(
            represents_principal(33, 3).unwrap(),
            Representation::Yes(Some((bi(5), bi(2))))
        );
        assert!(represents_principal(33, 0).is_err());
        // 4 = 2², represented non-primitively as N(2, 0)
        assert!(represents_principal(10, 4).unwrap().is_yes());
        assert!(represents_principal(10, 9).unwrap().is_yes());
    }

    #[test]
    fn negative_pell_examples() {
        assert_eq!(negative_pell(5).unwrap(), NegPell::Yes(Some((bi(2), bi(1)))));
        assert_eq!(negative_pell(3).unwrap(), NegPell::No);
        assert_eq!(negative_pell(34).unwrap(), NegPell::No);
    }

    #[test]
    fn cf_examples() {
        assert_eq!(cf_sqrt(7).unwrap(), (2, vec![1, 1, 1, 4]));
        assert_eq!(cf_sqrt(2).unwrap(), (1, vec![2]));
        assert_eq!(cf_sqrt(34).unwrap(), (5, vec![1, 4, 1, 10]));
        for k in 1..50u64 {
            assert_eq!(cf_sqrt(k * k + 1).unwrap(), (k, vec![2 * k]));
            assert_eq!(
                negative_pell(k * k + 1).unwrap(),
                NegPell::Yes(Some((bi(k as i64), bi(1))))
            );
        }
        assert!(cf_sqrt(49).is_err());
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve_generalized(33, 3).unwrap(),
            SolveOutcome::Soluble(Some((bi(5), bi(2))))
        );
        assert_eq!(
            solve_generalized(3, 3).unwrap(),
            SolveOutcome::QInsoluble(FamilyStatus::FailsEd2)
        );
        assert_eq!(
            solve_generalized(14, -7).unwrap(),
            SolveOutcome::Soluble(Some((bi(7), bi(2))))
        );
        assert_eq!(
            solve_generalized(10, 3).unwrap(),
            SolveOutcome::NotInFamily(FamilyStatus::NotDivisible)
        );
        assert!(solve_generalized(10, 5).is_err());
    }

    #[test]
    fn hasse_examples() {
        assert_eq!(hasse_unit_index(7, 14).unwrap(), 2);
        assert_eq!(hasse_unit_index(7, 10).unwrap(), 1);
        assert!(hasse_unit_index(7, 7).is_err());
        assert!(hasse_unit_index(7, 21).is_err());
        assert!(hasse_unit_index(3, 6).is_err());
    }
}
