//! Linear algebra over F₂, kernel-rank probabilities of random matrices and
//! the surjection/pairing Markov model.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms.
pub type Rational = BigRational;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector over F₂ of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} outside vector of length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len, "index {i} outside vector of length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if b {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn add_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            & 1
            == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Indices of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.to_bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "F2Vector({s})")
    }
}

/// Dense bit matrix over F₂, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.put(i, i, true);
        }
        m
    }

    /// Build from explicit rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Result<Self> {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::OutOfBounds {
                    row: i,
                    col: r.len(),
                    rows: rows.len(),
                    cols,
                });
            }
            for (j, &b) in r.iter().enumerate() {
                m.put(i, j, b);
            }
        }
        Ok(m)
    }

    /// Convenience constructor from 0/1 integers.
    pub fn from_u8_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let bools: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x & 1 == 1).collect())
            .collect();
        Self::from_rows(cols, &bools).expect("ragged rows")
    }

    pub fn from_row_vectors(cols: usize, rows: &[F2Vector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            m.row_words_mut(i).copy_from_slice(&r.words);
        }
        m
    }

    /// Outer product u vᵀ.
    pub fn outer(u: &F2Vector, v: &F2Vector) -> Self {
        let rows: Vec<F2Vector> = (0..u.len())
            .map(|i| if u.get(i) { v.clone() } else { F2Vector::zeros(v.len()) })
            .collect();
        Self::from_row_vectors(v.len(), &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn check(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> Result<bool> {
        self.check(row, col)?;
        Ok(self.at(row, col))
    }

    pub fn set(&mut self, row: usize, col: usize, b: bool) -> Result<()> {
        self.check(row, col)?;
        self.put(row, col, b);
        Ok(())
    }

    #[inline]
    pub(crate) fn at(&self, row: usize, col: usize) -> bool {
        self.data[row * self.stride + col / WORD] >> (col % WORD) & 1 == 1
    }

    #[inline]
    pub(crate) fn put(&mut self, row: usize, col: usize, b: bool) {
        let idx = row * self.stride + col / WORD;
        let mask = 1u64 << (col % WORD);
        if b {
            self.data[idx] |= mask;
        } else {
            self.data[idx] &= !mask;
        }
    }

    pub fn row(&self, i: usize) -> F2Vector {
        F2Vector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn row_list(&self) -> Vec<Vec<bool>> {
        (0..self.rows).map(|i| self.row(i).to_bits()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.at(i, j) {
                    t.put(j, i, true);
                }
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &F2Vector) -> F2Vector {
        assert_eq!(x.len(), self.cols);
        let mut out = F2Vector::zeros(self.rows);
        for i in 0..self.rows {
            let bit = self
                .row_words(i)
                .iter()
                .zip(&x.words)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1;
            out.set(i, bit == 1);
        }
        out
    }

    /// Row vector times matrix: yᵀ M.
    pub fn vec_mul(&self, y: &F2Vector) -> F2Vector {
        assert_eq!(y.len(), self.rows);
        let mut out = F2Vector::zeros(self.cols);
        for i in 0..self.rows {
            if y.get(i) {
                for (o, w) in out.words.iter_mut().zip(self.row_words(i)) {
                    *o ^= w;
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows);
        let rows: Vec<F2Vector> = (0..self.rows).map(|i| other.vec_mul(&self.row(i))).collect();
        F2Matrix::from_row_vectors(other.cols, &rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Reduced row echelon form in place; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.at(i, c)) else {
                continue;
            };
            if p != r {
                for w in 0..self.stride {
                    self.data.swap(p * self.stride + w, r * self.stride + w);
                }
            }
            let (wi, mask) = (c / WORD, 1u64 << (c % WORD));
            for i in 0..self.rows {
                if i != r && self.data[i * self.stride + wi] & mask != 0 {
                    for w in 0..self.stride {
                        let v = self.data[r * self.stride + w];
                        self.data[i * self.stride + w] ^= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let s: String = (0..self.cols).map(|j| if self.at(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

pub fn rank(m: &F2Matrix) -> usize {
    m.clone().rref().len()
}

/// Basis of {x : Mx = 0}.
pub fn right_kernel_basis(m: &F2Matrix) -> Vec<F2Vector> {
    let mut r = m.clone();
    let pivots = r.rref();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = F2Vector::unit(m.cols, free);
        for (row, &p) in pivots.iter().enumerate() {
            if r.at(row, free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Basis of {y : yᵀM = 0}.
pub fn left_kernel_basis(m: &F2Matrix) -> Vec<F2Vector> {
    right_kernel_basis(&m.transpose())
}

/// Basis of the intersection of the span of `a` with the span of `b`.
pub fn subspace_intersection(len: usize, a: &[F2Vector], b: &[F2Vector]) -> Vec<F2Vector> {
    // Solve Σ λ_i a_i = Σ μ_j b_j; the kernel of [a | b] columns gives the pairs.
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let k = a.len() + b.len();
    let mut cols = F2Matrix::zeros(len, k);
    for (j, v) in a.iter().chain(b.iter()).enumerate() {
        for i in v.support() {
            cols.put(i, j, true);
        }
    }
    let mut out: Vec<F2Vector> = Vec::new();
    for coeff in right_kernel_basis(&cols) {
        let mut v = F2Vector::zeros(len);
        for (j, vec) in a.iter().enumerate() {
            if coeff.get(j) {
                v.add_assign(vec);
            }
        }
        out.push(v);
    }
    // a-side combinations of independent a_i are independent unless zero
    let m = F2Matrix::from_row_vectors(len, &out);
    row_space_basis(&m)
}

/// Independent rows spanning the row space.
pub fn row_space_basis(m: &F2Matrix) -> Vec<F2Vector> {
    let mut r = m.clone();
    let n = r.rref().len();
    (0..n).map(|i| r.row(i)).collect()
}

pub fn kernel_intersection(m: &F2Matrix) -> Result<Vec<F2Vector>> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    Ok(subspace_intersection(
        m.cols,
        &left_kernel_basis(m),
        &right_kernel_basis(m),
    ))
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

fn rat(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// Probability that a uniform m×n matrix over F₂ has right kernel of dimension j.
pub fn prob_kernel_rank(m: usize, n: usize, j: usize) -> Rational {
    if j > n || n - j > m {
        return Rational::zero();
    }
    let mut num = BigInt::one();
    let mut den = pow2(n * m);
    for i in 0..(n - j) {
        num *= (pow2(m) - pow2(i)) * (pow2(n) - pow2(i));
        den *= pow2(n - j) - pow2(i);
    }
    rat(num, den)
}

/// Probability that left and right kernels of a uniform n×n matrix meet
/// trivially, conditioned on the kernel having dimension m.
pub fn g_exact(n: usize, m: usize) -> Rational {
    assert!(m <= n, "g_exact needs m <= n");
    if m == 0 {
        return Rational::one();
    }
    if 2 * m > n {
        return Rational::zero();
    }
    let mut prod = Rational::one();
    for j in 0..(n - 2 * m) {
        // 1 - 2^{j-n+m}, exponent negative since j < n - m
        let e = n - m - j;
        prod *= rat(pow2(e) - 1, pow2(e));
    }
    prob_kernel_rank(n - m, m, 0) * prod / prob_kernel_rank(n, n - m, 0)
}

/// Exhaustive statistics over all m×n matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixStats {
    pub total: u64,
    /// right-kernel dimension → frequency
    pub kernel_rank: BTreeMap<usize, Rational>,
    /// for square input: kernel dimension → frequency of trivial kernel intersection
    pub trivial_intersection: BTreeMap<usize, Rational>,
}

pub fn enumerate_matrix_stats(m: usize, n: usize) -> Result<MatrixStats> {
    if m * n > 24 {
        return Err(Error::EnumerationTooLarge { rows: m, cols: n });
    }
    let total: u64 = 1 << (m * n);
    let mut by_rank: BTreeMap<usize, u64> = BTreeMap::new();
    let mut by_dim: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for code in 0..total {
        let mut mat = F2Matrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                if code >> (i * n + j) & 1 == 1 {
                    mat.put(i, j, true);
                }
            }
        }
        let r = rank(&mat);
        *by_rank.entry(n - r).or_default() += 1;
        if m == n {
            let trivial = kernel_intersection(&mat)?.is_empty();
            let e = by_dim.entry(n - r).or_default();
            e.1 += 1;
            if trivial {
                e.0 += 1;
            }
        }
    }
    let tot = BigInt::from(total);
    Ok(MatrixStats {
        total,
        kernel_rank: by_rank
            .into_iter()
            .map(|(k, c)| (k, rat(BigInt::from(c), tot.clone())))
            .collect(),
        trivial_intersection: by_dim
            .into_iter()
            .map(|(k, (h, c))| (k, rat(BigInt::from(h), BigInt::from(c))))
            .collect(),
    })
}

/// Both sides of 1/(2^{n+1}−1) = Σ_i P(n,n,i)/2^n · 1/(2^{i+1}−1).
pub fn markov_identity_check(n: usize) -> (Rational, Rational) {
    let lhs = rat(BigInt::one(), pow2(n + 1) - 1);
    let mut rhs = Rational::zero();
    for i in 0..=n {
        rhs += prob_kernel_rank(n, n, i) / rat(pow2(n), BigInt::one())
            / rat(pow2(i + 1) - 1, BigInt::one());
    }
    (lhs, rhs)
}

pub fn sample_matrix_with<R: Rng>(m: usize, n: usize, rng: &mut R) -> F2Matrix {
    let mut mat = F2Matrix::zeros(m, n);
    let tail = n % WORD;
    for i in 0..m {
        let row = mat.row_words_mut(i);
        for w in row.iter_mut() {
            *w = rng.gen();
        }
        if tail != 0 {
            if let Some(last) = row.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
    mat
}

/// Uniform random m×n matrix, reproducible for a fixed seed.
pub fn sample_matrix(m: usize, n: usize, seed: u64) -> F2Matrix {
    sample_matrix_with(m, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// How the pairing U is drawn relative to the surjection T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum PairingLaw {
    /// U(v, w) = U′(Tv, w) with U′ a uniform n×n pairing: U is uniform among
    /// pairings whose left kernel contains ker T.
    #[default]
    Coupled,
    /// U uniform on all (n+1)×n pairings, independent of T.
    Independent,
}

/// Per-i tallies for the event "x ∈ leftker(U), dim leftker(U) = i+1".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuCounts {
    pub n: usize,
    pub trials: u64,
    /// (x ∈ ker T and event, event) for i = 0..=n
    pub counts: Vec<(u64, u64)>,
}

impl TuCounts {
    pub fn frequency(&self, i: usize) -> Option<f64> {
        let (h, o) = self.counts[i];
        (o > 0).then(|| h as f64 / o as f64)
    }
}

pub fn simulate_tu(n: usize, trials: u64, seed: u64) -> Result<TuCounts> {
    simulate_tu_with_law(n, trials, seed, PairingLaw::Coupled)
}

pub fn simulate_tu_with_law(n: usize, trials: u64, seed: u64, law: PairingLaw) -> Result<TuCounts> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if n > 12 {
        return Err(Error::DimensionTooLarge(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![(0u64, 0u64); n + 1];
    let x = F2Vector::unit(n + 1, 0);
    for _ in 0..trials {
        // T: F₂^{n+1} → F₂^n as an n×(n+1) matrix of full rank n
        let t = loop {
            let t = sample_matrix_with(n, n + 1, &mut rng);
            if rank(&t) == n {
                break t;
            }
        };
        // U as an (n+1)×n matrix: U(v, w) = vᵀ U w
        let u = match law {
            PairingLaw::Coupled => t.transpose().mul(&sample_matrix_with(n, n, &mut rng)),
            PairingLaw::Independent => sample_matrix_with(n + 1, n, &mut rng),
        };
        // leftker(U) = {v : vᵀU = 0} = right kernel of Uᵀ
        let ut = u.transpose();
        if !ut.mul_vec(&x).is_zero() {
            continue;
        }
        let dim = n + 1 - rank(&u);
        let i = dim - 1;
        counts[i].1 += 1;
        if t.mul_vec(&x).is_zero() {
            counts[i].0 += 1;
        }
    }
    Ok(TuCounts { n, trials, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&F2Matrix::zeros(2, 2)), 0);
        assert_eq!(rank(&F2Matrix::identity(3)), 3);
        let m = F2Matrix::from_u8_rows(&[&[0, 1, 1], &[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn out_of_bounds_rejected() {
        let mut m = F2Matrix::zeros(2, 3);
        assert!(m.get(2, 0).is_err());
        assert!(m.set(0, 3, true).is_err());
        assert!(m.get(1, 2).is_ok());
    }

    #[test]
    fn kernel_examples() {
        let id = F2Matrix::identity(2);
        assert!(right_kernel_basis(&id).is_empty());
        assert!(left_kernel_basis(&id).is_empty());
        let z = F2Matrix::zeros(1, 1);
        assert_eq!(right_kernel_basis(&z), vec![F2Vector::unit(1, 0)]);
        assert_eq!(left_kernel_basis(&z), vec![F2Vector::unit(1, 0)]);
        let u = F2Vector::from_bits(&[true, false]);
        let v = F2Vector::from_bits(&[true, true]);
        let m = F2Matrix::outer(&u, &v);
        assert_eq!(right_kernel_basis(&m), vec![F2Vector::from_bits(&[true, true])]);
        assert_eq!(left_kernel_basis(&m), vec![F2Vector::from_bits(&[false, true])]);
        assert!(kernel_intersection(&m).unwrap().is_empty());
        assert_eq!(kernel_intersection(&z).unwrap().len(), 1);
        assert!(kernel_intersection(&id).unwrap().is_empty());
        assert!(kernel_intersection(&F2Matrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn probability_examples() {
        assert_eq!(prob_kernel_rank(1, 1, 0), r(1, 2));
        assert_eq!(prob_kernel_rank(2, 2, 0), r(3, 8));
        for n in 0..6 {
            assert_eq!(
                prob_kernel_rank(n, n, n),
                Rational::new(BigInt::one(), pow2(n * n))
            );
        }
        assert_eq!(g_exact(3, 0), Rational::one());
        assert_eq!(g_exact(1, 1), Rational::zero());
        assert_eq!(g_exact(2, 1), r(2, 3));
        assert_eq!(g_exact(3, 1), r(6, 7));
        assert_eq!(g_exact(4, 2), r(16, 35));
    }

    #[test]
    fn enumeration_examples() {
        let s = enumerate_matrix_stats(2, 2).unwrap();
        assert_eq!(s.kernel_rank[&0], r(3, 8));
        assert_eq!(s.kernel_rank[&1], r(9, 16));
        assert_eq!(s.kernel_rank[&2], r(1, 16));
        let s = enumerate_matrix_stats(1, 1).unwrap();
        assert_eq!(s.kernel_rank[&0], r(1, 2));
        assert_eq!(s.kernel_rank[&1], r(1, 2));
        let s = enumerate_matrix_stats(0, 3).unwrap();
        assert_eq!(s.kernel_rank.len(), 1);
        assert_eq!(s.kernel_rank[&3], Rational::one());
        assert!(enumerate_matrix_stats(5, 5).is_err());
    }

    #[test]
    fn markov_examples() {
        assert_eq!(markov_identity_check(0), (Rational::one(), Rational::one()));
        assert_eq!(markov_identity_check(1), (r(1, 3), r(1, 3)));
        assert_eq!(markov_identity_check(2), (r(1, 7), r(1, 7)));
    }

    #[test]
    fn sampling_examples() {
        let e = sample_matrix(0, 0, 9);
        assert_eq!((e.rows(), e.cols()), (0, 0));
        assert_eq!(sample_matrix(3, 3, 42), sample_matrix(3, 3, 42));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 100_000u64;
        let zeros = (0..trials)
            .filter(|_| rank(&sample_matrix_with(2, 2, &mut rng)) == 0)
            .count() as f64;
        let p = 1.0 / 16.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((zeros / trials as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn simulate_tu_small() {
        let c = simulate_tu(1, 200_000, 1).unwrap();
        assert_eq!(c.counts[0].0, c.counts[0].1);
        assert!(c.counts[0].1 > 0);
        assert!(simulate_tu(1, 0, 1).is_err());
        assert!(simulate_tu(13, 1, 1).is_err());
        assert_eq!(simulate_tu(2, 1000, 5).unwrap(), simulate_tu(2, 1000, 5).unwrap());
    }

    #[test]
    fn independent_law_loses_conditioning() {
        // with U independent of T the conditional is flat at 1/(2^{n+1}-1)
        let c = simulate_tu_with_law(1, 200_000, 3, PairingLaw::Independent).unwrap();
        let f = c.frequency(0).unwrap();
        assert!((f - 1.0 / 3.0).abs() < 0.02, "{f}");
    }
}
