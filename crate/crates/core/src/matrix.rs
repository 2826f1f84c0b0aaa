//! Square integer matrices over a shared positive denominator.
//!
//! Every operator and projector in the pipeline has small integer entries once
//! scaled by a common denominator (ray norms are 1, 4 or 8), so all checks run
//! in exact `i64` arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Sub};

/// `numerator / denominator`, stored row-major. Always kept in lowest terms
/// with a positive denominator, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    dim: usize,
    numerator: Vec<i64>,
    denominator: i64,
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl ExactMatrix {
    pub fn new(dim: usize, numerator: Vec<i64>, denominator: i64) -> Self {
        assert_eq!(numerator.len(), dim * dim, "numerator must be dim x dim");
        assert!(denominator != 0, "zero denominator");
        let mut m = ExactMatrix { dim, numerator, denominator };
        m.reduce();
        m
    }

    pub fn from_integers(dim: usize, entries: Vec<i64>) -> Self {
        Self::new(dim, entries, 1)
    }

    pub fn zero(dim: usize) -> Self {
        ExactMatrix { dim, numerator: vec![0; dim * dim], denominator: 1 }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.numerator[i * dim + i] = 1;
        }
        m
    }

    /// Rank-1 projector `v vᵀ / (vᵀ v)` onto the span of `v`.
    pub fn outer_projector(v: &[i64]) -> Self {
        let dim = v.len();
        let norm: i64 = v.iter().map(|x| x * x).sum();
        assert!(norm > 0, "projector onto the zero vector");
        let numerator = (0..dim * dim).map(|k| v[k / dim] * v[k % dim]).collect();
        Self::new(dim, numerator, norm)
    }

    fn reduce(&mut self) {
        if self.denominator < 0 {
            self.denominator = -self.denominator;
            self.numerator.iter_mut().for_each(|x| *x = -*x);
        }
        let g = self.numerator.iter().fold(self.denominator, |g, &x| gcd(g, x));
        if g > 1 {
            self.denominator /= g;
            self.numerator.iter_mut().for_each(|x| *x /= g);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn numerator(&self) -> &[i64] {
        &self.numerator
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// Numerator entry at `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.numerator[row * self.dim + col]
    }

    pub fn column(&self, col: usize) -> Vec<i64> {
        (0..self.dim).map(|r| self.entry(r, col)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)))
    }

    /// Idempotence in scaled form: `N·N = d·N`.
    pub fn is_idempotent(&self) -> bool {
        &(self * self) == self
    }

    pub fn is_projector(&self) -> bool {
        self.is_symmetric() && self.is_idempotent()
    }

    /// Trace as a reduced fraction `(num, den)`.
    pub fn trace(&self) -> (i64, i64) {
        let t: i64 = (0..self.dim).map(|i| self.entry(i, i)).sum();
        let g = gcd(t, self.denominator).max(1);
        (t / g, self.denominator / g)
    }

    /// Rank of an orthogonal projector, read off its trace. `None` if the
    /// matrix is not a projector.
    pub fn projector_rank(&self) -> Option<i64> {
        if !self.is_projector() {
            return None;
        }
        let (num, den) = self.trace();
        (den == 1).then_some(num)
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.entry(r, c) * v[c]).sum())
            .collect()
    }

    pub fn scale(&self, factor: i64) -> Self {
        Self::new(self.dim, self.numerator.iter().map(|x| x * factor).collect(), self.denominator)
    }

    pub fn negate(&self) -> Self {
        self.scale(-1)
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a ExactMatrix>>(dim: usize, items: I) -> Self {
        items.into_iter().fold(Self::zero(dim), |acc, m| &acc + m)
    }
}

/// `self·a ± rhs·b` over the common denominator.
fn combine(lhs: &ExactMatrix, rhs: &ExactMatrix, sign: i64) -> ExactMatrix {
    assert_eq!(lhs.dim, rhs.dim, "dimension mismatch");
    let g = gcd(lhs.denominator, rhs.denominator);
    let l = lhs.denominator / g * rhs.denominator;
    let (a, b) = (l / lhs.denominator, sign * (l / rhs.denominator));
    let numerator = lhs.numerator.iter().zip(&rhs.numerator).map(|(x, y)| x * a + y * b).collect();
    ExactMatrix::new(lhs.dim, numerator, l)
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;

    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        combine(self, rhs, 1)
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;

    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        combine(self, rhs, -1)
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;

    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.numerator[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.numerator[k * n + j];
                }
            }
        }
        ExactMatrix::new(n, out, self.denominator * rhs.denominator)
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix(1/{}) [", self.denominator)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|c| format!("{:>3}", self.entry(r, c))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}
