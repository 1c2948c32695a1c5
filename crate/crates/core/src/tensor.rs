//! Dense rank-2 and rank-3 coupling tensors, Frobenius geometry and the
//! symmetric-group isotypic projectors.
//!
//! Storage is row-major: `a1[i][j]` lives at `i*n + j` and `a2[i][j][k]` at
//! `i*n*n + j*n + k`. Indices are 0-based.
//!
//! The rank-3 projectors are
//!
//! ```text
//! sym = (1/6) Σ_σ A∘σ
//! alt = (1/6) Σ_σ sgn(σ) A∘σ
//! mix = A − sym − alt
//! ```
//!
//! Each six-term sum is evaluated with a correctly rounded summation, so the
//! result depends only on the multiset of summands. That makes `sym` exactly
//! invariant and `alt` exactly sign-alternating under index permutations, and
//! makes the split commute bit-for-bit with node relabelings.

use std::fmt;
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// The six permutations of three slots paired with their signs.
pub const S3: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];

/// Common read access for the dense tensors.
pub trait Tensor {
    fn n(&self) -> usize;
    fn rank(&self) -> usize;
    fn as_slice(&self) -> &[f64];

    fn shape_label(&self) -> String {
        format!("rank-{} tensor with n = {}", self.rank(), self.n())
    }

    fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }
}

/// Frobenius inner product `Σ a·b` over all index tuples.
pub fn frobenius_inner<T: Tensor + ?Sized>(a: &T, b: &T) -> Result<f64> {
    if a.n() != b.n() || a.rank() != b.rank() {
        return Err(Error::ShapeMismatch {
            left: a.shape_label(),
            right: b.shape_label(),
        });
    }
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x * y)
        .sum())
}

/// Frobenius norm. Computed as a plain sum of squares, so it is zero exactly
/// when every entry is zero.
pub fn frobenius_norm<T: Tensor + ?Sized>(a: &T) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense `n × n` coupling matrix.
#[derive(Clone, PartialEq)]
pub struct Rank2Tensor {
    n: usize,
    data: Vec<f64>,
}

/// Dense `n × n × n` triadic coupling tensor.
#[derive(Clone, PartialEq)]
pub struct Rank3Tensor {
    n: usize,
    data: Vec<f64>,
}

impl Rank2Tensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::ShapeMismatch {
                left: format!("{} entries", data.len()),
                right: format!("rank-2 tensor with n = {n} ({} entries)", n * n),
            });
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Node relabeling: the result satisfies `out[π(i)][π(j)] = self[i][j]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }
}

impl Rank3Tensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::ShapeMismatch {
                left: format!("{} entries", data.len()),
                right: format!("rank-3 tensor with n = {n} ({} entries)", n * n * n),
            });
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    /// Writes `v` to every ordering of `(i, j, k)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let t = [i, j, k];
        for (p, _) in S3 {
            self.set(t[p[0]], t[p[1]], t[p[2]], v);
        }
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Node relabeling: `out[π(i)][π(j)][π(k)] = self[i][j][k]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    out.set(perm[i], perm[j], perm[k], self.get(i, j, k));
                }
            }
        }
        out
    }
}

impl Tensor for Rank2Tensor {
    fn n(&self) -> usize {
        self.n
    }
    fn rank(&self) -> usize {
        2
    }
    fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Tensor for Rank3Tensor {
    fn n(&self) -> usize {
        self.n
    }
    fn rank(&self) -> usize {
        3
    }
    fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

macro_rules! elementwise {
    ($ty:ident, $tr:ident, $method:ident, $op:tt) => {
        impl $tr for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                assert_eq!(self.n, rhs.n, "tensor size mismatch");
                $ty {
                    n: self.n,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
    };
}

elementwise!(Rank2Tensor, Add, add, +);
elementwise!(Rank2Tensor, Sub, sub, -);
elementwise!(Rank3Tensor, Add, add, +);
elementwise!(Rank3Tensor, Sub, sub, -);

impl fmt::Debug for Rank2Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = self.data.chunks(self.n.max(1)).collect();
        f.debug_struct("Rank2Tensor")
            .field("n", &self.n)
            .field("rows", &rows)
            .finish()
    }
}

impl fmt::Debug for Rank3Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rank3Tensor")
            .field("n", &self.n)
            .field("data", &self.data)
            .finish()
    }
}

/// `V₂ = Sym² ⊕ Λ²` split of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotypicSplit2 {
    pub sym: Rank2Tensor,
    pub alt: Rank2Tensor,
}

/// `V₃ = Sym³ ⊕ Λ³ ⊕ V^(2,1)` split of a rank-3 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotypicSplit3 {
    pub sym: Rank3Tensor,
    pub alt: Rank3Tensor,
    pub mix: Rank3Tensor,
}

impl IsotypicSplit2 {
    pub fn reconstruct(&self) -> Rank2Tensor {
        &self.sym + &self.alt
    }
}

impl IsotypicSplit3 {
    pub fn reconstruct(&self) -> Rank3Tensor {
        &(&self.sym + &self.alt) + &self.mix
    }
}

pub fn split2(a: &Rank2Tensor) -> IsotypicSplit2 {
    let n = a.n;
    let sym = Rank2Tensor::from_fn(n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i)));
    let alt = Rank2Tensor::from_fn(n, |i, j| {
        if i == j {
            0.0
        } else {
            0.5 * (a.get(i, j) - a.get(j, i))
        }
    });
    IsotypicSplit2 { sym, alt }
}

pub fn sym2(a: &Rank2Tensor) -> Rank2Tensor {
    split2(a).sym
}

pub fn alt2(a: &Rank2Tensor) -> Rank2Tensor {
    split2(a).alt
}

pub fn split3(a: &Rank3Tensor) -> IsotypicSplit3 {
    let n = a.n;
    let mut sym = Rank3Tensor::zeros(n);
    let mut alt = Rank3Tensor::zeros(n);
    let mut mix = Rank3Tensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t = [i, j, k];
                let mut plain = [0.0; 6];
                let mut signed = [0.0; 6];
                for (slot, (p, s)) in S3.iter().enumerate() {
                    let v = a.get(t[p[0]], t[p[1]], t[p[2]]);
                    plain[slot] = v;
                    signed[slot] = f64::from(*s) * v;
                }
                let s = exact_sum(&plain) / 6.0;
                let l = if i == j || j == k || i == k {
                    0.0
                } else {
                    exact_sum(&signed) / 6.0
                };
                let o = a.offset(i, j, k);
                sym.data[o] = s;
                alt.data[o] = l;
                mix.data[o] = a.data[o] - s - l;
            }
        }
    }
    IsotypicSplit3 { sym, alt, mix }
}

pub fn sym3(a: &Rank3Tensor) -> Rank3Tensor {
    split3(a).sym
}

pub fn alt3(a: &Rank3Tensor) -> Rank3Tensor {
    split3(a).alt
}

pub fn mix3(a: &Rank3Tensor) -> Rank3Tensor {
    split3(a).mix
}

/// Generalised Levi-Civita symbol on 0-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> i8 {
    if i == j || j == k || i == k {
        return 0;
    }
    // (i,j,k) is even iff it has an even number of inversions.
    let inversions = usize::from(i > j) + usize::from(i > k) + usize::from(j > k);
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Correctly rounded sum of a short slice (Shewchuk partials with a final
/// half-even correction). Independent of the order of `values`.
pub(crate) fn exact_sum(values: &[f64]) -> f64 {
    assert!(values.len() <= 16, "exact_sum supports at most 16 terms");
    let mut partials = [0.0f64; 16];
    let mut len = 0usize;
    for &v in values {
        let mut x = v;
        let mut kept = 0usize;
        for idx in 0..len {
            let mut y = partials[idx];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials[kept] = x;
        len = kept + 1;
    }

    let mut n = len;
    if n == 0 {
        return 0.0;
    }
    n -= 1;
    let mut hi = partials[n];
    let mut lo = 0.0;
    while n > 0 {
        let x = hi;
        n -= 1;
        let y = partials[n];
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0)) {
        let y = lo * 2.0;
        let x = hi + y;
        let yr = x - hi;
        if y == yr {
            hi = x;
        }
    }
    hi
}
