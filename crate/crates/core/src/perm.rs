//! Permutations, total orders, ordered partitions, unshuffles and twists.
//!
//! Everything here is one-indexed: a permutation of `[n]` stores the images
//! of `1..=n`, and a map `[n] -> [m]` is a slice of values in `1..=m`.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPerm")]
pub struct Permutation {
    perm: Vec<usize>,
}

#[derive(Deserialize)]
struct RawPerm {
    perm: Vec<usize>,
}

impl TryFrom<RawPerm> for Permutation {
    type Error = Error;
    fn try_from(raw: RawPerm) -> Result<Self> {
        Permutation::new(raw.perm)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.perm)
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(Error::NotAPermutation(images));
            }
            seen[v] = true;
        }
        Ok(Permutation { perm: images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { perm: (1..=n).collect() }
    }

    /// Transposition of `i` and `j` in `[n]`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p = Self::identity(n);
        p.perm.swap(i - 1, j - 1);
        p
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `self ∘ q`, i.e. `i ↦ self(q(i))`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        if self.len() != q.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: q.len() });
        }
        Ok(Permutation { perm: q.perm.iter().map(|&i| self.perm[i - 1]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.perm.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { perm: inv }
    }

    /// Block sum `self × other` acting on `[n + m]`.
    pub fn direct_sum(&self, other: &Permutation) -> Permutation {
        let n = self.len();
        let mut perm = self.perm.clone();
        perm.extend(other.perm.iter().map(|&v| v + n));
        Permutation { perm }
    }

    /// Rearranges a sequence by the right action: `(xs·p)[i] = xs[p(i)]`.
    pub fn permute<T: Clone>(&self, xs: &[T]) -> Result<Vec<T>> {
        if xs.len() != self.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: xs.len() });
        }
        Ok(self.perm.iter().map(|&i| xs[i - 1].clone()).collect())
    }

    /// All permutations of `[n]` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur = (1..=n).collect::<Vec<_>>();
        loop {
            out.push(Permutation { perm: cur.clone() });
            if !next_permutation(&mut cur) {
                break;
            }
        }
        out
    }

    /// The block swap sending the first `a` letters after the last `b`.
    pub fn block_swap(a: usize, b: usize) -> Permutation {
        let perm = (1..=b).map(|i| a + i).chain(1..=a).collect();
        Permutation { perm }
    }

    /// Cycle type, sorted descending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i] - 1;
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// Checks that `f` is a map `[n] -> [m]`.
pub fn check_map(f: &[usize], m: usize) -> Result<()> {
    for &v in f {
        if v == 0 || v > m {
            return Err(Error::OutOfRange { value: v, bound: m });
        }
    }
    Ok(())
}

/// The unshuffle of `f`: sort indices by `(f(i), i)` and return the
/// placement `i ↦ rank of i`.
pub fn unshuffle(f: &[usize]) -> Permutation {
    let mut idx: Vec<usize> = (1..=f.len()).collect();
    // stable: equal keys keep index order
    idx.sort_by_key(|&i| f[i - 1]);
    let mut omega = vec![0; f.len()];
    for (rank, &i) in idx.iter().enumerate() {
        omega[i - 1] = rank + 1;
    }
    Permutation { perm: omega }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderedPartition {
    sizes: Vec<usize>,
}

impl OrderedPartition {
    pub fn new(sizes: Vec<usize>) -> Self {
        OrderedPartition { sizes }
    }

    /// Fibre sizes of a map `[n] -> [m]`.
    pub fn of_map(f: &[usize], m: usize) -> Result<Self> {
        check_map(f, m)?;
        let mut sizes = vec![0; m];
        for &v in f {
            sizes[v - 1] += 1;
        }
        Ok(OrderedPartition { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// The monotone map `[n] -> [m]` with these fibre sizes.
    pub fn monotone_map(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat(i + 1).take(k))
            .collect()
    }
}

/// Reorders the blocks of `p` by `sigma`, keeping the order inside blocks.
pub fn block_perm(sigma: &Permutation, p: &OrderedPartition) -> Result<Permutation> {
    if sigma.len() != p.blocks() {
        return Err(Error::BlockCount { expected: sigma.len(), got: p.blocks() });
    }
    let f: Vec<usize> = p.monotone_map().into_iter().map(|b| sigma.apply(b)).collect();
    Ok(unshuffle(&f))
}

/// A total order on a finite set, read as the sequence `α(1), …, α(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TotalOrder<T> {
    order: Vec<T>,
}

impl<T: Clone + Eq + Hash> TotalOrder<T> {
    pub fn new(order: Vec<T>) -> Result<Self> {
        let mut seen = HashSet::new();
        for x in &order {
            if !seen.insert(x) {
                return Err(Error::Duplicate);
            }
        }
        Ok(TotalOrder { order })
    }

    pub fn elements(&self) -> &[T] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `α⁻¹(x)`, one-indexed.
    pub fn position(&self, x: &T) -> Option<usize> {
        self.order.iter().position(|y| y == x).map(|i| i + 1)
    }
}

/// `β⁻¹ ∘ α`.
pub fn twist<T: Clone + Eq + Hash>(alpha: &TotalOrder<T>, beta: &TotalOrder<T>) -> Result<Permutation> {
    if alpha.len() != beta.len() {
        return Err(Error::UnderlyingSetMismatch);
    }
    let mut images = Vec::with_capacity(alpha.len());
    for x in &alpha.order {
        images.push(beta.position(x).ok_or(Error::UnderlyingSetMismatch)?);
    }
    Permutation::new(images)
}

pub fn restrict_order<T: Clone + Eq + Hash>(alpha: &TotalOrder<T>, d: &[T]) -> Result<TotalOrder<T>> {
    if d.iter().any(|x| alpha.position(x).is_none()) {
        return Err(Error::NotASubset);
    }
    let keep: HashSet<&T> = d.iter().collect();
    Ok(TotalOrder { order: alpha.order.iter().filter(|x| keep.contains(x)).cloned().collect() })
}

/// Insertion of `alpha` over `beta` in `d`: the part of `beta` before `d`,
/// then all of `alpha`, then the part of `beta` after `d`.
pub fn insert_order<T: Clone + Eq + Hash>(
    alpha: &TotalOrder<T>,
    beta: &TotalOrder<T>,
    d: &T,
) -> Result<TotalOrder<T>> {
    let k = beta.position(d).ok_or(Error::ElementMissing)?;
    let rest: HashSet<&T> = beta.order.iter().filter(|x| *x != d).collect();
    if alpha.order.iter().any(|x| rest.contains(x)) {
        return Err(Error::Overlap);
    }
    let mut order = beta.order[..k - 1].to_vec();
    order.extend(alpha.order.iter().cloned());
    order.extend(beta.order[k..].iter().cloned());
    Ok(TotalOrder { order })
}
