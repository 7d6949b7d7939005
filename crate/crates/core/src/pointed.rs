//! Finite pointed sets, permutations and monotone maps: the morphisms of
//! Fin_*, the symmetric groups and Δ, together with fiber sequences, the
//! permutation read off a pointed map, and the functor ι: Δ → Fin_*^op.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A basepoint-preserving map ⟨n⟩ → ⟨m⟩; `values[k-1]` is the image of `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPointedMap")]
pub struct PointedMap {
    n: usize,
    m: usize,
    values: Vec<usize>,
}

#[derive(Deserialize)]
struct RawPointedMap {
    n: usize,
    m: usize,
    values: Vec<usize>,
}

impl TryFrom<RawPointedMap> for PointedMap {
    type Error = Error;
    fn try_from(raw: RawPointedMap) -> Result<Self> {
        PointedMap::new(raw.n, raw.m, raw.values)
    }
}

impl PointedMap {
    pub fn new(n: usize, m: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != n {
            return invalid(format!("pointed map on <{n}> needs {n} values, got {}", values.len()));
        }
        if let Some(v) = values.iter().find(|&&v| v > m) {
            return invalid(format!("value {v} outside <{m}>"));
        }
        Ok(PointedMap { n, m, values })
    }

    pub fn identity(n: usize) -> Self {
        PointedMap { n, m: n, values: (1..=n).collect() }
    }

    pub fn const_zero(n: usize, m: usize) -> Self {
        PointedMap { n, m, values: vec![0; n] }
    }

    pub fn source_size(&self) -> usize {
        self.n
    }

    pub fn target_size(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.values[k - 1]
        }
    }

    /// `self ∘ other`, defined when `other` lands in the domain of `self`.
    pub fn compose(&self, other: &PointedMap) -> Result<PointedMap> {
        if other.m != self.n {
            return Err(Error::Dimension(format!(
                "cannot compose <{}>→<{}> after <{}>→<{}>",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(PointedMap {
            n: other.n,
            m: self.m,
            values: other.values.iter().map(|&v| self.apply(v)).collect(),
        })
    }

    pub fn is_const_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn is_bijective(&self) -> bool {
        self.n == self.m && self.fiber_sequence()[..self.m].iter().all(|b| b.len() == 1)
    }

    /// Maps with no element sent to the basepoint, i.e. the image of Fin.
    pub fn avoids_basepoint(&self) -> bool {
        self.values.iter().all(|&v| v != 0)
    }

    /// Elements of {1..n} sent to `i`, increasing.
    pub fn fiber(&self, i: usize) -> Vec<usize> {
        (1..=self.n).filter(|&k| self.values[k - 1] == i).collect()
    }

    /// Blocks `[f⁻¹(1) | … | f⁻¹(m) | f⁻¹(0)°]`, empty blocks kept.
    pub fn fiber_sequence(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.m + 1];
        for k in 1..=self.n {
            let v = self.values[k - 1];
            let slot = if v == 0 { self.m } else { v - 1 };
            blocks[slot].push(k);
        }
        blocks
    }

    /// The permutation obtained by reading the fiber sequence left to right.
    pub fn sigma(&self) -> Permutation {
        Permutation { values: self.fiber_sequence().into_iter().flatten().collect() }
    }

    /// Position of this map in the lexicographic enumeration of ⟨n⟩ → ⟨m⟩.
    pub fn rank(&self) -> usize {
        self.values.iter().fold(0, |acc, &v| acc * (self.m + 1) + v)
    }

    pub fn from_rank(n: usize, m: usize, mut rank: usize) -> PointedMap {
        let mut values = vec![0; n];
        for slot in values.iter_mut().rev() {
            *slot = rank % (m + 1);
            rank /= m + 1;
        }
        PointedMap { n, m, values }
    }
}

impl fmt::Display for PointedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>→<{}>{:?}", self.n, self.m, self.values)
    }
}

/// All pointed maps ⟨n⟩ → ⟨m⟩ in lexicographic order of value sequences.
pub fn enumerate_pointed_maps(n: usize, m: usize) -> Vec<PointedMap> {
    let count = (m + 1).pow(n as u32);
    (0..count).map(|r| PointedMap::from_rank(n, m, r)).collect()
}

pub fn fiber_sequence(f: &PointedMap) -> Vec<Vec<usize>> {
    f.fiber_sequence()
}

pub fn sigma_f(f: &PointedMap) -> Permutation {
    f.sigma()
}

/// A permutation of {1..n} listed by its values `[σ(1), …, σ(n)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPermutation")]
pub struct Permutation {
    values: Vec<usize>,
}

#[derive(Deserialize)]
struct RawPermutation {
    values: Vec<usize>,
}

impl TryFrom<RawPermutation> for Permutation {
    type Error = Error;
    fn try_from(raw: RawPermutation) -> Result<Self> {
        Permutation::new(raw.values)
    }
}

impl Permutation {
    pub fn new(values: Vec<usize>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v > n || seen[v] {
                return invalid(format!("{values:?} is not a permutation of 1..{n}"));
            }
            seen[v] = true;
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { values: (1..=n).collect() }
    }

    /// Builds a permutation from 0-based images without validation.
    pub(crate) fn from_zero_based(images: impl IntoIterator<Item = usize>) -> Self {
        Permutation { values: images.into_iter().map(|v| v + 1).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, k: usize) -> usize {
        self.values[k - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| v == i + 1)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), other.len());
        Permutation { values: other.values.iter().map(|&k| self.values[k - 1]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { values: inv }
    }

    /// The permutation `τ` with `seq[τ(l)]` increasing in `l` (stable).
    pub fn sorting<T: Ord>(seq: &[T]) -> Permutation {
        let mut idx: Vec<usize> = (0..seq.len()).collect();
        idx.sort_by(|&a, &b| seq[a].cmp(&seq[b]));
        Permutation::from_zero_based(idx)
    }

    /// All permutations of {1..n} in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (1..=n).collect();
        loop {
            out.push(Permutation { values: current.clone() });
            if !next_permutation(&mut current) {
                break;
            }
        }
        out
    }

    /// As a pointed map ⟨n⟩ → ⟨n⟩.
    pub fn to_pointed(&self) -> PointedMap {
        PointedMap { n: self.len(), m: self.len(), values: self.values.clone() }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A weakly increasing map [m] → [n]; `values[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMonotoneMap")]
pub struct MonotoneMap {
    m: usize,
    n: usize,
    values: Vec<usize>,
}

#[derive(Deserialize)]
struct RawMonotoneMap {
    m: usize,
    n: usize,
    values: Vec<usize>,
}

impl TryFrom<RawMonotoneMap> for MonotoneMap {
    type Error = Error;
    fn try_from(raw: RawMonotoneMap) -> Result<Self> {
        MonotoneMap::new(raw.m, raw.n, raw.values)
    }
}

impl MonotoneMap {
    pub fn new(m: usize, n: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != m + 1 {
            return invalid(format!("monotone map on [{m}] needs {} values", m + 1));
        }
        if values.iter().any(|&v| v > n) || values.windows(2).any(|w| w[0] > w[1]) {
            return invalid(format!("{values:?} is not a monotone map [{m}]→[{n}]"));
        }
        Ok(MonotoneMap { m, n, values })
    }

    pub fn identity(n: usize) -> Self {
        MonotoneMap { m: n, n, values: (0..=n).collect() }
    }

    pub fn constant(m: usize, n: usize, at: usize) -> Self {
        MonotoneMap { m, n, values: vec![at; m + 1] }
    }

    pub fn source_size(&self) -> usize {
        self.m
    }

    pub fn target_size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, i: usize) -> usize {
        self.values[i]
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_injective(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        self.values[0] == 0
            && self.values[self.m] == self.n
            && self.values.windows(2).all(|w| w[1] - w[0] <= 1)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MonotoneMap) -> Result<MonotoneMap> {
        if other.n != self.m {
            return Err(Error::Dimension(format!(
                "cannot compose [{}]→[{}] after [{}]→[{}]",
                self.m, self.n, other.m, other.n
            )));
        }
        Ok(MonotoneMap {
            m: other.m,
            n: self.n,
            values: other.values.iter().map(|&v| self.values[v]).collect(),
        })
    }

    /// Index in the lexicographic enumeration of monotone [m] → [n].
    pub fn rank(&self) -> usize {
        let all = enumerate_monotone(self.m, self.n);
        all.binary_search(self).expect("enumeration is complete")
    }
}

impl fmt::Display for MonotoneMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]→[{}]{:?}", self.m, self.n, self.values)
    }
}

/// All monotone maps [m] → [n] in lexicographic order.
pub fn enumerate_monotone(m: usize, n: usize) -> Vec<MonotoneMap> {
    let mut out = Vec::new();
    let mut current = vec![0usize; m + 1];
    fn rec(pos: usize, lo: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<MonotoneMap>) {
        if pos == m + 1 {
            out.push(MonotoneMap { m, n, values: cur.clone() });
            return;
        }
        for v in lo..=n {
            cur[pos] = v;
            rec(pos + 1, v, n, m, cur, out);
        }
    }
    rec(0, 0, n, m, &mut current, &mut out);
    out
}

/// The functor ι: Δ → Fin_*^op on a monotone map g: [m] → [n], giving ⟨n⟩ → ⟨m⟩.
pub fn iota(g: &MonotoneMap) -> PointedMap {
    let mut values = vec![0; g.n];
    let groups: Vec<(usize, usize)> = g
        .values
        .iter()
        .fold(Vec::<(usize, usize)>::new(), |mut acc, &v| {
            match acc.last_mut() {
                Some((last, count)) if *last == v => *count += 1,
                _ => acc.push((v, 1)),
            }
            acc
        });
    let mut partial = 0;
    for r in 0..groups.len().saturating_sub(1) {
        partial += groups[r].1;
        let (lo, hi) = (groups[r].0, groups[r + 1].0);
        for slot in &mut values[lo..hi] {
            *slot = partial;
        }
    }
    PointedMap { n: g.n, m: g.m, values }
}

/// Membership of a pointed map in the image of ι.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IotaPreimage {
    /// The constant map; every constant monotone map is a preimage.
    Const0,
    /// A non-constant map with its unique monotone preimage.
    Unique(MonotoneMap),
    Outside,
}

impl IotaPreimage {
    pub fn is_in_image(&self) -> bool {
        !matches!(self, IotaPreimage::Outside)
    }
}

/// Decides whether `f: ⟨n⟩ → ⟨m⟩` lies in the image of ι, reconstructing
/// the preimage `[m] → [n]` when it is unique.
pub fn in_iota_image(f: &PointedMap) -> IotaPreimage {
    let blocks = f.fiber_sequence();
    let concat: Vec<usize> = blocks[..f.m].iter().flatten().copied().collect();
    if concat.is_empty() {
        return IotaPreimage::Const0;
    }
    if concat.windows(2).any(|w| w[1] != w[0] + 1) {
        return IotaPreimage::Outside;
    }
    let hit: Vec<usize> = (1..=f.m).filter(|&i| !blocks[i - 1].is_empty()).collect();
    let mut values = Vec::with_capacity(f.m + 1);
    let mut level = blocks[hit[0] - 1][0] - 1;
    let mut prev = 0;
    for &s in &hit {
        values.extend(std::iter::repeat_n(level, s - prev));
        level = *blocks[s - 1].last().expect("hit fibers are nonempty");
        prev = s;
    }
    values.extend(std::iter::repeat_n(level, f.m + 1 - prev));
    let g = MonotoneMap { m: f.m, n: f.n, values };
    debug_assert_eq!(&iota(&g), f);
    IotaPreimage::Unique(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(enumerate_pointed_maps(0, 3).len(), 1);
        assert_eq!(enumerate_pointed_maps(3, 0).len(), 1);
        assert_eq!(enumerate_pointed_maps(2, 1).len(), 4);
        assert_eq!(enumerate_monotone(0, 4).len(), 5);
        assert_eq!(enumerate_monotone(1, 1).len(), 3);
        assert_eq!(enumerate_monotone(2, 2).len(), 10);
    }

    #[test]
    fn rank_roundtrip() {
        for (r, f) in enumerate_pointed_maps(3, 2).iter().enumerate() {
            assert_eq!(f.rank(), r);
        }
    }

    #[test]
    fn fiber_examples() {
        let f = PointedMap::new(2, 1, vec![0, 1]).unwrap();
        assert_eq!(f.fiber_sequence(), vec![vec![2], vec![1]]);
        assert_eq!(f.sigma().values(), &[2, 1]);
        let c = PointedMap::const_zero(3, 2);
        assert_eq!(c.fiber_sequence(), vec![vec![], vec![], vec![1, 2, 3]]);
        assert!(c.sigma().is_identity());
        assert_eq!(PointedMap::identity(2).fiber_sequence(), vec![vec![1], vec![2], vec![]]);
    }

    #[test]
    fn iota_examples() {
        let d1 = MonotoneMap::new(1, 2, vec![0, 2]).unwrap();
        assert_eq!(iota(&d1).values(), &[1, 1]);
        for n in 0..=4 {
            assert_eq!(iota(&MonotoneMap::identity(n)), PointedMap::identity(n));
        }
        assert!(iota(&MonotoneMap::constant(2, 3, 1)).is_const_zero());
        let swap = PointedMap::new(2, 2, vec![2, 1]).unwrap();
        assert_eq!(in_iota_image(&swap), IotaPreimage::Outside);
    }
}
