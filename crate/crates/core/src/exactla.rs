//! Exact linear algebra over ℚ and prime fields: sparse matrices, two
//! elimination backends, and bounded cochain complexes.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sset::FinSimplicialSet;

/// Which field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FieldDesc {
    Rationals,
    Prime(u64),
}

impl From<FieldDesc> for String {
    fn from(f: FieldDesc) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FieldDesc {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDesc::Rationals => write!(f, "q"),
            FieldDesc::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldDesc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "Q" | "q" | "QQ" | "rationals") {
            return Ok(FieldDesc::Rationals);
        }
        let digits = t.trim_start_matches(['F', 'f', 'p', '_', '=', ':']);
        match digits.parse::<u64>() {
            Ok(p) => PrimeField::new(p).map(|_| FieldDesc::Prime(p)),
            Err(_) => invalid(format!("unknown field {s:?}; expected q or fp:<p>")),
        }
    }
}

pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Eq + std::hash::Hash + Send + Sync;

    fn descriptor(&self) -> FieldDesc;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;
    /// A small random element; zero with probability about `1 - density`.
    fn random(&self, rng: &mut ChaCha8Rng, density: f64) -> Self::Elem;
    /// Rank of a dense matrix by elimination that never divides by a pivot
    /// (Bareiss over ℤ for ℚ, cross-multiplication for `F_p`).
    fn fraction_free_rank(&self, rows: &[Vec<Self::Elem>]) -> usize;
    /// Whether `n` is invertible in the field.
    fn invertible_integer(&self, n: u64) -> bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn descriptor(&self) -> FieldDesc {
        FieldDesc::Rationals
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn format(&self, a: &BigRational) -> String {
        format!("{}/{}", a.numer(), a.denom())
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        let bad = || Error::Invalid(format!("{s:?} is not a rational number"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    }
    fn random(&self, rng: &mut ChaCha8Rng, density: f64) -> BigRational {
        if !rng.gen_bool(density.clamp(0.0, 1.0)) {
            return BigRational::zero();
        }
        let n: i64 = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let d: i64 = rng.gen_range(1..=4);
        BigRational::new(n.into(), d.into())
    }
    fn fraction_free_rank(&self, rows: &[Vec<BigRational>]) -> usize {
        let mut m: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                let l = r.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                r.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        bareiss_rank(&mut m)
    }
    fn invertible_integer(&self, n: u64) -> bool {
        n != 0
    }
}

fn bareiss_rank(m: &mut [Vec<BigInt>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in (rank + 1)..rows {
            for k in (c + 1)..cols {
                let v = &m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k];
                m[r][k] = v / &prev;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
    }
    rank
}

/// `F_p` for a prime `p < 2^32`, elements as least residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        let prime = (2..(1 << 32)).contains(&p) && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if !prime {
            return invalid(format!("{p} is not a prime below 2^32"));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % self.p;
            }
            a = a * a % self.p;
            e >>= 1;
        }
        r
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn descriptor(&self) -> FieldDesc {
        FieldDesc::Prime(self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0);
        self.pow(*a, self.p - 2)
    }
    fn format(&self, a: &u64) -> String {
        a.to_string()
    }
    fn parse(&self, s: &str) -> Result<u64> {
        let v: i64 = s.trim().parse().map_err(|_| Error::Invalid(format!("{s:?} is not an integer")))?;
        Ok(self.from_i64(v))
    }
    fn random(&self, rng: &mut ChaCha8Rng, density: f64) -> u64 {
        if !rng.gen_bool(density.clamp(0.0, 1.0)) {
            return 0;
        }
        rng.gen_range(1..self.p)
    }
    fn fraction_free_rank(&self, rows: &[Vec<u64>]) -> usize {
        let mut m = rows.to_vec();
        let nrows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..nrows).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, piv);
            for r in (rank + 1)..nrows {
                let (a, b) = (m[rank][c], m[r][c]);
                if b == 0 {
                    continue;
                }
                for k in c..cols {
                    m[r][k] = self.sub(&self.mul(&a, &m[r][k]), &self.mul(&b, &m[rank][k]));
                }
            }
            rank += 1;
        }
        rank
    }
    fn invertible_integer(&self, n: u64) -> bool {
        !n.is_multiple_of(self.p)
    }
}

/// Elimination backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Gaussian,
    FractionFree,
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Backend::Gaussian),
            "fraction-free" => Ok(Backend::FractionFree),
            _ => invalid(format!("unknown elimination backend {s:?}")),
        }
    }
}

const SPARSE_THRESHOLD: usize = 20_000;
const LOOKAHEAD: usize = 8;

pub(crate) type SparseRow<E> = Vec<(usize, E)>;

/// A sparse matrix stored by rows; every stored entry is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct FinMatrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<SparseRow<F::Elem>>,
}

fn axpy<F: Field>(field: &F, x: &[(usize, F::Elem)], a: &F::Elem, y: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
    // x + a·y
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i].clone());
            i += 1;
        } else if i == x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, field.mul(a, &y[j].1)));
            j += 1;
        } else {
            let v = field.add(&x[i].1, &field.mul(a, &y[j].1));
            if !field.is_zero(&v) {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built by inserting rows one at a time; pivot rows are
/// monic and indexed by their leading column.
pub(crate) struct Echelon<F: Field> {
    field: F,
    pivots: BTreeMap<usize, SparseRow<F::Elem>>,
}

impl<F: Field> Echelon<F> {
    pub(crate) fn new(field: F) -> Self {
        Echelon { field, pivots: BTreeMap::new() }
    }

    /// Reduces `row` by the leading terms of the pivots; returns the remainder.
    pub(crate) fn reduce(&self, mut row: SparseRow<F::Elem>) -> SparseRow<F::Elem> {
        let mut done = 0;
        while done < row.len() {
            let (c, v) = row[done].clone();
            match self.pivots.get(&c) {
                Some(p) => {
                    let a = self.field.neg(&v);
                    let (head, tail) = row.split_at(done);
                    let mut rest = axpy(&self.field, tail, &a, p);
                    let mut merged = head.to_vec();
                    merged.append(&mut rest);
                    row = merged;
                }
                None => done += 1,
            }
        }
        row
    }

    /// Inserts a row; returns whether it was independent.
    pub(crate) fn insert(&mut self, row: SparseRow<F::Elem>) -> bool {
        let mut r = self.reduce_leading(row);
        if r.is_empty() {
            return false;
        }
        let inv = self.field.inv(&r[0].1);
        for e in r.iter_mut() {
            e.1 = self.field.mul(&e.1, &inv);
        }
        self.pivots.insert(r[0].0, r);
        true
    }

    /// Reduces only until the leading column is free of pivots.
    fn reduce_leading(&self, mut row: SparseRow<F::Elem>) -> SparseRow<F::Elem> {
        while let Some((c, v)) = row.first().cloned() {
            match self.pivots.get(&c) {
                Some(p) => row = axpy(&self.field, &row, &self.field.neg(&v), p),
                None => break,
            }
        }
        row
    }

    pub(crate) fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Fully reduced rows in increasing pivot order.
    fn reduced(mut self) -> Vec<SparseRow<F::Elem>> {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for c in cols {
            let row = self.pivots.remove(&c).unwrap();
            let head = row[0].clone();
            let tail = self.reduce(row[1..].to_vec());
            let mut full = vec![head];
            full.extend(tail);
            self.pivots.insert(c, full);
        }
        self.pivots.into_values().collect()
    }
}

/// Rank by sparse elimination, pivoting on the column with the fewest
/// entries and, within it, the shortest row.
fn markowitz_pivots<F: Field>(field: &F, cols: usize, mut rows: Vec<SparseRow<F::Elem>>) -> Vec<(usize, usize)> {
    let contains = |row: &SparseRow<F::Elem>, c: usize| row.binary_search_by_key(&c, |e| e.0).ok();
    let mut alive = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); cols];
    let mut count = vec![0usize; cols];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c].push(i as u32);
            count[*c] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..cols).filter(|&c| count[c] > 0).map(|c| Reverse((count[c], c))).collect();
    let mut done = vec![false; cols];
    let mut pivots = Vec::new();
    let members_of = |c: usize, col_rows: &mut Vec<Vec<u32>>, rows: &Vec<SparseRow<F::Elem>>, alive: &Vec<bool>| {
        let members = &mut col_rows[c];
        members.sort_unstable();
        members.dedup();
        members.retain(|&i| alive[i as usize] && contains(&rows[i as usize], c).is_some());
        members.iter().map(|&i| (rows[i as usize].len(), i)).min()
    };
    loop {
        let mut candidates = Vec::new();
        while candidates.len() < LOOKAHEAD {
            let Some(Reverse((n, c))) = heap.pop() else { break };
            if done[c] || count[c] != n || n == 0 || candidates.iter().any(|&(_, c2, _)| c2 == c) {
                continue;
            }
            if let Some((len, row)) = members_of(c, &mut col_rows, &rows, &alive) {
                candidates.push(((n - 1) * (len - 1), c, row));
            }
        }
        let Some(&(_, c, pivot)) = candidates.iter().min() else { break };
        for &(_, c2, _) in &candidates {
            if c2 != c {
                heap.push(Reverse((count[c2], c2)));
            }
        }
        let members = std::mem::take(&mut col_rows[c]);
        done[c] = true;
        pivots.push((pivot as usize, c));
        alive[pivot as usize] = false;
        let p = std::mem::take(&mut rows[pivot as usize]);
        let inv = field.inv(&p[contains(&p, c).unwrap()].1);
        for &(j, _) in &p {
            count[j] -= 1;
        }
        for &i in &members {
            if i == pivot {
                continue;
            }
            let old = std::mem::take(&mut rows[i as usize]);
            let a = field.neg(&field.mul(&old[contains(&old, c).unwrap()].1, &inv));
            let new = axpy(field, &old, &a, &p);
            for &(j, _) in &p {
                let before = contains(&old, j).is_some();
                let after = contains(&new, j).is_some();
                match (before, after) {
                    (true, false) => count[j] -= 1,
                    (false, true) => {
                        count[j] += 1;
                        col_rows[j].push(i);
                    }
                    _ => continue,
                }
                if !done[j] {
                    heap.push(Reverse((count[j], j)));
                }
            }
            rows[i as usize] = new;
        }
        for &(j, _) in &p {
            if !done[j] && count[j] > 0 {
                heap.push(Reverse((count[j], j)));
            }
        }
    }
    pivots
}

impl<F: Field> FinMatrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        FinMatrix { field: field.clone(), rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i, field.one())]).collect();
        FinMatrix { field: field.clone(), rows: n, cols: n, data }
    }

    /// Builds from `(row, col, value)` triplets, summing repeated positions.
    pub fn from_triplets(field: &F, rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, F::Elem)>) -> Result<Self> {
        let mut entries: Vec<(usize, usize, F::Elem)> = entries.into_iter().collect();
        if let Some((r, c, _)) = entries.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::Dimension(format!("entry ({r}, {c}) outside a {rows}×{cols} matrix")));
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut data: Vec<SparseRow<F::Elem>> = vec![Vec::new(); rows];
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            let row = &mut data[r];
            if last == Some((r, c)) {
                let slot = &mut row.last_mut().unwrap().1;
                *slot = field.add(slot, &v);
            } else {
                row.push((c, v));
            }
            last = Some((r, c));
        }
        for row in &mut data {
            row.retain(|(_, v)| !field.is_zero(v));
        }
        Ok(FinMatrix { field: field.clone(), rows, cols, data })
    }

    pub fn from_dense(field: &F, rows: &[Vec<F::Elem>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged dense matrix".into()));
        }
        let triplets = rows.iter().enumerate().flat_map(|(i, r)| r.iter().enumerate().map(move |(j, v)| (i, j, v.clone())));
        FinMatrix::from_triplets(field, rows.len(), cols, triplets)
    }

    pub(crate) fn from_rows(field: &F, cols: usize, data: Vec<SparseRow<F::Elem>>) -> Self {
        debug_assert!(data.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0) && r.iter().all(|e| e.0 < cols)));
        FinMatrix { field: field.clone(), rows: data.len(), cols, data }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, F::Elem)] {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> F::Elem {
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn to_dense(&self) -> Vec<Vec<F::Elem>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    /// Entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, F::Elem)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v.clone()))).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data: Vec<SparseRow<F::Elem>> = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                data[*j].push((i, v.clone()));
            }
        }
        FinMatrix { field: self.field.clone(), rows: self.cols, cols: self.rows, data }
    }

    /// `self · other`.
    pub fn mul(&self, other: &FinMatrix<F>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = Vec::new();
                for (k, a) in r {
                    acc = axpy(&self.field, &acc, a, &other.data[*k]);
                }
                acc
            })
            .collect();
        Ok(FinMatrix { field: self.field.clone(), rows: self.rows, cols: other.cols, data })
    }

    pub fn add(&self, other: &FinMatrix<F>) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("cannot add matrices of different shapes".into()));
        }
        let one = self.field.one();
        let data = self.data.iter().zip(&other.data).map(|(x, y)| axpy(&self.field, x, &one, y)).collect();
        Ok(FinMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, a: &F::Elem) -> Self {
        if self.field.is_zero(a) {
            return FinMatrix::zeros(&self.field, self.rows, self.cols);
        }
        let data = self.data.iter().map(|r| r.iter().map(|(j, v)| (*j, self.field.mul(a, v))).collect()).collect();
        FinMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// `M·v` for a dense vector.
    pub fn apply(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok(self
            .data
            .iter()
            .map(|r| r.iter().fold(self.field.zero(), |s, (j, a)| self.field.add(&s, &self.field.mul(a, &v[*j]))))
            .collect())
    }

    fn echelon(&self) -> Echelon<F> {
        let mut e = Echelon::new(self.field.clone());
        for r in &self.data {
            e.insert(r.clone());
        }
        e
    }

    /// Pivot positions `(row, col)` of a sparse elimination. The pivot rows
    /// are independent, as are the pivot columns, and both span.
    pub fn sparse_pivots(&self) -> Vec<(usize, usize)> {
        markowitz_pivots(&self.field, self.cols, self.data.clone())
    }

    /// Keeps the listed rows, in order.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let data = keep.iter().map(|&i| self.data[i].clone()).collect();
        FinMatrix { field: self.field.clone(), rows: keep.len(), cols: self.cols, data }
    }

    pub fn rank(&self) -> usize {
        self.rank_with(Backend::Gaussian)
    }

    pub fn rank_with(&self, backend: Backend) -> usize {
        match backend {
            Backend::Gaussian => {
                if self.nnz() > SPARSE_THRESHOLD {
                    return self.sparse_pivots().len();
                }
                // Eliminate along the shorter side.
                if self.cols < self.rows {
                    self.transpose().echelon().rank()
                } else {
                    self.echelon().rank()
                }
            }
            Backend::FractionFree => self.field.fraction_free_rank(&self.to_dense()),
        }
    }

    /// Reduced row echelon form: pivot columns and the nonzero reduced rows.
    pub fn rref(&self) -> (Vec<usize>, FinMatrix<F>) {
        let rows = self.echelon().reduced();
        let pivots = rows.iter().map(|r| r[0].0).collect();
        (pivots, FinMatrix::from_rows(&self.field, self.cols, rows))
    }

    /// Canonical kernel basis: one vector per free column, read off the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let (pivots, r) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| pivots.binary_search(c).is_err()).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.field.zero(); self.cols];
                v[f] = self.field.one();
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = self.field.neg(&r.get(k, f));
                }
                v
            })
            .collect()
    }

    /// Canonical basis of the column space: the reduced rows of `Mᵀ`.
    pub fn image_basis(&self) -> Vec<Vec<F::Elem>> {
        let (_, r) = self.transpose().rref();
        r.to_dense()
    }

    /// A solution of `M x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        // Augment and reduce; an inconsistent system has a pivot in the last column.
        let data = self
            .data
            .iter()
            .zip(b)
            .map(|(r, v)| {
                let mut r = r.clone();
                if !self.field.is_zero(v) {
                    r.push((self.cols, v.clone()));
                }
                r
            })
            .collect();
        let aug = FinMatrix::from_rows(&self.field, self.cols + 1, data);
        let (pivots, r) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r.get(k, self.cols);
        }
        Ok(Some(x))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| serde_json::json!([i, j, self.field.format(&v)]))
            .collect();
        serde_json::json!({
            "field": self.field.descriptor().to_string(),
            "rows": self.rows,
            "cols": self.cols,
            "entries": entries,
        })
    }

    pub fn from_json(field: &F, value: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            field: String,
            rows: usize,
            cols: usize,
            entries: Vec<(usize, usize, String)>,
        }
        let raw: Raw = serde_json::from_value(value.clone())?;
        if raw.field.parse::<FieldDesc>()? != field.descriptor() {
            return Err(Error::FieldMismatch(format!("matrix over {} read as {}", raw.field, field.descriptor())));
        }
        let entries = raw
            .entries
            .iter()
            .map(|(i, j, s)| Ok((*i, *j, field.parse(s)?)))
            .collect::<Result<Vec<_>>>()?;
        FinMatrix::from_triplets(field, raw.rows, raw.cols, entries)
    }

    /// `row,col,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for (i, j, v) in self.triplets() {
            out.push_str(&format!("{i},{j},{}\n", self.field.format(&v)));
        }
        out
    }
}

/// A seeded random sparse matrix.
pub fn random_sparse<F: Field>(field: &F, rows: usize, cols: usize, density: f64, rng: &mut ChaCha8Rng) -> FinMatrix<F> {
    let data = (0..rows)
        .map(|_| {
            (0..cols)
                .filter_map(|j| {
                    let v = field.random(rng, density);
                    (!field.is_zero(&v)).then_some((j, v))
                })
                .collect()
        })
        .collect();
    FinMatrix::from_rows(field, cols, data)
}

/// A bounded cochain complex `C^lo → … → C^hi` with `d^k: C^k → C^{k+1}`.
#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    lo: i64,
    dims: Vec<usize>,
    diffs: Vec<FinMatrix<F>>,
}

impl<F: Field> ChainComplex<F> {
    /// `diffs[k]` is `d^{lo+k}`; rejects shape mismatches and `d² ≠ 0`.
    pub fn new(lo: i64, dims: Vec<usize>, diffs: Vec<FinMatrix<F>>) -> Result<Self> {
        if dims.is_empty() || diffs.len() + 1 != dims.len() {
            return Err(Error::Dimension(format!("{} terms need {} differentials", dims.len(), dims.len().saturating_sub(1))));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.cols() != dims[k] || d.rows() != dims[k + 1] {
                return Err(Error::Dimension(format!(
                    "d^{} is {}×{}, expected {}×{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for k in 1..diffs.len() {
            if !diffs[k].mul(&diffs[k - 1])?.is_zero() {
                let degree = lo + k as i64 - 1;
                return Err(Error::NotAComplex { degree: degree.max(0) as usize });
            }
        }
        Ok(ChainComplex { lo, dims, diffs })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn differential(&self, k: i64) -> Option<&FinMatrix<F>> {
        usize::try_from(k - self.lo).ok().and_then(|i| self.diffs.get(i))
    }

    /// `dim H^k = dim C^k − rank d^k − rank d^{k−1}` in every degree.
    pub fn cohomology_dims(&self, backend: Backend) -> Vec<(i64, usize)> {
        let ranks: Vec<usize> = self.diffs.iter().map(|d| d.rank_with(backend)).collect();
        (0..self.dims.len())
            .map(|k| {
                let out = ranks.get(k).copied().unwrap_or(0);
                let inc = if k > 0 { ranks[k - 1] } else { 0 };
                (self.lo + k as i64, self.dims[k] - out - inc)
            })
            .collect()
    }
}

/// Normalized simplicial cochains of a finite simplicial set:
/// nondegenerate simplices, `δ = Σ (−1)^i d_i^*`.
pub fn simplicial_cochains<F: Field>(field: &F, x: &FinSimplicialSet) -> Result<ChainComplex<F>> {
    let top = x.dimension();
    let dims: Vec<usize> = (0..=top).map(|d| x.generators(d).len()).collect();
    let mut diffs = Vec::new();
    for d in 0..top {
        let mut entries = Vec::new();
        for (k, g) in x.generators(d + 1).iter().enumerate() {
            for (i, face) in g.faces.iter().enumerate() {
                if !face.is_degenerate() {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    entries.push((k, face.core(), field.from_i64(sign)));
                }
            }
        }
        diffs.push(FinMatrix::from_triplets(field, dims[d + 1], dims[d], entries)?);
    }
    ChainComplex::new(0, dims, diffs)
}

/// Checks that `value` reduces to canonical form.
pub fn is_canonical_rational(value: &BigRational) -> bool {
    let g = value.numer().gcd(value.denom());
    value.denom().is_positive() && (g.is_one() || value.numer().is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn identity_and_zero() {
        let q = Rationals;
        assert_eq!(FinMatrix::identity(&q, 5).rank(), 5);
        let z = FinMatrix::zeros(&q, 3, 4);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().len(), 4);
    }

    #[test]
    fn kernel_image_solve() {
        let f = PrimeField::new(101).unwrap();
        let m = FinMatrix::from_dense(&f, &[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).unwrap().iter().all(|v| *v == 0));
        assert_eq!(m.image_basis().len(), 2);
        let x = m.solve(&[1, 2, 0]).unwrap().unwrap();
        assert_eq!(m.apply(&x).unwrap(), vec![1, 2, 0]);
        assert!(m.solve(&[1, 0, 0]).unwrap().is_none());
    }

    #[test]
    fn backends_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = PrimeField::new(101).unwrap();
        for _ in 0..20 {
            let m = random_sparse(&f, 20, 20, 0.2, &mut rng);
            assert_eq!(m.rank_with(Backend::Gaussian), m.rank_with(Backend::FractionFree));
        }
        for _ in 0..10 {
            let m = random_sparse(&Rationals, 12, 15, 0.3, &mut rng);
            assert_eq!(m.rank_with(Backend::Gaussian), m.rank_with(Backend::FractionFree));
        }
    }

    #[test]
    fn sparse_pivots_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let f = PrimeField::new(101).unwrap();
        for (rows, cols, inner) in [(30, 40, 10), (50, 20, 20), (25, 25, 25)] {
            let m = random_sparse(&f, rows, inner, 0.15, &mut rng).mul(&random_sparse(&f, inner, cols, 0.15, &mut rng)).unwrap();
            let pivots = m.sparse_pivots();
            let rank = m.rank_with(Backend::FractionFree);
            assert_eq!(pivots.len(), rank);
            let rows_kept: Vec<usize> = pivots.iter().map(|p| p.0).collect();
            assert_eq!(m.select_rows(&rows_kept).rank(), rank);
            let cols_kept: Vec<usize> = pivots.iter().map(|p| p.1).collect();
            assert_eq!(m.transpose().select_rows(&cols_kept).rank(), rank);
        }
    }

    #[test]
    fn rejects_non_complex() {
        let q = Rationals;
        let one = FinMatrix::identity(&q, 1);
        assert!(matches!(
            ChainComplex::new(0, vec![1, 1, 1], vec![one.clone(), one]),
            Err(Error::NotAComplex { degree: 0 })
        ));
    }

    #[test]
    fn identity_differential_is_acyclic() {
        let q = Rationals;
        let c = ChainComplex::new(0, vec![1, 1], vec![FinMatrix::identity(&q, 1)]).unwrap();
        assert_eq!(c.cohomology_dims(Backend::Gaussian), vec![(0, 0), (1, 0)]);
        let z = ChainComplex::new(0, vec![2, 3], vec![FinMatrix::zeros(&q, 3, 2)]).unwrap();
        assert_eq!(z.cohomology_dims(Backend::FractionFree), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn circle_cohomology() {
        let x = FinSimplicialSet::boundary(2).unwrap();
        let c = simplicial_cochains(&Rationals, &x).unwrap();
        assert_eq!(c.cohomology_dims(Backend::Gaussian), vec![(0, 1), (1, 1)]);
        let d = FinSimplicialSet::standard(3);
        let c = simplicial_cochains(&PrimeField::new(101).unwrap(), &d).unwrap();
        let dims: Vec<usize> = c.cohomology_dims(Backend::Gaussian).into_iter().map(|(_, h)| h).collect();
        assert_eq!(dims, vec![1, 0, 0, 0]);
    }

    #[test]
    fn serialization_roundtrip() {
        let q = Rationals;
        let m = FinMatrix::from_dense(&q, &[vec![q.parse("1/2").unwrap(), q.zero()], vec![q.parse("-3").unwrap(), q.parse("4/6").unwrap()]]).unwrap();
        let j = m.to_json();
        assert_eq!(j["entries"][2][2], "2/3");
        assert_eq!(FinMatrix::from_json(&q, &j).unwrap(), m);
        assert!(FinMatrix::from_json(&PrimeField::new(5).unwrap(), &j).is_err());
        assert!(m.to_csv().contains("1,0,-3/1"));
        assert!(is_canonical_rational(&m.get(1, 1)));
    }

    #[test]
    fn fields_parse() {
        assert_eq!("Q".parse::<FieldDesc>().unwrap(), FieldDesc::Rationals);
        assert_eq!("F101".parse::<FieldDesc>().unwrap(), FieldDesc::Prime(101));
        assert_eq!("fp:101".parse::<FieldDesc>().unwrap(), FieldDesc::Prime(101));
        assert_eq!(FieldDesc::Prime(7).to_string().parse::<FieldDesc>().unwrap(), FieldDesc::Prime(7));
        assert!("F100".parse::<FieldDesc>().is_err());
        assert_eq!(serde_json::to_string(&FieldDesc::Prime(5)).unwrap(), "\"fp:5\"");
    }
}
