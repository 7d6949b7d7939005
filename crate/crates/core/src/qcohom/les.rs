//! The long exact sequence in `Ext(−, F)` attached to
//! `0 → F_Ass → η_!k → k → 0` on `Δ≤N`.

use serde::{Deserialize, Serialize};

use super::cover::Resolution;
use super::functor::{constant, eta_shriek, f_ass_delta, LinearFunctor};
use crate::category::{opposite, simplex_morphism, Category, FinCategory};
use crate::error::{Error, Result};
use crate::exactla::{ChainComplex, Field, FinMatrix};
use crate::pointed::MonotoneMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotReport {
    /// `const`, `eta` or `f_ass`: the first argument of `Ext^degree(−, F)`.
    pub slot: String,
    pub degree: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    /// `dim ker` of the outgoing map on cohomology.
    pub kernel_out: usize,
    /// Rank of the composite through this slot; zero in a complex.
    pub composite_rank: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesReport {
    pub truncation: usize,
    pub top: usize,
    pub field: String,
    pub pointwise_exact: bool,
    pub natural: bool,
    /// `dim Ext^k(η_!k, F)` for `k ≤ top`.
    pub eta_ext: Vec<usize>,
    pub f_at_zero: usize,
    pub eta_projective: bool,
    pub slots: Vec<SlotReport>,
    pub failures: Vec<String>,
}

impl LesReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `e_j ↦ ε_{j−1} − ε_j`, `k^n → k^{n+1}`.
fn inclusion<F: Field>(field: &F, n: usize) -> FinMatrix<F> {
    let entries = (1..=n).flat_map(|j| [(j - 1, j - 1, field.one()), (j, j - 1, field.neg(&field.one()))]);
    FinMatrix::from_triplets(field, n + 1, n, entries).expect("in range")
}

/// `ε_i ↦ 1`, `k^{n+1} → k`.
fn augmentation<F: Field>(field: &F, n: usize) -> FinMatrix<F> {
    FinMatrix::from_triplets(field, 1, n + 1, (0..=n).map(|i| (0, i, field.one()))).expect("in range")
}

/// A matrix `L` with `L·m = I` for injective `m`.
fn left_inverse<F: Field>(m: &FinMatrix<F>) -> Result<FinMatrix<F>> {
    let field = m.field();
    let mt = m.transpose();
    let mut rows = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut e = vec![field.zero(); m.cols()];
        e[j] = field.one();
        rows.push(mt.solve(&e)?.ok_or_else(|| Error::Invalid("map is not injective".into()))?);
    }
    FinMatrix::from_triplets(field, m.cols(), m.rows(), rows.into_iter().enumerate().flat_map(|(i, r)| r.into_iter().enumerate().map(move |(j, v)| (i, j, v))))
}

/// A matrix `R` with `m·R = I` for surjective `m`.
fn right_inverse<F: Field>(m: &FinMatrix<F>) -> Result<FinMatrix<F>> {
    Ok(left_inverse(&m.transpose())?.transpose())
}

fn block_diagonal<F: Field>(field: &F, blocks: &[FinMatrix<F>]) -> FinMatrix<F> {
    let (rows, cols) = blocks.iter().fold((0, 0), |(r, c), b| (r + b.rows(), c + b.cols()));
    let mut entries = Vec::new();
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        entries.extend(b.triplets().into_iter().map(|(i, j, v)| (r0 + i, c0 + j, v)));
        r0 += b.rows();
        c0 += b.cols();
    }
    FinMatrix::from_triplets(field, rows, cols, entries).expect("in range")
}

fn rank_of<F: Field>(field: &F, cols: usize, vectors: &[Vec<F::Elem>]) -> usize {
    let entries = vectors.iter().enumerate().flat_map(|(i, v)| v.iter().enumerate().map(move |(j, c)| (i, j, c.clone())));
    FinMatrix::from_triplets(field, vectors.len(), cols, entries).expect("in range").rank()
}

/// Cocycles and coboundaries of one term.
struct Term<E> {
    cocycles: Vec<Vec<E>>,
    boundaries: Vec<Vec<E>>,
    dim: usize,
}

impl<E> Term<E> {
    fn cohomology(&self) -> usize {
        self.cocycles.len() - self.boundaries.len()
    }
}

fn terms<F: Field>(c: &ChainComplex<F>, field: &F, count: usize) -> Vec<Term<F::Elem>> {
    (0..count)
        .map(|k| {
            let dim = c.dims()[k];
            let cocycles = match c.differential(k as i64) {
                Some(d) => d.kernel_basis(),
                None => (0..dim).map(|i| (0..dim).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect(),
            };
            let boundaries = if k == 0 { vec![] } else { c.differential(k as i64 - 1).unwrap().image_basis() };
            Term { cocycles, boundaries, dim }
        })
        .collect()
}

/// Rank of the map induced on cohomology by `u` from `x` to `y`.
fn induced_rank<F: Field>(field: &F, u: &FinMatrix<F>, x: &Term<F::Elem>, y: &Term<F::Elem>) -> usize {
    let mut vectors: Vec<Vec<F::Elem>> = x.cocycles.iter().map(|z| u.apply(z).expect("shapes")).collect();
    vectors.extend(y.boundaries.iter().cloned());
    rank_of(field, y.dim, &vectors) - y.boundaries.len()
}

/// Checks the sequence for `F` on `Δ≤N` through `Ext^top`.
pub fn les_check_ass<F: Field>(cat: &FinCategory, f: &LinearFunctor<F>, top: usize) -> Result<LesReport> {
    let field = f.field();
    let n_max = cat.num_objects() - 1;
    let a = f_ass_delta(cat, field)?;
    let b = eta_shriek(cat, field)?;
    let k = constant(cat, field, 1)?;
    let mut failures = Vec::new();

    let inc: Vec<FinMatrix<F>> = (0..=n_max).map(|n| inclusion(field, n)).collect();
    let aug: Vec<FinMatrix<F>> = (0..=n_max).map(|n| augmentation(field, n)).collect();
    let mut pointwise_exact = true;
    for n in 0..=n_max {
        let composite_zero = aug[n].mul(&inc[n])?.is_zero();
        if !composite_zero || inc[n].rank() != n || aug[n].rank() != 1 {
            pointwise_exact = false;
            failures.push(format!("0 → F_Ass([{n}]) → η_!k([{n}]) → k → 0 is not exact"));
        }
    }
    let mut natural = true;
    for t in 0..cat.num_morphisms() {
        let (x, y) = (cat.source(t), cat.target(t));
        if b.map(t).mul(&inc[x])? != inc[y].mul(a.map(t))? || k.map(t).mul(&aug[x])? != aug[y].mul(b.map(t))? {
            natural = false;
            failures.push(format!("the sequence is not natural along {}", cat.morphism_label(t)));
        }
    }

    // Ext(X, F) = Ext_{Δ^op}(DF, DX), functorial in X through transposes.
    let op = opposite(cat);
    let df = f.dual(cat, &op);
    let res = Resolution::new(&op, &df, top + 2)?;
    res.check_exact(&op, &df)?;
    let complex = |x: &LinearFunctor<F>| res.hom_complex(&op, &x.dual(cat, &op));
    let (ck, cb, ca) = (complex(&k)?, complex(&b)?, complex(&a)?);
    let per_term = |level: usize, pick: &dyn Fn(usize) -> FinMatrix<F>| -> FinMatrix<F> {
        block_diagonal(field, &res.generators(level).iter().map(|&x| pick(x)).collect::<Vec<_>>())
    };
    let levels = top + 2;
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut delta = Vec::new();
    let sections: Vec<FinMatrix<F>> = inc.iter().map(left_inverse).collect::<Result<_>>()?;
    let retractions: Vec<FinMatrix<F>> = aug.iter().map(right_inverse).collect::<Result<_>>()?;
    for l in 0..levels {
        alpha.push(per_term(l, &|x| aug[x].transpose()));
        beta.push(per_term(l, &|x| inc[x].transpose()));
    }
    for l in 0..=top {
        let s = per_term(l, &|x| sections[x].transpose());
        let r = per_term(l + 1, &|x| retractions[x].transpose());
        let db = cb.differential(l as i64).expect("resolution is long enough");
        delta.push(r.mul(&db.mul(&s)?)?);
    }
    for l in 0..levels {
        if !beta[l].mul(&alpha[l])?.is_zero() {
            failures.push(format!("cochain maps do not compose to zero in degree {l}"));
        }
    }

    let (tk, tb, ta) = (terms(&ck, field, levels), terms(&cb, field, levels), terms(&ca, field, levels));
    let eta_ext: Vec<usize> = tb.iter().take(top + 1).map(|t| t.cohomology()).collect();
    let f_at_zero = f.dim(0);
    let eta_projective = eta_ext[0] == f_at_zero && eta_ext[1..].iter().all(|&d| d == 0);
    if !eta_projective {
        failures.push(format!("Ext(η_!k, F) = {eta_ext:?}, expected [{f_at_zero}, 0, …]"));
    }

    let mut slots = Vec::new();
    for l in 0..=top {
        let a_rank = induced_rank(field, &alpha[l], &tk[l], &tb[l]);
        let b_rank = induced_rank(field, &beta[l], &tb[l], &ta[l]);
        let d_rank = induced_rank(field, &delta[l], &ta[l], &tk[l + 1]);
        let d_prev = if l == 0 { 0 } else { induced_rank(field, &delta[l - 1], &ta[l - 1], &tk[l]) };
        let ad = if l == 0 { 0 } else { induced_rank(field, &alpha[l].mul(&delta[l - 1])?, &ta[l - 1], &tb[l]) };
        let ba = induced_rank(field, &beta[l].mul(&alpha[l])?, &tk[l], &ta[l]);
        let db = induced_rank(field, &delta[l].mul(&beta[l])?, &tb[l], &tk[l + 1]);
        for (slot, term, rank_in, rank_out, composite) in [
            ("const", &tk[l], d_prev, a_rank, ad),
            ("eta", &tb[l], a_rank, b_rank, ba),
            ("f_ass", &ta[l], b_rank, d_rank, db),
        ] {
            let dim = term.cohomology();
            let exact = composite == 0 && dim == rank_in + rank_out;
            if !exact {
                failures.push(format!("not exact at Ext^{l}({slot}, F)"));
            }
            slots.push(SlotReport {
                slot: slot.to_string(),
                degree: l,
                dim,
                rank_in,
                rank_out,
                kernel_out: dim - rank_out,
                composite_rank: composite,
                exact,
            });
        }
    }
    Ok(LesReport {
        truncation: n_max,
        top,
        field: field.descriptor().to_string(),
        pointwise_exact,
        natural,
        eta_ext,
        f_at_zero,
        eta_projective,
        slots,
        failures,
    })
}

/// Cohomology of the conormalized cochains of `F` on `Δ≤N`:
/// `N^k = ∩_j ker F(s^j)`, `δ = Σ (−1)^i F(d^i)`. Degrees `0..=N`; only
/// degrees below `N` are meaningful.
pub fn cosimplicial_cohomology<F: Field>(cat: &FinCategory, f: &LinearFunctor<F>) -> Result<Vec<usize>> {
    let field = f.field();
    let n_max = cat.num_objects() - 1;
    let coface = |k: usize, i: usize| {
        let values: Vec<usize> = (0..k).map(|j| if j < i { j } else { j + 1 }).collect();
        simplex_morphism(cat, &MonotoneMap::new(k - 1, k, values).expect("coface"))
    };
    let codegeneracy = |k: usize, j: usize| {
        let values: Vec<usize> = (0..=k).map(|i| if i <= j { i } else { i - 1 }).collect();
        simplex_morphism(cat, &MonotoneMap::new(k, k - 1, values).expect("codegeneracy"))
    };
    // Basis of N^k as columns of an inclusion into F([k]).
    let normalized: Vec<FinMatrix<F>> = (0..=n_max)
        .map(|k| {
            let dim = f.dim(k);
            let mut entries = Vec::new();
            let mut row = 0;
            for j in 0..k {
                for (i, c, v) in f.map(codegeneracy(k, j)).triplets() {
                    entries.push((row + i, c, v));
                }
                row += f.dim(k - 1);
            }
            let system = FinMatrix::from_triplets(field, row, dim, entries).expect("in range");
            let basis = system.kernel_basis();
            let cols = basis.len();
            FinMatrix::from_triplets(field, dim, cols, basis.into_iter().enumerate().flat_map(|(c, v)| v.into_iter().enumerate().map(move |(r, x)| (r, c, x))))
                .expect("in range")
        })
        .collect();
    let mut diffs = Vec::new();
    for k in 0..n_max {
        let mut d = FinMatrix::zeros(field, f.dim(k + 1), f.dim(k));
        for i in 0..=k + 1 {
            let term = f.map(coface(k + 1, i));
            d = d.add(&if i % 2 == 0 { term.clone() } else { term.scale(&field.neg(&field.one())) })?;
        }
        // Express δ(N^k) in the basis of N^{k+1}.
        let image = d.mul(&normalized[k])?;
        let coords = left_inverse(&normalized[k + 1])?.mul(&image)?;
        diffs.push(coords);
    }
    let dims = normalized.iter().map(|m| m.cols()).collect();
    let complex = ChainComplex::new(0, dims, diffs)?;
    Ok(complex.cohomology_dims(crate::exactla::Backend::Gaussian).into_iter().map(|(_, d)| d).collect())
}
