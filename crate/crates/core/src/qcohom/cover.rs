//! Projective resolutions by greedy covers with representables.

use rayon::prelude::*;

use super::functor::{Free, LinearFunctor};
use crate::category::{Category, MorId};
use crate::error::{Error, Result};
use crate::exactla::{ChainComplex, Echelon, Field, FinMatrix, SparseRow};

pub(crate) fn sparse<F: Field>(field: &F, v: &[F::Elem]) -> SparseRow<F::Elem> {
    v.iter().enumerate().filter(|(_, c)| !field.is_zero(c)).map(|(i, c)| (i, c.clone())).collect()
}

/// Sorts and merges a list of `(index, coefficient)` pairs.
pub(crate) fn collect_sparse<F: Field>(field: &F, mut v: Vec<(usize, F::Elem)>) -> SparseRow<F::Elem> {
    v.sort_by_key(|e| e.0);
    let mut out: SparseRow<F::Elem> = Vec::with_capacity(v.len());
    for (i, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = field.add(&last.1, &c),
            _ => out.push((i, c)),
        }
    }
    out.retain(|e| !field.is_zero(&e.1));
    out
}

/// `h · v` for `v` in the free module at `source(h)`.
pub(crate) fn act_free<F: Field>(cat: &dyn Category, field: &F, free: &Free, h: MorId, v: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
    let x = cat.source(h);
    let out = v
        .iter()
        .map(|(i, c)| {
            let (g, k) = free.locate(cat, x, *i);
            (free.index(cat, g, cat.compose(h, k)), c.clone())
        })
        .collect();
    collect_sparse(field, out)
}

fn act_module<F: Field>(m: &LinearFunctor<F>, h: MorId, v: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
    let field = m.field();
    let mat = m.map(h);
    let mut dense = vec![field.zero(); mat.rows()];
    for (j, c) in v {
        for (i, row) in dense.iter_mut().enumerate() {
            let a = mat.get(i, *j);
            if !field.is_zero(&a) {
                *row = field.add(row, &field.mul(&a, c));
            }
        }
    }
    sparse(field, &dense)
}

enum Target<'a, F: Field> {
    Module(&'a LinearFunctor<F>),
    Free(&'a Free),
}

impl<F: Field> Target<'_, F> {
    fn act(&self, cat: &dyn Category, field: &F, h: MorId, v: &[(usize, F::Elem)]) -> SparseRow<F::Elem> {
        match self {
            Target::Module(m) => act_module(m, h, v),
            Target::Free(p) => act_free(cat, field, p, h, v),
        }
    }

    fn dim(&self, y: usize) -> usize {
        match self {
            Target::Module(m) => m.dim(y),
            Target::Free(p) => p.dims[y],
        }
    }
}

/// A projective resolution `P_K → … → P_0 → M`, each `P_k` a direct sum of
/// representables `k[Hom(x, −)]`.
pub struct Resolution<F: Field> {
    field: F,
    terms: Vec<Free>,
    /// Generator images: in `M(x_g)` for `k = 0`, in `P_{k-1}(x_g)` above.
    images: Vec<Vec<SparseRow<F::Elem>>>,
}

/// Chooses generators of the subfunctor with the given pointwise bases,
/// visiting objects in index order.
fn cover<F: Field>(cat: &dyn Category, field: &F, target: &Target<F>, sub: &[Vec<SparseRow<F::Elem>>]) -> Vec<(usize, SparseRow<F::Elem>)> {
    let mut gens: Vec<(usize, SparseRow<F::Elem>)> = Vec::new();
    for x in 0..cat.num_objects() {
        if sub[x].is_empty() {
            continue;
        }
        let mut span = Echelon::new(field.clone());
        let images: Vec<SparseRow<F::Elem>> = gens
            .par_iter()
            .flat_map_iter(|(xg, w)| cat.hom(*xg, x).map(move |h| (h, w)))
            .map(|(h, w)| target.act(cat, field, h, w))
            .collect();
        for v in images {
            span.insert(v);
            if span.rank() == sub[x].len() {
                break;
            }
        }
        for b in &sub[x] {
            if span.rank() == sub[x].len() {
                break;
            }
            if span.insert(b.clone()) {
                for h in cat.hom(x, x) {
                    span.insert(target.act(cat, field, h, b));
                }
                gens.push((x, b.clone()));
            }
        }
    }
    gens
}

/// `d_y: P(y) → target(y)` on the basis of `P(y)`; one column per basis element.
fn pointwise<F: Field>(cat: &dyn Category, field: &F, target: &Target<F>, p: &Free, images: &[SparseRow<F::Elem>], y: usize) -> FinMatrix<F> {
    let mut entries = Vec::new();
    for i in 0..p.dims[y] {
        let (g, h) = p.locate(cat, y, i);
        for (r, c) in target.act(cat, field, h, &images[g]) {
            entries.push((r, i, c));
        }
    }
    FinMatrix::from_triplets(field, target.dim(y), p.dims[y], entries).expect("in range")
}

impl<F: Field> Resolution<F> {
    /// Resolves `m` through `P_length`.
    pub fn new(cat: &dyn Category, m: &LinearFunctor<F>, length: usize) -> Result<Self> {
        let field = m.field().clone();
        let n = cat.num_objects();
        let full: Vec<Vec<SparseRow<F::Elem>>> =
            (0..n).map(|y| (0..m.dim(y)).map(|i| vec![(i, field.one())]).collect()).collect();
        let gens = cover(cat, &field, &Target::Module(m), &full);
        let mut terms = vec![Free::new(cat, gens.iter().map(|g| g.0).collect())];
        let mut images = vec![gens.into_iter().map(|g| g.1).collect::<Vec<_>>()];
        for k in 0..length {
            let p = &terms[k];
            let kernels: Vec<Vec<SparseRow<F::Elem>>> = {
                let target = if k == 0 { Target::Module(m) } else { Target::Free(&terms[k - 1]) };
                (0..n)
                    .into_par_iter()
                    .map(|y| {
                        pointwise(cat, &field, &target, p, &images[k], y)
                            .kernel_basis()
                            .iter()
                            .map(|v| sparse(&field, v))
                            .collect()
                    })
                    .collect()
            };
            let gens = cover(cat, &field, &Target::Free(p), &kernels);
            let next = Free::new(cat, gens.iter().map(|g| g.0).collect());
            terms.push(next);
            images.push(gens.into_iter().map(|g| g.1).collect());
        }
        Ok(Resolution { field, terms, images })
    }

    pub fn length(&self) -> usize {
        self.terms.len() - 1
    }

    /// Multiplicity of `k[Hom(x, −)]` in `P_k`, per object `x`.
    pub fn multiplicities(&self, k: usize, objects: usize) -> Vec<usize> {
        let mut out = vec![0; objects];
        for &x in &self.terms[k].gens {
            out[x] += 1;
        }
        out
    }

    /// Rank bookkeeping at every object: `ε` is onto and `P_k` is exact for
    /// `k < length`.
    pub fn check_exact(&self, cat: &dyn Category, m: &LinearFunctor<F>) -> Result<()> {
        let f = &self.field;
        let ranks: Vec<Vec<usize>> = (0..self.terms.len())
            .map(|k| {
                let target = if k == 0 { Target::Module(m) } else { Target::Free(&self.terms[k - 1]) };
                (0..cat.num_objects())
                    .map(|y| pointwise(cat, f, &target, &self.terms[k], &self.images[k], y).rank())
                    .collect()
            })
            .collect();
        for y in 0..cat.num_objects() {
            if ranks[0][y] != m.dim(y) {
                return Err(Error::Certificate(format!("augmentation is not onto at {}", cat.object_label(y))));
            }
            for k in 0..self.length() {
                if self.terms[k].dims[y] != ranks[k][y] + ranks[k + 1][y] {
                    return Err(Error::Certificate(format!("resolution is not exact at P_{k}({})", cat.object_label(y))));
                }
            }
        }
        Ok(())
    }

    /// `Hom(P_•, n)` as a cochain complex: `Hom(P_k, N) = ⊕_g N(x_g)`.
    pub fn hom_complex(&self, cat: &dyn Category, n: &LinearFunctor<F>) -> Result<ChainComplex<F>> {
        let f = &self.field;
        let offsets: Vec<Vec<usize>> = self
            .terms
            .iter()
            .map(|t| {
                let mut acc = 0;
                t.gens
                    .iter()
                    .map(|&x| {
                        let o = acc;
                        acc += n.dim(x);
                        o
                    })
                    .collect()
            })
            .collect();
        let dims: Vec<usize> = self.terms.iter().map(|t| t.gens.iter().map(|&x| n.dim(x)).sum()).collect();
        let diffs = (1..self.terms.len())
            .into_par_iter()
            .map(|k| {
                let below = &self.terms[k - 1];
                let mut entries = Vec::new();
                for (g2, v) in self.images[k].iter().enumerate() {
                    let x2 = self.terms[k].gens[g2];
                    for (i, c) in v {
                        let (g, h) = below.locate(cat, x2, *i);
                        for (r, col, a) in n.map(h).triplets() {
                            entries.push((offsets[k][g2] + r, offsets[k - 1][g] + col, f.mul(c, &a)));
                        }
                    }
                }
                FinMatrix::from_triplets(f, dims[k], dims[k - 1], entries)
            })
            .collect::<Result<Vec<_>>>()?;
        ChainComplex::new(0, dims, diffs)
    }

    pub(crate) fn generators(&self, k: usize) -> &[usize] {
        &self.terms[k].gens
    }
}

/// `dim Ext^k(m, n)` for `k ≤ top`, through a cover resolution of `m`.
pub fn ext_cover<F: Field>(cat: &dyn Category, m: &LinearFunctor<F>, n: &LinearFunctor<F>, top: usize, backend: crate::exactla::Backend) -> Result<Vec<usize>> {
    let res = Resolution::new(cat, m, top + 1)?;
    let complex = res.hom_complex(cat, n)?;
    Ok(complex.cohomology_dims(backend).into_iter().take(top + 1).map(|(_, d)| d).collect())
}
