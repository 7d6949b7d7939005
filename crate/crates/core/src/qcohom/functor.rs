//! Linear functors on finite categories and the standard builders.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::category::{op_morphism, pointed_op_map, simplex_map, Category, FinCategory, MorId};
use crate::error::{invalid, Error, Result};
use crate::exactla::{Field, FinMatrix};
use crate::pointed::{iota, PointedMap};
use crate::twisted::TwCategory;

/// What a functor was built over: object labels and morphism count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseTag {
    pub objects: Vec<String>,
    pub morphisms: usize,
}

impl BaseTag {
    pub fn of(cat: &dyn Category) -> Self {
        BaseTag { objects: (0..cat.num_objects()).map(|x| cat.object_label(x)).collect(), morphisms: cat.num_morphisms() }
    }
}

/// A functor `C → Vect_k`: a dimension per object and a matrix per morphism
/// (`dim target × dim source`).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFunctor<F: Field> {
    field: F,
    base: BaseTag,
    dims: Vec<usize>,
    maps: Vec<FinMatrix<F>>,
}

impl<F: Field> LinearFunctor<F> {
    /// Checks identities and `M(g∘f) = M(g)·M(f)` on every composable pair.
    pub fn new(cat: &dyn Category, field: &F, dims: Vec<usize>, maps: Vec<FinMatrix<F>>) -> Result<Self> {
        if dims.len() != cat.num_objects() || maps.len() != cat.num_morphisms() {
            return Err(Error::Dimension("functor data does not match the base category".into()));
        }
        for (f, m) in maps.iter().enumerate() {
            if m.rows() != dims[cat.target(f)] || m.cols() != dims[cat.source(f)] {
                return Err(Error::Dimension(format!("matrix of {} has the wrong shape", cat.morphism_label(f))));
            }
        }
        let functor = LinearFunctor { field: field.clone(), base: BaseTag::of(cat), dims, maps };
        functor.check_functoriality(cat)?;
        Ok(functor)
    }

    /// Builds from a per-morphism rule, then checks functoriality.
    pub fn from_rule(cat: &dyn Category, field: &F, dims: Vec<usize>, rule: impl Fn(MorId) -> FinMatrix<F> + Sync + Send) -> Result<Self> {
        let maps = (0..cat.num_morphisms()).into_par_iter().map(rule).collect();
        LinearFunctor::new(cat, field, dims, maps)
    }

    pub fn check_functoriality(&self, cat: &dyn Category) -> Result<()> {
        if self.base != BaseTag::of(cat) {
            return Err(Error::Invalid("functor lives on a different base category".into()));
        }
        for x in 0..cat.num_objects() {
            if self.maps[cat.identity(x)] != FinMatrix::identity(&self.field, self.dims[x]) {
                return Err(Error::Functoriality(format!("identity of {} is not sent to the identity", cat.object_label(x))));
            }
        }
        let bad = (0..cat.num_morphisms()).into_par_iter().find_map_first(|f| {
            let y = cat.target(f);
            for z in 0..cat.num_objects() {
                for g in cat.hom(y, z) {
                    let gf = cat.compose(g, f);
                    if self.maps[g].mul(&self.maps[f]).expect("shapes checked") != self.maps[gf] {
                        return Some(format!("M({} ∘ {})", cat.morphism_label(g), cat.morphism_label(f)));
                    }
                }
            }
            None
        });
        match bad {
            Some(msg) => Err(Error::Functoriality(format!("{msg} is not the product of the matrices"))),
            None => Ok(()),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn base(&self) -> &BaseTag {
        &self.base
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    pub fn map(&self, f: MorId) -> &FinMatrix<F> {
        &self.maps[f]
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// `x ↦ M(x)^*` on the opposite category, with transposed matrices.
    pub fn dual(&self, cat: &dyn Category, op: &FinCategory) -> LinearFunctor<F> {
        let mut maps = vec![FinMatrix::zeros(&self.field, 0, 0); op.num_morphisms()];
        for f in 0..cat.num_morphisms() {
            maps[op_morphism(cat, op, f)] = self.maps[f].transpose();
        }
        LinearFunctor { field: self.field.clone(), base: BaseTag::of(op), dims: self.dims.clone(), maps }
    }

    /// Restriction along a functor `D → C` given on objects and morphisms.
    pub fn restrict(&self, d: &dyn Category, objects: impl Fn(usize) -> usize, morphisms: impl Fn(MorId) -> MorId + Sync + Send) -> Result<Self> {
        let dims = (0..d.num_objects()).map(|x| self.dims[objects(x)]).collect();
        LinearFunctor::from_rule(d, &self.field, dims, |f| self.maps[morphisms(f)].clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field": self.field.descriptor().to_string(),
            "objects": self.base.objects,
            "dims": self.dims,
            "maps": self.maps.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(cat: &dyn Category, field: &F, value: &serde_json::Value) -> Result<Self> {
        let dims: Vec<usize> = serde_json::from_value(value["dims"].clone())?;
        let maps = value["maps"]
            .as_array()
            .ok_or_else(|| Error::Invalid("functor JSON needs a maps array".into()))?
            .iter()
            .map(|m| FinMatrix::from_json(field, m))
            .collect::<Result<Vec<_>>>()?;
        LinearFunctor::new(cat, field, dims, maps)
    }
}

/// The 0/1 matrix of `e_i ↦ Σ_{j ∈ f⁻¹(i)} e_j` for a pointed `f: ⟨n⟩ → ⟨m⟩`.
fn copy_matrix<F: Field>(field: &F, f: &PointedMap) -> FinMatrix<F> {
    let entries = (1..=f.source_size())
        .filter(|&j| f.apply(j) != 0)
        .map(|j| (j - 1, f.apply(j) - 1, field.one()));
    FinMatrix::from_triplets(field, f.source_size(), f.target_size(), entries).expect("in range")
}

/// `t(⟨m⟩) = k^m` on `(Fin_*^op)≤N`, structure maps copying factors.
pub fn gamma_t<F: Field>(cat: &FinCategory, field: &F) -> Result<LinearFunctor<F>> {
    let dims = (0..cat.num_objects()).collect();
    LinearFunctor::from_rule(cat, field, dims, |f| copy_matrix(field, &pointed_op_map(cat, f)))
}

/// `F_P(μ) = k^{arity μ}` on `Tw(P)≤N`, with the same copying maps along shapes.
pub fn f_operad<F: Field>(tw: &TwCategory, field: &F) -> Result<LinearFunctor<F>> {
    let dims = tw.objects().iter().map(|o| o.arity()).collect();
    LinearFunctor::from_rule(tw, field, dims, |f| copy_matrix(field, tw.witness(f).shape()))
}

/// `η_!k([n]) = k^{n+1}` on `Δ≤N`, summand `i` to summand `θ(i)`.
pub fn eta_shriek<F: Field>(cat: &FinCategory, field: &F) -> Result<LinearFunctor<F>> {
    let dims = (0..cat.num_objects()).map(|n| n + 1).collect();
    LinearFunctor::from_rule(cat, field, dims, |f| {
        let g = simplex_map(cat, f);
        let entries = (0..=g.source_size()).map(|i| (g.apply(i), i, field.one()));
        FinMatrix::from_triplets(field, g.target_size() + 1, g.source_size() + 1, entries).expect("in range")
    })
}

/// `F_Ass` on `Δ≤N`: `t` restricted along `ι: Δ → Fin_*^op`, so `[n] ↦ k^n`.
pub fn f_ass_delta<F: Field>(cat: &FinCategory, field: &F) -> Result<LinearFunctor<F>> {
    let dims = (0..cat.num_objects()).collect();
    LinearFunctor::from_rule(cat, field, dims, |f| copy_matrix(field, &iota(&simplex_map(cat, f))))
}

/// The constant functor at `k^c`.
pub fn constant<F: Field>(cat: &dyn Category, field: &F, c: usize) -> Result<LinearFunctor<F>> {
    let dims = vec![c; cat.num_objects()];
    LinearFunctor::from_rule(cat, field, dims, |_| FinMatrix::identity(field, c))
}

pub fn zero<F: Field>(cat: &dyn Category, field: &F) -> Result<LinearFunctor<F>> {
    constant(cat, field, 0)
}

/// `k[Hom(x, −)]`, basis of `k[Hom(x, y)]` in morphism-id order.
pub fn representable<F: Field>(cat: &dyn Category, field: &F, x: usize) -> Result<LinearFunctor<F>> {
    if x >= cat.num_objects() {
        return invalid(format!("object {x} out of range"));
    }
    let dims = (0..cat.num_objects()).map(|y| cat.hom_size(x, y)).collect();
    LinearFunctor::from_rule(cat, field, dims, |f| {
        let (y, z) = (cat.source(f), cat.target(f));
        let entries = cat.hom(x, y).map(|h| {
            let fh = cat.compose(f, h);
            (fh - cat.hom(x, z).start, h - cat.hom(x, y).start, field.one())
        });
        FinMatrix::from_triplets(field, cat.hom_size(x, z), cat.hom_size(x, y), entries).expect("in range")
    })
}

/// A free module `⊕_g k[Hom(x_g, −)]` with its basis laid out per object.
#[derive(Clone, Debug)]
pub(crate) struct Free {
    pub gens: Vec<usize>,
    /// `offsets[y][g]`: start of the block `k[Hom(x_g, y)]` in `P(y)`.
    pub offsets: Vec<Vec<usize>>,
    pub dims: Vec<usize>,
}

impl Free {
    pub fn new(cat: &dyn Category, gens: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(cat.num_objects());
        let mut dims = Vec::with_capacity(cat.num_objects());
        for y in 0..cat.num_objects() {
            let mut off = Vec::with_capacity(gens.len());
            let mut total = 0;
            for &x in &gens {
                off.push(total);
                total += cat.hom_size(x, y);
            }
            offsets.push(off);
            dims.push(total);
        }
        Free { gens, offsets, dims }
    }

    /// Index of basis element `(g, h)` for `h: x_g → y`.
    pub fn index(&self, cat: &dyn Category, g: usize, h: MorId) -> usize {
        let y = cat.target(h);
        self.offsets[y][g] + cat.hom_position(h)
    }

    /// Inverse of `index` at object `y`.
    pub fn locate(&self, cat: &dyn Category, y: usize, i: usize) -> (usize, MorId) {
        let g = self.offsets[y].partition_point(|&o| o <= i) - 1;
        (g, cat.hom(self.gens[g], y).start + (i - self.offsets[y][g]))
    }
}

/// `P / ⟨relations⟩` for the free module on `gens`; each relation is an
/// object and a dense vector in `P(x)`.
pub fn presentation<F: Field>(cat: &dyn Category, field: &F, gens: &[usize], relations: &[(usize, Vec<F::Elem>)]) -> Result<LinearFunctor<F>> {
    let free = Free::new(cat, gens.to_vec());
    for (x, v) in relations {
        if v.len() != free.dims[*x] {
            return Err(Error::Dimension("relation vector has the wrong length".into()));
        }
    }
    let n = cat.num_objects();
    // Reduced echelon form of the relation submodule at each object.
    let reduced: Vec<(Vec<usize>, FinMatrix<F>)> = (0..n)
        .into_par_iter()
        .map(|y| {
            let mut entries = Vec::new();
            let mut row = 0;
            for (x, v) in relations {
                for h in cat.hom(*x, y) {
                    for (i, c) in v.iter().enumerate() {
                        if !field.is_zero(c) {
                            let (g, k) = free.locate(cat, *x, i);
                            entries.push((row, free.index(cat, g, cat.compose(h, k)), c.clone()));
                        }
                    }
                    row += 1;
                }
            }
            FinMatrix::from_triplets(field, row, free.dims[y], entries).expect("in range").rref()
        })
        .collect();
    let quotient: Vec<Vec<usize>> = (0..n)
        .map(|y| (0..free.dims[y]).filter(|c| reduced[y].0.binary_search(c).is_err()).collect())
        .collect();
    let dims = quotient.iter().map(|q| q.len()).collect();
    LinearFunctor::from_rule(cat, field, dims, |f| {
        let (y, z) = (cat.source(f), cat.target(f));
        let (pivots, rows) = &reduced[z];
        let mut entries = Vec::new();
        for (col, &c) in quotient[y].iter().enumerate() {
            let (g, h) = free.locate(cat, y, c);
            let image = free.index(cat, g, cat.compose(f, h));
            // e_image modulo the relations: subtract the pivot row if `image` is a pivot.
            match pivots.binary_search(&image) {
                Ok(k) => {
                    for (j, v) in rows.row(k).iter().skip(1) {
                        let r = quotient[z].binary_search(j).expect("non-pivot column");
                        entries.push((r, col, field.neg(v)));
                    }
                }
                Err(_) => entries.push((quotient[z].binary_search(&image).unwrap(), col, field.one())),
            }
        }
        FinMatrix::from_triplets(field, quotient[z].len(), quotient[y].len(), entries).expect("in range")
    })
}

/// A seeded random finitely presented functor: `gens` generators at random
/// objects and `relations` binomial relations `e_h − e_h'` at random
/// objects.
pub fn random_cokernel<F: Field>(cat: &dyn Category, field: &F, gens: usize, relations: usize, rng: &mut ChaCha8Rng) -> Result<LinearFunctor<F>> {
    let n = cat.num_objects();
    let g: Vec<usize> = (0..gens).map(|_| rng.gen_range(0..n)).collect();
    let free = Free::new(cat, g.clone());
    let mut rels: Vec<(usize, Vec<F::Elem>)> = Vec::new();
    while rels.len() < relations {
        let x = rng.gen_range(0..n);
        if free.dims[x] < 2 {
            if (0..n).all(|y| free.dims[y] < 2) {
                break;
            }
            continue;
        }
        let i = rng.gen_range(0..free.dims[x]);
        let j = (i + rng.gen_range(1..free.dims[x])) % free.dims[x];
        let mut v = vec![field.zero(); free.dims[x]];
        v[i] = field.one();
        v[j] = field.neg(&field.one());
        rels.push((x, v));
    }
    presentation(cat, field, &g, &rels)
}
