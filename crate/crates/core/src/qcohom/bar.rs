//! Bar resolutions. The normalized one is taken relative to the groupoid of
//! isomorphisms, so cochains live on orbits of chains of non-isomorphisms.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functor::LinearFunctor;
use crate::category::{Category, MorId};
use crate::error::{Error, Result};
use crate::exactla::{Backend, ChainComplex, Field, FinMatrix};
use crate::twisted::inverse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BarKind {
    /// Normalized, relative to the isomorphisms: chains of non-isomorphisms
    /// between chosen representatives, modulo automorphisms.
    Relative,
    /// Normalized over the identities: chains of non-identities.
    Absolute,
    /// All chains, nothing quotiented.
    Unnormalized,
}

/// Which chains appear and which groups act on them.
struct Reduction {
    /// Objects that chains may visit.
    reps: Vec<usize>,
    /// Acting group at each object, as automorphism ids.
    group: Vec<Vec<MorId>>,
    inverse: HashMap<MorId, MorId>,
    dropped: Vec<bool>,
    /// Allowed morphisms out of each object into the visited objects.
    out: Vec<Vec<MorId>>,
}

impl Reduction {
    fn new(cat: &dyn Category, field: &impl Field, kind: BarKind) -> Result<Self> {
        let n = cat.num_objects();
        let iso: Vec<bool> = match kind {
            BarKind::Relative => (0..cat.num_morphisms()).into_par_iter().map(|f| inverse(cat, f).is_some()).collect(),
            _ => {
                let mut v = vec![false; cat.num_morphisms()];
                for x in 0..n {
                    v[cat.identity(x)] = true;
                }
                v
            }
        };
        let reps: Vec<usize> = match kind {
            BarKind::Relative => {
                let mut reps: Vec<usize> = Vec::new();
                for x in 0..n {
                    if !reps.iter().any(|&r| cat.hom(r, x).any(|f| iso[f])) {
                        reps.push(x);
                    }
                }
                reps
            }
            _ => (0..n).collect(),
        };
        let mut group = vec![Vec::new(); n];
        let mut inv = HashMap::new();
        for &x in &reps {
            group[x] = match kind {
                BarKind::Relative => cat.hom(x, x).filter(|&f| iso[f]).collect(),
                _ => vec![cat.identity(x)],
            };
            if !field.invertible_integer(group[x].len() as u64) {
                return Err(Error::Invalid(format!(
                    "the automorphism group of {} has order divisible by the characteristic",
                    cat.object_label(x)
                )));
            }
            for &g in &group[x] {
                inv.insert(g, inverse(cat, g).expect("automorphism"));
            }
        }
        let (allowed, dropped) = match kind {
            BarKind::Unnormalized => (vec![true; iso.len()], vec![false; iso.len()]),
            _ => (iso.iter().map(|b| !b).collect(), iso),
        };
        let mut out = vec![Vec::new(); n];
        for &x in &reps {
            for &y in &reps {
                out[x].extend(cat.hom(x, y).filter(|&f| allowed[f]));
            }
        }
        Ok(Reduction { reps, group, inverse: inv, dropped, out })
    }
}

/// A chain `x_0 → x_1 → … → x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Chain {
    start: usize,
    arrows: Vec<MorId>,
}

impl Chain {
    fn end(&self, cat: &dyn Category) -> usize {
        self.arrows.last().map_or(self.start, |&f| cat.target(f))
    }
}

/// Orbit representatives of length-`k` chains with their stabilizers, and
/// the extension table to length `k + 1`.
struct Level {
    reps: Vec<Chain>,
    stab: Vec<Vec<Vec<MorId>>>,
    /// `next[r][f] = (r', s, g)`: `(rep r, f) = (stab[r][s], g) · rep r'`.
    next: Vec<HashMap<MorId, (usize, usize, MorId)>>,
}

struct Orbits {
    levels: Vec<Level>,
    level0: HashMap<usize, usize>,
}

impl Orbits {
    fn new(red: &Reduction) -> Self {
        let reps: Vec<Chain> = red.reps.iter().map(|&x| Chain { start: x, arrows: vec![] }).collect();
        let stab = red.reps.iter().map(|&x| red.group[x].iter().map(|&g| vec![g]).collect()).collect();
        let level0 = red.reps.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        Orbits { levels: vec![Level { reps, stab, next: vec![] }], level0 }
    }

    /// Number of chains one step longer than the current top, before
    /// passing to orbits.
    fn candidates(&self, cat: &dyn Category, red: &Reduction) -> usize {
        self.levels.last().unwrap().reps.iter().map(|c| red.out[c.end(cat)].len()).sum()
    }

    fn grow(&mut self, cat: &dyn Category, red: &Reduction) {
        let last = self.levels.last_mut().unwrap();
        let extended: Vec<(HashMap<MorId, (usize, usize, MorId)>, Vec<(Chain, Vec<Vec<MorId>>)>)> = last
            .reps
            .par_iter()
            .zip(&last.stab)
            .map(|(rho, stab)| {
                let x = rho.end(cat);
                let mut table = HashMap::new();
                let mut fresh = Vec::new();
                for &f in &red.out[x] {
                    if table.contains_key(&f) {
                        continue;
                    }
                    let y = cat.target(f);
                    let id = fresh.len();
                    let mut fixers = Vec::new();
                    for (si, s) in stab.iter().enumerate() {
                        let s_inv = red.inverse[s.last().unwrap()];
                        for &g in &red.group[y] {
                            let e = cat.compose(g, cat.compose(f, s_inv));
                            table.entry(e).or_insert((id, si, g));
                            if e == f {
                                let mut t = s.clone();
                                t.push(g);
                                fixers.push(t);
                            }
                        }
                    }
                    let mut arrows = rho.arrows.clone();
                    arrows.push(f);
                    fresh.push((Chain { start: rho.start, arrows }, fixers));
                }
                (table, fresh)
            })
            .collect();
        let mut next = Vec::with_capacity(extended.len());
        let mut reps = Vec::new();
        let mut stab = Vec::new();
        for (mut table, fresh) in extended {
            let base = reps.len();
            for v in table.values_mut() {
                v.0 += base;
            }
            next.push(table);
            for (c, s) in fresh {
                reps.push(c);
                stab.push(s);
            }
        }
        last.next = next;
        self.levels.push(Level { reps, stab, next: vec![] });
    }

    /// `(r, τ)` with `chain = τ · rep r`, componentwise `f_j = τ_j ρ_j τ_{j-1}⁻¹`.
    fn canonical(&self, cat: &dyn Category, chain: &Chain) -> (usize, Vec<MorId>) {
        let mut r = self.level0[&chain.start];
        let mut tau = vec![cat.identity(chain.start)];
        for (i, &f) in chain.arrows.iter().enumerate() {
            let f2 = cat.compose(f, *tau.last().unwrap());
            let (r2, si, g) = self.levels[i].next[r][&f2];
            let s = &self.levels[i].stab[r][si];
            for (t, &sj) in tau.iter_mut().zip(s) {
                *t = cat.compose(*t, sj);
            }
            tau.push(g);
            r = r2;
        }
        (r, tau)
    }
}

type Dense<E> = Vec<Vec<E>>;

/// Invariant subspace of `Hom(M(x), N(y))` under `φ ↦ N(b) φ M(a)⁻¹`; basis
/// vectors are flattened row-major and `free` lists their coordinate columns.
struct Fix<E> {
    free: Vec<usize>,
    basis: Vec<Vec<E>>,
    /// Position of each flattened coordinate in `free`, if present.
    slot: Vec<Option<u32>>,
    /// Nonzero entries `(row, col, value)` of each basis vector.
    entries: Vec<Vec<(usize, usize, E)>>,
}

fn fixed_subspace<F: Field>(field: &F, mats: &Dense2<F>, m: &LinearFunctor<F>, n: &LinearFunctor<F>, x: usize, y: usize, pairs: &[(MorId, MorId)], red: &Reduction) -> Fix<F::Elem> {
    let (dm, dn) = (m.dim(x), n.dim(y));
    let size = dm * dn;
    let mut entries = Vec::new();
    let mut row = 0;
    for &(a, b) in pairs {
        let mi = &mats.m[red.inverse[&a]];
        let nb = &mats.n[b];
        // (N(b) φ M(a⁻¹))[i][j] = Σ N(b)[i][c] φ[c][d] M(a⁻¹)[d][j]
        for i in 0..dn {
            for j in 0..dm {
                for c in 0..dn {
                    if field.is_zero(&nb[i][c]) {
                        continue;
                    }
                    for d in 0..dm {
                        if !field.is_zero(&mi[d][j]) {
                            entries.push((row, c * dm + d, field.mul(&nb[i][c], &mi[d][j])));
                        }
                    }
                }
                entries.push((row, i * dm + j, field.neg(&field.one())));
                row += 1;
            }
        }
    }
    let system = FinMatrix::from_triplets(field, row, size, entries).expect("in range");
    let (pivots, _) = system.rref();
    let free: Vec<usize> = (0..size).filter(|c| pivots.binary_search(c).is_err()).collect();
    let mut slot = vec![None; size];
    for (i, &p) in free.iter().enumerate() {
        slot[p] = Some(i as u32);
    }
    let basis = system.kernel_basis();
    let entries = basis
        .iter()
        .map(|v| v.iter().enumerate().filter(|(_, e)| !field.is_zero(e)).map(|(i, e)| (i / dm, i % dm, e.clone())).collect())
        .collect();
    Fix { free, basis, slot, entries }
}

struct Dense2<F: Field> {
    m: Vec<Dense<F::Elem>>,
    n: Vec<Dense<F::Elem>>,
    /// Rows of each `M(f)`, as `(col, value)` lists.
    m_rows: Vec<Lists<F::Elem>>,
    /// Columns of each `N(f)`, as `(row, value)` lists.
    n_cols: Vec<Lists<F::Elem>>,
}

type Lists<E> = Vec<Vec<(usize, E)>>;

/// `Σ_e coeffs[i][e] · base[e]` for each `i`; `base = None` is the identity.
fn combine<F: Field>(field: &F, coeffs: &Lists<F::Elem>, base: Option<&Lists<F::Elem>>) -> Lists<F::Elem> {
    coeffs
        .iter()
        .map(|list| match base {
            None => list.clone(),
            Some(base) => {
                let terms = list.iter().flat_map(|(e, a)| base[*e].iter().map(move |(j, b)| (*j, field.mul(a, b)))).collect();
                super::cover::collect_sparse(field, terms)
            }
        })
        .collect()
}

fn lists<F: Field>(field: &F, mat: &Dense<F::Elem>, by_column: bool) -> Lists<F::Elem> {
    let (rows, cols) = (mat.len(), mat.first().map_or(0, |r| r.len()));
    let (outer, inner) = if by_column { (cols, rows) } else { (rows, cols) };
    (0..outer)
        .map(|i| {
            (0..inner)
                .filter_map(|j| {
                    let v = if by_column { &mat[j][i] } else { &mat[i][j] };
                    (!field.is_zero(v)).then(|| (j, v.clone()))
                })
                .collect()
        })
        .collect()
}

/// Per-level cochain layout: offsets and fixed subspaces of the representatives.
struct Cochains<E> {
    offsets: Vec<usize>,
    fix: Vec<std::sync::Arc<Fix<E>>>,
    dim: usize,
}

fn cochains<F: Field>(cat: &dyn Category, field: &F, mats: &Dense2<F>, m: &LinearFunctor<F>, n: &LinearFunctor<F>, level: &Level, red: &Reduction) -> Cochains<F::Elem> {
    type Key = (usize, usize, Vec<(MorId, MorId)>);
    let keys: Vec<Key> = level
        .reps
        .iter()
        .zip(&level.stab)
        .map(|(c, s)| {
            let mut pairs: Vec<(MorId, MorId)> = s.iter().map(|t| (t[0], *t.last().unwrap())).collect();
            pairs.sort_unstable();
            pairs.dedup();
            pairs.retain(|&(a, b)| a != cat.identity(c.start) || b != cat.identity(c.end(cat)));
            (c.start, c.end(cat), pairs)
        })
        .collect();
    let mut unique: Vec<Key> = keys.clone();
    unique.sort_unstable();
    unique.dedup();
    let computed: HashMap<Key, std::sync::Arc<Fix<F::Elem>>> = unique
        .into_par_iter()
        .map(|k| {
            let fix = fixed_subspace(field, mats, m, n, k.0, k.1, &k.2, red);
            (k, std::sync::Arc::new(fix))
        })
        .collect();
    let fix: Vec<_> = keys.iter().map(|k| computed[k].clone()).collect();
    let mut offsets = Vec::with_capacity(fix.len());
    let mut dim = 0;
    for f in &fix {
        offsets.push(dim);
        dim += f.basis.len();
    }
    Cochains { offsets, fix, dim }
}

/// Options for the bar backend.
#[derive(Clone, Copy, Debug)]
pub struct BarOptions {
    pub kind: BarKind,
    /// Upper bound on the number of chains at the top length.
    pub max_chains: usize,
    pub rank_backend: Backend,
}

impl Default for BarOptions {
    fn default() -> Self {
        BarOptions { kind: BarKind::Relative, max_chains: 5_000_000, rank_backend: Backend::Gaussian }
    }
}

fn context<'a, F: Field>(cat: &'a dyn Category, m: &'a LinearFunctor<F>, n: &'a LinearFunctor<F>, top: usize, options: BarOptions) -> Result<Context<'a, F>> {
    let field = m.field();
    let red = Reduction::new(cat, field, options.kind)?;
    let mut orbits = Orbits::new(&red);
    for k in 1..=top + 1 {
        let count = orbits.candidates(cat, &red);
        if count > options.max_chains {
            return Err(Error::TooLarge(format!(
                "{count} candidate chains of length {k} exceed the bound {}",
                options.max_chains
            )));
        }
        orbits.grow(cat, &red);
    }
    let dense_m: Vec<Dense<F::Elem>> = (0..cat.num_morphisms()).into_par_iter().map(|f| m.map(f).to_dense()).collect();
    let dense_n: Vec<Dense<F::Elem>> = (0..cat.num_morphisms()).into_par_iter().map(|f| n.map(f).to_dense()).collect();
    let mats = Dense2 {
        m_rows: dense_m.par_iter().map(|d| lists(field, d, false)).collect(),
        n_cols: dense_n.par_iter().map(|d| lists(field, d, true)).collect(),
        m: dense_m,
        n: dense_n,
    };
    let layouts = orbits.levels.iter().map(|l| cochains(cat, field, &mats, m, n, l, &red)).collect();
    Ok(Context { cat, field, mats, m, orbits, red, layouts })
}

/// The cochain complex `Hom_S(R̄^{⊗•} ⊗_S M, N)` through length `top + 1`.
pub fn bar_complex<F: Field>(cat: &dyn Category, m: &LinearFunctor<F>, n: &LinearFunctor<F>, top: usize, options: BarOptions) -> Result<ChainComplex<F>> {
    let ctx = context(cat, m, n, top, options)?;
    let diffs = (0..=top).map(|k| ctx.differential(k)).collect::<Result<Vec<_>>>()?;
    ChainComplex::new(0, ctx.layouts.iter().map(|l| l.dim).collect(), diffs)
}

struct Context<'a, F: Field> {
    cat: &'a dyn Category,
    field: &'a F,
    mats: Dense2<F>,
    m: &'a LinearFunctor<F>,
    orbits: Orbits,
    red: Reduction,
    layouts: Vec<Cochains<F::Elem>>,
}

impl<F: Field> Context<'_, F> {
    /// Entries of `δ^k` in the rows of the length-`k+1` representative `ci`.
    fn block(&self, k: usize, ci: usize, c: &Chain) -> Vec<(usize, usize, F::Elem)> {
        let Context { cat, field, mats, m, orbits, red, layouts } = self;
        let (cat, field) = (*cat, *field);
        let (src, dst) = (&layouts[k], &layouts[k + 1]);
        let fix = &dst.fix[ci];
        if fix.basis.is_empty() {
            return Vec::new();
        }
        let x0 = c.start;
        let dm0 = m.dim(x0);
        // Terms: (sign, chain, L, R) with contribution sign · L φ(rep) R;
        // `None` stands for an identity.
        let mut terms: Vec<(bool, Chain, Option<MorId>, Option<MorId>)> = Vec::new();
        let f = &c.arrows;
        let last = *f.last().unwrap();
        terms.push(((k + 1).is_multiple_of(2), Chain { start: x0, arrows: f[..k].to_vec() }, Some(last), None));
        for i in 1..=k {
            let h = cat.compose(f[i], f[i - 1]);
            if red.dropped[h] {
                continue;
            }
            let mut arrows = f[..i - 1].to_vec();
            arrows.push(h);
            arrows.extend_from_slice(&f[i + 1..]);
            terms.push((i % 2 == 0, Chain { start: x0, arrows }, None, None));
        }
        terms.push((true, Chain { start: cat.target(f[0]), arrows: f[1..].to_vec() }, None, Some(f[0])));
        let mut out = Vec::new();
        let mut acc = vec![field.zero(); fix.free.len()];
        let mut touched: Vec<u32> = Vec::new();
        for (positive, chain, l, r) in terms {
            let (rep, tau) = orbits.canonical(cat, &chain);
            // Columns of L = L₀ N(τ_last) and rows of R = M(τ₀⁻¹) R₀.
            let l = combine(field, &mats.n_cols[*tau.last().unwrap()], l.map(|g| &mats.n_cols[g]));
            let r = combine(field, &mats.m_rows[red.inverse[&tau[0]]], r.map(|g| &mats.m_rows[g]));
            let col_fix = &src.fix[rep];
            for (j, v) in col_fix.entries.iter().enumerate() {
                for (cc, d, x) in v {
                    for (a, la) in &l[*cc] {
                        let lx = field.mul(la, x);
                        for (b, rb) in &r[*d] {
                            if let Some(s) = fix.slot[a * dm0 + b] {
                                let e = &mut acc[s as usize];
                                if field.is_zero(e) {
                                    touched.push(s);
                                }
                                *e = field.add(e, &field.mul(&lx, rb));
                            }
                        }
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                for &s in &touched {
                    let e = std::mem::replace(&mut acc[s as usize], field.zero());
                    if !field.is_zero(&e) {
                        let val = if positive { e } else { field.neg(&e) };
                        out.push((dst.offsets[ci] + s as usize, src.offsets[rep] + j, val));
                    }
                }
                touched.clear();
            }
        }
        out
    }

    fn differential(&self, k: usize) -> Result<FinMatrix<F>> {
        let (src, dst) = (&self.layouts[k], &self.layouts[k + 1]);
        let blocks: Vec<Vec<(usize, usize, F::Elem)>> =
            self.orbits.levels[k + 1].reps.par_iter().enumerate().map(|(ci, c)| self.block(k, ci, c)).collect();
        FinMatrix::from_triplets(self.field, dst.dim, src.dim, blocks.into_iter().flatten())
    }

    /// `(δ^k)ᵀ`, built directly: the rank computation then eliminates along
    /// the `C^k` side, which is the short one.
    fn differential_transpose(&self, k: usize) -> Result<FinMatrix<F>> {
        let (src, dst) = (&self.layouts[k], &self.layouts[k + 1]);
        let blocks: Vec<Vec<(usize, usize, F::Elem)>> = self.orbits.levels[k + 1]
            .reps
            .par_iter()
            .enumerate()
            .map(|(ci, c)| self.block(k, ci, c).into_iter().map(|(r, c, v)| (c, r, v)).collect())
            .collect();
        FinMatrix::from_triplets(self.field, src.dim, dst.dim, blocks.into_iter().flatten())
    }
}

/// `dim Ext^k(m, n)` for `k ≤ top` through the bar resolution of `m`.
pub fn ext_bar<F: Field>(cat: &dyn Category, m: &LinearFunctor<F>, n: &LinearFunctor<F>, top: usize, options: BarOptions) -> Result<Vec<usize>> {
    let ctx = context(cat, m, n, top, options)?;
    let ranks: Vec<usize> = match options.rank_backend {
        Backend::Gaussian => {
            // im δ^{k-1} projects isomorphically onto its pivot coordinates
            // and δ^k kills it, so δ^k has the same rank on the remaining ones.
            let mut skip: Vec<usize> = Vec::new();
            let mut ranks = Vec::with_capacity(top + 1);
            for k in 0..=top {
                let d = ctx.differential_transpose(k)?;
                let mut drop = vec![false; d.rows()];
                for &i in &skip {
                    drop[i] = true;
                }
                let keep: Vec<usize> = (0..d.rows()).filter(|&i| !drop[i]).collect();
                let pivots = d.select_rows(&keep).sparse_pivots();
                ranks.push(pivots.len());
                skip = pivots.into_iter().map(|(_, c)| c).collect();
            }
            ranks
        }
        backend => (0..=top).map(|k| ctx.differential_transpose(k).map(|d| d.rank_with(backend))).collect::<Result<_>>()?,
    };
    Ok((0..=top)
        .map(|k| ctx.layouts[k].dim - ranks[k] - if k > 0 { ranks[k - 1] } else { 0 })
        .collect())
}
