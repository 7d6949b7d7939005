//! Functor cohomology over finite categories: linear functors, projective
//! resolutions, Ext, and the operadic tables built on them.
//!
//! Spectra are modeled by cochain complexes over a field. Every table records
//! the truncation of its base category.

mod bar;
mod cover;
mod functor;
mod les;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use bar::{bar_complex, ext_bar, BarKind, BarOptions};
pub use cover::{ext_cover, Resolution};
pub use functor::{constant, eta_shriek, f_ass_delta, f_operad, gamma_t, presentation, random_cokernel, representable, zero, BaseTag, LinearFunctor};
pub use les::{cosimplicial_cohomology, les_check_ass, LesReport, SlotReport};

use crate::category::{opposite, Category, FinCategory, MorId};
use crate::collections::DiscreteOperad;
use crate::error::{Error, Result};
use crate::exactla::{Backend, Field, FinMatrix};
use crate::twisted::{tw_category, TwCategory, TwComCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtBackend {
    /// Greedy representable cover of the source.
    Cover,
    /// `Ext_C(M, N) = Ext_{C^op}(DN, DM)`, covering `DN`.
    CoverDual,
    Bar(BarKind),
}

impl fmt::Display for ExtBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtBackend::Cover => "cover",
            ExtBackend::CoverDual => "cover-dual",
            ExtBackend::Bar(BarKind::Relative) => "bar",
            ExtBackend::Bar(BarKind::Absolute) => "bar-absolute",
            ExtBackend::Bar(BarKind::Unnormalized) => "bar-unnormalized",
        })
    }
}

impl FromStr for ExtBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cover" => ExtBackend::Cover,
            "cover-dual" => ExtBackend::CoverDual,
            "bar" => ExtBackend::Bar(BarKind::Relative),
            "bar-absolute" => ExtBackend::Bar(BarKind::Absolute),
            "bar-unnormalized" => ExtBackend::Bar(BarKind::Unnormalized),
            other => return Err(Error::Invalid(format!("unknown Ext backend {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ExtOptions {
    pub backend: ExtBackend,
    pub rank: Backend,
    /// Chain bound for the bar backends.
    pub max_chains: usize,
}

impl Default for ExtOptions {
    fn default() -> Self {
        ExtOptions { backend: ExtBackend::Cover, rank: Backend::Gaussian, max_chains: BarOptions::default().max_chains }
    }
}

impl ExtOptions {
    pub fn with_backend(backend: ExtBackend) -> Self {
        ExtOptions { backend, ..Default::default() }
    }
}

fn check_same_base<F: Field>(cat: &dyn Category, m: &LinearFunctor<F>, n: &LinearFunctor<F>) -> Result<()> {
    let tag = BaseTag::of(cat);
    if *m.base() != tag || *n.base() != tag {
        return Err(Error::Invalid("Ext arguments live on different base categories".into()));
    }
    if m.field() != n.field() {
        return Err(Error::FieldMismatch("Ext arguments are over different fields".into()));
    }
    Ok(())
}

/// `dim Ext^k(m, n)` for `0 ≤ k ≤ top`.
pub fn ext<F: Field>(cat: &dyn Category, m: &LinearFunctor<F>, n: &LinearFunctor<F>, top: usize, options: ExtOptions) -> Result<Vec<usize>> {
    check_same_base(cat, m, n)?;
    match options.backend {
        ExtBackend::Cover => ext_cover(cat, m, n, top, options.rank),
        ExtBackend::CoverDual => {
            let op = opposite(cat);
            ext_cover(&op, &n.dual(cat, &op), &m.dual(cat, &op), top, options.rank)
        }
        ExtBackend::Bar(kind) => {
            ext_bar(cat, m, n, top, BarOptions { kind, max_chains: options.max_chains, rank_backend: options.rank })
        }
    }
}

/// Dimension of the space of natural transformations `m ⇒ n`, from the full
/// system `N(f) φ_x = φ_y M(f)` over every morphism.
pub fn naturality_dim<F: Field>(cat: &dyn Category, m: &LinearFunctor<F>, n: &LinearFunctor<F>) -> Result<usize> {
    check_same_base(cat, m, n)?;
    let field = m.field();
    let mut offsets = Vec::with_capacity(cat.num_objects());
    let mut unknowns = 0;
    for x in 0..cat.num_objects() {
        offsets.push(unknowns);
        unknowns += n.dim(x) * m.dim(x);
    }
    let mut entries = Vec::new();
    let mut row = 0;
    for f in 0..cat.num_morphisms() {
        let (x, y) = (cat.source(f), cat.target(f));
        let (mf, nf) = (m.map(f), n.map(f));
        let (dmx, dmy) = (m.dim(x), m.dim(y));
        // (N(f) φ_x − φ_y M(f))[i][j]
        for i in 0..n.dim(y) {
            for j in 0..dmx {
                for (c, a) in nf.row(i) {
                    entries.push((row, offsets[x] + c * dmx + j, a.clone()));
                }
                for d in 0..dmy {
                    let b = mf.get(d, j);
                    if !field.is_zero(&b) {
                        entries.push((row, offsets[y] + i * dmy + d, field.neg(&b)));
                    }
                }
                row += 1;
            }
        }
    }
    let system = FinMatrix::from_triplets(field, row, unknowns, entries)?;
    Ok(unknowns - system.rank())
}

/// `Tw(P)≤N` together with its tabulated composition.
pub struct TwBase {
    pub tw: TwCategory,
    pub table: FinCategory,
}

impl TwBase {
    pub fn new(p: &DiscreteOperad, n: usize) -> Result<Self> {
        let tw = tw_category(p, n)?;
        let table = FinCategory::tabulate(&tw, format!("Tw({})<={n}", p.name()));
        Ok(TwBase { tw, table })
    }

    pub fn truncation(&self) -> usize {
        self.tw.truncation()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuillenTable {
    pub operad: String,
    pub truncation: usize,
    pub field: String,
    pub backend: String,
    /// `(n, dim H^n_Q)`.
    pub degrees: Vec<(i64, usize)>,
}

/// `H^n_Q(P; F) = Ext^{n+1}(F_P, F)` over `Tw(P)≤N` for `lo ≤ n ≤ hi`;
/// zero below `−1`.
pub fn quillen_cohomology<F: Field>(base: &TwBase, coeff: &LinearFunctor<F>, lo: i64, hi: i64, options: ExtOptions) -> Result<QuillenTable> {
    let fp = f_operad(&base.tw, coeff.field())?;
    let top = (hi + 1).max(0) as usize;
    let dims = if hi >= -1 { ext(&base.table, &fp, coeff, top, options)? } else { vec![] };
    let degrees = (lo..=hi)
        .map(|n| (n, if n < -1 { 0 } else { dims[(n + 1) as usize] }))
        .collect();
    Ok(QuillenTable {
        operad: base.tw.operad().name().to_string(),
        truncation: base.truncation(),
        field: coeff.field().descriptor().to_string(),
        backend: options.backend.to_string(),
        degrees,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableTable {
    pub truncations: Vec<usize>,
    pub field: String,
    pub backend: String,
    /// `values[k][j] = dim Ext^k(t, T)` at truncation `truncations[j]`.
    pub values: Vec<Vec<usize>>,
    /// Whether degree `k` agrees across all reported truncations.
    pub stable: Vec<bool>,
}

/// `Ext^k_Γ(t, T)` over `(Fin_*^op)≤N` for each `N`; `target(N, base)`
/// builds `T` at that truncation.
pub fn stable_cohomotopy<F: Field>(
    field: &F,
    truncations: &[usize],
    top: usize,
    options: ExtOptions,
    target: impl Fn(usize, &FinCategory) -> Result<LinearFunctor<F>>,
) -> Result<StableTable> {
    let mut columns = Vec::new();
    for &n in truncations {
        let base = crate::category::pointed_op(n);
        let t = gamma_t(&base, field)?;
        let coeff = target(n, &base)?;
        columns.push(ext(&base, &t, &coeff, top, options)?);
    }
    let values: Vec<Vec<usize>> = (0..=top).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
    let stable = values.iter().map(|row| row.windows(2).all(|w| w[0] == w[1])).collect();
    Ok(StableTable {
        truncations: truncations.to_vec(),
        field: field.descriptor().to_string(),
        backend: options.backend.to_string(),
        values,
        stable,
    })
}

/// The morphism map `Tw(Com)≤N → (Fin_*^op)≤N` of a certificate; objects
/// correspond by arity.
pub fn tw_com_morphism_map(cert: &TwComCertificate) -> Vec<MorId> {
    let total = cert.homs.iter().map(|h| h.pairs.len()).sum();
    let mut phi = vec![0; total];
    for h in &cert.homs {
        for &(f, g) in &h.pairs {
            phi[f] = g;
        }
    }
    phi
}

/// Pulls a functor on `(Fin_*^op)≤N` back to `Tw(Com)≤N` along a certificate.
pub fn pull_back_to_tw_com<F: Field>(base: &TwBase, cert: &TwComCertificate, t: &LinearFunctor<F>) -> Result<LinearFunctor<F>> {
    let phi = tw_com_morphism_map(cert);
    t.restrict(&base.table, |x| x, |f| phi[f])
}

#[cfg(test)]
mod tests;
