//! Symmetric collections valued in finite sets, discrete operads, composite
//! and infinitesimal composite products, symmetrization and the Hochschild
//! simplicial object.

mod axioms;
mod composite;
mod hochschild;
mod operad;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pointed::Permutation;

pub use axioms::check_operad_axioms;
pub use composite::{
    composite_product, free_infinitesimal_bimodule, infinitesimal_composite, symmetrize,
    ArityFilter, Composite, CompositeLevel, EmptyCollection, Infinitesimal, NsCollection,
    Symmetrized,
};
pub use hochschild::{
    check_simplicial_identities, hochschild, hochschild_degeneracy, hochschild_face, Hochschild,
};
pub use operad::{
    build_operad, ActionEntry, ComposeEntry, DiscreteOperad, ElementRef, Generator, OperadFile,
    OperadKind, OperadSpec, OperadTable,
};
pub use tree::PlanarTree;

pub type Color = usize;

/// A profile `(c_1, …, c_n; c)` of colors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CSequence {
    pub inputs: Vec<Color>,
    pub output: Color,
}

impl CSequence {
    pub fn new(inputs: Vec<Color>, output: Color) -> Self {
        CSequence { inputs, output }
    }

    /// The single-colored profile of arity `n`.
    pub fn mono(n: usize) -> Self {
        CSequence { inputs: vec![0; n], output: 0 }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// `(c_σ(1), …, c_σ(n); c)`.
    pub fn permuted(&self, sigma: &Permutation) -> CSequence {
        CSequence {
            inputs: sigma.values().iter().map(|&k| self.inputs[k - 1]).collect(),
            output: self.output,
        }
    }

    /// Colors of the inputs listed in `positions` (1-based).
    pub fn restrict(&self, positions: &[usize], output: Color) -> CSequence {
        CSequence { inputs: positions.iter().map(|&k| self.inputs[k - 1]).collect(), output }
    }

    pub fn display_with(&self, colors: &[String]) -> String {
        let ins: Vec<&str> = self.inputs.iter().map(|&c| colors[c].as_str()).collect();
        format!("{};{}", ins.join(","), colors[self.output])
    }

    /// All profiles over `colors` colors with arity ≤ `max`, ordered by arity,
    /// then inputs, then output.
    pub fn all(colors: usize, max: usize) -> Vec<CSequence> {
        let mut out = Vec::new();
        for n in 0..=max {
            let count = colors.pow(n as u32);
            for code in 0..count {
                let mut inputs = vec![0; n];
                let mut rest = code;
                for slot in inputs.iter_mut().rev() {
                    *slot = rest % colors;
                    rest /= colors;
                }
                for c in 0..colors {
                    out.push(CSequence { inputs: inputs.clone(), output: c });
                }
            }
        }
        out
    }
}

impl fmt::Display for CSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ins: Vec<String> = self.inputs.iter().map(|c| c.to_string()).collect();
        write!(f, "({};{})", ins.join(","), self.output)
    }
}

/// The data identifying an operation inside its level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpData {
    /// Associative operations: `values[k-1]` is the position of input `k`.
    Perm(Permutation),
    Point,
    Unit,
    /// Free operations: a planar tree with inputs placed on its leaves.
    Tree(PlanarTree, Permutation),
    /// Index into a tabulated level.
    Label(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Operation {
    pub profile: CSequence,
    pub data: OpData,
}

impl Operation {
    pub fn arity(&self) -> usize {
        self.profile.arity()
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.data {
            OpData::Perm(p) => write!(f, "{p}"),
            OpData::Point => write!(f, "*{}", self.arity()),
            OpData::Unit => write!(f, "id{}", self.profile.output),
            OpData::Tree(t, p) => write!(f, "{t}{p}"),
            OpData::Label(i) => write!(f, "#{i}{}", self.profile),
        }
    }
}

/// Elements of collections built from operads and products of collections.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Op(Operation),
    /// The unique element of `I_C(c;c)` used as a filler in infinitesimal products.
    Id(Color),
    Comp(Box<CompositeElement>),
    /// An element `m ∈ M(c_σ(1), …, c_σ(n); c)` of a symmetrization, indexed by σ.
    Sym(Box<Element>, Permutation),
}

/// A representative `(θ; (ψ_1, S_1), …, (ψ_k, S_k))` of an element of `M∘N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CompositeElement {
    pub outer: Element,
    pub blocks: Vec<Block>,
    pub profile: CSequence,
}

/// An inner factor together with the increasing list of global inputs it receives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub inner: Element,
    pub inputs: Vec<usize>,
}

impl Element {
    pub fn profile(&self) -> CSequence {
        match self {
            Element::Op(op) => op.profile.clone(),
            Element::Id(c) => CSequence { inputs: vec![*c], output: *c },
            Element::Comp(c) => c.profile.clone(),
            Element::Sym(base, sigma) => {
                let b = base.profile();
                let inv = sigma.inverse();
                CSequence {
                    inputs: inv.values().iter().map(|&k| b.inputs[k - 1]).collect(),
                    output: b.output,
                }
            }
        }
    }

    pub fn as_op(&self) -> Option<&Operation> {
        match self {
            Element::Op(op) => Some(op),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Op(op) => write!(f, "{op}"),
            Element::Id(c) => write!(f, "1_{c}"),
            Element::Comp(c) => {
                write!(f, "{}(", c.outer)?;
                for (i, b) in c.blocks.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}@{:?}", b.inner, b.inputs)?;
                }
                write!(f, ")")
            }
            Element::Sym(base, sigma) => write!(f, "{base}·{sigma}"),
        }
    }
}

/// A symmetric collection with finite levels up to a truncation bound.
pub trait SymCollection: Sync {
    fn num_colors(&self) -> usize;
    fn truncation(&self) -> usize;
    /// The level `M(seq)` in canonical order.
    fn level(&self, seq: &CSequence) -> Result<Vec<Element>>;
    /// The right action `σ*: M(c_1..c_n;c) → M(c_σ(1)..c_σ(n);c)`.
    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element>;

    fn has_nullary(&self) -> Result<bool> {
        for c in 0..self.num_colors() {
            if !self.level(&CSequence::new(vec![], c))?.is_empty() {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Checks `σ*τ* = (τσ)*` and `id* = id` on every element of every level up to `max`.
pub fn check_action_laws(m: &dyn SymCollection, max: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for seq in CSequence::all(m.num_colors(), max) {
        let perms = Permutation::all(seq.arity());
        for e in m.level(&seq)? {
            if m.act(&e, &Permutation::identity(seq.arity()))? != e {
                out.push(format!("identity moves {e}"));
            }
            for tau in &perms {
                let et = m.act(&e, tau)?;
                if et.profile() != seq.permuted(tau) {
                    out.push(format!("{tau}* sends {e} to the wrong level"));
                }
                for sigma in &perms {
                    if m.act(&et, sigma)? != m.act(&e, &tau.compose(sigma))? {
                        out.push(format!("action law fails for {e} at ({sigma}, {tau})"));
                    }
                }
            }
        }
    }
    Ok(out)
}
