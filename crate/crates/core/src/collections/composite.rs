use std::collections::BTreeMap;

use itertools::Itertools;

use super::{Block, CSequence, CompositeElement, Element, OpData, Operation, SymCollection};
use crate::error::{Error, Result};
use crate::pointed::Permutation;

impl<T: SymCollection + ?Sized> SymCollection for &T {
    fn num_colors(&self) -> usize {
        (**self).num_colors()
    }
    fn truncation(&self) -> usize {
        (**self).truncation()
    }
    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        (**self).level(seq)
    }
    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        (**self).act(e, sigma)
    }
}

impl<T: SymCollection + ?Sized> SymCollection for Box<T> {
    fn num_colors(&self) -> usize {
        (**self).num_colors()
    }
    fn truncation(&self) -> usize {
        (**self).truncation()
    }
    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        (**self).level(seq)
    }
    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        (**self).act(e, sigma)
    }
}

fn check_level(seq: &CSequence, colors: usize, truncation: usize) -> Result<()> {
    if seq.arity() > truncation {
        return Err(Error::TruncationExceeded { arity: seq.arity(), bound: truncation });
    }
    if seq.inputs.iter().chain(std::iter::once(&seq.output)).any(|&c| c >= colors) {
        return Err(Error::LevelMismatch(format!("{seq} uses an undeclared color")));
    }
    Ok(())
}

/// A nonsymmetric collection given by labeled levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsCollection {
    colors: usize,
    truncation: usize,
    levels: BTreeMap<CSequence, Vec<String>>,
}

impl NsCollection {
    pub fn new(colors: usize, truncation: usize, levels: BTreeMap<CSequence, Vec<String>>) -> Result<Self> {
        for seq in levels.keys() {
            check_level(seq, colors, truncation)?;
        }
        Ok(NsCollection { colors, truncation, levels })
    }

    pub fn empty(colors: usize, truncation: usize) -> Self {
        NsCollection { colors, truncation, levels: BTreeMap::new() }
    }

    /// One operation `μ_n` in every arity.
    pub fn planar_associative(truncation: usize) -> Self {
        let levels = (0..=truncation).map(|n| (CSequence::mono(n), vec![format!("mu{n}")])).collect();
        NsCollection { colors: 1, truncation, levels }
    }

    pub fn num_colors(&self) -> usize {
        self.colors
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        check_level(seq, self.colors, self.truncation)?;
        Ok(match self.levels.get(seq) {
            Some(labels) => (0..labels.len())
                .map(|i| Element::Op(Operation { profile: seq.clone(), data: OpData::Label(i) }))
                .collect(),
            None => vec![],
        })
    }

    pub fn label(&self, e: &Element) -> Option<&str> {
        match e {
            Element::Op(Operation { profile, data: OpData::Label(i) }) => {
                self.levels.get(profile).and_then(|l| l.get(*i)).map(String::as_str)
            }
            _ => None,
        }
    }
}

/// `Sym(M)`, the free symmetric collection on a nonsymmetric one.
#[derive(Clone, Debug)]
pub struct Symmetrized {
    base: NsCollection,
}

pub fn symmetrize(m: NsCollection) -> Symmetrized {
    Symmetrized { base: m }
}

impl Symmetrized {
    pub fn base(&self) -> &NsCollection {
        &self.base
    }
}

impl SymCollection for Symmetrized {
    fn num_colors(&self) -> usize {
        self.base.colors
    }

    fn truncation(&self) -> usize {
        self.base.truncation
    }

    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        check_level(seq, self.base.colors, self.base.truncation)?;
        let mut out = Vec::new();
        for sigma in Permutation::all(seq.arity()) {
            for m in self.base.level(&seq.permuted(&sigma))? {
                out.push(Element::Sym(Box::new(m), sigma.clone()));
            }
        }
        Ok(out)
    }

    fn act(&self, e: &Element, tau: &Permutation) -> Result<Element> {
        match e {
            Element::Sym(m, sigma) if sigma.len() == tau.len() => {
                Ok(Element::Sym(m.clone(), tau.inverse().compose(sigma)))
            }
            other => Err(Error::LevelMismatch(format!("{other} is not an element of a symmetrization"))),
        }
    }
}

/// The empty collection.
#[derive(Clone, Copy, Debug)]
pub struct EmptyCollection {
    pub colors: usize,
    pub truncation: usize,
}

impl SymCollection for EmptyCollection {
    fn num_colors(&self) -> usize {
        self.colors
    }
    fn truncation(&self) -> usize {
        self.truncation
    }
    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        check_level(seq, self.colors, self.truncation)?;
        Ok(vec![])
    }
    fn act(&self, e: &Element, _: &Permutation) -> Result<Element> {
        Err(Error::LevelMismatch(format!("{e} is not an element of the empty collection")))
    }
}

/// Drops every level of arity below `min_arity`.
pub struct ArityFilter<'a> {
    inner: Box<dyn SymCollection + 'a>,
    min_arity: usize,
}

impl<'a> ArityFilter<'a> {
    pub fn new(inner: impl SymCollection + 'a, min_arity: usize) -> Self {
        ArityFilter { inner: Box::new(inner), min_arity }
    }
}

impl SymCollection for ArityFilter<'_> {
    fn num_colors(&self) -> usize {
        self.inner.num_colors()
    }
    fn truncation(&self) -> usize {
        self.inner.truncation()
    }
    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        if seq.arity() < self.min_arity {
            check_level(seq, self.num_colors(), self.truncation())?;
            return Ok(vec![]);
        }
        self.inner.level(seq)
    }
    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        self.inner.act(e, sigma)
    }
}

fn block_key(b: &Block) -> (&[usize], &Element) {
    (&b.inputs, &b.inner)
}

/// Chooses the orbit representative: blocks sorted by `(inputs, inner)` and,
/// among identical blocks, the smallest outer element.
pub(crate) fn canonicalize(left: &dyn SymCollection, mut ce: CompositeElement) -> Result<CompositeElement> {
    let k = ce.blocks.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| block_key(&ce.blocks[a]).cmp(&block_key(&ce.blocks[b])));
    let sigma = Permutation::from_zero_based(order.iter().copied());
    if !sigma.is_identity() {
        ce.outer = left.act(&ce.outer, &sigma)?;
        let mut old: Vec<Option<Block>> = ce.blocks.into_iter().map(Some).collect();
        ce.blocks = order.iter().map(|&i| old[i].take().expect("each block once")).collect();
    }
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=k {
        if i == k || ce.blocks[i] != ce.blocks[start] {
            if i - start > 1 {
                runs.push((start, i));
            }
            start = i;
        }
    }
    if runs.is_empty() {
        return Ok(ce);
    }
    let mut best = ce.outer.clone();
    for choice in runs.iter().map(|&(a, b)| Permutation::all(b - a)).multi_cartesian_product() {
        let mut values: Vec<usize> = (1..=k).collect();
        for (&(a, _), p) in runs.iter().zip(&choice) {
            for (l, &v) in p.values().iter().enumerate() {
                values[a + l] = a + v;
            }
        }
        let cand = left.act(&ce.outer, &Permutation::new(values)?)?;
        if cand < best {
            best = cand;
        }
    }
    ce.outer = best;
    Ok(ce)
}

/// Applies `σ ∈ Σ_n` to the global inputs of a composite representative.
fn act_blocks(
    left: &dyn SymCollection,
    right: &dyn SymCollection,
    ce: &CompositeElement,
    sigma: &Permutation,
) -> Result<CompositeElement> {
    if sigma.len() != ce.profile.arity() {
        return Err(Error::LevelMismatch(format!("{sigma} does not act on {}", ce.profile)));
    }
    let inv = sigma.inverse();
    let mut blocks = Vec::with_capacity(ce.blocks.len());
    for b in &ce.blocks {
        let moved: Vec<usize> = b.inputs.iter().map(|&s| inv.apply(s)).collect();
        let tau = Permutation::sorting(&moved);
        let inner = match &b.inner {
            Element::Id(_) => b.inner.clone(),
            e if tau.is_identity() => e.clone(),
            e => right.act(e, &tau)?,
        };
        let mut inputs = moved;
        inputs.sort_unstable();
        blocks.push(Block { inner, inputs });
    }
    canonicalize(left, CompositeElement { outer: ce.outer.clone(), blocks, profile: ce.profile.permuted(sigma) })
}

fn as_composite(e: &Element) -> Result<&CompositeElement> {
    match e {
        Element::Comp(c) => Ok(c),
        other => Err(Error::LevelMismatch(format!("{other} is not a composite element"))),
    }
}

/// Set partitions of `{1..n}` with blocks ordered by their minima.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn rec(k: usize, n: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if k > n {
            out.push(current.clone());
            return;
        }
        for i in 0..current.len() {
            current[i].push(k);
            rec(k + 1, n, current, out);
            current[i].pop();
        }
        current.push(vec![k]);
        rec(k + 1, n, current, out);
        current.pop();
    }
    rec(1, n, &mut current, &mut out);
    out
}

/// The composite product `M∘N`, optionally truncated in the number of inner factors.
pub struct Composite<'a> {
    left: Box<dyn SymCollection + 'a>,
    right: Box<dyn SymCollection + 'a>,
    k_bound: Option<usize>,
}

impl<'a> Composite<'a> {
    pub fn new(left: impl SymCollection + 'a, right: impl SymCollection + 'a, k_bound: Option<usize>) -> Result<Self> {
        if left.num_colors() != right.num_colors() {
            return Err(Error::LevelMismatch("factors use different color sets".into()));
        }
        if let Some(k) = k_bound {
            if k > left.truncation() {
                return Err(Error::TruncationExceeded { arity: k, bound: left.truncation() });
            }
        } else if right.has_nullary()? {
            return Err(Error::UnboundedComposite);
        }
        Ok(Composite { left: Box::new(left), right: Box::new(right), k_bound })
    }

    pub fn k_bound(&self) -> Option<usize> {
        self.k_bound
    }

    pub fn left(&self) -> &dyn SymCollection {
        &*self.left
    }

    pub fn right(&self) -> &dyn SymCollection {
        &*self.right
    }
}

impl SymCollection for Composite<'_> {
    fn num_colors(&self) -> usize {
        self.left.num_colors()
    }

    fn truncation(&self) -> usize {
        self.left.truncation().min(self.right.truncation())
    }

    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        check_level(seq, self.num_colors(), self.truncation())?;
        let n = seq.arity();
        let colors = self.num_colors();
        let kmax = self.k_bound.map_or(n, |k| k);
        let mut nullary: Vec<Element> = Vec::new();
        if self.k_bound.is_some() {
            for b in 0..colors {
                nullary.extend(self.right.level(&CSequence::new(vec![], b))?);
            }
        }
        let mut out = Vec::new();
        for parts in set_partitions(n) {
            if parts.len() > kmax {
                continue;
            }
            let mut choices: Vec<Vec<Element>> = Vec::with_capacity(parts.len());
            for s in &parts {
                let mut opts = Vec::new();
                for b in 0..colors {
                    opts.extend(self.right.level(&seq.restrict(s, b))?);
                }
                choices.push(opts);
            }
            for e in 0..=kmax - parts.len() {
                for empties in nullary.iter().combinations_with_replacement(e) {
                    let mut head: Vec<Block> =
                        empties.into_iter().map(|x| Block { inner: x.clone(), inputs: vec![] }).collect();
                    head.sort_by(|a, b| block_key(a).cmp(&block_key(b)));
                    let repeated = head.windows(2).any(|w| w[0] == w[1]);
                    for inners in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
                        let mut blocks = head.clone();
                        blocks.extend(
                            inners.into_iter().zip(&parts).map(|(x, s)| Block { inner: x.clone(), inputs: s.clone() }),
                        );
                        let outer_seq =
                            CSequence::new(blocks.iter().map(|b| b.inner.profile().output).collect(), seq.output);
                        for theta in self.left.level(&outer_seq)? {
                            let ce = CompositeElement { outer: theta, blocks: blocks.clone(), profile: seq.clone() };
                            let ce = if repeated { canonicalize(&*self.left, ce)? } else { ce };
                            out.push(Element::Comp(Box::new(ce)));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        let ce = as_composite(e)?;
        Ok(Element::Comp(Box::new(act_blocks(&*self.left, &*self.right, ce, sigma)?)))
    }
}

/// A level of a composite product, flagged when the inner-factor count was bounded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeLevel {
    pub seq: CSequence,
    pub elements: Vec<Element>,
    pub k_truncated: Option<usize>,
}

pub fn composite_product(
    m: &dyn SymCollection,
    n: &dyn SymCollection,
    seq: &CSequence,
    k_bound: Option<usize>,
) -> Result<CompositeLevel> {
    let c = Composite::new(m, n, k_bound)?;
    Ok(CompositeLevel { seq: seq.clone(), elements: c.level(seq)?, k_truncated: k_bound })
}

/// The infinitesimal composite `M∘_(1)N`: exactly one inner factor from `N`,
/// all others identities.
pub struct Infinitesimal<'a> {
    left: Box<dyn SymCollection + 'a>,
    right: Box<dyn SymCollection + 'a>,
    truncation: usize,
}

impl<'a> Infinitesimal<'a> {
    pub fn new(left: impl SymCollection + 'a, right: impl SymCollection + 'a) -> Result<Self> {
        if left.num_colors() != right.num_colors() {
            return Err(Error::LevelMismatch("factors use different color sets".into()));
        }
        let slack = usize::from(right.has_nullary()?);
        let truncation = right.truncation().min(left.truncation().saturating_sub(slack));
        Ok(Infinitesimal { left: Box::new(left), right: Box::new(right), truncation })
    }
}

impl SymCollection for Infinitesimal<'_> {
    fn num_colors(&self) -> usize {
        self.left.num_colors()
    }

    fn truncation(&self) -> usize {
        self.truncation
    }

    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        check_level(seq, self.num_colors(), self.truncation)?;
        let n = seq.arity();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let s: Vec<usize> = (1..=n).filter(|k| mask >> (k - 1) & 1 == 1).collect();
            for b in 0..self.num_colors() {
                for psi in self.right.level(&seq.restrict(&s, b))? {
                    let mut blocks: Vec<Block> = (1..=n)
                        .filter(|k| mask >> (k - 1) & 1 == 0)
                        .map(|k| Block { inner: Element::Id(seq.inputs[k - 1]), inputs: vec![k] })
                        .collect();
                    blocks.push(Block { inner: psi, inputs: s.clone() });
                    blocks.sort_by(|a, b| block_key(a).cmp(&block_key(b)));
                    let outer_seq =
                        CSequence::new(blocks.iter().map(|b| b.inner.profile().output).collect(), seq.output);
                    for theta in self.left.level(&outer_seq)? {
                        out.push(Element::Comp(Box::new(CompositeElement {
                            outer: theta,
                            blocks: blocks.clone(),
                            profile: seq.clone(),
                        })));
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        let ce = as_composite(e)?;
        Ok(Element::Comp(Box::new(act_blocks(&*self.left, &*self.right, ce, sigma)?)))
    }
}

pub fn infinitesimal_composite(m: &dyn SymCollection, n: &dyn SymCollection, seq: &CSequence) -> Result<Vec<Element>> {
    Infinitesimal::new(m, n)?.level(seq)
}

/// `P∘_(1)(M∘P)` at `seq`.
pub fn free_infinitesimal_bimodule(
    p: &dyn SymCollection,
    m: &dyn SymCollection,
    seq: &CSequence,
    k_bound: Option<usize>,
) -> Result<Vec<Element>> {
    let inner = Composite::new(m, p, k_bound)?;
    Infinitesimal::new(p, inner)?.level(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::{check_action_laws, DiscreteOperad, Generator};

    fn binary() -> DiscreteOperad {
        DiscreteOperad::free_reduced(vec![Generator { name: "m".into(), arity: 2 }], 4).unwrap()
    }

    #[test]
    fn partitions_are_bell() {
        let counts: Vec<usize> = (0..=5).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn unit_laws_count() {
        let ass = DiscreteOperad::ass(3);
        let unit = DiscreteOperad::unit_operad(vec!["c".into()], 3).unwrap();
        for n in 0..=3 {
            let seq = CSequence::mono(n);
            let m = ass.level(&seq).unwrap().len();
            assert_eq!(composite_product(&unit, &ass, &seq, Some(1)).unwrap().elements.len(), m);
            assert_eq!(composite_product(&ass, &unit, &seq, None).unwrap().elements.len(), m);
        }
    }

    #[test]
    fn unreduced_right_factor_needs_bound() {
        let ass = DiscreteOperad::ass(3);
        assert!(matches!(
            composite_product(&ass, &ass, &CSequence::mono(1), None),
            Err(Error::UnboundedComposite)
        ));
        assert!(matches!(
            composite_product(&ass, &ass, &CSequence::mono(1), Some(4)),
            Err(Error::TruncationExceeded { .. })
        ));
    }

    #[test]
    fn symmetrized_planar_associative_counts() {
        let s = symmetrize(NsCollection::planar_associative(4));
        for n in 0..=4 {
            let expected: usize = (1..=n).product();
            assert_eq!(s.level(&CSequence::mono(n)).unwrap().len(), expected);
        }
        assert!(check_action_laws(&s, 4).unwrap().is_empty());
    }

    #[test]
    fn composite_action_laws() {
        let p = binary();
        let c = Composite::new(&p, &p, None).unwrap();
        assert!(check_action_laws(&c, 3).unwrap().is_empty());
        let i = Infinitesimal::new(&p, &p).unwrap();
        assert!(check_action_laws(&i, 3).unwrap().is_empty());
    }

    #[test]
    fn bounded_composite_with_nullary_is_closed_under_action() {
        let com = DiscreteOperad::com(3);
        let c = Composite::new(&com, &com, Some(3)).unwrap();
        assert!(check_action_laws(&c, 2).unwrap().is_empty());
    }
}
