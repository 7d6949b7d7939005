use super::composite::{canonicalize, Composite};
use super::{Block, CSequence, CompositeElement, DiscreteOperad, Element, Operation, SymCollection};
use crate::error::{Error, Result};
use crate::pointed::Permutation;

/// `H_n P = P^{∘(n+2)}`, nested as `P∘(P∘(…∘P))`.
pub struct Hochschild<'a> {
    operad: &'a DiscreteOperad,
    degree: usize,
    product: Box<dyn SymCollection + 'a>,
}

fn iterated<'a>(p: &'a DiscreteOperad, factors: usize, k_bound: Option<usize>) -> Result<Box<dyn SymCollection + 'a>> {
    if factors == 1 {
        return Ok(Box::new(p));
    }
    Ok(Box::new(Composite::new(p, iterated(p, factors - 1, k_bound)?, k_bound)?))
}

impl<'a> Hochschild<'a> {
    pub fn new(operad: &'a DiscreteOperad, degree: usize, k_bound: Option<usize>) -> Result<Self> {
        Ok(Hochschild { operad, degree, product: iterated(operad, degree + 2, k_bound)? })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn face(&self, i: usize, e: &Element) -> Result<Element> {
        hochschild_face(self.operad, self.degree, i, e)
    }

    pub fn degeneracy(&self, i: usize, e: &Element) -> Result<Element> {
        hochschild_degeneracy(self.operad, self.degree, i, e)
    }
}

impl SymCollection for Hochschild<'_> {
    fn num_colors(&self) -> usize {
        self.product.num_colors()
    }
    fn truncation(&self) -> usize {
        self.product.truncation()
    }
    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        self.product.level(seq)
    }
    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        self.product.act(e, sigma)
    }
}

/// The level `(H_n P)(seq)`.
pub fn hochschild(p: &DiscreteOperad, degree: usize, seq: &CSequence, k_bound: Option<usize>) -> Result<Vec<Element>> {
    Hochschild::new(p, degree, k_bound)?.level(seq)
}

fn comp(e: &Element) -> Result<&CompositeElement> {
    match e {
        Element::Comp(c) => Ok(c),
        other => Err(Error::LevelMismatch(format!("{other} is not a composite element"))),
    }
}

fn op(e: &Element) -> Result<&Operation> {
    e.as_op().ok_or_else(|| Error::LevelMismatch(format!("{e} is not an operation")))
}

/// `d_i: H_n P → H_{n-1} P`, composing factors `i+1` and `i+2`.
pub fn hochschild_face(p: &DiscreteOperad, degree: usize, i: usize, e: &Element) -> Result<Element> {
    if degree == 0 || i > degree {
        return Err(Error::Invalid(format!("face d_{i} is not defined in degree {degree}")));
    }
    face(p, degree + 2, i, e)
}

fn face(p: &DiscreteOperad, factors: usize, i: usize, e: &Element) -> Result<Element> {
    let ce = comp(e)?;
    let theta = op(&ce.outer)?;
    if i > 0 {
        let blocks = ce
            .blocks
            .iter()
            .map(|b| Ok(Block { inner: face(p, factors - 1, i - 1, &b.inner)?, inputs: b.inputs.clone() }))
            .collect::<Result<Vec<_>>>()?;
        let out = CompositeElement { outer: ce.outer.clone(), blocks, profile: ce.profile.clone() };
        return Ok(Element::Comp(Box::new(canonicalize(p, out)?)));
    }
    if factors == 2 {
        let psis = ce.blocks.iter().map(|b| op(&b.inner).cloned()).collect::<Result<Vec<_>>>()?;
        let gamma = p.compose(theta, &psis)?;
        let w: Vec<usize> = ce.blocks.iter().flat_map(|b| b.inputs.iter().copied()).collect();
        return Ok(Element::Op(p.act_op(&gamma, &Permutation::new(w)?.inverse())?));
    }
    let mut psis = Vec::with_capacity(ce.blocks.len());
    let mut blocks = Vec::new();
    for b in &ce.blocks {
        let inner = comp(&b.inner)?;
        psis.push(op(&inner.outer)?.clone());
        for y in &inner.blocks {
            blocks.push(Block { inner: y.inner.clone(), inputs: y.inputs.iter().map(|&t| b.inputs[t - 1]).collect() });
        }
    }
    let outer = Element::Op(p.compose(theta, &psis)?);
    let out = CompositeElement { outer, blocks, profile: ce.profile.clone() };
    Ok(Element::Comp(Box::new(canonicalize(p, out)?)))
}

/// `s_i: H_n P → H_{n+1} P`, inserting units after factor `i+1`.
pub fn hochschild_degeneracy(p: &DiscreteOperad, degree: usize, i: usize, e: &Element) -> Result<Element> {
    if i > degree {
        return Err(Error::Invalid(format!("degeneracy s_{i} is not defined in degree {degree}")));
    }
    degeneracy(p, i, e)
}

fn degeneracy(p: &DiscreteOperad, i: usize, e: &Element) -> Result<Element> {
    let ce = comp(e)?;
    let blocks = ce
        .blocks
        .iter()
        .map(|b| {
            let inner = if i == 0 {
                let profile = b.inner.profile();
                let unit = Element::Op(p.unit(profile.output));
                let arity = profile.arity();
                Element::Comp(Box::new(CompositeElement {
                    outer: unit,
                    blocks: vec![Block { inner: b.inner.clone(), inputs: (1..=arity).collect() }],
                    profile,
                }))
            } else {
                degeneracy(p, i - 1, &b.inner)?
            };
            Ok(Block { inner, inputs: b.inputs.clone() })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = CompositeElement { outer: ce.outer.clone(), blocks, profile: ce.profile.clone() };
    Ok(Element::Comp(Box::new(canonicalize(p, out)?)))
}

/// Checks every simplicial identity on all elements of degree ≤ `max_degree`
/// and arity ≤ `max_arity`; returns the violations.
pub fn check_simplicial_identities(
    p: &DiscreteOperad,
    max_degree: usize,
    max_arity: usize,
    k_bound: Option<usize>,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for n in 0..=max_degree {
        let h = Hochschild::new(p, n, k_bound)?;
        for seq in CSequence::all(p.num_colors(), max_arity) {
            for x in h.level(&seq)? {
                let d = |i: usize, deg: usize, e: &Element| hochschild_face(p, deg, i, e);
                let s = |i: usize, deg: usize, e: &Element| hochschild_degeneracy(p, deg, i, e);
                for j in 0..=n {
                    for i in 0..j {
                        if n >= 2 && d(i, n - 1, &d(j, n, &x)?)? != d(j - 1, n - 1, &d(i, n, &x)?)? {
                            out.push(format!("d_{i} d_{j} != d_{} d_{i} on {x}", j - 1));
                        }
                    }
                    let sx = s(j, n, &x)?;
                    if d(j, n + 1, &sx)? != x || d(j + 1, n + 1, &sx)? != x {
                        out.push(format!("d s_{j} != id on {x}"));
                    }
                    for i in 0..=n + 1 {
                        if i < j {
                            if d(i, n + 1, &sx)? != s(j - 1, n - 1, &d(i, n, &x)?)? {
                                out.push(format!("d_{i} s_{j} != s_{} d_{i} on {x}", j - 1));
                            }
                        } else if i > j + 1 && d(i, n + 1, &sx)? != s(j, n - 1, &d(i - 1, n, &x)?)? {
                            out.push(format!("d_{i} s_{j} != s_{j} d_{} on {x}", i - 1));
                        }
                    }
                    for i in 0..=j {
                        if s(i, n + 1, &sx)? != s(j + 1, n + 1, &s(i, n, &x)?)? {
                            out.push(format!("s_{i} s_{j} != s_{} s_{i} on {x}", j + 1));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collections::{check_action_laws, Generator};

    #[test]
    fn unit_operad_faces_agree() {
        let u = DiscreteOperad::unit_operad(vec!["c".into()], 2).unwrap();
        let seq = CSequence::mono(1);
        let h1 = hochschild(&u, 1, &seq, None).unwrap();
        assert_eq!(h1.len(), 1);
        for x in &h1 {
            assert_eq!(hochschild_face(&u, 1, 0, x).unwrap(), hochschild_face(&u, 1, 1, x).unwrap());
        }
    }

    #[test]
    fn free_binary_simplicial_identities() {
        let p = DiscreteOperad::free_reduced(vec![Generator { name: "m".into(), arity: 2 }], 3).unwrap();
        assert!(check_simplicial_identities(&p, 2, 3, None).unwrap().is_empty());
        let h = Hochschild::new(&p, 1, None).unwrap();
        assert!(check_action_laws(&h, 3).unwrap().is_empty());
    }

    #[test]
    fn ass_bounded_simplicial_identities() {
        let p = DiscreteOperad::ass(4);
        assert!(check_simplicial_identities(&p, 1, 2, Some(2)).unwrap().is_empty());
    }
}
