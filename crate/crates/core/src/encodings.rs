//! The encoding category `Ib^P` of infinitesimal bimodules and the encoding
//! operads `R^P`, `B^{P/}`, `B^P`, `L^P` of a discrete operad.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::collections::{CSequence, DiscreteOperad, Operation, SymCollection};
use crate::error::{invalid, Error, Result};
use crate::pointed::{enumerate_pointed_maps, PointedMap, Permutation};
use crate::util::for_each_index;

/// A morphism `(c_1..c_m; c) → (d_1..d_n; d)` of `Ib^P` over a shape
/// `f: ⟨n⟩ → ⟨m⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IbMorphism {
    source: CSequence,
    target: CSequence,
    shape: PointedMap,
    alpha0: Operation,
    alphas: Vec<Operation>,
}

fn alpha0_profile(source: &CSequence, target: &CSequence, f: &PointedMap) -> CSequence {
    let mut inputs = vec![source.output];
    inputs.extend(f.fiber(0).iter().map(|&j| target.inputs[j - 1]));
    CSequence::new(inputs, target.output)
}

fn alpha_profile(source: &CSequence, target: &CSequence, f: &PointedMap, i: usize) -> CSequence {
    CSequence::new(f.fiber(i).iter().map(|&j| target.inputs[j - 1]).collect(), source.inputs[i - 1])
}

impl IbMorphism {
    pub fn new(
        source: CSequence,
        target: CSequence,
        shape: PointedMap,
        alpha0: Operation,
        alphas: Vec<Operation>,
    ) -> Result<Self> {
        if shape.source_size() != target.arity() || shape.target_size() != source.arity() {
            return Err(Error::LevelMismatch(format!("shape {shape} does not fit {source} → {target}")));
        }
        if alphas.len() != source.arity() {
            return Err(Error::LevelMismatch(format!("expected {} components", source.arity())));
        }
        if alpha0.profile != alpha0_profile(&source, &target, &shape) {
            return Err(Error::LevelMismatch(format!("α_0 = {alpha0} has the wrong profile")));
        }
        for (i, a) in alphas.iter().enumerate() {
            if a.profile != alpha_profile(&source, &target, &shape, i + 1) {
                return Err(Error::LevelMismatch(format!("α_{} = {a} has the wrong profile", i + 1)));
            }
        }
        Ok(IbMorphism { source, target, shape, alpha0, alphas })
    }

    pub fn identity(p: &DiscreteOperad, seq: &CSequence) -> Self {
        IbMorphism {
            source: seq.clone(),
            target: seq.clone(),
            shape: PointedMap::identity(seq.arity()),
            alpha0: p.unit(seq.output),
            alphas: seq.inputs.iter().map(|&c| p.unit(c)).collect(),
        }
    }

    pub fn source(&self) -> &CSequence {
        &self.source
    }

    pub fn target(&self) -> &CSequence {
        &self.target
    }

    pub fn shape(&self) -> &PointedMap {
        &self.shape
    }

    pub fn alpha0(&self) -> &Operation {
        &self.alpha0
    }

    pub fn alphas(&self) -> &[Operation] {
        &self.alphas
    }

    /// `{"f": …, "alpha0": label, "alphas": [labels]}`.
    pub fn to_json(&self, p: &DiscreteOperad) -> serde_json::Value {
        json!({
            "source": self.source.display_with(p.colors()),
            "target": self.target.display_with(p.colors()),
            "f": self.shape.values(),
            "alpha0": p.label(&self.alpha0),
            "alphas": self.alphas.iter().map(|a| p.label(a)).collect::<Vec<_>>(),
        })
    }
}

/// Every morphism over the shape `f`, in canonical order.
pub fn ib_hom_over(p: &DiscreteOperad, source: &CSequence, target: &CSequence, f: &PointedMap) -> Result<Vec<IbMorphism>> {
    let mut levels = vec![p.operations(&alpha0_profile(source, target, f))?];
    for i in 1..=source.arity() {
        levels.push(p.operations(&alpha_profile(source, target, f, i))?);
    }
    let sizes: Vec<usize> = levels.iter().map(Vec::len).collect();
    let mut out = Vec::new();
    for_each_index(&sizes, |idx| {
        out.push(IbMorphism {
            source: source.clone(),
            target: target.clone(),
            shape: f.clone(),
            alpha0: levels[0][idx[0]].clone(),
            alphas: (1..levels.len()).map(|l| levels[l][idx[l]].clone()).collect(),
        });
    });
    Ok(out)
}

/// `Map_{Ib^P}(source, target)` graded by shape, shapes in lexicographic order.
pub fn ib_hom_graded(
    p: &DiscreteOperad,
    source: &CSequence,
    target: &CSequence,
) -> Result<Vec<(PointedMap, Vec<IbMorphism>)>> {
    enumerate_pointed_maps(target.arity(), source.arity())
        .into_iter()
        .map(|f| {
            let homs = ib_hom_over(p, source, target, &f)?;
            Ok((f, homs))
        })
        .collect()
}

pub fn ib_hom(p: &DiscreteOperad, source: &CSequence, target: &CSequence) -> Result<Vec<IbMorphism>> {
    Ok(ib_hom_graded(p, source, target)?.into_iter().flat_map(|(_, h)| h).collect())
}

/// `α*(θ) = (α_0 ∘_1 θ ∘ (α_1, …, α_m))^{σ_f⁻¹}`.
pub fn act(p: &DiscreteOperad, alpha: &IbMorphism, theta: &Operation) -> Result<Operation> {
    if theta.profile != alpha.source {
        return Err(Error::LevelMismatch(format!("{theta} is not in the level {}", alpha.source)));
    }
    let inner = p.compose(theta, &alpha.alphas)?;
    let mut plugs = vec![inner];
    plugs.extend(alpha.shape.fiber(0).iter().map(|&j| p.unit(alpha.target.inputs[j - 1])));
    let outer = p.compose(&alpha.alpha0, &plugs)?;
    p.act_op(&outer, &alpha.shape.sigma().inverse())
}

/// `1 ⊕ τ`, fixing the first input.
fn shift_fixing_first(tau: &Permutation) -> Permutation {
    let mut values = vec![1];
    values.extend(tau.values().iter().map(|v| v + 1));
    Permutation::new(values).expect("shifted permutation")
}

/// The composite `β ∘ α` in `Ib^P`.
pub fn ib_compose(p: &DiscreteOperad, beta: &IbMorphism, alpha: &IbMorphism) -> Result<IbMorphism> {
    if alpha.target != beta.source {
        return Err(Error::LevelMismatch(format!(
            "cannot compose {} → {} after {} → {}",
            beta.source, beta.target, alpha.source, alpha.target
        )));
    }
    let f = &alpha.shape;
    let g = &beta.shape;
    let shape = f.compose(g)?;
    let mut alphas = Vec::with_capacity(alpha.alphas.len());
    for (i, a) in alpha.alphas.iter().enumerate() {
        let js = f.fiber(i + 1);
        let plugs: Vec<Operation> = js.iter().map(|&j| beta.alphas[j - 1].clone()).collect();
        let order: Vec<usize> = js.iter().flat_map(|&j| g.fiber(j)).collect();
        let composed = p.compose(a, &plugs)?;
        alphas.push(p.act_op(&composed, &Permutation::sorting(&order))?);
    }
    let js0 = f.fiber(0);
    let mut plugs = vec![p.unit(alpha.source.output)];
    plugs.extend(js0.iter().map(|&j| beta.alphas[j - 1].clone()));
    let lifted = p.compose(&alpha.alpha0, &plugs)?;
    let plugged = p.partial(&beta.alpha0, 1, &lifted)?;
    let mut order: Vec<usize> = js0.iter().flat_map(|&j| g.fiber(j)).collect();
    order.extend(g.fiber(0));
    let alpha0 = p.act_op(&plugged, &shift_fixing_first(&Permutation::sorting(&order)))?;
    IbMorphism::new(alpha.source.clone(), beta.target.clone(), shape, alpha0, alphas)
}

/// Checks `act(id) = id` and `act(β∘α) = act(β)∘act(α)` on every composable
/// pair between objects of arity ≤ `max`, plus identity and associativity laws.
pub fn check_ib_functoriality(p: &DiscreteOperad, max: usize) -> Result<Vec<String>> {
    use rayon::prelude::*;
    let objects = CSequence::all(p.num_colors(), max);
    let homs: Vec<Vec<Vec<IbMorphism>>> = objects
        .par_iter()
        .map(|x| objects.iter().map(|y| ib_hom(p, x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let levels: Vec<Vec<Operation>> = objects.iter().map(|x| p.operations(x)).collect::<Result<_>>()?;
    let n = objects.len();
    let mut report: Vec<String> = (0..n)
        .into_par_iter()
        .map(|xi| -> Result<Vec<String>> {
            let mut out = Vec::new();
            let id = IbMorphism::identity(p, &objects[xi]);
            for theta in &levels[xi] {
                if act(p, &id, theta)? != *theta {
                    out.push(format!("identity moves {theta}"));
                }
            }
            for yi in 0..n {
                for alpha in &homs[xi][yi] {
                    if ib_compose(p, &IbMorphism::identity(p, &objects[yi]), alpha)? != *alpha
                        || ib_compose(p, alpha, &id)? != *alpha
                    {
                        out.push(format!("unit law fails at {}", alpha.shape));
                    }
                    let moved: Vec<Operation> =
                        levels[xi].iter().map(|t| act(p, alpha, t)).collect::<Result<_>>()?;
                    for zi in 0..n {
                        for beta in &homs[yi][zi] {
                            let ba = ib_compose(p, beta, alpha)?;
                            for (theta, mt) in levels[xi].iter().zip(&moved) {
                                if act(p, &ba, theta)? != act(p, beta, mt)? {
                                    out.push(format!(
                                        "act(β∘α) ≠ act(β)act(α) for {theta}, shapes {} then {}",
                                        alpha.shape, beta.shape
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    report.sort();
    Ok(report)
}

/// Checks `γ∘(β∘α) = (γ∘β)∘α` on all composable triples among objects of arity ≤ `max`.
pub fn check_ib_associativity(p: &DiscreteOperad, max: usize) -> Result<Vec<String>> {
    use rayon::prelude::*;
    let objects = CSequence::all(p.num_colors(), max);
    let homs: Vec<Vec<Vec<IbMorphism>>> = objects
        .iter()
        .map(|x| objects.iter().map(|y| ib_hom(p, x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let n = objects.len();
    let mut report: Vec<String> = (0..n)
        .into_par_iter()
        .map(|a| -> Result<Vec<String>> {
            let mut out = Vec::new();
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for f in &homs[a][b] {
                            for g in &homs[b][c] {
                                let gf = ib_compose(p, g, f)?;
                                for h in &homs[c][d] {
                                    if ib_compose(p, h, &gf)? != ib_compose(p, &ib_compose(p, h, g)?, f)? {
                                        out.push(format!(
                                            "associativity fails for shapes {}, {}, {}",
                                            f.shape, g.shape, h.shape
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    report.sort();
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    Ib,
    R,
    BunderP,
    B,
    L,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ib" | "Ib" => Ok(Variant::Ib),
            "r" | "R" => Ok(Variant::R),
            "bunderp" | "BunderP" | "b/" => Ok(Variant::BunderP),
            "b" | "B" => Ok(Variant::B),
            "l" | "L" => Ok(Variant::L),
            _ => invalid(format!("unknown encoding variant '{s}'")),
        }
    }
}

/// The grading index of an encoded operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    Pointed(PointedMap),
    Fin(PointedMap),
    Perm(Permutation),
}

/// One encoded operation: its shape, the outer factor and the per-input components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EncodedOp {
    pub shape: Shape,
    pub outer: Operation,
    pub components: Vec<Operation>,
}

/// Injection of an encoded set into its ambient variant, by element index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inclusion {
    pub ambient: Variant,
    pub images: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedOpSet {
    pub variant: Variant,
    pub inputs: Vec<CSequence>,
    pub output: CSequence,
    pub elements: Vec<EncodedOp>,
    pub inclusion: Option<Inclusion>,
}

/// The operations `variant(inputs; output)`, with the inclusion into the
/// ambient variant (R → Ib, L → B, B → B/).
pub fn encoded_ops(p: &DiscreteOperad, variant: Variant, inputs: &[CSequence], output: &CSequence) -> Result<EncodedOpSet> {
    let elements = encoded_elements(p, variant, inputs, output)?;
    let ambient = match variant {
        Variant::R => Some(Variant::Ib),
        Variant::L => Some(Variant::B),
        Variant::B => Some(Variant::BunderP),
        Variant::Ib | Variant::BunderP => None,
    };
    let inclusion = match ambient {
        None => None,
        Some(amb) => {
            let big = encoded_elements(p, amb, inputs, output)?;
            let images = elements
                .iter()
                .map(|e| {
                    let img = include(p, variant, inputs, e)?;
                    big.iter()
                        .position(|b| *b == img)
                        .ok_or_else(|| Error::Certificate(format!("inclusion image of {:?} missing", e.shape)))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(Inclusion { ambient: amb, images })
        }
    };
    Ok(EncodedOpSet { variant, inputs: inputs.to_vec(), output: output.clone(), elements, inclusion })
}

/// Image of an encoded operation under the canonical inclusion into the ambient variant.
pub fn include(p: &DiscreteOperad, variant: Variant, inputs: &[CSequence], e: &EncodedOp) -> Result<EncodedOp> {
    match (variant, &e.shape) {
        (Variant::R, Shape::Fin(f)) => Ok(EncodedOp {
            shape: Shape::Pointed(f.clone()),
            outer: p.unit(e.outer.profile.output),
            components: e.components.clone(),
        }),
        (Variant::B, Shape::Fin(f)) => {
            Ok(EncodedOp { shape: Shape::Pointed(f.clone()), outer: e.outer.clone(), components: e.components.clone() })
        }
        (Variant::L, Shape::Perm(a)) => Ok(EncodedOp {
            shape: Shape::Fin(a.to_pointed()),
            outer: e.outer.clone(),
            components: concat_inputs(inputs).into_iter().map(|c| p.unit(c)).collect(),
        }),
        _ => invalid(format!("{variant:?} has no inclusion for this shape")),
    }
}

fn concat_inputs(inputs: &[CSequence]) -> Vec<usize> {
    inputs.iter().flat_map(|s| s.inputs.iter().copied()).collect()
}

fn encoded_elements(p: &DiscreteOperad, variant: Variant, inputs: &[CSequence], output: &CSequence) -> Result<Vec<EncodedOp>> {
    let unary = matches!(variant, Variant::Ib | Variant::R);
    if unary && inputs.len() != 1 {
        return invalid(format!("{variant:?} only has unary operations"));
    }
    let colors = concat_inputs(inputs);
    let r = colors.len();
    let m = output.arity();
    let outer_colors: Vec<usize> = inputs.iter().map(|s| s.output).collect();
    let mut out = Vec::new();
    match variant {
        Variant::Ib | Variant::BunderP | Variant::R | Variant::B => {
            let pointed = matches!(variant, Variant::Ib | Variant::BunderP);
            if variant == Variant::R && inputs[0].output != output.output {
                return Ok(out);
            }
            for f in enumerate_pointed_maps(m, r) {
                if !pointed && !f.avoids_basepoint() {
                    continue;
                }
                let outer_level = if variant == Variant::R {
                    vec![p.unit(output.output)]
                } else {
                    let mut ins = outer_colors.clone();
                    ins.extend(f.fiber(0).iter().map(|&j| output.inputs[j - 1]));
                    p.operations(&CSequence::new(ins, output.output))?
                };
                let comps: Vec<Vec<Operation>> = (1..=r)
                    .map(|i| {
                        p.operations(&CSequence::new(
                            f.fiber(i).iter().map(|&j| output.inputs[j - 1]).collect(),
                            colors[i - 1],
                        ))
                    })
                    .collect::<Result<_>>()?;
                let mut sizes = vec![outer_level.len()];
                sizes.extend(comps.iter().map(Vec::len));
                let shape = if pointed { Shape::Pointed(f.clone()) } else { Shape::Fin(f.clone()) };
                for_each_index(&sizes, |idx| {
                    out.push(EncodedOp {
                        shape: shape.clone(),
                        outer: outer_level[idx[0]].clone(),
                        components: (0..r).map(|i| comps[i][idx[i + 1]].clone()).collect(),
                    });
                });
            }
        }
        Variant::L => {
            if m != r {
                return Ok(out);
            }
            let outer_level = p.operations(&CSequence::new(outer_colors, output.output))?;
            for alpha in Permutation::all(r) {
                if (1..=r).any(|j| output.inputs[j - 1] != colors[alpha.apply(j) - 1]) {
                    continue;
                }
                for o in &outer_level {
                    out.push(EncodedOp {
                        shape: Shape::Perm(alpha.clone()),
                        outer: o.clone(),
                        components: vec![],
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The `Σ_k` action on a `k`-ary encoded operation: permutes the input
/// sequences on the outer factor and, simultaneously, the blocks of components.
pub fn act_encoded(p: &DiscreteOperad, inputs: &[CSequence], e: &EncodedOp, sigma: &Permutation) -> Result<EncodedOp> {
    let k = inputs.len();
    if sigma.len() != k {
        return Err(Error::LevelMismatch(format!("{sigma} does not act on {k} inputs")));
    }
    let sizes: Vec<usize> = inputs.iter().map(CSequence::arity).collect();
    let mut starts = vec![0; k + 1];
    for b in 0..k {
        starts[b + 1] = starts[b] + sizes[b];
    }
    let mut new_start = vec![0; k];
    let mut acc = 0;
    for pos in 0..k {
        let b = sigma.apply(pos + 1) - 1;
        new_start[b] = acc;
        acc += sizes[b];
    }
    let r = starts[k];
    let mut pi = vec![0; r + 1];
    for b in 0..k {
        for o in 0..sizes[b] {
            pi[starts[b] + o + 1] = new_start[b] + o + 1;
        }
    }
    let extra = e.outer.arity() - k;
    let mut outer_perm: Vec<usize> = sigma.values().to_vec();
    outer_perm.extend(k + 1..=k + extra);
    let outer = p.act_op(&e.outer, &Permutation::new(outer_perm)?)?;
    let mut components = e.components.clone();
    for i in 1..=components.len() {
        components[pi[i] - 1] = e.components[i - 1].clone();
    }
    let relabel = |f: &PointedMap| PointedMap::new(f.source_size(), r, f.values().iter().map(|&v| pi[v]).collect());
    let shape = match &e.shape {
        Shape::Pointed(f) => Shape::Pointed(relabel(f)?),
        Shape::Fin(f) => Shape::Fin(relabel(f)?),
        Shape::Perm(a) => Shape::Perm(Permutation::new(a.values().iter().map(|&v| pi[v]).collect())?),
    };
    Ok(EncodedOp { shape, outer, components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn com_hom_counts_are_pointed_map_counts() {
        let com = DiscreteOperad::com(4);
        for n in 0..=3 {
            for m in 0..=3 {
                let h = ib_hom(&com, &CSequence::mono(n), &CSequence::mono(m)).unwrap();
                assert_eq!(h.len(), (n + 1).pow(m as u32));
            }
        }
    }

    #[test]
    fn ass_unary_homs() {
        let ass = DiscreteOperad::ass(3);
        let graded = ib_hom_graded(&ass, &CSequence::mono(1), &CSequence::mono(1)).unwrap();
        let counts: Vec<(Vec<usize>, usize)> = graded.iter().map(|(f, h)| (f.values().to_vec(), h.len())).collect();
        assert_eq!(counts, vec![(vec![0], 2), (vec![1], 1)]);
    }

    #[test]
    fn alpha_zero_fixes_mu_one() {
        let ass = DiscreteOperad::ass(3);
        let mu1 = ass.operations(&CSequence::mono(1)).unwrap().remove(0);
        let graded = ib_hom_graded(&ass, &CSequence::mono(1), &CSequence::mono(1)).unwrap();
        let alpha = graded[0].1.iter().find(|a| a.alpha0().to_string() == "[2,1]").unwrap();
        assert_eq!(act(&ass, alpha, &mu1).unwrap(), mu1);
    }

    #[test]
    fn functoriality_small() {
        for p in [DiscreteOperad::ass(3), DiscreteOperad::com(3)] {
            assert!(check_ib_functoriality(&p, 2).unwrap().is_empty());
            assert!(check_ib_associativity(&p, 1).unwrap().is_empty());
        }
    }

    #[test]
    fn bunderp_matches_ib_on_unary() {
        let ass = DiscreteOperad::ass(4);
        for n in 0..=2 {
            for m in 0..=2 {
                let (x, y) = (CSequence::mono(n), CSequence::mono(m));
                let a = encoded_ops(&ass, Variant::Ib, std::slice::from_ref(&x), &y).unwrap();
                let b = encoded_ops(&ass, Variant::BunderP, std::slice::from_ref(&x), &y).unwrap();
                assert_eq!(a.elements, b.elements);
                assert_eq!(a.elements.len(), ib_hom(&ass, &x, &y).unwrap().len());
            }
        }
        let zero = encoded_ops(&ass, Variant::BunderP, &[], &CSequence::mono(2)).unwrap();
        assert_eq!(zero.elements.len(), 2);
    }

    #[test]
    fn inclusions_are_injective() {
        let ass = DiscreteOperad::ass(4);
        let ins = [CSequence::mono(1), CSequence::mono(1)];
        for v in [Variant::B, Variant::L] {
            let s = encoded_ops(&ass, v, &ins, &CSequence::mono(2)).unwrap();
            let mut imgs = s.inclusion.unwrap().images;
            let n = imgs.len();
            imgs.sort();
            imgs.dedup();
            assert_eq!(imgs.len(), n);
        }
        let r = encoded_ops(&ass, Variant::R, &[CSequence::mono(2)], &CSequence::mono(2)).unwrap();
        assert_eq!(r.inclusion.unwrap().images.len(), r.elements.len());
    }

    #[test]
    fn encoded_action_law() {
        for p in [DiscreteOperad::ass(5), DiscreteOperad::com(5)] {
            let ins = vec![CSequence::mono(1), CSequence::mono(0), CSequence::mono(1)];
            let out = CSequence::mono(2);
            for v in [Variant::BunderP, Variant::B, Variant::L] {
                let set = encoded_ops(&p, v, &ins, &out).unwrap();
                for e in &set.elements {
                    for tau in Permutation::all(3) {
                        let moved_ins: Vec<CSequence> = tau.values().iter().map(|&i| ins[i - 1].clone()).collect();
                        let et = act_encoded(&p, &ins, e, &tau).unwrap();
                        let target = encoded_ops(&p, v, &moved_ins, &out).unwrap();
                        assert!(target.elements.contains(&et));
                        for sigma in Permutation::all(3) {
                            let lhs = act_encoded(&p, &moved_ins, &et, &sigma).unwrap();
                            assert_eq!(lhs, act_encoded(&p, &ins, e, &tau.compose(&sigma)).unwrap());
                        }
                    }
                }
            }
        }
    }
}
