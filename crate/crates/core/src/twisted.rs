//! The twisted arrow category `Tw(P)` of a discrete operad, the discrete
//! Grothendieck construction, and certified comparisons with `Fin_*^op`
//! and `Δ`.

use std::collections::HashMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{
    pointed_op, simplex_category, simplex_map, Category, FinCategory, HomLayout, MorId, SetFunctor,
};
use crate::collections::{CSequence, DiscreteOperad, OpData, Operation, SymCollection};
use crate::encodings::{act, ib_compose, ib_hom, IbMorphism};
use crate::error::{Error, Result};
use crate::pointed::{in_iota_image, iota, IotaPreimage, Permutation, PointedMap};

/// A morphism `μ → ν` of `Tw(P)` witnessed by `α` with `α*(μ) = ν`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwMorphism {
    pub source: Operation,
    pub target: Operation,
    pub witness: IbMorphism,
}

/// `Tw(P)≤N`: operations of arity ≤ N and the Ib-morphisms between them.
/// Composition is computed on demand from `ib_compose`.
pub struct TwCategory {
    operad: DiscreteOperad,
    truncation: usize,
    objects: Vec<Operation>,
    index: HashMap<Operation, usize>,
    layout: HomLayout,
    morphisms: Vec<IbMorphism>,
    identities: Vec<MorId>,
}

/// Builds `Tw(P)≤N`. Hom-sets into arity `n` need `P` up to arity `n+1`
/// (through `α_0`), so rule-based operads are extended internally.
pub fn tw_category(p: &DiscreteOperad, n: usize) -> Result<TwCategory> {
    if n > p.truncation() {
        return Err(Error::TruncationExceeded { arity: n, bound: p.truncation() });
    }
    let q = if p.truncation() > n { p.clone() } else { p.with_truncation(n + 1)? };
    let objects = p.all_operations(n)?;
    let index: HashMap<Operation, usize> = objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
    let targets = CSequence::all(q.num_colors(), n);
    let per_source: Vec<Vec<Vec<IbMorphism>>> = objects
        .par_iter()
        .map(|mu| -> Result<Vec<Vec<IbMorphism>>> {
            let mut buckets = vec![Vec::new(); objects.len()];
            for t in &targets {
                for alpha in ib_hom(&q, &mu.profile, t)? {
                    let nu = act(&q, &alpha, mu)?;
                    let y = *index
                        .get(&nu)
                        .ok_or_else(|| Error::LevelMismatch(format!("{nu} is not an object")))?;
                    buckets[y].push(alpha);
                }
            }
            for b in &mut buckets {
                b.sort();
            }
            Ok(buckets)
        })
        .collect::<Result<_>>()?;
    let layout = HomLayout::new(objects.len(), |x, y| per_source[x][y].len());
    let morphisms: Vec<IbMorphism> = per_source.into_iter().flatten().flatten().collect();
    let mut tw = TwCategory { operad: q, truncation: n, objects, index, layout, morphisms, identities: vec![] };
    tw.identities = (0..tw.objects.len())
        .map(|x| {
            let id = IbMorphism::identity(&tw.operad, &tw.objects[x].profile);
            tw.find(x, x, &id).ok_or_else(|| Error::Certificate(format!("identity of {} missing", tw.objects[x])))
        })
        .collect::<Result<_>>()?;
    Ok(tw)
}

impl TwCategory {
    pub fn operad(&self) -> &DiscreteOperad {
        &self.operad
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn objects(&self) -> &[Operation] {
        &self.objects
    }

    pub fn object_index(&self, op: &Operation) -> Option<usize> {
        self.index.get(op).copied()
    }

    pub fn witness(&self, f: MorId) -> &IbMorphism {
        &self.morphisms[f]
    }

    pub fn morphism(&self, f: MorId) -> TwMorphism {
        TwMorphism {
            source: self.objects[self.layout.source(f)].clone(),
            target: self.objects[self.layout.target(f)].clone(),
            witness: self.morphisms[f].clone(),
        }
    }

    /// Id of the morphism `x → y` witnessed by `alpha`.
    pub fn find(&self, x: usize, y: usize, alpha: &IbMorphism) -> Option<MorId> {
        let r = self.layout.hom(x, y);
        self.morphisms[r.clone()].binary_search(alpha).ok().map(|i| r.start + i)
    }

    pub fn try_compose(&self, g: MorId, f: MorId) -> Result<MorId> {
        let (x, y, z) = (self.layout.source(f), self.layout.target(f), self.layout.target(g));
        if self.layout.source(g) != y {
            return Err(Error::LevelMismatch("morphisms are not composable".into()));
        }
        let h = ib_compose(&self.operad, &self.morphisms[g], &self.morphisms[f])?;
        self.find(x, z, &h)
            .ok_or_else(|| Error::CompositionUndefined(format!("{} ∘ {} leaves the hom-set", self.morphism_label(g), self.morphism_label(f))))
    }

    /// Hom-set graded by shape, shapes in lexicographic order.
    pub fn hom_graded(&self, x: usize, y: usize) -> Vec<(PointedMap, Vec<MorId>)> {
        let mut out: Vec<(PointedMap, Vec<MorId>)> = Vec::new();
        for f in self.layout.hom(x, y) {
            let shape = self.morphisms[f].shape();
            match out.last_mut() {
                Some((s, v)) if s == shape => v.push(f),
                _ => out.push((shape.clone(), vec![f])),
            }
        }
        out
    }

    pub fn to_json(&self, with_table: bool) -> Result<serde_json::Value> {
        let objects: Vec<String> = (0..self.num_objects()).map(|x| self.object_label(x)).collect();
        let mut homs = Vec::new();
        for x in 0..self.num_objects() {
            for y in 0..self.num_objects() {
                let r = self.hom(x, y);
                if !r.is_empty() {
                    let ms: Vec<serde_json::Value> =
                        r.map(|f| self.morphisms[f].to_json(&self.operad)).collect();
                    homs.push(serde_json::json!({"source": x, "target": y, "morphisms": ms}));
                }
            }
        }
        let mut value = serde_json::json!({
            "name": format!("Tw({})", self.operad.name()),
            "truncation": self.truncation,
            "objects": objects,
            "homs": homs,
            "identities": self.identities,
        });
        if with_table {
            value["compose"] = serde_json::to_value(FinCategory::tabulate(self, "").to_dump().compose)?;
        }
        Ok(value)
    }
}

impl Category for TwCategory {
    fn num_objects(&self) -> usize {
        self.objects.len()
    }
    fn object_label(&self, x: usize) -> String {
        let op = &self.objects[x];
        format!("{}:{}", op.profile.display_with(self.operad.colors()), self.operad.label(op))
    }
    fn hom(&self, x: usize, y: usize) -> Range<MorId> {
        self.layout.hom(x, y)
    }
    fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }
    fn source(&self, f: MorId) -> usize {
        self.layout.source(f)
    }
    fn target(&self, f: MorId) -> usize {
        self.layout.target(f)
    }
    fn identity(&self, x: usize) -> MorId {
        self.identities[x]
    }
    fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.try_compose(g, f).expect("Tw(P) is closed under composition")
    }
    fn morphism_label(&self, f: MorId) -> String {
        let a = &self.morphisms[f];
        let alphas: Vec<String> = a.alphas().iter().map(|o| self.operad.label(o)).collect();
        format!("{}|{}|{}", a.shape(), self.operad.label(a.alpha0()), alphas.join(","))
    }
}

/// The encoding category `Ib^P≤N` with composition by rule.
pub struct IbCategory {
    operad: DiscreteOperad,
    objects: Vec<CSequence>,
    layout: HomLayout,
    morphisms: Vec<IbMorphism>,
    identities: Vec<MorId>,
}

pub fn ib_category(p: &DiscreteOperad, n: usize) -> Result<IbCategory> {
    if n > p.truncation() {
        return Err(Error::TruncationExceeded { arity: n, bound: p.truncation() });
    }
    let q = if p.truncation() > n { p.clone() } else { p.with_truncation(n + 1)? };
    let objects = CSequence::all(q.num_colors(), n);
    let homs: Vec<Vec<IbMorphism>> = (0..objects.len() * objects.len())
        .into_par_iter()
        .map(|b| {
            let mut h = ib_hom(&q, &objects[b / objects.len()], &objects[b % objects.len()])?;
            h.sort();
            Ok(h)
        })
        .collect::<Result<_>>()?;
    let k = objects.len();
    let layout = HomLayout::new(k, |x, y| homs[x * k + y].len());
    let morphisms: Vec<IbMorphism> = homs.into_iter().flatten().collect();
    let mut cat = IbCategory { operad: q, objects, layout, morphisms, identities: vec![] };
    cat.identities = (0..k)
        .map(|x| {
            let id = IbMorphism::identity(&cat.operad, &cat.objects[x]);
            cat.find(x, x, &id).expect("identity is enumerated")
        })
        .collect();
    Ok(cat)
}

impl IbCategory {
    pub fn objects(&self) -> &[CSequence] {
        &self.objects
    }

    pub fn operad(&self) -> &DiscreteOperad {
        &self.operad
    }

    pub fn witness(&self, f: MorId) -> &IbMorphism {
        &self.morphisms[f]
    }

    pub fn find(&self, x: usize, y: usize, alpha: &IbMorphism) -> Option<MorId> {
        let r = self.layout.hom(x, y);
        self.morphisms[r.clone()].binary_search(alpha).ok().map(|i| r.start + i)
    }
}

impl Category for IbCategory {
    fn num_objects(&self) -> usize {
        self.objects.len()
    }
    fn object_label(&self, x: usize) -> String {
        self.objects[x].display_with(self.operad.colors())
    }
    fn hom(&self, x: usize, y: usize) -> Range<MorId> {
        self.layout.hom(x, y)
    }
    fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }
    fn source(&self, f: MorId) -> usize {
        self.layout.source(f)
    }
    fn target(&self, f: MorId) -> usize {
        self.layout.target(f)
    }
    fn identity(&self, x: usize) -> MorId {
        self.identities[x]
    }
    fn compose(&self, g: MorId, f: MorId) -> MorId {
        let h = ib_compose(&self.operad, &self.morphisms[g], &self.morphisms[f]).expect("composable");
        self.find(self.layout.source(f), self.layout.target(g), &h).expect("Ib^P is closed under composition")
    }
    fn morphism_label(&self, f: MorId) -> String {
        let a = &self.morphisms[f];
        let alphas: Vec<String> = a.alphas().iter().map(|o| self.operad.label(o)).collect();
        format!("{}|{}|{}", a.shape(), self.operad.label(a.alpha0()), alphas.join(","))
    }
}

/// `P` as a set-valued functor on `Ib^P` through the action `α*`.
pub struct OperadFunctor<'a> {
    cat: &'a IbCategory,
    levels: Vec<Vec<Operation>>,
}

impl<'a> OperadFunctor<'a> {
    pub fn new(cat: &'a IbCategory) -> Result<Self> {
        let levels = cat.objects.iter().map(|s| cat.operad.operations(s)).collect::<Result<_>>()?;
        Ok(OperadFunctor { cat, levels })
    }
}

impl SetFunctor for OperadFunctor<'_> {
    fn size(&self, x: usize) -> usize {
        self.levels[x].len()
    }
    fn apply(&self, f: MorId, e: usize) -> usize {
        let (x, y) = (self.cat.source(f), self.cat.target(f));
        let nu = act(&self.cat.operad, &self.cat.morphisms[f], &self.levels[x][e]).expect("act on its level");
        self.levels[y].binary_search(&nu).expect("image lies in the target level")
    }
    fn element_label(&self, x: usize, e: usize) -> String {
        self.cat.operad.label(&self.levels[x][e])
    }
}

/// The category of elements: objects `(x, μ ∈ F(x))`, morphisms
/// `a: x → y` with `F(a)(μ) = ν`.
pub fn grothendieck(c: &dyn Category, f: &dyn SetFunctor) -> FinCategory {
    let mut objects = Vec::new();
    let mut labels = Vec::new();
    for x in 0..c.num_objects() {
        for e in 0..f.size(x) {
            objects.push((x, e));
            labels.push(format!("({}, {})", c.object_label(x), f.element_label(x, e)));
        }
    }
    let n = objects.len();
    let homs: Vec<Vec<MorId>> = (0..n * n)
        .into_par_iter()
        .map(|b| {
            let ((x, mu), (y, nu)) = (objects[b / n], objects[b % n]);
            c.hom(x, y).filter(|&a| f.apply(a, mu) == nu).collect()
        })
        .collect();
    let layout = HomLayout::new(n, |i, j| homs[i * n + j].len());
    let identities = (0..n)
        .map(|i| {
            let id = c.identity(objects[i].0);
            layout.hom(i, i).start + homs[i * n + i].binary_search(&id).expect("identity fixes elements")
        })
        .collect();
    FinCategory::from_rule(
        "grothendieck",
        labels,
        |i, j| homs[i * n + j].iter().map(|&a| c.morphism_label(a)).collect(),
        identities,
        |layout, g, h| {
            let (i, j, k) = (layout.source(h), layout.target(h), layout.target(g));
            let a = homs[i * n + j][h - layout.hom(i, j).start];
            let b = homs[j * n + k][g - layout.hom(j, k).start];
            let ba = c.compose(b, a);
            layout.hom(i, k).start + homs[i * n + k].binary_search(&ba).expect("closed")
        },
    )
}

/// Checks that the identity-on-labels comparison `Tw(P)≤N → ∫_{Ib^P≤N} P`
/// is an isomorphism of categories.
pub fn check_grothendieck_comparison(p: &DiscreteOperad, n: usize) -> Result<()> {
    let tw = tw_category(p, n)?;
    let ib = ib_category(p, n)?;
    let func = OperadFunctor::new(&ib)?;
    let g = grothendieck(&ib, &func);
    if g.num_objects() != tw.num_objects() {
        return Err(Error::Certificate(format!(
            "{} objects in the Grothendieck construction, {} in Tw",
            g.num_objects(),
            tw.num_objects()
        )));
    }
    // Both enumerate objects by (profile, level order) and morphisms by Ib order.
    for x in 0..tw.num_objects() {
        for y in 0..tw.num_objects() {
            let (a, b) = (tw.hom(x, y), g.hom(x, y));
            if a.len() != b.len() {
                return Err(Error::Certificate(format!("hom sizes differ at ({x}, {y})")));
            }
            for (f, h) in a.zip(b) {
                if tw.morphism_label(f) != g.morphism_label(h) {
                    return Err(Error::Certificate(format!("morphism labels differ at ({x}, {y})")));
                }
            }
        }
    }
    for f in 0..tw.num_morphisms() {
        let (x, y) = (tw.source(f), tw.target(f));
        for z in 0..tw.num_objects() {
            for gm in tw.hom(y, z) {
                let lhs = tw.compose(gm, f) - tw.hom(x, z).start;
                let rhs = g.compose(g.hom(y, z).start + (gm - tw.hom(y, z).start), g.hom(x, y).start + (f - tw.hom(x, y).start))
                    - g.hom(x, z).start;
                if lhs != rhs {
                    return Err(Error::Certificate(format!("composition differs at ({x}, {y}, {z})")));
                }
            }
        }
    }
    Ok(())
}

/// The graded hom-set `Hom_{Tw(P)}(μ, ν)`, verified against the strict fiber
/// of `α ↦ α*(μ)` over `ν` in each shape.
pub fn tw_hom(tw: &TwCategory, mu: usize, nu: usize) -> Result<Vec<(PointedMap, Vec<MorId>)>> {
    let graded = tw.hom_graded(mu, nu);
    let p = tw.operad();
    let (m, n) = (&tw.objects[mu], &tw.objects[nu]);
    for f in crate::pointed::enumerate_pointed_maps(n.arity(), m.arity()) {
        let fiber: Vec<IbMorphism> = crate::encodings::ib_hom_over(p, &m.profile, &n.profile, &f)?
            .into_iter()
            .filter(|a| act(p, a, m).map(|r| r == *n).unwrap_or(false))
            .collect();
        let piece: Vec<IbMorphism> = graded
            .iter()
            .find(|(s, _)| *s == f)
            .map(|(_, v)| v.iter().map(|&g| tw.witness(g).clone()).collect())
            .unwrap_or_default();
        if piece != fiber {
            return Err(Error::Certificate(format!("graded piece over {f} is not the strict fiber")));
        }
    }
    Ok(graded)
}

/// Whether `f` has a two-sided inverse in the category.
pub fn is_equivalence(c: &dyn Category, f: MorId) -> bool {
    inverse(c, f).is_some()
}

pub fn inverse(c: &dyn Category, f: MorId) -> Option<MorId> {
    let (x, y) = (c.source(f), c.target(f));
    c.hom(y, x).find(|&g| c.compose(g, f) == c.identity(x) && c.compose(f, g) == c.identity(y))
}

/// The canonical equivalence `μ → μ^σ`: shape `σ`, unit components.
pub fn sigma_equivalence(tw: &TwCategory, mu: usize, sigma: &Permutation) -> Result<MorId> {
    let p = tw.operad();
    let m = &tw.objects[mu];
    let target = p.act_op(m, sigma)?;
    let y = tw.object_index(&target).ok_or_else(|| Error::LevelMismatch(format!("{target} is not an object")))?;
    let alpha = IbMorphism::new(
        m.profile.clone(),
        target.profile.clone(),
        sigma.to_pointed(),
        p.unit(m.profile.output),
        m.profile.inputs.iter().map(|&c| p.unit(c)).collect(),
    )?;
    tw.find(mu, y, &alpha)
        .ok_or_else(|| Error::Certificate(format!("σ-edge {sigma} from {m} is not a morphism")))
}

/// Objects `t` with exactly one morphism from every object.
pub fn terminal_objects(c: &dyn Category) -> Vec<usize> {
    (0..c.num_objects())
        .filter(|&t| (0..c.num_objects()).all(|x| c.hom_size(x, t) == 1))
        .collect()
}

/// One matched hom-set of an isomorphism certificate: pairs `(tw, base)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomMatching {
    pub source: usize,
    pub target: usize,
    pub pairs: Vec<(MorId, MorId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwComCertificate {
    pub truncation: usize,
    pub objects: Vec<(String, String)>,
    pub homs: Vec<HomMatching>,
    pub composable_pairs_checked: usize,
}

/// Certifies `Tw(Com)≤N ≅ (Fin_*^op)≤N`.
pub fn certify_tw_com(n: usize) -> Result<TwComCertificate> {
    let com = DiscreteOperad::com(n + 1);
    let tw = tw_category(&com, n)?;
    let fin = pointed_op(n);
    if tw.num_objects() != fin.num_objects() {
        return Err(Error::Certificate(format!("{} objects vs {}", tw.num_objects(), fin.num_objects())));
    }
    let mut objects = Vec::new();
    for a in 0..=n {
        if tw.objects[a].arity() != a {
            return Err(Error::Certificate(format!("object {a} has arity {}", tw.objects[a].arity())));
        }
        objects.push((tw.object_label(a), fin.object_label(a)));
    }
    let mut phi = vec![0; tw.num_morphisms()];
    let mut homs = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            let expected = (a + 1).pow(b as u32);
            if tw.hom_size(a, b) != expected || fin.hom_size(a, b) != expected {
                return Err(Error::Certificate(format!(
                    "Hom(<{a}>, <{b}>): {} in Tw, {} in Fin_*^op, expected {expected}",
                    tw.hom_size(a, b),
                    fin.hom_size(a, b)
                )));
            }
            let mut pairs = Vec::with_capacity(expected);
            let mut seen = vec![false; expected];
            for f in tw.hom(a, b) {
                let pos = tw.witness(f).shape().rank();
                if seen[pos] {
                    return Err(Error::Certificate(format!("two morphisms <{a}> → <{b}> share a shape")));
                }
                seen[pos] = true;
                let g = fin.hom(a, b).start + pos;
                phi[f] = g;
                pairs.push((f, g));
            }
            homs.push(HomMatching { source: a, target: b, pairs });
        }
    }
    let checked: usize = (0..tw.num_morphisms())
        .into_par_iter()
        .map(|f| -> Result<usize> {
            let y = tw.target(f);
            let mut count = 0;
            for z in 0..=n {
                for g in tw.hom(y, z) {
                    if phi[tw.try_compose(g, f)?] != fin.compose(phi[g], phi[f]) {
                        return Err(Error::Certificate(format!(
                            "functoriality fails at {} ∘ {}",
                            tw.morphism_label(g),
                            tw.morphism_label(f)
                        )));
                    }
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(TwComCertificate { truncation: n, objects, homs, composable_pairs_checked: checked })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedMorphism {
    pub monotone: Vec<usize>,
    pub tw: MorId,
    pub shape: Vec<usize>,
    pub alpha0: String,
    pub alphas: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedObject {
    pub object: String,
    pub sigma: Vec<usize>,
    pub edge: MorId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwAssCertificate {
    pub truncation: usize,
    /// `(m, n, |Hom_Δ([m],[n])|)`, equal to `|Hom_{Tw(Ass)}(μ_m, μ_n)|`.
    pub hom_counts: Vec<(usize, usize, usize)>,
    pub morphisms: Vec<CertifiedMorphism>,
    pub composable_pairs_checked: usize,
    pub linked: Vec<LinkedObject>,
    pub witness_equations_checked: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `α_0^i = [i, 1, …, i−1, i+1, …, n+1] ∈ Σ_{n+1}`.
pub fn alpha_zero(i: usize, n: usize) -> Permutation {
    let mut v = vec![i];
    v.extend((1..=n + 1).filter(|&j| j != i));
    Permutation::new(v).expect("α_0^i is a permutation")
}

fn ass_op(p: Permutation) -> Operation {
    Operation { profile: CSequence::mono(p.len()), data: OpData::Perm(p) }
}

/// Certifies the equivalence `φ: Δ≤N → Tw(Ass)≤N`.
pub fn certify_tw_ass(n: usize) -> Result<TwAssCertificate> {
    let ass = DiscreteOperad::ass(n + 1);
    let tw = tw_category(&ass, n)?;
    let delta = simplex_category(n);
    let mu: Vec<usize> = (0..=n)
        .map(|m| tw.object_index(&ass_op(Permutation::identity(m))).expect("μ_m is an object"))
        .collect();

    let mut phi = vec![0; delta.num_morphisms()];
    let mut morphisms = Vec::with_capacity(delta.num_morphisms());
    let mut hom_counts = Vec::new();
    for a in 0..=n {
        for b in 0..=n {
            let count = delta.hom_size(a, b);
            if count != binomial(a + b + 1, a + 1) || tw.hom_size(mu[a], mu[b]) != count {
                return Err(Error::Certificate(format!(
                    "|Hom([{a}],[{b}])| = {count}, |Hom(μ_{a}, μ_{b})| = {}",
                    tw.hom_size(mu[a], mu[b])
                )));
            }
            hom_counts.push((a, b, count));
            let mut used = vec![false; count];
            for g in delta.hom(a, b) {
                let mono = simplex_map(&delta, g);
                let image = if mono.is_constant() {
                    let i = mono.apply(0);
                    let alpha = IbMorphism::new(
                        CSequence::mono(a),
                        CSequence::mono(b),
                        PointedMap::const_zero(b, a),
                        ass_op(alpha_zero(i + 1, b)),
                        (0..a).map(|_| ass_op(Permutation::identity(0))).collect(),
                    )?;
                    tw.find(mu[a], mu[b], &alpha)
                        .ok_or_else(|| Error::Certificate(format!("α_0^{} is not a morphism μ_{a} → μ_{b}", i + 1)))?
                } else {
                    let f = iota(&mono);
                    if in_iota_image(&f) != IotaPreimage::Unique(mono.clone()) {
                        return Err(Error::Certificate(format!("ι is not injective at {mono}")));
                    }
                    let over: Vec<MorId> =
                        tw.hom(mu[a], mu[b]).filter(|&h| *tw.witness(h).shape() == f).collect();
                    if over.len() != 1 {
                        return Err(Error::Certificate(format!(
                            "{} morphisms μ_{a} → μ_{b} over ι({mono}) = {f}",
                            over.len()
                        )));
                    }
                    over[0]
                };
                let pos = image - tw.hom(mu[a], mu[b]).start;
                if used[pos] {
                    return Err(Error::Certificate(format!("φ_{{{a},{b}}} is not injective")));
                }
                used[pos] = true;
                phi[g] = image;
                let w = tw.witness(image);
                morphisms.push(CertifiedMorphism {
                    monotone: mono.values().to_vec(),
                    tw: image,
                    shape: w.shape().values().to_vec(),
                    alpha0: ass.label(w.alpha0()),
                    alphas: w.alphas().iter().map(|o| ass.label(o)).collect(),
                });
            }
        }
    }

    let mut pairs = 0;
    for g in 0..delta.num_morphisms() {
        let y = delta.target(g);
        for z in 0..=n {
            for h in delta.hom(y, z) {
                if tw.try_compose(phi[h], phi[g])? != phi[delta.compose(h, g)] {
                    return Err(Error::Certificate(format!(
                        "φ fails functoriality at {} ∘ {}",
                        delta.morphism_label(h),
                        delta.morphism_label(g)
                    )));
                }
                pairs += 1;
            }
        }
    }

    let mut linked = Vec::new();
    for (x, obj) in tw.objects().iter().enumerate() {
        let sigma = match &obj.data {
            OpData::Perm(s) => s.clone(),
            _ => unreachable!("Ass operations are permutations"),
        };
        let m = obj.arity();
        let edge = sigma_equivalence(&tw, mu[m], &sigma)?;
        if tw.target(edge) != x || !is_equivalence(&tw, edge) {
            return Err(Error::Certificate(format!("σ-edge μ_{m} → {obj} is not an equivalence")));
        }
        linked.push(LinkedObject { object: tw.object_label(x), sigma: sigma.values().to_vec(), edge });
    }

    let witnessed: usize = (0..tw.num_morphisms())
        .into_par_iter()
        .map(|f| -> Result<usize> {
            let w = tw.witness(f);
            let (src, tgt) = (&tw.objects[tw.source(f)], &tw.objects[tw.target(f)]);
            let inner = ass.compose(src, w.alphas())?;
            let mut plugs = vec![inner];
            plugs.extend(w.shape().fiber(0).iter().map(|_| ass.unit(0)));
            let lhs = ass.compose(w.alpha0(), &plugs)?;
            if lhs != ass.act_op(tgt, &w.shape().sigma())? {
                return Err(Error::Certificate(format!("witness equation fails for {}", tw.morphism_label(f))));
            }
            Ok(1)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();

    Ok(TwAssCertificate {
        truncation: n,
        hom_counts,
        morphisms,
        composable_pairs_checked: pairs,
        linked,
        witness_equations_checked: witnessed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{check_category_axioms, poset_category, ConstantSingleton, Representable};
    use crate::collections::Generator;

    #[test]
    fn object_counts() {
        assert_eq!(tw_category(&DiscreteOperad::com(2), 2).unwrap().num_objects(), 3);
        assert_eq!(tw_category(&DiscreteOperad::ass(3), 3).unwrap().num_objects(), 10);
    }

    #[test]
    fn mu_one_endomorphisms() {
        let tw = tw_category(&DiscreteOperad::ass(2), 2).unwrap();
        assert_eq!(tw.hom_size(1, 1), 3);
    }

    #[test]
    fn tw_axioms_small() {
        for p in [DiscreteOperad::ass(2), DiscreteOperad::com(3)] {
            let tw = tw_category(&p, 2).unwrap();
            assert!(check_category_axioms(&tw, 1).is_empty());
        }
    }

    #[test]
    fn terminal_objects_are_nullary() {
        let tw = tw_category(&DiscreteOperad::com(3), 3).unwrap();
        assert_eq!(terminal_objects(&tw), vec![0]);
        let tw = tw_category(&DiscreteOperad::ass(3), 3).unwrap();
        assert_eq!(terminal_objects(&tw), vec![0]);
        let free = DiscreteOperad::free_reduced(vec![Generator { name: "m".into(), arity: 2 }], 3).unwrap();
        assert!(terminal_objects(&tw_category(&free, 3).unwrap()).is_empty());
    }

    #[test]
    fn sigma_edges() {
        let tw = tw_category(&DiscreteOperad::ass(3), 3).unwrap();
        let mu2 = tw.object_index(&ass_op(Permutation::identity(2))).unwrap();
        let swap = Permutation::new(vec![2, 1]).unwrap();
        let e = sigma_equivalence(&tw, mu2, &swap).unwrap();
        assert!(is_equivalence(&tw, e));
        assert_eq!(tw.objects()[tw.target(e)], ass_op(swap));
        assert_eq!(sigma_equivalence(&tw, mu2, &Permutation::identity(2)).unwrap(), tw.identity(mu2));
        for x in 0..tw.num_objects() {
            for sigma in Permutation::all(tw.objects()[x].arity()) {
                let a = sigma_equivalence(&tw, x, &sigma).unwrap();
                for tau in Permutation::all(sigma.len()) {
                    let b = sigma_equivalence(&tw, tw.target(a), &tau).unwrap();
                    assert_eq!(tw.compose(b, a), sigma_equivalence(&tw, x, &sigma.compose(&tau)).unwrap());
                }
            }
        }
        for f in 0..tw.num_morphisms() {
            if is_equivalence(&tw, f) {
                assert!(tw.witness(f).shape().is_bijective());
            }
        }
    }

    #[test]
    fn grothendieck_matches_tw() {
        for p in [DiscreteOperad::com(3), DiscreteOperad::ass(3)] {
            check_grothendieck_comparison(&p, 2).unwrap();
        }
    }

    #[test]
    fn grothendieck_of_constant_and_representable() {
        let leq = vec![vec![true, true, true], vec![false, true, true], vec![false, false, true]];
        let c = poset_category(vec!["a".into(), "b".into(), "c".into()], &leq).unwrap();
        let g = grothendieck(&c, &ConstantSingleton);
        assert_eq!(g.num_objects(), 3);
        assert_eq!(g.num_morphisms(), c.num_morphisms());
        let rep = Representable { cat: &c, base: 1 };
        let g = grothendieck(&c, &rep);
        assert_eq!(g.num_objects(), 2);
        assert!((0..2).all(|x| g.hom_size(0, x) == 1));
    }

    #[test]
    fn graded_pieces_are_fibers() {
        let tw = tw_category(&DiscreteOperad::ass(2), 2).unwrap();
        for x in 0..tw.num_objects() {
            for y in 0..tw.num_objects() {
                tw_hom(&tw, x, y).unwrap();
            }
        }
    }

    #[test]
    fn certificates_small() {
        let c = certify_tw_com(2).unwrap();
        assert_eq!(c.homs.len(), 9);
        let a = certify_tw_ass(2).unwrap();
        assert_eq!(a.linked.len(), 1 + 1 + 2);
        let m = a.morphisms.iter().find(|m| m.monotone == vec![1] && m.shape == vec![0]).unwrap();
        assert_eq!(m.alpha0, "[2,1]");
    }
}
