//! Finite categories with morphisms laid out contiguously per hom-set,
//! tabulated composition, the standard truncated bases, and set-valued
//! functors.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pointed::{enumerate_monotone, enumerate_pointed_maps, MonotoneMap, PointedMap};

pub type MorId = usize;

/// A finite category whose morphisms are numbered so that each hom-set is a
/// contiguous range, ordered by (source, target).
pub trait Category: Sync {
    fn num_objects(&self) -> usize;
    fn object_label(&self, x: usize) -> String;
    fn hom(&self, x: usize, y: usize) -> Range<MorId>;
    fn num_morphisms(&self) -> usize;
    fn source(&self, f: MorId) -> usize;
    fn target(&self, f: MorId) -> usize;
    fn identity(&self, x: usize) -> MorId;
    /// `g ∘ f`; the caller guarantees `target(f) == source(g)`.
    fn compose(&self, g: MorId, f: MorId) -> MorId;
    fn morphism_label(&self, f: MorId) -> String;

    fn hom_size(&self, x: usize, y: usize) -> usize {
        self.hom(x, y).len()
    }

    /// Index of `f` inside its hom-set.
    fn hom_position(&self, f: MorId) -> usize {
        f - self.hom(self.source(f), self.target(f)).start
    }
}

/// Offsets of the hom-set blocks plus per-morphism endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomLayout {
    objects: usize,
    offsets: Vec<usize>,
    sources: Vec<u32>,
    targets: Vec<u32>,
}

impl HomLayout {
    pub fn new(objects: usize, sizes: impl Fn(usize, usize) -> usize) -> Self {
        let mut offsets = Vec::with_capacity(objects * objects + 1);
        let mut sources = Vec::new();
        let mut targets = Vec::new();
        offsets.push(0);
        for x in 0..objects {
            for y in 0..objects {
                let s = sizes(x, y);
                sources.extend(std::iter::repeat_n(x as u32, s));
                targets.extend(std::iter::repeat_n(y as u32, s));
                offsets.push(offsets.last().unwrap() + s);
            }
        }
        HomLayout { objects, offsets, sources, targets }
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn hom(&self, x: usize, y: usize) -> Range<MorId> {
        let b = x * self.objects + y;
        self.offsets[b]..self.offsets[b + 1]
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn source(&self, f: MorId) -> usize {
        self.sources[f] as usize
    }

    pub fn target(&self, f: MorId) -> usize {
        self.targets[f] as usize
    }
}

/// A finite category with an explicit composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    layout: HomLayout,
    labels: Vec<String>,
    identities: Vec<MorId>,
    block_offsets: Vec<usize>,
    table: Vec<u32>,
}

impl FinCategory {
    /// Builds a category from labelled hom-sets and a composition rule
    /// `compose(g, f)` on global morphism ids.
    pub fn from_rule(
        name: impl Into<String>,
        objects: Vec<String>,
        homs: impl Fn(usize, usize) -> Vec<String>,
        identities: Vec<MorId>,
        compose: impl Fn(&HomLayout, MorId, MorId) -> MorId + Sync,
    ) -> Self {
        let n = objects.len();
        let hom_labels: Vec<Vec<String>> =
            (0..n * n).map(|b| homs(b / n, b % n)).collect();
        let layout = HomLayout::new(n, |x, y| hom_labels[x * n + y].len());
        let labels: Vec<String> = hom_labels.into_iter().flatten().collect();
        let (block_offsets, table) = build_table(&layout, |g, f| compose(&layout, g, f));
        FinCategory { name: name.into(), objects, layout, labels, identities, block_offsets, table }
    }

    /// Tabulates any category.
    pub fn tabulate(cat: &dyn Category, name: impl Into<String>) -> Self {
        let n = cat.num_objects();
        let layout = HomLayout::new(n, |x, y| cat.hom_size(x, y));
        let labels = (0..cat.num_morphisms()).map(|f| cat.morphism_label(f)).collect();
        let identities = (0..n).map(|x| cat.identity(x)).collect();
        let (block_offsets, table) = build_table(&layout, |g, f| cat.compose(g, f));
        FinCategory {
            name: name.into(),
            objects: (0..n).map(|x| cat.object_label(x)).collect(),
            layout,
            labels,
            identities,
            block_offsets,
            table,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &HomLayout {
        &self.layout
    }

    pub fn to_dump(&self) -> CategoryDump {
        let n = self.objects.len();
        let mut homs = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let r = self.layout.hom(x, y);
                if !r.is_empty() {
                    homs.push(HomDump {
                        source: x,
                        target: y,
                        morphisms: self.labels[r].to_vec(),
                    });
                }
            }
        }
        let mut compose = Vec::with_capacity(self.table.len());
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for f in self.layout.hom(x, y) {
                        for g in self.layout.hom(y, z) {
                            compose.push([f, g, self.compose(g, f)]);
                        }
                    }
                }
            }
        }
        CategoryDump {
            name: self.name.clone(),
            objects: self.objects.clone(),
            homs,
            identities: self.identities.clone(),
            compose,
        }
    }

    pub fn from_dump(dump: &CategoryDump) -> Result<Self> {
        let n = dump.objects.len();
        let mut sizes = vec![0usize; n * n];
        let mut hom_labels = vec![Vec::new(); n * n];
        for h in &dump.homs {
            if h.source >= n || h.target >= n {
                return invalid("hom entry refers to an unknown object");
            }
            sizes[h.source * n + h.target] = h.morphisms.len();
            hom_labels[h.source * n + h.target] = h.morphisms.clone();
        }
        let layout = HomLayout::new(n, |x, y| sizes[x * n + y]);
        let labels: Vec<String> = hom_labels.into_iter().flatten().collect();
        if dump.identities.len() != n
            || dump.identities.iter().enumerate().any(|(x, &i)| {
                i >= layout.total() || layout.source(i) != x || layout.target(i) != x
            })
        {
            return invalid("identities do not match the objects");
        }
        let mut lookup = std::collections::HashMap::with_capacity(dump.compose.len());
        for &[f, g, h] in &dump.compose {
            if f >= layout.total() || g >= layout.total() || h >= layout.total() {
                return invalid("composition entry out of range");
            }
            lookup.insert((g, f), h);
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for f in layout.hom(x, y) {
                        for g in layout.hom(y, z) {
                            match lookup.get(&(g, f)) {
                                Some(&h) if layout.source(h) == x && layout.target(h) == z => {}
                                _ => return invalid(format!("composition table misses or misplaces {g}∘{f}")),
                            }
                        }
                    }
                }
            }
        }
        let (block_offsets, table) = build_table(&layout, |g, f| lookup[&(g, f)]);
        Ok(FinCategory {
            name: dump.name.clone(),
            objects: dump.objects.clone(),
            layout,
            labels,
            identities: dump.identities.clone(),
            block_offsets,
            table,
        })
    }
}

fn build_table(layout: &HomLayout, compose: impl Fn(MorId, MorId) -> MorId + Sync) -> (Vec<usize>, Vec<u32>) {
    let n = layout.objects();
    let mut block_offsets = Vec::with_capacity(n * n * n + 1);
    block_offsets.push(0);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let s = layout.hom(x, y).len() * layout.hom(y, z).len();
                block_offsets.push(block_offsets.last().unwrap() + s);
            }
        }
    }
    let blocks: Vec<Vec<u32>> = (0..n * n * n)
        .into_par_iter()
        .map(|b| {
            let (x, y, z) = (b / (n * n), (b / n) % n, b % n);
            let mut out = Vec::with_capacity(layout.hom(x, y).len() * layout.hom(y, z).len());
            for f in layout.hom(x, y) {
                for g in layout.hom(y, z) {
                    out.push(compose(g, f) as u32);
                }
            }
            out
        })
        .collect();
    (block_offsets, blocks.concat())
}

impl Category for FinCategory {
    fn num_objects(&self) -> usize {
        self.objects.len()
    }
    fn object_label(&self, x: usize) -> String {
        self.objects[x].clone()
    }
    fn hom(&self, x: usize, y: usize) -> Range<MorId> {
        self.layout.hom(x, y)
    }
    fn num_morphisms(&self) -> usize {
        self.layout.total()
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
        let (x, y, z) = (self.layout.source(f), self.layout.target(f), self.layout.target(g));
        debug_assert_eq!(y, self.layout.source(g));
        let n = self.objects.len();
        let hf = self.layout.hom(x, y);
        let hg = self.layout.hom(y, z);
        let base = self.block_offsets[(x * n + y) * n + z];
        self.table[base + (f - hf.start) * hg.len() + (g - hg.start)] as MorId
    }
    fn morphism_label(&self, f: MorId) -> String {
        self.labels[f].clone()
    }
}

/// JSON form of a finite category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDump {
    pub name: String,
    pub objects: Vec<String>,
    pub homs: Vec<HomDump>,
    pub identities: Vec<MorId>,
    /// Triples `[f, g, g∘f]`.
    pub compose: Vec<[MorId; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDump {
    pub source: usize,
    pub target: usize,
    pub morphisms: Vec<String>,
}

/// Lists violated identity and associativity laws, stopping after `limit`.
pub fn check_category_axioms(cat: &dyn Category, limit: usize) -> Vec<String> {
    let n = cat.num_objects();
    let mut out = Vec::new();
    for f in 0..cat.num_morphisms() {
        let (x, y) = (cat.source(f), cat.target(f));
        if cat.compose(cat.identity(y), f) != f || cat.compose(f, cat.identity(x)) != f {
            out.push(format!("identity law fails at {}", cat.morphism_label(f)));
        }
        if out.len() >= limit {
            return out;
        }
    }
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for f in cat.hom(w, x) {
                        for g in cat.hom(x, y) {
                            let gf = cat.compose(g, f);
                            for h in cat.hom(y, z) {
                                if cat.compose(h, gf) != cat.compose(cat.compose(h, g), f) {
                                    out.push(format!(
                                        "associativity fails at ({}, {}, {})",
                                        cat.morphism_label(h),
                                        cat.morphism_label(g),
                                        cat.morphism_label(f)
                                    ));
                                    if out.len() >= limit {
                                        return out;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The opposite category; `op_morphism` gives the id of `f^op`.
pub fn opposite(cat: &dyn Category) -> FinCategory {
    let n = cat.num_objects();
    let objects = (0..n).map(|x| cat.object_label(x)).collect();
    let identities_layout = HomLayout::new(n, |x, y| cat.hom_size(y, x));
    let identities = (0..n).map(|x| identities_layout.hom(x, x).start + cat.hom_position(cat.identity(x))).collect();
    FinCategory::from_rule(
        "op",
        objects,
        |x, y| cat.hom(y, x).map(|f| format!("{}^op", cat.morphism_label(f))).collect(),
        identities,
        |layout, g, f| {
            // f: x → y and g: y → z in the opposite are y → x and z → y below.
            let (x, y, z) = (layout.source(f), layout.target(f), layout.target(g));
            let fc = cat.hom(y, x).start + (f - layout.hom(x, y).start);
            let gc = cat.hom(z, y).start + (g - layout.hom(y, z).start);
            let h = cat.compose(fc, gc);
            layout.hom(x, z).start + (h - cat.hom(z, x).start)
        },
    )
}

/// Id of `f^op` in `opposite(cat)`.
pub fn op_morphism(cat: &dyn Category, op: &FinCategory, f: MorId) -> MorId {
    let (x, y) = (cat.source(f), cat.target(f));
    op.hom(y, x).start + cat.hom_position(f)
}

/// Number of composable pairs `(f, g)`.
pub fn composable_pairs(cat: &dyn Category) -> usize {
    let n = cat.num_objects();
    let mut total = 0;
    for x in 0..n {
        for y in 0..n {
            let a = cat.hom_size(x, y);
            for z in 0..n {
                total += a * cat.hom_size(y, z);
            }
        }
    }
    total
}

/// (Fin_*^op)≤N: objects ⟨0⟩..⟨N⟩; a morphism ⟨a⟩ → ⟨b⟩ is a pointed map ⟨b⟩ → ⟨a⟩.
pub fn pointed_op(max: usize) -> FinCategory {
    let objects = (0..=max).map(|a| format!("<{a}>")).collect();
    let layout = HomLayout::new(max + 1, |a, b| (a + 1).pow(b as u32));
    let identities = (0..=max).map(|a| layout.hom(a, a).start + PointedMap::identity(a).rank()).collect();
    FinCategory::from_rule(
        "Fin_*^op",
        objects,
        |a, b| enumerate_pointed_maps(b, a).iter().map(|f| f.to_string()).collect(),
        identities,
        |layout, g, f| {
            let (a, b, c) = (layout.source(f), layout.target(f), layout.target(g));
            let fm = PointedMap::from_rank(b, a, f - layout.hom(a, b).start);
            let gm = PointedMap::from_rank(c, b, g - layout.hom(b, c).start);
            layout.hom(a, c).start + fm.compose(&gm).expect("composable").rank()
        },
    )
}

/// Morphism id in `pointed_op` of the pointed map `f: ⟨n⟩ → ⟨m⟩`, viewed as ⟨m⟩ → ⟨n⟩.
pub fn pointed_op_morphism(cat: &FinCategory, f: &PointedMap) -> MorId {
    cat.hom(f.target_size(), f.source_size()).start + f.rank()
}

/// The pointed map underlying a morphism of `pointed_op`.
pub fn pointed_op_map(cat: &dyn Category, f: MorId) -> PointedMap {
    let (a, b) = (cat.source(f), cat.target(f));
    PointedMap::from_rank(b, a, cat.hom_position(f))
}

/// Δ≤N with monotone maps in lexicographic order.
pub fn simplex_category(max: usize) -> FinCategory {
    let maps: Vec<Vec<Vec<MonotoneMap>>> = (0..=max)
        .map(|m| (0..=max).map(|n| enumerate_monotone(m, n)).collect())
        .collect();
    let objects = (0..=max).map(|m| format!("[{m}]")).collect();
    let layout = HomLayout::new(max + 1, |m, n| maps[m][n].len());
    let identities = (0..=max)
        .map(|m| layout.hom(m, m).start + maps[m][m].binary_search(&MonotoneMap::identity(m)).unwrap())
        .collect();
    FinCategory::from_rule(
        "Delta",
        objects,
        |m, n| maps[m][n].iter().map(|g| g.to_string()).collect(),
        identities,
        |layout, g, f| {
            let (a, b, c) = (layout.source(f), layout.target(f), layout.target(g));
            let fm = &maps[a][b][f - layout.hom(a, b).start];
            let gm = &maps[b][c][g - layout.hom(b, c).start];
            let h = gm.compose(fm).expect("composable");
            layout.hom(a, c).start + maps[a][c].binary_search(&h).unwrap()
        },
    )
}

/// The monotone map underlying a morphism of `simplex_category`.
pub fn simplex_map(cat: &dyn Category, f: MorId) -> MonotoneMap {
    enumerate_monotone(cat.source(f), cat.target(f))[cat.hom_position(f)].clone()
}

/// Id of a monotone map in `simplex_category`.
pub fn simplex_morphism(cat: &FinCategory, g: &MonotoneMap) -> MorId {
    cat.hom(g.source_size(), g.target_size()).start + g.rank()
}

/// A finite poset as a category; `leq[x][y]` means x ≤ y.
pub fn poset_category(labels: Vec<String>, leq: &[Vec<bool>]) -> Result<FinCategory> {
    let n = labels.len();
    for x in 0..n {
        if !leq[x][x] {
            return invalid("poset relation is not reflexive");
        }
        for y in 0..n {
            if x != y && leq[x][y] && leq[y][x] {
                return invalid("poset relation is not antisymmetric");
            }
            for z in 0..n {
                if leq[x][y] && leq[y][z] && !leq[x][z] {
                    return invalid("poset relation is not transitive");
                }
            }
        }
    }
    let layout = HomLayout::new(n, |x, y| usize::from(leq[x][y]));
    let identities = (0..n).map(|x| layout.hom(x, x).start).collect();
    Ok(FinCategory::from_rule(
        "poset",
        labels.clone(),
        |x, y| if leq[x][y] { vec![format!("{}≤{}", labels[x], labels[y])] } else { vec![] },
        identities,
        |layout, g, f| layout.hom(layout.source(f), layout.target(g)).start,
    ))
}

/// A functor from a finite category to finite sets, elements numbered per object.
pub trait SetFunctor: Sync {
    fn size(&self, x: usize) -> usize;
    fn apply(&self, f: MorId, e: usize) -> usize;
    fn element_label(&self, x: usize, e: usize) -> String {
        format!("{x}:{e}")
    }
}

/// The functor with a single element everywhere.
pub struct ConstantSingleton;

impl SetFunctor for ConstantSingleton {
    fn size(&self, _x: usize) -> usize {
        1
    }
    fn apply(&self, _f: MorId, _e: usize) -> usize {
        0
    }
}

/// `Hom(x₀, −)`, elements numbered by hom position.
pub struct Representable<'a> {
    pub cat: &'a dyn Category,
    pub base: usize,
}

impl SetFunctor for Representable<'_> {
    fn size(&self, x: usize) -> usize {
        self.cat.hom_size(self.base, x)
    }
    fn apply(&self, f: MorId, e: usize) -> usize {
        let a = self.cat.hom(self.base, self.cat.source(f)).start + e;
        self.cat.hom_position(self.cat.compose(f, a))
    }
    fn element_label(&self, x: usize, e: usize) -> String {
        self.cat.morphism_label(self.cat.hom(self.base, x).start + e)
    }
}

/// Checks functoriality of a set-valued functor on every composable pair.
pub fn check_set_functor(cat: &dyn Category, func: &dyn SetFunctor) -> Result<()> {
    for x in 0..cat.num_objects() {
        for e in 0..func.size(x) {
            if func.apply(cat.identity(x), e) != e {
                return invalid(format!("identity at object {x} moves element {e}"));
            }
        }
    }
    for f in 0..cat.num_morphisms() {
        let (x, y) = (cat.source(f), cat.target(f));
        for z in 0..cat.num_objects() {
            for g in cat.hom(y, z) {
                let gf = cat.compose(g, f);
                for e in 0..func.size(x) {
                    if func.apply(gf, e) != func.apply(g, func.apply(f, e)) {
                        return invalid(format!(
                            "set functor not functorial at {}∘{}",
                            cat.morphism_label(g),
                            cat.morphism_label(f)
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointed_op_is_a_category() {
        let c = pointed_op(2);
        assert_eq!(c.hom_size(1, 2), 4);
        assert!(check_category_axioms(&c, 1).is_empty());
        // ⟨0⟩ is a zero object.
        for a in 0..=2 {
            assert_eq!(c.hom_size(a, 0), 1);
            assert_eq!(c.hom_size(0, a), 1);
        }
    }

    #[test]
    fn simplex_is_a_category() {
        let d = simplex_category(3);
        assert_eq!(d.hom_size(1, 2), 6);
        assert!(check_category_axioms(&d, 1).is_empty());
    }

    #[test]
    fn dump_roundtrip() {
        let d = simplex_category(2);
        let back = FinCategory::from_dump(&d.to_dump()).unwrap();
        assert_eq!(back, d);
    }
}
