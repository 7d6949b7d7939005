//! Finite simplicial sets in Eilenberg–Zilber normal form, maps out of
//! nerves of Boolean cubes, quasi-simplices and simplex-level
//! unstraightening over a point and over nerves of finite categories.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::category::{Category, MorId, SetFunctor};
use crate::collections::DiscreteOperad;
use crate::error::{invalid, Error, Result};
use crate::pointed::enumerate_monotone;
use crate::twisted::{check_grothendieck_comparison, grothendieck, ib_category, tw_category, OperadFunctor};

/// A simplex `s^*(x)` with `x` nondegenerate of dimension `core_dim` and
/// `s: [dim] → [core_dim]` a monotone surjection.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex {
    core_dim: usize,
    core: usize,
    surj: Vec<usize>,
}

impl Simplex {
    pub fn nondegenerate(dim: usize, core: usize) -> Self {
        Simplex { core_dim: dim, core, surj: (0..=dim).collect() }
    }

    pub fn new(core_dim: usize, core: usize, surj: Vec<usize>) -> Result<Self> {
        let ok = !surj.is_empty()
            && surj[0] == 0
            && surj[surj.len() - 1] == core_dim
            && surj.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
        if !ok {
            return invalid(format!("{surj:?} is not a monotone surjection onto [{core_dim}]"));
        }
        Ok(Simplex { core_dim, core, surj })
    }

    pub fn dim(&self) -> usize {
        self.surj.len() - 1
    }

    pub fn core_dim(&self) -> usize {
        self.core_dim
    }

    pub fn core(&self) -> usize {
        self.core
    }

    pub fn surjection(&self) -> &[usize] {
        &self.surj
    }

    pub fn is_degenerate(&self) -> bool {
        self.dim() > self.core_dim
    }
}

/// A nondegenerate simplex with its faces `d_0, …, d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub label: String,
    pub faces: Vec<Simplex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinSimplicialSet {
    name: String,
    generators: Vec<Vec<Generator>>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorDump {
    id: usize,
    label: String,
    faces: Vec<Simplex>,
}

#[derive(Serialize, Deserialize)]
struct SSetDump {
    name: String,
    #[serde(rename = "D")]
    dim: usize,
    nondegenerate: BTreeMap<usize, Vec<GeneratorDump>>,
}

fn coface(dim: usize, i: usize) -> Vec<usize> {
    (0..dim).map(|k| if k >= i { k + 1 } else { k }).collect()
}

fn codegeneracy(dim: usize, j: usize) -> Vec<usize> {
    (0..=dim + 1).map(|k| if k > j { k - 1 } else { k }).collect()
}

impl FinSimplicialSet {
    /// Validates face data and the simplicial identities `d_i d_j = d_{j-1} d_i`.
    pub fn new(name: impl Into<String>, generators: Vec<Vec<Generator>>) -> Result<Self> {
        let mut generators = generators;
        if generators.is_empty() {
            generators.push(Vec::new());
        }
        for (d, level) in generators.iter().enumerate() {
            for g in level {
                let expected = if d == 0 { 0 } else { d + 1 };
                if g.faces.len() != expected {
                    return invalid(format!("{} in dimension {d} has {} faces", g.label, g.faces.len()));
                }
                for s in &g.faces {
                    Simplex::new(s.core_dim, s.core, s.surj.clone())?;
                    if s.dim() + 1 != d || s.core >= generators[s.core_dim].len() {
                        return invalid(format!("face of {} is malformed", g.label));
                    }
                }
            }
        }
        let x = FinSimplicialSet { name: name.into(), generators };
        for (d, level) in x.generators.iter().enumerate().skip(2) {
            for (k, g) in level.iter().enumerate() {
                for j in 0..=d {
                    for i in 0..j {
                        let lhs = x.face(&g.faces[j], i);
                        let rhs = x.face(&g.faces[i], j - 1);
                        if lhs != rhs {
                            return invalid(format!("d_{i} d_{j} ≠ d_{} d_{i} on generator {k} of dimension {d}", j - 1));
                        }
                    }
                }
            }
        }
        Ok(x)
    }

    /// Builds a set whose nondegenerate simplices are the given strictly
    /// increasing vertex lists; the family must be closed under nonempty
    /// sublists.
    pub fn from_chains(name: impl Into<String>, labels: &[String], chains: Vec<Vec<usize>>) -> Result<Self> {
        let mut chains = chains;
        chains.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        chains.dedup();
        let top = chains.iter().map(|c| c.len()).max().unwrap_or(1);
        let mut index: HashMap<&[usize], usize> = HashMap::new();
        let mut counts = vec![0; top];
        for c in &chains {
            if c.is_empty() || c.windows(2).any(|w| w[0] >= w[1]) || c.iter().any(|&v| v >= labels.len()) {
                return invalid(format!("{c:?} is not an increasing vertex list"));
            }
            index.insert(c, counts[c.len() - 1]);
            counts[c.len() - 1] += 1;
        }
        let mut generators: Vec<Vec<Generator>> = vec![Vec::new(); top];
        for c in &chains {
            let d = c.len() - 1;
            let mut faces = Vec::new();
            if d > 0 {
                for i in 0..=d {
                    let mut f = c.clone();
                    f.remove(i);
                    let Some(&id) = index.get(f.as_slice()) else {
                        return invalid(format!("face {f:?} of {c:?} is missing"));
                    };
                    faces.push(Simplex::nondegenerate(d - 1, id));
                }
            }
            let label = c.iter().map(|&v| labels[v].as_str()).join("<");
            generators[d].push(Generator { label, faces });
        }
        FinSimplicialSet::new(name, generators)
    }

    /// The standard simplex `Δⁿ`.
    pub fn standard(n: usize) -> Self {
        let labels: Vec<String> = (0..=n).map(|v| v.to_string()).collect();
        let chains = (1..=n + 1).flat_map(|k| (0..=n).combinations(k)).collect();
        FinSimplicialSet::from_chains(format!("Delta^{n}"), &labels, chains).expect("faces of a simplex")
    }

    /// The boundary `∂Δⁿ` for `n ≥ 1`.
    pub fn boundary(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("the boundary of a 0-simplex is empty");
        }
        let labels: Vec<String> = (0..=n).map(|v| v.to_string()).collect();
        let chains = (1..=n).flat_map(|k| (0..=n).combinations(k)).collect();
        FinSimplicialSet::from_chains(format!("dDelta^{n}"), &labels, chains)
    }

    pub fn discrete(labels: &[String]) -> Self {
        let chains = (0..labels.len()).map(|v| vec![v]).collect();
        FinSimplicialSet::from_chains("discrete", labels, chains).expect("points")
    }

    /// Nerve of a finite poset; `leq[x][y]` means x ≤ y.
    pub fn poset_nerve(name: impl Into<String>, labels: &[String], leq: &[Vec<bool>]) -> Result<Self> {
        let n = labels.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return invalid("order relation has the wrong shape");
        }
        for x in 0..n {
            for y in 0..n {
                if x != y && leq[x][y] && leq[y][x] {
                    return invalid("order relation is not antisymmetric");
                }
            }
        }
        // Relabel along a linear extension so chains are increasing lists.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&x| (0..n).filter(|&y| y != x && leq[y][x]).count());
        let below = |x: usize, y: usize| x != y && leq[x][y];
        let mut chains = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..n).map(|p| vec![p]).collect();
        while let Some(c) = stack.pop() {
            let last = order[*c.last().unwrap()];
            for p in (c.last().unwrap() + 1)..n {
                if below(last, order[p]) {
                    let mut d = c.clone();
                    d.push(p);
                    stack.push(d);
                }
            }
            chains.push(c);
        }
        let sorted_labels: Vec<String> = order.iter().map(|&x| labels[x].clone()).collect();
        // Transitivity failures show up as missing faces.
        FinSimplicialSet::from_chains(name, &sorted_labels, chains)
    }

    /// Nerve of the product order on `{0,1}²`.
    pub fn grid() -> Self {
        let pts = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let labels: Vec<String> = pts.iter().map(|(a, b)| format!("{a}{b}")).collect();
        let leq: Vec<Vec<bool>> =
            pts.iter().map(|p| pts.iter().map(|q| p.0 <= q.0 && p.1 <= q.1).collect()).collect();
        FinSimplicialSet::poset_nerve("grid", &labels, &leq).expect("product order")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Highest dimension with a nondegenerate simplex.
    pub fn dimension(&self) -> usize {
        self.generators.iter().rposition(|l| !l.is_empty()).unwrap_or(0)
    }

    pub fn generators(&self, dim: usize) -> &[Generator] {
        self.generators.get(dim).map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn label(&self, s: &Simplex) -> String {
        let core = &self.generators[s.core_dim][s.core].label;
        if s.is_degenerate() {
            format!("s{:?}({core})", s.surj)
        } else {
            core.clone()
        }
    }

    /// `θ^*(s)` for a monotone `θ: [m] → [dim s]` given by its values.
    pub fn act(&self, s: &Simplex, theta: &[usize]) -> Simplex {
        debug_assert!(theta.windows(2).all(|w| w[0] <= w[1]) && theta.iter().all(|&t| t <= s.dim()));
        let comp: Vec<usize> = theta.iter().map(|&t| s.surj[t]).collect();
        let mut image = comp.clone();
        image.dedup();
        let face = self.face_along(s.core_dim, s.core, &image);
        let surj = comp.iter().map(|v| face.surj[image.binary_search(v).unwrap()]).collect();
        Simplex { core_dim: face.core_dim, core: face.core, surj }
    }

    /// The face of a generator spanned by the vertices in `image`.
    fn face_along(&self, dim: usize, core: usize, image: &[usize]) -> Simplex {
        if image.len() == dim + 1 {
            return Simplex::nondegenerate(dim, core);
        }
        let i = (0..=dim).find(|k| image.binary_search(k).is_err()).unwrap();
        let theta: Vec<usize> = image.iter().map(|&v| if v > i { v - 1 } else { v }).collect();
        self.act(&self.generators[dim][core].faces[i], &theta)
    }

    pub fn face(&self, s: &Simplex, i: usize) -> Simplex {
        self.act(s, &coface(s.dim(), i))
    }

    pub fn degeneracy(&self, s: &Simplex, j: usize) -> Simplex {
        self.act(s, &codegeneracy(s.dim(), j))
    }

    pub fn vertex(&self, s: &Simplex, k: usize) -> usize {
        self.act(s, &[k]).core
    }

    /// All `k`-simplices, degenerate ones included, in sorted order.
    pub fn simplices(&self, k: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for d in 0..=k.min(self.generators.len() - 1) {
            for jumps in (1..=k).combinations(d) {
                let surj: Vec<usize> = (0..=k).map(|t| jumps.iter().filter(|&&j| j <= t).count()).collect();
                for core in 0..self.generators[d].len() {
                    out.push(Simplex { core_dim: d, core, surj: surj.clone() });
                }
            }
        }
        out.sort();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dump = SSetDump {
            name: self.name.clone(),
            dim: self.dimension(),
            nondegenerate: self
                .generators
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty())
                .map(|(d, l)| {
                    let gens = l
                        .iter()
                        .enumerate()
                        .map(|(id, g)| GeneratorDump { id, label: g.label.clone(), faces: g.faces.clone() })
                        .collect();
                    (d, gens)
                })
                .collect(),
        };
        serde_json::to_value(dump).expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let dump: SSetDump = serde_json::from_value(value.clone())?;
        let mut generators: Vec<Vec<Generator>> = vec![Vec::new(); dump.dim + 1];
        for (d, gens) in dump.nondegenerate {
            if d > dump.dim {
                return invalid(format!("dimension {d} exceeds D = {}", dump.dim));
            }
            for (k, g) in gens.into_iter().enumerate() {
                if g.id != k {
                    return invalid(format!("generator ids in dimension {d} must be 0, 1, …"));
                }
                generators[d].push(Generator { label: g.label, faces: g.faces });
            }
        }
        FinSimplicialSet::new(dump.name, generators)
    }
}

impl fmt::Display for FinSimplicialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<usize> = self.generators.iter().map(|l| l.len()).collect();
        write!(f, "{} {:?}", self.name, counts)
    }
}

/// `N P_{i,j}`, the nerve of `{A : {i,j} ⊆ A ⊆ [i,j]}`; empty for `i > j`.
pub fn rigid_hom(n: usize, i: usize, j: usize) -> Result<FinSimplicialSet> {
    if i > n || j > n {
        return invalid(format!("{i} or {j} lies outside [{n}]"));
    }
    if i > j {
        return FinSimplicialSet::new(format!("P_{i},{j}"), vec![Vec::new()]);
    }
    let cube = BoolCube::new(bits(&[i, j]), ((i + 1)..j).collect());
    cube.nerve(format!("P_{i},{j}"))
}

fn bits(elements: &[usize]) -> u32 {
    elements.iter().fold(0, |m, &e| m | (1 << e))
}

fn interval(lo: usize, hi: usize) -> u32 {
    (lo..=hi).fold(0, |m, e| m | (1 << e))
}

fn subset_label(a: u32) -> String {
    let elems: Vec<String> = (0..32).filter(|e| a & (1 << e) != 0).map(|e| e.to_string()).collect();
    format!("{{{}}}", elems.join(","))
}

#[derive(Clone, Serialize, Deserialize)]
struct CubeShape {
    fixed: Vec<usize>,
    free: Vec<usize>,
}

/// The poset `{fixed ∪ S : S ⊆ free}` of subsets of `[0, 31]` under
/// inclusion. Its maximal chains are indexed by orderings of `free`,
/// listed lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "CubeShape", try_from = "CubeShape")]
pub struct BoolCube {
    fixed: u32,
    free: Vec<usize>,
    orders: Vec<Vec<usize>>,
}

impl From<BoolCube> for CubeShape {
    fn from(c: BoolCube) -> Self {
        CubeShape { fixed: (0..32).filter(|e| c.fixed & (1 << e) != 0).collect(), free: c.free }
    }
}

impl TryFrom<CubeShape> for BoolCube {
    type Error = Error;
    fn try_from(s: CubeShape) -> Result<Self> {
        if s.fixed.iter().chain(&s.free).any(|&e| e >= 32) || s.free.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("cube elements must be increasing and below 32");
        }
        let fixed = bits(&s.fixed);
        if fixed & bits(&s.free) != 0 {
            return invalid("fixed and free elements overlap");
        }
        Ok(BoolCube::new(fixed, s.free))
    }
}

impl BoolCube {
    fn new(fixed: u32, free: Vec<usize>) -> Self {
        let k = free.len();
        let orders = (0..k).permutations(k).collect();
        BoolCube { fixed, free, orders }
    }

    /// `P^▷_n(i) = {A : i ∈ A ⊆ [i, n]}`.
    pub fn right(n: usize, i: usize) -> Self {
        BoolCube::new(1 << i, ((i + 1)..=n).collect())
    }

    /// `P^◁(i) = {A : i ∈ A ⊆ [0, i]}`.
    pub fn left(i: usize) -> Self {
        BoolCube::new(1 << i, (0..i).collect())
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn contains(&self, a: u32) -> bool {
        a & self.fixed == self.fixed && a & !(self.fixed | bits(&self.free)) == 0
    }

    fn chain(&self, order: &[usize]) -> Vec<u32> {
        let mut a = self.fixed;
        let mut out = vec![a];
        for &o in order {
            a |= 1 << self.free[o];
            out.push(a);
        }
        out
    }

    pub fn elements(&self) -> Vec<u32> {
        let k = self.free.len();
        (0u32..(1 << k))
            .map(|s| (0..k).filter(|t| s & (1 << t) != 0).fold(self.fixed, |a, t| a | (1 << self.free[t])))
            .sorted()
            .collect()
    }

    fn nerve(&self, name: String) -> Result<FinSimplicialSet> {
        let elems = self.elements();
        let labels: Vec<String> = elems.iter().map(|&a| subset_label(a)).collect();
        let leq: Vec<Vec<bool>> = elems.iter().map(|&a| elems.iter().map(|&b| a & b == a).collect()).collect();
        FinSimplicialSet::poset_nerve(name, &labels, &leq)
    }

    /// Pairs of maximal chains with the positions of their common elements.
    fn overlaps(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let k = self.dim();
        let mut out = Vec::new();
        for p in 0..self.orders.len() {
            for q in 0..p {
                let shared = (0..=k)
                    .filter(|&s| {
                        let mut a = self.orders[p][..s].to_vec();
                        let mut b = self.orders[q][..s].to_vec();
                        a.sort_unstable();
                        b.sort_unstable();
                        a == b
                    })
                    .collect();
                out.push((q, p, shared));
            }
        }
        out
    }
}

/// A simplicial map `N(cube) → X`, given by the image of each maximal chain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CubeMap {
    images: Vec<Simplex>,
    cube: CubeKey,
}

/// Ordering key so that cube maps sort by their images first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
struct CubeKey {
    fixed: u32,
    free: Vec<usize>,
}

impl CubeMap {
    fn on(cube: &BoolCube, images: Vec<Simplex>) -> Self {
        CubeMap { images, cube: CubeKey { fixed: cube.fixed, free: cube.free.clone() } }
    }

    pub fn cube(&self) -> BoolCube {
        BoolCube::new(self.cube.fixed, self.cube.free.clone())
    }

    pub fn images(&self) -> &[Simplex] {
        &self.images
    }

    /// Image of a weakly increasing chain of cube elements.
    pub fn eval(&self, x: &FinSimplicialSet, chain: &[u32]) -> Simplex {
        let (fixed, free) = (self.cube.fixed, &self.cube.free);
        debug_assert!(chain.windows(2).all(|w| w[0] & w[1] == w[0]));
        let mut order = Vec::with_capacity(free.len());
        let mut seen = 0u32;
        for &a in chain {
            for (t, &e) in free.iter().enumerate() {
                let b = 1 << e;
                if a & b != 0 && seen & b == 0 {
                    order.push(t);
                    seen |= b;
                }
            }
        }
        for (t, &e) in free.iter().enumerate() {
            if seen & (1 << e) == 0 {
                order.push(t);
            }
        }
        let p = rank_of_order(&order);
        let positions: Vec<usize> = chain.iter().map(|a| (a & !fixed).count_ones() as usize).collect();
        x.act(&self.images[p], &positions)
    }

    /// `γ ∘ N(f)` for a monotone `f: domain → cube`.
    pub fn pullback(&self, x: &FinSimplicialSet, domain: &BoolCube, f: impl Fn(u32) -> u32) -> CubeMap {
        let images = domain
            .orders
            .iter()
            .map(|o| {
                let chain: Vec<u32> = domain.chain(o).into_iter().map(&f).collect();
                self.eval(x, &chain)
            })
            .collect();
        CubeMap::on(domain, images)
    }

    pub fn restrict(&self, x: &FinSimplicialSet, sub: &BoolCube) -> CubeMap {
        self.pullback(x, sub, |a| a)
    }

    /// The cube map `N(cube) → N[n] → X` induced by a poset map to `[n]`.
    pub fn from_poset_map(x: &FinSimplicialSet, s: &Simplex, cube: &BoolCube, f: impl Fn(u32) -> usize) -> CubeMap {
        let images = cube
            .orders
            .iter()
            .map(|o| {
                let positions: Vec<usize> = cube.chain(o).into_iter().map(&f).collect();
                x.act(s, &positions)
            })
            .collect();
        CubeMap::on(cube, images)
    }
}

/// Lexicographic rank of a permutation.
fn rank_of_order(order: &[usize]) -> usize {
    let k = order.len();
    let mut rank = 0;
    for t in 0..k {
        let smaller = order[t + 1..].iter().filter(|&&v| v < order[t]).count();
        rank = rank * (k - t) + smaller;
    }
    rank
}

/// Every simplicial map `N(cube) → X`, sorted.
pub fn cube_maps(x: &FinSimplicialSet, cube: &BoolCube) -> Vec<CubeMap> {
    let k = cube.dim();
    let candidates = x.simplices(k);
    let overlaps = cube.overlaps();
    let mut checks: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); cube.orders.len()];
    for (q, p, shared) in overlaps {
        checks[p].push((q, shared));
    }
    let search = |first: &Simplex| {
        let mut out = Vec::new();
        let mut chosen = vec![first.clone()];
        extend(x, &candidates, &checks, &mut chosen, &mut out);
        out
    };
    let found: Vec<Vec<Vec<Simplex>>> = candidates.par_iter().map(search).collect();
    found.into_iter().flatten().map(|images| CubeMap::on(cube, images)).collect()
}

fn extend(
    x: &FinSimplicialSet,
    candidates: &[Simplex],
    checks: &[Vec<(usize, Vec<usize>)>],
    chosen: &mut Vec<Simplex>,
    out: &mut Vec<Vec<Simplex>>,
) {
    let p = chosen.len();
    if p == checks.len() {
        out.push(chosen.clone());
        return;
    }
    for c in candidates {
        let fits = checks[p].iter().all(|(q, shared)| x.act(c, shared) == x.act(&chosen[*q], shared));
        if fits {
            chosen.push(c.clone());
            extend(x, candidates, checks, chosen, out);
            chosen.pop();
        }
    }
}

/// An `n`-cube on `N P^▷_n(0)` whose end face on `T_i = {A ∋ i}` factors
/// through `T_i° = {A ⊇ [0,i]}` for every `i`; `witnesses[i-1]` is the
/// restriction to `T_i°`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiSimplex {
    pub map: CubeMap,
    pub witnesses: Vec<CubeMap>,
}

/// Checks the end-face condition, returning the restrictions to each `T_i°`.
pub fn quasi_witnesses(x: &FinSimplicialSet, n: usize, gamma: &CubeMap) -> Option<Vec<CubeMap>> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let ends = BoolCube::new(bits(&[0, i]), (1..=n).filter(|&e| e != i).collect());
        let retract = interval(0, i);
        if gamma.restrict(x, &ends) != gamma.pullback(x, &ends, |a| a | retract) {
            return None;
        }
        let core = BoolCube::new(retract, ((i + 1)..=n).collect());
        out.push(gamma.restrict(x, &core));
    }
    Some(out)
}

/// All quasi `n`-simplices of `X`, sorted by their cube maps.
pub fn quasi_simplices(x: &FinSimplicialSet, n: usize) -> Vec<QuasiSimplex> {
    cube_maps(x, &BoolCube::right(n, 0))
        .into_iter()
        .filter_map(|map| quasi_witnesses(x, n, &map).map(|witnesses| QuasiSimplex { map, witnesses }))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    /// Covariant: families on `N P^◁(i)`.
    Left,
    /// Contravariant: families on `N P^▷_n(i)`.
    Right,
}

impl FromStr for Variance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Variance::Left),
            "right" => Ok(Variance::Right),
            _ => invalid(format!("unknown variance {s:?}; expected left or right")),
        }
    }
}

impl Variance {
    fn cube(self, n: usize, i: usize) -> BoolCube {
        match self {
            Variance::Left => BoolCube::left(i),
            Variance::Right => BoolCube::right(n, i),
        }
    }
}

/// An `n`-simplex of `Un_*(X)`: maps `t(i)` out of the nerves of the
/// rigidification posets, natural along the structure unions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointFamily {
    pub variance: Variance,
    pub maps: Vec<CubeMap>,
}

impl PointFamily {
    pub fn degree(&self) -> usize {
        self.maps.len() - 1
    }

    /// `θ^*t` for monotone `θ: [m] → [n]`: `(θ^*t)(i) = t(θ(i)) ∘ (A ↦ θ(A))`.
    pub fn act(&self, x: &FinSimplicialSet, theta: &[usize]) -> PointFamily {
        let m = theta.len() - 1;
        let image = |a: u32| (0..=m).filter(|k| a & (1 << k) != 0).fold(0, |b, k| b | (1 << theta[k]));
        let maps = (0..=m)
            .map(|i| self.maps[theta[i]].pullback(x, &self.variance.cube(m, i), image))
            .collect();
        PointFamily { variance: self.variance, maps }
    }
}

/// The naturality square between `t(host)` and `t(other)` for a chosen pair,
/// as (domain, restriction mask) with `host` the index whose poset receives
/// the union.
fn naturality_domain(variance: Variance, n: usize, host: usize, other: usize) -> (BoolCube, u32) {
    match variance {
        Variance::Right => {
            let free = ((host + 1)..=n).filter(|&e| e != other).collect();
            (BoolCube::new(bits(&[host, other]), free), interval(other, n))
        }
        Variance::Left => {
            let free = (0..host).filter(|&e| e != other).collect();
            (BoolCube::new(bits(&[other, host]), free), interval(0, other))
        }
    }
}

fn natural(x: &FinSimplicialSet, variance: Variance, n: usize, host: usize, t_host: &CubeMap, other: usize, t_other: &CubeMap) -> bool {
    let (domain, mask) = naturality_domain(variance, n, host, other);
    t_host.restrict(x, &domain) == t_other.pullback(x, &domain, |a| a & mask)
}

/// Checks the naturality conditions of a family against the definition.
pub fn is_point_family(x: &FinSimplicialSet, t: &PointFamily) -> bool {
    let n = t.degree();
    (0..=n).all(|j| {
        let others: Vec<usize> = match t.variance {
            Variance::Right => ((j + 1)..=n).collect(),
            Variance::Left => (0..j).collect(),
        };
        others.into_iter().all(|i| natural(x, t.variance, n, j, &t.maps[j], i, &t.maps[i]))
    })
}

/// All `n`-simplices of `Un_*^◁(X)` or `Un_*^▷(X)`, enumerated from the
/// diagram definition, sorted.
pub fn un_point(x: &FinSimplicialSet, variance: Variance, n: usize) -> Vec<PointFamily> {
    let candidates: Vec<Vec<CubeMap>> = (0..=n).map(|i| cube_maps(x, &variance.cube(n, i))).collect();
    // Right families are chosen from t(n) down, left ones from t(0) up, so
    // each new map is checked against every map it restricts onto.
    let order: Vec<usize> = match variance {
        Variance::Right => (0..=n).rev().collect(),
        Variance::Left => (0..=n).collect(),
    };
    let first = order[0];
    let found: Vec<Vec<Vec<CubeMap>>> = candidates[first]
        .par_iter()
        .map(|c| {
            let mut chosen: Vec<Option<CubeMap>> = vec![None; n + 1];
            chosen[first] = Some(c.clone());
            let mut out = Vec::new();
            extend_family(x, variance, n, &candidates, &order, 1, &mut chosen, &mut out);
            out
        })
        .collect();
    let mut out: Vec<PointFamily> =
        found.into_iter().flatten().map(|maps| PointFamily { variance, maps }).collect();
    out.sort();
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_family(
    x: &FinSimplicialSet,
    variance: Variance,
    n: usize,
    candidates: &[Vec<CubeMap>],
    order: &[usize],
    depth: usize,
    chosen: &mut Vec<Option<CubeMap>>,
    out: &mut Vec<Vec<CubeMap>>,
) {
    if depth == order.len() {
        out.push(chosen.iter().map(|c| c.clone().unwrap()).collect());
        return;
    }
    let j = order[depth];
    for c in &candidates[j] {
        let fits = order[..depth]
            .iter()
            .all(|&i| natural(x, variance, n, j, c, i, chosen[i].as_ref().unwrap()));
        if fits {
            chosen[j] = Some(c.clone());
            extend_family(x, variance, n, candidates, order, depth + 1, chosen, out);
            chosen[j] = None;
        }
    }
}

/// `t'(i) = t(n−i) ∘ (A ↦ n−A)`: left families to right ones.
pub fn relabel_left(x: &FinSimplicialSet, t: &PointFamily) -> Result<PointFamily> {
    if t.variance != Variance::Left {
        return invalid("relabelling expects a left family");
    }
    let n = t.degree();
    let reflect = |a: u32| (0..=n).filter(|k| a & (1 << k) != 0).fold(0, |b, k| b | (1 << (n - k)));
    let maps = (0..=n).map(|i| t.maps[n - i].pullback(x, &BoolCube::right(n, i), reflect)).collect();
    Ok(PointFamily { variance: Variance::Right, maps })
}

/// The quasi-simplex of a right family, `t'(0)`.
pub fn family_to_quasi(x: &FinSimplicialSet, t: &PointFamily) -> Result<QuasiSimplex> {
    if t.variance != Variance::Right {
        return invalid("only right families are quasi-simplices");
    }
    let n = t.degree();
    let map = t.maps[0].clone();
    let witnesses = quasi_witnesses(x, n, &map)
        .ok_or_else(|| Error::Certificate("t'(0) of a right family is not quasi".into()))?;
    Ok(QuasiSimplex { map, witnesses })
}

/// The right family of restrictions `t'(i) = γ|{A ⊇ [0,i]}`.
pub fn quasi_to_family(x: &FinSimplicialSet, n: usize, q: &QuasiSimplex) -> PointFamily {
    let maps = (0..=n)
        .map(|i| {
            let fill = interval(0, i);
            q.map.pullback(x, &BoolCube::right(n, i), |a| a | fill)
        })
        .collect();
    PointFamily { variance: Variance::Right, maps }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiReport {
    pub degree: usize,
    pub quasi: usize,
    pub right: usize,
    pub left: usize,
}

/// The degree-`n` bijections: right families ↔ quasi-simplices through
/// `t' ↦ t'(0)` and its restriction inverse, and left ↔ right families
/// through the reflection relabelling.
pub fn check_quasi_bijection(x: &FinSimplicialSet, n: usize) -> Result<QuasiReport> {
    let quasi = quasi_simplices(x, n);
    let right = un_point(x, Variance::Right, n);
    let left = un_point(x, Variance::Left, n);
    let mut images: Vec<QuasiSimplex> = right.iter().map(|t| family_to_quasi(x, t)).collect::<Result<_>>()?;
    images.sort_by(|a, b| a.map.cmp(&b.map));
    if images != quasi {
        return Err(Error::Certificate(format!(
            "degree {n}: {} right families but {} quasi-simplices, or images differ",
            right.len(),
            quasi.len()
        )));
    }
    for q in &quasi {
        let t = quasi_to_family(x, n, q);
        if right.binary_search(&t).is_err() {
            return Err(Error::Certificate(format!("degree {n}: restriction family is not natural")));
        }
    }
    let mut relabelled: Vec<PointFamily> = left.iter().map(|t| relabel_left(x, t)).collect::<Result<_>>()?;
    relabelled.sort();
    if relabelled != right {
        return Err(Error::Certificate(format!(
            "degree {n}: relabelled left families ({}) differ from right families ({})",
            left.len(),
            right.len()
        )));
    }
    Ok(QuasiReport { degree: n, quasi: quasi.len(), right: right.len(), left: left.len() })
}

/// Checks `relabel(θ^*t) = (θ^op)^*relabel(t)` with `θ^op(k) = n − θ(m−k)`
/// for every monotone `θ: [m] → [n]`, `m, n ≤ max`, and every left
/// family; also checks both sides stay inside the enumerated sets.
/// Returns the number of squares checked.
pub fn check_opposite(x: &FinSimplicialSet, max: usize) -> Result<usize> {
    let left: Vec<Vec<PointFamily>> = (0..=max).map(|n| un_point(x, Variance::Left, n)).collect();
    let right: Vec<Vec<PointFamily>> = (0..=max).map(|n| un_point(x, Variance::Right, n)).collect();
    let mut checked = 0;
    for n in 0..=max {
        for m in 0..=max {
            for theta in enumerate_monotone(m, n) {
                let th = theta.values();
                let op: Vec<usize> = (0..=m).map(|k| n - th[m - k]).collect();
                for t in &left[n] {
                    let moved = t.act(x, th);
                    if left[m].binary_search(&moved).is_err() {
                        return Err(Error::Certificate(format!("θ = {th:?} leaves the left families")));
                    }
                    let r = relabel_left(x, t)?;
                    let lhs = relabel_left(x, &moved)?;
                    let rhs = r.act(x, &op);
                    if right[m].binary_search(&rhs).is_err() || lhs != rhs {
                        return Err(Error::Certificate(format!("opposite square fails for θ = {th:?}")));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// The collapsed quasi-simplex of `s ∈ X_n`: `t'(i)(A) = s(max A)`.
pub fn unit_family(x: &FinSimplicialSet, s: &Simplex) -> PointFamily {
    let n = s.dim();
    let top = |a: u32| 31 - a.leading_zeros() as usize;
    let maps = (0..=n).map(|i| CubeMap::from_poset_map(x, s, &BoolCube::right(n, i), top)).collect();
    PointFamily { variance: Variance::Right, maps }
}

/// `X_n → Un_*^▷(X)_n`.
pub fn unit_map(x: &FinSimplicialSet, n: usize) -> Vec<(Simplex, PointFamily)> {
    x.simplices(n).into_iter().map(|s| {
        let t = unit_family(x, &s);
        (s, t)
    }).collect()
}

/// Checks that the unit lands in the right families, is injective, and
/// commutes with every monotone `θ: [m] → [n]` for `m, n ≤ max`.
/// Returns the number of squares checked.
pub fn check_unit_map(x: &FinSimplicialSet, max: usize) -> Result<usize> {
    let mut checked = 0;
    for n in 0..=max {
        let right = un_point(x, Variance::Right, n);
        let unit = unit_map(x, n);
        let mut images: Vec<&PointFamily> = unit.iter().map(|(_, t)| t).collect();
        images.sort();
        images.dedup();
        if images.len() != unit.len() {
            return Err(Error::Certificate(format!("unit map is not injective in degree {n}")));
        }
        for (s, t) in &unit {
            if right.binary_search(t).is_err() {
                return Err(Error::Certificate(format!("unit of {} is not a right family", x.label(s))));
            }
            for m in 0..=max {
                for theta in enumerate_monotone(m, n) {
                    if unit_family(x, &x.act(s, theta.values())) != t.act(x, theta.values()) {
                        return Err(Error::Certificate(format!(
                            "unit map does not commute with {:?} at {}",
                            theta.values(),
                            x.label(s)
                        )));
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// An `n`-simplex of the nerve: objects `x_0, …, x_n` and arrows `x_{k-1} → x_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NerveSimplex {
    pub objects: Vec<usize>,
    pub arrows: Vec<MorId>,
}

/// All `n`-simplices of the nerve, sorted.
pub fn nerve(c: &dyn Category, n: usize) -> Vec<NerveSimplex> {
    let mut out: Vec<NerveSimplex> = (0..c.num_objects())
        .map(|x| NerveSimplex { objects: vec![x], arrows: vec![] })
        .collect();
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                let last = *s.objects.last().unwrap();
                (0..c.num_objects())
                    .flat_map(move |y| c.hom(last, y).map(move |f| (y, f)))
                    .map(move |(y, f)| {
                        let mut t = s.clone();
                        t.objects.push(y);
                        t.arrows.push(f);
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out.sort();
    out
}

/// An `n`-simplex of `Un_C(F)` for set-valued `F`: a nerve simplex and the
/// values `t(i) ∈ F(x_i)` of the (constant) components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementSimplex {
    pub simplex: NerveSimplex,
    pub elements: Vec<usize>,
}

/// `Un_C(F)_n`. Each `N P^◁(i)` is connected, so a component into a set is
/// an element; naturality along each nonempty `N P_{i,j}` says the arrow
/// `x_i → x_j` carries `t(i)` to `t(j)`.
pub fn un_over_nerve(c: &dyn Category, f: &dyn SetFunctor, n: usize) -> Vec<ElementSimplex> {
    let chains = nerve(c, n);
    let mut out: Vec<ElementSimplex> = chains
        .par_iter()
        .flat_map_iter(|s| {
            // arrow[i][j] = x_i → x_j for i < j.
            let mut arrow = vec![vec![0; n + 1]; n + 1];
            for i in 0..=n {
                arrow[i][i] = c.identity(s.objects[i]);
                for j in (i + 1)..=n {
                    arrow[i][j] = c.compose(s.arrows[j - 1], arrow[i][j - 1]);
                }
            }
            let mut found = Vec::new();
            let mut chosen = Vec::with_capacity(n + 1);
            extend_elements(f, s, &arrow, &mut chosen, &mut found);
            found.into_iter().map(|elements| ElementSimplex { simplex: s.clone(), elements }).collect::<Vec<_>>()
        })
        .collect();
    out.sort();
    out
}

fn extend_elements(f: &dyn SetFunctor, s: &NerveSimplex, arrow: &[Vec<MorId>], chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let j = chosen.len();
    if j == s.objects.len() {
        out.push(chosen.clone());
        return;
    }
    for e in 0..f.size(s.objects[j]) {
        if (0..j).all(|i| f.apply(arrow[i][j], chosen[i]) == e) {
            chosen.push(e);
            extend_elements(f, s, arrow, chosen, out);
            chosen.pop();
        }
    }
}

/// Sends simplices of `Un_C(F)` to strings in `grothendieck(C, F)`.
struct ElementIndex<'a> {
    c: &'a dyn Category,
    f: &'a dyn SetFunctor,
    offsets: Vec<usize>,
}

impl<'a> ElementIndex<'a> {
    fn new(c: &'a dyn Category, f: &'a dyn SetFunctor) -> Self {
        let mut offsets = vec![0];
        for x in 0..c.num_objects() {
            offsets.push(offsets[x] + f.size(x));
        }
        ElementIndex { c, f, offsets }
    }

    fn object(&self, x: usize, e: usize) -> usize {
        self.offsets[x] + e
    }

    fn string(&self, g: &dyn Category, s: &ElementSimplex) -> NerveSimplex {
        let ns = &s.simplex;
        let objects: Vec<usize> = ns.objects.iter().zip(&s.elements).map(|(&x, &e)| self.object(x, e)).collect();
        let arrows = (0..ns.arrows.len())
            .map(|k| {
                let (x, y, a) = (ns.objects[k], ns.objects[k + 1], ns.arrows[k]);
                let (mu, nu) = (s.elements[k], s.elements[k + 1]);
                let pos = self.c.hom(x, y).filter(|&b| b < a && self.f.apply(b, mu) == nu).count();
                g.hom(objects[k], objects[k + 1]).start + pos
            })
            .collect();
        NerveSimplex { objects, arrows }
    }
}

/// Checks `Un_C(F)_n ≅ N(∫F)_n` and returns the common count.
pub fn check_un_over_nerve(c: &dyn Category, f: &dyn SetFunctor, n: usize) -> Result<usize> {
    let g = grothendieck(c, f);
    let un = un_over_nerve(c, f, n);
    let index = ElementIndex::new(c, f);
    let mut strings: Vec<NerveSimplex> = un.iter().map(|s| index.string(&g, s)).collect();
    strings.sort();
    let expected = nerve(&g, n);
    if strings != expected {
        return Err(Error::Certificate(format!(
            "degree {n}: {} simplices of Un_C(F) against {} in the nerve of the category of elements",
            un.len(),
            expected.len()
        )));
    }
    Ok(un.len())
}

/// Checks `Un_{Ib^P≤N}(P)_n ≅ N(Tw(P)≤N)_n` through the category of
/// elements, returning the count in degree `n`.
pub fn check_un_over_ib(p: &DiscreteOperad, trunc: usize, n: usize) -> Result<usize> {
    check_grothendieck_comparison(p, trunc)?;
    let ib = ib_category(p, trunc)?;
    let func = OperadFunctor::new(&ib)?;
    let count = check_un_over_nerve(&ib, &func, n)?;
    let tw = tw_category(p, trunc)?;
    let g = grothendieck(&ib, &func);
    if nerve(&tw, n) != nerve(&g, n) {
        return Err(Error::Certificate(format!("degree {n}: nerve of Tw differs from the category of elements")));
    }
    Ok(count)
}

/// The pullback `(Un_*^▷F(y))_{ν/} ×_{Un_*^▷F(y)} Hom^R_{NC}(x, y)` in one
/// degree, for set-valued `F`, and its matching with the right-morphism
/// simplices of `Un_C(F)` from `(x, μ)` to `(y, ν)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomRModel {
    pub degree: usize,
    pub pullback: Vec<(MorId, PointFamily)>,
    pub matched: Vec<ElementSimplex>,
}

/// Builds the pullback and certifies the bijection with
/// `Hom^R_{Un_C F}((x, μ), (y, ν))_n`.
pub fn hom_r_model(
    c: &dyn Category,
    f: &dyn SetFunctor,
    (x, mu): (usize, usize),
    (y, nu): (usize, usize),
    n: usize,
) -> Result<HomRModel> {
    if x >= c.num_objects() || y >= c.num_objects() || mu >= f.size(x) || nu >= f.size(y) {
        return invalid("object or element out of range");
    }
    // Hom^R_{NC}(x, y)_n: (n+1)-simplices x = … = x → y.
    let id_x = c.identity(x);
    let hom_r: Vec<NerveSimplex> = c
        .hom(x, y)
        .map(|a| {
            let mut objects = vec![x; n + 1];
            objects.push(y);
            let mut arrows: Vec<MorId> = c.hom(x, x).filter(|&e| e == id_x).cycle().take(n).collect();
            arrows.push(a);
            NerveSimplex { objects, arrows }
        })
        .collect();
    let labels: Vec<String> = (0..f.size(y)).map(|e| f.element_label(y, e)).collect();
    let fiber = FinSimplicialSet::discrete(&labels);
    let under: Vec<PointFamily> = un_point(&fiber, Variance::Right, n + 1)
        .into_iter()
        .filter(|t| t.act(&fiber, &[0]).maps[0].images()[0].core() == nu)
        .collect();
    let mut pullback = Vec::new();
    for h in &hom_r {
        let a = *h.arrows.last().unwrap();
        let image = f.apply(a, mu);
        let point = Simplex { core_dim: 0, core: image, surj: vec![0; n + 1] };
        let down = unit_family(&fiber, &point);
        for t in &under {
            let tail: Vec<usize> = (1..=n + 1).collect();
            if t.act(&fiber, &tail) == down {
                pullback.push((a, t.clone()));
            }
        }
    }
    let targets: Vec<ElementSimplex> = un_over_nerve(c, f, n + 1)
        .into_iter()
        .filter(|s| {
            let ns = &s.simplex;
            ns.objects[..=n].iter().all(|&o| o == x)
                && ns.arrows[..n].iter().all(|&a| a == id_x)
                && s.elements[..=n].iter().all(|&e| e == mu)
                && ns.objects[n + 1] == y
                && s.elements[n + 1] == nu
        })
        .collect();
    let mut matched: Vec<ElementSimplex> = pullback
        .iter()
        .map(|(a, _)| {
            let mut objects = vec![x; n + 1];
            objects.push(y);
            let mut arrows = vec![id_x; n];
            arrows.push(*a);
            let mut elements = vec![mu; n + 1];
            elements.push(nu);
            ElementSimplex { simplex: NerveSimplex { objects, arrows }, elements }
        })
        .collect();
    matched.sort();
    let before = matched.len();
    matched.dedup();
    if matched.len() != before || matched != targets {
        return Err(Error::Certificate(format!(
            "degree {n}: pullback has {} elements, right-morphism simplices {}",
            pullback.len(),
            targets.len()
        )));
    }
    Ok(HomRModel { degree: n, pullback, matched })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{poset_category, ConstantSingleton};

    fn corpus() -> Vec<FinSimplicialSet> {
        vec![
            FinSimplicialSet::standard(0),
            FinSimplicialSet::standard(1),
            FinSimplicialSet::standard(2),
            FinSimplicialSet::boundary(2).unwrap(),
            FinSimplicialSet::grid(),
        ]
    }

    #[test]
    fn simplex_counts() {
        let d2 = FinSimplicialSet::standard(2);
        // Monotone maps [k] → [2].
        assert_eq!(d2.simplices(0).len(), 3);
        assert_eq!(d2.simplices(1).len(), 6);
        assert_eq!(d2.simplices(3).len(), 15);
        let b = FinSimplicialSet::boundary(2).unwrap();
        assert_eq!(b.simplices(2).len(), 9);
        let g = FinSimplicialSet::grid();
        assert_eq!(g.generators(0).len(), 4);
        assert_eq!(g.generators(1).len(), 5);
        assert_eq!(g.generators(2).len(), 2);
    }

    #[test]
    fn rigid_homs() {
        assert_eq!(rigid_hom(3, 1, 1).unwrap().simplices(0).len(), 1);
        assert_eq!(rigid_hom(3, 1, 2).unwrap().simplices(0).len(), 1);
        let p = rigid_hom(3, 0, 3).unwrap();
        assert_eq!(p.generators(0).len(), 4);
        assert_eq!(p.generators(1).len(), 5);
        assert_eq!(p.generators(2).len(), 2);
        assert!(rigid_hom(3, 2, 1).unwrap().simplices(0).is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let g = FinSimplicialSet::grid();
        let back = FinSimplicialSet::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn broken_identities_are_rejected() {
        let mut gens = FinSimplicialSet::standard(2).generators.clone();
        gens[2][0].faces.swap(0, 2);
        assert!(FinSimplicialSet::new("bad", gens).is_err());
    }

    #[test]
    fn cube_maps_into_nerves_are_monotone_maps() {
        // Monotone maps from the Boolean 2-cube to [1]: the 6 up-sets.
        let d1 = FinSimplicialSet::standard(1);
        assert_eq!(cube_maps(&d1, &BoolCube::right(2, 0)).len(), 6);
        // To the grid: 6² coordinatewise.
        assert_eq!(cube_maps(&FinSimplicialSet::grid(), &BoolCube::right(2, 0)).len(), 36);
    }

    #[test]
    fn small_quasi_counts() {
        let pt = FinSimplicialSet::standard(0);
        for n in 0..=3 {
            assert_eq!(quasi_simplices(&pt, n).len(), 1);
            assert_eq!(un_point(&pt, Variance::Left, n).len(), 1);
        }
        let d1 = FinSimplicialSet::standard(1);
        assert_eq!(quasi_simplices(&d1, 0).len(), 2);
        assert_eq!(quasi_simplices(&d1, 1).len(), d1.simplices(1).len());
    }

    #[test]
    fn quasi_bijection_on_corpus() {
        for x in corpus() {
            for n in 0..=2 {
                let r = check_quasi_bijection(&x, n).unwrap();
                assert_eq!(r.quasi, r.right);
                assert_eq!(r.left, r.right);
            }
        }
    }

    #[test]
    fn opposite_on_simplices() {
        assert!(check_opposite(&FinSimplicialSet::standard(2), 2).unwrap() > 0);
        assert!(check_opposite(&FinSimplicialSet::boundary(2).unwrap(), 2).unwrap() > 0);
    }

    #[test]
    fn unit_is_simplicial() {
        let pt = FinSimplicialSet::standard(0);
        for n in 0..=3 {
            assert_eq!(unit_map(&pt, n).len(), un_point(&pt, Variance::Right, n).len());
        }
        check_unit_map(&FinSimplicialSet::standard(2), 2).unwrap();
        check_unit_map(&FinSimplicialSet::standard(1), 3).unwrap();
    }

    #[test]
    fn degenerate_units_are_degenerate() {
        let d1 = FinSimplicialSet::standard(1);
        for s in d1.simplices(1) {
            let t = unit_family(&d1, &s);
            let lowered = t.act(&d1, &[0, 1]);
            for j in 0..=1 {
                let y = d1.degeneracy(&s, j);
                assert_eq!(unit_family(&d1, &y), lowered.act(&d1, &codegeneracy(1, j)));
            }
        }
    }

    fn two_objects() -> crate::category::FinCategory {
        poset_category(vec!["x".into(), "y".into()], &[vec![true, true], vec![false, true]]).unwrap()
    }

    struct Pick;
    impl SetFunctor for Pick {
        fn size(&self, x: usize) -> usize {
            [2, 3][x]
        }
        fn apply(&self, f: MorId, e: usize) -> usize {
            if f == 1 {
                [2, 0][e]
            } else {
                e
            }
        }
    }

    #[test]
    fn un_over_nerve_small() {
        let c = two_objects();
        let un0 = un_over_nerve(&c, &ConstantSingleton, 2);
        assert_eq!(un0.len(), nerve(&c, 2).len());
        assert_eq!(un_over_nerve(&c, &Pick, 0).len(), 5);
        for n in 0..=3 {
            check_un_over_nerve(&c, &Pick, n).unwrap();
        }
    }

    #[test]
    fn hom_r_small() {
        let c = two_objects();
        let m = hom_r_model(&c, &Pick, (0, 0), (1, 2), 0).unwrap();
        assert_eq!(m.pullback.len(), 1);
        let m = hom_r_model(&c, &Pick, (0, 0), (1, 0), 2).unwrap();
        assert!(m.pullback.is_empty());
        let m = hom_r_model(&c, &ConstantSingleton, (0, 0), (1, 0), 1).unwrap();
        assert_eq!(m.pullback.len(), c.hom_size(0, 1));
    }

    #[test]
    fn un_over_ib_com() {
        let com = DiscreteOperad::com(2);
        for n in 0..=1 {
            check_un_over_ib(&com, 2, n).unwrap();
        }
    }
}
