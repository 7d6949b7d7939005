use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CSequence, Color, Element, OpData, Operation, PlanarTree, SymCollection};
use crate::error::{invalid, Error, Result};
use crate::pointed::Permutation;

/// A generator of a free operad; arity must be at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub arity: usize,
}

/// Which builtin operad to construct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperadSpec {
    Ass,
    Com,
    Unit(Vec<String>),
    FreeReduced(Vec<Generator>),
}

impl FromStr for OperadSpec {
    type Err = Error;

    /// Accepts `ass`, `com`, `unit`, `unit:a,b`, `free:2` or `free:2,3`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        match (head, tail) {
            ("ass", None) => Ok(OperadSpec::Ass),
            ("com", None) => Ok(OperadSpec::Com),
            ("unit", None) => Ok(OperadSpec::Unit(vec!["c".into()])),
            ("unit", Some(t)) => Ok(OperadSpec::Unit(t.split(',').map(str::to_string).collect())),
            ("free", Some(t)) => {
                let mut gens = Vec::new();
                for (i, a) in t.split(',').enumerate() {
                    let arity = a
                        .trim()
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad generator arity '{a}'")))?;
                    gens.push(Generator { name: format!("g{i}"), arity });
                }
                Ok(OperadSpec::FreeReduced(gens))
            }
            _ => invalid(format!("unknown operad spec '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperadKind {
    Associative,
    Commutative,
    Unit,
    Free(Vec<Generator>),
    Table(Box<OperadTable>),
}

/// Explicit level, action, unit and composition tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperadTable {
    levels: BTreeMap<CSequence, Vec<String>>,
    action: HashMap<(Operation, Permutation), Operation>,
    units: Vec<usize>,
    compose: HashMap<(Operation, Vec<Operation>), Operation>,
}

/// A set-valued colored operad truncated at a maximal arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteOperad {
    name: String,
    colors: Vec<String>,
    truncation: usize,
    kind: OperadKind,
}

pub fn build_operad(spec: &OperadSpec, truncation: usize) -> Result<DiscreteOperad> {
    match spec {
        OperadSpec::Ass => Ok(DiscreteOperad::ass(truncation)),
        OperadSpec::Com => Ok(DiscreteOperad::com(truncation)),
        OperadSpec::Unit(colors) => DiscreteOperad::unit_operad(colors.clone(), truncation),
        OperadSpec::FreeReduced(gens) => DiscreteOperad::free_reduced(gens.clone(), truncation),
    }
}

impl DiscreteOperad {
    pub fn ass(truncation: usize) -> Self {
        DiscreteOperad {
            name: "ass".into(),
            colors: vec!["c".into()],
            truncation,
            kind: OperadKind::Associative,
        }
    }

    pub fn com(truncation: usize) -> Self {
        DiscreteOperad {
            name: "com".into(),
            colors: vec!["c".into()],
            truncation,
            kind: OperadKind::Commutative,
        }
    }

    pub fn unit_operad(colors: Vec<String>, truncation: usize) -> Result<Self> {
        check_color_names(&colors)?;
        Ok(DiscreteOperad { name: "unit".into(), colors, truncation, kind: OperadKind::Unit })
    }

    pub fn free_reduced(generators: Vec<Generator>, truncation: usize) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.arity < 2) {
            return invalid(format!(
                "generator {} has arity {}; free generators need arity at least 2",
                g.name, g.arity
            ));
        }
        let arities: Vec<String> = generators.iter().map(|g| g.arity.to_string()).collect();
        Ok(DiscreteOperad {
            name: format!("free:{}", arities.join(",")),
            colors: vec!["c".into()],
            truncation,
            kind: OperadKind::Free(generators),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn kind(&self) -> &OperadKind {
        &self.kind
    }

    /// Same operad with another truncation; only rule-based operads may grow.
    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        if truncation > self.truncation && matches!(self.kind, OperadKind::Table(_)) {
            return Err(Error::TruncationExceeded { arity: truncation, bound: self.truncation });
        }
        let mut out = self.clone();
        out.truncation = truncation;
        Ok(out)
    }

    fn check_seq(&self, seq: &CSequence) -> Result<()> {
        if seq.arity() > self.truncation {
            return Err(Error::TruncationExceeded { arity: seq.arity(), bound: self.truncation });
        }
        if seq.inputs.iter().chain(std::iter::once(&seq.output)).any(|&c| c >= self.colors.len()) {
            return Err(Error::LevelMismatch(format!("{seq} uses an undeclared color")));
        }
        Ok(())
    }

    /// Operations of the level `P(seq)` in canonical order.
    pub fn operations(&self, seq: &CSequence) -> Result<Vec<Operation>> {
        self.check_seq(seq)?;
        let n = seq.arity();
        let op = |data| Operation { profile: seq.clone(), data };
        Ok(match &self.kind {
            OperadKind::Associative => Permutation::all(n).into_iter().map(|p| op(OpData::Perm(p))).collect(),
            OperadKind::Commutative => vec![op(OpData::Point)],
            OperadKind::Unit => {
                if n == 1 && seq.inputs[0] == seq.output {
                    vec![op(OpData::Unit)]
                } else {
                    vec![]
                }
            }
            OperadKind::Free(gens) => {
                let arities: Vec<usize> = gens.iter().map(|g| g.arity).collect();
                let trees = PlanarTree::enumerate(&arities, n);
                let perms = Permutation::all(n);
                let mut out = Vec::with_capacity(trees.len() * perms.len());
                for t in &trees {
                    for p in &perms {
                        out.push(op(OpData::Tree(t.clone(), p.clone())));
                    }
                }
                out
            }
            OperadKind::Table(t) => match t.levels.get(seq) {
                Some(labels) => (0..labels.len()).map(|i| op(OpData::Label(i))).collect(),
                None => vec![],
            },
        })
    }

    /// All operations of arity ≤ `max`, grouped by level in canonical order.
    pub fn all_operations(&self, max: usize) -> Result<Vec<Operation>> {
        let mut out = Vec::new();
        for seq in CSequence::all(self.colors.len(), max.min(self.truncation)) {
            out.extend(self.operations(&seq)?);
        }
        Ok(out)
    }

    pub fn unit(&self, c: Color) -> Operation {
        let profile = CSequence { inputs: vec![c], output: c };
        let data = match &self.kind {
            OperadKind::Associative => OpData::Perm(Permutation::identity(1)),
            OperadKind::Commutative => OpData::Point,
            OperadKind::Unit => OpData::Unit,
            OperadKind::Free(_) => OpData::Tree(PlanarTree::Leaf, Permutation::identity(1)),
            OperadKind::Table(t) => OpData::Label(t.units[c]),
        };
        Operation { profile, data }
    }

    /// Human-readable label of an operation, unique inside its level.
    pub fn label(&self, op: &Operation) -> String {
        match (&self.kind, &op.data) {
            (OperadKind::Table(t), OpData::Label(i)) => t.levels[&op.profile][*i].clone(),
            _ => op.to_string(),
        }
    }

    /// Full composition `γ(θ; ψ_1, …, ψ_k)`.
    pub fn compose(&self, theta: &Operation, psis: &[Operation]) -> Result<Operation> {
        let k = theta.arity();
        if psis.len() != k {
            return Err(Error::LevelMismatch(format!(
                "{theta} has arity {k} but {} operations were plugged in",
                psis.len()
            )));
        }
        for (i, psi) in psis.iter().enumerate() {
            if psi.profile.output != theta.profile.inputs[i] {
                return Err(Error::LevelMismatch(format!("input {} of {theta} does not match {psi}", i + 1)));
            }
        }
        let arity: usize = psis.iter().map(Operation::arity).sum();
        if arity > self.truncation {
            return Err(Error::TruncationExceeded { arity, bound: self.truncation });
        }
        let profile = CSequence {
            inputs: psis.iter().flat_map(|p| p.profile.inputs.iter().copied()).collect(),
            output: theta.profile.output,
        };
        let data = match (&self.kind, &theta.data) {
            (OperadKind::Associative, OpData::Perm(th)) => {
                let ps = psis
                    .iter()
                    .map(|p| match &p.data {
                        OpData::Perm(q) => Ok(q),
                        _ => Err(Error::LevelMismatch(format!("{p} is not associative"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                OpData::Perm(block_substitution(th, &ps))
            }
            (OperadKind::Commutative, OpData::Point) => OpData::Point,
            (OperadKind::Unit, OpData::Unit) => OpData::Unit,
            (OperadKind::Free(_), OpData::Tree(tree, th)) => {
                let mut trees = Vec::with_capacity(k);
                let mut perms = Vec::with_capacity(k);
                for p in psis {
                    match &p.data {
                        OpData::Tree(t, q) => {
                            trees.push(t);
                            perms.push(q);
                        }
                        _ => return Err(Error::LevelMismatch(format!("{p} is not a tree operation"))),
                    }
                }
                let inv = th.inverse();
                let subs: Vec<PlanarTree> = (1..=k).map(|pos| trees[inv.apply(pos) - 1].clone()).collect();
                OpData::Tree(tree.graft(&subs), block_substitution(th, &perms))
            }
            (OperadKind::Table(t), OpData::Label(_)) => {
                return t
                    .compose
                    .get(&(theta.clone(), psis.to_vec()))
                    .cloned()
                    .ok_or_else(|| {
                        let inner: Vec<String> = psis.iter().map(|p| self.label(p)).collect();
                        Error::CompositionUndefined(format!("{}({})", self.label(theta), inner.join(", ")))
                    });
            }
            _ => return Err(Error::LevelMismatch(format!("{theta} does not belong to {}", self.name))),
        };
        Ok(Operation { profile, data })
    }

    /// `θ ∘_i ψ`, plugging ψ into input `i` (1-based).
    pub fn partial(&self, theta: &Operation, i: usize, psi: &Operation) -> Result<Operation> {
        let psis: Vec<Operation> = (1..=theta.arity())
            .map(|j| if j == i { psi.clone() } else { self.unit(theta.profile.inputs[j - 1]) })
            .collect();
        self.compose(theta, &psis)
    }

    /// The right action `θ^σ ∈ P(c_σ(1), …, c_σ(n); c)`.
    pub fn act_op(&self, theta: &Operation, sigma: &Permutation) -> Result<Operation> {
        if sigma.len() != theta.arity() {
            return Err(Error::LevelMismatch(format!("{sigma} does not act on {theta}")));
        }
        if sigma.is_identity() {
            return Ok(theta.clone());
        }
        let profile = theta.profile.permuted(sigma);
        let data = match (&self.kind, &theta.data) {
            (OperadKind::Associative, OpData::Perm(p)) => OpData::Perm(p.compose(sigma)),
            (OperadKind::Commutative, OpData::Point) => OpData::Point,
            (OperadKind::Free(_), OpData::Tree(t, p)) => OpData::Tree(t.clone(), p.compose(sigma)),
            (OperadKind::Table(t), OpData::Label(_)) => {
                return t.action.get(&(theta.clone(), sigma.clone())).cloned().ok_or_else(|| {
                    Error::LevelMismatch(format!("action of {sigma} on {} is not tabulated", self.label(theta)))
                });
            }
            _ => return Err(Error::LevelMismatch(format!("{theta} does not belong to {}", self.name))),
        };
        Ok(Operation { profile, data })
    }

    /// Converts any operad into explicit tables with the same labels.
    pub fn tabulate(&self) -> Result<DiscreteOperad> {
        let seqs = CSequence::all(self.colors.len(), self.truncation);
        let mut levels = BTreeMap::new();
        let mut index: HashMap<Operation, Operation> = HashMap::new();
        for seq in &seqs {
            let ops = self.operations(seq)?;
            if ops.is_empty() {
                continue;
            }
            for (i, op) in ops.iter().enumerate() {
                index.insert(op.clone(), Operation { profile: seq.clone(), data: OpData::Label(i) });
            }
            levels.insert(seq.clone(), ops.iter().map(|o| self.label(o)).collect());
        }
        let mut action = HashMap::new();
        let mut compose = HashMap::new();
        let all = self.all_operations(self.truncation)?;
        for op in &all {
            for sigma in Permutation::all(op.arity()) {
                let image = self.act_op(op, &sigma)?;
                action.insert((index[op].clone(), sigma), index[&image].clone());
            }
        }
        for theta in &all {
            for_each_plug(self, theta, self.truncation, &mut |psis| {
                let r = self.compose(theta, psis)?;
                let key: Vec<Operation> = psis.iter().map(|p| index[p].clone()).collect();
                compose.insert((index[theta].clone(), key), index[&r].clone());
                Ok(())
            })?;
        }
        let units = (0..self.colors.len())
            .map(|c| match &index[&self.unit(c)].data {
                OpData::Label(i) => *i,
                _ => unreachable!(),
            })
            .collect();
        Ok(DiscreteOperad {
            name: self.name.clone(),
            colors: self.colors.clone(),
            truncation: self.truncation,
            kind: OperadKind::Table(Box::new(OperadTable { levels, action, units, compose })),
        })
    }

    /// Overwrites one composition entry of a tabulated operad.
    pub fn set_composition(&mut self, theta: &Operation, psis: &[Operation], result: Operation) -> Result<()> {
        match &mut self.kind {
            OperadKind::Table(t) => {
                t.compose.insert((theta.clone(), psis.to_vec()), result);
                Ok(())
            }
            _ => invalid("only tabulated operads have editable composition"),
        }
    }

    pub fn to_file(&self) -> Result<OperadFile> {
        let builtin = match &self.kind {
            OperadKind::Associative => Some("ass".to_string()),
            OperadKind::Commutative => Some("com".to_string()),
            OperadKind::Unit => Some("unit".to_string()),
            OperadKind::Free(g) => {
                let a: Vec<String> = g.iter().map(|g| g.arity.to_string()).collect();
                Some(format!("free:{}", a.join(",")))
            }
            OperadKind::Table(_) => None,
        };
        let mut file = OperadFile {
            name: self.name.clone(),
            colors: self.colors.clone(),
            truncation: self.truncation,
            builtin,
            levels: BTreeMap::new(),
            action: vec![],
            units: BTreeMap::new(),
            compose: vec![],
        };
        if let OperadKind::Table(t) = &self.kind {
            let key = |s: &CSequence| s.display_with(&self.colors);
            for (seq, labels) in &t.levels {
                file.levels.insert(key(seq), labels.clone());
            }
            let mut action: Vec<ActionEntry> = t
                .action
                .iter()
                .map(|((op, sigma), image)| ActionEntry {
                    level: key(&op.profile),
                    element: self.label(op),
                    perm: sigma.values().to_vec(),
                    image: self.label(image),
                })
                .collect();
            action.sort();
            file.action = action;
            for (c, &u) in t.units.iter().enumerate() {
                let seq = CSequence { inputs: vec![c], output: c };
                file.units.insert(self.colors[c].clone(), t.levels[&seq][u].clone());
            }
            let elref = |op: &Operation| ElementRef(key(&op.profile), self.label(op));
            let mut compose: Vec<ComposeEntry> = t
                .compose
                .iter()
                .map(|((theta, psis), r)| ComposeEntry {
                    outer: elref(theta),
                    inner: psis.iter().map(elref).collect(),
                    result: self.label(r),
                })
                .collect();
            compose.sort();
            file.compose = compose;
        }
        Ok(file)
    }

    pub fn from_file(file: &OperadFile) -> Result<Self> {
        if let Some(b) = &file.builtin {
            let spec = match b.as_str() {
                "unit" => OperadSpec::Unit(file.colors.clone()),
                other => other.parse()?,
            };
            let mut op = build_operad(&spec, file.truncation)?;
            op.name = file.name.clone();
            return Ok(op);
        }
        check_color_names(&file.colors)?;
        let color_index: HashMap<&str, usize> =
            file.colors.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let parse_seq = |s: &str| -> Result<CSequence> {
            let (ins, out) = s
                .split_once(';')
                .ok_or_else(|| Error::Invalid(format!("level key '{s}' lacks ';'")))?;
            let color = |c: &str| {
                color_index
                    .get(c)
                    .copied()
                    .ok_or_else(|| Error::Invalid(format!("unknown color '{c}'")))
            };
            let inputs = if ins.is_empty() {
                vec![]
            } else {
                ins.split(',').map(color).collect::<Result<Vec<_>>>()?
            };
            Ok(CSequence { inputs, output: color(out)? })
        };
        let mut levels = BTreeMap::new();
        let mut lookup: HashMap<(CSequence, String), Operation> = HashMap::new();
        for (k, labels) in &file.levels {
            let seq = parse_seq(k)?;
            if seq.arity() > file.truncation {
                return Err(Error::TruncationExceeded { arity: seq.arity(), bound: file.truncation });
            }
            for (i, l) in labels.iter().enumerate() {
                let op = Operation { profile: seq.clone(), data: OpData::Label(i) };
                if lookup.insert((seq.clone(), l.clone()), op).is_some() {
                    return invalid(format!("duplicate label '{l}' in level {k}"));
                }
            }
            levels.insert(seq, labels.clone());
        }
        let find = |level: &CSequence, label: &str| {
            lookup
                .get(&(level.clone(), label.to_string()))
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("unknown element '{label}' in level {level}")))
        };
        let mut action = HashMap::new();
        for a in &file.action {
            let seq = parse_seq(&a.level)?;
            let sigma = Permutation::new(a.perm.clone())?;
            if sigma.len() != seq.arity() {
                return invalid(format!("permutation {sigma} does not fit level {}", a.level));
            }
            let op = find(&seq, &a.element)?;
            let image = find(&seq.permuted(&sigma), &a.image)?;
            action.insert((op, sigma), image);
        }
        for (seq, labels) in &levels {
            for i in 0..labels.len() {
                let op = Operation { profile: seq.clone(), data: OpData::Label(i) };
                for sigma in Permutation::all(seq.arity()) {
                    if sigma.is_identity() {
                        continue;
                    }
                    if !action.contains_key(&(op.clone(), sigma.clone())) {
                        return invalid(format!("action of {sigma} on '{}' missing", labels[i]));
                    }
                }
            }
        }
        let mut units = Vec::with_capacity(file.colors.len());
        for (c, name) in file.colors.iter().enumerate() {
            let label = file
                .units
                .get(name)
                .ok_or_else(|| Error::Invalid(format!("no unit for color '{name}'")))?;
            let seq = CSequence { inputs: vec![c], output: c };
            match find(&seq, label)?.data {
                OpData::Label(i) => units.push(i),
                _ => unreachable!(),
            }
        }
        let mut compose = HashMap::new();
        for e in &file.compose {
            let theta = find(&parse_seq(&e.outer.0)?, &e.outer.1)?;
            let psis = e
                .inner
                .iter()
                .map(|r| find(&parse_seq(&r.0)?, &r.1))
                .collect::<Result<Vec<_>>>()?;
            let profile = CSequence {
                inputs: psis.iter().flat_map(|p| p.profile.inputs.iter().copied()).collect(),
                output: theta.profile.output,
            };
            let r = find(&profile, &e.result)?;
            compose.insert((theta, psis), r);
        }
        Ok(DiscreteOperad {
            name: file.name.clone(),
            colors: file.colors.clone(),
            truncation: file.truncation,
            kind: OperadKind::Table(Box::new(OperadTable { levels, action, units, compose })),
        })
    }
}

fn check_color_names(colors: &[String]) -> Result<()> {
    if colors.is_empty() {
        return invalid("an operad needs at least one color");
    }
    for c in colors {
        if c.is_empty() || c.contains([',', ';']) {
            return invalid(format!("color name '{c}' may not be empty or contain ',' or ';'"));
        }
    }
    let mut sorted = colors.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != colors.len() {
        return invalid("duplicate color names");
    }
    Ok(())
}

/// Result positions of `γ(θ; ψ_1, …, ψ_k)` where each permutation lists
/// input positions: input `l` of block `i` lands after all blocks placed
/// before `θ(i)`, at offset `ψ_i(l)`.
pub(crate) fn block_substitution(theta: &Permutation, psis: &[&Permutation]) -> Permutation {
    let k = theta.len();
    let mut size_at = vec![0usize; k + 1];
    for (i, p) in psis.iter().enumerate() {
        size_at[theta.apply(i + 1)] = p.len();
    }
    let mut offset_at = vec![0usize; k + 2];
    for pos in 1..=k {
        offset_at[pos + 1] = offset_at[pos] + size_at[pos];
    }
    let mut values = Vec::new();
    for (i, p) in psis.iter().enumerate() {
        let off = offset_at[theta.apply(i + 1)];
        values.extend(p.values().iter().map(|&v| off + v));
    }
    Permutation::new(values).expect("block substitution is a permutation")
}

/// Calls `f` on every tuple `(ψ_1, …, ψ_k)` pluggable into `theta` with
/// total arity ≤ `budget`.
pub(crate) fn for_each_plug(
    p: &DiscreteOperad,
    theta: &Operation,
    budget: usize,
    f: &mut dyn FnMut(&[Operation]) -> Result<()>,
) -> Result<()> {
    let by_output = operations_by_output(p, budget)?;
    let mut current = Vec::with_capacity(theta.arity());
    plug_rec(&by_output, &theta.profile.inputs, budget, &mut current, f)
}

pub(crate) fn operations_by_output(p: &DiscreteOperad, budget: usize) -> Result<Vec<Vec<Operation>>> {
    let mut by_output = vec![Vec::new(); p.colors.len()];
    for op in p.all_operations(budget)? {
        by_output[op.profile.output].push(op);
    }
    Ok(by_output)
}

fn plug_rec(
    by_output: &[Vec<Operation>],
    slots: &[Color],
    budget: usize,
    current: &mut Vec<Operation>,
    f: &mut dyn FnMut(&[Operation]) -> Result<()>,
) -> Result<()> {
    if current.len() == slots.len() {
        return f(current);
    }
    let c = slots[current.len()];
    for op in &by_output[c] {
        if op.arity() <= budget {
            current.push(op.clone());
            plug_rec(by_output, slots, budget - op.arity(), current, f)?;
            current.pop();
        }
    }
    Ok(())
}

impl SymCollection for DiscreteOperad {
    fn num_colors(&self) -> usize {
        self.colors.len()
    }

    fn truncation(&self) -> usize {
        self.truncation
    }

    fn level(&self, seq: &CSequence) -> Result<Vec<Element>> {
        Ok(self.operations(seq)?.into_iter().map(Element::Op).collect())
    }

    fn act(&self, e: &Element, sigma: &Permutation) -> Result<Element> {
        match e {
            Element::Op(op) => Ok(Element::Op(self.act_op(op, sigma)?)),
            other => Err(Error::LevelMismatch(format!("{other} is not an operation of {}", self.name))),
        }
    }
}

impl fmt::Display for DiscreteOperad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}≤{}", self.name, self.truncation)
    }
}

/// JSON form of an operad: either a named builtin or explicit tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperadFile {
    pub name: String,
    pub colors: Vec<String>,
    pub truncation: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default)]
    pub levels: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub action: Vec<ActionEntry>,
    #[serde(default)]
    pub units: BTreeMap<String, String>,
    #[serde(default)]
    pub compose: Vec<ComposeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionEntry {
    pub level: String,
    pub element: String,
    pub perm: Vec<usize>,
    pub image: String,
}

/// `(level, label)` of an element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementRef(pub String, pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComposeEntry {
    pub outer: ElementRef,
    pub inner: Vec<ElementRef>,
    pub result: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_sizes() {
        let ass = DiscreteOperad::ass(4);
        let sizes: Vec<usize> = (0..=4).map(|n| ass.operations(&CSequence::mono(n)).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 6, 24]);
        let free = DiscreteOperad::free_reduced(vec![Generator { name: "m".into(), arity: 2 }], 4).unwrap();
        let sizes: Vec<usize> = (0..=4).map(|n| free.operations(&CSequence::mono(n)).unwrap().len()).collect();
        assert_eq!(sizes, vec![0, 1, 2, 12, 120]);
        assert!(DiscreteOperad::free_reduced(vec![Generator { name: "u".into(), arity: 1 }], 3).is_err());
    }

    #[test]
    fn ass_alpha_zero_solves_its_equation() {
        // [i,1,…,i−1,i+1,…,n+1] ∘_1 μ_0 inserts the plugged input at position i.
        let ass = DiscreteOperad::ass(4);
        let mu0 = Operation { profile: CSequence::mono(0), data: OpData::Perm(Permutation::identity(0)) };
        for n in 0..=3 {
            for i in 1..=n + 1 {
                let mut v = vec![i];
                v.extend((1..=n + 1).filter(|&j| j != i));
                let a0 = Operation { profile: CSequence::mono(n + 1), data: OpData::Perm(Permutation::new(v).unwrap()) };
                let r = ass.partial(&a0, 1, &mu0).unwrap();
                assert_eq!(r.data, OpData::Perm(Permutation::identity(n)));
            }
        }
    }

    #[test]
    fn file_roundtrip() {
        let t = DiscreteOperad::ass(3).tabulate().unwrap();
        let back = DiscreteOperad::from_file(&t.to_file().unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
