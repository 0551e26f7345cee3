//! The diagram construction procedure.
//!
//! A [`Diagram`] is a graded, edge-labeled, signed directed graph. Level `n` holds the
//! generators of the free module in homological degree `n`, and an edge
//! `v -> w` with label `l` and sign `σ` stands for multiplication by `σ·x_l` from the
//! copy of `R` at `v` into the copy at `w`.
//!
//! Starting from a single edge `• -x_i-> •`, each new level is obtained by
//!
//! 1. collecting *demands* from the current top level: column completions for every
//!    top edge labeled `i` and every `j` with `x_i x_j ∈ I`, and linked pairs of
//!    diamond halves for every two top edges into a common vertex whose labels
//!    `i ≠ j` satisfy `x_i x_j ∉ I`;
//! 2. merging demands that ask for the same `(target, label)` arrow, and keeping both
//!    halves of a diamond on the same new vertex (union-find closure);
//! 3. solving the diamond sign constraints `σ_a σ_b = -s_1 s_2` by parity propagation;
//! 4. checking that the two newest differentials compose to zero in `R`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::ops::{Mul, Neg};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{self, DdFailure, Entry};
use crate::ring::RingSpec;

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("x{label} divides no generator of the ideal, so it cannot start the construction")]
    InvalidInitial { label: usize },
    #[error("at least one level is required")]
    NoLevels,
    #[error("sign conflict while building level {level}: odd constraint cycle through {cycle:?}")]
    SignConflict { level: usize, cycle: Vec<(usize, usize)> },
    #[error("level {level} does not compose to zero with level {}: {failure}", level - 1)]
    NotAComplex { level: usize, failure: DdFailure },
    #[error("malformed diagram: {0}")]
    Malformed(String),
    #[error("malformed diagram JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Sign of an arrow, serialized as `1` / `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

/// The local diagrams attached to pairs of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Template {
    /// `• -top-> • -bottom-> •` for `x_top x_bottom ∈ I`, `top ≠ bottom`.
    Column { top: usize, bottom: usize },
    /// `• -i-> • -i-> •` for `x_i^2 ∈ I`.
    RepeatedColumn { label: usize },
    /// The square closing `x_i x_j ∉ I`, canonicalized with `i < j`.
    Diamond { i: usize, j: usize },
}

pub fn build_template_set(spec: &RingSpec) -> BTreeSet<Template> {
    let n = spec.num_vars();
    let mut out = BTreeSet::new();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                if spec.kills(i, i) {
                    out.insert(Template::RepeatedColumn { label: i });
                }
            } else if spec.kills(i, j) {
                out.insert(Template::Column { top: j, bottom: i });
            } else if i < j {
                out.insert(Template::Diamond { i, j });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub level: usize,
}

/// An arrow from a level-`L+1` vertex down to a level-`L` vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: usize,
    pub sign: Sign,
}

/// Why a new arrow is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandOrigin {
    /// Column completion above the top edge with this index.
    Column { edge: usize },
    /// One half of the diamond recorded in `Demands::links[link]`.
    DiamondHalf { link: usize },
}

/// A request for a new arrow with `label` into the top-level vertex `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Demand {
    pub target: usize,
    pub label: usize,
    pub origin: DemandOrigin,
}

impl Demand {
    pub fn key(&self) -> (usize, usize) {
        (self.target, self.label)
    }
}

/// Two diamond halves that must sit on one new vertex with `σ_a · σ_b = parity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiamondLink {
    pub halves: (usize, usize),
    pub parity: Sign,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Demands {
    pub demands: Vec<Demand>,
    pub links: Vec<DiamondLink>,
}

/// The arrows of one prospective new vertex, as sorted distinct `(target, label)` keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandClass {
    pub keys: Vec<(usize, usize)>,
}

/// Unions demands asking for the same arrow and the two halves of every diamond.
/// Classes come out ordered by their smallest `(target, label)` key.
pub fn merge_demands(demands: &Demands) -> Vec<DemandClass> {
    let count = demands.demands.len();
    let mut uf = UnionFind::<usize>::new(count.max(1));
    let mut first_with_key: HashMap<(usize, usize), usize> = HashMap::new();
    for (idx, d) in demands.demands.iter().enumerate() {
        let rep = *first_with_key.entry(d.key()).or_insert(idx);
        uf.union(rep, idx);
    }
    for link in &demands.links {
        uf.union(link.halves.0, link.halves.1);
    }
    let mut classes: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (idx, d) in demands.demands.iter().enumerate() {
        classes.entry(uf.find(idx)).or_default().insert(d.key());
    }
    let mut out: Vec<DemandClass> = classes
        .into_values()
        .map(|keys| DemandClass { keys: keys.into_iter().collect() })
        .collect();
    out.sort_by_key(|c| c.keys[0]);
    out
}

/// Assigns a sign to every new arrow so each diamond constraint holds.
///
/// `(target, label)` of a requested arrow.
pub type DemandKey = (usize, usize);
pub type SignMap = BTreeMap<DemandKey, Sign>;

/// Each connected component of the constraint graph admits exactly two solutions,
/// negatives of each other. We keep the one with fewer minus signs; on a tie the
/// minus goes on the arrow with the smallest label (then smallest target). Arrows
/// untouched by any diamond get `+`.
pub fn assign_signs(classes: &[DemandClass], demands: &Demands) -> Result<SignMap, Vec<DemandKey>> {
    let mut adjacency: BTreeMap<DemandKey, Vec<(DemandKey, Sign)>> = BTreeMap::new();
    for link in &demands.links {
        let a = demands.demands[link.halves.0].key();
        let b = demands.demands[link.halves.1].key();
        adjacency.entry(a).or_default().push((b, link.parity));
        adjacency.entry(b).or_default().push((a, link.parity));
    }

    let mut signs: BTreeMap<(usize, usize), Sign> = BTreeMap::new();
    let mut parent: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for &root in adjacency.keys() {
        if signs.contains_key(&root) {
            continue;
        }
        let mut component = vec![root];
        signs.insert(root, Sign::Plus);
        let mut queue = VecDeque::from([root]);
        while let Some(key) = queue.pop_front() {
            let here = signs[&key];
            for &(next, parity) in &adjacency[&key] {
                let wanted = here * parity;
                match signs.get(&next) {
                    None => {
                        signs.insert(next, wanted);
                        parent.insert(next, key);
                        component.push(next);
                        queue.push_back(next);
                    }
                    Some(&have) if have != wanted => {
                        return Err(odd_cycle(&parent, key, next));
                    }
                    Some(_) => {}
                }
            }
        }
        let minus = component.iter().filter(|k| signs[*k] == Sign::Minus).count();
        let plus = component.len() - minus;
        let smallest = *component
            .iter()
            .min_by_key(|&&(target, label)| (label, target))
            .expect("component is nonempty");
        let flip = minus > plus || (minus == plus && signs[&smallest] == Sign::Plus);
        if flip {
            for key in &component {
                let s = signs[key];
                signs.insert(*key, -s);
            }
        }
    }

    for class in classes {
        for key in &class.keys {
            signs.entry(*key).or_insert(Sign::Plus);
        }
    }
    Ok(signs)
}

/// Tree paths from `a` and `b` to their common ancestor, joined through the edge `a - b`.
fn odd_cycle(
    parent: &HashMap<(usize, usize), (usize, usize)>,
    a: (usize, usize),
    b: (usize, usize),
) -> Vec<(usize, usize)> {
    let path = |mut k: (usize, usize)| {
        let mut p = vec![k];
        while let Some(&up) = parent.get(&k) {
            p.push(up);
            k = up;
        }
        p
    };
    let mut pa = path(a);
    let mut pb = path(b);
    while pa.len() > 1 && pb.len() > 1 && pa[pa.len() - 2] == pb[pb.len() - 2] {
        pa.pop();
        pb.pop();
    }
    pb.pop();
    pb.reverse();
    pa.extend(pb);
    pa
}

/// The output of the construction: levels of vertices and the arrows between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    spec: RingSpec,
    initial_label: usize,
    /// Vertex ids per level. Ids are allocated level-major, so each level is a contiguous run.
    levels: Vec<Vec<usize>>,
    /// `edges[n]` holds the arrows from level `n` to level `n - 1`; `edges[0]` is empty.
    edges: Vec<Vec<Edge>>,
}

impl Diagram {
    /// The single arrow `• -x_i-> •` from level 1 to level 0.
    pub fn init(spec: &RingSpec, initial_label: usize) -> Result<Self, DiagramError> {
        if initial_label == 0 || initial_label > spec.num_vars() || !spec.is_factor(initial_label) {
            return Err(DiagramError::InvalidInitial { label: initial_label });
        }
        Ok(Diagram {
            spec: spec.clone(),
            initial_label,
            levels: vec![vec![0], vec![1]],
            edges: vec![
                Vec::new(),
                vec![Edge { from: 1, to: 0, label: initial_label, sign: Sign::Plus }],
            ],
        })
    }

    /// Initial arrow followed by `levels - 1` extensions.
    pub fn build(spec: &RingSpec, initial_label: usize, levels: usize) -> Result<Self, DiagramError> {
        if levels == 0 {
            return Err(DiagramError::NoLevels);
        }
        let mut d = Self::init(spec, initial_label)?;
        for _ in 1..levels {
            d.extend_level()?;
        }
        Ok(d)
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    pub fn initial_label(&self) -> usize {
        self.initial_label
    }

    /// Index of the highest level.
    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &[usize] {
        &self.levels[n]
    }

    pub fn level_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(level, ids)| ids.iter().map(move |&id| Vertex { id, level }))
    }

    /// Arrows from level `n` down to level `n - 1`.
    pub fn edges_from_level(&self, n: usize) -> &[Edge] {
        &self.edges[n]
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().flatten()
    }

    pub fn level_of(&self, id: usize) -> Option<usize> {
        self.levels.iter().position(|ids| ids.first().is_some_and(|&f| f <= id) && ids.last().is_some_and(|&l| id <= l))
    }

    /// Position of a vertex inside its level (its row/column in the differentials).
    pub fn index_in_level(&self, level: usize, id: usize) -> usize {
        id - self.levels[level][0]
    }

    /// Demands raised by the arrows from the top level to the level below it.
    pub fn collect_demands(&self) -> Demands {
        let top = self.edges.last().map(Vec::as_slice).unwrap_or_default();
        let mut out = Demands::default();
        for (idx, e) in top.iter().enumerate() {
            for j in self.spec.annihilating_labels(e.label) {
                out.demands.push(Demand {
                    target: e.from,
                    label: j,
                    origin: DemandOrigin::Column { edge: idx },
                });
            }
        }
        let mut by_target: BTreeMap<usize, Vec<&Edge>> = BTreeMap::new();
        for e in top {
            by_target.entry(e.to).or_default().push(e);
        }
        for group in by_target.values() {
            for (a, e1) in group.iter().enumerate() {
                for e2 in &group[a + 1..] {
                    if e1.from == e2.from || e1.label == e2.label || self.spec.kills(e1.label, e2.label) {
                        continue;
                    }
                    let link = out.links.len();
                    let first = out.demands.len();
                    out.demands.push(Demand {
                        target: e1.from,
                        label: e2.label,
                        origin: DemandOrigin::DiamondHalf { link },
                    });
                    out.demands.push(Demand {
                        target: e2.from,
                        label: e1.label,
                        origin: DemandOrigin::DiamondHalf { link },
                    });
                    out.links.push(DiamondLink {
                        halves: (first, first + 1),
                        parity: -(e1.sign * e2.sign),
                    });
                }
            }
        }
        out
    }

    /// Adds one level on top. On error the diagram is left unchanged.
    pub fn extend_level(&mut self) -> Result<(), DiagramError> {
        let new_level = self.levels.len();
        let demands = self.collect_demands();
        let classes = merge_demands(&demands);
        let signs = assign_signs(&classes, &demands)
            .map_err(|cycle| DiagramError::SignConflict { level: new_level, cycle })?;

        let first_new = self.vertex_count();
        let mut ids = Vec::with_capacity(classes.len());
        let mut new_edges = Vec::new();
        for (id, class) in (first_new..).zip(&classes) {
            ids.push(id);
            for &(target, label) in &class.keys {
                new_edges.push(Edge { from: id, to: target, label, sign: signs[&(target, label)] });
            }
        }

        let mid_base = self.levels[new_level - 1][0];
        let upper = entries(&new_edges, mid_base, first_new);
        let lower = entries(&self.edges[new_level - 1], self.levels[new_level - 2][0], mid_base);
        if let Some(failure) = complex::compose(&self.spec, &lower, &upper) {
            return Err(DiagramError::NotAComplex { level: new_level, failure: failure.at(new_level) });
        }

        self.levels.push(ids);
        self.edges.push(new_edges);
        Ok(())
    }

    /// Checks the structural invariants: contiguous level-major ids, level-lowering arrows,
    /// no orphan generators, and at most one arrow per `(target, label)` from above.
    pub fn check_invariants(&self) -> Result<(), DiagramError> {
        let bad = |msg: String| Err(DiagramError::Malformed(msg));
        if self.levels.len() < 2 || self.levels[0] != vec![0] {
            return bad("level 0 must hold exactly the vertex 0".into());
        }
        if self.edges.len() != self.levels.len() || !self.edges[0].is_empty() {
            return bad("edge levels do not line up with vertex levels".into());
        }
        let mut expected = 0;
        for (n, ids) in self.levels.iter().enumerate() {
            for &id in ids {
                if id != expected {
                    return bad(format!("vertex ids are not sequential at level {n}"));
                }
                expected += 1;
            }
        }
        for n in 1..self.levels.len() {
            let mut seen_target_label = BTreeSet::new();
            let mut with_out_edge = BTreeSet::new();
            for e in &self.edges[n] {
                if !self.levels[n].contains(&e.from) || !self.levels[n - 1].contains(&e.to) {
                    return bad(format!("edge {}->{} does not drop from level {n} to {}", e.from, e.to, n - 1));
                }
                if e.label == 0 || e.label > self.spec.num_vars() {
                    return bad(format!("edge label {} out of range", e.label));
                }
                if !seen_target_label.insert((e.to, e.label)) {
                    return bad(format!("two arrows labeled {} enter vertex {}", e.label, e.to));
                }
                with_out_edge.insert(e.from);
            }
            if with_out_edge.len() != self.levels[n].len() {
                return bad(format!("level {n} has a vertex without outgoing arrows"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = DiagramDoc {
            spec: self.spec.clone(),
            initial: self.initial_label,
            levels: self.level_counts(),
            vertices: self.vertices().collect(),
            edges: self.edges().copied().collect(),
        };
        serde_json::to_string_pretty(&doc).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let doc: DiagramDoc = serde_json::from_str(text)?;
        let mut levels: Vec<Vec<usize>> = doc.levels.iter().map(|&c| Vec::with_capacity(c)).collect();
        for v in &doc.vertices {
            let Some(slot) = levels.get_mut(v.level) else {
                return Err(DiagramError::Malformed(format!("vertex {} sits on unknown level {}", v.id, v.level)));
            };
            slot.push(v.id);
        }
        if levels.iter().map(Vec::len).ne(doc.levels.iter().copied()) {
            return Err(DiagramError::Malformed("level counts disagree with the vertex list".into()));
        }
        let mut level_of = HashMap::new();
        for v in &doc.vertices {
            level_of.insert(v.id, v.level);
        }
        let mut edges = vec![Vec::new(); levels.len()];
        for e in doc.edges {
            match level_of.get(&e.from) {
                Some(&n) if n >= 1 => edges[n].push(e),
                _ => return Err(DiagramError::Malformed(format!("edge from unknown vertex {}", e.from))),
            }
        }
        let d = Diagram { spec: doc.spec, initial_label: doc.initial, levels, edges };
        d.check_invariants()?;
        Ok(d)
    }

    /// Graphviz rendering, one rank per level, bottom to top.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph diagram {{").unwrap();
        writeln!(out, "  rankdir=BT;").unwrap();
        writeln!(out, "  node [shape=point, width=0.12];").unwrap();
        for (n, ids) in self.levels.iter().enumerate() {
            let names: Vec<String> = ids.iter().map(|id| format!("v{id}")).collect();
            writeln!(out, "  {{ rank=same; /* level {n} */ {}; }}", names.join("; ")).unwrap();
        }
        for e in self.edges() {
            let minus = if e.sign == Sign::Minus { "-" } else { "" };
            writeln!(out, "  v{} -> v{} [label=\"{minus}x{}\"];", e.from, e.to, e.label).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in (1..self.levels.len()).rev() {
            write!(f, "{n}:")?;
            for e in &self.edges[n] {
                let minus = if e.sign == Sign::Minus { "-" } else { "" };
                write!(f, " {}-{minus}{}->{}", e.from, e.label, e.to)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Matrix entries for `edges`, with rows and columns counted from the first id of each level.
fn entries(edges: &[Edge], row_base: usize, col_base: usize) -> Vec<Entry> {
    edges
        .iter()
        .map(|e| Entry { row: e.to - row_base, col: e.from - col_base, sign: e.sign, label: e.label })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct DiagramDoc {
    spec: RingSpec,
    initial: usize,
    levels: Vec<usize>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}
