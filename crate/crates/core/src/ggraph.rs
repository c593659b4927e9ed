//! Finite G-graphs `(V, E, ι, τ)` and the equivariant deformation moves on
//! G-trees: compression, sliding, subdivision and reorientation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::gaction::{FiniteGroup, GSet, GroupError, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("vertex and edge sets are acted on by different groups")]
    GroupMismatch,
    #[error("incidence map has {got} entries, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("incidence maps are not equivariant: {0}")]
    NotEquivariant(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not a forest")]
    NotAForest,
    #[error("edge set is not closed under the action (edge {0} leaves it)")]
    NotActionClosed(usize),
    #[error("component of vertex {0} has no sink")]
    NoSink(usize),
    #[error("cannot slide: τ(e{edge}) = v{tau} but ι(e{along}) = v{iota}")]
    NotAdjacent { edge: usize, along: usize, tau: usize, iota: usize },
    #[error("cannot slide: stabilizer of e{edge} is not contained in that of e{along}")]
    StabilizerNotContained { edge: usize, along: usize },
    #[error("cannot slide: e{edge} and e{along} lie in the same orbit")]
    SameOrbit { edge: usize, along: usize },
    #[error("vertices {0} and {1} lie in different components")]
    Disconnected(usize, usize),
}

/// A finite G-graph. Vertices are `0..V`, edges `0..E`; the two index
/// spaces are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GGraph {
    vertices: GSet,
    edges: GSet,
    iota: Vec<usize>,
    tau: Vec<usize>,
}

/// Result of [`GGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub equivariant: bool,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub components: usize,
    /// Number of independent undirected cycles, `|E| − |V| + components`.
    pub cycle_rank: usize,
    pub is_forest: bool,
    pub is_tree: bool,
}

/// A set of edges to reverse; must be closed under the action.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Orientation {
    pub flip: BTreeSet<usize>,
}

/// One step of a path: traverse `edge` forwards (`e^{+1}`, from ι to τ) or
/// backwards (`e^{-1}`), arriving at `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: usize,
    pub forward: bool,
    pub to: usize,
}

/// A path `v₀, e₁^{ε₁}, v₁, …, e_d^{ε_d}, v_d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { start: v, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> usize {
        self.steps.last().map_or(self.start, |s| s.to)
    }

    pub fn vertices(&self) -> Vec<usize> {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.to)).collect()
    }

    pub fn edges(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.edge).collect()
    }

    pub fn reversed(&self) -> Path {
        let verts = self.vertices();
        let steps = self
            .steps
            .iter()
            .enumerate()
            .rev()
            .map(|(i, s)| Step { edge: s.edge, forward: !s.forward, to: verts[i] })
            .collect();
        Path { start: self.end(), steps }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.start)?;
        for s in &self.steps {
            write!(f, ", e{}^{}, v{}", s.edge, if s.forward { "+1" } else { "-1" }, s.to)?;
        }
        Ok(())
    }
}

/// Output of [`GGraph::compress`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compression {
    /// The retraction `φ`: old vertex ↦ old index of the sink of its component.
    pub sink_of: Vec<usize>,
    /// New vertex index ↦ old vertex index (the sinks, increasing).
    pub vertex_origin: Vec<usize>,
    /// New edge index ↦ old edge index (the kept edges, increasing).
    pub edge_origin: Vec<usize>,
}

impl Compression {
    /// `φ` as a map into the new vertex indices.
    pub fn phi(&self) -> Vec<usize> {
        let new: BTreeMap<usize, usize> = self.vertex_origin.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        self.sink_of.iter().map(|s| new[s]).collect()
    }
}

/// Output of [`GGraph::subdivide`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    /// Old indices of the subdivided edges (the orbit of `f`), increasing.
    pub subdivided: Vec<usize>,
    /// Per subdivided edge: the new midpoint vertex.
    pub midpoints: Vec<usize>,
    /// Per subdivided edge: the new first half `f₁`. The second half `f₂`
    /// keeps the old edge index.
    pub first_halves: Vec<usize>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    /// Returns false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.0[hi] = lo;
        true
    }
}

impl GGraph {
    pub fn new(vertices: GSet, edges: GSet, iota: Vec<usize>, tau: Vec<usize>) -> Result<Self, GraphError> {
        if vertices.group() != edges.group() {
            return Err(GraphError::GroupMismatch);
        }
        for map in [&iota, &tau] {
            if map.len() != edges.size() {
                return Err(GraphError::LengthMismatch { got: map.len(), expected: edges.size() });
            }
            if let Some(&v) = map.iter().find(|&&v| v >= vertices.size()) {
                return Err(GraphError::VertexOutOfRange(v));
            }
        }
        let g = GGraph { vertices, edges, iota, tau };
        if let Some(msg) = g.equivariance_failure() {
            return Err(GraphError::NotEquivariant(msg));
        }
        Ok(g)
    }

    /// A graph with the trivial group acting.
    pub fn plain(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let group = FiniteGroup::trivial();
        let iota = edges.iter().map(|e| e.0).collect();
        let tau = edges.iter().map(|e| e.1).collect();
        Self::new(
            GSet::trivial_action(&group, vertex_count),
            GSet::trivial_action(&group, edges.len()),
            iota,
            tau,
        )
    }

    fn equivariance_failure(&self) -> Option<String> {
        for g in self.group().elements() {
            for e in 0..self.edge_count() {
                let ge = self.edges.act(g, e);
                if self.iota[ge] != self.vertices.act(g, self.iota[e]) {
                    return Some(format!("ι(g·e{e}) ≠ g·ι(e{e}) for g = {g}"));
                }
                if self.tau[ge] != self.vertices.act(g, self.tau[e]) {
                    return Some(format!("τ(g·e{e}) ≠ g·τ(e{e}) for g = {g}"));
                }
            }
        }
        None
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.vertices.group()
    }

    pub fn vertices(&self) -> &GSet {
        &self.vertices
    }

    pub fn edges(&self) -> &GSet {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.size()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.size()
    }

    pub fn iota(&self, e: usize) -> usize {
        self.iota[e]
    }

    pub fn tau(&self, e: usize) -> usize {
        self.tau[e]
    }

    pub fn iota_map(&self) -> &[usize] {
        &self.iota
    }

    pub fn tau_map(&self) -> &[usize] {
        &self.tau
    }

    pub fn vertex_stabilizer(&self, v: usize) -> Subgroup {
        self.vertices.stabilizer(v).expect("vertex in range")
    }

    pub fn edge_stabilizer(&self, e: usize) -> Subgroup {
        self.edges.stabilizer(e).expect("edge in range")
    }

    /// Per vertex, incident `(edge, leaves-along-orientation?, neighbour)`
    /// sorted by neighbour then edge.
    pub fn adjacency(&self) -> Vec<Vec<Step>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in 0..self.edge_count() {
            adj[self.iota[e]].push(Step { edge: e, forward: true, to: self.tau[e] });
            adj[self.tau[e]].push(Step { edge: e, forward: false, to: self.iota[e] });
        }
        for a in &mut adj {
            a.sort_by_key(|s| (s.to, s.edge, !s.forward));
        }
        adj
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.vertex_count();
        let m = self.edge_count();
        let mut dsu = Dsu::new(n);
        let mut cyclic = false;
        for e in 0..m {
            if !dsu.union(self.iota[e], self.tau[e]) {
                cyclic = true;
            }
        }
        let components = (0..n).filter(|&v| dsu.find(v) == v).count();
        let cycle_rank = m + components - n;
        ValidationReport {
            equivariant: self.equivariance_failure().is_none(),
            vertex_count: n,
            edge_count: m,
            components,
            cycle_rank,
            is_forest: !cyclic,
            is_tree: !cyclic && components == 1 && m + 1 == n,
        }
    }

    fn require_tree(&self) -> Result<(), GraphError> {
        if self.validate().is_tree {
            Ok(())
        } else {
            Err(GraphError::NotATree)
        }
    }

    fn check_edge(&self, e: usize) -> Result<(), GraphError> {
        if e < self.edge_count() {
            Ok(())
        } else {
            Err(GraphError::EdgeOutOfRange(e))
        }
    }

    fn check_closed_edges(&self, set: &BTreeSet<usize>) -> Result<(), GraphError> {
        if let Some(&e) = set.iter().find(|&&e| e >= self.edge_count()) {
            return Err(GraphError::EdgeOutOfRange(e));
        }
        for &e in set {
            if self.group().elements().any(|g| !set.contains(&self.edges.act(g, e))) {
                return Err(GraphError::NotActionClosed(e));
            }
        }
        Ok(())
    }

    /// Renames vertex `v` to `vertex_perm[v]` and edge `e` to `edge_perm[e]`.
    pub fn relabel(&self, vertex_perm: &[usize], edge_perm: &[usize]) -> Result<GGraph, GraphError> {
        let (n, m) = (self.vertex_count(), self.edge_count());
        for (perm, len) in [(vertex_perm, n), (edge_perm, m)] {
            if perm.len() != len {
                return Err(GraphError::LengthMismatch { got: perm.len(), expected: len });
            }
            let mut seen = vec![false; len];
            for &x in perm {
                if x >= len || std::mem::replace(&mut seen[x], true) {
                    return Err(GraphError::Group(GroupError::BadPermutation { index: 0, size: len }));
                }
            }
        }
        let rename = |set: &GSet, perm: &[usize]| -> Vec<Vec<usize>> {
            self.group()
                .elements()
                .map(|g| {
                    let mut row = vec![0; perm.len()];
                    for p in 0..perm.len() {
                        row[perm[p]] = perm[set.act(g, p)];
                    }
                    row
                })
                .collect()
        };
        let vset = GSet::from_table(self.group(), n, rename(&self.vertices, vertex_perm))?;
        let eset = GSet::from_table(self.group(), m, rename(&self.edges, edge_perm))?;
        let mut iota = vec![0; m];
        let mut tau = vec![0; m];
        for e in 0..m {
            iota[edge_perm[e]] = vertex_perm[self.iota[e]];
            tau[edge_perm[e]] = vertex_perm[self.tau[e]];
        }
        GGraph::new(vset, eset, iota, tau)
    }

    /// Swaps ι and τ on the flip set.
    pub fn reorient(&self, o: &Orientation) -> Result<GGraph, GraphError> {
        self.check_closed_edges(&o.flip)?;
        let mut out = self.clone();
        for &e in &o.flip {
            std::mem::swap(&mut out.iota[e], &mut out.tau[e]);
        }
        Ok(out)
    }

    /// Reverses the whole orbit of `e`.
    pub fn reorient_orbit(&self, e: usize) -> Result<GGraph, GraphError> {
        self.check_edge(e)?;
        let flip = self.edges.orbit(e)?;
        self.reorient(&Orientation { flip })
    }

    /// Compresses each component of `T − E′` to its sink, where `keep` is
    /// the G-set `E′`. The result has the sinks as vertices and `E′` as
    /// edges, with incidence `φ∘ι` and `φ∘τ`.
    pub fn compress(&self, keep: &BTreeSet<usize>) -> Result<(GGraph, Compression), GraphError> {
        self.require_tree()?;
        self.check_closed_edges(keep)?;
        let n = self.vertex_count();
        let mut out_edge: Vec<Option<usize>> = vec![None; n];
        let mut dsu = Dsu::new(n);
        for e in (0..self.edge_count()).filter(|e| !keep.contains(e)) {
            let v = self.iota[e];
            if out_edge[v].is_some() {
                // two collapsed edges leave v: its component has no sink
                return Err(GraphError::NoSink(v));
            }
            out_edge[v] = Some(e);
            dsu.union(v, self.tau[e]);
        }
        let mut sink_count: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..n {
            if out_edge[v].is_none() {
                *sink_count.entry(dsu.find(v)).or_default() += 1;
            }
        }
        for v in 0..n {
            let root = dsu.find(v);
            if sink_count.get(&root).copied() != Some(1) {
                return Err(GraphError::NoSink(root));
            }
        }
        let mut sink_of: Vec<Option<usize>> = vec![None; n];
        for v in 0..n {
            let mut chain = vec![v];
            let mut cur = v;
            while let (None, Some(e)) = (sink_of[cur], out_edge[cur]) {
                cur = self.tau[e];
                chain.push(cur);
            }
            let sink = sink_of[cur].unwrap_or(cur);
            for c in chain {
                sink_of[c] = Some(sink);
            }
        }
        let sink_of: Vec<usize> = sink_of.into_iter().map(Option::unwrap).collect();
        let sinks: BTreeSet<usize> = (0..n).filter(|&v| out_edge[v].is_none()).collect();
        let (vset, vertex_origin) = self.vertices.restrict(&sinks)?;
        let (eset, edge_origin) = self.edges.restrict(keep)?;
        let new_index: BTreeMap<usize, usize> = vertex_origin.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let iota = edge_origin.iter().map(|&e| new_index[&sink_of[self.iota[e]]]).collect();
        let tau = edge_origin.iter().map(|&e| new_index[&sink_of[self.tau[e]]]).collect();
        let tree = GGraph::new(vset, eset, iota, tau)?;
        Ok((tree, Compression { sink_of, vertex_origin, edge_origin }))
    }

    /// Slides `τe` along `f` from `ιf` to `τf`, equivariantly: every `g·e`
    /// gets terminal vertex `τ(g·f)`. Requires `τe = ιf`, `G_e ≤ G_f` and
    /// `Gf ∩ Ge = ∅`.
    pub fn slide(&self, e: usize, f: usize) -> Result<GGraph, GraphError> {
        self.check_edge(e)?;
        self.check_edge(f)?;
        self.require_tree()?;
        if self.edges.orbit(e)?.contains(&f) {
            return Err(GraphError::SameOrbit { edge: e, along: f });
        }
        if self.tau[e] != self.iota[f] {
            return Err(GraphError::NotAdjacent { edge: e, along: f, tau: self.tau[e], iota: self.iota[f] });
        }
        if !self.edge_stabilizer(e).is_subgroup_of(&self.edge_stabilizer(f)) {
            return Err(GraphError::StabilizerNotContained { edge: e, along: f });
        }
        let mut out = self.clone();
        for g in self.group().elements() {
            out.tau[self.edges.act(g, e)] = self.tau[self.edges.act(g, f)];
        }
        Ok(out)
    }

    /// Splits each edge `g·f` into `f₁ = (ι(g·f), v)` and `f₂ = (v, τ(g·f))`
    /// with a new midpoint `v` whose stabilizer is `G_{g·f}`. New vertices and
    /// new `f₁` edges are appended in increasing order of the subdivided edge;
    /// `f₂` reuses the old index.
    pub fn subdivide(&self, f: usize) -> Result<(GGraph, Subdivision), GraphError> {
        self.check_edge(f)?;
        let subdivided: Vec<usize> = self.edges.orbit(f)?.into_iter().collect();
        let pos: BTreeMap<usize, usize> = subdivided.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let (n, m, k) = (self.vertex_count(), self.edge_count(), subdivided.len());
        let group = self.group();
        let vtable: Vec<Vec<usize>> = group
            .elements()
            .map(|g| {
                (0..n + k)
                    .map(|v| if v < n { self.vertices.act(g, v) } else { n + pos[&self.edges.act(g, subdivided[v - n])] })
                    .collect()
            })
            .collect();
        let etable: Vec<Vec<usize>> = group
            .elements()
            .map(|g| {
                (0..m + k)
                    .map(|e| if e < m { self.edges.act(g, e) } else { m + pos[&self.edges.act(g, subdivided[e - m])] })
                    .collect()
            })
            .collect();
        let mut iota = self.iota.clone();
        let mut tau = self.tau.clone();
        for (i, &e) in subdivided.iter().enumerate() {
            iota[e] = n + i;
        }
        for &e in &subdivided {
            iota.push(self.iota[e]);
        }
        for i in 0..k {
            tau.push(n + i);
        }
        let vset = GSet::from_table(group, n + k, vtable)?;
        let eset = GSet::from_table(group, m + k, etable)?;
        let graph = GGraph::new(vset, eset, iota, tau)?;
        Ok((
            graph,
            Subdivision {
                subdivided,
                midpoints: (n..n + k).collect(),
                first_halves: (m..m + k).collect(),
            },
        ))
    }

    /// The unique reduced path from `a` to `b` in a forest, found by BFS
    /// with least-index tie-breaking.
    pub fn geodesic(&self, a: usize, b: usize) -> Result<Path, GraphError> {
        for v in [a, b] {
            if v >= self.vertex_count() {
                return Err(GraphError::VertexOutOfRange(v));
            }
        }
        if !self.validate().is_forest {
            return Err(GraphError::NotAForest);
        }
        let adj = self.adjacency();
        self.geodesic_in(&adj, a, b).ok_or(GraphError::Disconnected(a, b))
    }

    pub(crate) fn geodesic_in(&self, adj: &[Vec<Step>], a: usize, b: usize) -> Option<Path> {
        let mut prev: Vec<Option<(usize, Step)>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                break;
            }
            for s in &adj[v] {
                if !seen[s.to] {
                    seen[s.to] = true;
                    prev[s.to] = Some((v, *s));
                    queue.push_back(s.to);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut steps = Vec::new();
        let mut cur = b;
        while let Some((p, s)) = prev[cur] {
            steps.push(s);
            cur = p;
        }
        steps.reverse();
        Some(Path { start: a, steps })
    }

    /// Geodesics from `a` to every vertex of its component (BFS tree).
    pub(crate) fn geodesics_from(&self, adj: &[Vec<Step>], a: usize) -> Vec<Option<Path>> {
        let n = self.vertex_count();
        let mut paths: Vec<Option<Path>> = vec![None; n];
        paths[a] = Some(Path::trivial(a));
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for s in &adj[v] {
                if paths[s.to].is_none() {
                    let mut p = paths[v].clone().unwrap();
                    p.steps.push(*s);
                    paths[s.to] = Some(p);
                    queue.push_back(s.to);
                }
            }
        }
        paths
    }

    /// Stabilizer of a path: elements fixing each of its vertices and edges.
    pub fn path_stabilizer(&self, p: &Path) -> Subgroup {
        let verts = p.vertices();
        let edges = p.edges();
        let elems = self
            .group()
            .elements()
            .filter(|&g| {
                verts.iter().all(|&v| self.vertices.act(g, v) == v) && edges.iter().all(|&e| self.edges.act(g, e) == e)
            })
            .collect();
        Subgroup::new(self.group(), elems).expect("stabilizer is a subgroup")
    }

    /// `g·p`.
    pub fn translate_path(&self, g: usize, p: &Path) -> Path {
        Path {
            start: self.vertices.act(g, p.start),
            steps: p
                .steps
                .iter()
                .map(|s| Step { edge: self.edges.act(g, s.edge), forward: s.forward, to: self.vertices.act(g, s.to) })
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        const PALETTE: [&str; 8] = ["black", "red", "blue", "darkgreen", "orange", "purple", "brown", "teal"];
        let vorb = orbit_index(&self.vertices);
        let eorb = orbit_index(&self.edges);
        let mut s = String::from("digraph gtree {\n");
        for v in 0..self.vertex_count() {
            let _ = writeln!(s, "  v{v} [label=\"v{v}\", color={}];", PALETTE[vorb[v] % PALETTE.len()]);
        }
        for e in 0..self.edge_count() {
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"e{e}\", color={}];",
                self.iota[e],
                self.tau[e],
                PALETTE[eorb[e] % PALETTE.len()]
            );
        }
        s.push_str("}\n");
        s
    }
}

/// Orbit number of each point, orbits numbered by least element.
pub fn orbit_index(set: &GSet) -> Vec<usize> {
    let mut idx = vec![0; set.size()];
    for (i, orbit) in set.orbits().iter().enumerate() {
        for &p in orbit {
            idx[p] = i;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Path 0 - 1 - 2 with Z/2 swapping the ends; edges 0:(0→1), 1:(2→1).
    fn symmetric_path() -> GGraph {
        let g = FiniteGroup::cyclic(2);
        let v = GSet::from_generator_action(&g, 3, &[vec![2, 1, 0]]).unwrap();
        let e = GSet::from_generator_action(&g, 2, &[vec![1, 0]]).unwrap();
        GGraph::new(v, e, vec![0, 2], vec![1, 1]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let single = GGraph::plain(1, &[]).unwrap().validate();
        assert!(single.is_tree);
        let tri = GGraph::plain(3, &[(0, 1), (1, 2), (2, 0)]).unwrap().validate();
        assert!(!tri.is_tree && !tri.is_forest);
        assert_eq!(tri.cycle_rank, 1);
        let sp = symmetric_path().validate();
        assert!(sp.is_tree && sp.equivariant);
        let forest = GGraph::plain(4, &[(0, 1), (2, 3)]).unwrap().validate();
        assert!(forest.is_forest && !forest.is_tree);
        assert_eq!(forest.components, 2);
    }

    #[test]
    fn non_equivariant_rejected() {
        let g = FiniteGroup::cyclic(2);
        let v = GSet::from_generator_action(&g, 3, &[vec![2, 1, 0]]).unwrap();
        let e = GSet::from_generator_action(&g, 2, &[vec![1, 0]]).unwrap();
        assert!(matches!(GGraph::new(v, e, vec![0, 1], vec![1, 2]), Err(GraphError::NotEquivariant(_))));
    }

    #[test]
    fn compress_examples() {
        let t = symmetric_path();
        let all: BTreeSet<usize> = (0..2).collect();
        let (same, c) = t.compress(&all).unwrap();
        assert_eq!(same, t);
        assert_eq!(c.sink_of, vec![0, 1, 2]);

        // u=0 <-e1- w=1 -e2-> u2=2, E' = {e2}
        let t = GGraph::plain(3, &[(1, 0), (1, 2)]).unwrap();
        let (out, c) = t.compress(&BTreeSet::from([1])).unwrap();
        assert_eq!(c.vertex_origin, vec![0, 2]);
        assert_eq!(c.edge_origin, vec![1]);
        assert_eq!((out.iota(0), out.tau(0)), (0, 1));
        assert!(out.validate().is_tree);

        // whole tree oriented toward 1, E' = ∅
        let t = GGraph::plain(3, &[(0, 1), (2, 1)]).unwrap();
        let (out, c) = t.compress(&BTreeSet::new()).unwrap();
        assert_eq!((out.vertex_count(), out.edge_count()), (1, 0));
        assert_eq!(c.vertex_origin, vec![1]);
    }

    #[test]
    fn compress_errors() {
        let t = GGraph::plain(3, &[(1, 0), (1, 2)]).unwrap();
        assert_eq!(t.compress(&BTreeSet::new()).unwrap_err(), GraphError::NoSink(1));
        let sp = symmetric_path();
        assert_eq!(sp.compress(&BTreeSet::from([0])).unwrap_err(), GraphError::NotActionClosed(0));
    }

    #[test]
    fn slide_examples() {
        // a -e→ b -f→ c
        let t = GGraph::plain(3, &[(0, 1), (1, 2)]).unwrap();
        let s = t.slide(0, 1).unwrap();
        assert_eq!((s.iota(0), s.tau(0)), (0, 2));
        assert_eq!((s.iota(1), s.tau(1)), (1, 2));
        assert!(s.validate().is_tree);
        assert!(matches!(t.slide(1, 0), Err(GraphError::NotAdjacent { .. })));
    }

    #[test]
    fn slide_precondition_gates() {
        // Z/2 fixing a star centre 0 with leaves 1,2 swapped, plus a fixed
        // leaf 3: e0 = (3→0) fixed, f = (0→1), (0→2) swapped.
        let g = FiniteGroup::cyclic(2);
        let v = GSet::from_generator_action(&g, 4, &[vec![0, 2, 1, 3]]).unwrap();
        let e = GSet::from_generator_action(&g, 3, &[vec![0, 2, 1]]).unwrap();
        let t = GGraph::new(v, e, vec![3, 0, 0], vec![0, 1, 2]).unwrap();
        assert_eq!(t.slide(0, 1).unwrap_err(), GraphError::StabilizerNotContained { edge: 0, along: 1 });
        let sp = symmetric_path();
        assert_eq!(sp.slide(0, 1).unwrap_err(), GraphError::SameOrbit { edge: 0, along: 1 });
    }

    #[test]
    fn subdivide_examples() {
        let t = GGraph::plain(2, &[(0, 1)]).unwrap();
        let (s, sub) = t.subdivide(0).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (3, 2));
        assert_eq!((s.iota(1), s.tau(1)), (0, 2));
        assert_eq!((s.iota(0), s.tau(0)), (2, 1));
        assert_eq!(sub.midpoints, vec![2]);

        let sp = symmetric_path();
        let (s, sub) = sp.subdivide(0).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (5, 4));
        assert_eq!(sub.subdivided, vec![0, 1]);
        assert!(s.validate().is_tree && s.validate().equivariant);
        for (&old, &mid) in sub.subdivided.iter().zip(&sub.midpoints) {
            assert_eq!(s.vertex_stabilizer(mid), sp.edge_stabilizer(old));
        }
    }

    #[test]
    fn subdivide_then_compress_recovers() {
        let sp = symmetric_path();
        let (s, sub) = sp.subdivide(0).unwrap();
        let first: BTreeSet<usize> = sub.first_halves.iter().copied().collect();
        let flipped = s.reorient(&Orientation { flip: first.clone() }).unwrap();
        let keep: BTreeSet<usize> = (0..s.edge_count()).filter(|e| !first.contains(e)).collect();
        let (back, _) = flipped.compress(&keep).unwrap();
        assert_eq!(back, sp);
    }

    #[test]
    fn reorient_examples() {
        let sp = symmetric_path();
        assert_eq!(sp.reorient(&Orientation::default()).unwrap(), sp);
        let all = Orientation { flip: BTreeSet::from([0, 1]) };
        assert_eq!(sp.reorient(&all).unwrap().reorient(&all).unwrap(), sp);
        let half = Orientation { flip: BTreeSet::from([0]) };
        assert_eq!(sp.reorient(&half).unwrap_err(), GraphError::NotActionClosed(0));

        let p = GGraph::plain(3, &[(0, 1), (1, 2)]).unwrap();
        let r = p.reorient(&Orientation { flip: BTreeSet::from([0, 1]) }).unwrap();
        let before = p.geodesic(0, 2).unwrap();
        let after = r.geodesic(0, 2).unwrap();
        assert_eq!(before.edges(), after.edges());
        assert!(before.steps.iter().zip(&after.steps).all(|(a, b)| a.forward != b.forward));
    }

    #[test]
    fn geodesic_examples() {
        let p = GGraph::plain(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.geodesic(1, 1).unwrap().len(), 0);
        let whole = p.geodesic(0, 2).unwrap();
        assert_eq!(whole.vertices(), vec![0, 1, 2]);
        assert_eq!(whole.to_string(), "v0, e0^+1, v1, e1^+1, v2");
        assert_eq!(whole.reversed().to_string(), "v2, e1^-1, v1, e0^-1, v0");
        let star = GGraph::plain(4, &[(0, 1), (0, 2), (3, 0)]).unwrap();
        assert_eq!(star.geodesic(1, 3).unwrap().vertices(), vec![1, 0, 3]);
        let forest = GGraph::plain(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(forest.geodesic(0, 3).unwrap_err(), GraphError::Disconnected(0, 3));
        let tri = GGraph::plain(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(tri.geodesic(0, 1).unwrap_err(), GraphError::NotAForest);
    }

    #[test]
    fn relabel_round_trip() {
        let sp = symmetric_path();
        let r = sp.relabel(&[2, 0, 1], &[1, 0]).unwrap();
        assert!(r.validate().is_tree && r.validate().equivariant);
        assert_eq!((r.iota(1), r.tau(1)), (2, 0));
        assert_eq!(r.relabel(&[1, 2, 0], &[1, 0]).unwrap(), sp);
        assert!(sp.relabel(&[0, 0, 1], &[0, 1]).is_err());
    }
}
