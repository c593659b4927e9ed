//! Retracting a finite G-tree onto a G-retract `U` of its vertex set:
//! U-filtrations, elimination of problematic vertices by sliding, and the
//! final compression onto `U`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gaction::GroupError;
use crate::ggraph::{Compression, GGraph, GraphError, Orientation, Path};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RetractError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("input graph is not a tree")]
    NotATree,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("U is not closed under the action (vertex {0})")]
    NotActionClosed(usize),
    #[error("U is not a G-retract: no u in U with G_w ≤ G_u for w = {0}")]
    NotARetract(usize),
    #[error("stabilizer of vertex {0} is not conjugate-incomparable")]
    NotConjugateIncomparable(usize),
    #[error("vertex {0} lies in U")]
    InU(usize),
    #[error("filtration condition ({condition}) fails: {detail}")]
    Filtration { condition: u8, detail: String },
    #[error("tree still has problematic vertices (e.g. {0})")]
    Problematic(usize),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

/// A degree map `V ∪ E → [0, kappa)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtration {
    pub vertex_deg: Vec<usize>,
    pub edge_deg: Vec<usize>,
    pub kappa: usize,
}

/// One logged move. Hashes identify the incidence maps before and after.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// Equivariantly slide the endpoint of `edge` lying on `along` across it.
    Slide { edge: usize, along: usize, forward: bool, pre: String, post: String },
    Reorient { flipped: Vec<usize>, pre: String, post: String },
    Compress { collapsed: Vec<usize>, pre: String, post: String },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Slide { edge, along, forward, pre, post } => {
                let sign = if *forward { "+1" } else { "-1" };
                write!(f, "slide e{edge} along e{along}^{sign} {pre} -> {post}")
            }
            Move::Reorient { flipped, pre, post } => write!(f, "reorient {flipped:?} {pre} -> {post}"),
            Move::Compress { collapsed, pre, post } => write!(f, "compress {collapsed:?} {pre} -> {post}"),
        }
    }
}

/// Short digest of the graph's incidence data.
pub fn tree_hash(t: &GGraph) -> String {
    let mut h = Sha256::new();
    h.update((t.vertex_count() as u64).to_le_bytes());
    for map in [t.iota_map(), t.tau_map()] {
        h.update((map.len() as u64).to_le_bytes());
        for &v in map {
            h.update((v as u64).to_le_bytes());
        }
    }
    hex::encode(&h.finalize()[..8])
}

/// Checks that `u` is a G-retract of the vertex set of the G-tree `t` and
/// that `V − U` has conjugate-incomparable stabilizers.
pub fn check_instance(t: &GGraph, u: &BTreeSet<usize>) -> Result<(), RetractError> {
    if !t.validate().is_tree {
        return Err(RetractError::NotATree);
    }
    if let Some(&v) = u.iter().find(|&&v| v >= t.vertex_count()) {
        return Err(RetractError::VertexOutOfRange(v));
    }
    let vs = t.vertices();
    if let Some(&v) = u.iter().find(|&&v| t.group().elements().any(|g| !u.contains(&vs.act(g, v)))) {
        return Err(RetractError::NotActionClosed(v));
    }
    if vs.is_retract(u)?.is_none() {
        let w = (0..t.vertex_count())
            .find(|w| !u.contains(w) && !u.iter().any(|&x| t.vertex_stabilizer(*w).is_subgroup_of(&t.vertex_stabilizer(x))))
            .unwrap_or(0);
        return Err(RetractError::NotARetract(w));
    }
    for w in (0..t.vertex_count()).filter(|w| !u.contains(w)) {
        if !t.vertex_stabilizer(w).is_conjugate_incomparable(t.group()) {
            return Err(RetractError::NotConjugateIncomparable(w));
        }
    }
    Ok(())
}

/// Builds a U-filtration following the existence proof: `E[0] = ∅`, a
/// single lowest orbit at step 1, and afterwards the edges of equivariantly
/// chosen geodesics from `V[α]` down into `V[0, α)`, falling back to a fresh
/// lowest orbit when those add nothing new.
pub fn build_filtration(t: &GGraph, u: &BTreeSet<usize>) -> Result<Filtration, RetractError> {
    check_instance(t, u)?;
    let n = t.vertex_count();
    let m = t.edge_count();
    let es = t.edges();
    let vs = t.vertices();
    let adj = t.adjacency();
    let mut edge_deg: Vec<Option<usize>> = vec![None; m];
    let mut vertex_deg: Vec<Option<usize>> = (0..n).map(|v| u.contains(&v).then_some(0)).collect();
    let mut assigned = 0;
    let mut gamma = 1;

    let assign = |edges: &BTreeSet<usize>, level: usize, edge_deg: &mut Vec<Option<usize>>, vertex_deg: &mut Vec<Option<usize>>| {
        for &e in edges {
            edge_deg[e] = Some(level);
            for v in [t.iota(e), t.tau(e)] {
                vertex_deg[v].get_or_insert(level);
            }
        }
    };
    let fresh_orbit = |edge_deg: &Vec<Option<usize>>| -> BTreeSet<usize> {
        let e = (0..m).find(|&e| edge_deg[e].is_none()).expect("unassigned edge");
        es.orbit(e).expect("edge in range")
    };

    while assigned < m {
        let next = if gamma == 1 {
            fresh_orbit(&edge_deg)
        } else {
            let alpha = gamma - 1;
            let mut p_edges = BTreeSet::new();
            let level: Vec<usize> = (0..n).filter(|&v| vertex_deg[v] == Some(alpha)).collect();
            let mut done = BTreeSet::new();
            for &w in &level {
                if done.contains(&w) {
                    continue;
                }
                let stab = t.vertex_stabilizer(w);
                let paths = t.geodesics_from(&adj, w);
                let target = (0..n)
                    .filter(|&v| vertex_deg[v].is_some_and(|d| d < alpha))
                    .filter(|&v| stab.is_subgroup_of(&t.vertex_stabilizer(v)))
                    .min_by_key(|&v| (paths[v].as_ref().map_or(usize::MAX, Path::len), v))
                    .ok_or_else(|| RetractError::Internal(format!("no fixed lower vertex for v{w}")))?;
                let p = paths[target].clone().expect("tree is connected");
                for g in t.group().elements() {
                    done.insert(vs.act(g, w));
                    p_edges.extend(p.edges().into_iter().map(|e| es.act(g, e)));
                }
            }
            if p_edges.iter().all(|&e| edge_deg[e] == Some(alpha)) {
                fresh_orbit(&edge_deg)
            } else {
                let rest: BTreeSet<usize> = p_edges.into_iter().filter(|&e| edge_deg[e] != Some(alpha)).collect();
                if let Some(&e) = rest.iter().find(|&&e| edge_deg[e].is_some()) {
                    return Err(RetractError::Internal(format!("geodesic edge e{e} already has lower degree")));
                }
                rest
            }
        };
        assigned += next.len();
        assign(&next, gamma, &mut edge_deg, &mut vertex_deg);
        gamma += 1;
    }
    let vertex_deg = vertex_deg
        .into_iter()
        .enumerate()
        .map(|(v, d)| d.ok_or_else(|| RetractError::Internal(format!("vertex v{v} received no degree"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Filtration { vertex_deg, edge_deg: edge_deg.into_iter().map(Option::unwrap).collect(), kappa: gamma })
}

/// `P_T(w)`: the reduced paths `p` from `w` with `G_p = G_w`,
/// `deg(τp) < deg(w)` and edge degrees in `{deg(w), deg(w) + 1}`.
pub fn paths_p(t: &GGraph, f: &Filtration, u: &BTreeSet<usize>, w: usize) -> Result<Vec<Path>, RetractError> {
    if w >= t.vertex_count() {
        return Err(RetractError::VertexOutOfRange(w));
    }
    if u.contains(&w) {
        return Err(RetractError::InU(w));
    }
    let dw = f.vertex_deg[w];
    let stab = t.vertex_stabilizer(w);
    let adj = t.adjacency();
    Ok(t.geodesics_from(&adj, w)
        .into_iter()
        .flatten()
        .filter(|p| f.vertex_deg[p.end()] < dw)
        .filter(|p| p.steps.iter().all(|s| f.edge_deg[s.edge] == dw || f.edge_deg[s.edge] == dw + 1))
        .filter(|p| t.path_stabilizer(p) == stab)
        .collect())
}

/// Checks conditions (1)–(4) of a U-filtration.
pub fn check_filtration(t: &GGraph, u: &BTreeSet<usize>, f: &Filtration) -> Result<(), RetractError> {
    let fail = |condition: u8, detail: String| Err(RetractError::Filtration { condition, detail });
    if f.vertex_deg.len() != t.vertex_count() || f.edge_deg.len() != t.edge_count() {
        return fail(1, "degree map has the wrong size".into());
    }
    if let Some(x) = f.vertex_deg.iter().chain(&f.edge_deg).find(|&&d| d >= f.kappa) {
        return fail(1, format!("degree {x} ≥ kappa = {}", f.kappa));
    }
    // (1) each T[0,β) is a G-subforest
    let (vs, es) = (t.vertices(), t.edges());
    for g in t.group().elements() {
        if let Some(v) = (0..t.vertex_count()).find(|&v| f.vertex_deg[vs.act(g, v)] != f.vertex_deg[v]) {
            return fail(1, format!("deg not invariant at v{v}"));
        }
        if let Some(e) = (0..t.edge_count()).find(|&e| f.edge_deg[es.act(g, e)] != f.edge_deg[e]) {
            return fail(1, format!("deg not invariant at e{e}"));
        }
    }
    for beta in 0..=f.kappa {
        for e in (0..t.edge_count()).filter(|&e| f.edge_deg[e] < beta) {
            if f.vertex_deg[t.iota(e)] >= beta || f.vertex_deg[t.tau(e)] >= beta {
                return fail(1, format!("T[0,{beta}) contains e{e} but not both its endpoints"));
            }
        }
    }
    // (2) T[0] = U
    for v in 0..t.vertex_count() {
        if (f.vertex_deg[v] == 0) != u.contains(&v) {
            return fail(2, format!("v{v} has degree {} but membership in U is {}", f.vertex_deg[v], u.contains(&v)));
        }
    }
    if let Some(e) = (0..t.edge_count()).find(|&e| f.edge_deg[e] == 0) {
        return fail(2, format!("edge e{e} has degree 0"));
    }
    // (3) each T[α] is a finite union of orbits: invariance above, finiteness automatic
    // (4) P_T(w) nonempty
    for w in (0..t.vertex_count()).filter(|w| !u.contains(w)) {
        if paths_p(t, f, u, w)?.is_empty() {
            return fail(4, format!("P_T(v{w}) is empty"));
        }
    }
    Ok(())
}

/// A tree together with a U-filtration, and the moves applied so far.
#[derive(Clone, Debug)]
pub struct RetractState {
    pub tree: GGraph,
    pub u: BTreeSet<usize>,
    pub filtration: Filtration,
    pub moves: Vec<Move>,
}

/// Orbit-level problem data: problematic edges and vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problems {
    pub edges: BTreeSet<usize>,
    pub vertices: BTreeSet<usize>,
}

impl Problems {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.vertices.is_empty()
    }
}

impl RetractState {
    pub fn new(tree: GGraph, u: BTreeSet<usize>) -> Result<Self, RetractError> {
        let filtration = build_filtration(&tree, &u)?;
        Ok(RetractState { tree, u, filtration, moves: Vec::new() })
    }

    fn deg(&self, v: usize) -> usize {
        self.filtration.vertex_deg[v]
    }

    pub fn paths_p(&self, w: usize) -> Result<Vec<Path>, RetractError> {
        paths_p(&self.tree, &self.filtration, &self.u, w)
    }

    /// The minimal-length paths of `P_T(w)`, ordered by terminal vertex.
    pub fn minimal_paths(&self, w: usize) -> Result<Vec<Path>, RetractError> {
        let mut paths = self.paths_p(w)?;
        let d = paths
            .iter()
            .map(Path::len)
            .min()
            .ok_or_else(|| RetractError::Filtration { condition: 4, detail: format!("P_T(v{w}) is empty") })?;
        paths.retain(|p| p.len() == d);
        paths.sort_by_key(Path::end);
        Ok(paths)
    }

    pub fn d_t(&self, w: usize) -> Result<usize, RetractError> {
        Ok(self.minimal_paths(w)?[0].len())
    }

    /// Whether `v1` is lower than `v0`.
    pub fn is_lower(&self, v1: usize, v0: usize) -> Result<bool, RetractError> {
        let (d0, d1) = (self.deg(v0), self.deg(v1));
        if d0 > d1 {
            return Ok(true);
        }
        if d0 != d1 || d0 == 0 {
            return Ok(false);
        }
        let (s0, s1) = (self.tree.vertex_stabilizer(v0), self.tree.vertex_stabilizer(v1));
        if s0 != s1 {
            return Ok(s0.is_subgroup_of(&s1));
        }
        Ok(self.d_t(v0)? > self.d_t(v1)?)
    }

    pub fn problematic(&self) -> Result<Problems, RetractError> {
        let t = &self.tree;
        let edges = (0..t.edge_count())
            .filter(|&e| {
                let (a, b) = (self.deg(t.iota(e)), self.deg(t.tau(e)));
                let de = self.filtration.edge_deg[e];
                (de == a && a == b + 1) || (de == b && b == a + 1)
            })
            .collect();
        let mut vertices = BTreeSet::new();
        for w in (0..t.vertex_count()).filter(|w| !self.u.contains(w)) {
            if self.problematic_path(w)?.is_some() {
                vertices.insert(w);
            }
        }
        Ok(Problems { edges, vertices })
    }

    /// A minimal path in `P_T(w)` whose first step climbs one level.
    fn problematic_path(&self, w: usize) -> Result<Option<Path>, RetractError> {
        let dw = self.deg(w);
        Ok(self.minimal_paths(w)?.into_iter().find(|p| self.deg(p.steps[0].to) == dw + 1))
    }

    fn problematic_edge_orbits(&self, edges: &BTreeSet<usize>) -> usize {
        edges.iter().filter(|&&e| self.tree.edges().orbit_rep(e) == e).count()
    }

    /// Flips every edge orbit in `orbits`, returning the new tree.
    fn flip(t: &GGraph, orbits: &[usize]) -> Result<GGraph, RetractError> {
        let mut flip = BTreeSet::new();
        for &e in orbits {
            flip.extend(t.edges().orbit(e)?);
        }
        Ok(t.reorient(&Orientation { flip })?)
    }

    /// One problem-reducing procedure at the problematic vertex `v0`.
    fn reduce_once(&mut self, v0: usize) -> Result<(), RetractError> {
        let p = self
            .problematic_path(v0)?
            .ok_or_else(|| RetractError::Internal(format!("v{v0} is not problematic")))?;
        let alpha = self.deg(v0);
        let verts = p.vertices();
        let i = (2..=p.len())
            .find(|&i| self.deg(verts[i]) < alpha + 1)
            .ok_or_else(|| RetractError::Internal(format!("path from v{v0} never returns below level {}", alpha + 1)))?;
        let e1 = p.steps[0].edge;
        let es = self.tree.edges();
        if let Some(step) = p.steps[1..i].iter().find(|s| es.orbit_rep(s.edge) == es.orbit_rep(e1)) {
            return Err(RetractError::Internal(format!(
                "orbit of e{e1} meets orbit of e{} on the path from v{v0}",
                step.edge
            )));
        }
        // Orient e1 so that its endpoint at v1 is the terminal one.
        let e1_flipped = !p.steps[0].forward;
        let mut t = if e1_flipped { Self::flip(&self.tree, &[e1])? } else { self.tree.clone() };
        for j in 2..=i {
            let step = p.steps[j - 1];
            let pre = tree_hash(&self.tree);
            let oriented = if step.forward { t } else { Self::flip(&t, &[step.edge])? };
            let slid = oriented.slide(e1, step.edge)?;
            t = if step.forward { slid } else { Self::flip(&slid, &[step.edge])? };
            let restored = if e1_flipped { Self::flip(&t, &[e1])? } else { t.clone() };
            self.moves.push(Move::Slide {
                edge: e1,
                along: step.edge,
                forward: step.forward,
                pre,
                post: tree_hash(&restored),
            });
            self.tree = restored;
        }
        Ok(())
    }

    /// Repeats the problem-reducing procedure until no problematic vertex
    /// remains, always treating the lowest-degree, lowest-index one first.
    pub fn eliminate_problematic(&mut self) -> Result<(), RetractError> {
        loop {
            let problems = self.problematic()?;
            let Some(&v0) = problems.vertices.iter().min_by_key(|&&v| (self.deg(v), v)) else {
                return Ok(());
            };
            let before = self.problematic_edge_orbits(&problems.edges);
            self.reduce_once(v0)?;
            if !self.tree.validate().is_tree {
                return Err(RetractError::Internal("sliding broke treeness".into()));
            }
            let after = self.problematic_edge_orbits(&self.problematic()?.edges);
            if after >= before {
                return Err(RetractError::Internal(format!(
                    "problematic edge orbits did not decrease ({before} -> {after})"
                )));
            }
        }
    }

    /// Reorients so that no edge points from a lower to a higher vertex,
    /// then compresses the distinguished edges.
    pub fn compress_to_u(&mut self) -> Result<RetractOutput, RetractError> {
        if let Some(&v) = self.problematic()?.vertices.iter().next() {
            return Err(RetractError::Problematic(v));
        }
        let t = &self.tree;
        let mut flip = BTreeSet::new();
        for e in (0..t.edge_count()).filter(|&e| t.edges().orbit_rep(e) == e) {
            if self.is_lower(t.tau(e), t.iota(e))? {
                continue;
            }
            if self.is_lower(t.iota(e), t.tau(e))? {
                flip.extend(t.edges().orbit(e)?);
            }
        }
        if !flip.is_empty() {
            let pre = tree_hash(&self.tree);
            self.tree = self.tree.reorient(&Orientation { flip: flip.clone() })?;
            self.moves.push(Move::Reorient { flipped: flip.into_iter().collect(), pre, post: tree_hash(&self.tree) });
        }

        let t = &self.tree;
        let (vs, es) = (t.vertices(), t.edges());
        let mut distinguished: BTreeMap<usize, usize> = BTreeMap::new();
        for w in (0..t.vertex_count()).filter(|w| !self.u.contains(w)) {
            if distinguished.contains_key(&w) {
                continue;
            }
            let p = self.minimal_paths(w)?.remove(0);
            let first = p.steps[0];
            if !first.forward {
                return Err(RetractError::Internal(format!("distinguished edge e{} of v{w} points inward", first.edge)));
            }
            for g in t.group().elements() {
                let gw = vs.act(g, w);
                let ge = es.act(g, first.edge);
                if let Some(&old) = distinguished.get(&gw) {
                    if old != ge {
                        return Err(RetractError::Internal(format!("distinguished edge of v{gw} not well defined")));
                    }
                }
                distinguished.insert(gw, ge);
            }
        }
        let removed: BTreeMap<usize, usize> = distinguished.iter().map(|(&w, &e)| (e, w)).collect();
        if removed.len() != distinguished.len() {
            return Err(RetractError::Internal("ι is not injective on distinguished edges".into()));
        }
        let keep: BTreeSet<usize> = (0..t.edge_count()).filter(|e| !removed.contains_key(e)).collect();
        let (tree, compression) = t.compress(&keep)?;
        if compression.vertex_origin.iter().copied().collect::<BTreeSet<_>>() != self.u {
            return Err(RetractError::Internal("sinks differ from U".into()));
        }
        if !removed.is_empty() {
            self.moves.push(Move::Compress {
                collapsed: removed.keys().copied().collect(),
                pre: tree_hash(&self.tree),
                post: tree_hash(&tree),
            });
        }
        Ok(RetractOutput { tree, compression, removed, moves: self.moves.clone(), filtration: self.filtration.clone() })
    }
}

/// Result of [`retract_tree`].
#[derive(Clone, Debug)]
pub struct RetractOutput {
    /// The G-tree on `U`; vertex `i` is old vertex `compression.vertex_origin[i]`.
    pub tree: GGraph,
    pub compression: Compression,
    /// Removed edge ↦ the vertex of `V − U` it corresponds to.
    pub removed: BTreeMap<usize, usize>,
    pub moves: Vec<Move>,
    pub filtration: Filtration,
}

/// Slides and then compresses `t` to a G-tree with vertex set `u`.
pub fn retract_tree(t: &GGraph, u: &BTreeSet<usize>) -> Result<RetractOutput, RetractError> {
    let mut state = RetractState::new(t.clone(), u.clone())?;
    state.eliminate_problematic()?;
    state.compress_to_u()
}

/// Checks the output contract of [`retract_tree`] against the input.
pub fn check_output(t: &GGraph, u: &BTreeSet<usize>, out: &RetractOutput) -> Result<(), String> {
    let r = &out.tree;
    if !r.validate().is_tree {
        return Err("output is not a tree".into());
    }
    let origin = &out.compression.vertex_origin;
    if origin.iter().copied().collect::<BTreeSet<_>>() != *u || origin.len() != u.len() {
        return Err("output vertex set differs from U".into());
    }
    for (new, &old) in origin.iter().enumerate() {
        if r.vertex_stabilizer(new) != t.vertex_stabilizer(old) {
            return Err(format!("vertex v{old} changed stabilizer"));
        }
    }
    for (new, &old) in out.compression.edge_origin.iter().enumerate() {
        if r.edge_stabilizer(new) != t.edge_stabilizer(old) {
            return Err(format!("edge e{old} changed stabilizer"));
        }
    }
    for g in t.group().elements() {
        for (new, &old) in origin.iter().enumerate() {
            if origin[r.vertices().act(g, new)] != t.vertices().act(g, old) {
                return Err("vertex action not inherited".into());
            }
        }
        for (new, &old) in out.compression.edge_origin.iter().enumerate() {
            if out.compression.edge_origin[r.edges().act(g, new)] != t.edges().act(g, old) {
                return Err("edge action not inherited".into());
            }
        }
    }
    let w: BTreeSet<usize> = (0..t.vertex_count()).filter(|v| !u.contains(v)).collect();
    if out.removed.len() != w.len() || out.removed.values().copied().collect::<BTreeSet<_>>() != w {
        return Err("removed edges are not in bijection with V − U".into());
    }
    if out.removed.len() + r.edge_count() != t.edge_count() {
        return Err("edge count mismatch".into());
    }
    for (&e, &v) in &out.removed {
        for g in t.group().elements() {
            if out.removed.get(&t.edges().act(g, e)) != Some(&t.vertices().act(g, v)) {
                return Err("bijection is not equivariant".into());
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaction::{FiniteGroup, GSet};

    #[test]
    fn single_edge() {
        let t = GGraph::plain(2, &[(0, 1)]).unwrap();
        let u = BTreeSet::from([0]);
        let f = build_filtration(&t, &u).unwrap();
        assert_eq!(f, Filtration { vertex_deg: vec![0, 1], edge_deg: vec![1], kappa: 2 });
        let paths = paths_p(&t, &f, &u, 1).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].vertices(), vec![1, 0]);
        assert_eq!(paths_p(&t, &f, &u, 0).unwrap_err(), RetractError::InU(0));
        let out = retract_tree(&t, &u).unwrap();
        assert_eq!((out.tree.vertex_count(), out.tree.edge_count()), (1, 0));
        assert_eq!(out.removed, BTreeMap::from([(0, 1)]));
        check_output(&t, &u, &out).unwrap();
    }

    #[test]
    fn u_equals_v() {
        let t = GGraph::plain(4, &[(0, 1), (1, 2), (3, 1)]).unwrap();
        let u: BTreeSet<usize> = (0..4).collect();
        let f = build_filtration(&t, &u).unwrap();
        assert_eq!(f.vertex_deg, vec![0; 4]);
        assert_eq!(f.edge_deg, vec![1, 2, 3]);
        assert_eq!(f.kappa, 4);
        let out = retract_tree(&t, &u).unwrap();
        assert_eq!(out.tree, t);
        assert!(out.moves.is_empty());
        let single = GGraph::plain(1, &[]).unwrap();
        assert_eq!(build_filtration(&single, &BTreeSet::from([0])).unwrap().kappa, 1);
    }

    #[test]
    fn star_with_leaves() {
        let t = GGraph::plain(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let u = BTreeSet::from([1, 2, 3]);
        let f = build_filtration(&t, &u).unwrap();
        assert_eq!(f.vertex_deg, vec![1, 0, 0, 0]);
        assert_eq!(f.edge_deg[0], 1);
        check_filtration(&t, &u, &f).unwrap();
        let out = retract_tree(&t, &u).unwrap();
        check_output(&t, &u, &out).unwrap();
        assert_eq!(out.tree.edge_count(), 2);
    }

    /// u=0, w=1, x=2, y=3; edges x→u, w→x (level 2) and w→y (level 1).
    /// The only escape from w climbs to x first.
    fn climbing_instance() -> (GGraph, BTreeSet<usize>, Filtration) {
        let t = GGraph::plain(4, &[(2, 0), (1, 2), (1, 3)]).unwrap();
        let f = Filtration { vertex_deg: vec![0, 1, 2, 1], edge_deg: vec![2, 2, 1], kappa: 3 };
        (t, BTreeSet::from([0]), f)
    }

    #[test]
    fn problematic_detected_and_eliminated() {
        let (t, u, f) = climbing_instance();
        check_filtration(&t, &u, &f).unwrap();
        let mut state = RetractState { tree: t.clone(), u: u.clone(), filtration: f.clone(), moves: vec![] };
        assert_eq!(state.d_t(1).unwrap(), 2);
        let problems = state.problematic().unwrap();
        assert_eq!(problems.vertices, BTreeSet::from([1]));
        assert_eq!(problems.edges, BTreeSet::from([1]));
        assert!(matches!(state.clone().compress_to_u(), Err(RetractError::Problematic(1))));
        state.eliminate_problematic().unwrap();
        assert!(state.problematic().unwrap().is_empty());
        assert_eq!((state.tree.iota(1), state.tree.tau(1)), (1, 0));
        assert_eq!(state.filtration, f);
        check_filtration(&state.tree, &u, &state.filtration).unwrap();
        assert_eq!(state.moves.len(), 1);
        assert!(matches!(state.moves[0], Move::Slide { edge: 1, along: 0, forward: true, .. }));
        let out = state.compress_to_u().unwrap();
        check_output(&t, &u, &out).unwrap();
    }

    #[test]
    fn filtration_violations_named() {
        let (t, u, f) = climbing_instance();
        let mut bad = f.clone();
        bad.edge_deg[0] = 1;
        assert!(matches!(check_filtration(&t, &u, &bad), Err(RetractError::Filtration { condition: 1, .. })));
        let mut bad = f.clone();
        bad.vertex_deg[3] = 0;
        assert!(matches!(check_filtration(&t, &u, &bad), Err(RetractError::Filtration { condition: 2, .. })));
        let bad = Filtration { vertex_deg: vec![0, 2, 1, 2], edge_deg: vec![1, 4, 2], kappa: 5 };
        assert!(matches!(check_filtration(&t, &u, &bad), Err(RetractError::Filtration { condition: 4, .. })));
        let flat = Filtration { vertex_deg: vec![0, 1, 1, 1], edge_deg: vec![1, 1, 1], kappa: 2 };
        check_filtration(&t, &u, &flat).unwrap();
    }

    #[test]
    fn lower_than_basics() {
        let t = GGraph::plain(3, &[(0, 1), (1, 2)]).unwrap();
        let u = BTreeSet::from([0]);
        let state = RetractState::new(t, u).unwrap();
        assert!(state.is_lower(0, 1).unwrap());
        assert!(!state.is_lower(1, 1).unwrap());
        assert!(!state.is_lower(1, 0).unwrap());
    }

    #[test]
    fn symmetric_instance() {
        // Z/2 swapping the two ends of a path of length 4 with fixed centre.
        let g = FiniteGroup::cyclic(2);
        let v = GSet::from_generator_action(&g, 5, &[vec![4, 3, 2, 1, 0]]).unwrap();
        let e = GSet::from_generator_action(&g, 4, &[vec![3, 2, 1, 0]]).unwrap();
        let t = GGraph::new(v, e, vec![0, 1, 3, 4], vec![1, 2, 2, 3]).unwrap();
        let u = BTreeSet::from([2]);
        let out = retract_tree(&t, &u).unwrap();
        check_output(&t, &u, &out).unwrap();
        let inner = BTreeSet::from([1, 2, 3]);
        let out = retract_tree(&t, &inner).unwrap();
        check_output(&t, &inner, &out).unwrap();
        assert_eq!(retract_tree(&t, &BTreeSet::from([0, 4])).unwrap_err(), RetractError::NotARetract(2));
        assert_eq!(retract_tree(&t, &BTreeSet::from([0])).unwrap_err(), RetractError::NotActionClosed(0));
    }

    #[test]
    fn non_retract_rejected() {
        // Z/2 swapping two leaves of a star; U = the two leaves cannot absorb
        // the fixed centre.
        let g = FiniteGroup::cyclic(2);
        let v = GSet::from_generator_action(&g, 3, &[vec![0, 2, 1]]).unwrap();
        let e = GSet::from_generator_action(&g, 2, &[vec![1, 0]]).unwrap();
        let t = GGraph::new(v, e, vec![0, 0], vec![1, 2]).unwrap();
        assert_eq!(retract_tree(&t, &BTreeSet::from([1, 2])).unwrap_err(), RetractError::NotARetract(0));
    }

    #[test]
    fn random_instances_retract() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let inst = crate::random::random_instance(&mut rng, 40);
            let f = build_filtration(&inst.tree, &inst.u).unwrap();
            check_filtration(&inst.tree, &inst.u, &f).unwrap();
            let out = retract_tree(&inst.tree, &inst.u).unwrap();
            check_output(&inst.tree, &inst.u, &out).unwrap();
        }
    }
}
