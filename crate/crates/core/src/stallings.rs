//! Stallings core graphs for finitely generated subgroups of free groups.
//!
//! A [`CoreGraph`] is a based, folded, edge-labelled digraph. Closed reduced
//! paths at the base spell exactly the elements of the subgroup; vertices
//! stand for cosets `Hg` that some such path visits.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::words::{Alphabet, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StallingsError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("word `{0}` is not cyclically reduced")]
    NotCyclicallyReduced(String),
    #[error("the empty word has no closed-path census")]
    EmptyWord,
    #[error("basis does not match the Schreier basis of the core graph: {0}")]
    BasisMismatch(String),
}

/// A labelled edge `(source, generator, target)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledEdge {
    pub source: usize,
    pub label: usize,
    pub target: usize,
}

/// An arbitrary based labelled graph, before folding.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub alphabet: Arc<Alphabet>,
    pub vertex_count: usize,
    pub base: usize,
    pub edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    /// The wedge of one petal (closed path at the base) per nonempty generator.
    pub fn wedge(alphabet: &Arc<Alphabet>, gens: &[Word]) -> Result<Self, WordError> {
        let mut g = LabeledGraph {
            alphabet: Arc::clone(alphabet),
            vertex_count: 1,
            base: 0,
            edges: Vec::new(),
        };
        for w in gens {
            if w.alphabet().as_ref() != alphabet.as_ref() {
                return Err(WordError::AlphabetMismatch {
                    left: w.alphabet().names().join(","),
                    right: alphabet.names().join(","),
                });
            }
            let n = w.len();
            let mut prev = 0;
            for (i, l) in w.letters().iter().enumerate() {
                let next = if i + 1 == n {
                    0
                } else {
                    g.vertex_count += 1;
                    g.vertex_count - 1
                };
                g.push_step(prev, *l, next);
                prev = next;
            }
        }
        Ok(g)
    }

    fn push_step(&mut self, from: usize, l: Letter, to: usize) {
        let e = if l.inverse {
            LabeledEdge { source: to, label: l.generator, target: from }
        } else {
            LabeledEdge { source: from, label: l.generator, target: to }
        };
        self.edges.push(e);
    }
}

/// Incidence entry seen from one endpoint: (label, outgoing?, neighbour).
type Half = (usize, bool, usize);

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
}

/// A folded based graph with the subgroup generators it was built from.
#[derive(Clone, Debug)]
pub struct CoreGraph {
    alphabet: Arc<Alphabet>,
    vertex_count: usize,
    edges: Vec<LabeledEdge>,
    out: Vec<Vec<Option<usize>>>,
    inc: Vec<Vec<Option<usize>>>,
    generators: Vec<Word>,
}

/// Base-relative relabelling used to compare subgroups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub vertex_count: usize,
    pub edges: Vec<LabeledEdge>,
}

impl CoreGraph {
    pub fn from_generators(alphabet: &Arc<Alphabet>, gens: &[Word]) -> Result<Self, StallingsError> {
        let wedge = LabeledGraph::wedge(alphabet, gens)?;
        let mut g = fold(&wedge);
        g.generators = gens.iter().filter(|w| !w.is_empty()).cloned().collect();
        Ok(g)
    }

    /// Parses a comma-separated generator list such as `"x^2,y^2"`.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self, StallingsError> {
        let gens = Word::parse_list(alphabet, text)?;
        Self::from_generators(alphabet, &gens)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// The base vertex is always vertex 0.
    pub fn base(&self) -> usize {
        0
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn is_folded(&self) -> bool {
        let mut seen_out = BTreeSet::new();
        let mut seen_in = BTreeSet::new();
        self.edges.iter().all(|e| {
            seen_out.insert((e.source, e.label)) && seen_in.insert((e.target, e.label))
        })
    }

    /// Follows one letter from `v`, if the graph has that edge.
    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        if l.inverse {
            self.inc[v][l.generator]
        } else {
            self.out[v][l.generator]
        }
    }

    /// Reads `w` starting at `from`; `None` if the walk leaves the graph.
    pub fn read(&self, from: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(from, |v, &l| self.step(v, l))
    }

    fn check_alphabet(&self, w: &Word) -> Result<(), WordError> {
        if w.alphabet().as_ref() == self.alphabet.as_ref() {
            Ok(())
        } else {
            Err(WordError::AlphabetMismatch {
                left: self.alphabet.names().join(","),
                right: w.alphabet().names().join(","),
            })
        }
    }

    /// Subgroup membership: `w` reads a closed path at the base.
    pub fn contains(&self, w: &Word) -> Result<bool, StallingsError> {
        self.check_alphabet(w)?;
        Ok(self.read(0, w) == Some(0))
    }

    fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    /// Vertices of `core(X)`: what survives repeatedly deleting vertices of
    /// degree at most one, the base included.
    pub fn core_vertices(&self) -> BTreeSet<usize> {
        let mut alive: Vec<bool> = vec![true; self.vertex_count];
        let mut deg = self.degrees();
        let mut queue: VecDeque<usize> = (0..self.vertex_count).filter(|&v| deg[v] <= 1).collect();
        while let Some(v) = queue.pop_front() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for e in &self.edges {
                let other = if e.source == v {
                    e.target
                } else if e.target == v {
                    e.source
                } else {
                    continue;
                };
                if alive[other] {
                    deg[other] -= 1;
                    if deg[other] <= 1 {
                        queue.push_back(other);
                    }
                }
            }
        }
        (0..self.vertex_count).filter(|&v| alive[v]).collect()
    }

    /// Core vertices at which `w` reads a closed path.
    ///
    /// For a cyclically reduced `w` this is the set of cosets `Hg` with
    /// `w ∈ H^g`: such a closed path is itself cyclically reduced and so
    /// never leaves the core.
    pub fn closed_path_vertices(&self, w: &Word) -> Result<BTreeSet<usize>, StallingsError> {
        self.check_alphabet(w)?;
        if w.is_empty() {
            return Err(StallingsError::EmptyWord);
        }
        if !w.is_cyclically_reduced() {
            return Err(StallingsError::NotCyclicallyReduced(w.to_string()));
        }
        Ok(self
            .core_vertices()
            .into_iter()
            .filter(|&v| self.read(v, w) == Some(v))
            .collect())
    }

    /// BFS order from the base, exploring `out[g]` then `in[g]` for each
    /// generator `g` in turn. Returns the order and, per vertex, the
    /// tree edge used to discover it.
    fn bfs(&self) -> (Vec<usize>, Vec<Option<(usize, Letter)>>) {
        let mut order = vec![0];
        let mut seen = vec![false; self.vertex_count];
        let mut parent = vec![None; self.vertex_count];
        if self.vertex_count == 0 {
            return (order, parent);
        }
        seen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for g in 0..self.alphabet.size() {
                for l in [Letter::pos(g), Letter::neg(g)] {
                    if let Some(u) = self.step(v, l) {
                        if !seen[u] {
                            seen[u] = true;
                            parent[u] = Some((v, l));
                            order.push(u);
                        }
                    }
                }
            }
        }
        (order, parent)
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        let (order, _) = self.bfs();
        let mut rank = vec![usize::MAX; self.vertex_count];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut edges: Vec<LabeledEdge> = self
            .edges
            .iter()
            .map(|e| LabeledEdge { source: rank[e.source], label: e.label, target: rank[e.target] })
            .collect();
        edges.sort();
        CanonicalForm { vertex_count: order.len(), edges }
    }

    /// Word along the BFS spanning tree from the base to each vertex.
    pub fn tree_words(&self) -> Vec<Word> {
        let (order, parent) = self.bfs();
        let mut words = vec![Word::identity(&self.alphabet); self.vertex_count];
        for &v in order.iter().skip(1) {
            let (p, l) = parent[v].expect("non-base vertex has a parent");
            let step = Word::from_letters(&self.alphabet, [l]).expect("letter in alphabet");
            words[v] = words[p].multiply(&step).expect("same alphabet");
        }
        words
    }

    /// Human-readable coset names `H1`, `Hx`, `Hx^-1y`, ...
    pub fn coset_labels(&self) -> Vec<String> {
        self.tree_words().iter().map(|w| format!("H{w}")).collect()
    }

    /// Vertex and edge listing in `(source, label, target)` triple notation.
    pub fn to_text(&self) -> String {
        let labels = self.coset_labels();
        let mut s = String::new();
        let _ = writeln!(s, "vertices ({}): {}", self.vertex_count, labels.join(" "));
        let _ = writeln!(s, "edges ({}):", self.edges.len());
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  ({}, {}, {})",
                labels[e.source],
                self.alphabet.name(e.label),
                labels[e.target]
            );
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let labels = self.coset_labels();
        let mut s = String::from("digraph core {\n  rankdir=LR;\n");
        for v in 0..self.vertex_count {
            let style = if v == 0 { ", shape=doublecircle, style=filled, fillcolor=gold" } else { "" };
            let _ = writeln!(s, "  v{v} [label=\"{}\"{style}];", labels[v]);
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"{}\"];",
                e.source,
                e.target,
                self.alphabet.name(e.label)
            );
        }
        s.push_str("}\n");
        s
    }

    /// Rewrites a subgroup element in terms of `basis`, which must be the
    /// Schreier basis of this graph up to order and inversion. The result
    /// lives over `aux`, whose `i`-th generator stands for `basis[i]`.
    /// Returns `Ok(None)` when `w` is not in the subgroup.
    pub fn express(&self, w: &Word, basis: &[Word], aux: &Arc<Alphabet>) -> Result<Option<Word>, StallingsError> {
        self.check_alphabet(w)?;
        if aux.size() != basis.len() {
            return Err(StallingsError::BasisMismatch(format!(
                "auxiliary alphabet has {} generators, basis has {}",
                aux.size(),
                basis.len()
            )));
        }
        let tree = self.tree_words();
        let (_, parent) = self.bfs();
        let is_tree_edge = |e: &LabeledEdge| parent[e.target] == Some((e.source, Letter::pos(e.label)))
            || parent[e.source] == Some((e.target, Letter::neg(e.label)));
        let mut edge_letter: BTreeMap<LabeledEdge, Letter> = BTreeMap::new();
        let mut used = vec![false; basis.len()];
        for e in self.edges.iter().filter(|e| !is_tree_edge(e)) {
            let gen = Word::generator(&self.alphabet, e.label)?;
            let schreier = tree[e.source].multiply(&gen)?.multiply(&tree[e.target].inverse())?;
            let hit = basis.iter().enumerate().find_map(|(i, b)| {
                if *b == schreier {
                    Some(Letter::pos(i))
                } else if b.inverse() == schreier {
                    Some(Letter::neg(i))
                } else {
                    None
                }
            });
            let l = hit.ok_or_else(|| {
                StallingsError::BasisMismatch(format!("Schreier generator {schreier} is not a basis element"))
            })?;
            if std::mem::replace(&mut used[l.generator], true) {
                return Err(StallingsError::BasisMismatch(format!(
                    "basis element {} matched twice",
                    basis[l.generator]
                )));
            }
            edge_letter.insert(*e, l);
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(StallingsError::BasisMismatch(format!(
                "basis element {} is not a Schreier generator",
                basis[i]
            )));
        }
        let mut v = 0;
        let mut letters = Vec::new();
        for &l in w.letters() {
            let Some(u) = self.step(v, l) else {
                return Ok(None);
            };
            let e = if l.inverse {
                LabeledEdge { source: u, label: l.generator, target: v }
            } else {
                LabeledEdge { source: v, label: l.generator, target: u }
            };
            if let Some(&a) = edge_letter.get(&e) {
                letters.push(if l.inverse { a.inv() } else { a });
            }
            v = u;
        }
        if v != 0 {
            return Ok(None);
        }
        Ok(Some(Word::from_letters(aux, letters)?))
    }
}

/// Folds with the deterministic lowest-index-first strategy.
pub fn fold(graph: &LabeledGraph) -> CoreGraph {
    let priority: Vec<usize> = (0..graph.vertex_count).collect();
    fold_with_priority(graph, &priority)
}

/// Folds processing vertices in increasing `priority` (a permutation of the
/// vertex indices); merged vertices keep the lower-priority survivor. The
/// final graph does not depend on the order, up to based isomorphism.
pub fn fold_with_priority(graph: &LabeledGraph, priority: &[usize]) -> CoreGraph {
    let n = graph.vertex_count;
    assert_eq!(priority.len(), n, "priority must cover every vertex");
    let mut uf = UnionFind { parent: (0..n).collect() };
    let mut adj: Vec<Vec<Half>> = vec![Vec::new(); n];
    for e in &graph.edges {
        adj[e.source].push((e.label, true, e.target));
        adj[e.target].push((e.label, false, e.source));
    }
    let mut work: BTreeSet<(usize, usize)> = (0..n).map(|v| (priority[v], v)).collect();
    while let Some((_, v)) = work.pop_first() {
        if uf.find(v) != v {
            continue;
        }
        let mut halves: Vec<Half> = std::mem::take(&mut adj[v])
            .into_iter()
            .map(|(l, o, u)| (l, o, uf.find(u)))
            .collect();
        halves.sort();
        halves.dedup();
        let clash = halves
            .windows(2)
            .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
            .map(|w| (w[0].2, w[1].2));
        adj[v] = halves;
        if let Some((a, b)) = clash {
            let (keep, lose) = if priority[a] <= priority[b] { (a, b) } else { (b, a) };
            uf.parent[lose] = keep;
            let moved = std::mem::take(&mut adj[lose]);
            adj[keep].extend(moved);
            work.insert((priority[keep], keep));
            let rv = uf.find(v);
            work.insert((priority[rv], rv));
        }
    }
    let base = uf.find(graph.base);
    let mut edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    for e in &graph.edges {
        edges.insert((uf.find(e.source), e.label, uf.find(e.target)));
    }
    let mut vertices: BTreeSet<usize> = (0..n).map(|v| uf.find(v)).collect();

    // Trim hanging trees away from the base; they carry no closed paths.
    loop {
        let mut deg: BTreeMap<usize, usize> = vertices.iter().map(|&v| (v, 0)).collect();
        for &(s, _, t) in &edges {
            *deg.get_mut(&s).unwrap() += 1;
            *deg.get_mut(&t).unwrap() += 1;
        }
        let leaves: BTreeSet<usize> = deg
            .iter()
            .filter(|&(&v, &d)| v != base && d <= 1)
            .map(|(&v, _)| v)
            .collect();
        if leaves.is_empty() {
            break;
        }
        edges.retain(|(s, _, t)| !leaves.contains(s) && !leaves.contains(t));
        vertices.retain(|v| !leaves.contains(v));
    }

    let k = graph.alphabet.size();
    let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = vertices.len();
    let mut out = vec![vec![None; k]; m];
    let mut inc = vec![vec![None; k]; m];
    let mut list = Vec::with_capacity(edges.len());
    for &(s, l, t) in &edges {
        let (s, t) = (index[&s], index[&t]);
        out[s][l] = Some(t);
        inc[t][l] = Some(s);
        list.push(LabeledEdge { source: s, label: l, target: t });
    }
    let provisional = CoreGraph {
        alphabet: Arc::clone(&graph.alphabet),
        vertex_count: m,
        edges: list,
        out,
        inc,
        generators: Vec::new(),
    };
    relabel_from(&provisional, index[&base])
}

/// Renumbers so that `base` becomes 0 and the rest follow BFS order.
fn relabel_from(g: &CoreGraph, base: usize) -> CoreGraph {
    let k = g.alphabet.size();
    let mut rank = vec![usize::MAX; g.vertex_count];
    let mut order = vec![base];
    rank[base] = 0;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for gen in 0..k {
            for u in [g.out[v][gen], g.inc[v][gen]].into_iter().flatten() {
                if rank[u] == usize::MAX {
                    rank[u] = order.len();
                    order.push(u);
                }
            }
        }
    }
    let m = order.len();
    let mut out = vec![vec![None; k]; m];
    let mut inc = vec![vec![None; k]; m];
    let mut edges: Vec<LabeledEdge> = g
        .edges
        .iter()
        .map(|e| LabeledEdge { source: rank[e.source], label: e.label, target: rank[e.target] })
        .collect();
    edges.sort();
    for e in &edges {
        out[e.source][e.label] = Some(e.target);
        inc[e.target][e.label] = Some(e.source);
    }
    CoreGraph {
        alphabet: Arc::clone(&g.alphabet),
        vertex_count: m,
        edges,
        out,
        inc,
        generators: g.generators.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::power_word;

    fn xy() -> Arc<Alphabet> {
        Alphabet::xy()
    }

    fn w(s: &str) -> Word {
        Word::parse(&xy(), s).unwrap()
    }

    fn h(s: &str) -> CoreGraph {
        CoreGraph::parse(&xy(), s).unwrap()
    }

    #[test]
    fn census_of_example_subgroups() {
        let a = h("x^2,y^2");
        assert_eq!((a.vertex_count(), a.edges().len()), (3, 4));
        let b = h("x^4,xyx,y^4");
        assert_eq!((b.vertex_count(), b.edges().len()), (7, 9));
        let c = h("x");
        assert_eq!((c.vertex_count(), c.edges().len()), (1, 1));
        assert!(a.is_folded() && b.is_folded());
    }

    #[test]
    fn fold_examples() {
        let g = LabeledGraph {
            alphabet: xy(),
            vertex_count: 1,
            base: 0,
            edges: vec![
                LabeledEdge { source: 0, label: 0, target: 0 },
                LabeledEdge { source: 0, label: 0, target: 0 },
            ],
        };
        let f = fold(&g);
        assert_eq!((f.vertex_count(), f.edges().len()), (1, 1));
        let wedge = LabeledGraph::wedge(&xy(), &[w("x^2"), w("y^2")]).unwrap();
        assert_eq!(fold(&wedge).canonical_form(), h("x^2,y^2").canonical_form());
    }

    #[test]
    fn spur_generator_keeps_base_spur() {
        let g = h("x^-1yx");
        assert_eq!((g.vertex_count(), g.edges().len()), (2, 2));
        assert!(g.contains(&w("x^-1y^5x")).unwrap());
        assert!(!g.contains(&w("y")).unwrap());
        // the base lies on a spur, so only the loop vertex is in the core
        assert_eq!(g.core_vertices().len(), 1);
        assert!(!g.core_vertices().contains(&0));
    }

    #[test]
    fn membership_examples() {
        let a = h("x^2,y^2");
        assert!(a.contains(&w("x^2")).unwrap());
        assert!(!a.contains(&w("xy")).unwrap());
        let b = h("x^4,xyx,y^4");
        assert!(b.contains(&w("x^4y^4x^4")).unwrap());
        let other = Alphabet::new(["X", "Y"]).unwrap();
        assert!(a.contains(&Word::generator(&other, 0).unwrap()).is_err());
    }

    #[test]
    fn closed_path_examples() {
        let a = h("x^2,y^2");
        assert!(a.closed_path_vertices(&power_word(0, 1)).unwrap().is_empty());
        assert_eq!(a.closed_path_vertices(&power_word(1, 1)).unwrap(), BTreeSet::from([0]));
        let b = h("x^4,xyx,y^4");
        assert!(b.closed_path_vertices(&power_word(1, 1)).unwrap().is_empty());
        assert!(matches!(
            a.closed_path_vertices(&w("xyx^-1")),
            Err(StallingsError::NotCyclicallyReduced(_))
        ));
        assert_eq!(a.closed_path_vertices(&w("1")), Err(StallingsError::EmptyWord));
    }

    #[test]
    fn canonical_form_examples() {
        assert_eq!(h("x^2,y^2").canonical_form(), h("y^2,x^2").canonical_form());
        assert_ne!(h("x").canonical_form(), h("x^2").canonical_form());
        assert_eq!(h("x^4,xyx,y^4").canonical_form().vertex_count, 7);
    }

    #[test]
    fn coset_labels_and_text() {
        let a = h("x^2,y^2");
        let labels = a.coset_labels();
        assert_eq!(labels[0], "H1");
        assert!(labels.contains(&"Hx".to_string()));
        assert!(labels.contains(&"Hy".to_string()));
        let text = a.to_text();
        assert!(text.contains("(H1, x, Hx)"));
        assert!(text.contains("(Hy, y, H1)"));
        assert!(a.to_dot().contains("doublecircle"));
    }

    #[test]
    fn express_over_power_basis() {
        let g = h("x^4,y^4");
        let aux = Alphabet::new(["X", "Y"]).unwrap();
        let basis = [w("x^4"), w("y^4")];
        let got = g.express(&w("x^4y^4x^4"), &basis, &aux).unwrap().unwrap();
        assert_eq!(got.to_string(), "XYX");
        assert_eq!(g.express(&w("x^-8y^4"), &basis, &aux).unwrap().unwrap().to_string(), "X^-2Y");
        assert_eq!(g.express(&w("x^6"), &basis, &aux).unwrap(), None);
        assert!(matches!(
            g.express(&w("x^4"), &[w("x^8"), w("y^4")], &aux),
            Err(StallingsError::BasisMismatch(_))
        ));
    }

    #[test]
    fn trivial_subgroup() {
        let g = CoreGraph::from_generators(&xy(), &[w("1")]).unwrap();
        assert_eq!((g.vertex_count(), g.edges().len()), (1, 0));
        assert!(g.contains(&w("1")).unwrap());
        assert!(!g.contains(&w("x")).unwrap());
        assert!(g.core_vertices().is_empty());
    }
}
