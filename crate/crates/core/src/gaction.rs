//! Explicit finite groups acting on finite sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is not a group table: {0}")]
    BadTable(String),
    #[error("permutation {index} is not a bijection of 0..{size}")]
    BadPermutation { index: usize, size: usize },
    #[error("generators do not generate the group (closure has {closure} of {order} elements)")]
    NotGenerating { closure: usize, order: usize },
    #[error("group generated by the permutations exceeds {0} elements")]
    TooLarge(usize),
    #[error("action is not a group action: {0}")]
    BadAction(String),
    #[error("point {point} outside carrier of size {size}")]
    PointOutOfRange { point: usize, size: usize },
    #[error("element {0} is not in the group")]
    ElementOutOfRange(usize),
    #[error("subset is not closed under the action (point {0} leaves it)")]
    NotActionClosed(usize),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("action is given for {given} generators but the group has {expected}")]
    GeneratorCount { given: usize, expected: usize },
}

const MAX_ORDER: usize = 100_000;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    generators: Vec<usize>,
    /// For each element, a shortest expression `g = s₁ s₂ ⋯ s_k` as
    /// indices into `generators`.
    words: Vec<Vec<usize>>,
    permutations: Option<Vec<Vec<usize>>>,
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

impl FiniteGroup {
    pub fn from_table(table: Vec<Vec<usize>>, generators: Vec<usize>) -> Result<Arc<Self>, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::BadTable("empty group".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(GroupError::BadTable("table is not square over 0..order".into()));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let mul = |a: usize, b: usize| flat[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul(e, a) == a && mul(a, e) == a))
            .ok_or_else(|| GroupError::BadTable("no identity".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(GroupError::BadTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                .ok_or_else(|| GroupError::BadTable(format!("element {a} has no inverse")))?;
            inverses.push(inv);
        }
        if let Some(&g) = generators.iter().find(|&&g| g >= n) {
            return Err(GroupError::ElementOutOfRange(g));
        }
        let mut group = FiniteGroup {
            order: n,
            table: flat,
            identity,
            inverses,
            generators,
            words: Vec::new(),
            permutations: None,
        };
        group.words = group.generator_words()?;
        Ok(Arc::new(group))
    }

    /// Closure of permutations of a common finite set, acting on the left:
    /// `(gh)(p) = g(h(p))`. Element 0 is the identity; generator `i` is the
    /// element equal to `perms[i]`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Arc<Self>, GroupError> {
        let degree = perms.first().map_or(0, |p| p.len());
        for (i, p) in perms.iter().enumerate() {
            if p.len() != degree || !is_permutation(p) {
                return Err(GroupError::BadPermutation { index: i, size: degree });
            }
        }
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
        let id: Vec<usize> = (0..degree).collect();
        let mut elements = vec![id.clone()];
        let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(id, 0)]);
        let mut head = 0;
        while head < elements.len() {
            let e = elements[head].clone();
            head += 1;
            for s in perms {
                let next = compose(s, &e);
                if !index.contains_key(&next) {
                    if elements.len() >= MAX_ORDER {
                        return Err(GroupError::TooLarge(MAX_ORDER));
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&compose(&elements[a], &elements[b])];
            }
        }
        let inverses = (0..n)
            .map(|a| {
                let mut inv = vec![0; degree];
                for (i, &x) in elements[a].iter().enumerate() {
                    inv[x] = i;
                }
                index[&inv]
            })
            .collect();
        let generators = perms.iter().map(|p| index[p]).collect();
        let mut group = FiniteGroup {
            order: n,
            table,
            identity: 0,
            inverses,
            generators,
            words: Vec::new(),
            permutations: Some(elements),
        };
        group.words = group.generator_words()?;
        Ok(Arc::new(group))
    }

    pub fn trivial() -> Arc<Self> {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Arc<Self> {
        assert!(n >= 1);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let gens = if n == 1 { vec![] } else { vec![1] };
        Self::from_table(table, gens).expect("cyclic table")
    }

    /// Symmetric group on `n` points, generated by a transposition and an
    /// `n`-cycle.
    pub fn symmetric(n: usize) -> Arc<Self> {
        if n <= 1 {
            return Self::trivial();
        }
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_permutations(&[swap, cycle]).expect("symmetric group")
    }

    /// Dihedral group of order `2n` acting on the vertices of an `n`-gon.
    pub fn dihedral(n: usize) -> Arc<Self> {
        assert!(n >= 3);
        let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(&[rot, refl]).expect("dihedral group")
    }

    /// `Z/a × Z/b`, elements indexed `i * b + j`.
    pub fn direct_cyclic(a: usize, b: usize) -> Arc<Self> {
        let n = a * b;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| ((x / b + y / b) % a) * b + (x % b + y % b) % b)
                    .collect()
            })
            .collect();
        let mut gens = Vec::new();
        if a > 1 {
            gens.push(b);
        }
        if b > 1 {
            gens.push(1);
        }
        Self::from_table(table, gens).expect("product table")
    }

    fn generator_words(&self) -> Result<Vec<Vec<usize>>, GroupError> {
        let mut words: Vec<Option<Vec<usize>>> = vec![None; self.order];
        words[self.identity] = Some(Vec::new());
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for (i, &s) in self.generators.iter().enumerate() {
                let h = self.mul(s, g);
                if words[h].is_none() {
                    let mut w = vec![i];
                    w.extend_from_slice(words[g].as_ref().unwrap());
                    words[h] = Some(w);
                    queue.push_back(h);
                }
            }
        }
        let closure = words.iter().filter(|w| w.is_some()).count();
        if closure != self.order {
            return Err(GroupError::NotGenerating { closure, order: self.order });
        }
        Ok(words.into_iter().map(Option::unwrap).collect())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g⁻¹ h g`.
    pub fn conj(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), h), g)
    }

    /// Shortest expression of `g` as a product of generators (indices into
    /// [`Self::generators`]), leftmost factor first.
    pub fn word(&self, g: usize) -> &[usize] {
        &self.words[g]
    }

    pub fn permutation(&self, g: usize) -> Option<&[usize]> {
        self.permutations.as_ref().map(|p| p[g].as_slice())
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn whole(self: &Arc<Self>) -> Subgroup {
        Subgroup { elements: self.elements().collect() }
    }

    /// All subgroups, ordered by size then elements.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut found = BTreeSet::from([self.trivial_subgroup()]);
        let mut queue = VecDeque::from([self.trivial_subgroup()]);
        while let Some(h) = queue.pop_front() {
            for g in self.elements().filter(|&g| !h.contains(g)) {
                let mut gens: Vec<usize> = h.elements().iter().copied().collect();
                gens.push(g);
                let k = Subgroup::generated(self, &gens);
                if found.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        let mut all: Vec<Subgroup> = found.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { elements: BTreeSet::from([self.identity]) }
    }
}

/// A subgroup, as a set of element indices of the ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    elements: BTreeSet<usize>,
}

impl Subgroup {
    pub fn new(group: &FiniteGroup, elements: BTreeSet<usize>) -> Result<Self, GroupError> {
        if let Some(&g) = elements.iter().find(|&&g| g >= group.order()) {
            return Err(GroupError::ElementOutOfRange(g));
        }
        if !elements.contains(&group.identity()) {
            return Err(GroupError::NotSubgroup("missing identity".into()));
        }
        for &a in &elements {
            if !elements.contains(&group.inv(a)) {
                return Err(GroupError::NotSubgroup(format!("missing inverse of {a}")));
            }
            for &b in &elements {
                if !elements.contains(&group.mul(a, b)) {
                    return Err(GroupError::NotSubgroup(format!("{a}·{b} missing")));
                }
            }
        }
        Ok(Subgroup { elements })
    }

    /// Subgroup generated by `gens`.
    pub fn generated(group: &FiniteGroup, gens: &[usize]) -> Self {
        let mut elements = BTreeSet::from([group.identity()]);
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = group.mul(g, s);
                if elements.insert(h) {
                    queue.push_back(h);
                }
            }
        }
        Subgroup { elements }
    }

    pub fn elements(&self) -> &BTreeSet<usize> {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.contains(&g)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup { elements: self.elements.intersection(&other.elements).copied().collect() }
    }

    /// `H^g = g⁻¹ H g`.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Subgroup {
        Subgroup { elements: self.elements.iter().map(|&h| group.conj(h, g)).collect() }
    }

    /// For every `g`, `H^g ⊆ H` only if `H^g = H`.
    pub fn is_conjugate_incomparable(&self, group: &FiniteGroup) -> bool {
        group.elements().all(|g| {
            let c = self.conjugate(group, g);
            !c.is_subgroup_of(self) || c == *self
        })
    }
}

/// A left action of a finite group on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    group: Arc<FiniteGroup>,
    size: usize,
    table: Vec<usize>,
}

/// An equivariant idempotent map onto a retract.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retraction {
    pub map: Vec<usize>,
}

impl GSet {
    /// `table[g][p] = g·p`.
    pub fn from_table(group: &Arc<FiniteGroup>, size: usize, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        if table.len() != group.order() {
            return Err(GroupError::BadAction(format!(
                "{} rows for a group of order {}",
                table.len(),
                group.order()
            )));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != size || !is_permutation(row) {
                return Err(GroupError::BadAction(format!("element {g} does not permute the points")));
            }
        }
        let s = GSet { group: Arc::clone(group), size, table: table.into_iter().flatten().collect() };
        s.validate()?;
        Ok(s)
    }

    /// Builds the action from one permutation per group generator.
    pub fn from_generator_action(
        group: &Arc<FiniteGroup>,
        size: usize,
        perms: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        if perms.len() != group.generators().len() {
            return Err(GroupError::GeneratorCount { given: perms.len(), expected: group.generators().len() });
        }
        for (i, p) in perms.iter().enumerate() {
            if p.len() != size || !is_permutation(p) {
                return Err(GroupError::BadPermutation { index: i, size });
            }
        }
        let mut table = vec![0; group.order() * size];
        for g in group.elements() {
            for p in 0..size {
                let mut q = p;
                for &s in group.word(g).iter().rev() {
                    q = perms[s][q];
                }
                table[g * size + p] = q;
            }
        }
        let s = GSet { group: Arc::clone(group), size, table };
        s.validate()?;
        for (i, &gen) in group.generators().iter().enumerate() {
            if (0..size).any(|p| s.act(gen, p) != perms[i][p]) {
                return Err(GroupError::BadAction(format!(
                    "generator {i} action inconsistent with the group relations"
                )));
            }
        }
        Ok(s)
    }

    /// `G` acting on itself by left multiplication.
    pub fn regular(group: &Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let table = (0..n).flat_map(|g| (0..n).map(move |h| (g, h))).map(|(g, h)| group.mul(g, h)).collect();
        GSet { group: Arc::clone(group), size: n, table }
    }

    pub fn trivial_action(group: &Arc<FiniteGroup>, size: usize) -> Self {
        let table = (0..group.order()).flat_map(|_| 0..size).collect();
        GSet { group: Arc::clone(group), size, table }
    }

    /// The natural action of a permutation group on its points.
    pub fn natural(group: &Arc<FiniteGroup>) -> Option<Self> {
        let degree = group.permutation(0)?.len();
        let table = group
            .elements()
            .flat_map(|g| group.permutation(g).unwrap().to_vec())
            .collect();
        Some(GSet { group: Arc::clone(group), size: degree, table })
    }

    fn validate(&self) -> Result<(), GroupError> {
        let g = &self.group;
        if (0..self.size).any(|p| self.act(g.identity(), p) != p) {
            return Err(GroupError::BadAction("identity acts nontrivially".into()));
        }
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                if let Some(p) = (0..self.size).find(|&p| self.act(ab, p) != self.act(a, self.act(b, p))) {
                    return Err(GroupError::BadAction(format!("(g·h)·{p} ≠ g·(h·{p}) for g={a}, h={b}")));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn act(&self, g: usize, p: usize) -> usize {
        self.table[g * self.size + p]
    }

    /// Permutation of the points induced by each group generator.
    pub fn generator_action(&self) -> Vec<Vec<usize>> {
        self.group
            .generators()
            .iter()
            .map(|&s| (0..self.size).map(|p| self.act(s, p)).collect())
            .collect()
    }

    fn check_point(&self, p: usize) -> Result<(), GroupError> {
        if p < self.size {
            Ok(())
        } else {
            Err(GroupError::PointOutOfRange { point: p, size: self.size })
        }
    }

    pub fn orbit(&self, p: usize) -> Result<BTreeSet<usize>, GroupError> {
        self.check_point(p)?;
        Ok(self.group.elements().map(|g| self.act(g, p)).collect())
    }

    pub fn stabilizer(&self, p: usize) -> Result<Subgroup, GroupError> {
        self.check_point(p)?;
        Ok(Subgroup { elements: self.group.elements().filter(|&g| self.act(g, p) == p).collect() })
    }

    /// Stabilizer of every point in `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Subgroup {
        Subgroup {
            elements: self
                .group
                .elements()
                .filter(|&g| points.iter().all(|&p| self.act(g, p) == p))
                .collect(),
        }
    }

    /// All orbits, each sorted, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for p in 0..self.size {
            if !seen[p] {
                let orbit: Vec<usize> = self.orbit(p).unwrap().into_iter().collect();
                for &q in &orbit {
                    seen[q] = true;
                }
                out.push(orbit);
            }
        }
        out
    }

    /// Least element of the orbit of `p`.
    pub fn orbit_rep(&self, p: usize) -> usize {
        self.group.elements().map(|g| self.act(g, p)).min().unwrap_or(p)
    }

    /// Some `g` with `g·from = to`, least index first.
    pub fn transporter(&self, from: usize, to: usize) -> Option<usize> {
        self.group.elements().find(|&g| self.act(g, from) == to)
    }

    pub fn is_closed(&self, subset: &BTreeSet<usize>) -> bool {
        self.first_escape(subset).is_none()
    }

    fn first_escape(&self, subset: &BTreeSet<usize>) -> Option<usize> {
        subset
            .iter()
            .find(|&&p| self.group.elements().any(|g| !subset.contains(&self.act(g, p))))
            .copied()
    }

    /// Restriction to an action-closed subset; returns the new set and
    /// the old index of each new point (in increasing order).
    pub fn restrict(&self, subset: &BTreeSet<usize>) -> Result<(GSet, Vec<usize>), GroupError> {
        if let Some(&p) = subset.iter().find(|&&p| p >= self.size) {
            return Err(GroupError::PointOutOfRange { point: p, size: self.size });
        }
        if let Some(p) = self.first_escape(subset) {
            return Err(GroupError::NotActionClosed(p));
        }
        let old: Vec<usize> = subset.iter().copied().collect();
        let new_index: BTreeMap<usize, usize> = old.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let table = self
            .group
            .elements()
            .flat_map(|g| old.iter().map(move |&p| (g, p)))
            .map(|(g, p)| new_index[&self.act(g, p)])
            .collect();
        Ok((GSet { group: Arc::clone(&self.group), size: old.len(), table }, old))
    }

    /// Decides whether `retract` is a G-retract: every point outside it has
    /// its stabilizer inside the stabilizer of some point of it. When it is,
    /// returns the equivariant retraction built from least orbit
    /// representatives and the least admissible target.
    pub fn is_retract(&self, retract: &BTreeSet<usize>) -> Result<Option<Retraction>, GroupError> {
        if let Some(&p) = retract.iter().find(|&&p| p >= self.size) {
            return Err(GroupError::PointOutOfRange { point: p, size: self.size });
        }
        if let Some(p) = self.first_escape(retract) {
            return Err(GroupError::NotActionClosed(p));
        }
        let stabs: Vec<Subgroup> = (0..self.size).map(|p| self.stabilizer(p).unwrap()).collect();
        let mut map: Vec<Option<usize>> = vec![None; self.size];
        for &u in retract {
            map[u] = Some(u);
        }
        for orbit in self.orbits() {
            let w = orbit[0];
            if retract.contains(&w) {
                continue;
            }
            let Some(&u) = retract.iter().find(|&&u| stabs[w].is_subgroup_of(&stabs[u])) else {
                return Ok(None);
            };
            for g in self.group.elements() {
                map[self.act(g, w)] = Some(self.act(g, u));
            }
        }
        Ok(Some(Retraction { map: map.into_iter().map(Option::unwrap).collect() }))
    }

    /// `r(g·v) = g·r(v)` for all `g`, `v`.
    pub fn is_equivariant_map(&self, target: &GSet, map: &[usize]) -> bool {
        self.group
            .elements()
            .all(|g| (0..self.size).all(|v| map[self.act(g, v)] == target.act(g, map[v])))
    }
}
