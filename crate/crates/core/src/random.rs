//! Seeded generators for random finite G-trees and G-retracts.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gaction::{FiniteGroup, GSet, Subgroup};
use crate::ggraph::{GGraph, Orientation};

/// A G-tree together with a G-retract of its vertex set.
#[derive(Clone, Debug)]
pub struct Instance {
    pub tree: GGraph,
    pub u: BTreeSet<usize>,
}

/// The groups instances are drawn from; all have order at most 24.
pub fn group_menu() -> Vec<Arc<FiniteGroup>> {
    vec![
        FiniteGroup::trivial(),
        FiniteGroup::cyclic(2),
        FiniteGroup::cyclic(3),
        FiniteGroup::cyclic(4),
        FiniteGroup::cyclic(6),
        FiniteGroup::direct_cyclic(2, 2),
        FiniteGroup::direct_cyclic(2, 4),
        FiniteGroup::symmetric(3),
        FiniteGroup::dihedral(4),
        FiniteGroup::dihedral(6),
        FiniteGroup::symmetric(4),
    ]
}

/// One vertex orbit `G/K`, stored as cosets of `K`.
struct CosetOrbit {
    offset: usize,
    reps: Vec<usize>,
    coset_of: Vec<usize>,
}

impl CosetOrbit {
    fn new(group: &FiniteGroup, k: &Subgroup, offset: usize) -> Self {
        let mut coset_of = vec![usize::MAX; group.order()];
        let mut reps = Vec::new();
        for g in group.elements() {
            if coset_of[g] == usize::MAX {
                for &h in k.elements() {
                    coset_of[group.mul(g, h)] = reps.len();
                }
                reps.push(g);
            }
        }
        CosetOrbit { offset, reps, coset_of }
    }

    fn act(&self, group: &FiniteGroup, g: usize, c: usize) -> usize {
        self.coset_of[group.mul(g, self.reps[c])]
    }
}

/// A random G-tree with at most `max_vertices` vertices on which `group`
/// acts faithfully, or `None` if the attempt produced a non-faithful action.
///
/// The tree grows from a vertex fixed by `G` by repeatedly attaching a new
/// vertex orbit `G/K`, with `K` a subgroup of the stabilizer of an existing
/// vertex; edge orbits are then oriented at random and all indices shuffled.
pub fn random_gtree<R: Rng>(rng: &mut R, group: &Arc<FiniteGroup>, max_vertices: usize) -> Option<GGraph> {
    let subgroups = group.subgroups();
    let mut orbits = vec![CosetOrbit::new(group, &group.whole(), 0)];
    let mut parents: Vec<usize> = Vec::new();
    let mut stabilizers: Vec<Subgroup> = vec![group.whole()];
    let mut vertex_count = 1;
    let target = rng.gen_range(1..=max_vertices);
    let mut failures = 0;
    while vertex_count < target && failures < 20 {
        let parent = rng.gen_range(0..vertex_count);
        let options: Vec<&Subgroup> = subgroups.iter().filter(|k| k.is_subgroup_of(&stabilizers[parent])).collect();
        let k = (*options.choose(rng).expect("trivial subgroup")).clone();
        let size = group.order() / k.len();
        if vertex_count + size > target {
            failures += 1;
            continue;
        }
        let orbit = CosetOrbit::new(group, &k, vertex_count);
        for &g in &orbit.reps {
            stabilizers.push(k.conjugate(group, group.inv(g)));
        }
        vertex_count += size;
        orbits.push(orbit);
        parents.push(parent);
    }

    let mut owner = Vec::new();
    for (o, orbit) in orbits.iter().enumerate() {
        owner.extend((0..orbit.reps.len()).map(|c| (o, c)));
    }
    let vact = |g: usize, v: usize| {
        let (o, c) = owner[v];
        orbits[o].offset + orbits[o].act(group, g, c)
    };
    let vtable: Vec<Vec<usize>> = group.elements().map(|g| (0..vertex_count).map(|v| vact(g, v)).collect()).collect();
    if group.elements().any(|g| g != group.identity() && vtable[g].iter().enumerate().all(|(v, &w)| v == w)) {
        return None;
    }

    // Edge orbit o joins orbit o + 1 to its parent; edge indices follow vertex indices minus one.
    let edge_count = vertex_count - 1;
    let mut iota = vec![0; edge_count];
    let mut tau = vec![0; edge_count];
    for (o, orbit) in orbits.iter().enumerate().skip(1) {
        for (c, &g) in orbit.reps.iter().enumerate() {
            iota[orbit.offset + c - 1] = vact(g, parents[o - 1]);
            tau[orbit.offset + c - 1] = orbit.offset + c;
        }
    }
    let etable: Vec<Vec<usize>> = vtable.iter().map(|row| row[1..].iter().map(|&v| v - 1).collect()).collect();
    let vset = GSet::from_table(group, vertex_count, vtable).expect("coset action");
    let eset = GSet::from_table(group, edge_count, etable).expect("coset action");
    let tree = GGraph::new(vset, eset, iota, tau).expect("equivariant by construction");
    let mut flip = BTreeSet::new();
    for orbit in tree.edges().orbits() {
        if rng.gen_bool(0.5) {
            flip.extend(orbit);
        }
    }
    let tree = tree.reorient(&Orientation { flip }).expect("orbits are closed");
    let mut vperm: Vec<usize> = (0..vertex_count).collect();
    let mut eperm: Vec<usize> = (0..edge_count).collect();
    vperm.shuffle(rng);
    eperm.shuffle(rng);
    Some(tree.relabel(&vperm, &eperm).expect("permutations"))
}

/// A random G-retract of the vertex set: random orbits, then orbits added
/// until every remaining vertex is dominated.
pub fn random_retract<R: Rng>(rng: &mut R, t: &GGraph) -> BTreeSet<usize> {
    let vs = t.vertices();
    let orbits = vs.orbits();
    let p = rng.gen_range(0.1..0.9);
    let mut u: BTreeSet<usize> = BTreeSet::new();
    for orbit in &orbits {
        if rng.gen_bool(p) {
            u.extend(orbit.iter().copied());
        }
    }
    let stabs: Vec<Subgroup> = (0..t.vertex_count()).map(|v| t.vertex_stabilizer(v)).collect();
    loop {
        let bad = (0..t.vertex_count())
            .filter(|w| !u.contains(w))
            .find(|&w| !u.iter().any(|&x| stabs[w].is_subgroup_of(&stabs[x])));
        let Some(w) = bad else { break };
        let candidates: Vec<usize> = (0..t.vertex_count()).filter(|&v| stabs[w].is_subgroup_of(&stabs[v])).collect();
        let v = *candidates.choose(rng).expect("w itself qualifies");
        u.extend(vs.orbit(v).expect("vertex in range"));
    }
    u
}

/// A random instance with `|V| ≤ max_vertices` and a group from
/// [`group_menu`].
pub fn random_instance<R: Rng>(rng: &mut R, max_vertices: usize) -> Instance {
    let menu = group_menu();
    loop {
        let group = menu.choose(rng).expect("nonempty menu");
        if let Some(tree) = random_gtree(rng, group, max_vertices) {
            let u = random_retract(rng, &tree);
            return Instance { tree, u };
        }
    }
}

/// `count` instances from the seeded generator.
pub fn seeded_instances(seed: u64, count: usize, max_vertices: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, max_vertices)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, 40);
            let report = inst.tree.validate();
            assert!(report.is_tree && report.equivariant);
            assert!(inst.tree.vertex_count() <= 40);
            assert!(inst.tree.vertices().is_retract(&inst.u).unwrap().is_some());
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_instance(&mut ChaCha8Rng::seed_from_u64(3), 40);
        let b = random_instance(&mut ChaCha8Rng::seed_from_u64(3), 40);
        assert_eq!(a.tree, b.tree);
        assert_eq!(a.u, b.u);
    }
}
