use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treeretract::ggraph::{GGraph, GraphError, Orientation};
use treeretract::random::random_instance;

fn tree_from_seed(seed: u64, max_vertices: usize) -> (GGraph, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = random_instance(&mut rng, max_vertices).tree;
    (tree, rng)
}

fn slidable_pairs(t: &GGraph) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for e in 0..t.edge_count() {
        let orbit = t.edges().orbit(e).unwrap();
        for f in 0..t.edge_count() {
            if t.tau(e) == t.iota(f) && !orbit.contains(&f) && t.edge_stabilizer(e).is_subgroup_of(&t.edge_stabilizer(f)) {
                out.push((e, f));
            }
        }
    }
    out
}

/// All edges pointed at a vertex fixed by the whole group.
fn oriented_to_root(t: &GGraph) -> GGraph {
    let root = (0..t.vertex_count()).find(|&v| t.vertices().orbit(v).unwrap().len() == 1).expect("generator keeps a fixed root");
    let depth = |v: usize| t.geodesic(root, v).unwrap().len();
    let flip: BTreeSet<usize> = (0..t.edge_count()).filter(|&e| depth(t.tau(e)) > depth(t.iota(e))).collect();
    t.reorient(&Orientation { flip }).unwrap()
}

fn check_slide(t: &GGraph, e: usize, f: usize, s: &GGraph) -> Result<(), TestCaseError> {
    let report = s.validate();
    prop_assert!(report.is_tree && report.equivariant);
    prop_assert_eq!(s.vertices(), t.vertices());
    prop_assert_eq!(s.edges(), t.edges());
    prop_assert_eq!(s.iota_map(), t.iota_map());
    let orbit = t.edges().orbit(e).unwrap();
    for x in 0..t.edge_count() {
        if orbit.contains(&x) {
            let g = t.edges().transporter(e, x).unwrap();
            prop_assert_eq!(s.tau(x), t.tau(t.edges().act(g, f)));
        } else {
            prop_assert_eq!(s.tau(x), t.tau(x));
        }
    }
    Ok(())
}

fn check_compress(t: &GGraph, keep: &BTreeSet<usize>) -> Result<(), TestCaseError> {
    let (c, map) = t.compress(keep).unwrap();
    let report = c.validate();
    prop_assert!(report.is_tree && report.equivariant);
    let collapsed = t.edge_count() - keep.len();
    prop_assert_eq!(c.vertex_count(), t.vertex_count() - collapsed);
    prop_assert_eq!(&map.edge_origin, &keep.iter().copied().collect::<Vec<_>>());
    let phi = map.phi();
    for (new, &old) in map.edge_origin.iter().enumerate() {
        prop_assert_eq!(c.iota(new), phi[t.iota(old)]);
        prop_assert_eq!(c.tau(new), phi[t.tau(old)]);
        prop_assert_eq!(c.edge_stabilizer(new), t.edge_stabilizer(old));
    }
    for e in (0..t.edge_count()).filter(|e| !keep.contains(e)) {
        prop_assert_eq!(map.sink_of[t.iota(e)], map.sink_of[t.tau(e)]);
    }
    for (new, &old) in map.vertex_origin.iter().enumerate() {
        prop_assert_eq!(map.sink_of[old], old);
        prop_assert_eq!(c.vertex_stabilizer(new), t.vertex_stabilizer(old));
    }
    for g in t.group().elements() {
        for v in 0..t.vertex_count() {
            prop_assert_eq!(map.sink_of[t.vertices().act(g, v)], t.vertices().act(g, map.sink_of[v]));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn slides_preserve_contracts(seed in any::<u64>()) {
        let (mut t, mut rng) = tree_from_seed(seed, 30);
        for _ in 0..5 {
            let pairs = slidable_pairs(&t);
            let Some(&(e, f)) = pairs.choose(&mut rng) else { break };
            let s = t.slide(e, f).unwrap();
            check_slide(&t, e, f, &s)?;
            t = s;
        }
    }

    #[test]
    fn compress_toward_root(seed in any::<u64>()) {
        let (t, mut rng) = tree_from_seed(seed, 30);
        let t = oriented_to_root(&t);
        let orbits = t.edges().orbits();
        for _ in 0..5 {
            let p = rng.gen_range(0.0..1.0);
            let keep: BTreeSet<usize> = orbits.iter().filter(|_| rng.gen_bool(p)).flatten().copied().collect();
            check_compress(&t, &keep)?;
        }
    }

    #[test]
    fn compress_rejects_exactly_sinkless(seed in any::<u64>()) {
        let (t, mut rng) = tree_from_seed(seed, 20);
        let orbits = t.edges().orbits();
        let keep: BTreeSet<usize> = orbits.iter().filter(|_| rng.gen_bool(0.5)).flatten().copied().collect();
        // A component has a sink iff no vertex has two collapsed outgoing edges.
        let mut out_degree = vec![0; t.vertex_count()];
        for e in (0..t.edge_count()).filter(|e| !keep.contains(e)) {
            out_degree[t.iota(e)] += 1;
        }
        let expected_ok = out_degree.iter().all(|&d| d <= 1);
        match t.compress(&keep) {
            Ok(_) => prop_assert!(expected_ok),
            Err(GraphError::NoSink(_)) => prop_assert!(!expected_ok),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn subdivide_then_compress_round_trip(seed in any::<u64>()) {
        let (t, mut rng) = tree_from_seed(seed, 30);
        prop_assume!(t.edge_count() > 0);
        let f = rng.gen_range(0..t.edge_count());
        let (s, sub) = t.subdivide(f).unwrap();
        let report = s.validate();
        prop_assert!(report.is_tree && report.equivariant);
        prop_assert_eq!(s.vertex_count(), t.vertex_count() + sub.subdivided.len());
        let keep: BTreeSet<usize> = (0..s.edge_count()).filter(|e| !sub.subdivided.contains(e)).collect();
        let (c, map) = s.compress(&keep).unwrap();
        let mut eperm = vec![0; c.edge_count()];
        for (new, &old) in map.edge_origin.iter().enumerate() {
            eperm[new] = match sub.first_halves.iter().position(|&h| h == old) {
                Some(i) => sub.subdivided[i],
                None => old,
            };
        }
        prop_assert_eq!(&map.vertex_origin, &(0..t.vertex_count()).collect::<Vec<_>>());
        prop_assert_eq!(c.relabel(&map.vertex_origin, &eperm).unwrap(), t);
    }
}
