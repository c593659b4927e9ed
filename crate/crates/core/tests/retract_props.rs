use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treeretract::random::random_instance;
use treeretract::retract::{build_filtration, check_filtration, check_output, retract_tree, RetractState};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn retraction_is_equivariant_idempotent(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 30);
        let out = retract_tree(&inst.tree, &inst.u).unwrap();
        prop_assert_eq!(check_output(&inst.tree, &inst.u, &out), Ok(()));
        let vs = inst.tree.vertices();
        let r = &out.compression.sink_of;
        for v in 0..inst.tree.vertex_count() {
            prop_assert!(inst.u.contains(&r[v]));
            prop_assert_eq!(r[r[v]], r[v]);
            for g in inst.tree.group().elements() {
                prop_assert_eq!(r[vs.act(g, v)], vs.act(g, r[v]));
            }
        }
    }

    #[test]
    fn filtration_is_valid(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 30);
        let f = build_filtration(&inst.tree, &inst.u).unwrap();
        prop_assert_eq!(check_filtration(&inst.tree, &inst.u, &f), Ok(()));
        for w in 0..inst.tree.vertex_count() {
            prop_assert_eq!(f.vertex_deg[w] == 0, inst.u.contains(&w));
        }
    }

    #[test]
    fn elimination_clears_problems(seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), 30);
        let mut state = RetractState::new(inst.tree.clone(), inst.u.clone()).unwrap();
        state.eliminate_problematic().unwrap();
        prop_assert!(state.problematic().unwrap().vertices.is_empty());
        prop_assert!(state.tree.validate().is_tree);
        prop_assert_eq!(state.tree.vertices(), inst.tree.vertices());
        prop_assert_eq!(state.tree.edges(), inst.tree.edges());
    }
}
