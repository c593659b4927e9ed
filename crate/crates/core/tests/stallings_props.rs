use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use treeretract::stallings::{fold, fold_with_priority, CoreGraph, LabeledGraph};
use treeretract::words::{power_word, Alphabet, Letter, Word};

fn word(min: usize, max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..2usize, any::<bool>()), min..=max)
        .prop_map(|ls| Word::from_letters(&Alphabet::xy(), ls.into_iter().map(|(g, i)| Letter::new(g, i))).unwrap())
}

fn generators() -> impl Strategy<Value = Vec<Word>> {
    prop::collection::vec(word(1, 6), 1..=3)
}

fn all_words(alphabet: &Arc<Alphabet>, n: usize) -> Vec<Word> {
    let mut out = vec![Word::identity(alphabet)];
    let mut frontier = out.clone();
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..alphabet.size() {
                for inv in [false, true] {
                    let v = Word::from_letters(alphabet, w.letters().iter().copied().chain([Letter::new(g, inv)])).unwrap();
                    if v.len() == w.len() + 1 {
                        next.push(v);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Permutation image of a word under `x ↦ px`, `y ↦ py`, acting on the right.
fn perm_image(w: &Word, perms: &[Vec<usize>; 2]) -> Vec<usize> {
    let n = perms[0].len();
    let inverse = |p: &Vec<usize>| {
        let mut q = vec![0; n];
        for (i, &j) in p.iter().enumerate() {
            q[j] = i;
        }
        q
    };
    let invs = [inverse(&perms[0]), inverse(&perms[1])];
    let mut acc: Vec<usize> = (0..n).collect();
    for l in w.letters() {
        let p = if l.sign() > 0 { &perms[l.generator] } else { &invs[l.generator] };
        acc = acc.iter().map(|&i| p[i]).collect();
    }
    acc
}

/// Closure of the images of the generators under composition.
fn perm_subgroup(gens: &[Vec<usize>], n: usize) -> BTreeSet<Vec<usize>> {
    let mut set = BTreeSet::from([(0..n).collect::<Vec<_>>()]);
    let mut frontier: Vec<Vec<usize>> = set.iter().cloned().collect();
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q: Vec<usize> = p.iter().map(|&i| g[i]).collect();
            if set.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    set
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn products_of_generators_are_members(gens in generators(), picks in prop::collection::vec((0..3usize, any::<bool>()), 0..6)) {
        let core = CoreGraph::from_generators(&Alphabet::xy(), &gens).unwrap();
        let mut w = Word::identity(&Alphabet::xy());
        for (i, inv) in picks {
            let g = &gens[i % gens.len()];
            w = w.multiply(&if inv { g.inverse() } else { g.clone() }).unwrap();
        }
        prop_assert!(core.contains(&w).unwrap());
    }

    #[test]
    fn membership_respects_finite_quotients(gens in generators(), w in word(0, 10), px in permutation(5), py in permutation(5)) {
        let core = CoreGraph::from_generators(&Alphabet::xy(), &gens).unwrap();
        let perms = [px, py];
        let images: Vec<Vec<usize>> = gens.iter().map(|g| perm_image(g, &perms)).collect();
        let quotient = perm_subgroup(&images, 5);
        if core.contains(&w).unwrap() {
            prop_assert!(quotient.contains(&perm_image(&w, &perms)));
        }
    }

    #[test]
    fn fold_order_is_irrelevant(gens in generators(), priority_seed in any::<u64>()) {
        let graph = LabeledGraph::wedge(&Alphabet::xy(), &gens).unwrap();
        let mut priority: Vec<usize> = (0..graph.vertex_count).collect();
        let mut s = priority_seed;
        for i in (1..priority.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            priority.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = fold(&graph);
        let b = fold_with_priority(&graph, &priority);
        prop_assert!(b.is_folded());
        prop_assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn census_matches_brute_force(gens in generators(), w in word(1, 6)) {
        let (w, _) = w.cyclic_reduce();
        prop_assume!(!w.is_empty());
        census_oracle(&gens, &w)?;
    }
}

/// For cyclically reduced `w` and every `g` with `|g| ≤ 3`: `gwg⁻¹ ∈ H` iff
/// reading `g` from the base lands on a census vertex.
fn census_oracle(gens: &[Word], w: &Word) -> Result<(), TestCaseError> {
    let core = CoreGraph::from_generators(&Alphabet::xy(), gens).unwrap();
    let census = core.closed_path_vertices(w).unwrap();
    for g in all_words(&Alphabet::xy(), 3) {
        let conj = g.multiply(w).unwrap().multiply(&g.inverse()).unwrap();
        let member = core.contains(&conj).unwrap();
        let landed = core.read(core.base(), &g).is_some_and(|v| census.contains(&v));
        prop_assert_eq!(member, landed, "g = {}, w = {}", g, w);
    }
    Ok(())
}

#[test]
fn census_oracle_on_example_subgroups() {
    let xy = Alphabet::xy();
    for gens in ["x^2,y^2", "x^4,xyx,y^4"] {
        let gens = Word::parse_list(&xy, gens).unwrap();
        for n in 0..=2 {
            census_oracle(&gens, &power_word(n, 1)).unwrap();
        }
    }
}

#[test]
fn example_core_sizes() {
    let xy = Alphabet::xy();
    let a = CoreGraph::from_generators(&xy, &Word::parse_list(&xy, "x^2,y^2").unwrap()).unwrap();
    assert_eq!((a.vertex_count(), a.edges().len()), (3, 4));
    let b = CoreGraph::from_generators(&xy, &Word::parse_list(&xy, "x^4,xyx,y^4").unwrap()).unwrap();
    assert_eq!((b.vertex_count(), b.edges().len()), (7, 9));
}
