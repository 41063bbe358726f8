use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use prym_core::cover::RestrictTo;
use prym_core::matroid::{simplify, subsets_of_size, Mask, SignedMatroid};
use prym_core::random::{random_cover, CoverShape};
use prym_core::{DoubleCover, EdgeSet};

fn cover(seed: u64, max_edges: usize) -> DoubleCover {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_cover(&mut rng, &CoverShape { max_edges, ..CoverShape::default() })
}

fn edge_set(m: &SignedMatroid<'_>, mask: Mask) -> EdgeSet {
    m.edges_of(mask).into_iter().collect()
}

/// `F` is independent in `M*` iff removing it leaves every component with a
/// connected preimage, i.e. the total graph of `G ∖ F` has as many
/// components as `G ∖ F`.
fn dual_independent_by_total_graph(c: &DoubleCover, f: &EdgeSet) -> bool {
    let r = c.restrict(f, RestrictTo::Complement).cover;
    let total = r.build_total_graph();
    total.graph.component_map(|_| true).1 == r.base().component_map(|_| true).1
}

fn all_masks(m: &SignedMatroid<'_>) -> impl Iterator<Item = Mask> {
    0..=m.full_mask()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dual_independence_matches_total_graph_oracle(seed in any::<u64>()) {
        let c = cover(seed, 6);
        let m = SignedMatroid::new(&c).unwrap();
        for mask in all_masks(&m) {
            prop_assert_eq!(m.is_independent_dual_mask(mask), dual_independent_by_total_graph(&c, &edge_set(&m, mask)));
        }
    }

    #[test]
    fn independence_routes_of_m_agree(seed in any::<u64>()) {
        let c = cover(seed, 6);
        let m = SignedMatroid::new(&c).unwrap();
        for mask in all_masks(&m) {
            prop_assert_eq!(m.is_independent_mask(mask), m.is_independent(&edge_set(&m, mask)).unwrap());
        }
    }

    #[test]
    fn dual_matroid_axioms(seed in any::<u64>()) {
        let c = cover(seed, 6);
        let m = SignedMatroid::new(&c).unwrap();
        let n = m.ground().len();
        let independent: Vec<Mask> = all_masks(&m).filter(|&f| m.is_independent_dual_mask(f)).collect();
        prop_assert!(independent.contains(&0));
        for &f in &independent {
            for i in (0..n).filter(|i| f & (1 << i) != 0) {
                prop_assert!(m.is_independent_dual_mask(f & !(1 << i)), "hereditary");
            }
        }
        for &a in &independent {
            for &b in independent.iter().filter(|b| b.count_ones() > a.count_ones()) {
                let grows = (0..n).any(|i| b & !a & (1 << i) != 0 && m.is_independent_dual_mask(a | (1 << i)));
                prop_assert!(grows, "exchange");
            }
        }
        let rank = independent.iter().map(|f| f.count_ones() as usize).max().unwrap();
        prop_assert_eq!(rank, m.rank());
        prop_assert_eq!(rank, c.total_genus() - c.genus());
    }

    #[test]
    fn bases_of_m_are_complements_of_ogods(seed in any::<u64>()) {
        let c = cover(seed, 6);
        let m = SignedMatroid::new(&c).unwrap();
        let n = m.ground().len();
        prop_assert_eq!(m.rank() + m.rank_m(), n);
        let mut from_m: Vec<Mask> = subsets_of_size(n, m.rank_m()).filter(|&b| m.is_independent_mask(b)).collect();
        let mut from_dual: Vec<Mask> = m.ogods().iter().map(|f| m.full_mask() & !f.mask).collect();
        from_m.sort_unstable();
        from_dual.sort_unstable();
        prop_assert_eq!(from_m, from_dual);
    }

    #[test]
    fn index_is_monotone_bounded_and_continuous(seed in any::<u64>()) {
        let c = cover(seed, 6);
        let m = SignedMatroid::new(&c).unwrap();
        let n = m.ground().len();
        for f in all_masks(&m).filter(|&f| m.is_independent_dual_mask(f)) {
            let ind = m.index_mask(f).unwrap();
            prop_assert!(ind <= m.rank() + 1);
            prop_assert!(ind <= f.count_ones() as usize + 1);
            for i in (0..n).filter(|i| f & (1 << i) != 0) {
                prop_assert!(m.index_mask(f & !(1 << i)).unwrap() <= ind);
            }
        }
        let d = m.dilation_index();
        for a in m.ogods() {
            prop_assert!(a.index >= d);
            for b in m.ogods() {
                if (a.mask ^ b.mask).count_ones() == 2 {
                    prop_assert!(a.index.abs_diff(b.index) <= 1);
                }
            }
        }
        prop_assert_eq!(m.ogods().iter().map(|f| f.index).min(), Some(d));
    }

    #[test]
    fn every_circuit_has_exactly_one_type(seed in any::<u64>()) {
        let c = cover(seed, 8);
        let m = SignedMatroid::new(&c).unwrap();
        for circuit in m.circuits().unwrap() {
            prop_assert!(!m.is_independent_mask(circuit.mask));
            for e in m.edges_of(circuit.mask) {
                let bit = m.mask_of(&[e].into_iter().collect()).unwrap();
                prop_assert!(m.is_independent_mask(circuit.mask & !bit));
            }
            prop_assert_eq!(m.classify(circuit.mask).unwrap(), circuit.kind);
        }
    }

    #[test]
    fn simplification_is_simple_and_keeps_dilation_index(seed in any::<u64>()) {
        let c = cover(seed, 8);
        let m = SignedMatroid::new(&c).unwrap();
        let s = simplify(&c).unwrap();
        let ms = SignedMatroid::new(&s.cover).unwrap();
        let (loops, pairs) = ms.circuits_dual_small().unwrap();
        prop_assert!(loops.is_empty() && pairs.is_empty());
        prop_assert_eq!(ms.dilation_index(), m.dilation_index());
        prop_assert_eq!(ms.rank(), m.rank());
        // Parallel classes of M* collapse to single edges and its loops disappear.
        let (loops, _) = m.circuits_dual_small().unwrap();
        let n = m.ground().len();
        let nonloops: Vec<usize> = (0..n).filter(|&i| m.is_independent_dual_mask(1 << i)).collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &i in &nonloops {
            match classes.iter_mut().find(|k| !m.is_independent_dual_mask((1 << k[0]) | (1 << i))) {
                Some(k) => k.push(i),
                None => classes.push(vec![i]),
            }
        }
        prop_assert_eq!(ms.ground().len(), classes.len());
        prop_assert_eq!(nonloops.len() + loops.len(), n);
    }
}

#[test]
fn subsets_of_size_counts_binomials() {
    for n in 0..10 {
        for k in 0..=n {
            let count = subsets_of_size(n, k).count();
            let binomial = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
            assert_eq!(count, binomial);
        }
    }
}
