mod common;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use pca2::primitives::io::{kernel_hash, kernel_to_json, parse_kernel_json};
use pca2::primitives::scalar::rat;
use pca2::{DihedralElement, Error, Scalar, TransitionKernel};

use DihedralElement as G;

fn entries_strategy(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    // Rows are normalised weights; half the tables get one entry nudged off
    // the simplex.
    let rows = prop::collection::vec(prop::collection::vec(0i64..5, n), n * n * n);
    let nudge = prop::option::of((0..n * n * n * n, -2i64..=2));
    (rows, nudge).prop_map(move |(rows, nudge)| {
        let mut out = Vec::new();
        for w in rows {
            let total: i64 = w.iter().sum::<i64>().max(1);
            out.extend(w.iter().map(|&x| rat(x, total)));
        }
        if let Some((i, k)) = nudge {
            out[i] += rat(k, 7);
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_new_accepts_exactly_the_stochastic_tables(
        (n, entries) in (2usize..=3).prop_flat_map(|n| (Just(n), entries_strategy(n)))
    ) {
        let valid = entries.iter().all(|x| !x.is_negative())
            && entries.chunks(n).all(|r| r.iter().sum::<Scalar>() == Scalar::one());
        let built = TransitionKernel::new(n, entries.clone());
        prop_assert_eq!(built.is_ok(), valid);
        if let Ok(t) = built {
            prop_assert_eq!(t.entries(), &entries[..]);
            prop_assert_eq!(t.positive_rates(), entries.iter().all(|x| *x > Scalar::zero()));
        }
    }

    #[test]
    fn kernel_new_rejects_wrong_lengths(n in 2usize..=3, extra in 1usize..5, shorter in any::<bool>()) {
        let len = if shorter { n.pow(4) - extra } else { n.pow(4) + extra };
        let err = TransitionKernel::new(n, vec![rat(1, n as i64); len]).unwrap_err();
        prop_assert_eq!(err, Error::WrongLength { expected: n.pow(4), got: len });
    }

    #[test]
    fn kernel_files_round_trip(weights in prop::collection::vec(1i64..20, 81)) {
        let t = common::weighted_kernel(3, &weights);
        let text = kernel_to_json(&t, None);
        let (back, p) = parse_kernel_json(&text).unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert!(p.is_none());
        prop_assert_eq!(kernel_hash(&back), kernel_hash(&t));
    }

    #[test]
    fn action_is_a_left_action(gi in 0usize..8, hi in 0usize..8, x in prop::array::uniform4(0u8..5)) {
        let (g, h) = (G::ALL[gi], G::ALL[hi]);
        prop_assert_eq!(g.compose(h).apply(x), g.apply(h.apply(x)));
        prop_assert_eq!(g.inverse().apply(g.apply(x)), x);
    }
}

#[test]
fn dihedral_group_laws() {
    for g in G::ALL {
        assert_eq!(g.compose(g.inverse()), G::Id);
        assert_eq!(g.inverse().compose(g), G::Id);
        for h in G::ALL {
            for k in G::ALL {
                assert_eq!(g.compose(h).compose(k), g.compose(h.compose(k)));
            }
        }
    }
    // Presentation <r, v | r^4 = v^2 = 1, v r v = r^-1>.
    let r4 = G::R.compose(G::R).compose(G::R).compose(G::R);
    assert_eq!(r4, G::Id);
    assert_eq!(G::V.compose(G::V), G::Id);
    assert_eq!(G::V.compose(G::R).compose(G::V), G::R3);
    assert_eq!(DihedralElement::closure(&[G::R, G::V]).len(), 8);
    let rotations: Vec<G> = (0..4)
        .map(|k| (0..k).fold(G::Id, |acc, _| acc.compose(G::R)))
        .collect();
    assert_eq!(rotations, vec![G::Id, G::R, G::R2, G::R3]);
    let reflections = [G::V, G::H, G::RV, G::R3V];
    for s in reflections {
        assert_eq!(s.compose(s), G::Id);
        assert_ne!(s, G::Id);
    }
    assert_eq!(G::R.apply(['a', 'b', 'c', 'd']), ['d', 'a', 'b', 'c']);
}
