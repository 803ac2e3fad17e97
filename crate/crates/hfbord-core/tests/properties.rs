//! Randomized invariants for the linear algebra and serialization layers.

use proptest::prelude::*;

use hfbord_core::algebra::{Basis, Idem, BASIS};
use hfbord_core::bimod::InputPattern;
use hfbord_core::f2::{homology, BitMatrix, BitVec};
use hfbord_core::typed::{Arrow, DGen, TypeDModule};

fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::bool::ANY, r * c).prop_map(move |bits| {
            let mut m = BitMatrix::zero(r, c);
            for (i, b) in bits.iter().enumerate() {
                if *b {
                    m.insert(i / c, i % c);
                }
            }
            m
        })
    })
}

proptest! {
    #[test]
    fn rank_equals_transpose_rank(m in arb_matrix(7)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn solve_solutions_multiply_back(m in arb_matrix(6), bits in proptest::collection::vec(proptest::bool::ANY, 6)) {
        let b = {
            let mut v = BitVec::zeros(m.rows());
            for (i, bit) in bits.iter().take(m.rows()).enumerate() {
                if *bit {
                    v.set(i, true);
                }
            }
            v
        };
        if let Some(x) = m.solve(&b).unwrap() {
            prop_assert_eq!(m.apply(&x), b);
        }
    }

    #[test]
    fn sparse_rank_agrees_with_dense(m in arb_matrix(7)) {
        prop_assert_eq!(m.rank(), m.clone().with_dense_cap(1).rank());
    }

    #[test]
    fn homology_dimension_invariant_under_basis_permutation(
        d_out in arb_matrix(6),
        perm_seed in 0u64..10_000,
    ) {
        // Middle space dimension = columns of d_out; take d_in = 0 so the
        // complex condition is automatic, then permute the middle basis.
        let n = d_out.cols();
        let d_in = BitMatrix::zero(n, 0);
        let base = homology(&d_in, &d_out).unwrap().dim;
        // A deterministic pseudo-permutation from the seed.
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (s >> 33) as usize % (i + 1);
            order.swap(i, j);
        }
        let mut permuted = BitMatrix::zero(d_out.rows(), n);
        for (r, c) in d_out.entries() {
            permuted.insert(r, order[c]);
        }
        let permuted_dim = homology(&BitMatrix::zero(n, 0), &permuted).unwrap().dim;
        prop_assert_eq!(base, permuted_dim);
    }

    #[test]
    fn star_patterns_match_their_family(reps in 0usize..6) {
        let p = InputPattern::from_parts(&[Basis::R2], true, &[Basis::R1]).unwrap();
        let mut seq = vec![Basis::R2];
        seq.extend(std::iter::repeat(Basis::R12).take(reps));
        seq.push(Basis::R1);
        prop_assert!(p.match_parity(&seq));
        seq.push(Basis::R1);
        prop_assert!(!p.match_parity(&seq));
    }
}

fn arb_typed_module() -> impl Strategy<Value = TypeDModule> {
    (1usize..=5).prop_flat_map(|n| {
        let idems = proptest::collection::vec(proptest::bool::ANY, n);
        let arrows = proptest::collection::vec((0..n, 0..8usize, 0..n), 0..8);
        (idems, arrows).prop_map(move |(idems, raw)| {
            let gens: Vec<DGen> = idems
                .iter()
                .enumerate()
                .map(|(i, &b)| DGen::new(format!("g{i}"), if b { Idem::I1 } else { Idem::I0 }))
                .collect();
            let mut arrows_ok = Vec::new();
            for (f, bi, t) in raw {
                let coef = BASIS[bi];
                let (l, r) = coef.idempotents();
                if gens[f].idem == l && gens[t].idem == r {
                    arrows_ok.push(Arrow { from: f, coef, to: t });
                }
            }
            TypeDModule::new(gens, arrows_ok).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn typed_json_round_trip_is_canonical(m in arb_typed_module()) {
        let s = m.to_json();
        let back = TypeDModule::from_json(&s).unwrap();
        prop_assert_eq!(back.to_json(), s);
        prop_assert_eq!(back, m.canonicalize());
    }
}
