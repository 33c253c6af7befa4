//! Property tests for the Pauli algebra and spectral invariants.

use gadgetforge::pauli::{
    commutes, multiply, projector_term, Axis, OperatorSum, PauliString, PauliTerm,
};
use gadgetforge::spectral::{hermitian_eigenvalues, spectral_error_ops};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn axis_strategy() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]
}

/// Random Pauli string on up to `n` qubits (possibly identity).
fn string_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(axis_strategy(), 0..=n).prop_map(move |axes| {
        // mask-free: qubit q carries axes[q]; subsequence selection comes from
        // the random vector length and a per-qubit keep flag below
        PauliString::new(axes.into_iter().enumerate().collect()).unwrap()
    })
}

fn sparse_string_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec((0..n, axis_strategy()), 0..=n).prop_map(|factors| {
        let mut seen = std::collections::BTreeMap::new();
        for (q, ax) in factors {
            seen.entry(q).or_insert(ax);
        }
        PauliString::new(seen.into_iter().collect()).unwrap()
    })
}

fn terms_strategy(n: usize, max_terms: usize) -> impl Strategy<Value = Vec<PauliTerm>> {
    prop::collection::vec((sparse_string_strategy(n), -2.0f64..2.0), 0..=max_terms)
        .prop_map(|v| v.into_iter().map(|(s, c)| PauliTerm::new(c, s)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_matrix_product(a in string_strategy(4), b in string_strategy(4)) {
        let n = 4;
        let (phase, prod) = multiply(&a, &b);
        let ma = OperatorSum::single(n, 1.0, a).unwrap().to_matrix().unwrap();
        let mb = OperatorSum::single(n, 1.0, b).unwrap().to_matrix().unwrap();
        let mp = OperatorSum::single(n, 1.0, prod).unwrap().to_matrix().unwrap();
        let lhs = &ma * &mb;
        let rhs = mp * phase.as_complex();
        // integer-valued entries: the products agree exactly
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn realization_is_hermitian(terms in terms_strategy(4, 6)) {
        let op = OperatorSum::from_terms(4, terms).unwrap();
        let m = op.to_matrix().unwrap();
        let adj = m.adjoint();
        prop_assert!((m - adj).iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn canonicalization_is_order_insensitive(terms in terms_strategy(3, 8), seed in 0u64..1000) {
        let canonical = OperatorSum::from_terms(3, terms.clone()).unwrap();
        // deterministic pseudo-shuffle of the input terms
        let mut shuffled = terms;
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let reshuffled = OperatorSum::from_terms(3, shuffled).unwrap();
        prop_assert_eq!(&canonical, &reshuffled);
        // idempotence
        let again = OperatorSum::from_terms(3, canonical.terms().to_vec()).unwrap();
        prop_assert_eq!(&canonical, &again);
    }

    #[test]
    fn locality_bounds(ta in terms_strategy(4, 5), tb in terms_strategy(4, 5)) {
        let a = OperatorSum::from_terms(4, ta).unwrap();
        let b = OperatorSum::from_terms(4, tb).unwrap();
        prop_assert!(a.locality() <= a.n_qubits());
        let sum = a.add(&b).unwrap();
        prop_assert!(sum.locality() <= a.locality().max(b.locality()));
    }

    #[test]
    fn spectral_error_shift_invariant(terms in terms_strategy(2, 4), shift in -3.0f64..3.0) {
        // build a small "gadget" (the operator itself on 2 qubits + 1 idle
        // ancilla) and verify adding c I to both sides changes nothing
        let target = OperatorSum::from_terms(2, terms).unwrap();
        let big = target.embedded(3).unwrap();
        let r1 = spectral_error_ops(&big, 2, &target).unwrap();
        let shifted_big = big.add(&OperatorSum::identity(3, shift)).unwrap();
        let shifted_target = target.add(&OperatorSum::identity(2, shift)).unwrap();
        let r2 = spectral_error_ops(&shifted_big, 2, &shifted_target).unwrap();
        prop_assert!((r1.max_error - r2.max_error).abs() < 1e-9);
    }
}

#[test]
fn commutes_matches_matrix_commutator_exhaustively() {
    // all pairs of strings on 3 qubits
    let axes = [None, Some(Axis::X), Some(Axis::Y), Some(Axis::Z)];
    let mut strings = Vec::new();
    for a0 in axes {
        for a1 in axes {
            for a2 in axes {
                let mut f = Vec::new();
                if let Some(ax) = a0 {
                    f.push((0usize, ax));
                }
                if let Some(ax) = a1 {
                    f.push((1usize, ax));
                }
                if let Some(ax) = a2 {
                    f.push((2usize, ax));
                }
                strings.push(PauliString::new(f).unwrap());
            }
        }
    }
    assert_eq!(strings.len(), 64);
    let mats: Vec<DMatrix<Complex64>> = strings
        .iter()
        .map(|s| {
            OperatorSum::single(3, 1.0, s.clone())
                .unwrap()
                .to_matrix()
                .unwrap()
        })
        .collect();
    for (i, a) in strings.iter().enumerate() {
        for (j, b) in strings.iter().enumerate() {
            let comm = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            let zero = comm.iter().all(|c| c.norm() == 0.0);
            assert_eq!(
                commutes(a, b),
                zero,
                "strings {} and {} disagree with the matrix commutator",
                a,
                b
            );
        }
    }
}

#[test]
fn penalty_multiplicities_are_binomial() {
    // for m ancillas, level h*Delta has multiplicity C(m,h) * 2^(system)
    let n_sys = 2usize;
    let delta = 9.0;
    for m in 1..=3usize {
        let n = n_sys + m;
        let mut h = OperatorSum::zero(n);
        for a in 0..m {
            h = h
                .add(&projector_term(n, n_sys + a, 1).unwrap().scale(delta))
                .unwrap();
        }
        let ev = hermitian_eigenvalues(&h).unwrap();
        for k in 0..=m {
            let level = k as f64 * delta;
            let count = ev.iter().filter(|&&l| (l - level).abs() < 1e-9).count();
            let binom = (1..=m).product::<usize>()
                / ((1..=k).product::<usize>().max(1) * (1..=m - k).product::<usize>().max(1));
            assert_eq!(count, binom * (1 << n_sys), "m={} k={}", m, k);
        }
    }
}

#[test]
fn spectral_report_stable_under_qubit_permutation() {
    use gadgetforge::gadgets::{build_subdivision_gadget, subdivision_delta_bound};
    use gadgetforge::TargetSpec;

    let target = TargetSpec::new(
        {
            let x0 = OperatorSum::single(2, 0.3, PauliString::single(0, Axis::X)).unwrap();
            let z1 = OperatorSum::single(2, -0.2, PauliString::single(1, Axis::Z)).unwrap();
            x0.add(&z1).unwrap()
        },
        vec![(
            0.8,
            vec![
                PauliString::single(0, Axis::Z),
                PauliString::single(1, Axis::Z),
            ],
        )],
    )
    .unwrap();
    let delta = subdivision_delta_bound(0.8, 0.5, 0.05).unwrap();
    let g = build_subdivision_gadget(&target, delta).unwrap();
    let top = target.operator().unwrap();
    let base = g.spectral_error(&top).unwrap();

    // permute system qubits 0 <-> 1 in both gadget and target (ancilla fixed)
    let perm = vec![1usize, 0, 2];
    let permuted_total = g.total.permute_qubits(&perm).unwrap();
    let permuted_target = top.permute_qubits(&[1usize, 0]).unwrap();
    let permuted = spectral_error_ops(&permuted_total, 2, &permuted_target).unwrap();
    for (a, b) in base.per_level_error.iter().zip(&permuted.per_level_error) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!((base.max_error - permuted.max_error).abs() < 1e-9);
}
