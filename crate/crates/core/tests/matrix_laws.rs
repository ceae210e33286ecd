use cluster_core::canon::canonical_key_of_matrix;
use cluster_core::{ExchangeMatrix, Quiver};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use proptest::prelude::*;

fn skew(n: usize, upper: &[i64]) -> ExchangeMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    let mut it = upper.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = *it.next().unwrap();
            rows[i][j] = v;
            rows[j][i] = -v;
        }
    }
    ExchangeMatrix::from_i64_rows(&rows).unwrap()
}

fn matrix(max_n: usize, bound: i64) -> impl Strategy<Value = ExchangeMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-bound..=bound, n * (n - 1) / 2).prop_map(move |u| skew(n, &u))
    })
}

/// The halved formula, written out without sign cases.
fn halved(b: &ExchangeMatrix, k: usize) -> Result<Vec<Vec<BigInt>>, String> {
    let n = b.n();
    let mut out = vec![vec![BigInt::from(0); n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b.get(i, j)
            } else {
                let num = b.get(i, k).abs() * b.get(k, j) + b.get(i, k) * b.get(k, j).abs();
                if num.is_odd() {
                    return Err(format!("odd numerator at ({i},{j})"));
                }
                b.get(i, j) + num / 2
            };
        }
    }
    Ok(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mutation_matches_halved_formula(b in matrix(8, 5)) {
        for k in 0..b.n() {
            let m = b.mutate(k).unwrap();
            prop_assert_eq!(m.to_rows(), halved(&b, k).unwrap());
        }
    }

    #[test]
    fn mutation_is_skew_symmetric_involution(b in matrix(8, 5)) {
        for k in 0..b.n() {
            let m = b.mutate(k).unwrap();
            prop_assert!(m.validate().is_ok());
            prop_assert_eq!(m.mutate(k).unwrap(), b.clone());
        }
    }

    #[test]
    fn restriction_commutes_with_mutation(b in matrix(8, 5)) {
        let n = b.n();
        for k in 0..n {
            let m = b.mutate(k).unwrap();
            for i in 0..n {
                for j in (i + 1)..n {
                    if i == k || j == k {
                        continue;
                    }
                    let mut vs = vec![i, j, k];
                    vs.sort_unstable();
                    let pos = vs.iter().position(|&v| v == k).unwrap();
                    prop_assert_eq!(
                        m.restrict(&vs).unwrap(),
                        b.restrict(&vs).unwrap().mutate(pos).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn quiver_matrix_bijection(b in matrix(8, 5)) {
        let q = Quiver::from_matrix(&b);
        prop_assert_eq!(q.to_matrix(), b.clone());
        prop_assert_eq!(Quiver::from_matrix(&q.to_matrix()), q.clone());
        for k in 0..b.n() {
            prop_assert_eq!(q.mutate(k).unwrap().to_matrix(), b.mutate(k).unwrap());
        }
    }

    #[test]
    fn mutation_commutes_with_relabeling(
        b in matrix(7, 3),
        perm_seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let n = b.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(perm_seed));
        let p = b.permute(&perm).unwrap();
        prop_assert_eq!(canonical_key_of_matrix(&p).unwrap(), canonical_key_of_matrix(&b).unwrap());
        for pos in 0..n {
            prop_assert_eq!(
                p.mutate(pos).unwrap(),
                b.mutate(perm[pos]).unwrap().permute(&perm).unwrap()
            );
        }
    }
}

#[test]
fn entries_beyond_machine_words_mutate_exactly() {
    let big = BigInt::from(7).pow(40);
    let rows = vec![
        vec![BigInt::from(0), big.clone(), BigInt::from(0)],
        vec![-big.clone(), BigInt::from(0), big.clone()],
        vec![BigInt::from(0), -big.clone(), BigInt::from(0)],
    ];
    let b = ExchangeMatrix::from_rows(rows).unwrap();
    let m = b.mutate(1).unwrap();
    assert_eq!(m.get(0, 2), &(&big * &big));
    assert_eq!(m.mutate(1).unwrap(), b);
}
