use mia_audit_core::*;
use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};
use proptest::strategy::Strategy as _;

fn grid() -> impl proptest::strategy::Strategy<Value = MiaGrid> {
    (1usize..=20, 1usize..=10).prop_flat_map(|(m, n)| {
        (
            proptest::collection::vec(-1e6f64..1e6, m * n),
            proptest::collection::vec(any::<bool>(), m * n),
        )
            .prop_map(move |(s, k)| MiaGrid::new(m, n, s, k).unwrap())
    })
}

proptest! {
    #[test]
    fn subsets_keep_columns_and_row_contents(g in grid(), seed in any::<u64>(), frac in 0.0f64..1.0) {
        let m_prime = 1 + ((g.n_models() - 1) as f64 * frac) as usize;
        let rows = g.select_models(m_prime, RowSelection::SeededRandom(seed)).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        let sub = g.subset_models(m_prime, RowSelection::SeededRandom(seed)).unwrap();
        prop_assert_eq!(sub.n_samples(), g.n_samples());
        prop_assert_eq!(sub.n_models(), m_prime);
        for (i, &r) in rows.iter().enumerate() {
            prop_assert_eq!(sub.score_row(i), g.score_row(r));
            prop_assert_eq!(sub.mask_row(i), g.mask_row(r));
        }
        for x in 0..sub.n_samples() {
            let (n_in, n_out) = sub.column_counts(x);
            prop_assert_eq!(n_in + n_out, m_prime);
        }
        prop_assert_eq!(&sub, &g.subset_models(m_prime, RowSelection::SeededRandom(seed)).unwrap());
    }
}

#[test]
fn first_selection_cases() {
    let g = MiaGrid::from_rows(
        &[vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6]],
        &[vec![true, false], vec![false, true], vec![true, true]],
    )
    .unwrap();
    assert_eq!(g.subset_models(3, RowSelection::First).unwrap(), g);
    let one = g.subset_models(1, RowSelection::First).unwrap();
    assert_eq!(one.scores(), &[0.1, 0.2]);
    assert_eq!(one.mask(), &[true, false]);
    assert!(g.subset_models(0, RowSelection::First).is_err());
    assert!(g.subset_models(4, RowSelection::SeededRandom(1)).is_err());
}

#[test]
fn construction_errors() {
    assert!(matches!(
        MiaGrid::new(0, 1, vec![], vec![]),
        Err(Error::Shape(_))
    ));
    assert!(matches!(
        MiaGrid::new(1, 2, vec![1.0], vec![true, false]),
        Err(Error::Shape(_))
    ));
    let err = MiaGrid::new(2, 2, vec![0.0, 1.0, f64::NAN, 2.0], vec![false; 4]).unwrap_err();
    assert_eq!(err.to_string(), "non-finite score at (1,0)");
    let ids = vec!["a".to_string()];
    assert!(MiaGrid::new(1, 2, vec![0.0; 2], vec![false; 2])
        .unwrap()
        .with_sample_ids(ids)
        .is_err());
}
