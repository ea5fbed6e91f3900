//! Property checks over the data and embedding layers.

use std::collections::BTreeSet;

use proptest::prelude::*;

use grover_core::data::dataset::split_train_val;
use grover_core::data::drop::word_drop;
use grover_core::data::vocab::{Vocabulary, FIRST_WORD_ID, OOV_ID, PAD_ID};
use grover_core::embedding::noise::{apply_maskers, NoiseKind};
use grover_core::embedding::order::FrequencyOrder;
use grover_core::embedding::table::EmbeddingTable;
use grover_core::meta::{MaskerState, Policy};
use grover_core::rng::seeded_rng;

fn docs_strategy() -> impl Strategy<Value = Vec<Vec<String>>> {
    let token = prop::sample::select(vec![
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
    ])
    .prop_map(str::to_owned);
    prop::collection::vec(prop::collection::vec(token, 1..12), 1..20)
}

proptest! {
    #[test]
    fn vocabulary_maps_are_inverse(docs in docs_strategy()) {
        let vocab = Vocabulary::build(&docs).unwrap();
        for id in 0..vocab.len() {
            let token = vocab.token_of(id).unwrap();
            prop_assert_eq!(vocab.id_of(token), Some(id));
        }
        for doc in &docs {
            for token in doc {
                let id = vocab.id_of(token).unwrap();
                prop_assert!(id >= FIRST_WORD_ID);
                prop_assert_eq!(vocab.token_of(id), Some(token.as_str()));
            }
        }
        prop_assert_eq!(vocab.id_of("never-seen"), None);
        prop_assert_eq!(vocab.encode_token("never-seen"), OOV_ID);
    }

    #[test]
    fn split_is_a_partition(n in 0usize..200, frac in 0.01f64..=0.99, seed in any::<u64>()) {
        let items: Vec<usize> = (0..n).collect();
        match split_train_val(items.clone(), frac, seed) {
            Ok((a, b)) => {
                prop_assert_eq!(a.len() + b.len(), n);
                prop_assert_eq!(b.len(), (frac * n as f64).round() as usize);
                let mut merged: Vec<usize> = a.iter().chain(&b).copied().collect();
                merged.sort_unstable();
                prop_assert_eq!(merged, items);
            }
            Err(_) => {
                // only refused when a half would come out empty
                let val_n = (frac * n as f64).round() as usize;
                prop_assert!(val_n == 0 || val_n >= n);
            }
        }
    }

    #[test]
    fn same_seed_same_split(n in 4usize..100, frac in 0.25f64..=0.75, seed in any::<u64>()) {
        let items: Vec<usize> = (0..n).collect();
        let once = split_train_val(items.clone(), frac, seed).unwrap();
        let again = split_train_val(items, frac, seed).unwrap();
        prop_assert_eq!(once, again);
    }

    #[test]
    fn word_drop_at_zero_is_identity(tokens in prop::collection::vec(0usize..50, 0..40), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let kept = word_drop(&tokens, 0.0, &mut rng).unwrap();
        prop_assert_eq!(kept, tokens);
    }

    #[test]
    fn word_drop_keeps_a_subsequence(tokens in prop::collection::vec(0usize..50, 0..40), p in 0.0f64..1.0, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let kept = word_drop(&tokens, p, &mut rng).unwrap();
        prop_assert!(kept.len() <= tokens.len());
        // kept must embed into tokens in order
        let mut it = tokens.iter();
        for k in &kept {
            prop_assert!(it.any(|t| t == k), "dropped-word output is not a subsequence");
        }
    }

    #[test]
    fn frequency_order_is_an_ascending_permutation(docs in docs_strategy()) {
        let vocab = Vocabulary::build(&docs).unwrap();
        let order = FrequencyOrder::new(&vocab);
        // exactly the non-special ids, once each
        let got: BTreeSet<usize> = order.ids().iter().copied().collect();
        let want: BTreeSet<usize> = (FIRST_WORD_ID..vocab.len()).collect();
        prop_assert_eq!(got, want);
        prop_assert_eq!(order.ids().len(), vocab.len() - FIRST_WORD_ID);
        // ascending frequency, ties broken by ascending id
        for pair in order.ids().windows(2) {
            let (fa, fb) = (vocab.frequency_of(pair[0]), vocab.frequency_of(pair[1]));
            prop_assert!(fa < fb || (fa == fb && pair[0] < pair[1]));
        }
    }

    #[test]
    fn noise_touches_exactly_the_masked_rows(
        rows in 3usize..20,
        dim in 1usize..6,
        range in 0.0f64..4.0,
        seed in any::<u64>(),
        mask_bits in prop::collection::vec(any::<bool>(), 20),
    ) {
        let tokens: Vec<Vec<String>> = (0..rows - FIRST_WORD_ID)
            .map(|i| vec![format!("tok{i}")])
            .collect();
        let vocab = Vocabulary::build(&tokens).unwrap();
        let table = EmbeddingTable::<f64>::init_random(&vocab, dim, seed).unwrap();
        let mask: BTreeSet<usize> = (FIRST_WORD_ID..rows).filter(|id| mask_bits[*id]).collect();
        let noised = apply_maskers(&table, &mask, range, NoiseKind::Uniform, &mut seeded_rng(seed)).unwrap();
        for id in 0..rows {
            let before = table.row(id);
            let after = noised.row(id);
            if mask.contains(&id) {
                for (a, b) in before.iter().zip(after) {
                    prop_assert!((a - b).abs() <= range, "uniform noise must stay within the range");
                }
            } else {
                prop_assert!(before.iter().zip(after).all(|(a, b)| a.to_bits() == b.to_bits()));
            }
        }
    }

    #[test]
    fn empty_mask_is_identity(seed in any::<u64>()) {
        let vocab = Vocabulary::build(&[vec!["a".to_owned(), "b".to_owned()]]).unwrap();
        let table = EmbeddingTable::<f64>::init_random(&vocab, 3, seed).unwrap();
        let noised = apply_maskers(&table, &BTreeSet::new(), 2.0, NoiseKind::Uniform, &mut seeded_rng(seed)).unwrap();
        prop_assert!(table.values().iter().zip(noised.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn table_save_load_round_trips(rows in 1usize..10, dim in 1usize..8, seed in any::<u64>()) {
        let tokens: Vec<Vec<String>> = (0..rows).map(|i| vec![format!("tok{i}")]).collect();
        let vocab = Vocabulary::build(&tokens).unwrap();
        let table = EmbeddingTable::<f32>::init_random(&vocab, dim, seed).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.vec");
        table.save(&path).unwrap();
        let loaded = EmbeddingTable::<f32>::load(&path).unwrap();
        prop_assert_eq!(loaded.rows(), table.rows());
        prop_assert_eq!(loaded.dim(), table.dim());
        prop_assert!(table.values().iter().zip(loaded.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    /// However acceptance plays out, a sweep takes exactly ceil(n / wsize)
    /// mask advances to terminate.
    #[test]
    fn masker_always_terminates_on_schedule(
        n in 1usize..60,
        step in 0.01f64..=1.0,
        policy_pick in 0usize..4,
        outcomes in prop::collection::vec(any::<bool>(), 64),
    ) {
        let policy = Policy::ALL[policy_pick];
        let mut masker = MaskerState::new(n, step).unwrap();
        let mut advances = 0usize;
        while !masker.done() {
            let mask = masker.advance(policy, outcomes[advances % outcomes.len()]).unwrap();
            prop_assert!(mask.end <= n);
            prop_assert!(mask.start < mask.end);
            advances += 1;
            prop_assert!(advances <= n, "sweep must not stall");
        }
        let wsize = (step * n as f64).ceil() as usize;
        prop_assert_eq!(advances, n.div_ceil(wsize));
        prop_assert!(masker.advance(policy, true).is_err());
    }
}

#[test]
fn specials_sit_below_the_first_word_id() {
    assert!(PAD_ID < FIRST_WORD_ID);
    assert!(OOV_ID < FIRST_WORD_ID);
    assert!(Vocabulary::is_special(PAD_ID));
    assert!(Vocabulary::is_special(OOV_ID));
    assert!(!Vocabulary::is_special(FIRST_WORD_ID));
}
