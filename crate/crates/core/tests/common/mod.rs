//! Generators shared by the integration test targets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use partisan_core::corpus::{Corpus, Document};

/// Seed-fixed synthetic corpus: two class-disjoint 50-word vocabularies plus
/// 100 shared filler words, 50-150 tokens per document.
pub fn synthetic_corpus(n_per_class: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos_vocab: Vec<String> = (0..50).map(|i| format!("zeal{i:02}")).collect();
    let neg_vocab: Vec<String> = (0..50).map(|i| format!("calm{i:02}")).collect();
    let filler: Vec<String> = (0..100).map(|i| format!("fill{i:03}")).collect();

    let mut docs = Vec::with_capacity(2 * n_per_class);
    for class in [true, false] {
        let class_vocab = if class { &pos_vocab } else { &neg_vocab };
        for d in 0..n_per_class {
            let len = rng.gen_range(50..=150);
            let mut words = Vec::with_capacity(len);
            for _ in 0..len {
                if rng.gen_bool(0.5) {
                    words.push(filler[rng.gen_range(0..filler.len())].clone());
                } else {
                    words.push(class_vocab[rng.gen_range(0..class_vocab.len())].clone());
                }
            }
            let prefix = if class { "p" } else { "n" };
            docs.push(Document {
                id: format!("{prefix}{d:03}"),
                text: words.join(" "),
                label: Some(class),
            });
        }
    }
    Corpus::new("synthetic", docs).unwrap()
}

pub fn random_tokens(rng: &mut ChaCha8Rng, max_len: usize, vocab: usize) -> Vec<String> {
    let len = rng.gen_range(1..=max_len);
    (0..len)
        .map(|_| format!("w{}", rng.gen_range(0..vocab)))
        .collect()
}
