//! Shared input generators for the benchmark targets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use partisan_core::corpus::{Corpus, Document};

/// A seed-fixed two-class corpus with class-specific and shared vocabulary,
/// sized like short news articles.
pub fn synthetic_corpus(n_per_class: usize, tokens_per_doc: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared: Vec<String> = (0..400).map(|i| format!("common{i:03}")).collect();
    let mut docs = Vec::with_capacity(2 * n_per_class);
    for class in [true, false] {
        let marker = if class { "heated" } else { "sober" };
        for d in 0..n_per_class {
            let mut words = Vec::with_capacity(tokens_per_doc);
            for _ in 0..tokens_per_doc {
                if rng.gen_bool(0.3) {
                    words.push(format!("{marker}{}", rng.gen_range(0..60)));
                } else {
                    words.push(shared[rng.gen_range(0..shared.len())].clone());
                }
            }
            docs.push(Document {
                id: format!("{marker}-{d}"),
                text: words.join(" "),
                label: Some(class),
            });
        }
    }
    Corpus::new("bench", docs).unwrap()
}

/// A paragraph of running text with punctuation, for the tokenizer and
/// readability paths.
pub fn sample_article() -> String {
    let paragraph = "The committee reviewed the proposal on Tuesday. Was it enough? \
        Critics said the plan would never survive contact with the budget office, \
        and supporters countered that projections were conservative. Nothing was \
        settled! A final vote is expected within three weeks, officials said.";
    paragraph.repeat(8)
}
