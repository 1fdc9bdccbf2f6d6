use criterion::{black_box, criterion_group, criterion_main, Criterion};

use partisan_bench::{sample_article, synthetic_corpus};
use partisan_core::classifier::{train, TrainOptions};
use partisan_core::pipeline::{fit_pipeline, FeatureConfig, FeatureFamily};
use partisan_core::stylometry::richness_features;
use partisan_core::textproc::{char_ngrams, tokenize};
use partisan_core::vectorizer::{build_vocabulary, fit_nb_ratios, tfidf_transform, Channel};

fn bench_textproc(c: &mut Criterion) {
    let article = sample_article();
    c.bench_function("tokenize_article", |b| {
        b.iter(|| tokenize(black_box(&article)))
    });
    c.bench_function("char_trigrams_article", |b| {
        b.iter(|| char_ngrams(black_box(&article), 3).unwrap())
    });
}

fn bench_vectorizer(c: &mut Criterion) {
    let corpus = synthetic_corpus(100, 150, 1);
    c.bench_function("build_vocabulary_word12", |b| {
        b.iter(|| build_vocabulary(black_box(&corpus), Channel::Word12, Some(200_000), 0.9))
    });

    let vocab = build_vocabulary(&corpus, Channel::Word12, Some(200_000), 0.9).unwrap();
    let doc_terms = Channel::Word12.terms(&corpus.documents()[0].text);
    c.bench_function("tfidf_transform_doc", |b| {
        b.iter(|| tfidf_transform(black_box(&doc_terms), &vocab, false))
    });

    let rows: Vec<_> = corpus
        .iter()
        .map(|d| tfidf_transform(&Channel::Word12.terms(&d.text), &vocab, false))
        .collect();
    let labels = corpus.labels().unwrap();
    c.bench_function("fit_nb_ratios_200x", |b| {
        b.iter(|| fit_nb_ratios(black_box(&rows), &labels, 1.0).unwrap())
    });
}

fn bench_stylometry(c: &mut Criterion) {
    let tokens = tokenize(&sample_article()).tokens;
    c.bench_function("richness_features_article", |b| {
        b.iter(|| richness_features(black_box(&tokens)))
    });
}

fn bench_pipeline(c: &mut Criterion) {
    let corpus = synthetic_corpus(50, 120, 2);
    let config = FeatureConfig::default();
    c.bench_function("fit_pipeline_full_100docs", |b| {
        b.iter(|| fit_pipeline(black_box(&corpus), &config, &[]).unwrap())
    });

    let pipeline = fit_pipeline(&corpus, &config, &[]).unwrap();
    let doc = &corpus.documents()[0];
    c.bench_function("transform_full_doc", |b| {
        b.iter(|| pipeline.transform(black_box(doc)))
    });
}

fn bench_training(c: &mut Criterion) {
    let corpus = synthetic_corpus(50, 120, 3);
    let config = FeatureConfig::with_families([FeatureFamily::WordNgrams]);
    let pipeline = fit_pipeline(&corpus, &config, &[]).unwrap();
    let features = pipeline.transform_corpus(&corpus);
    let labels = corpus.labels().unwrap();
    let opts = TrainOptions {
        max_iter: 50,
        tol: 0.0,
        ..TrainOptions::default()
    };
    c.bench_function("train_batch_gd_50iters", |b| {
        b.iter(|| train(black_box(&features), &labels, &opts).unwrap())
    });
}

criterion_group!(
    benches,
    bench_textproc,
    bench_vectorizer,
    bench_stylometry,
    bench_pipeline,
    bench_training
);
criterion_main!(benches);
