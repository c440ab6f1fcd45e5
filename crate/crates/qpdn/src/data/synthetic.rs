//! Small built-in corpora for smoke tests and sanity training runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::corpus::{encode_corpus, Dataset, RawCorpus};
use crate::data::vocab::{build_vocab, Vocabulary};

const POSITIVE_WORDS: [&str; 4] = ["splendid", "charming", "superb", "delightful"];
const NEGATIVE_WORDS: [&str; 4] = ["dreadful", "tedious", "clumsy", "hollow"];
const FILLER_WORDS: [&str; 6] = ["the", "film", "feels", "plot", "quite", "rather"];

/// Sixteen fixed sentences, eight per class, where class membership is
/// carried entirely by one disjoint word set per class. Linearly separable
/// by construction; a correct trainer reaches perfect accuracy quickly.
pub fn separable_corpus() -> RawCorpus {
    let lines: [(&str, &str); 16] = [
        ("pos", "the film feels splendid"),
        ("pos", "quite charming plot"),
        ("pos", "superb film"),
        ("pos", "rather delightful"),
        ("pos", "the plot feels charming"),
        ("pos", "splendid superb film"),
        ("pos", "quite superb rather splendid"),
        ("pos", "delightful charming film"),
        ("neg", "the film feels dreadful"),
        ("neg", "quite tedious plot"),
        ("neg", "clumsy film"),
        ("neg", "rather hollow"),
        ("neg", "the plot feels tedious"),
        ("neg", "dreadful clumsy film"),
        ("neg", "quite hollow rather dreadful"),
        ("neg", "tedious clumsy film"),
    ];
    RawCorpus {
        records: lines
            .iter()
            .map(|&(l, t)| (l.to_string(), t.to_string()))
            .collect(),
        source: "synthetic:separable".into(),
    }
}

/// Encoded form of `separable_corpus` with its vocabulary.
pub fn separable_dataset() -> (Dataset, Vocabulary) {
    let corpus = separable_corpus();
    let vocab = build_vocab(&corpus, 1).expect("built-in corpus is non-empty");
    let dataset = encode_corpus(&corpus, &vocab).expect("built-in corpus encodes");
    (dataset, vocab)
}

/// A seeded corpus of `count` sentences in the same two-class scheme, with
/// three to seven words per sentence mixing class words and fillers. Used
/// where tests need more volume than the fixed sixteen.
pub fn generated_corpus(count: usize, seed: u64) -> RawCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let positive = i % 2 == 0;
        let class_words: &[&str] = if positive {
            &POSITIVE_WORDS
        } else {
            &NEGATIVE_WORDS
        };
        let len = rng.gen_range(3..=7);
        let class_slots = rng.gen_range(1..=2.min(len - 1));
        let mut words: Vec<&str> = Vec::with_capacity(len);
        for _ in 0..class_slots {
            words.push(class_words[rng.gen_range(0..class_words.len())]);
        }
        while words.len() < len {
            words.push(FILLER_WORDS[rng.gen_range(0..FILLER_WORDS.len())]);
        }
        // Deterministic in-place shuffle so class words move around.
        for j in (1..words.len()).rev() {
            words.swap(j, rng.gen_range(0..=j));
        }
        let label = if positive { "pos" } else { "neg" };
        records.push((label.to_string(), words.join(" ")));
    }
    RawCorpus {
        records,
        source: format!("synthetic:generated:{seed}"),
    }
}
