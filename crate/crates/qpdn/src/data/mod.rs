//! Corpus loading, tokenization, vocabulary, folds, and pretrained vectors.

mod corpus;
mod pretrained;
pub mod synthetic;
mod vocab;

pub use corpus::{
    cv_splits, encode_corpus, encode_with_labels, load_corpus, load_dataset, split_dataset,
    Dataset, Example, RawCorpus,
};
pub use pretrained::{load_pretrained, PretrainedInit, SignConvention};
pub use vocab::{build_vocab, idf_weights, tokenize, Vocabulary, OOV_TOKEN};
