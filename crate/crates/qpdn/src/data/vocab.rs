//! Tokenization, vocabulary construction, and idf statistics.

use std::collections::HashMap;

use crate::data::corpus::RawCorpus;
use crate::error::{Error, Result};

/// Reserved id 0: every token outside the vocabulary maps here.
pub const OOV_TOKEN: &str = "<oov>";

/// Lowercase the text, then split into alphanumeric runs; every other
/// non-whitespace character becomes a standalone token. Re-tokenizing the
/// joined output reproduces the token list.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in lowered.chars() {
        if ch.is_alphanumeric() {
            current.push(ch);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if !ch.is_whitespace() {
                tokens.push(ch.to_string());
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Token table with document frequencies. Ids are assigned by descending
/// corpus frequency with lexicographic tie-break, starting at 1; id 0 is
/// the out-of-vocabulary bucket.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    num_documents: usize,
}

impl Vocabulary {
    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    /// Id of a token, falling back to the OOV bucket.
    pub fn id_of(&self, token: &str) -> usize {
        self.ids.get(token).copied().unwrap_or(0)
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn doc_freq(&self, id: usize) -> usize {
        self.doc_freq[id]
    }

    pub fn num_documents(&self) -> usize {
        self.num_documents
    }

    /// Rebuild a vocabulary from a stored token list (checkpoints). The
    /// document statistics are not recoverable and are zeroed; they are
    /// only needed while initializing a model, never when applying one.
    pub fn from_token_list(tokens: Vec<String>) -> Result<Self> {
        if tokens.is_empty() || tokens[0] != OOV_TOKEN {
            return Err(Error::Config(format!(
                "vocabulary list must start with the {OOV_TOKEN} entry"
            )));
        }
        let mut ids = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if ids.insert(t.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate vocabulary token {t:?}")));
            }
        }
        let len = tokens.len();
        Ok(Self {
            tokens,
            ids,
            doc_freq: vec![0; len],
            num_documents: 0,
        })
    }
}

/// Build the vocabulary of a corpus, keeping tokens that occur at least
/// `min_count` times. Document frequencies count each token once per
/// record; dropped tokens contribute to the OOV bucket's statistics.
pub fn build_vocab(corpus: &RawCorpus, min_count: usize) -> Result<Vocabulary> {
    if corpus.records.is_empty() {
        return Err(Error::EmptyCorpus {
            path: corpus.source.clone(),
        });
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    let tokenized: Vec<Vec<String>> = corpus
        .records
        .iter()
        .map(|(_, text)| tokenize(text))
        .collect();
    for tokens in &tokenized {
        for t in tokens {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&String, usize)> = counts
        .iter()
        .filter(|&(_, &c)| c >= min_count)
        .map(|(t, &c)| (t, c))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut tokens = Vec::with_capacity(kept.len() + 1);
    tokens.push(OOV_TOKEN.to_string());
    tokens.extend(kept.into_iter().map(|(t, _)| t.clone()));
    let ids: HashMap<String, usize> = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let mut doc_freq = vec![0usize; tokens.len()];
    for doc_tokens in &tokenized {
        let mut seen: Vec<usize> = doc_tokens
            .iter()
            .map(|t| ids.get(t).copied().unwrap_or(0))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        for id in seen {
            doc_freq[id] += 1;
        }
    }
    Ok(Vocabulary {
        tokens,
        ids,
        doc_freq,
        num_documents: corpus.records.len(),
    })
}

/// Smoothed inverse document frequency per vocabulary id:
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1. Strictly positive, so the
/// values are usable directly as mixture weights and their logarithms as
/// frozen term logits.
pub fn idf_weights(vocab: &Vocabulary) -> Vec<f64> {
    let n = vocab.num_documents() as f64;
    (0..vocab.size())
        .map(|id| ((1.0 + n) / (1.0 + vocab.doc_freq(id) as f64)).ln() + 1.0)
        .collect()
}
