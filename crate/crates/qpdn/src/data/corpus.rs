//! Labeled corpora: loading, encoding, splitting, and fold assignment.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::vocab::{build_vocab, tokenize, Vocabulary};
use crate::error::{read_named, Error, Result};

/// A corpus as read from disk: (label, text) per record.
#[derive(Clone, Debug)]
pub struct RawCorpus {
    pub records: Vec<(String, String)>,
    pub source: String,
}

/// One encoded example: token ids plus a label index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub tokens: Vec<usize>,
    pub label: usize,
}

/// An encoded dataset with its label names in index order.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub examples: Vec<Example>,
    pub labels: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// New dataset holding the selected examples (same label table).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Read a tab-separated `label<TAB>text` file. Lines are 1-indexed in
/// errors; a missing tab or an empty text field is malformed; an empty
/// file is rejected.
pub fn load_corpus(path: &Path) -> Result<RawCorpus> {
    let content = read_named(path)?;
    let source = path.display().to_string();
    let mut records = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (label, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: format!("expected label<TAB>text in {source}"),
        })?;
        if label.is_empty() || text.trim().is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("empty label or text in {source}"),
            });
        }
        records.push((label.to_string(), text.to_string()));
    }
    if records.is_empty() {
        return Err(Error::EmptyCorpus { path: source });
    }
    Ok(RawCorpus { records, source })
}

/// Encode a corpus against a vocabulary, assigning label indices in order
/// of first appearance.
pub fn encode_corpus(corpus: &RawCorpus, vocab: &Vocabulary) -> Result<Dataset> {
    let mut labels: Vec<String> = Vec::new();
    encode_inner(corpus, vocab, &mut labels, true)
}

/// Encode against a fixed label table (evaluation mode): a label absent
/// from the table is an error, never a silent new class.
pub fn encode_with_labels(
    corpus: &RawCorpus,
    vocab: &Vocabulary,
    labels: &[String],
) -> Result<Dataset> {
    let mut fixed = labels.to_vec();
    encode_inner(corpus, vocab, &mut fixed, false)
}

fn encode_inner(
    corpus: &RawCorpus,
    vocab: &Vocabulary,
    labels: &mut Vec<String>,
    allow_new: bool,
) -> Result<Dataset> {
    let mut examples = Vec::with_capacity(corpus.records.len());
    for (idx, (label, text)) in corpus.records.iter().enumerate() {
        let label_idx = match labels.iter().position(|l| l == label) {
            Some(i) => i,
            None if allow_new => {
                labels.push(label.clone());
                labels.len() - 1
            }
            None => {
                return Err(Error::UnknownLabel {
                    label: label.clone(),
                });
            }
        };
        let tokens: Vec<usize> = tokenize(text).iter().map(|t| vocab.id_of(t)).collect();
        if tokens.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("record tokenizes to nothing in {}", corpus.source),
            });
        }
        examples.push(Example {
            tokens,
            label: label_idx,
        });
    }
    Ok(Dataset {
        examples,
        labels: labels.clone(),
    })
}

/// Load and encode in one step, building the vocabulary from this corpus.
pub fn load_dataset(path: &Path, min_count: usize) -> Result<(Dataset, Vocabulary)> {
    let corpus = load_corpus(path)?;
    let vocab = build_vocab(&corpus, min_count)?;
    let dataset = encode_corpus(&corpus, &vocab)?;
    Ok((dataset, vocab))
}

/// Assign each example to one of `k` folds: a seeded shuffle cut into
/// contiguous runs, so fold sizes differ by at most one and the assignment
/// is a partition.
pub fn cv_splits(dataset: &Dataset, k: usize, seed: u64) -> Result<Vec<usize>> {
    let len = dataset.len();
    if k < 2 || k > len {
        return Err(Error::Config(format!(
            "fold count {k} must be between 2 and the dataset size {len}"
        )));
    }
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let base = len / k;
    let extra = len % k;
    let mut assignment = vec![0usize; len];
    let mut cursor = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &example in &order[cursor..cursor + size] {
            assignment[example] = fold;
        }
        cursor += size;
    }
    Ok(assignment)
}

/// Split off a held-out fraction (seeded shuffle): returns (rest, held).
/// The held-out part gets at least one example whenever the fraction is
/// positive and the dataset has two or more.
pub fn split_dataset(dataset: &Dataset, fraction: f64, seed: u64) -> (Dataset, Dataset) {
    let len = dataset.len();
    let held = if fraction <= 0.0 || len < 2 {
        0
    } else {
        ((len as f64 * fraction).round() as usize).clamp(1, len - 1)
    };
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let held_idx = &order[..held];
    let rest_idx = &order[held..];
    let mut rest_sorted = rest_idx.to_vec();
    let mut held_sorted = held_idx.to_vec();
    rest_sorted.sort_unstable();
    held_sorted.sort_unstable();
    (dataset.subset(&rest_sorted), dataset.subset(&held_sorted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_and_encode_round_trip() {
        let f = write_temp("pos\tgood film\nneg\tbad film\npos\tgood plot\n");
        let (ds, vocab) = load_dataset(f.path(), 1).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.labels, vec!["pos", "neg"]);
        assert_eq!(ds.examples[0].label, 0);
        assert_eq!(ds.examples[1].label, 1);
        // "film" occurs twice, so it gets the lowest content id.
        assert_eq!(vocab.id_of("film"), 1);
        assert_eq!(ds.examples[0].tokens[1], 1);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let f = write_temp("pos\tfine\nno tab here\n");
        let err = load_corpus(f.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_rejected() {
        let f = write_temp("");
        assert!(matches!(
            load_corpus(f.path()).unwrap_err(),
            Error::EmptyCorpus { .. }
        ));
    }

    #[test]
    fn unknown_label_fails_in_eval_mode() {
        let f = write_temp("pos\tgood\nmixed\todd\n");
        let corpus = load_corpus(f.path()).unwrap();
        let vocab = build_vocab(&corpus, 1).unwrap();
        let err = encode_with_labels(&corpus, &vocab, &["pos".into(), "neg".into()]).unwrap_err();
        assert!(matches!(err, Error::UnknownLabel { label } if label == "mixed"));
    }

    #[test]
    fn unseen_tokens_map_to_oov_in_eval_mode() {
        let train = write_temp("pos\tgood film\n");
        let corpus = load_corpus(train.path()).unwrap();
        let vocab = build_vocab(&corpus, 1).unwrap();
        let eval = RawCorpus {
            records: vec![("pos".into(), "astonishing film".into())],
            source: "eval".into(),
        };
        let ds = encode_with_labels(&eval, &vocab, &["pos".into()]).unwrap();
        assert_eq!(ds.examples[0].tokens[0], 0);
        assert_ne!(ds.examples[0].tokens[1], 0);
    }

    fn toy_dataset(len: usize) -> Dataset {
        Dataset {
            examples: (0..len)
                .map(|i| Example {
                    tokens: vec![i % 5],
                    label: i % 2,
                })
                .collect(),
            labels: vec!["a".into(), "b".into()],
        }
    }

    #[test]
    fn cv_splits_partition_with_balanced_sizes() {
        let ds = toy_dataset(23);
        let assignment = cv_splits(&ds, 10, 7).unwrap();
        assert_eq!(assignment.len(), 23);
        let mut sizes = [0usize; 10];
        for &f in &assignment {
            sizes[f] += 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), 23);
        assert_eq!(
            *sizes.iter().max().unwrap() - *sizes.iter().min().unwrap(),
            1
        );
    }

    #[test]
    fn cv_splits_are_seed_deterministic_and_seed_sensitive() {
        let ds = toy_dataset(40);
        let a = cv_splits(&ds, 5, 1).unwrap();
        let b = cv_splits(&ds, 5, 1).unwrap();
        let c = cv_splits(&ds, 5, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn cv_splits_reject_bad_fold_counts() {
        let ds = toy_dataset(5);
        assert!(cv_splits(&ds, 1, 0).is_err());
        assert!(cv_splits(&ds, 6, 0).is_err());
        assert!(cv_splits(&ds, 5, 0).is_ok());
    }

    #[test]
    fn split_dataset_holds_out_requested_fraction() {
        let ds = toy_dataset(20);
        let (rest, held) = split_dataset(&ds, 0.1, 3);
        assert_eq!(held.len(), 2);
        assert_eq!(rest.len(), 18);
        let (rest0, held0) = split_dataset(&ds, 0.0, 3);
        assert_eq!(held0.len(), 0);
        assert_eq!(rest0.len(), 20);
    }
}
