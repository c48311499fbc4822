//! Corpus size, vocabulary and label frequency statistics.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::model::{Sentence, Treebank, Upos};
use crate::pipeline::Execution;

/// Count and percent of tokens for one relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelFrequency {
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    pub sentence_count: usize,
    pub token_count: usize,
    pub word_type_count: usize,
    pub lemma_type_count: usize,
    pub verb_lemma_type_count: usize,
    pub label_frequencies: BTreeMap<String, LabelFrequency>,
}

#[derive(Default)]
struct Partial {
    sentences: usize,
    tokens: usize,
    words: HashSet<String>,
    lemmas: HashSet<String>,
    verb_lemmas: HashSet<String>,
    labels: BTreeMap<String, usize>,
}

impl Partial {
    fn of(s: &Sentence) -> Self {
        let mut p = Partial {
            sentences: 1,
            tokens: s.len(),
            ..Default::default()
        };
        for t in &s.tokens {
            p.words.insert(t.form.clone());
            if !t.lemma.is_empty() && t.lemma != "_" {
                p.lemmas.insert(t.lemma.clone());
                let verb = match t.upos {
                    Some(u) => u == Upos::Verb,
                    None => t.xpos_is("V"),
                };
                if verb {
                    p.verb_lemmas.insert(t.lemma.clone());
                }
            }
            *p.labels.entry(t.deprel.clone()).or_default() += 1;
        }
        p
    }

    fn merge(mut self, mut other: Partial) -> Partial {
        // fold the smaller sets into the larger ones
        if self.words.len() < other.words.len() {
            std::mem::swap(&mut self, &mut other);
        }
        self.sentences += other.sentences;
        self.tokens += other.tokens;
        self.words.extend(other.words);
        self.lemmas.extend(other.lemmas);
        self.verb_lemmas.extend(other.verb_lemmas);
        for (k, v) in other.labels {
            *self.labels.entry(k).or_default() += v;
        }
        self
    }
}

impl CorpusStats {
    pub fn compute(tb: &Treebank, exec: Execution) -> Self {
        let p = exec.map_reduce(&tb.sentences, Partial::of, Partial::merge);
        let label_frequencies = p
            .labels
            .into_iter()
            .map(|(label, count)| {
                let percent = count as f64 * 100.0 / p.tokens as f64;
                (label, LabelFrequency { count, percent })
            })
            .collect();
        CorpusStats {
            sentence_count: p.sentences,
            token_count: p.tokens,
            word_type_count: p.words.len(),
            lemma_type_count: p.lemmas.len(),
            verb_lemma_type_count: p.verb_lemmas.len(),
            label_frequencies,
        }
    }

    pub fn count(&self, label: &str) -> usize {
        self.label_frequencies.get(label).map_or(0, |f| f.count)
    }

    /// Labels by descending count, ties by name.
    pub fn labels_by_count(&self) -> Vec<(&str, LabelFrequency)> {
        let mut v: Vec<(&str, LabelFrequency)> = self
            .label_frequencies
            .iter()
            .map(|(k, f)| (k.as_str(), *f))
            .collect();
        v.sort_by(|a, b| b.1.count.cmp(&a.1.count).then(a.0.cmp(b.0)));
        v
    }

    /// Observations worth reporting but not failing on.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        let (subj, aux) = (self.count("nsubj:pass"), self.count("aux:pass"));
        let hi = subj.max(aux);
        if hi > 0 && (hi - subj.min(aux)) as f64 > 0.1 * hi as f64 {
            notes.push(format!(
                "nsubj:pass ({}) and aux:pass ({}) differ by more than 10%",
                subj, aux
            ));
        }
        notes
    }

    fn size_rows(&self) -> [(&'static str, usize); 5] {
        [
            ("sentences", self.sentence_count),
            ("tokens", self.token_count),
            ("word_types", self.word_type_count),
            ("lemma_types", self.lemma_type_count),
            ("verb_lemma_types", self.verb_lemma_type_count),
        ]
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tvalue\n");
        for (k, v) in self.size_rows() {
            let _ = writeln!(out, "{}\t{}", k, v);
        }
        out.push_str("\nlabel\tcount\tpercent\n");
        for (label, f) in self.labels_by_count() {
            let _ = writeln!(out, "{}\t{}\t{}", label, f.count, format_percent(f.percent));
        }
        for n in self.notes() {
            let _ = writeln!(out, "# note: {}", n);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.size_rows() {
            let _ = writeln!(out, "{:<18}{:>10}", k, v);
        }
        out.push('\n');
        let width = self
            .label_frequencies
            .keys()
            .map(|k| k.chars().count())
            .max()
            .unwrap_or(5)
            .max(5)
            + 2;
        let _ = writeln!(out, "{:<width$}{:>10}{:>10}", "label", "count", "percent");
        for (label, f) in self.labels_by_count() {
            let _ = writeln!(out, "{:<width$}{:>10}{:>10}", label, f.count, format_percent(f.percent));
        }
        for n in self.notes() {
            let _ = writeln!(out, "note: {}", n);
        }
        out
    }
}

/// One decimal, or as many as it takes to show the first significant
/// digit of values below 0.1.
pub fn format_percent(p: f64) -> String {
    if p <= 0.0 {
        return "0".to_owned();
    }
    let decimals = if p >= 0.1 {
        1
    } else {
        (-p.log10()).ceil() as usize
    };
    format!("{:.*}", decimals, p)
}

/// Label counts with percents; see [`CorpusStats`].
pub fn label_frequencies(tb: &Treebank) -> BTreeMap<String, LabelFrequency> {
    CorpusStats::compute(tb, Execution::default()).label_frequencies
}

/// Size and vocabulary statistics.
pub fn vocab_stats(tb: &Treebank) -> CorpusStats {
    CorpusStats::compute(tb, Execution::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Scheme, Token};

    type Row<'a> = (&'a str, &'a str, Upos, usize, &'a str);

    fn tb(sentences: Vec<Vec<Row>>) -> Treebank {
        Treebank {
            sentences: sentences
                .into_iter()
                .map(|toks| {
                    Sentence::new(
                        toks.into_iter()
                            .enumerate()
                            .map(|(i, (form, lemma, u, h, rel))| {
                                Token::new(i + 1, form).with_lemma(lemma).with_upos(u).attach(h, rel)
                            })
                            .collect(),
                    )
                })
                .collect(),
            source_scheme: Scheme::Ud,
        }
    }

    #[test]
    fn empty_is_zero() {
        let s = vocab_stats(&Treebank::new(Scheme::Ud));
        assert_eq!(s, CorpusStats::default());
    }

    #[test]
    fn hand_counted() {
        let t = tb(vec![
            vec![
                ("او", "او", Upos::Pron, 2, "nsubj"),
                ("کتاب", "کتاب", Upos::Noun, 3, "obj"),
                ("خرید", "خرید#خر", Upos::Verb, 0, "root"),
            ],
            vec![
                ("کتاب", "کتاب", Upos::Noun, 3, "obj"),
                ("نامه", "نامه", Upos::Noun, 3, "obj"),
                ("خریدند", "خرید#خر", Upos::Verb, 0, "root"),
                ("می‌خرد", "خرید#خر", Upos::Verb, 3, "conj"),
            ],
        ]);
        let s = vocab_stats(&t);
        assert_eq!(s.sentence_count, 2);
        assert_eq!(s.token_count, 7);
        assert_eq!(s.count("obj"), 3);
        assert_eq!(s.count("root"), 2);
        assert_eq!(s.word_type_count, 6);
        assert_eq!(s.lemma_type_count, 4);
        assert_eq!(s.verb_lemma_type_count, 1);
        let total: f64 = s.label_frequencies.values().map(|f| f.percent).sum();
        assert!((total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn verb_lemmas_before_tagging() {
        let mut t = tb(vec![vec![("رفت", "رفت#رو", Upos::Verb, 0, "ROOT")]]);
        let tok = &mut t.sentences[0].tokens[0];
        tok.upos = None;
        tok.xpos = Some("V".into());
        assert_eq!(vocab_stats(&t).verb_lemma_type_count, 1);
    }

    #[test]
    fn percent_precision() {
        assert_eq!(format_percent(13.96), "14.0");
        assert_eq!(format_percent(0.16), "0.2");
        assert_eq!(format_percent(0.1), "0.1");
        assert_eq!(format_percent(0.0118), "0.01");
        assert_eq!(format_percent(0.00118), "0.001");
        assert_eq!(format_percent(0.000196), "0.0002");
        assert_eq!(format_percent(0.0), "0");
    }

    #[test]
    fn passive_note() {
        let t = tb(vec![vec![
            ("x", "x", Upos::Noun, 2, "nsubj:pass"),
            ("y", "y", Upos::Verb, 0, "root"),
        ]]);
        let s = vocab_stats(&t);
        assert_eq!(s.notes().len(), 1);
        assert!(s.to_tsv().contains("# note:"));
    }

    #[test]
    fn sequential_matches_parallel() {
        let t = tb(vec![
            vec![("a", "a", Upos::Noun, 0, "root")],
            vec![("b", "b", Upos::Verb, 0, "root"), ("a", "a", Upos::Noun, 1, "obj")],
        ]);
        assert_eq!(
            CorpusStats::compute(&t, Execution::Sequential),
            CorpusStats::compute(&t, Execution::Parallel)
        );
    }
}
