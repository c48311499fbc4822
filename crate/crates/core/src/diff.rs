//! Token-level comparison of two CoNLL-U treebanks over the same sentences.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{Sentence, Treebank};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Field {
    Upos,
    Head,
    Deprel,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Upos => "upos",
            Field::Head => "head",
            Field::Deprel => "deprel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub sentence: usize,
    pub sent_id: String,
    pub token: usize,
    pub field: Field,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentNote {
    pub sentence: usize,
    pub sent_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiffReport {
    pub sentences_compared: usize,
    pub tokens_compared: usize,
    pub disagreements: Vec<Disagreement>,
    /// (left label, right label) → count, over aligned sentences only.
    pub confusion: BTreeMap<(String, String), usize>,
    pub alignment: Vec<AlignmentNote>,
}

fn upos_str(s: &Sentence, i: usize) -> String {
    s.tokens[i].upos.map_or("_", |u| u.as_str()).to_owned()
}

/// Compares sentences pairwise by position. Sentences whose token counts
/// differ get an alignment note and are left out of all counts.
pub fn diff_treebanks(a: &Treebank, b: &Treebank) -> DiffReport {
    let mut r = DiffReport::default();
    let n = a.sentences.len().max(b.sentences.len());
    for i in 0..n {
        let (sa, sb) = match (a.sentences.get(i), b.sentences.get(i)) {
            (Some(x), Some(y)) => (x, y),
            (Some(x), None) | (None, Some(x)) => {
                r.alignment.push(AlignmentNote {
                    sentence: i + 1,
                    sent_id: x.sent_id.clone(),
                    message: "present in one file only".to_owned(),
                });
                continue;
            }
            (None, None) => unreachable!(),
        };
        if sa.len() != sb.len() {
            r.alignment.push(AlignmentNote {
                sentence: i + 1,
                sent_id: sa.sent_id.clone(),
                message: format!("token counts differ: {} vs {}", sa.len(), sb.len()),
            });
            continue;
        }
        r.sentences_compared += 1;
        for (k, (ta, tb)) in sa.tokens.iter().zip(&sb.tokens).enumerate() {
            r.tokens_compared += 1;
            let mut push = |field, left: String, right: String| {
                if left != right {
                    r.disagreements.push(Disagreement {
                        sentence: i + 1,
                        sent_id: sa.sent_id.clone(),
                        token: ta.id,
                        field,
                        left,
                        right,
                    });
                }
            };
            push(Field::Upos, upos_str(sa, k), upos_str(sb, k));
            push(Field::Head, ta.head.to_string(), tb.head.to_string());
            push(Field::Deprel, ta.deprel.clone(), tb.deprel.clone());
            if ta.deprel != tb.deprel {
                *r.confusion
                    .entry((ta.deprel.clone(), tb.deprel.clone()))
                    .or_default() += 1;
            }
        }
    }
    r
}

impl DiffReport {
    pub fn count(&self, field: Field) -> usize {
        self.disagreements.iter().filter(|d| d.field == field).count()
    }

    pub fn is_identical(&self) -> bool {
        self.disagreements.is_empty() && self.alignment.is_empty()
    }

    /// Plain-text report: summary, alignment notes, confusion pairs by
    /// descending count, then every disagreement.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentences_compared: {}", self.sentences_compared);
        let _ = writeln!(out, "tokens_compared: {}", self.tokens_compared);
        for f in [Field::Upos, Field::Head, Field::Deprel] {
            let _ = writeln!(out, "disagree.{}: {}", f.as_str(), self.count(f));
        }
        let _ = writeln!(out, "alignment_failures: {}", self.alignment.len());
        for n in &self.alignment {
            let _ = writeln!(out, "align\t{}\t{}\t{}", n.sentence, n.sent_id, n.message);
        }
        let mut pairs: Vec<_> = self.confusion.iter().collect();
        pairs.sort_by(|x, y| y.1.cmp(x.1).then(x.0.cmp(y.0)));
        for ((l, r), c) in pairs {
            let _ = writeln!(out, "confusion\t{}\t{}\t{}", l, r, c);
        }
        for d in &self.disagreements {
            let _ = writeln!(
                out,
                "token\t{}\t{}\t{}\t{}\t{}\t{}",
                d.sentence,
                d.sent_id,
                d.token,
                d.field.as_str(),
                d.left,
                d.right
            );
        }
        out
    }
}
