//! Systematic corrections applied to PerDT before conversion: reversal of
//! verbal conjunction chains, retagging of scale numerals, and the lemma
//! of shodan inflections.

use std::fmt::Write as _;

use crate::conll::{FPOS_KEY, ORIG_FORM_KEY};
use crate::lexicon::{LexiconConfig, ScaleNumeralList};
use crate::model::{Sentence, Treebank, ROOT};

/// MISC key naming the correction applied to a token.
pub const RETAG_KEY: &str = "Retag";
/// MISC key keeping the source tag of a retagged token.
pub const ORIG_XPOS_KEY: &str = "OrigXpos";

const VCONJ: &str = "VCONJ";
const POSDEP: &str = "POSDEP";

/// One step of a verbal chain: `lower` depends on `upper`, either directly
/// or through a conjunction word.
#[derive(Clone, Copy, Debug)]
struct Link {
    lower: usize,
    upper: usize,
    via: Option<usize>,
}

fn up_link(s: &Sentence, id: usize) -> Option<Link> {
    let t = s.tok(id);
    if !t.xpos_is("V") || t.head == ROOT {
        return None;
    }
    let h = s.tok(t.head);
    if t.deprel == VCONJ && h.xpos_is("V") {
        return Some(Link {
            lower: id,
            upper: h.id,
            via: None,
        });
    }
    if t.deprel == POSDEP && h.xpos_is("CONJ") && h.deprel == VCONJ && h.head != ROOT {
        let v = s.tok(h.head);
        if v.xpos_is("V") {
            return Some(Link {
                lower: id,
                upper: v.id,
                via: Some(h.id),
            });
        }
    }
    None
}

/// Reverses chains of VCONJ-linked verbs.
///
/// PerDT attaches verbal conjuncts from the last to the first. Each
/// maximal unbranched chain is reversed edge by edge: the bottom verb
/// takes the chain's external attachment and every link points the other
/// way, so applying the function twice restores the input. Conjunction
/// words on a link keep their position between the two verbs. Other
/// dependents stay with their verbs; branching chains are left alone.
pub fn reverse_verbal_conjunction_chains(sentence: &Sentence) -> Sentence {
    let links: Vec<Option<Link>> = sentence.ids().map(|id| up_link(sentence, id)).collect();
    let mut down: Vec<Vec<Link>> = vec![Vec::new(); sentence.len() + 1];
    for l in links.iter().flatten() {
        down[l.upper].push(*l);
    }
    let mut out = sentence.clone();
    for top in sentence.ids() {
        if links[top - 1].is_some() || down[top].is_empty() {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = top;
        let mut branched = false;
        while let Some(l) = down[cur].first() {
            if down[cur].len() > 1 {
                branched = true;
                break;
            }
            chain.push(*l);
            cur = l.lower;
        }
        if branched {
            continue;
        }
        let bottom = cur;
        let (ext_head, ext_rel) = (sentence.tok(top).head, sentence.tok(top).deprel.clone());
        {
            let b = out.tok_mut(bottom);
            b.head = ext_head;
            b.deprel = ext_rel;
        }
        for l in chain {
            match l.via {
                None => {
                    let u = out.tok_mut(l.upper);
                    u.head = l.lower;
                    u.deprel = VCONJ.to_owned();
                }
                Some(c) => {
                    let cw = out.tok_mut(c);
                    cw.head = l.lower;
                    cw.deprel = VCONJ.to_owned();
                    let u = out.tok_mut(l.upper);
                    u.head = c;
                    u.deprel = POSDEP.to_owned();
                }
            }
        }
    }
    out
}

/// Retags scale words (thousand, million, ...) tagged as nouns as numerals.
///
/// A scale word attached to a noun becomes PRENUM when it precedes that
/// noun and POSTNUM when it follows it; without a counted noun it becomes
/// PRENUM, except plural forms, which are genuine nouns there.
pub fn retag_scale_numerals(sentence: &Sentence, list: &ScaleNumeralList) -> Sentence {
    let mut out = sentence.clone();
    for t in &sentence.tokens {
        if !t.xpos_is("N") {
            continue;
        }
        let Some(plural) = list.lookup(&t.form) else {
            continue;
        };
        let counted = (t.head != ROOT)
            .then(|| sentence.tok(t.head))
            .filter(|h| h.xpos_is("N") && list.lookup(&h.form).is_none());
        let tag = match counted {
            Some(h) if h.id < t.id => "POSTNUM",
            Some(_) => "PRENUM",
            None if plural => continue,
            None => "PRENUM",
        };
        let o = out.tok_mut(t.id);
        let orig = match o.feats.remove(FPOS_KEY) {
            Some(f) => format!("N,{}", f),
            None => "N".to_owned(),
        };
        o.xpos = Some(tag.to_owned());
        o.misc.set(ORIG_XPOS_KEY, orig);
        o.misc.set(RETAG_KEY, "scale-numeral");
    }
    out
}

/// Gives inflections of shodan their own lemma instead of kardan's, and
/// drops the passive fine tag that came with it.
pub fn fix_passive_lemma(sentence: &Sentence, lexicon: &LexiconConfig) -> Sentence {
    let words = &lexicon.words;
    let mut out = sentence.clone();
    for t in out.tokens.iter_mut() {
        let first = t.form.split(' ').next().unwrap_or("");
        if !t.xpos_is("V")
            || !words.passive_source_lemmas.contains(&t.lemma)
            || !lexicon.is_shodan_form(first)
        {
            continue;
        }
        t.lemma = words.shodan_lemma.clone();
        if t.feats.get(FPOS_KEY).map(String::as_str) == Some("PASS") {
            t.feats.insert(FPOS_KEY.to_owned(), "ACT".to_owned());
        }
        t.misc.set(RETAG_KEY, "lemma-shodan");
    }
    out
}

/// All three corrections in order.
pub fn apply_all(sentence: &Sentence, lexicon: &LexiconConfig) -> Sentence {
    let s = reverse_verbal_conjunction_chains(sentence);
    let s = retag_scale_numerals(&s, &lexicon.scale_numerals);
    fix_passive_lemma(&s, lexicon)
}

/// Counts of corrected tokens, by category.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrectionCounts {
    pub lemma: usize,
    pub pos: usize,
    pub fpos: usize,
    pub head: usize,
    pub label: usize,
    pub word_form: usize,
    pub tokens: usize,
}

impl CorrectionCounts {
    /// Compares sentences before and after the corrections (same tokens).
    pub fn add(&mut self, before: &Sentence, after: &Sentence) {
        for (b, a) in before.tokens.iter().zip(&after.tokens) {
            self.tokens += 1;
            self.lemma += usize::from(b.lemma != a.lemma);
            self.pos += usize::from(b.xpos != a.xpos);
            self.fpos += usize::from(b.feats.get(FPOS_KEY) != a.feats.get(FPOS_KEY));
            self.head += usize::from(b.head != a.head);
            self.label += usize::from(b.deprel != a.deprel);
            self.word_form += usize::from(a.misc.contains(ORIG_FORM_KEY));
        }
    }

    pub fn merge(mut self, other: &CorrectionCounts) -> Self {
        self.lemma += other.lemma;
        self.pos += other.pos;
        self.fpos += other.fpos;
        self.head += other.head;
        self.label += other.label;
        self.word_form += other.word_form;
        self.tokens += other.tokens;
        self
    }

    pub fn for_treebank(before: &Treebank, after: &Treebank) -> Self {
        let mut c = CorrectionCounts::default();
        for (b, a) in before.sentences.iter().zip(&after.sentences) {
            c.add(b, a);
        }
        c
    }

    /// Tab-separated report: category, kind, count, percent of tokens.
    /// Only rule-based corrections are made here, so "Others" is always 0.
    pub fn to_tsv(&self) -> String {
        let pct = |n: usize| {
            if self.tokens == 0 {
                0.0
            } else {
                n as f64 * 100.0 / self.tokens as f64
            }
        };
        let mut out = String::from("category\tkind\tcount\tpercent\n");
        for (name, n) in [
            ("Lemma", self.lemma),
            ("POS", self.pos),
            ("FPOS", self.fpos),
            ("Dependency head", self.head),
            ("Dependency label", self.label),
        ] {
            let _ = writeln!(out, "{}\tSystematic\t{}\t{:.3}", name, n, pct(n));
            let _ = writeln!(out, "{}\tOthers\t0\t0.000", name);
        }
        let _ = writeln!(
            out,
            "Word Form\t-\t{}\t{:.3}",
            self.word_form,
            pct(self.word_form)
        );
        out
    }
}
