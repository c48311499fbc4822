//! Part-of-speech mapping from the PerDT tag set to UD, conditioned on
//! named-entity marks, lexical identity and ordinality.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lexicon::LexiconConfig;
use crate::model::{Sentence, Token, Upos};

/// MISC key carrying the entity class (PER or LOC).
pub const NER_KEY: &str = "NER";
/// MISC key recording that the entity mark came from the identifier heuristic.
pub const NER_SOURCE_KEY: &str = "NerSource";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosError {
    #[error("token {token}: unknown PerDT tag `{tag}`")]
    UnknownTag { token: usize, tag: String },
    #[error("NER annotation has {found} tags for a sentence of {expected} tokens")]
    LengthMismatch { expected: usize, found: usize },
}

/// Coarse PerDT part-of-speech tags, plus the AUX tag introduced when
/// multiword verbs are split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerdtTag {
    V,
    N,
    Subr,
    Conj,
    Adv,
    Adj,
    Pr,
    Punc,
    Adr,
    Iden,
    Part,
    Prem,
    Prenum,
    Prep,
    Postp,
    Postnum,
    Psus,
    Aux,
}

impl PerdtTag {
    /// The source tag inventory (AUX excluded).
    pub const SOURCE: [PerdtTag; 17] = [
        PerdtTag::V,
        PerdtTag::N,
        PerdtTag::Subr,
        PerdtTag::Conj,
        PerdtTag::Adv,
        PerdtTag::Adj,
        PerdtTag::Pr,
        PerdtTag::Punc,
        PerdtTag::Adr,
        PerdtTag::Iden,
        PerdtTag::Part,
        PerdtTag::Prem,
        PerdtTag::Prenum,
        PerdtTag::Prep,
        PerdtTag::Postp,
        PerdtTag::Postnum,
        PerdtTag::Psus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PerdtTag::V => "V",
            PerdtTag::N => "N",
            PerdtTag::Subr => "SUBR",
            PerdtTag::Conj => "CONJ",
            PerdtTag::Adv => "ADV",
            PerdtTag::Adj => "ADJ",
            PerdtTag::Pr => "PR",
            PerdtTag::Punc => "PUNC",
            PerdtTag::Adr => "ADR",
            PerdtTag::Iden => "IDEN",
            PerdtTag::Part => "PART",
            PerdtTag::Prem => "PREM",
            PerdtTag::Prenum => "PRENUM",
            PerdtTag::Prep => "PREP",
            PerdtTag::Postp => "POSTP",
            PerdtTag::Postnum => "POSTNUM",
            PerdtTag::Psus => "PSUS",
            PerdtTag::Aux => "AUX",
        }
    }
}

impl fmt::Display for PerdtTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PerdtTag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "POSNUM" {
            return Ok(PerdtTag::Postnum);
        }
        PerdtTag::SOURCE
            .iter()
            .chain(std::iter::once(&PerdtTag::Aux))
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityTag {
    Per,
    Loc,
    Other,
    None,
}

impl EntityTag {
    /// Accepts bare and BIO-prefixed class names; anything unrecognised
    /// is an entity class we do not use.
    pub fn parse(tag: &str) -> Self {
        let bare = tag
            .strip_prefix("B-")
            .or_else(|| tag.strip_prefix("I-"))
            .unwrap_or(tag);
        match bare.to_ascii_uppercase().as_str() {
            "PER" | "PERSON" | "PERS" => EntityTag::Per,
            "LOC" | "LOCATION" => EntityTag::Loc,
            "O" | "_" | "-" | "" | "NONE" => EntityTag::None,
            _ => EntityTag::Other,
        }
    }

    fn misc_value(self) -> Option<&'static str> {
        match self {
            EntityTag::Per => Some("PER"),
            EntityTag::Loc => Some("LOC"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NerSource {
    External,
    IdenHeuristic,
}

/// Per-token entity tags for one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerAnnotation {
    pub tags: Vec<EntityTag>,
    pub source: NerSource,
}

/// Parses a sidecar file: one tag per line (the last whitespace-separated
/// field, so `form<TAB>tag` lines work too), a blank line between sentences.
pub fn parse_ner_sidecar(text: &str) -> Vec<NerAnnotation> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(NerAnnotation {
                    tags: std::mem::take(&mut cur),
                    source: NerSource::External,
                });
            }
            continue;
        }
        let tag = line.split_whitespace().last().unwrap_or("O");
        cur.push(EntityTag::parse(tag));
    }
    if !cur.is_empty() {
        out.push(NerAnnotation {
            tags: cur,
            source: NerSource::External,
        });
    }
    out
}

/// Marks person and location entities in MISC.
///
/// With an external annotation the tags are copied over; without one,
/// nouns in a noun phrase introduced by an identifier (IDEN, e.g. "Dr.")
/// are marked as persons.
pub fn apply_ner(sentence: &Sentence, ner: Option<&NerAnnotation>) -> Result<Sentence, PosError> {
    let mut out = sentence.clone();
    match ner {
        Some(ann) => {
            if ann.tags.len() != sentence.len() {
                return Err(PosError::LengthMismatch {
                    expected: sentence.len(),
                    found: ann.tags.len(),
                });
            }
            for (t, tag) in out.tokens.iter_mut().zip(&ann.tags) {
                if let Some(v) = tag.misc_value() {
                    t.misc.set(NER_KEY, v);
                    if ann.source == NerSource::IdenHeuristic {
                        t.misc.set(NER_SOURCE_KEY, "IDEN");
                    }
                }
            }
        }
        None => {
            let tags = iden_heuristic(sentence);
            return apply_ner(
                sentence,
                Some(&NerAnnotation {
                    tags,
                    source: NerSource::IdenHeuristic,
                }),
            );
        }
    }
    Ok(out)
}

fn iden_heuristic(sentence: &Sentence) -> Vec<EntityTag> {
    let mut tags: Vec<EntityTag> = sentence
        .tokens
        .iter()
        .map(|t| {
            t.misc
                .get(NER_KEY)
                .map(EntityTag::parse)
                .unwrap_or(EntityTag::None)
        })
        .collect();
    for iden in sentence.tokens.iter().filter(|t| t.xpos_is("IDEN")) {
        // Nouns following the identifier inside its own phrase.
        for t in &sentence.tokens[iden.id..] {
            if t.xpos_is("N") && sentence.is_descendant(t.id, iden.id) {
                tags[t.id - 1] = EntityTag::Per;
            }
        }
        // Identifier as pre-modifier of the adjacent noun.
        if iden.head == iden.id + 1 && sentence.tok(iden.head).xpos_is("N") {
            tags[iden.head - 1] = EntityTag::Per;
        }
    }
    tags
}

fn has_entity(token: &Token, lexicon: &LexiconConfig) -> bool {
    matches!(token.misc.get(NER_KEY), Some("PER") | Some("LOC"))
        || lexicon.words.propn.contains(&token.form)
}

/// The UD tag for one token.
pub fn map_pos(token: &Token, lexicon: &LexiconConfig) -> Result<Upos, PosError> {
    let unknown = || PosError::UnknownTag {
        token: token.id,
        tag: token.xpos.clone().unwrap_or_default(),
    };
    let tag: PerdtTag = token
        .xpos
        .as_deref()
        .ok_or_else(unknown)?
        .parse()
        .map_err(|_| unknown())?;
    let words = &lexicon.words;
    Ok(match tag {
        PerdtTag::V => Upos::Verb,
        PerdtTag::N | PerdtTag::Adj if has_entity(token, lexicon) => Upos::Propn,
        PerdtTag::N => Upos::Noun,
        PerdtTag::Adj => Upos::Adj,
        PerdtTag::Subr => Upos::Sconj,
        PerdtTag::Conj => Upos::Cconj,
        PerdtTag::Adv => Upos::Adv,
        PerdtTag::Pr => Upos::Pron,
        PerdtTag::Punc => Upos::Punct,
        PerdtTag::Adr | PerdtTag::Psus => Upos::Intj,
        PerdtTag::Iden => Upos::Propn,
        PerdtTag::Part if words.part_adp.contains(&token.form) => Upos::Adp,
        PerdtTag::Part if words.part_intj.contains(&token.form) => Upos::Intj,
        PerdtTag::Part => Upos::Part,
        PerdtTag::Prem => Upos::Det,
        PerdtTag::Prenum | PerdtTag::Postnum if lexicon.is_ordinal(&token.form) => Upos::Adj,
        PerdtTag::Prenum | PerdtTag::Postnum => Upos::Num,
        PerdtTag::Prep | PerdtTag::Postp => Upos::Adp,
        PerdtTag::Aux => Upos::Aux,
    })
}

/// Sets the UD tag of every token.
pub fn map_sentence_pos(sentence: &Sentence, lexicon: &LexiconConfig) -> Result<Sentence, PosError> {
    let mut out = sentence.clone();
    for t in out.tokens.iter_mut() {
        t.upos = Some(map_pos(t, lexicon)?);
    }
    Ok(out)
}
