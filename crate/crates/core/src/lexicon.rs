//! Word lists the conversion relies on, loaded from line-oriented
//! `key: value` data files.
//!
//! A lexicon directory holds four files; the same files ship with the
//! crate and back [`LexiconConfig::builtin`]:
//!
//! * `verb_constructions.txt` multiword verb patterns
//! * `clitics.txt` pronominal clitics and their full pronouns
//! * `scale_numerals.txt` thousand/million/... and plural suffixes
//! * `words.txt` modals, copulas, PART exceptions, ordinals, preverbs, ...

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::Token;
use crate::tokenize::VerbRules;

pub const VERB_CONSTRUCTIONS_FILE: &str = "verb_constructions.txt";
pub const CLITICS_FILE: &str = "clitics.txt";
pub const SCALE_NUMERALS_FILE: &str = "scale_numerals.txt";
pub const WORDS_FILE: &str = "words.txt";

pub const ZWNJ: char = '\u{200c}';

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon file {0} is missing")]
    Missing(PathBuf),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
}

impl LexiconError {
    pub(crate) fn parse(file: &str, line: usize, message: impl Into<String>) -> Self {
        LexiconError::Parse {
            file: file.to_owned(),
            line,
            message: message.into(),
        }
    }
}

/// One `key: value` entry of a data file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry<'a> {
    pub line: usize,
    pub key: &'a str,
    pub value: &'a str,
}

/// Splits a data file into entries, skipping blank lines and `#` comments.
pub fn entries<'a>(file: &str, text: &'a str) -> Result<Vec<Entry<'a>>, LexiconError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| LexiconError::parse(file, i + 1, "expected `key: value`"))?;
        out.push(Entry {
            line: i + 1,
            key: key.trim(),
            value: value.trim(),
        });
    }
    Ok(out)
}

/// Splits `a => b`.
pub(crate) fn arrow<'a>(
    file: &str,
    e: &Entry<'a>,
) -> Result<(&'a str, &'a str), LexiconError> {
    e.value
        .split_once("=>")
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| LexiconError::parse(file, e.line, "expected `<items> => <lemma>`"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clitic {
    pub suffix: String,
    pub lemma: String,
}

/// Scale words that were tagged as nouns but behave as numerals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleNumeralList {
    pub forms: BTreeSet<String>,
    pub plural_suffixes: Vec<String>,
}

impl ScaleNumeralList {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut forms = BTreeSet::new();
        let mut plural_suffixes = Vec::new();
        for e in entries(SCALE_NUMERALS_FILE, text)? {
            match e.key {
                "scale" => {
                    forms.insert(e.value.to_owned());
                }
                "plural_suffix" => plural_suffixes.push(e.value.to_owned()),
                other => {
                    return Err(LexiconError::parse(
                        SCALE_NUMERALS_FILE,
                        e.line,
                        format!("unknown key `{}`", other),
                    ))
                }
            }
        }
        if forms.is_empty() {
            return Err(LexiconError::parse(SCALE_NUMERALS_FILE, 0, "no scale numerals"));
        }
        Ok(ScaleNumeralList {
            forms,
            plural_suffixes,
        })
    }

    /// Looks `form` up, stripping one plural suffix if needed.
    /// Returns `Some(is_plural)` on a hit.
    pub fn lookup(&self, form: &str) -> Option<bool> {
        if self.forms.contains(form) {
            return Some(false);
        }
        self.plural_suffixes.iter().find_map(|suffix| {
            let stem = form.strip_suffix(suffix.as_str())?;
            let stem = stem.trim_end_matches(ZWNJ);
            self.forms.contains(stem).then_some(true)
        })
    }
}

/// The assorted closed word lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordLists {
    pub modals: BTreeSet<String>,
    pub modals_if_tagged: BTreeSet<String>,
    pub copulas: BTreeSet<String>,
    pub copula_forms: BTreeSet<String>,
    pub part_adp: BTreeSet<String>,
    pub part_intj: BTreeSet<String>,
    pub ordinal_suffixes: Vec<String>,
    pub ordinal_words: BTreeSet<String>,
    pub cardinal_exceptions: BTreeSet<String>,
    pub preverbs: BTreeSet<String>,
    pub light_verbs: BTreeSet<String>,
    pub passive_source_lemmas: BTreeSet<String>,
    pub shodan_lemma: String,
    pub propn: BTreeSet<String>,
    pub number_conjunctions: BTreeSet<String>,
    pub typos: Vec<Vec<String>>,
}

impl WordLists {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut w = WordLists::default();
        for e in entries(WORDS_FILE, text)? {
            let v = e.value.to_owned();
            match e.key {
                "modal" => {
                    w.modals.insert(v);
                }
                "modal_if_tagged" => {
                    w.modals_if_tagged.insert(v);
                }
                "copula" => {
                    w.copulas.insert(v);
                }
                "copula_form" => {
                    w.copula_forms.insert(v);
                }
                "part_adp" => {
                    w.part_adp.insert(v);
                }
                "part_intj" => {
                    w.part_intj.insert(v);
                }
                "ordinal_suffix" => w.ordinal_suffixes.push(v),
                "ordinal_word" => {
                    w.ordinal_words.insert(v);
                }
                "cardinal_exception" => {
                    w.cardinal_exceptions.insert(v);
                }
                "preverb" => {
                    w.preverbs.insert(v);
                }
                "light_verb" => {
                    w.light_verbs.insert(v);
                }
                "passive_source_lemma" => {
                    w.passive_source_lemmas.insert(v);
                }
                "shodan_lemma" => w.shodan_lemma = v,
                "propn" => {
                    w.propn.insert(v);
                }
                "number_conjunction" => {
                    w.number_conjunctions.insert(v);
                }
                "typo" => w
                    .typos
                    .push(e.value.split_whitespace().map(str::to_owned).collect()),
                other => {
                    return Err(LexiconError::parse(
                        WORDS_FILE,
                        e.line,
                        format!("unknown key `{}`", other),
                    ))
                }
            }
        }
        if w.shodan_lemma.is_empty() {
            return Err(LexiconError::parse(WORDS_FILE, 0, "shodan_lemma is required"));
        }
        Ok(w)
    }
}

/// Everything the conversion needs to know about Persian words.
#[derive(Debug, Clone)]
pub struct LexiconConfig {
    pub verbs: VerbRules,
    pub clitics: Vec<Clitic>,
    pub scale_numerals: ScaleNumeralList,
    pub words: WordLists,
}

const BUILTIN_VERBS: &str = include_str!("../data/verb_constructions.txt");
const BUILTIN_CLITICS: &str = include_str!("../data/clitics.txt");
const BUILTIN_SCALE: &str = include_str!("../data/scale_numerals.txt");
const BUILTIN_WORDS: &str = include_str!("../data/words.txt");

impl LexiconConfig {
    /// The lexicon shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_texts(BUILTIN_VERBS, BUILTIN_CLITICS, BUILTIN_SCALE, BUILTIN_WORDS)
            .expect("built-in lexicon is well-formed")
    }

    pub fn from_texts(
        verbs: &str,
        clitics: &str,
        scale: &str,
        words: &str,
    ) -> Result<Self, LexiconError> {
        Ok(LexiconConfig {
            verbs: VerbRules::parse(verbs)?,
            clitics: parse_clitics(clitics)?,
            scale_numerals: ScaleNumeralList::parse(scale)?,
            words: WordLists::parse(words)?,
        })
    }

    /// Loads the four data files from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, LexiconError> {
        let read = |name: &str| -> Result<String, LexiconError> {
            let path = dir.join(name);
            if !path.exists() {
                return Err(LexiconError::Missing(path));
            }
            fs::read_to_string(&path).map_err(|source| LexiconError::Io { path, source })
        };
        Self::from_texts(
            &read(VERB_CONSTRUCTIONS_FILE)?,
            &read(CLITICS_FILE)?,
            &read(SCALE_NUMERALS_FILE)?,
            &read(WORDS_FILE)?,
        )
    }

    /// Contents of the built-in data files, keyed by file name.
    pub fn builtin_files() -> [(&'static str, &'static str); 4] {
        [
            (VERB_CONSTRUCTIONS_FILE, BUILTIN_VERBS),
            (CLITICS_FILE, BUILTIN_CLITICS),
            (SCALE_NUMERALS_FILE, BUILTIN_SCALE),
            (WORDS_FILE, BUILTIN_WORDS),
        ]
    }

    /// True if the last word of `form` inflects shodan.
    pub fn is_shodan_form(&self, form: &str) -> bool {
        let last = form.rsplit(' ').next().unwrap_or(form);
        self.verbs
            .set("shodan")
            .is_some_and(|set| set.forms.contains(last))
    }

    pub fn is_copula(&self, token: &Token) -> bool {
        self.words.copulas.contains(&token.lemma) || self.words.copula_forms.contains(&token.form)
    }

    pub fn is_modal(&self, token: &Token) -> bool {
        if self.words.modals.contains(&token.lemma) {
            return true;
        }
        let tagged = token.feats.get("fpos").map(String::as_str) == Some("MODL");
        tagged && (self.words.modals_if_tagged.contains(&token.lemma) || token.xpos_is("V"))
    }

    /// Ordinality test for numerals: an ordinal suffix or a listed word.
    pub fn is_ordinal(&self, form: &str) -> bool {
        let form = form.trim_end_matches(ZWNJ);
        if self.words.ordinal_words.contains(form) {
            return true;
        }
        if self.words.cardinal_exceptions.contains(form) {
            return false;
        }
        self.words.ordinal_suffixes.iter().any(|s| {
            form.strip_suffix(s.as_str())
                .is_some_and(|stem| !stem.trim_end_matches(ZWNJ).is_empty())
        })
    }
}

fn parse_clitics(text: &str) -> Result<Vec<Clitic>, LexiconError> {
    let mut out = Vec::new();
    for e in entries(CLITICS_FILE, text)? {
        if e.key != "clitic" {
            return Err(LexiconError::parse(
                CLITICS_FILE,
                e.line,
                format!("unknown key `{}`", e.key),
            ));
        }
        let (suffix, lemma) = arrow(CLITICS_FILE, &e)?;
        out.push(Clitic {
            suffix: suffix.to_owned(),
            lemma: lemma.to_owned(),
        });
    }
    // Longest suffix first so that e.g. `شان` wins over `ش`.
    out.sort_by_key(|c| std::cmp::Reverse(c.suffix.chars().count()));
    if out.is_empty() {
        return Err(LexiconError::parse(CLITICS_FILE, 0, "no clitics"));
    }
    Ok(out)
}
