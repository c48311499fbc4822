//! The relation mapping table: parsing and precondition matching.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::rotate::{choose_content, is_function_word, Role};
use super::voice::{detect_voice, Voice};
use crate::lexicon::LexiconConfig;
use crate::model::{Sentence, Upos, ROOT};

const BUILTIN_RULES: &str = include_str!("../../data/dep_rules.tsv");

#[derive(Debug, Error, PartialEq, Eq)]
#[error("rule table line {line}: {message}")]
pub struct RuleError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preaction {
    None,
    Cmr(Role),
    ConjRotation,
    NppRotation,
    Flip,
}

impl fmt::Display for Preaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preaction::None => f.write_str("-"),
            Preaction::Cmr(Role::Case) => f.write_str("CMR(case)"),
            Preaction::Cmr(Role::Mark) => f.write_str("CMR(mark)"),
            Preaction::ConjRotation => f.write_str("CONJ"),
            Preaction::NppRotation => f.write_str("NPP"),
            Preaction::Flip => f.write_str("FLIP"),
        }
    }
}

/// A token test inside a precondition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Test {
    Any,
    /// UPOS in `tags` or form in `forms`.
    Set { tags: Vec<Upos>, forms: Vec<String> },
    /// The token's own PerDT relation is one of these.
    Relation(Vec<String>),
    Copular,
    Modal,
    Voice(Voice),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    Pattern { head: Test, dep: Test },
    Sibling { label: String, exists: bool },
    HasDep,
    Child(Test),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingRule {
    pub source: String,
    /// All clauses must hold; empty means unconditional.
    pub precondition: Vec<Clause>,
    pub preaction: Preaction,
    pub target: String,
    /// Position among the rules for the same source label (0 first).
    pub priority: usize,
    /// Precondition as written in the table.
    pub condition_text: String,
}

impl MappingRule {
    pub fn is_unconditional(&self) -> bool {
        self.precondition.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    rules: BTreeMap<String, Vec<MappingRule>>,
}

fn class(name: &str) -> Option<Vec<Upos>> {
    Some(match name {
        "NOUN" => vec![Upos::Noun, Upos::Propn],
        "nominal" => vec![Upos::Noun, Upos::Propn, Upos::Pron],
        "cardinal" => vec![Upos::Num],
        other => vec![other.parse().ok()?],
    })
}

fn parse_test(s: &str) -> Result<Test, String> {
    let s = s.trim();
    match s {
        "?" => return Ok(Test::Any),
        "AUX" => return Ok(Test::Copular),
        "Modal" => return Ok(Test::Modal),
        "Active" => return Ok(Test::Voice(Voice::Active)),
        "Passive" => return Ok(Test::Voice(Voice::Passive)),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        if inner.contains('|') {
            return Ok(Test::Relation(
                inner.split('|').map(|x| x.trim().to_owned()).collect(),
            ));
        }
        let mut tags = Vec::new();
        let mut forms = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match class(item) {
                Some(c) => tags.extend(c),
                None => forms.push(item.to_owned()),
            }
        }
        return Ok(Test::Set { tags, forms });
    }
    class(s)
        .map(|tags| Test::Set {
            tags,
            forms: Vec::new(),
        })
        .ok_or_else(|| format!("unknown test `{}`", s))
}

fn parse_precondition(s: &str) -> Result<Vec<Clause>, String> {
    let s = s.trim();
    if s == "*" || s.eq_ignore_ascii_case("otherwise") || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';')
        .map(|c| {
            let c = c.trim();
            if c == "has-dep" {
                Ok(Clause::HasDep)
            } else if let Some(l) = c.strip_prefix("sib+") {
                Ok(Clause::Sibling {
                    label: l.to_owned(),
                    exists: true,
                })
            } else if let Some(l) = c.strip_prefix("sib-") {
                Ok(Clause::Sibling {
                    label: l.to_owned(),
                    exists: false,
                })
            } else if let Some(t) = c.strip_prefix("child+") {
                Ok(Clause::Child(parse_test(t)?))
            } else if let Some((h, d)) = c.split_once("->") {
                Ok(Clause::Pattern {
                    head: parse_test(h)?,
                    dep: parse_test(d)?,
                })
            } else {
                Err(format!("cannot read precondition `{}`", c))
            }
        })
        .collect()
}

fn parse_preaction(s: &str) -> Result<Preaction, String> {
    Ok(match s.trim() {
        "-" | "" => Preaction::None,
        "CMR(case)" => Preaction::Cmr(Role::Case),
        "CMR(mark)" => Preaction::Cmr(Role::Mark),
        "CONJ" => Preaction::ConjRotation,
        "NPP" => Preaction::NppRotation,
        "FLIP" => Preaction::Flip,
        other => return Err(format!("unknown preaction `{}`", other)),
    })
}

impl RuleTable {
    /// The default table.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_RULES).expect("built-in rule table is well-formed")
    }

    pub fn builtin_text() -> &'static str {
        BUILTIN_RULES
    }

    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut rules: BTreeMap<String, Vec<MappingRule>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| RuleError {
                line: i + 1,
                message,
            };
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 tab-separated columns, found {}", cols.len())));
            }
            let source = cols[0].trim().to_owned();
            let target = cols[3].trim().to_owned();
            if source.is_empty() || target.is_empty() {
                return Err(err("empty source or target".to_owned()));
            }
            let list = rules.entry(source.clone()).or_default();
            list.push(MappingRule {
                source,
                precondition: parse_precondition(cols[1]).map_err(err)?,
                preaction: parse_preaction(cols[2]).map_err(err)?,
                target,
                priority: list.len(),
                condition_text: cols[1].trim().to_owned(),
            });
        }
        Ok(RuleTable { rules })
    }

    pub fn rules_for(&self, label: &str) -> &[MappingRule] {
        self.rules.get(label).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MappingRule> {
        self.rules.values().flatten()
    }

    /// First rule for the token's label whose precondition holds.
    pub fn select(&self, s: &Sentence, id: usize, lexicon: &LexiconConfig) -> Option<&MappingRule> {
        let label = &s.tok(id).deprel;
        self.rules_for(label)
            .iter()
            .find(|r| matches(r, s, id, lexicon))
    }
}

fn test_token(test: &Test, s: &Sentence, id: usize, lexicon: &LexiconConfig) -> bool {
    if id == ROOT {
        return matches!(test, Test::Any);
    }
    let t = s.tok(id);
    match test {
        Test::Any => true,
        Test::Set { tags, forms } => {
            t.upos.is_some_and(|u| tags.contains(&u)) || forms.contains(&t.form)
        }
        Test::Relation(labels) => labels.contains(&t.deprel),
        Test::Copular => t.upos_is(Upos::Aux) || lexicon.is_copula(t),
        Test::Modal => lexicon.is_modal(t),
        Test::Voice(v) => detect_voice(s, id, lexicon) == *v,
    }
}

/// Whether `rule` applies to token `id`.
pub fn matches(rule: &MappingRule, s: &Sentence, id: usize, lexicon: &LexiconConfig) -> bool {
    let t = s.tok(id);
    let promoted = match rule.preaction {
        Preaction::Cmr(role) if is_function_word(t, role) => choose_content(s, id),
        _ => None,
    };
    rule.precondition.iter().all(|c| match c {
        Clause::Pattern { head, dep } => {
            test_token(head, s, t.head, lexicon)
                && (test_token(dep, s, id, lexicon)
                    || promoted.is_some_and(|p| test_token(dep, s, p, lexicon)))
        }
        Clause::Sibling { label, exists } => {
            let found = s
                .tokens
                .iter()
                .any(|o| o.id != id && o.head == t.head && o.deprel == *label);
            found == *exists
        }
        Clause::HasDep => s.tokens.iter().any(|o| o.head == id),
        Clause::Child(test) => s
            .tokens
            .iter()
            .any(|o| o.head == id && test_token(test, s, o.id, lexicon)),
    })
}
