//! Checks on converted sentences: tree well-formedness, function-word
//! leaves, the label inventory, and a few Persian-specific lints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::conll::Severity;
use crate::lexicon::LexiconConfig;
use crate::model::{Sentence, Treebank, Upos, ROOT};

const BUILTIN_REGISTRY: &str = include_str!("../data/validation_rules.txt");

pub const ROOT_COUNT: &str = "root-count";
pub const CYCLE: &str = "cycle";
pub const BAD_HEAD: &str = "bad-head";
pub const ROOT_LABEL: &str = "root-label";
pub const LEAF: &str = "leaf";
pub const INVENTORY: &str = "inventory";
pub const SHODAN_COP: &str = "shodan-cop";
pub const NMOD_HEAD: &str = "nmod-head";
pub const PREVERB_OBJ: &str = "preverb-obj";
pub const CSUBJ_MISSING: &str = "csubj-missing";

const CODES: [&str; 10] = [
    ROOT_COUNT,
    CYCLE,
    BAD_HEAD,
    ROOT_LABEL,
    LEAF,
    INVENTORY,
    SHODAN_COP,
    NMOD_HEAD,
    PREVERB_OBJ,
    CSUBJ_MISSING,
];

#[derive(Debug, Error, PartialEq, Eq)]
#[error("validation registry line {line}: {message}")]
pub struct RegistryError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    /// `None` when the rule is switched off.
    pub severity: Option<Severity>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    pub rules: BTreeMap<String, RuleSpec>,
    pub allowed: BTreeSet<String>,
    pub leaf: BTreeSet<String>,
    /// Relations allowed under a leaf relation.
    pub leaf_dependents: BTreeSet<String>,
    pub nmod_heads: BTreeSet<Upos>,
}

impl Registry {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_REGISTRY).expect("built-in registry is well-formed")
    }

    pub fn parse(text: &str) -> Result<Self, RegistryError> {
        let mut reg = Registry {
            rules: BTreeMap::new(),
            allowed: BTreeSet::new(),
            leaf: BTreeSet::new(),
            leaf_dependents: BTreeSet::new(),
            nmod_heads: BTreeSet::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| RegistryError {
                line: i + 1,
                message,
            };
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err("expected `key: value`".to_owned()))?;
            let rest = rest.trim();
            match key.trim() {
                "rule" => {
                    let mut parts = rest.splitn(3, ' ');
                    let code = parts.next().unwrap_or("");
                    if !CODES.contains(&code) {
                        return Err(err(format!("unknown rule code `{}`", code)));
                    }
                    let severity = match parts.next() {
                        Some("ERROR") => Some(Severity::Error),
                        Some("WARN") => Some(Severity::Warn),
                        Some("off") => None,
                        other => return Err(err(format!("bad severity {:?}", other))),
                    };
                    let description = parts.next().unwrap_or("").to_owned();
                    reg.rules.insert(
                        code.to_owned(),
                        RuleSpec {
                            severity,
                            description,
                        },
                    );
                }
                "allowed" => reg.allowed.extend(rest.split_whitespace().map(str::to_owned)),
                "leaf" => reg.leaf.extend(rest.split_whitespace().map(str::to_owned)),
                "leaf_dependent" => reg
                    .leaf_dependents
                    .extend(rest.split_whitespace().map(str::to_owned)),
                "nmod_head" => {
                    for tag in rest.split_whitespace() {
                        let u: Upos = tag.parse().map_err(|e| err(format!("{}", e)))?;
                        reg.nmod_heads.insert(u);
                    }
                }
                other => return Err(err(format!("unknown key `{}`", other))),
            }
        }
        Ok(reg)
    }

    fn severity(&self, code: &str) -> Option<Severity> {
        self.rules.get(code).and_then(|r| r.severity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub sent_id: String,
    pub token: Option<usize>,
    pub rule: String,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    /// One tab-separated report line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = self.token.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.sent_id, token, self.rule, self.severity, self.message
        )
    }
}

/// Runs the registry's checks on sentences.
#[derive(Debug, Clone)]
pub struct Validator {
    pub registry: Registry,
    pub lexicon: LexiconConfig,
}

impl Validator {
    pub fn new(registry: Registry, lexicon: LexiconConfig) -> Self {
        Validator { registry, lexicon }
    }

    pub fn builtin() -> Self {
        Self::new(Registry::builtin(), LexiconConfig::builtin())
    }

    pub fn validate(&self, s: &Sentence) -> Vec<ValidationIssue> {
        let mut out = Vec::new();
        let mut push = |code: &str, token: Option<usize>, message: String| {
            if let Some(severity) = self.registry.severity(code) {
                out.push(ValidationIssue {
                    sent_id: s.sent_id.clone(),
                    token,
                    rule: code.to_owned(),
                    severity,
                    message,
                });
            }
        };
        let n = s.len();
        let mut heads_ok = true;
        for (i, t) in s.tokens.iter().enumerate() {
            if t.id != i + 1 || t.head > n || t.head == t.id {
                push(BAD_HEAD, Some(t.id), format!("head {} is not valid", t.head));
                heads_ok = false;
            }
        }
        let roots = s.roots();
        if roots.len() != 1 {
            push(ROOT_COUNT, None, format!("{} tokens attached to the root", roots.len()));
        }
        if heads_ok {
            if let Some(cycle) = find_cycle(s) {
                let ids: Vec<String> = cycle.iter().map(usize::to_string).collect();
                push(CYCLE, Some(cycle[0]), format!("cycle through tokens {}", ids.join(",")));
            }
        }
        for t in &s.tokens {
            if (t.head == ROOT) != (t.deprel == "root") {
                push(ROOT_LABEL, Some(t.id), format!("head {} with relation {}", t.head, t.deprel));
            }
            if !self.registry.allowed.contains(&t.deprel) {
                push(INVENTORY, Some(t.id), format!("relation `{}` is not allowed", t.deprel));
            }
            if self.registry.leaf.contains(&t.deprel) {
                let kids = s
                    .tokens
                    .iter()
                    .filter(|d| d.head == t.id && !self.registry.leaf_dependents.contains(&d.deprel))
                    .count();
                if kids > 0 {
                    push(LEAF, Some(t.id), format!("{} has {} dependents", t.deprel, kids));
                }
            }
        }
        if !heads_ok {
            return out;
        }
        let lex = &self.lexicon;
        for t in &s.tokens {
            let head = (t.head != ROOT).then(|| s.tok(t.head));
            match t.deprel.as_str() {
                "cop" if lex.is_shodan_form(&t.form) || t.lemma == lex.words.shodan_lemma => {
                    push(SHODAN_COP, Some(t.id), "shodan labeled cop".to_owned());
                }
                "nmod" => {
                    if let Some(h) = head {
                        if !h.upos.is_some_and(|u| self.registry.nmod_heads.contains(&u)) {
                            let tag = h.upos.map(Upos::as_str).unwrap_or("_");
                            push(NMOD_HEAD, Some(t.id), format!("nmod under {}", tag));
                        }
                    }
                }
                "obj" if lex.words.preverbs.contains(&t.form) => {
                    if head.is_some_and(|h| lex.words.light_verbs.contains(&h.lemma)) {
                        push(PREVERB_OBJ, Some(t.id), format!("`{}` labeled obj", t.form));
                    }
                }
                "ccomp" => {
                    let Some(h) = head else { continue };
                    let deps: Vec<&str> = s
                        .tokens
                        .iter()
                        .filter(|d| d.head == h.id)
                        .map(|d| d.deprel.as_str())
                        .collect();
                    let copular = h.upos_is(Upos::Adj) && deps.contains(&"cop");
                    let subject = deps
                        .iter()
                        .any(|d| matches!(*d, "nsubj" | "nsubj:pass" | "csubj"));
                    if copular && !subject {
                        push(CSUBJ_MISSING, Some(t.id), "ccomp of a subjectless copular adjective".to_owned());
                    }
                }
                _ => {}
            }
        }
        out
    }

    pub fn validate_treebank(&self, tb: &Treebank) -> ValidationSummary {
        let mut summary = ValidationSummary::default();
        for s in &tb.sentences {
            summary.add(s, self.validate(s));
        }
        summary
    }
}

/// Tokens on a head cycle (sorted), if any. Heads must be in range.
fn find_cycle(s: &Sentence) -> Option<Vec<usize>> {
    for start in s.ids() {
        let mut path = Vec::new();
        let mut cur = start;
        while cur != ROOT && !path.contains(&cur) {
            if path.len() > s.len() {
                break;
            }
            path.push(cur);
            cur = s.head(cur);
        }
        if cur != ROOT {
            let pos = path.iter().position(|&p| p == cur).unwrap_or(0);
            let mut cycle = path[pos..].to_vec();
            cycle.sort_unstable();
            return Some(cycle);
        }
    }
    None
}

/// Issues of a whole treebank with per-rule counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationSummary {
    pub sentences: usize,
    pub issues: Vec<ValidationIssue>,
    pub by_rule: BTreeMap<String, usize>,
    pub errors: usize,
    pub warnings: usize,
}

impl ValidationSummary {
    pub fn add(&mut self, _s: &Sentence, issues: Vec<ValidationIssue>) {
        self.sentences += 1;
        for i in issues {
            *self.by_rule.entry(i.rule.clone()).or_default() += 1;
            match i.severity {
                Severity::Error => self.errors += 1,
                Severity::Warn => self.warnings += 1,
            }
            self.issues.push(i);
        }
    }

    /// Combines two summaries (for per-chunk validation).
    pub fn merge(mut self, other: ValidationSummary) -> Self {
        self.sentences += other.sentences;
        self.errors += other.errors;
        self.warnings += other.warnings;
        for (k, v) in other.by_rule {
            *self.by_rule.entry(k).or_default() += v;
        }
        self.issues.extend(other.issues);
        self
    }

    /// 0 when there are no errors, 1 otherwise; warnings count as errors
    /// when `strict`.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.errors > 0 || (strict && self.warnings > 0) {
            1
        } else {
            0
        }
    }

    pub fn report_tsv(&self) -> String {
        let mut out = String::from("sent_id\ttoken\trule\tseverity\tmessage\n");
        for i in &self.issues {
            let _ = writeln!(out, "{}", i);
        }
        out
    }

    pub fn summary_block(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "sentences: {}", self.sentences);
        let _ = writeln!(out, "errors: {}", self.errors);
        let _ = writeln!(out, "warnings: {}", self.warnings);
        for (rule, n) in &self.by_rule {
            let _ = writeln!(out, "rule.{}: {}", rule, n);
        }
        let _ = writeln!(out, "status: {}", if self.errors == 0 { "ok" } else { "fail" });
        out
    }
}
