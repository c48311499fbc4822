//! Retokenization into UD words: multiword verb inflections are split into
//! a main verb plus auxiliaries, and pronominal clitics are detached from
//! their hosts.

use std::collections::BTreeSet;

use crate::lexicon::{arrow, entries, Clitic, LexiconError, VERB_CONSTRUCTIONS_FILE, ZWNJ};
use crate::model::{reindex, Edit, Sentence, Token, Upos, MWT_FORM, MWT_MISC_PREFIX, MWT_SPAN, SPACE_AFTER};

/// MISC key recording why a verb could not be split.
pub const SPLIT_WARNING: &str = "SplitWarn";

/// Matches one space-separated part of a verb form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartPattern {
    Any,
    Suffix(String),
    Set(String),
    OneOf(BTreeSet<String>),
}

/// A named set of forms (the inflections of one auxiliary) with the lemma
/// the split word receives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSet {
    pub name: String,
    pub forms: BTreeSet<String>,
    pub lemma: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbConstructionRule {
    pub name: String,
    pub pattern: Vec<PartPattern>,
    /// 0-based index of the main verb within `pattern`.
    pub main_index: usize,
    /// Labels of the non-main parts, left to right.
    pub part_labels: Vec<String>,
}

impl VerbConstructionRule {
    pub fn is_passive(&self) -> bool {
        self.part_labels.iter().any(|l| l == "aux:pass")
    }

    /// Label of every part, `None` for the main verb.
    fn labels(&self) -> Vec<Option<&str>> {
        let mut rest = self.part_labels.iter();
        (0..self.pattern.len())
            .map(|i| {
                if i == self.main_index {
                    None
                } else {
                    rest.next().map(String::as_str)
                }
            })
            .collect()
    }
}

/// Which word heads a passive construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassiveMain {
    /// The participle is the main verb; the shodan part becomes `aux:pass`.
    Participle,
    /// The shodan part is the main verb; the participle becomes `aux:pass`.
    Shodan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbRules {
    pub sets: Vec<FormSet>,
    pub rules: Vec<VerbConstructionRule>,
    pub passive_main: PassiveMain,
}

impl VerbRules {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        const F: &str = VERB_CONSTRUCTIONS_FILE;
        let mut sets = Vec::new();
        let mut rules = Vec::new();
        let mut passive_main = PassiveMain::Participle;
        for e in entries(F, text)? {
            match e.key {
                "set" => {
                    let (head, lemma) = arrow(F, &e)?;
                    let (name, forms) = head
                        .split_once('=')
                        .ok_or_else(|| LexiconError::parse(F, e.line, "expected `name = forms`"))?;
                    sets.push(FormSet {
                        name: name.trim().to_owned(),
                        forms: forms
                            .split('|')
                            .map(str::trim)
                            .filter(|f| !f.is_empty())
                            .map(str::to_owned)
                            .collect(),
                        lemma: lemma.to_owned(),
                    });
                }
                "construction" => {
                    let fields: Vec<&str> = e.value.split('|').map(str::trim).collect();
                    let [name, pattern, main, labels] = fields.as_slice() else {
                        return Err(LexiconError::parse(
                            F,
                            e.line,
                            "expected `name | parts | main=k | labels`",
                        ));
                    };
                    let pattern: Vec<PartPattern> =
                        pattern.split_whitespace().map(parse_part).collect();
                    let main_index = main
                        .strip_prefix("main=")
                        .and_then(|k| k.trim().parse::<usize>().ok())
                        .filter(|&k| k >= 1 && k <= pattern.len())
                        .ok_or_else(|| LexiconError::parse(F, e.line, "bad main index"))?
                        - 1;
                    let part_labels: Vec<String> = labels
                        .split(',')
                        .map(str::trim)
                        .filter(|l| !l.is_empty())
                        .map(str::to_owned)
                        .collect();
                    if pattern.len() < 2 || part_labels.len() != pattern.len() - 1 {
                        return Err(LexiconError::parse(
                            F,
                            e.line,
                            "need at least two parts and one label per non-main part",
                        ));
                    }
                    if let Some(bad) = part_labels.iter().find(|l| *l != "aux" && *l != "aux:pass") {
                        return Err(LexiconError::parse(F, e.line, format!("bad label `{}`", bad)));
                    }
                    rules.push(VerbConstructionRule {
                        name: name.to_string(),
                        pattern,
                        main_index,
                        part_labels,
                    });
                }
                "option" => {
                    let (k, v) = e
                        .value
                        .split_once('=')
                        .map(|(k, v)| (k.trim(), v.trim()))
                        .ok_or_else(|| LexiconError::parse(F, e.line, "expected `name = value`"))?;
                    match (k, v) {
                        ("passive_main", "participle") => passive_main = PassiveMain::Participle,
                        ("passive_main", "shodan") => passive_main = PassiveMain::Shodan,
                        _ => {
                            return Err(LexiconError::parse(
                                F,
                                e.line,
                                format!("unknown option `{} = {}`", k, v),
                            ))
                        }
                    }
                }
                other => {
                    return Err(LexiconError::parse(F, e.line, format!("unknown key `{}`", other)))
                }
            }
        }
        let out = VerbRules {
            sets,
            rules,
            passive_main,
        };
        for r in &out.rules {
            for p in &r.pattern {
                if let PartPattern::Set(name) = p {
                    if out.set(name).is_none() {
                        return Err(LexiconError::parse(F, 0, format!("undefined set `${}`", name)));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn set(&self, name: &str) -> Option<&FormSet> {
        self.sets.iter().find(|s| s.name == name)
    }

    fn part_matches(&self, pattern: &PartPattern, word: &str) -> bool {
        match pattern {
            PartPattern::Any => true,
            PartPattern::Suffix(s) => word.ends_with(s.as_str()) && word != s,
            PartPattern::Set(name) => self.set(name).is_some_and(|s| s.forms.contains(word)),
            PartPattern::OneOf(words) => words.contains(word),
        }
    }

    /// First construction whose pattern matches `parts`.
    pub fn find(&self, parts: &[&str]) -> Option<&VerbConstructionRule> {
        self.rules.iter().find(|r| {
            r.pattern.len() == parts.len()
                && r.pattern
                    .iter()
                    .zip(parts)
                    .all(|(p, w)| self.part_matches(p, w))
        })
    }

    /// Main index and per-part labels after applying the passive switch.
    pub fn layout<'a>(&self, rule: &'a VerbConstructionRule) -> (usize, Vec<Option<&'a str>>) {
        let mut labels = rule.labels();
        let mut main = rule.main_index;
        if self.passive_main == PassiveMain::Shodan {
            if let Some(pass) = labels.iter().position(|l| *l == Some("aux:pass")) {
                labels[main] = Some("aux:pass");
                labels[pass] = None;
                main = pass;
            }
        }
        (main, labels)
    }

    fn lemma_for(&self, pattern: &PartPattern, word: &str) -> String {
        match pattern {
            PartPattern::Set(name) => self
                .set(name)
                .map(|s| s.lemma.clone())
                .unwrap_or_else(|| word.to_owned()),
            _ => word.to_owned(),
        }
    }
}

fn parse_part(s: &str) -> PartPattern {
    if s == "*" {
        PartPattern::Any
    } else if let Some(rest) = s.strip_prefix('~') {
        PartPattern::Suffix(rest.to_owned())
    } else if let Some(rest) = s.strip_prefix('$') {
        PartPattern::Set(rest.to_owned())
    } else if let Some(rest) = s.strip_prefix('=') {
        PartPattern::OneOf(rest.split(',').map(str::to_owned).collect())
    } else {
        PartPattern::OneOf(std::iter::once(s.to_owned()).collect())
    }
}

/// Splits verb tokens whose form contains spaces into one word per part.
///
/// The main part keeps the original lemma, features, head and relation;
/// the other parts become AUX words attached to it as `aux` or
/// `aux:pass`. Verbs matching no construction are left whole and flagged
/// with `SplitWarn=NoRule` in MISC.
pub fn split_multiword_verbs(sentence: &Sentence, rules: &VerbRules) -> Sentence {
    let mut edits = Vec::new();
    let mut flagged = Vec::new();
    // (token id, main word, whether other parts follow it)
    let mut mains: Vec<(usize, String, bool)> = Vec::new();
    for t in &sentence.tokens {
        if !t.xpos_is("V") || !t.form.contains(' ') {
            continue;
        }
        let parts: Vec<&str> = t.form.split(' ').filter(|p| !p.is_empty()).collect();
        let Some(rule) = rules.find(&parts) else {
            flagged.push(t.id);
            continue;
        };
        let (main, labels) = rules.layout(rule);
        for (j, (word, label)) in parts.iter().zip(&labels).enumerate() {
            let Some(label) = label else {
                mains.push((t.id, (*word).to_owned(), main + 1 < parts.len()));
                continue;
            };
            let mut aux = Token::new(0, *word)
                .with_lemma(rules.lemma_for(&rule.pattern[j], word))
                .with_xpos("AUX")
                .with_upos(Upos::Aux)
                .attach(t.id, *label);
            if j == parts.len() - 1 && !t.misc.space_after() {
                aux.misc.set(SPACE_AFTER, "No");
            }
            // Parts before the main verb go in at `id - 1`, parts after it
            // at `id`; both lists are already left to right.
            let after = if j < main { t.id - 1 } else { t.id };
            edits.push(Edit::Insert { after, token: aux });
        }
    }

    let mut out = sentence.clone();
    for id in flagged {
        out.tok_mut(id).misc.set(SPLIT_WARNING, "NoRule");
    }
    for (id, word, followed) in mains {
        let t = out.tok_mut(id);
        t.form = word;
        if followed {
            t.misc.remove(SPACE_AFTER);
        }
    }
    reindex(&out, &edits).expect("split only adds tokens attached to existing ones")
}

/// Detaches pronominal clitics from nouns, adpositions, pronouns and
/// adjectives whose lemma equals the form minus the clitic.
///
/// The clitic becomes a PR word labeled MOZ, attached to the closest
/// nominal word at or to the left of the host (the host when none).
/// The original spelling is kept as a multiword token.
pub fn detach_clitics(sentence: &Sentence, clitics: &[Clitic]) -> Sentence {
    const HOSTS: [&str; 5] = ["N", "PREP", "POSTP", "PR", "ADJ"];
    let mut out = sentence.clone();
    let mut edits = Vec::new();
    for t in &sentence.tokens {
        let host_ok = t.xpos.as_deref().is_some_and(|x| HOSTS.contains(&x));
        if !host_ok || t.lemma.is_empty() || t.misc.contains(MWT_SPAN) || t.form.contains(' ') {
            continue;
        }
        let Some((stem, clitic)) = clitics.iter().find_map(|c| {
            let rest = t.form.strip_prefix(t.lemma.as_str())?;
            let rest = rest.strip_prefix(ZWNJ).unwrap_or(rest);
            (rest == c.suffix).then_some((t.lemma.clone(), c))
        }) else {
            continue;
        };
        let head = closest_nominal(sentence, t.id).unwrap_or(t.id);
        let pron = Token::new(0, clitic.suffix.clone())
            .with_lemma(clitic.lemma.clone())
            .with_xpos("PR")
            .attach(head, "MOZ");
        edits.push(Edit::Insert { after: t.id, token: pron });

        let host = out.tok_mut(t.id);
        let original = std::mem::replace(&mut host.form, stem);
        if host.misc.remove(SPACE_AFTER).as_deref() == Some("No") {
            host.misc.set(&format!("{}{}", MWT_MISC_PREFIX, SPACE_AFTER), "No");
        }
        host.misc.set(MWT_SPAN, "2");
        host.misc.set(MWT_FORM, original);
    }
    reindex(&out, &edits).expect("clitics attach to existing tokens")
}

/// Nearest token at or before `from` whose source tag is nominal (N, PR).
fn closest_nominal(sentence: &Sentence, from: usize) -> Option<usize> {
    (1..=from)
        .rev()
        .find(|&id| matches!(sentence.tok(id).xpos.as_deref(), Some("N") | Some("PR")))
}
