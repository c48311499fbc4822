//! Sentence conversion driven by the rule table.

use std::collections::BTreeSet;
use std::fmt;

use super::rotate::{choose_content, cmr_in_place, is_function_word, rotate_coordination, Role};
use super::rules::{Preaction, RuleTable};
use super::{is_leaf_label, is_perdt_label, is_ud_label, LEAF_DEPENDENT_LABELS};
use crate::lexicon::LexiconConfig;
use crate::model::{PromotedLabel, Sentence, Upos, ROOT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConversionWarning {
    pub token: usize,
    pub message: String,
}

impl fmt::Display for ConversionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "token {}: {}", self.token, self.message)
    }
}

/// What will become of a token's relation.
#[derive(Debug, Clone)]
enum Pending {
    Fixed(String),
    Rule {
        target: String,
        preaction: Preaction,
        /// Head of the token when the rule was selected.
        head: usize,
    },
}

impl Pending {
    fn target(&self) -> &str {
        match self {
            Pending::Fixed(l) => l,
            Pending::Rule { target, .. } => target,
        }
    }

    fn preaction(&self) -> Preaction {
        match self {
            Pending::Fixed(_) => Preaction::None,
            Pending::Rule { preaction, .. } => *preaction,
        }
    }
}

struct Conversion {
    s: Sentence,
    sel: Vec<Pending>,
    warnings: Vec<ConversionWarning>,
}

impl Conversion {
    fn warn(&mut self, token: usize, message: impl Into<String>) {
        self.warnings.push(ConversionWarning {
            token,
            message: message.into(),
        });
    }

    fn pending(&self, id: usize) -> &Pending {
        &self.sel[id - 1]
    }

    fn set(&mut self, id: usize, p: Pending) {
        self.sel[id - 1] = p;
    }

    fn take(&mut self, id: usize) -> Pending {
        std::mem::replace(&mut self.sel[id - 1], Pending::Fixed(String::new()))
    }

    /// Deepest token (leftmost among equals) whose pending preaction passes `want`.
    fn next_deepest(&self, want: &dyn Fn(Preaction) -> bool, skip: &BTreeSet<usize>) -> Option<usize> {
        self.s
            .ids()
            .filter(|id| !skip.contains(id) && want(self.pending(*id).preaction()))
            .max_by_key(|&id| (self.s.depth(id), std::cmp::Reverse(id)))
    }

    fn flips(&mut self) {
        let none = BTreeSet::new();
        while let Some(d) = self.next_deepest(&|p| p == Preaction::Flip, &none) {
            let Pending::Rule { target, head, .. } = self.take(d) else {
                unreachable!("flip pending is a rule")
            };
            if head == ROOT || self.s.head(d) != head {
                self.warn(d, format!("cannot flip with a head that moved; labeled dep instead of {}", target));
                self.set(d, Pending::Fixed("dep".to_owned()));
                continue;
            }
            self.s
                .flip_in_place(d, &target, &PromotedLabel::Keep)
                .expect("flip of a dependent with a head");
            let inherited = self.take(head);
            self.set(d, inherited);
            self.set(head, Pending::Fixed(target));
        }
    }

    fn coordinations(&mut self) {
        let mut done = BTreeSet::new();
        let mut order: Vec<usize> = self.s.ids().collect();
        order.sort_by_key(|&id| (self.s.depth(id), id));
        for top in order {
            if done.contains(&top) {
                continue;
            }
            let links: BTreeSet<usize> = self
                .s
                .ids()
                .filter(|&x| self.pending(x).preaction() == Preaction::ConjRotation)
                .collect();
            if !self.s.children(top).iter().any(|x| links.contains(x)) {
                continue;
            }
            let is_link = |_: &Sentence, x: usize| links.contains(&x);
            let c = rotate_coordination(&mut self.s, top, &is_link);
            let first = c.conjuncts[0];
            if first != top {
                let inherited = self.take(top);
                self.set(first, inherited);
            }
            for &k in &c.conjuncts[1..] {
                let promotable = is_function_word(self.s.tok(k), Role::Case)
                    && choose_content(&self.s, k).is_some();
                let p = if promotable {
                    Pending::Rule {
                        target: "conj".to_owned(),
                        preaction: Preaction::Cmr(Role::Case),
                        head: first,
                    }
                } else {
                    Pending::Fixed("conj".to_owned())
                };
                self.set(k, p);
            }
            for &x in &c.connectors {
                self.set(x, Pending::Fixed("cc".to_owned()));
            }
            done.extend(c.conjuncts.iter().copied());
            done.extend(c.connectors.iter().copied());
        }
    }

    fn rotations(&mut self) {
        let mut seen = BTreeSet::new();
        let want = |p: Preaction| matches!(p, Preaction::Cmr(_) | Preaction::NppRotation);
        while let Some(d) = self.next_deepest(&want, &seen) {
            seen.insert(d);
            let p = self.take(d);
            let target = p.target().to_owned();
            match p.preaction() {
                Preaction::Cmr(role) => self.cmr(d, role, target),
                Preaction::NppRotation => self.npp(d, target),
                _ => unreachable!(),
            }
        }
    }

    fn cmr(&mut self, d: usize, role: Role, target: String) {
        let t = self.s.tok(d);
        if !is_function_word(t, role) {
            self.set(d, Pending::Fixed(target));
            return;
        }
        let Some(c) = choose_content(&self.s, d) else {
            self.warn(d, format!("{} has nothing to promote; kept as {}", role.label(), target));
            self.set(d, Pending::Fixed(target));
            return;
        };
        // An adposition introducing a nominal is a case marker even where
        // the rule asks for mark.
        let nominal_content = matches!(
            self.s.tok(c).upos,
            Some(Upos::Noun | Upos::Propn | Upos::Pron | Upos::Num | Upos::Adj)
        );
        let role = if role == Role::Mark && t.upos_is(Upos::Adp) && nominal_content {
            Role::Case
        } else {
            role
        };
        // multiword function words keep their fixed parts
        let parts: Vec<usize> = self
            .s
            .children(d)
            .into_iter()
            .filter(|&x| x != c && LEAF_DEPENDENT_LABELS.contains(&self.pending(x).target()))
            .collect();
        let c = cmr_in_place(&mut self.s, d, role).expect("content exists");
        for x in parts {
            self.s.tok_mut(x).head = d;
        }
        let promoted = if target == role.label() {
            let h = self.s.head(c);
            let nominal_head = h != ROOT && self.s.tok(h).upos.is_some_and(Upos::is_nominal);
            if nominal_head { "nmod" } else { "obl" }.to_owned()
        } else {
            target
        };
        self.set(c, Pending::Fixed(promoted));
        self.set(d, Pending::Fixed(role.label().to_owned()));
    }

    fn npp(&mut self, d: usize, target: String) {
        let h = self.s.head(d);
        let verb = if h == ROOT { ROOT } else { self.s.head(h) };
        let promotable =
            is_function_word(self.s.tok(d), Role::Case) && choose_content(&self.s, d).is_some();
        if verb == ROOT || !promotable {
            self.warn(d, "prepositional complement cannot move to the light verb; labeled nmod");
            self.set(d, Pending::Fixed("nmod".to_owned()));
            return;
        }
        let c = cmr_in_place(&mut self.s, d, Role::Case).expect("content exists");
        self.s
            .reattach_in_place(c, verb, &target)
            .expect("the light verb is above the complement");
        self.set(c, Pending::Fixed(target));
        self.set(d, Pending::Fixed("case".to_owned()));
    }

    fn finish(&mut self) {
        for id in self.s.ids() {
            let label = self.pending(id).target().to_owned();
            self.s.tok_mut(id).deprel = label;
        }
        for id in self.s.ids() {
            let t = self.s.tok(id);
            if t.head == ROOT {
                self.s.tok_mut(id).deprel = "root".to_owned();
            } else if t.deprel == "root" {
                self.warn(id, "root relation below the root; labeled dep");
                self.s.tok_mut(id).deprel = "dep".to_owned();
            }
        }
        self.lift_from_leaves();
        for id in self.s.ids() {
            let label = self.s.tok(id).deprel.clone();
            if !is_ud_label(&label) {
                self.warn(id, format!("`{}` is not a UD relation; labeled dep", label));
                self.s.tok_mut(id).deprel = "dep".to_owned();
            }
            let t = self.s.tok_mut(id);
            if matches!(t.deprel.as_str(), "aux" | "aux:pass" | "cop") && t.upos_is(Upos::Verb) {
                t.upos = Some(Upos::Aux);
            }
        }
    }

    /// Moves dependents of function-word relations up to their heads.
    fn lift_from_leaves(&mut self) {
        for _ in 0..self.s.len() {
            let mut changed = false;
            for id in self.s.ids() {
                let h = self.s.head(id);
                if h == ROOT
                    || !is_leaf_label(&self.s.tok(h).deprel)
                    || LEAF_DEPENDENT_LABELS.contains(&self.s.tok(id).deprel.as_str())
                {
                    continue;
                }
                let up = self.s.head(h);
                if up == ROOT {
                    continue;
                }
                self.s.tok_mut(id).head = up;
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }
}

/// Converts one sentence from PerDT relations to UD relations.
///
/// Expects UPOS tags to be set and the pre-pass to have run; relations
/// that are already UD labels are kept. Rules are selected once on the
/// input tree, then applied in this order: flips (deepest first),
/// coordination flattening, case/mark and light-verb rotations (deepest
/// first), labeling. Function-word relations end up as leaves. Never
/// fails: unmatched relations become `dep` with a warning.
pub fn convert_sentence(
    sentence: &Sentence,
    table: &RuleTable,
    lexicon: &LexiconConfig,
) -> (Sentence, Vec<ConversionWarning>) {
    let mut warnings = Vec::new();
    let sel = sentence
        .tokens
        .iter()
        .map(|t| {
            if is_ud_label(&t.deprel) {
                return Pending::Fixed(t.deprel.clone());
            }
            match table.select(sentence, t.id, lexicon) {
                Some(rule) => Pending::Rule {
                    target: rule.target.clone(),
                    preaction: rule.preaction,
                    head: t.head,
                },
                None => {
                    let message = if is_perdt_label(&t.deprel) {
                        format!("no rule for `{}` matched; labeled dep", t.deprel)
                    } else {
                        format!("unknown source relation `{}`; labeled dep", t.deprel)
                    };
                    warnings.push(ConversionWarning { token: t.id, message });
                    Pending::Fixed("dep".to_owned())
                }
            }
        })
        .collect();
    let mut c = Conversion {
        s: sentence.clone(),
        sel,
        warnings,
    };
    c.flips();
    c.coordinations();
    c.rotations();
    c.finish();
    (c.s, c.warnings)
}
