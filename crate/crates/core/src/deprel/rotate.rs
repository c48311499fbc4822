//! Head rotations: function-word demotion (CMR), coordination
//! flattening, and the prepositional-complement move of light verbs.

use thiserror::Error;

use super::CONJ_LABELS;
use crate::model::{Sentence, Token, TreeError, Upos, ROOT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Case,
    Mark,
}

impl Role {
    pub fn label(self) -> &'static str {
        match self {
            Role::Case => "case",
            Role::Mark => "mark",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotateError {
    #[error("token {0} has no dependent to promote")]
    NoPromotableDependent(usize),
    #[error("token {0} is not a prepositional complement of a light-verb element")]
    NotNppContext(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Promotion preference among the dependents of a function word.
const PRIORITY: [Upos; 7] = [
    Upos::Noun,
    Upos::Propn,
    Upos::Pron,
    Upos::Adj,
    Upos::Num,
    Upos::Verb,
    Upos::Adv,
];

/// Whether the token can be demoted to `role`.
pub fn is_function_word(t: &Token, role: Role) -> bool {
    match role {
        Role::Case => t.upos_is(Upos::Adp),
        Role::Mark => t.upos_is(Upos::Sconj) || t.upos_is(Upos::Adp),
    }
}

/// The dependent of `func` that a rotation would promote: best tag by
/// [`PRIORITY`], then the closest, then the leftmost. Punctuation is
/// never promoted.
pub fn choose_content(s: &Sentence, func: usize) -> Option<usize> {
    s.tokens
        .iter()
        .filter(|t| t.head == func && !t.upos_is(Upos::Punct))
        .min_by_key(|t| {
            let rank = t
                .upos
                .and_then(|u| PRIORITY.iter().position(|&p| p == u))
                .unwrap_or(PRIORITY.len());
            (rank, t.id.abs_diff(func), t.id)
        })
        .map(|t| t.id)
}

/// Demotes `func` under its content dependent, in place.
///
/// The promoted word takes `func`'s attachment and relation, `func`
/// becomes its `case` or `mark` leaf, and `func`'s other dependents
/// (punctuation included) move to the promoted word. Returns its id.
pub fn cmr_in_place(s: &mut Sentence, func: usize, role: Role) -> Result<usize, RotateError> {
    if s.token(func).is_none() {
        return Err(TreeError::NoSuchToken(func).into());
    }
    let c = choose_content(s, func).ok_or(RotateError::NoPromotableDependent(func))?;
    let (head, rel) = (s.head(func), s.tok(func).deprel.clone());
    for other in s.children(func) {
        if other != c {
            s.tok_mut(other).head = c;
        }
    }
    let ct = s.tok_mut(c);
    ct.head = head;
    ct.deprel = rel;
    let ft = s.tok_mut(func);
    ft.head = c;
    ft.deprel = role.label().to_owned();
    Ok(c)
}

/// Case/mark rotation on a copy; returns the sentence and the promoted id.
pub fn cmr(s: &Sentence, func: usize, role: Role) -> Result<(Sentence, usize), RotateError> {
    let mut out = s.clone();
    let c = cmr_in_place(&mut out, func, role)?;
    Ok((out, c))
}

fn is_conjunction(t: &Token) -> bool {
    t.upos_is(Upos::Cconj) || (t.upos.is_none() && t.xpos_is("CONJ"))
}

/// Result of flattening one coordination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coordination {
    /// Conjuncts in surface order; the first one heads the others.
    pub conjuncts: Vec<usize>,
    /// Coordinating conjunctions, now `cc` of the following conjunct.
    pub connectors: Vec<usize>,
    /// The token that headed the chain before rotation.
    pub top: usize,
}

/// Flattens the coordination chain rooted at `top`.
///
/// `is_link(s, x)` says whether the attachment of `x` to its head links
/// two conjuncts. A link whose bearer is a coordinating conjunction
/// introduces the conjunct below it (its POSDEP dependent if any); a
/// conjunction without such a dependent is just a connector.
pub(crate) fn rotate_coordination(
    s: &mut Sentence,
    top: usize,
    is_link: &dyn Fn(&Sentence, usize) -> bool,
) -> Coordination {
    let mut conjuncts = vec![top];
    let mut connectors = Vec::new();
    let mut i = 0;
    while i < conjuncts.len() {
        let m = conjuncts[i];
        i += 1;
        for x in s.children(m) {
            if !is_link(s, x) {
                continue;
            }
            let xt = s.tok(x);
            if is_conjunction(xt) {
                connectors.push(x);
                let kids = s.children(x);
                let content = kids
                    .iter()
                    .copied()
                    .filter(|&k| {
                        let kt = s.tok(k);
                        !kt.upos_is(Upos::Punct) && !is_conjunction(kt)
                    })
                    .min_by_key(|&k| (s.tok(k).deprel != "POSDEP", k));
                if let Some(k) = content {
                    conjuncts.push(k);
                }
            } else {
                conjuncts.push(x);
            }
        }
    }
    conjuncts.sort_unstable();
    connectors.sort_unstable();
    let first = conjuncts[0];
    if first != top {
        let (h, rel) = (s.head(top), s.tok(top).deprel.clone());
        let f = s.tok_mut(first);
        f.head = h;
        f.deprel = rel;
    }
    for &k in &conjuncts[1..] {
        let t = s.tok_mut(k);
        t.head = first;
        t.deprel = "conj".to_owned();
    }
    for &x in &connectors {
        let next = conjuncts
            .iter()
            .copied()
            .find(|&k| k > x)
            .unwrap_or(*conjuncts.last().expect("at least one conjunct"));
        for other in s.children(x) {
            s.tok_mut(other).head = next;
        }
        let t = s.tok_mut(x);
        t.head = next;
        t.deprel = "cc".to_owned();
    }
    Coordination {
        conjuncts,
        connectors,
        top,
    }
}

/// Flattens the PerDT coordination chain (AJCONJ, AVCONJ, NCONJ, PCONJ,
/// VCONJ links) rooted at `chain_head` into the first-conjunct-headed
/// shape. A token without conjunct links is returned unchanged.
pub fn conj_rotation(s: &Sentence, chain_head: usize) -> Sentence {
    let mut out = s.clone();
    let is_link = |s: &Sentence, x: usize| CONJ_LABELS.contains(&s.tok(x).deprel.as_str());
    let has_link = out.children(chain_head).into_iter().any(|x| is_link(&out, x));
    if has_link {
        rotate_coordination(&mut out, chain_head, &is_link);
    }
    out
}

/// Moves the complement of a prepositional phrase under a light-verb
/// element (NVE or ENC) to the light verb itself as `obl:arg`; the
/// preposition becomes its `case`. Returns the promoted id.
pub fn npp_rotation_in_place(s: &mut Sentence, npp: usize) -> Result<usize, RotateError> {
    let nve = s.token(npp).ok_or(TreeError::NoSuchToken(npp))?.head;
    if nve == ROOT || !matches!(s.tok(nve).deprel.as_str(), "NVE" | "ENC") {
        return Err(RotateError::NotNppContext(npp));
    }
    let verb = s.head(nve);
    if verb == ROOT {
        return Err(RotateError::NotNppContext(npp));
    }
    let c = cmr_in_place(s, npp, Role::Case)?;
    s.reattach_in_place(c, verb, "obl:arg")?;
    Ok(c)
}

pub fn npp_rotation(s: &Sentence, npp: usize) -> Result<Sentence, RotateError> {
    let mut out = s.clone();
    npp_rotation_in_place(&mut out, npp)?;
    Ok(out)
}
