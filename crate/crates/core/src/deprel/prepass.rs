//! Relations assigned before the rule table runs: `goeswith` for words
//! split by typing errors, `flat:name` inside proper names, and
//! `flat:num` / `cc` inside complex numbers.

use crate::lexicon::LexiconConfig;
use crate::model::{Sentence, Upos, ROOT};

/// MISC flag marking a token as the continuation of the previous word.
pub const GOES_WITH_KEY: &str = "GoesWith";

/// Makes `members` (ascending, first one first) a flat structure headed
/// by the first member. The member attached outside the span hands its
/// attachment to the first; dependents of the others move to the first.
/// Returns false (and changes nothing) unless exactly one member is
/// attached outside the span.
fn collapse(s: &mut Sentence, members: &[usize], label_of: &dyn Fn(usize) -> (usize, &'static str)) -> bool {
    let outside: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&m| !members.contains(&s.head(m)))
        .collect();
    let [ext] = outside.as_slice() else {
        return false;
    };
    let first = members[0];
    let (h, rel) = (s.head(*ext), s.tok(*ext).deprel.clone());
    for t in s.tokens.iter_mut() {
        if members.contains(&t.head) && !members.contains(&t.id) {
            t.head = first;
        }
    }
    let f = s.tok_mut(first);
    f.head = h;
    f.deprel = rel;
    for &m in &members[1..] {
        let (head, label) = label_of(m);
        let t = s.tok_mut(m);
        t.head = head;
        t.deprel = label.to_owned();
    }
    true
}

/// Like [`collapse`] but without requiring the span to be connected:
/// every member hands its outside dependents to the first member, which
/// keeps its own attachment unless it sits under another member.
fn attach_parts(s: &mut Sentence, members: &[usize], label: &str) {
    let first = members[0];
    let rest = &members[1..];
    if let Some(&m) = rest.iter().find(|&&m| s.is_descendant(first, m) && first != m) {
        // the first part hangs below another part: take the top part's place
        let mut top = m;
        while rest.contains(&s.head(top)) {
            top = s.head(top);
        }
        let (h, rel) = (s.head(top), s.tok(top).deprel.clone());
        let f = s.tok_mut(first);
        f.head = h;
        f.deprel = rel;
    }
    for t in s.tokens.iter_mut() {
        if rest.contains(&t.head) && !rest.contains(&t.id) && t.id != first {
            t.head = first;
        }
    }
    for &m in rest {
        let t = s.tok_mut(m);
        t.head = first;
        t.deprel = label.to_owned();
    }
}

fn goeswith(s: &mut Sentence, lexicon: &LexiconConfig) {
    let n = s.len();
    let mut spans: Vec<Vec<usize>> = Vec::new();
    // explicit flags: a flagged token continues the previous word
    let mut i = 1;
    while i <= n {
        if i > 1 && s.tok(i).misc.get(GOES_WITH_KEY) == Some("Yes") {
            let start = i - 1;
            let mut span = vec![start];
            while i <= n && s.tok(i).misc.get(GOES_WITH_KEY) == Some("Yes") {
                span.push(i);
                i += 1;
            }
            spans.push(span);
        } else {
            i += 1;
        }
    }
    for typo in &lexicon.words.typos {
        let k = typo.len();
        if k < 2 || k > n {
            continue;
        }
        for start in 1..=n + 1 - k {
            let hit = (0..k).all(|j| s.tok(start + j).form == typo[j]);
            let taken = spans.iter().flatten().any(|&m| m >= start && m < start + k);
            if hit && !taken {
                spans.push((start..start + k).collect());
            }
        }
    }
    for span in spans {
        attach_parts(s, &span, "goeswith");
    }
}

fn flat_names(s: &mut Sentence) {
    let n = s.len();
    let mut i = 1;
    while i <= n {
        let mut j = i;
        while j < n && linked_name_parts(s, j, j + 1) {
            j += 1;
        }
        if j > i {
            let members: Vec<usize> = (i..=j).collect();
            let first = i;
            collapse(s, &members, &|_| (first, "flat:name"));
        }
        i = j + 1;
    }
}

/// Adjacent proper nouns joined by a non-Ezafe attachment.
fn linked_name_parts(s: &Sentence, a: usize, b: usize) -> bool {
    let (ta, tb) = (s.tok(a), s.tok(b));
    let propn = ta.upos_is(Upos::Propn) && tb.upos_is(Upos::Propn);
    let linked = (tb.head == a && tb.deprel != "MOZ") || (ta.head == b && ta.deprel != "MOZ");
    propn && linked && !is_ud_fixed(&ta.deprel) && !is_ud_fixed(&tb.deprel)
}

fn is_ud_fixed(label: &str) -> bool {
    label.chars().next().is_some_and(|c| c.is_ascii_lowercase())
}

fn flat_numbers(s: &mut Sentence, lexicon: &LexiconConfig) {
    let n = s.len();
    let is_num = |s: &Sentence, id: usize| s.tok(id).upos_is(Upos::Num) && !is_ud_fixed(&s.tok(id).deprel);
    let is_and = |s: &Sentence, id: usize| {
        let t = s.tok(id);
        t.upos_is(Upos::Cconj) && lexicon.words.number_conjunctions.contains(&t.form)
    };
    let mut i = 1;
    while i <= n {
        if !is_num(s, i) {
            i += 1;
            continue;
        }
        let mut members = vec![i];
        let mut j = i;
        loop {
            if j + 2 <= n && is_and(s, j + 1) && is_num(s, j + 2) {
                members.extend([j + 1, j + 2]);
                j += 2;
            } else if j < n && is_num(s, j + 1) && members.len() > 1 {
                members.push(j + 1);
                j += 1;
            } else {
                break;
            }
        }
        let has_and = members.iter().any(|&m| is_and(s, m));
        if has_and {
            let first = i;
            let snapshot = members.clone();
            let s_ro = s.clone();
            collapse(s, &snapshot, &|m| {
                if is_and(&s_ro, m) {
                    (m + 1, "cc")
                } else {
                    (first, "flat:num")
                }
            });
        }
        i = j + 1;
    }
}

/// Runs the pre-pass: goeswith, then flat:name, then flat:num and cc.
///
/// Expects UPOS tags to be set. Relations assigned here are UD labels
/// and are left alone by the rule table.
pub fn prepass(sentence: &Sentence, lexicon: &LexiconConfig) -> Sentence {
    let mut s = sentence.clone();
    goeswith(&mut s, lexicon);
    flat_names(&mut s);
    flat_numbers(&mut s, lexicon);
    debug_assert!(s.tokens.iter().all(|t| t.head == ROOT || t.head <= s.len()));
    s
}
