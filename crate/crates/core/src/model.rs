//! Tokens, sentences and dependency trees, plus the structural editing
//! primitives (reattach, flip, reindex) that every transformation uses.
//!
//! Head index 0 is the artificial root. Token ids are dense and 1-based;
//! multiword-token ranges only exist as MISC annotations and are turned
//! into `n-m` lines by the CoNLL-U writer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Head value of the token attached to the artificial root.
pub const ROOT: usize = 0;

/// MISC key marking a token that is followed directly by the next one.
pub const SPACE_AFTER: &str = "SpaceAfter";
/// MISC key (on the first covered word) holding the length of a multiword token.
pub const MWT_SPAN: &str = "MwtSpan";
/// MISC key (on the first covered word) holding the surface form of a multiword token.
pub const MWT_FORM: &str = "MwtForm";
/// Prefix for MISC entries that belong to the multiword-token line itself.
pub const MWT_MISC_PREFIX: &str = "Mwt.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("no token is attached to the root")]
    NoRoot,
    #[error("multiple tokens attached to the root: {0:?}")]
    MultipleRoots(Vec<usize>),
    #[error("cycle through tokens {0:?}")]
    CycleDetected(Vec<usize>),
    #[error("token {dep} cannot be attached under its descendant {head}")]
    WouldCreateCycle { dep: usize, head: usize },
    #[error("token {dep} has head {head}, which does not exist")]
    DanglingHead { dep: usize, head: usize },
    #[error("token ids are not 1..n in order (found {found} at position {position})")]
    BadIds { position: usize, found: usize },
    #[error("token {0} does not exist")]
    NoSuchToken(usize),
    #[error("token {0} cannot be its own head")]
    SelfHead(usize),
    #[error("token {0} is attached to the root and cannot be flipped")]
    DepIsRoot(usize),
}

/// The 17 universal part-of-speech tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Upos {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Adj,
        Upos::Adp,
        Upos::Adv,
        Upos::Aux,
        Upos::Cconj,
        Upos::Det,
        Upos::Intj,
        Upos::Noun,
        Upos::Num,
        Upos::Part,
        Upos::Pron,
        Upos::Propn,
        Upos::Punct,
        Upos::Sconj,
        Upos::Sym,
        Upos::Verb,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Adj => "ADJ",
            Upos::Adp => "ADP",
            Upos::Adv => "ADV",
            Upos::Aux => "AUX",
            Upos::Cconj => "CCONJ",
            Upos::Det => "DET",
            Upos::Intj => "INTJ",
            Upos::Noun => "NOUN",
            Upos::Num => "NUM",
            Upos::Part => "PART",
            Upos::Pron => "PRON",
            Upos::Propn => "PROPN",
            Upos::Punct => "PUNCT",
            Upos::Sconj => "SCONJ",
            Upos::Sym => "SYM",
            Upos::Verb => "VERB",
            Upos::X => "X",
        }
    }

    /// Nouns, proper nouns and pronouns.
    pub fn is_nominal(self) -> bool {
        matches!(self, Upos::Noun | Upos::Propn | Upos::Pron)
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown universal POS tag `{0}`")]
pub struct UnknownUpos(pub String);

impl FromStr for Upos {
    type Err = UnknownUpos;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Upos::ALL
            .iter()
            .copied()
            .find(|u| u.as_str() == s)
            .ok_or_else(|| UnknownUpos(s.to_owned()))
    }
}

/// Morphological features, kept sorted by key.
pub type Features = BTreeMap<String, String>;

/// Ordered key=value annotations of the MISC column.
///
/// Insertion order is preserved so that files round-trip unchanged;
/// `set` replaces an existing key in place.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Misc(Vec<(String, Option<String>)>);

impl Misc {
    pub fn new() -> Self {
        Misc(Vec::new())
    }

    pub fn parse(column: &str) -> Self {
        if column == "_" || column.is_empty() {
            return Misc::new();
        }
        Misc(
            column
                .split('|')
                .map(|item| match item.split_once('=') {
                    Some((k, v)) => (k.to_owned(), Some(v.to_owned())),
                    None => (item.to_owned(), None),
                })
                .collect(),
        )
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| v.as_deref())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.iter().any(|(k, _)| k == key)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let value = Some(value.into());
        match self.0.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.0.push((key.to_owned(), value)),
        }
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        let pos = self.0.iter().position(|(k, _)| k == key)?;
        self.0.remove(pos).1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<&str>)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_deref()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push_raw(&mut self, key: String, value: Option<String>) {
        self.0.push((key, value));
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.0.retain(|(k, _)| keep(k));
    }

    pub fn space_after(&self) -> bool {
        self.get(SPACE_AFTER) != Some("No")
    }
}

impl fmt::Display for Misc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            match v {
                Some(v) => write!(f, "{}={}", k, v)?,
                None => f.write_str(k)?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: Option<Upos>,
    /// Source part-of-speech tag; kept as ingested.
    pub xpos: Option<String>,
    pub feats: Features,
    pub head: usize,
    pub deprel: String,
    pub misc: Misc,
}

impl Token {
    pub fn new(id: usize, form: impl Into<String>) -> Self {
        Token {
            id,
            form: form.into(),
            lemma: String::new(),
            upos: None,
            xpos: None,
            feats: Features::new(),
            head: ROOT,
            deprel: String::new(),
            misc: Misc::new(),
        }
    }

    pub fn with_lemma(mut self, lemma: impl Into<String>) -> Self {
        self.lemma = lemma.into();
        self
    }

    pub fn with_xpos(mut self, xpos: impl Into<String>) -> Self {
        self.xpos = Some(xpos.into());
        self
    }

    pub fn with_upos(mut self, upos: Upos) -> Self {
        self.upos = Some(upos);
        self
    }

    pub fn attach(mut self, head: usize, deprel: impl Into<String>) -> Self {
        self.head = head;
        self.deprel = deprel.into();
        self
    }

    pub fn xpos_is(&self, tag: &str) -> bool {
        self.xpos.as_deref() == Some(tag)
    }

    pub fn upos_is(&self, upos: Upos) -> bool {
        self.upos == Some(upos)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub sent_id: String,
    /// Detokenized surface form.
    pub text: String,
    /// Metadata lines other than `sent_id` and `text`, without the leading `#`.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
}

/// How the promoted token of a flip is labeled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PromotedLabel {
    /// Take over the former head's relation.
    Keep,
    Set(String),
}

/// One edit applied by [`reindex`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Edit {
    /// Insert `token` after the token that currently has id `after`
    /// (0 inserts at the front). The inserted token's `head` refers to
    /// current ids.
    Insert { after: usize, token: Token },
    Delete { id: usize },
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence {
            tokens,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn token_mut(&mut self, id: usize) -> Option<&mut Token> {
        id.checked_sub(1).and_then(move |i| self.tokens.get_mut(i))
    }

    /// Panicking accessor for ids known to be valid.
    pub fn tok(&self, id: usize) -> &Token {
        &self.tokens[id - 1]
    }

    pub fn tok_mut(&mut self, id: usize) -> &mut Token {
        &mut self.tokens[id - 1]
    }

    pub fn head(&self, id: usize) -> usize {
        self.tokens[id - 1].head
    }

    pub fn ids(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.tokens.len()
    }

    /// Dependents of `id` (0 for the root) in surface order.
    pub fn children(&self, id: usize) -> Vec<usize> {
        self.tokens
            .iter()
            .filter(|t| t.head == id)
            .map(|t| t.id)
            .collect()
    }

    pub fn roots(&self) -> Vec<usize> {
        self.children(ROOT)
    }

    /// True if `node` lies in the subtree rooted at `ancestor` (including itself).
    pub fn is_descendant(&self, node: usize, ancestor: usize) -> bool {
        let mut cur = node;
        for _ in 0..=self.tokens.len() {
            if cur == ancestor {
                return true;
            }
            if cur == ROOT {
                return false;
            }
            cur = match self.token(cur) {
                Some(t) => t.head,
                None => return false,
            };
        }
        false
    }

    /// Distance from the artificial root; tokens on a cycle get `usize::MAX`.
    pub fn depth(&self, id: usize) -> usize {
        let mut cur = id;
        let mut depth = 0;
        while cur != ROOT {
            if depth > self.tokens.len() {
                return usize::MAX;
            }
            cur = match self.token(cur) {
                Some(t) => t.head,
                None => return usize::MAX,
            };
            depth += 1;
        }
        depth
    }

    /// Checks the id sequence and head ranges.
    pub fn check_ids(&self) -> Result<(), TreeError> {
        for (i, t) in self.tokens.iter().enumerate() {
            if t.id != i + 1 {
                return Err(TreeError::BadIds {
                    position: i + 1,
                    found: t.id,
                });
            }
        }
        for t in &self.tokens {
            if t.head == t.id {
                return Err(TreeError::SelfHead(t.id));
            }
            if t.head > self.tokens.len() {
                return Err(TreeError::DanglingHead {
                    dep: t.id,
                    head: t.head,
                });
            }
        }
        Ok(())
    }

    /// Attach `dep` under `new_head` with `label`, rejecting cycles.
    pub fn reattach_in_place(
        &mut self,
        dep: usize,
        new_head: usize,
        label: &str,
    ) -> Result<(), TreeError> {
        if self.token(dep).is_none() {
            return Err(TreeError::NoSuchToken(dep));
        }
        if new_head != ROOT && self.token(new_head).is_none() {
            return Err(TreeError::NoSuchToken(new_head));
        }
        if new_head == dep {
            return Err(TreeError::SelfHead(dep));
        }
        if new_head != ROOT && self.is_descendant(new_head, dep) {
            return Err(TreeError::WouldCreateCycle {
                dep,
                head: new_head,
            });
        }
        let t = self.tok_mut(dep);
        t.head = new_head;
        t.deprel = label.to_owned();
        Ok(())
    }

    /// Swap `dep` with its head: `dep` takes over the head's attachment,
    /// the old head hangs under `dep` as `new_dep_label`, and all other
    /// dependents of the old head move to `dep`.
    pub fn flip_in_place(
        &mut self,
        dep: usize,
        new_dep_label: &str,
        promoted: &PromotedLabel,
    ) -> Result<(), TreeError> {
        let old_head = self.token(dep).ok_or(TreeError::NoSuchToken(dep))?.head;
        if old_head == ROOT {
            return Err(TreeError::DepIsRoot(dep));
        }
        let grand = self.head(old_head);
        let inherited = match promoted {
            PromotedLabel::Keep => self.tok(old_head).deprel.clone(),
            PromotedLabel::Set(l) => l.clone(),
        };
        for sib in self.children(old_head) {
            if sib != dep {
                self.tok_mut(sib).head = dep;
            }
        }
        {
            let d = self.tok_mut(dep);
            d.head = grand;
            d.deprel = inherited;
        }
        let h = self.tok_mut(old_head);
        h.head = dep;
        h.deprel = new_dep_label.to_owned();
        Ok(())
    }

    /// Detokenized surface text, honoring multiword tokens and `SpaceAfter=No`.
    pub fn surface_text(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.tokens.len() {
            let t = &self.tokens[i];
            let span = t
                .misc
                .get(MWT_SPAN)
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&k| k >= 2 && i + k <= self.tokens.len());
            let (form, space) = match (span, t.misc.get(MWT_FORM)) {
                (Some(k), Some(form)) => {
                    let key = format!("{}{}", MWT_MISC_PREFIX, SPACE_AFTER);
                    let space = t.misc.get(&key) != Some("No");
                    i += k;
                    (form, space)
                }
                _ => {
                    i += 1;
                    (t.form.as_str(), t.misc.space_after())
                }
            };
            out.push_str(form);
            if space && i < self.tokens.len() {
                out.push(' ');
            }
        }
        out
    }

    pub fn refresh_text(&mut self) {
        self.text = self.surface_text();
    }
}

/// Indexed head/children view over a well-formed sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyTree {
    pub root_id: usize,
    /// Dependents of every token in surface order (empty vectors for leaves).
    pub children: BTreeMap<usize, Vec<usize>>,
}

impl DependencyTree {
    pub fn children_of(&self, id: usize) -> &[usize] {
        self.children.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.children_of(id).is_empty()
    }

    /// Token ids of the subtree under `id`, pre-order.
    pub fn subtree(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.children_of(n).iter().rev());
        }
        out
    }
}

/// Source annotation scheme of a treebank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Perdt,
    Ud,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Treebank {
    pub sentences: Vec<Sentence>,
    pub source_scheme: Scheme,
}

impl Treebank {
    pub fn new(source_scheme: Scheme) -> Self {
        Treebank {
            sentences: Vec::new(),
            source_scheme,
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

/// Builds the head/children index, checking for a unique root and cycles.
pub fn build_tree(sentence: &Sentence) -> Result<DependencyTree, TreeError> {
    sentence.check_ids()?;
    let roots = sentence.roots();
    let root_id = match roots.as_slice() {
        [] => {
            // No root at all: every token points at another token, so
            // there must be a cycle; report it if we can find one.
            return Err(match find_cycle(sentence) {
                Some(c) if !sentence.is_empty() => TreeError::CycleDetected(c),
                _ => TreeError::NoRoot,
            });
        }
        [r] => *r,
        _ => return Err(TreeError::MultipleRoots(roots)),
    };
    if let Some(cycle) = find_cycle(sentence) {
        return Err(TreeError::CycleDetected(cycle));
    }
    let mut children: BTreeMap<usize, Vec<usize>> =
        sentence.ids().map(|id| (id, Vec::new())).collect();
    for t in &sentence.tokens {
        if t.head != ROOT {
            children.entry(t.head).or_default().push(t.id);
        }
    }
    Ok(DependencyTree { root_id, children })
}

fn find_cycle(sentence: &Sentence) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on current path, 2 = done
    let n = sentence.len();
    let mut state = vec![0u8; n + 1];
    for start in sentence.ids() {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if cur == ROOT || cur > n || state[cur] == 2 {
                break;
            }
            if state[cur] == 1 {
                let pos = path.iter().position(|&p| p == cur).unwrap_or(0);
                let mut cycle = path[pos..].to_vec();
                cycle.sort_unstable();
                return Some(cycle);
            }
            state[cur] = 1;
            path.push(cur);
            cur = sentence.head(cur);
        }
        for p in path {
            state[p] = 2;
        }
    }
    None
}

/// Returns a copy of `sentence` with `dep` attached under `new_head`.
pub fn reattach(
    sentence: &Sentence,
    dep: usize,
    new_head: usize,
    new_label: &str,
) -> Result<Sentence, TreeError> {
    let mut out = sentence.clone();
    out.reattach_in_place(dep, new_head, new_label)?;
    Ok(out)
}

/// Returns a copy of `sentence` with `dep` and its head swapped.
pub fn flip(
    sentence: &Sentence,
    dep: usize,
    new_dep_label: &str,
    promoted: PromotedLabel,
) -> Result<Sentence, TreeError> {
    let mut out = sentence.clone();
    out.flip_in_place(dep, new_dep_label, &promoted)?;
    Ok(out)
}

/// Applies insertions and deletions and renumbers tokens 1..n'.
///
/// Heads (including those of inserted tokens) are given in the old
/// numbering and remapped; a head that points at a deleted token is an
/// error.
pub fn reindex(sentence: &Sentence, edits: &[Edit]) -> Result<Sentence, TreeError> {
    if edits.is_empty() {
        return Ok(sentence.clone());
    }
    let n = sentence.len();
    let mut deleted = vec![false; n + 1];
    let mut inserts: BTreeMap<usize, Vec<&Token>> = BTreeMap::new();
    for e in edits {
        match e {
            Edit::Delete { id } => {
                if *id == ROOT || *id > n {
                    return Err(TreeError::NoSuchToken(*id));
                }
                deleted[*id] = true;
            }
            Edit::Insert { after, token } => {
                if *after > n {
                    return Err(TreeError::NoSuchToken(*after));
                }
                inserts.entry(*after).or_default().push(token);
            }
        }
    }

    // Layout: inserts at 0, then for each old token: itself (unless deleted)
    // followed by its inserts.
    let mut layout: Vec<(Option<usize>, &Token)> = Vec::with_capacity(n + edits.len());
    let inserted = |after: usize| inserts.get(&after).into_iter().flatten().map(|t| (None, *t));
    layout.extend(inserted(0));
    for t in &sentence.tokens {
        if !deleted[t.id] {
            layout.push((Some(t.id), t));
        }
        layout.extend(inserted(t.id));
    }

    let mut new_id = vec![ROOT; n + 1];
    for (pos, (old, _)) in layout.iter().enumerate() {
        if let Some(old) = old {
            new_id[*old] = pos + 1;
        }
    }

    let mut tokens = Vec::with_capacity(layout.len());
    for (pos, (_, t)) in layout.iter().enumerate() {
        let mut t = (*t).clone();
        let id = pos + 1;
        if t.head != ROOT {
            if t.head > n || deleted[t.head] {
                return Err(TreeError::DanglingHead {
                    dep: id,
                    head: t.head,
                });
            }
            t.head = new_id[t.head];
        }
        t.id = id;
        tokens.push(t);
    }
    Ok(Sentence {
        tokens,
        ..sentence.clone_meta()
    })
}

impl Sentence {
    /// Copy of the metadata with no tokens.
    pub fn clone_meta(&self) -> Sentence {
        Sentence {
            sent_id: self.sent_id.clone(),
            text: self.text.clone(),
            comments: self.comments.clone(),
            tokens: Vec::new(),
        }
    }
}
