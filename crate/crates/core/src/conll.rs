//! Readers for the legacy 10-column PerDT format and for CoNLL-U, and the
//! CoNLL-U writer.
//!
//! Malformed sentences never reach the caller: they are reported as
//! [`ParseDiagnostic`]s and skipped.

use std::fmt;
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::deprel::is_perdt_label;
use crate::model::{
    build_tree, Features, Misc, Scheme, Sentence, Token, Treebank, Upos, MWT_FORM,
    MWT_MISC_PREFIX, MWT_SPAN, SPACE_AFTER,
};

/// Feature key holding the PerDT fine-grained tag.
pub const FPOS_KEY: &str = "fpos";
/// MISC key keeping a form as it was before character normalization.
pub const ORIG_FORM_KEY: &str = "OrigForm";

const CLOSING_PUNCT: &[&str] = &[".", "،", "؛", ":", "؟", "!", ")", "]", "»", "..."];
const OPENING_PUNCT: &[&str] = &["(", "[", "«"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warn,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warn => "WARN",
            Severity::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    /// 1-based line number in the input.
    pub line_no: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line_no, self.severity, self.message)
    }
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("sentence {sent_id}, token {token}: {reason}")]
    UnmappedToken {
        sent_id: String,
        token: usize,
        reason: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Input lines of one sentence block.
struct Block<'a> {
    lines: Vec<(usize, &'a str)>,
}

fn blocks(text: &str) -> Vec<Block<'_>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !cur.is_empty() {
                out.push(Block {
                    lines: std::mem::take(&mut cur),
                });
            }
        } else {
            cur.push((i + 1, line));
        }
    }
    if !cur.is_empty() {
        out.push(Block { lines: cur });
    }
    out
}

fn read_all(mut reader: impl Read) -> io::Result<String> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// Replaces Arabic Yeh/Kaf/Alef Maksura with their Persian forms.
pub fn normalize_persian(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\u{064A}' | '\u{0649}' => '\u{06CC}',
            '\u{0643}' => '\u{06A9}',
            c => c,
        })
        .collect()
}

fn parse_feats(column: &str, feats: &mut Features) -> Result<(), String> {
    if column == "_" || column.is_empty() {
        return Ok(());
    }
    for item in column.split('|') {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("malformed feature `{}`", item))?;
        feats.insert(k.to_owned(), v.to_owned());
    }
    Ok(())
}

fn field(s: &str) -> String {
    if s == "_" {
        String::new()
    } else {
        s.to_owned()
    }
}

/// Marks `SpaceAfter=No` before closing and after opening punctuation.
fn infer_spacing(sentence: &mut Sentence) {
    let n = sentence.len();
    for i in 0..n {
        let opening = OPENING_PUNCT.contains(&sentence.tokens[i].form.as_str());
        let next_closing = i + 1 < n && CLOSING_PUNCT.contains(&sentence.tokens[i + 1].form.as_str());
        if (opening || next_closing) && i + 1 < n {
            sentence.tokens[i].misc.set(SPACE_AFTER, "No");
        }
    }
}

/// Parses PerDT text: `ID FORM LEMMA CPOS FPOS FEATS HEAD DEPREL PHEAD PDEPREL`.
///
/// CPOS becomes the token's xpos, FPOS is stored as the `fpos` feature
/// (unless it repeats CPOS), PHEAD/PDEPREL are dropped. Sentence ids are
/// `<prefix>-<n>` with `n` counting every block, skipped ones included.
pub fn parse_perdt(text: &str, id_prefix: &str) -> (Treebank, Vec<ParseDiagnostic>) {
    let mut tb = Treebank::new(Scheme::Perdt);
    let mut diags = Vec::new();
    for (n, block) in blocks(text).into_iter().enumerate() {
        let sent_id = format!("{}-{}", id_prefix, n + 1);
        match perdt_sentence(&block, &mut diags) {
            Ok(mut s) => {
                s.sent_id = sent_id;
                infer_spacing(&mut s);
                s.refresh_text();
                tb.sentences.push(s);
            }
            Err((line_no, message)) => diags.push(ParseDiagnostic {
                line_no,
                severity: Severity::Error,
                message: format!("{}; sentence {} skipped", message, sent_id),
            }),
        }
    }
    (tb, diags)
}

pub fn read_perdt(reader: impl Read, id_prefix: &str) -> io::Result<(Treebank, Vec<ParseDiagnostic>)> {
    Ok(parse_perdt(&read_all(reader)?, id_prefix))
}

fn perdt_sentence(
    block: &Block<'_>,
    diags: &mut Vec<ParseDiagnostic>,
) -> Result<Sentence, (usize, String)> {
    let mut s = Sentence::default();
    let mut warnings = Vec::new();
    for &(line_no, line) in &block.lines {
        if let Some(comment) = line.strip_prefix('#') {
            s.comments.push(comment.to_owned());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err((line_no, format!("expected 10 columns, found {}", cols.len())));
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| (line_no, format!("non-numeric id `{}`", cols[0])))?;
        if id != s.len() + 1 {
            return Err((line_no, format!("token id {} out of sequence", id)));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| (line_no, format!("non-numeric head `{}`", cols[6])))?;
        let raw_form = cols[1];
        let form = normalize_persian(raw_form);
        let mut t = Token::new(id, form.clone())
            .with_lemma(normalize_persian(&field(cols[2])))
            .attach(head, cols[7]);
        if cols[3] != "_" {
            t.xpos = Some(cols[3].to_owned());
        }
        parse_feats(cols[5], &mut t.feats).map_err(|m| (line_no, m))?;
        if cols[4] != "_" && cols[4] != cols[3] {
            t.feats.insert(FPOS_KEY.to_owned(), cols[4].to_owned());
        }
        if form != raw_form {
            t.misc.set(ORIG_FORM_KEY, raw_form);
            warnings.push(ParseDiagnostic {
                line_no,
                severity: Severity::Warn,
                message: format!("normalized form `{}` to `{}`", raw_form, form),
            });
        }
        s.tokens.push(t);
    }
    if s.is_empty() {
        return Err((block.lines[0].0, "sentence has no tokens".to_owned()));
    }
    let first = block.lines[0].0;
    build_tree(&s).map_err(|e| (first, e.to_string()))?;
    diags.extend(warnings);
    Ok(s)
}

/// Parses CoNLL-U text.
///
/// Multiword-token ranges are recorded on the first covered word
/// (`MwtSpan`, `MwtForm`, and the range's own MISC under `Mwt.`); empty
/// nodes are dropped with a warning. Tree well-formedness is not checked
/// here (that is the validator's job), but ids and head ranges are.
pub fn parse_conllu(text: &str) -> (Treebank, Vec<ParseDiagnostic>) {
    let mut tb = Treebank::new(Scheme::Ud);
    let mut diags = Vec::new();
    for block in blocks(text) {
        match conllu_sentence(&block, &mut diags) {
            Ok(s) => tb.sentences.push(s),
            Err((line_no, message)) => diags.push(ParseDiagnostic {
                line_no,
                severity: Severity::Error,
                message: format!("{}; sentence skipped", message),
            }),
        }
    }
    (tb, diags)
}

pub fn read_conllu(reader: impl Read) -> io::Result<(Treebank, Vec<ParseDiagnostic>)> {
    Ok(parse_conllu(&read_all(reader)?))
}

struct Range {
    start: usize,
    end: usize,
    form: String,
    misc: Misc,
}

fn conllu_sentence(
    block: &Block<'_>,
    diags: &mut Vec<ParseDiagnostic>,
) -> Result<Sentence, (usize, String)> {
    let mut s = Sentence::default();
    let mut ranges: Vec<Range> = Vec::new();
    let mut warnings = Vec::new();
    for &(line_no, line) in &block.lines {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.strip_prefix(" sent_id = ") {
                s.sent_id = v.to_owned();
            } else if let Some(v) = comment.strip_prefix(" text = ") {
                s.text = v.to_owned();
            } else {
                s.comments.push(comment.to_owned());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err((line_no, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('.') {
            warnings.push(ParseDiagnostic {
                line_no,
                severity: Severity::Warn,
                message: format!("empty node {} ignored", cols[0]),
            });
            continue;
        }
        if let Some((a, b)) = cols[0].split_once('-') {
            let (start, end) = match (a.parse::<usize>(), b.parse::<usize>()) {
                (Ok(a), Ok(b)) if a >= 1 && b > a => (a, b),
                _ => return Err((line_no, format!("bad range `{}`", cols[0]))),
            };
            if start != s.len() + 1 {
                return Err((line_no, format!("range {} out of sequence", cols[0])));
            }
            ranges.push(Range {
                start,
                end,
                form: cols[1].to_owned(),
                misc: Misc::parse(cols[9]),
            });
            continue;
        }
        let id: usize = cols[0]
            .parse()
            .map_err(|_| (line_no, format!("non-numeric id `{}`", cols[0])))?;
        if id <= s.len() {
            return Err((line_no, format!("duplicated token id {}", id)));
        }
        if id != s.len() + 1 {
            return Err((line_no, format!("token id {} out of sequence", id)));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| (line_no, format!("non-numeric head `{}`", cols[6])))?;
        let mut t = Token::new(id, cols[1])
            .with_lemma(field(cols[2]))
            .attach(head, field(cols[7]));
        if cols[3] != "_" {
            let upos: Upos = cols[3].parse().map_err(|e| (line_no, format!("{}", e)))?;
            t.upos = Some(upos);
        }
        if cols[4] != "_" {
            match cols[4].split_once(',') {
                Some((cpos, fpos)) if !fpos.is_empty() => {
                    t.xpos = Some(cpos.to_owned());
                    t.feats.insert(FPOS_KEY.to_owned(), fpos.to_owned());
                }
                _ => t.xpos = Some(cols[4].to_owned()),
            }
        }
        parse_feats(cols[5], &mut t.feats).map_err(|m| (line_no, m))?;
        t.misc = Misc::parse(cols[9]);
        s.tokens.push(t);
    }
    if s.is_empty() {
        return Err((block.lines[0].0, "sentence has no tokens".to_owned()));
    }
    for r in ranges {
        if r.end > s.len() {
            return Err((block.lines[0].0, format!("range {}-{} past the end", r.start, r.end)));
        }
        let t = s.tok_mut(r.start);
        let mut misc = Misc::new();
        misc.set(MWT_SPAN, (r.end - r.start + 1).to_string());
        misc.set(MWT_FORM, r.form);
        for (k, v) in r.misc.iter() {
            misc.push_raw(format!("{}{}", MWT_MISC_PREFIX, k), v.map(str::to_owned));
        }
        for (k, v) in t.misc.iter() {
            misc.push_raw(k.to_owned(), v.map(str::to_owned));
        }
        t.misc = misc;
    }
    s.check_ids().map_err(|e| (block.lines[0].0, e.to_string()))?;
    diags.extend(warnings);
    Ok(s)
}

fn is_mwt_key(k: &str) -> bool {
    k == MWT_SPAN || k == MWT_FORM || k.starts_with(MWT_MISC_PREFIX)
}

fn misc_column(misc: &Misc, keep: impl Fn(&str) -> Option<String>) -> String {
    let mut out = Misc::new();
    for (k, v) in misc.iter() {
        if let Some(k) = keep(k) {
            out.push_raw(k, v.map(str::to_owned));
        }
    }
    out.to_string()
}

fn check_mapped(s: &Sentence, t: &Token) -> Result<(), WriteError> {
    let reason = if t.upos.is_none() {
        Some("UPOS is not set".to_owned())
    } else if t.deprel.is_empty() {
        Some("relation is not set".to_owned())
    } else if is_perdt_label(&t.deprel) {
        Some(format!("relation `{}` was not mapped", t.deprel))
    } else {
        None
    };
    match reason {
        Some(reason) => Err(WriteError::UnmappedToken {
            sent_id: s.sent_id.clone(),
            token: t.id,
            reason,
        }),
        None => Ok(()),
    }
}

/// Writes one sentence in CoNLL-U.
pub fn write_sentence(out: &mut impl Write, s: &Sentence) -> Result<(), WriteError> {
    for t in &s.tokens {
        check_mapped(s, t)?;
    }
    if !s.sent_id.is_empty() {
        writeln!(out, "# sent_id = {}", s.sent_id)?;
    }
    if !s.text.is_empty() {
        writeln!(out, "# text = {}", s.text)?;
    }
    for c in &s.comments {
        writeln!(out, "#{}", c)?;
    }
    for t in &s.tokens {
        if let (Some(span), Some(form)) = (
            t.misc.get(MWT_SPAN).and_then(|k| k.parse::<usize>().ok()),
            t.misc.get(MWT_FORM),
        ) {
            let misc = misc_column(&t.misc, |k| {
                k.strip_prefix(MWT_MISC_PREFIX).map(str::to_owned)
            });
            writeln!(
                out,
                "{}-{}\t{}\t_\t_\t_\t_\t_\t_\t_\t{}",
                t.id,
                t.id + span - 1,
                form,
                misc
            )?;
        }
        let xpos = match (&t.xpos, t.feats.get(FPOS_KEY)) {
            (Some(x), Some(f)) if f != x => format!("{},{}", x, f),
            (Some(x), _) => x.clone(),
            (None, _) => "_".to_owned(),
        };
        let feats: Vec<String> = t
            .feats
            .iter()
            .filter(|(k, _)| k.as_str() != FPOS_KEY)
            .map(|(k, v)| format!("{}={}", k, v))
            .collect();
        let feats = if feats.is_empty() {
            "_".to_owned()
        } else {
            feats.join("|")
        };
        let misc = misc_column(&t.misc, |k| (!is_mwt_key(k)).then(|| k.to_owned()));
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t_\t{}",
            t.id,
            t.form,
            if t.lemma.is_empty() { "_" } else { &t.lemma },
            t.upos.map(Upos::as_str).unwrap_or("_"),
            xpos,
            feats,
            t.head,
            t.deprel,
            misc
        )?;
    }
    writeln!(out)?;
    Ok(())
}

pub fn write_conllu(treebank: &Treebank, mut out: impl Write) -> Result<(), WriteError> {
    for s in &treebank.sentences {
        write_sentence(&mut out, s)?;
    }
    Ok(())
}

pub fn to_conllu_string(treebank: &Treebank) -> Result<String, WriteError> {
    let mut buf = Vec::new();
    write_conllu(treebank, &mut buf)?;
    Ok(String::from_utf8(buf).expect("writer emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PERDT: &str = "1\tاو\tاو\tPR\tSEPER\tnumber=SING|person=3\t3\tSBJ\t_\t_\n\
2\tکتاب\tکتاب\tN\tIANM\tnumber=SING\t3\tOBJ\t_\t_\n\
3\tخرید\tخرید#خر\tV\tACT\tnumber=SING|person=3|tma=GS\t0\tROOT\t_\t_\n";

    #[test]
    fn perdt_happy_path() {
        let (tb, diags) = parse_perdt(PERDT, "t");
        assert!(diags.is_empty());
        assert_eq!(tb.sentences.len(), 1);
        let s = &tb.sentences[0];
        assert_eq!(s.sent_id, "t-1");
        assert_eq!(s.text, "او کتاب خرید");
        let t = s.tok(2);
        assert_eq!(t.xpos.as_deref(), Some("N"));
        assert_eq!(t.feats.get("fpos").map(String::as_str), Some("IANM"));
        assert_eq!(t.feats.get("number").map(String::as_str), Some("SING"));
        assert_eq!((t.head, t.deprel.as_str()), (3, "OBJ"));
    }

    #[test]
    fn perdt_wrong_column_count() {
        let bad = "1\tاو\tاو\tPR\tSEPER\t_\t0\tROOT\t_\n\n".to_owned() + PERDT;
        let (tb, diags) = parse_perdt(&bad, "t");
        assert_eq!(tb.sentences.len(), 1);
        assert_eq!(tb.sentences[0].sent_id, "t-2");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Error);
        assert_eq!(diags[0].line_no, 1);
        assert!(diags[0].message.contains("t-1"));
    }

    #[test]
    fn perdt_non_numeric_head() {
        let bad = PERDT.replace("\t0\tROOT", "\tx\tROOT");
        let (tb, diags) = parse_perdt(&bad, "t");
        assert!(tb.sentences.is_empty());
        assert!(diags[0].message.contains("non-numeric head"));
    }

    #[test]
    fn perdt_cycle_is_skipped() {
        let bad = PERDT.replace("\t0\tROOT", "\t1\tROOT");
        let (tb, diags) = parse_perdt(&bad, "t");
        assert!(tb.sentences.is_empty());
        assert_eq!(diags.len(), 1);
    }

    #[test]
    fn perdt_form_with_space() {
        let text = "1\tخواهد گفت\tگفت#گو\tV\tACT\t_\t0\tROOT\t_\t_\n";
        let (tb, _) = parse_perdt(text, "t");
        assert_eq!(tb.sentences[0].tokens.len(), 1);
        assert_eq!(tb.sentences[0].tok(1).form, "خواهد گفت");
    }

    #[test]
    fn perdt_normalizes_arabic_letters() {
        let text = "1\tكتاب\tكتاب\tN\tIANM\t_\t0\tROOT\t_\t_\n";
        let (tb, diags) = parse_perdt(text, "t");
        let t = tb.sentences[0].tok(1);
        assert_eq!(t.form, "کتاب");
        assert_eq!(t.lemma, "کتاب");
        assert_eq!(t.misc.get(ORIG_FORM_KEY), Some("كتاب"));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Warn);
    }

    #[test]
    fn perdt_spacing_before_punct() {
        let text = "1\tرفت\tرفت#رو\tV\tACT\t_\t0\tROOT\t_\t_\n2\t.\t.\tPUNC\tPUNC\t_\t1\tPUNC\t_\t_\n";
        let (tb, _) = parse_perdt(text, "t");
        let s = &tb.sentences[0];
        assert_eq!(s.text, "رفت.");
        assert!(!s.tok(1).misc.space_after());
        assert!(s.tok(2).feats.is_empty());
    }

    const UD: &str = "# sent_id = s1\n# text = کتابش خوب است.\n\
1-2\tکتابش\t_\t_\t_\t_\t_\t_\t_\t_\n\
1\tکتاب\tکتاب\tNOUN\tN,IANM\tNumber=Sing\t3\tnsubj\t_\t_\n\
2\tش\tاو\tPRON\tPR\t_\t1\tnmod\t_\t_\n\
3\tخوب\tخوب\tADJ\tADJ,AJP\t_\t0\troot\t_\t_\n\
4\tاست\tاست#هست\tAUX\tV,ACT\t_\t3\tcop\t_\tSpaceAfter=No\n\
5\t.\t.\tPUNCT\tPUNC\t_\t3\tpunct\t_\t_\n\n";

    #[test]
    fn conllu_roundtrip() {
        let (tb, diags) = parse_conllu(UD);
        assert!(diags.is_empty(), "{:?}", diags);
        let s = &tb.sentences[0];
        assert_eq!(s.sent_id, "s1");
        assert_eq!(s.tok(1).misc.get(MWT_FORM), Some("کتابش"));
        assert_eq!(s.surface_text(), s.text);
        assert_eq!(to_conllu_string(&tb).unwrap(), UD);
    }

    #[test]
    fn conllu_range_misc() {
        let text = UD.replace("کتابش\t_\t_\t_\t_\t_\t_\t_\t_", "کتابش\t_\t_\t_\t_\t_\t_\t_\tSpaceAfter=No");
        let (tb, _) = parse_conllu(&text);
        assert_eq!(tb.sentences[0].tok(1).misc.get("Mwt.SpaceAfter"), Some("No"));
        assert_eq!(to_conllu_string(&tb).unwrap(), text);
    }

    #[test]
    fn conllu_duplicate_id() {
        let text = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n1\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
        let (tb, diags) = parse_conllu(text);
        assert!(tb.sentences.is_empty());
        assert!(diags[0].message.contains("duplicated"));
        assert_eq!(diags[0].line_no, 2);
    }

    #[test]
    fn empty_feats_written_as_underscore() {
        let (tb, _) = parse_conllu(UD);
        let out = to_conllu_string(&tb).unwrap();
        assert!(out.contains("\tش\tاو\tPRON\tPR\t_\t1\t"));
    }

    #[test]
    fn residual_perdt_label_is_rejected() {
        let mut s = Sentence::new(vec![Token::new(1, "a")
            .with_upos(Upos::X)
            .attach(0, "SBJ")]);
        s.sent_id = "x".into();
        let tb = Treebank {
            sentences: vec![s],
            source_scheme: Scheme::Ud,
        };
        assert!(matches!(
            to_conllu_string(&tb),
            Err(WriteError::UnmappedToken { token: 1, .. })
        ));
    }

    #[test]
    fn unset_upos_is_rejected() {
        let tb = Treebank {
            sentences: vec![Sentence::new(vec![Token::new(1, "a").attach(0, "root")])],
            source_scheme: Scheme::Ud,
        };
        assert!(to_conllu_string(&tb).is_err());
    }
}
