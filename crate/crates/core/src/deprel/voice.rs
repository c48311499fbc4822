use crate::conll::FPOS_KEY;
use crate::lexicon::LexiconConfig;
use crate::model::{Sentence, Upos};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Voice {
    Active,
    Passive,
}

/// Voice of a verbal token.
///
/// Passive when the features say so (PerDT fine tag PASS or
/// `Voice=Pass`), when an `aux:pass` word hangs under the verb, or when
/// the verb is a shodan inflection right after a past participle.
/// Everything else, non-verbal tokens included, is active.
pub fn detect_voice(sentence: &Sentence, id: usize, lexicon: &LexiconConfig) -> Voice {
    let t = sentence.tok(id);
    let feat = |k: &str| t.feats.get(k).map(String::as_str);
    if feat(FPOS_KEY) == Some("PASS") || feat("Voice") == Some("Pass") {
        return Voice::Passive;
    }
    if sentence
        .tokens
        .iter()
        .any(|d| d.head == id && d.deprel == "aux:pass")
    {
        return Voice::Passive;
    }
    let verbal = matches!(t.upos, Some(Upos::Verb) | Some(Upos::Aux)) || t.xpos_is("V");
    if verbal && id > 1 && lexicon.is_shodan_form(&t.form) {
        let prev = sentence.tok(id - 1);
        let participle = (prev.xpos_is("V") || prev.upos_is(Upos::Verb)) && prev.form.ends_with('ه');
        if participle {
            return Voice::Passive;
        }
    }
    Voice::Active
}
