//! The per-sentence conversion driver.

use std::fmt::Write as _;

use crate::conll::{ParseDiagnostic, Severity};
use crate::deprel::{convert_sentence, prepass, ConversionWarning, RuleTable};
use crate::fixes::{self, CorrectionCounts};
use crate::lexicon::LexiconConfig;
use crate::model::{Scheme, Sentence, Treebank};
use crate::pos::{apply_ner, map_sentence_pos, NerAnnotation, PosError};
use crate::tokenize::{detach_clitics, split_multiword_verbs};
use crate::validate::{ValidationIssue, ValidationSummary, Validator};

/// How per-sentence work is scheduled. `Parallel` needs the `parallel`
/// feature and runs sequentially without it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Applies `f` to every item, keeping input order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Maps every item and folds the results with an associative,
    /// commutative `merge`.
    pub fn map_reduce<T, R, F, M>(self, items: &[T], f: F, merge: M) -> R
    where
        T: Sync,
        R: Send + Default,
        F: Fn(&T) -> R + Sync + Send,
        M: Fn(R, R) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).reduce(R::default, merge)
            }
            _ => items.iter().map(f).fold(R::default(), merge),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    pub skip_tokenization: bool,
    pub skip_systematic_fixes: bool,
    pub execution: Execution,
}

/// Result of converting one sentence.
#[derive(Debug, Clone)]
pub struct SentenceResult {
    pub sentence: Sentence,
    pub corrections: CorrectionCounts,
    /// Tokens changed in any field by the systematic corrections.
    pub corrected_tokens: usize,
    /// Token count after multiword verbs and clitics were split.
    pub tokenized_tokens: usize,
    pub warnings: Vec<ConversionWarning>,
    pub issues: Vec<ValidationIssue>,
}

/// Token and sentence counts after each stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageCounters {
    pub sentences_read: usize,
    pub sentences_skipped: usize,
    pub tokens_read: usize,
    pub tokens_corrected: usize,
    pub tokens_after_tokenization: usize,
    pub conversion_warnings: usize,
    pub dep_fallbacks: usize,
    pub tokens_written: usize,
}

impl StageCounters {
    pub fn report(&self) -> String {
        let mut out = String::new();
        for (k, v) in [
            ("read.sentences", self.sentences_read),
            ("read.tokens", self.tokens_read),
            ("fixes.tokens_changed", self.tokens_corrected),
            ("tokenize.tokens", self.tokens_after_tokenization),
            ("convert.warnings", self.conversion_warnings),
            ("convert.dep_fallbacks", self.dep_fallbacks),
            ("skipped.sentences", self.sentences_skipped),
            ("output.tokens", self.tokens_written),
        ] {
            let _ = writeln!(out, "{}: {}", k, v);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ConversionOutput {
    pub treebank: Treebank,
    pub counters: StageCounters,
    pub corrections: CorrectionCounts,
    pub validation: ValidationSummary,
    /// Skipped sentences and conversion warnings, keyed by sentence.
    pub diagnostics: Vec<ParseDiagnostic>,
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub lexicon: LexiconConfig,
    pub rules: RuleTable,
    pub validator: Validator,
    pub options: PipelineOptions,
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline::new(LexiconConfig::builtin(), RuleTable::builtin(), PipelineOptions::default())
    }
}

impl Pipeline {
    pub fn new(lexicon: LexiconConfig, rules: RuleTable, options: PipelineOptions) -> Self {
        Pipeline {
            validator: Validator::new(crate::validate::Registry::builtin(), lexicon.clone()),
            lexicon,
            rules,
            options,
        }
    }

    /// Converts one PerDT sentence.
    pub fn convert(&self, s: &Sentence, ner: Option<&NerAnnotation>) -> Result<SentenceResult, PosError> {
        let lex = &self.lexicon;
        let s = apply_ner(s, ner)?;
        let mut corrections = CorrectionCounts::default();
        let mut corrected_tokens = 0;
        let s = if self.options.skip_systematic_fixes {
            s
        } else {
            let fixed = fixes::apply_all(&s, lex);
            corrections.add(&s, &fixed);
            corrected_tokens = s.tokens.iter().zip(&fixed.tokens).filter(|(a, b)| a != b).count();
            fixed
        };
        let s = if self.options.skip_tokenization {
            s
        } else {
            detach_clitics(&split_multiword_verbs(&s, &lex.verbs), &lex.clitics)
        };
        let tokenized_tokens = s.len();
        let s = map_sentence_pos(&s, lex)?;
        let s = prepass(&s, lex);
        let (sentence, warnings) = convert_sentence(&s, &self.rules, lex);
        let issues = self.validator.validate(&sentence);
        Ok(SentenceResult {
            sentence,
            corrections,
            corrected_tokens,
            tokenized_tokens,
            warnings,
            issues,
        })
    }

    /// Converts a treebank. `ner` is indexed like the sentences; missing
    /// entries fall back to the identifier heuristic. Sentences that fail
    /// are dropped with an ERROR diagnostic.
    pub fn convert_treebank(&self, tb: &Treebank, ner: &[NerAnnotation]) -> ConversionOutput {
        let indexed: Vec<(usize, &Sentence)> = tb.sentences.iter().enumerate().collect();
        let results = self
            .options
            .execution
            .map(&indexed, |&(i, s)| self.convert(s, ner.get(i)));
        let mut out = ConversionOutput {
            treebank: Treebank::new(Scheme::Ud),
            counters: StageCounters {
                sentences_read: tb.sentences.len(),
                tokens_read: tb.token_count(),
                ..Default::default()
            },
            corrections: CorrectionCounts::default(),
            validation: ValidationSummary::default(),
            diagnostics: Vec::new(),
        };
        for ((i, src), res) in indexed.into_iter().zip(results) {
            match res {
                Ok(r) => {
                    let c = &mut out.counters;
                    c.tokens_after_tokenization += r.tokenized_tokens;
                    c.tokens_corrected += r.corrected_tokens;
                    c.conversion_warnings += r.warnings.len();
                    c.dep_fallbacks += r.sentence.tokens.iter().filter(|t| t.deprel == "dep").count();
                    c.tokens_written += r.sentence.len();
                    out.corrections = std::mem::take(&mut out.corrections).merge(&r.corrections);
                    for w in &r.warnings {
                        out.diagnostics.push(ParseDiagnostic {
                            line_no: 0,
                            severity: Severity::Warn,
                            message: format!("{}: {}", src.sent_id, w),
                        });
                    }
                    out.validation.add(&r.sentence, r.issues);
                    out.treebank.sentences.push(r.sentence);
                }
                Err(e) => {
                    out.counters.sentences_skipped += 1;
                    out.diagnostics.push(ParseDiagnostic {
                        line_no: 0,
                        severity: Severity::Error,
                        message: format!("sentence {} ({}) skipped: {}", i + 1, src.sent_id, e),
                    });
                }
            }
        }
        out
    }
}
