//! Conversion of PerDT dependency treebanks to Universal Dependencies.
//!
//! The pipeline runs per sentence: read PerDT, apply the systematic
//! corrections, split multiword verbs and clitics, map POS tags, run the
//! dependency pre-pass and the relation-mapping rules, validate, and
//! write CoNLL-U. See [`pipeline`] for the driver.

pub mod conll;
pub mod deprel;
pub mod diff;
pub mod fixes;
pub mod lexicon;
pub mod model;
pub mod pipeline;
pub mod pos;
pub mod stats;
pub mod tokenize;
pub mod validate;

pub use conll::{parse_conllu, parse_perdt, to_conllu_string, write_conllu, ParseDiagnostic, Severity};
pub use deprel::rules::{MappingRule, RuleTable};
pub use lexicon::LexiconConfig;
pub use model::{build_tree, DependencyTree, Sentence, Token, Treebank, Upos};
pub use pipeline::{Execution, Pipeline, PipelineOptions};
