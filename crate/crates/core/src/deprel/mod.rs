//! Dependency relation mapping: the pre-pass, the rotations, and the
//! rule engine that relabels PerDT relations as UD relations.

pub mod convert;
pub mod prepass;
pub mod rotate;
pub mod rules;
pub mod voice;

pub use convert::{convert_sentence, ConversionWarning};
pub use prepass::prepass;
pub use rotate::{cmr, conj_rotation, npp_rotation, Role, RotateError};
pub use rules::{MappingRule, Preaction, RuleTable};
pub use voice::{detect_voice, Voice};

/// The 43 relations of the PerDT scheme.
pub const PERDT_LABELS: [&str; 43] = [
    "ACL", "ADV", "ADVC", "AJCONJ", "AJPP", "AJUCL", "APOSTMOD", "APP", "APREMOD", "AVCONJ",
    "COMPPP", "ENC", "LVP", "MESU", "MOS", "MOZ", "NADV", "NCL", "NCONJ", "NE", "NEZ", "NPOSTMOD",
    "NPP", "NPREMOD", "NPRT", "NVE", "OBJ", "OBJ2", "PARCL", "PART", "PCONJ", "POSDEP", "PRD",
    "PREDEP", "PROG", "PUNC", "ROOT", "SBJ", "TAM", "VCL", "VCONJ", "VPP", "VPRT",
];

/// Relations of the converted treebank.
pub const UD_LABELS: [&str; 37] = [
    "acl", "advcl", "advmod", "amod", "appos", "aux", "aux:pass", "case", "cc", "ccomp",
    "compound", "compound:lv", "compound:lvc", "conj", "cop", "csubj", "dep", "det", "dislocated",
    "fixed", "flat:name", "flat:num", "goeswith", "iobj", "mark", "nmod", "nsubj", "nsubj:pass",
    "nummod", "obj", "obl", "obl:arg", "parataxis", "punct", "root", "vocative", "xcomp",
];

/// Relations whose bearer must not have dependents.
pub const LEAF_LABELS: [&str; 10] = [
    "case", "mark", "cc", "aux", "aux:pass", "cop", "det", "goeswith", "fixed", "punct",
];

/// Relations a function word may still govern.
pub const LEAF_DEPENDENT_LABELS: [&str; 2] = ["fixed", "goeswith"];

/// Labels on the conjunct side of a PerDT coordination.
pub const CONJ_LABELS: [&str; 5] = ["AJCONJ", "AVCONJ", "NCONJ", "PCONJ", "VCONJ"];

pub fn is_perdt_label(label: &str) -> bool {
    PERDT_LABELS.contains(&label)
}

pub fn is_ud_label(label: &str) -> bool {
    UD_LABELS.contains(&label)
}

pub fn is_leaf_label(label: &str) -> bool {
    LEAF_LABELS.contains(&label)
}
