//! Source/assembly pair corpora: record types, JSON-lines I/O, filtering,
//! comment and docstring cleanup, profile assignment and length mixing.

mod comments;
mod docstring;
mod filter;
mod io;
mod mix;
mod profile;

use serde::{Deserialize, Serialize};

use crate::asm::{parse_assembly, AsmError, AssemblyFunction};

pub use comments::strip_source_comments;
pub use docstring::{clean_docstring, DEFAULT_MIN_WORDS};
pub use filter::{filter_pairs, has_inlined_callees_heuristic, FilterReport, DEFAULT_MIN_BODY_LINES};
pub use io::{parse_record_line, read_corpus, write_corpus};
pub use mix::{mix_by_length, sample_mix, LengthBucket, MixConfig};
pub use profile::assign_profile;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("record `{id}`: body_line_count is {declared} but the body has {actual} non-empty lines")]
    BodyLineCount { id: String, declared: usize, actual: usize },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("unterminated block comment opened on body line {line}")]
    UnterminatedComment { line: usize },
    #[error("record `{id}`: {source}")]
    Assembly { id: String, source: AsmError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    C,
    Cpp,
    Go,
    Java,
    Javascript,
    Php,
    Python,
    Ruby,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFunction {
    pub name: String,
    pub language: Language,
    pub body: String,
    pub docstring: Option<String>,
    pub body_line_count: usize,
}

/// Number of lines of `body` that contain something other than whitespace.
pub fn count_body_lines(body: &str) -> usize {
    body.lines().filter(|l| !l.trim().is_empty()).count()
}

impl SourceFunction {
    pub fn new(name: impl Into<String>, language: Language, body: impl Into<String>) -> Self {
        let body = body.into();
        SourceFunction {
            name: name.into(),
            language,
            body_line_count: count_body_lines(&body),
            body,
            docstring: None,
        }
    }

    pub fn check_line_count(&self, id: &str) -> Result<(), DatasetError> {
        let actual = count_body_lines(&self.body);
        if actual != self.body_line_count {
            return Err(DatasetError::BodyLineCount {
                id: id.to_string(),
                declared: self.body_line_count,
                actual,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Compiler {
    #[serde(rename = "gcc-7")]
    Gcc7,
    #[serde(rename = "gcc-9")]
    Gcc9,
    #[serde(rename = "gcc-11")]
    Gcc11,
    #[serde(rename = "clang-9")]
    Clang9,
    #[serde(rename = "clang-11")]
    Clang11,
    #[serde(rename = "clang-12")]
    Clang12,
}

impl Compiler {
    pub const ALL: [Compiler; 6] = [
        Compiler::Gcc7,
        Compiler::Gcc9,
        Compiler::Gcc11,
        Compiler::Clang9,
        Compiler::Clang11,
        Compiler::Clang12,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OptLevel {
    O0,
    O1,
    O2,
    O3,
    Os,
}

impl OptLevel {
    pub const ALL: [OptLevel; 5] = [OptLevel::O0, OptLevel::O1, OptLevel::O2, OptLevel::O3, OptLevel::Os];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompilationProfile {
    pub compiler: Compiler,
    pub opt_level: OptLevel,
    pub stripped: bool,
}

impl CompilationProfile {
    /// Row-major position in the compiler × optimization-level grid.
    pub fn grid_cell(&self) -> usize {
        let c = Compiler::ALL.iter().position(|&c| c == self.compiler).unwrap();
        let o = OptLevel::ALL.iter().position(|&o| o == self.opt_level).unwrap();
        c * OptLevel::ALL.len() + o
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub source: SourceFunction,
    pub assembly_text: String,
    pub profile: CompilationProfile,
    pub inline_flag: bool,
    /// Demangled symbol name from ingestion metadata; when present it
    /// replaces the name taken from the assembly label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demangled_name: Option<String>,
}

impl PairRecord {
    pub fn assembly(&self) -> Result<AssemblyFunction, DatasetError> {
        let mut f = parse_assembly(&self.assembly_text).map_err(|source| DatasetError::Assembly {
            id: self.id.clone(),
            source,
        })?;
        if let Some(name) = &self.demangled_name {
            f.name = name.clone();
        }
        Ok(f)
    }

    /// Pre-BPE tokens of the source body plus tokens of the parsed assembly.
    pub fn token_count(&self) -> Result<usize, DatasetError> {
        Ok(crate::asm::tokenize_text(&self.source.body).len() + self.assembly()?.token_count)
    }
}
