//! Intel-syntax x86-64 assembly IR.
//!
//! Textual listings (compiler `-masm=intel` output or disassembler dumps) are
//! parsed into [`AssemblyFunction`]s. Unknown mnemonics are kept in the IR so
//! that token-level metrics work on arbitrary compiler output; only the
//! emulator restricts the mnemonic set.

mod parse;
mod register;
mod render;
mod tokenize;

use std::collections::BTreeMap;

pub use parse::parse_assembly;
pub use register::{Gpr, Register};
pub use tokenize::{tokenize, tokenize_instruction, tokenize_text};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AsmError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("function contains no instructions")]
    EmptyFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    Cs,
    Ds,
    Es,
    Fs,
    Gs,
    Ss,
}

impl Segment {
    pub fn name(self) -> &'static str {
        match self {
            Segment::Cs => "cs",
            Segment::Ds => "ds",
            Segment::Es => "es",
            Segment::Fs => "fs",
            Segment::Gs => "gs",
            Segment::Ss => "ss",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "cs" => Segment::Cs,
            "ds" => Segment::Ds,
            "es" => Segment::Es,
            "fs" => Segment::Fs,
            "gs" => Segment::Gs,
            "ss" => Segment::Ss,
            _ => return None,
        })
    }
}

/// Index register together with its scale; the scale only exists with an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaledIndex {
    pub register: Register,
    /// One of 1, 2, 4, 8.
    pub scale: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MemoryOperand {
    pub segment: Option<Segment>,
    /// Symbolic displacement such as `.LC0` in `.LC0[rip]`.
    pub symbol: Option<String>,
    pub base: Option<Register>,
    pub index: Option<ScaledIndex>,
    pub displacement: i64,
    /// Access size in bytes when written explicitly (`qword ptr`).
    pub size: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Register(Register),
    Immediate(i64),
    Memory(MemoryOperand),
    LabelRef(String),
    /// Quoted literal, kept verbatim including its quotes.
    StringLiteral(String),
    /// Operand text of an unknown instruction that did not fit the grammar.
    Raw(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub mnemonic: String,
    pub operands: Vec<Operand>,
    pub raw_text: String,
}

impl Instruction {
    /// Structural equality, ignoring the original source text.
    pub fn same_ir(&self, other: &Instruction) -> bool {
        self.mnemonic == other.mnemonic && self.operands == other.operands
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssemblyFunction {
    pub name: String,
    pub instructions: Vec<Instruction>,
    /// Label symbol to the index of the instruction that follows it.
    pub labels: BTreeMap<String, usize>,
    pub token_count: usize,
}

impl AssemblyFunction {
    /// Builds a function and computes its token count.
    ///
    /// Labels pointing at or past the end of `instructions` are dropped.
    pub fn new(
        name: impl Into<String>,
        instructions: Vec<Instruction>,
        mut labels: BTreeMap<String, usize>,
    ) -> Self {
        let n = instructions.len();
        labels.retain(|_, idx| *idx < n);
        let mut f = AssemblyFunction {
            name: name.into(),
            instructions,
            labels,
            token_count: 0,
        };
        f.token_count = tokenize(&f).len();
        f
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn label_index(&self, symbol: &str) -> Option<usize> {
        self.labels.get(symbol).copied()
    }

    /// Labels grouped by instruction index, in symbol order.
    pub(crate) fn labels_by_index(&self) -> BTreeMap<usize, Vec<&str>> {
        let mut by_index: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (sym, &idx) in &self.labels {
            by_index.entry(idx).or_default().push(sym);
        }
        by_index
    }

    /// Same instructions and labels, ignoring `raw_text`.
    pub fn same_ir(&self, other: &AssemblyFunction) -> bool {
        self.name == other.name
            && self.labels == other.labels
            && self.instructions.len() == other.instructions.len()
            && self
                .instructions
                .iter()
                .zip(&other.instructions)
                .all(|(a, b)| a.same_ir(b))
    }
}

/// Operand counts accepted for mnemonics the emulator understands.
/// `None` for mnemonics outside that set.
pub fn supported_arity(mnemonic: &str) -> Option<&'static [usize]> {
    Some(match mnemonic {
        "mov" | "movzx" | "movsx" | "movsxd" | "lea" | "add" | "sub" | "and" | "or" | "xor"
        | "cmp" | "test" => &[2],
        "shl" | "sal" | "shr" | "sar" => &[1, 2],
        "imul" => &[1, 2, 3],
        "mul" | "div" | "idiv" | "inc" | "dec" | "neg" | "not" | "push" | "pop" => &[1],
        "jmp" | "call" => &[1],
        "ret" | "retn" | "nop" => &[0, 1],
        "cdq" | "cqo" | "cdqe" | "leave" => &[0],
        m if is_conditional_jump(m) => &[1],
        _ => return None,
    })
}

pub fn is_conditional_jump(mnemonic: &str) -> bool {
    condition_code(mnemonic).is_some()
}

/// Condition suffix for a jcc mnemonic, with aliases folded
/// (`jz` -> `e`, `jnae` -> `b`, ...).
pub fn condition_code(mnemonic: &str) -> Option<&'static str> {
    Some(match mnemonic {
        "je" | "jz" => "e",
        "jne" | "jnz" => "ne",
        "jl" | "jnge" => "l",
        "jle" | "jng" => "le",
        "jg" | "jnle" => "g",
        "jge" | "jnl" => "ge",
        "jb" | "jnae" | "jc" => "b",
        "jbe" | "jna" => "be",
        "ja" | "jnbe" => "a",
        "jae" | "jnb" | "jnc" => "ae",
        "js" => "s",
        "jns" => "ns",
        _ => return None,
    })
}

pub fn is_branch(mnemonic: &str) -> bool {
    mnemonic == "jmp" || mnemonic == "call" || is_conditional_jump(mnemonic)
}
