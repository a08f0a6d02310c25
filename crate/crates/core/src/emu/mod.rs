//! Deterministic micro-emulator for parsed x86-64 functions.
//!
//! Execution starts from a pseudo-random machine state derived from a 64-bit
//! seed: every general-purpose register, every memory byte read before it is
//! written, the stack base and the results of external calls all come from
//! [`prf`]. Two functions executed under the same seed therefore start from
//! identical states, which makes their final registers and memory-access
//! traces directly comparable.
//!
//! `rip` is an instruction index. The emulator interprets the IR; nothing is
//! assembled to machine code.
//!
//! # Pseudo-random function
//!
//! ```text
//! prf(seed, x):
//!     z = (seed ^ x) + 0x9E3779B97F4A7C15          (wrapping)
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9     (wrapping)
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB     (wrapping)
//!     return z ^ (z >> 31)
//! ```
//!
//! Inputs per use (all additions wrapping):
//!
//! | value                         | input                                   |
//! |-------------------------------|-----------------------------------------|
//! | register `i` (encoding order) | `REG_DOMAIN + i`                        |
//! | memory byte at address `A`    | `A` (low 8 bits of the output)          |
//! | stack base                    | `STACK_DOMAIN`                          |
//! | code base                     | `CODE_DOMAIN`                           |
//! | `fs` / `gs` base              | `FS_DOMAIN` / `GS_DOMAIN`               |
//! | symbol `s`                    | `SYMBOL_DOMAIN ^ fnv1a64(s)`            |
//! | external call at index `k`    | `CALL_DOMAIN + (k << 8) + register i`   |

mod catalog;
mod exec;
mod machine;

use serde::Serialize;

use crate::asm::AssemblyFunction;

pub use catalog::{equivalence_catalog, EquivalentPair};
pub use exec::is_supported_mnemonic;
pub use machine::{Flags, MachineState, Memory};

pub const DEFAULT_MAX_INSTRUCTIONS: usize = 2000;

pub const REG_DOMAIN: u64 = 0x5245_4749_0000_0000;
pub const STACK_DOMAIN: u64 = 0x5354_4143_4b00_0000;
pub const CODE_DOMAIN: u64 = 0x434f_4445_0000_0000;
pub const FS_DOMAIN: u64 = 0x4653_4253_0000_0000;
pub const GS_DOMAIN: u64 = 0x4753_4253_0000_0000;
pub const SYMBOL_DOMAIN: u64 = 0x5359_4d42_0000_0000;
pub const CALL_DOMAIN: u64 = 0x4341_4c4c_0000_0000;

/// SplitMix64 finalizer applied to `seed ^ input`.
pub fn prf(seed: u64, input: u64) -> u64 {
    let mut z = (seed ^ input).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MemoryEvent {
    pub kind: AccessKind,
    pub address: u64,
    /// 1, 2, 4 or 8 bytes.
    pub size: u8,
    /// Zero-extended value transferred.
    pub value: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Ret,
    InstructionLimit,
    UnsupportedInstruction,
    Fault,
}

impl HaltReason {
    pub fn as_str(self) -> &'static str {
        match self {
            HaltReason::Ret => "ret",
            HaltReason::InstructionLimit => "instruction_limit",
            HaltReason::UnsupportedInstruction => "unsupported_instruction",
            HaltReason::Fault => "fault",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionTrace {
    pub final_rax: u64,
    pub final_rsp: u64,
    pub final_rbp: u64,
    /// All sixteen registers at halt, in encoding order.
    pub final_gpr: [u64; 16],
    pub events: Vec<MemoryEvent>,
    pub executed_count: usize,
    pub halt_reason: HaltReason,
    /// Instruction index at which execution stopped.
    pub halt_index: usize,
}

/// Runs `f` from the seeded initial state until `ret` at call depth zero,
/// the instruction limit, an unsupported instruction, or a fault.
pub fn execute(f: &AssemblyFunction, seed: u64, max_instructions: usize) -> ExecutionTrace {
    exec::Executor::new(f, seed).run(max_instructions)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuntimeScore {
    pub rax_equal: bool,
    /// `rsp` and `rbp` both equal.
    pub stack_equal: bool,
    pub trace_equal: bool,
    /// Mean of the three indicators.
    pub value: f64,
}

impl RuntimeScore {
    pub fn from_traces(a: &ExecutionTrace, b: &ExecutionTrace) -> Self {
        let rax_equal = a.final_rax == b.final_rax;
        let stack_equal = a.final_rsp == b.final_rsp && a.final_rbp == b.final_rbp;
        let trace_equal = a.events == b.events;
        let hits = [rax_equal, stack_equal, trace_equal]
            .iter()
            .filter(|&&x| x)
            .count();
        RuntimeScore {
            rax_equal,
            stack_equal,
            trace_equal,
            value: hits as f64 / 3.0,
        }
    }
}

/// Executes both functions from the same seeded state and compares return
/// register, stack registers and memory-access sequence.
pub fn runtime_similarity(
    a: &AssemblyFunction,
    b: &AssemblyFunction,
    seed: u64,
    max_instructions: usize,
) -> (RuntimeScore, ExecutionTrace, ExecutionTrace) {
    let ta = execute(a, seed, max_instructions);
    let tb = execute(b, seed, max_instructions);
    (RuntimeScore::from_traces(&ta, &tb), ta, tb)
}
