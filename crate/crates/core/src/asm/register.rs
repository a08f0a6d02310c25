use std::fmt;

/// The sixteen general-purpose registers in hardware encoding order, plus `rip`
/// (only valid as a memory base).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gpr {
    Rax,
    Rcx,
    Rdx,
    Rbx,
    Rsp,
    Rbp,
    Rsi,
    Rdi,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    Rip,
}

impl Gpr {
    pub const ALL: [Gpr; 16] = [
        Gpr::Rax,
        Gpr::Rcx,
        Gpr::Rdx,
        Gpr::Rbx,
        Gpr::Rsp,
        Gpr::Rbp,
        Gpr::Rsi,
        Gpr::Rdi,
        Gpr::R8,
        Gpr::R9,
        Gpr::R10,
        Gpr::R11,
        Gpr::R12,
        Gpr::R13,
        Gpr::R14,
        Gpr::R15,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

const NAMES_64: [&str; 16] = [
    "rax", "rcx", "rdx", "rbx", "rsp", "rbp", "rsi", "rdi", "r8", "r9", "r10", "r11", "r12", "r13",
    "r14", "r15",
];
const NAMES_32: [&str; 16] = [
    "eax", "ecx", "edx", "ebx", "esp", "ebp", "esi", "edi", "r8d", "r9d", "r10d", "r11d", "r12d",
    "r13d", "r14d", "r15d",
];
const NAMES_16: [&str; 16] = [
    "ax", "cx", "dx", "bx", "sp", "bp", "si", "di", "r8w", "r9w", "r10w", "r11w", "r12w", "r13w",
    "r14w", "r15w",
];
const NAMES_8: [&str; 16] = [
    "al", "cl", "dl", "bl", "spl", "bpl", "sil", "dil", "r8b", "r9b", "r10b", "r11b", "r12b",
    "r13b", "r14b", "r15b",
];
const NAMES_8_HIGH: [&str; 4] = ["ah", "ch", "dh", "bh"];

/// A (sub-)register view: family, width in bits, and whether it is one of the
/// legacy high-byte registers `ah`/`ch`/`dh`/`bh`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Register {
    pub family: Gpr,
    pub width: u8,
    pub high_byte: bool,
}

impl Register {
    pub const fn full(family: Gpr) -> Self {
        Register {
            family,
            width: 64,
            high_byte: false,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let lower = name.to_ascii_lowercase();
        if lower == "rip" {
            return Some(Register::full(Gpr::Rip));
        }
        for (width, table) in [(64, &NAMES_64), (32, &NAMES_32), (16, &NAMES_16), (8, &NAMES_8)] {
            if let Some(i) = table.iter().position(|n| *n == lower) {
                return Some(Register {
                    family: Gpr::ALL[i],
                    width,
                    high_byte: false,
                });
            }
        }
        NAMES_8_HIGH.iter().position(|n| *n == lower).map(|i| Register {
            family: Gpr::ALL[i],
            width: 8,
            high_byte: true,
        })
    }

    pub fn name(&self) -> &'static str {
        if self.family == Gpr::Rip {
            return "rip";
        }
        let i = self.family.index();
        match (self.width, self.high_byte) {
            (64, _) => NAMES_64[i],
            (32, _) => NAMES_32[i],
            (16, _) => NAMES_16[i],
            (8, true) => NAMES_8_HIGH[i],
            _ => NAMES_8[i],
        }
    }

    pub fn bytes(&self) -> u8 {
        self.width / 8
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
