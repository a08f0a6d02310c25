use std::fmt::{self, Write as _};

use super::{AssemblyFunction, Instruction, MemoryOperand, Operand};

pub(crate) fn size_keyword(bytes: u8) -> &'static str {
    match bytes {
        1 => "byte",
        2 => "word",
        4 => "dword",
        _ => "qword",
    }
}

impl fmt::Display for MemoryOperand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(size) = self.size {
            write!(f, "{} ptr ", size_keyword(size))?;
        }
        if let Some(seg) = self.segment {
            write!(f, "{}:", seg.name())?;
        }
        f.write_char('[')?;
        let has_terms = self.symbol.is_some() || self.base.is_some() || self.index.is_some();
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if !std::mem::take(&mut first) {
                f.write_char('+')?;
            }
            Ok(())
        };
        if let Some(sym) = &self.symbol {
            sep(f)?;
            f.write_str(sym)?;
        }
        if let Some(base) = self.base {
            sep(f)?;
            f.write_str(base.name())?;
        }
        if let Some(idx) = self.index {
            sep(f)?;
            write!(f, "{}*{}", idx.register.name(), idx.scale)?;
        }
        if self.displacement < 0 && has_terms {
            write!(f, "-{}", self.displacement.unsigned_abs())?;
        } else if self.displacement != 0 || !has_terms {
            sep(f)?;
            write!(f, "{}", self.displacement)?;
        }
        f.write_char(']')
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Register(r) => f.write_str(r.name()),
            Operand::Immediate(v) => write!(f, "{v}"),
            Operand::Memory(m) => m.fmt(f),
            Operand::LabelRef(s) | Operand::StringLiteral(s) | Operand::Raw(s) => f.write_str(s),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.mnemonic)?;
        for (i, op) in self.operands.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            op.fmt(f)?;
        }
        Ok(())
    }
}

impl AssemblyFunction {
    /// Canonical listing: labels on their own lines, instructions indented.
    pub fn render(&self) -> String {
        let labels = self.labels_by_index();
        let mut out = String::new();
        // The function name leads when it labels the entry point.
        if self.labels.get(&self.name) == Some(&0) {
            let _ = writeln!(out, "{}:", self.name);
        }
        for (i, ins) in self.instructions.iter().enumerate() {
            for sym in labels.get(&i).into_iter().flatten() {
                if i == 0 && *sym == self.name {
                    continue;
                }
                let _ = writeln!(out, "{sym}:");
            }
            let _ = writeln!(out, "  {ins}");
        }
        out
    }
}
