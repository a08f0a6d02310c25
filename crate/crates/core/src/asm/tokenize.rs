use super::render::size_keyword;
use super::{AssemblyFunction, Instruction, MemoryOperand, Operand};

/// Pre-BPE token stream of a function: one token per mnemonic word, register,
/// immediate, symbol and punctuation mark. String literals stay whole.
/// Labels are not part of the stream.
pub fn tokenize(f: &AssemblyFunction) -> Vec<String> {
    let mut out = Vec::with_capacity(f.instructions.len() * 4);
    for ins in &f.instructions {
        tokenize_into(ins, &mut out);
    }
    out
}

pub fn tokenize_instruction(ins: &Instruction) -> Vec<String> {
    let mut out = Vec::new();
    tokenize_into(ins, &mut out);
    out
}

fn tokenize_into(ins: &Instruction, out: &mut Vec<String>) {
    out.extend(ins.mnemonic.split(' ').map(str::to_string));
    for (i, op) in ins.operands.iter().enumerate() {
        if i > 0 {
            out.push(",".into());
        }
        match op {
            Operand::Register(r) => out.push(r.name().into()),
            Operand::Immediate(v) => out.push(v.to_string()),
            Operand::Memory(m) => memory_tokens(m, out),
            Operand::LabelRef(s) | Operand::StringLiteral(s) => out.push(s.clone()),
            Operand::Raw(s) => out.extend(tokenize_text(s)),
        }
    }
}

fn memory_tokens(m: &MemoryOperand, out: &mut Vec<String>) {
    if let Some(size) = m.size {
        out.push(size_keyword(size).into());
        out.push("ptr".into());
    }
    if let Some(seg) = m.segment {
        out.push(seg.name().into());
        out.push(":".into());
    }
    out.push("[".into());
    let has_terms = m.symbol.is_some() || m.base.is_some() || m.index.is_some();
    let mut first = true;
    let mut plus = |out: &mut Vec<String>| {
        if !std::mem::take(&mut first) {
            out.push("+".into());
        }
    };
    if let Some(sym) = &m.symbol {
        plus(out);
        out.push(sym.clone());
    }
    if let Some(base) = m.base {
        plus(out);
        out.push(base.name().into());
    }
    if let Some(idx) = m.index {
        plus(out);
        out.push(idx.register.name().into());
        out.push("*".into());
        out.push(idx.scale.to_string());
    }
    if m.displacement < 0 && has_terms {
        out.push("-".into());
        out.push(m.displacement.unsigned_abs().to_string());
    } else if m.displacement != 0 || !has_terms {
        plus(out);
        out.push(m.displacement.to_string());
    }
    out.push("]".into());
}

/// Whitespace/punctuation split for free text, keeping quoted literals whole.
/// Used for unstructured operands and for source-code token counts.
pub fn tokenize_text(s: &str) -> Vec<String> {
    const PUNCT: &str = "[](){}<>+-*/,:;=&|!~^%.?#@";
    let mut out = Vec::new();
    let mut word = String::new();
    let mut chars = s.chars().peekable();
    let flush = |word: &mut String, out: &mut Vec<String>| {
        if !word.is_empty() {
            out.push(std::mem::take(word));
        }
    };
    while let Some(c) = chars.next() {
        if c == '"' || c == '\'' {
            flush(&mut word, &mut out);
            let mut lit = String::from(c);
            let mut escaped = false;
            for d in chars.by_ref() {
                lit.push(d);
                if escaped {
                    escaped = false;
                } else if d == '\\' {
                    escaped = true;
                } else if d == c {
                    break;
                }
            }
            out.push(lit);
        } else if c.is_whitespace() {
            flush(&mut word, &mut out);
        } else if PUNCT.contains(c) && !(c == '.' && !word.is_empty()) {
            flush(&mut word, &mut out);
            out.push(c.to_string());
        } else {
            word.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}
