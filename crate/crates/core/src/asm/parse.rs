use std::collections::BTreeMap;

use super::{
    is_branch, supported_arity, AsmError, AssemblyFunction, Instruction, MemoryOperand, Operand,
    Register, ScaledIndex, Segment,
};
use crate::asm::Gpr;

const PREFIXES: [&str; 8] = [
    "rep", "repe", "repz", "repne", "repnz", "lock", "notrack", "bnd",
];

/// Parses a newline-separated Intel-syntax listing.
///
/// Lines may hold labels (`sym:`), instructions, directives (skipped) and `;`
/// comments. A label maps to the index of the next instruction. The function is
/// named after its first label when that label sits on instruction 0.
pub fn parse_assembly(text: &str) -> Result<AssemblyFunction, AsmError> {
    let mut instructions = Vec::new();
    let mut labels = BTreeMap::new();
    let mut first_label: Option<String> = None;

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut rest = strip_comment(raw_line).trim();

        let mut add_label = |sym: &str, idx: usize| -> Result<(), AsmError> {
            if labels.insert(sym.to_string(), idx).is_some() {
                return Err(malformed(line_no, format!("duplicate label `{sym}`")));
            }
            if first_label.is_none() {
                first_label = Some(sym.to_string());
            }
            Ok(())
        };

        // Whole-line labels may contain spaces (demangled C++ signatures).
        if let Some(sym) = rest.strip_suffix(':') {
            if !sym.is_empty() && !sym.contains(['"', '\'', '[', ']', ';']) {
                add_label(sym.trim(), instructions.len())?;
                continue;
            }
        }
        while let Some((head, tail)) = split_first_word(rest) {
            match head.strip_suffix(':') {
                Some(sym) if is_symbol(sym) => {
                    add_label(sym, instructions.len())?;
                    rest = tail;
                }
                _ => break,
            }
        }
        if rest.is_empty() {
            continue;
        }

        let (head, tail) = split_first_word(rest).unwrap_or((rest, ""));
        if head.starts_with('.') {
            continue;
        }
        // IDA-style `name proc near`, `name endp`, `var_8 = qword ptr -8`.
        match split_first_word(tail).map(|(w, _)| w.to_ascii_lowercase()) {
            Some(w) if w == "proc" => {
                add_label(head, instructions.len())?;
                continue;
            }
            Some(w) if w == "endp" || w == "=" => continue,
            _ => {}
        }

        instructions.push(parse_instruction(rest, raw_line, line_no)?);
    }

    if instructions.is_empty() {
        return Err(AsmError::EmptyFunction);
    }
    let name = first_label
        .filter(|l| labels.get(l) == Some(&0))
        .unwrap_or_default();
    Ok(AssemblyFunction::new(name, instructions, labels))
}

fn malformed(line: usize, reason: impl Into<String>) -> AsmError {
    AsmError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

fn split_first_word(s: &str) -> Option<(&str, &str)> {
    let s = s.trim_start();
    if s.is_empty() {
        return None;
    }
    match s.find(char::is_whitespace) {
        Some(pos) => Some((&s[..pos], s[pos..].trim_start())),
        None => Some((s, "")),
    }
}

/// Cuts the line at the first `;` outside a quoted literal.
pub(crate) fn strip_comment(line: &str) -> &str {
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (pos, c) in line.char_indices() {
        match quote {
            Some(q) => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    quote = None;
                }
            }
            None => match c {
                '"' | '\'' => quote = Some(c),
                ';' => return &line[..pos],
                _ => {}
            },
        }
    }
    line
}

fn parse_instruction(text: &str, raw_line: &str, line_no: usize) -> Result<Instruction, AsmError> {
    let (head, mut rest) = split_first_word(text).unwrap_or((text, ""));
    let mut mnemonic = head.to_ascii_lowercase();
    if PREFIXES.contains(&mnemonic.as_str()) {
        if let Some((next, tail)) = split_first_word(rest) {
            mnemonic = format!("{mnemonic} {}", next.to_ascii_lowercase());
            rest = tail;
        }
    }
    if !mnemonic
        .split(' ')
        .all(|w| w.starts_with(|c: char| c.is_ascii_alphabetic()) && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '.'))
    {
        return Err(malformed(line_no, format!("invalid mnemonic `{head}`")));
    }

    let pieces = split_operands(rest).map_err(|r| malformed(line_no, r))?;
    if pieces
        .iter()
        .any(|p| p.starts_with('%') || p.starts_with('$') || outside_quotes_contains(p, '%'))
    {
        return Err(malformed(line_no, "AT&T syntax is not supported"));
    }

    let arity = supported_arity(&mnemonic);
    let branch = is_branch(&mnemonic);
    let mut operands = Vec::with_capacity(pieces.len());
    for piece in &pieces {
        match parse_operand(piece, branch) {
            Some(op) => operands.push(op),
            None if arity.is_none() => operands.push(Operand::Raw(piece.to_string())),
            None => {
                return Err(malformed(
                    line_no,
                    format!("cannot parse operand `{piece}` of `{mnemonic}`"),
                ))
            }
        }
    }
    if let Some(allowed) = arity {
        if !allowed.contains(&operands.len()) {
            return Err(malformed(
                line_no,
                format!("`{mnemonic}` takes {allowed:?} operands, got {}", operands.len()),
            ));
        }
    }

    Ok(Instruction {
        mnemonic,
        operands,
        raw_text: raw_line.to_string(),
    })
}

fn outside_quotes_contains(s: &str, needle: char) -> bool {
    let mut quote = None;
    for c in s.chars() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None if c == '"' || c == '\'' => quote = Some(c),
            None if c == needle => return true,
            None => {}
        }
    }
    false
}

/// Splits on commas that are outside quotes and brackets.
fn split_operands(s: &str) -> Result<Vec<&str>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut start = 0;
    for (pos, c) in s.char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == q {
                quote = None;
            }
            continue;
        }
        match c {
            '"' | '\'' => quote = Some(c),
            '[' | '(' | '<' => depth += 1,
            ']' | ')' | '>' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..pos].trim());
                start = pos + 1;
            }
            _ => {}
        }
    }
    if quote.is_some() {
        return Err("unterminated string literal".into());
    }
    out.push(s[start..].trim());
    if out.iter().any(|p| p.is_empty()) {
        return Err("empty operand".into());
    }
    Ok(out)
}

fn parse_operand(text: &str, branch: bool) -> Option<Operand> {
    let mut text = text.trim();
    if text.len() >= 2 {
        let first = text.chars().next()?;
        if (first == '"' || first == '\'') && text.ends_with(first) {
            return Some(Operand::StringLiteral(text.to_string()));
        }
    }

    // Keywords that carry no meaning for the IR.
    loop {
        let lower = text.to_ascii_lowercase();
        let stripped = ["short ", "near ptr ", "far ptr ", "offset "]
            .iter()
            .find(|kw| lower.starts_with(*kw))
            .map(|kw| text[kw.len()..].trim_start());
        match stripped {
            Some(s) => text = s,
            None => break,
        }
    }

    let mut size = None;
    if let Some((word, tail)) = split_first_word(text) {
        let bytes = match word.to_ascii_lowercase().as_str() {
            "byte" => Some(1),
            "word" => Some(2),
            "dword" => Some(4),
            "qword" => Some(8),
            "xmmword" | "ymmword" | "zmmword" | "tbyte" | "oword" | "fword" => return None,
            _ => None,
        };
        if let Some(b) = bytes {
            size = Some(b);
            text = match split_first_word(tail) {
                Some((p, t)) if p.eq_ignore_ascii_case("ptr") => t,
                _ => tail,
            };
        }
    }

    let mut segment = None;
    if let Some((seg, tail)) = text.split_once(':') {
        if let Some(s) = Segment::from_name(&seg.trim().to_ascii_lowercase()) {
            segment = Some(s);
            text = tail.trim();
        }
    }

    if size.is_some() || segment.is_some() || text.contains('[') {
        return parse_memory(text, segment, size).map(Operand::Memory);
    }

    if let Some(r) = Register::from_name(text) {
        if r.family == Gpr::Rip {
            return None;
        }
        return Some(Operand::Register(r));
    }
    if let Some(v) = parse_int(text) {
        return Some(Operand::Immediate(v));
    }
    if is_symbol(text) {
        return Some(Operand::LabelRef(text.to_string()));
    }
    if branch && !text.is_empty() {
        return Some(Operand::LabelRef(text.to_string()));
    }
    None
}

/// `disp[expr]`, `[expr]`, or a bare displacement/symbol after a segment.
fn parse_memory(text: &str, segment: Option<Segment>, size: Option<u8>) -> Option<MemoryOperand> {
    let mut mem = MemoryOperand {
        segment,
        symbol: None,
        base: None,
        index: None,
        displacement: 0,
        size,
    };
    let (outer, inner) = match text.find('[') {
        Some(open) => {
            let close = text.rfind(']')?;
            if close < open || !text[close + 1..].trim().is_empty() {
                return None;
            }
            (text[..open].trim(), &text[open + 1..close])
        }
        None => (text, ""),
    };
    if !outer.is_empty() {
        add_memory_terms(&mut mem, outer)?;
    }
    if !inner.trim().is_empty() {
        add_memory_terms(&mut mem, inner)?;
    } else if outer.is_empty() {
        return None;
    }
    Some(mem)
}

fn add_memory_terms(mem: &mut MemoryOperand, expr: &str) -> Option<()> {
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut negative = false;
    let mut start = 0;
    let bytes = expr.as_bytes();
    for (pos, &b) in bytes.iter().enumerate() {
        if b == b'+' || b == b'-' {
            let term = expr[start..pos].trim();
            if !term.is_empty() {
                terms.push((negative, term));
            } else if pos != 0 && !expr[..pos].trim().is_empty() {
                return None;
            }
            negative = b == b'-';
            start = pos + 1;
        }
    }
    let last = expr[start..].trim();
    if last.is_empty() {
        return None;
    }
    terms.push((negative, last));

    for (negative, term) in terms {
        if let Some((l, r)) = term.split_once('*') {
            let (reg, scale) = match (Register::from_name(l.trim()), Register::from_name(r.trim())) {
                (Some(reg), None) => (reg, parse_int(r.trim())?),
                (None, Some(reg)) => (reg, parse_int(l.trim())?),
                _ => return None,
            };
            if negative || mem.index.is_some() || !matches!(scale, 1 | 2 | 4 | 8) || reg.family == Gpr::Rip {
                return None;
            }
            mem.index = Some(ScaledIndex {
                register: reg,
                scale: scale as u8,
            });
        } else if let Some(reg) = Register::from_name(term) {
            if negative {
                return None;
            }
            if mem.base.is_none() {
                mem.base = Some(reg);
            } else if mem.index.is_none() && reg.family != Gpr::Rip {
                mem.index = Some(ScaledIndex {
                    register: reg,
                    scale: 1,
                });
            } else {
                return None;
            }
        } else if let Some(v) = parse_int(term) {
            mem.displacement = if negative {
                mem.displacement.wrapping_sub(v)
            } else {
                mem.displacement.wrapping_add(v)
            };
        } else if is_symbol(term) && !negative && mem.symbol.is_none() {
            mem.symbol = Some(term.to_string());
        } else {
            return None;
        }
    }
    Some(())
}

/// Decimal, `0x` hex, or disassembler-style `0FFh` hex, optionally signed.
/// Values above `i64::MAX` wrap, so `0xffffffffffffffff` reads as -1.
pub(crate) fn parse_int(s: &str) -> Option<i64> {
    let s = s.trim();
    let (negative, digits) = match s.as_bytes().first()? {
        b'-' => (true, s[1..].trim_start()),
        b'+' => (false, s[1..].trim_start()),
        _ => (false, s),
    };
    let magnitude = if let Some(hex) = digits
        .strip_prefix("0x")
        .or_else(|| digits.strip_prefix("0X"))
    {
        u64::from_str_radix(hex, 16).ok()?
    } else if let Some(hex) = digits.strip_suffix(['h', 'H']) {
        if !hex.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        u64::from_str_radix(hex, 16).ok()?
    } else if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
        digits.parse::<u64>().ok()?
    } else {
        return None;
    };
    let v = magnitude as i64;
    Some(if negative { v.wrapping_neg() } else { v })
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || "_.$@?".contains(c) => {}
        _ => return false,
    }
    chars.all(|c| !c.is_whitespace() && !"[]+-*,\"';:".contains(c))
}
