use super::{count_body_lines, DatasetError, Language, SourceFunction};

struct Syntax {
    line: &'static [&'static str],
    block: Option<(&'static str, &'static str)>,
    quotes: &'static [char],
    /// Quotes that may span lines.
    multiline_quotes: &'static [char],
    triple_quotes: bool,
}

fn syntax(language: Language) -> Option<Syntax> {
    const C_LIKE: Option<(&str, &str)> = Some(("/*", "*/"));
    Some(match language {
        Language::C | Language::Cpp | Language::Java => Syntax {
            line: &["//"],
            block: C_LIKE,
            quotes: &['"', '\''],
            multiline_quotes: &[],
            triple_quotes: false,
        },
        Language::Go | Language::Javascript => Syntax {
            line: &["//"],
            block: C_LIKE,
            quotes: &['"', '\'', '`'],
            multiline_quotes: &['`'],
            triple_quotes: false,
        },
        Language::Php => Syntax {
            line: &["//", "#"],
            block: C_LIKE,
            quotes: &['"', '\''],
            multiline_quotes: &[],
            triple_quotes: false,
        },
        Language::Python => Syntax {
            line: &["#"],
            block: None,
            quotes: &['"', '\''],
            multiline_quotes: &[],
            triple_quotes: true,
        },
        Language::Ruby => Syntax {
            line: &["#"],
            block: None,
            quotes: &['"', '\''],
            multiline_quotes: &[],
            triple_quotes: false,
        },
        Language::Other => return None,
    })
}

/// Removes comments from the body. A block comment becomes one space, as in
/// the C preprocessor; lines that held a comment lose trailing whitespace
/// and disappear if nothing else is left on them. String literals are kept
/// verbatim.
pub fn strip_source_comments(s: &SourceFunction) -> Result<SourceFunction, DatasetError> {
    let Some(syn) = syntax(s.language) else {
        return Ok(s.clone());
    };
    let src = s.body.as_str();
    let mut out = String::with_capacity(src.len());
    let mut commented_lines = vec![false];
    let mut src_line = 1usize;
    let mut i = 0;

    let mark = |out: &String, flags: &mut Vec<bool>| {
        let n = out.matches('\n').count();
        flags.resize(flags.len().max(n + 1), false);
        flags[n] = true;
    };

    while i < src.len() {
        let rest = &src[i..];
        if let Some((open, close)) = syn.block.filter(|(open, _)| rest.starts_with(open)) {
            let Some(end) = rest[open.len()..].find(close) else {
                return Err(DatasetError::UnterminatedComment { line: src_line });
            };
            let skipped = &rest[..open.len() + end + close.len()];
            src_line += skipped.matches('\n').count();
            out.push(' ');
            mark(&out, &mut commented_lines);
            i += skipped.len();
            continue;
        }
        if syn.line.iter().any(|m| rest.starts_with(m)) {
            let len = rest.find('\n').unwrap_or(rest.len());
            mark(&out, &mut commented_lines);
            i += len;
            continue;
        }
        let c = rest.chars().next().unwrap();
        if syn.quotes.contains(&c) {
            let delim: String = if syn.triple_quotes && rest.starts_with(&c.to_string().repeat(3)) {
                c.to_string().repeat(3)
            } else {
                c.to_string()
            };
            let multiline = delim.len() == 3 || syn.multiline_quotes.contains(&c);
            let len = literal_len(rest, &delim, multiline);
            let lit = &rest[..len];
            src_line += lit.matches('\n').count();
            out.push_str(lit);
            i += len;
            continue;
        }
        if c == '\n' {
            src_line += 1;
            commented_lines.push(false);
        }
        out.push(c);
        i += c.len_utf8();
    }

    let body = out
        .split('\n')
        .zip(commented_lines.iter().copied().chain(std::iter::repeat(false)))
        .filter_map(|(line, commented)| {
            if !commented {
                Some(line)
            } else {
                let t = line.trim_end();
                (!t.trim_start().is_empty()).then_some(t)
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(SourceFunction {
        body_line_count: count_body_lines(&body),
        body,
        ..s.clone()
    })
}

/// Byte length of the literal at the start of `s`, delimiters included. An
/// unterminated single-line literal ends before the newline.
fn literal_len(s: &str, delim: &str, multiline: bool) -> usize {
    let mut i = delim.len();
    while i < s.len() {
        let rest = &s[i..];
        if rest.starts_with(delim) {
            return i + delim.len();
        }
        let c = rest.chars().next().unwrap();
        if c == '\\' {
            i += 1;
            if let Some(n) = s[i..].chars().next() {
                i += n.len_utf8();
            }
            continue;
        }
        if c == '\n' && !multiline {
            return i;
        }
        i += c.len_utf8();
    }
    s.len()
}
