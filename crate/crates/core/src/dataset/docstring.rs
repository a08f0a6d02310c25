pub const DEFAULT_MIN_WORDS: usize = 4;

/// Strips comment borders from one line until nothing more comes off.
fn strip_border(line: &str) -> &str {
    let mut s = line;
    loop {
        let before = s;
        s = s.trim();
        if let Some(rest) = s.strip_prefix("/*") {
            s = rest;
        }
        if let Some(rest) = s.strip_suffix("*/") {
            s = rest;
        }
        s = s.trim_start_matches('*').trim_end_matches('*');
        if s == before {
            return s;
        }
    }
}

/// Removes `*` borders, keeps the first paragraph joined onto one line, and
/// returns `None` when fewer than `min_words` words remain.
pub fn clean_docstring(text: &str, min_words: usize) -> Option<String> {
    let paragraph: Vec<&str> = text
        .lines()
        .map(strip_border)
        .skip_while(|l| l.is_empty())
        .take_while(|l| !l.is_empty())
        .collect();
    let joined = paragraph.join(" ");
    if joined.split_whitespace().count() < min_words {
        return None;
    }
    Some(joined)
}
