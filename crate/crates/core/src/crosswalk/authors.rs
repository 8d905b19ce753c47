//! Splitting a free-format author line into structured names.

use std::fmt;

use super::tables::CrosswalkTables;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuthorName {
    pub keyname: String,
    pub forenames: Option<String>,
    pub prefix: Option<String>,
    pub suffix: Option<String>,
    pub affiliation: Option<String>,
}

impl AuthorName {
    fn keyname_only(keyname: &str) -> Self {
        Self {
            keyname: keyname.to_owned(),
            ..Self::default()
        }
    }

    /// `von Last, Jr, First` ordering, the form used for `creator`.
    pub fn inverted(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.prefix {
            out.push_str(p);
            out.push(' ');
        }
        out.push_str(&self.keyname);
        if let Some(s) = &self.suffix {
            out.push_str(", ");
            out.push_str(s);
        }
        if let Some(f) = &self.forenames {
            out.push_str(", ");
            out.push_str(f);
        }
        out
    }
}

impl fmt::Display for AuthorName {
    /// Natural reading order, e.g. `Ludwig von Beethoven`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = [
            self.forenames.as_deref(),
            self.prefix.as_deref(),
            Some(self.keyname.as_str()),
            self.suffix.as_deref(),
        ];
        let mut first = true;
        for p in parts.into_iter().flatten() {
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(p)?;
            first = false;
        }
        Ok(())
    }
}

enum Item {
    Name(String),
    Affiliation(String),
}

/// Splits at depth-0 commas and lifts out parenthesized groups. `None` when
/// the parentheses do not balance.
fn items(raw: &str) -> Option<Vec<Item>> {
    let mut out = Vec::new();
    let mut buf = String::new();
    let mut depth = 0usize;
    let flush = |buf: &mut String, out: &mut Vec<Item>| {
        for chunk in split_conjunctions(buf) {
            out.push(Item::Name(chunk));
        }
        buf.clear();
    };
    for c in raw.chars() {
        match (c, depth) {
            ('(', 0) => {
                flush(&mut buf, &mut out);
                depth = 1;
            }
            ('(', _) => {
                depth += 1;
                buf.push(c);
            }
            (')', 0) => return None,
            (')', 1) => {
                depth = 0;
                out.push(Item::Affiliation(collapse(&buf)));
                buf.clear();
            }
            (')', _) => {
                depth -= 1;
                buf.push(c);
            }
            (',' | ';', 0) => flush(&mut buf, &mut out),
            _ => buf.push(c),
        }
    }
    if depth != 0 {
        return None;
    }
    flush(&mut buf, &mut out);
    Some(out)
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn split_conjunctions(chunk: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur: Vec<&str> = Vec::new();
    for tok in chunk.split_whitespace() {
        if tok.eq_ignore_ascii_case("and") || tok == "&" {
            if !cur.is_empty() {
                out.push(cur.join(" "));
                cur.clear();
            }
        } else {
            cur.push(tok);
        }
    }
    if !cur.is_empty() {
        out.push(cur.join(" "));
    }
    out
}

fn as_suffix(token: &str, tables: &CrosswalkTables) -> Option<String> {
    let bare = token.strip_suffix('.').unwrap_or(token);
    tables.suffixes.contains(bare).then(|| bare.to_owned())
}

fn parse_name(chunk: &str, tables: &CrosswalkTables) -> AuthorName {
    let mut tokens: Vec<&str> = chunk.split_whitespace().collect();
    let mut suffix = None;
    if tokens.len() >= 2 {
        if let Some(s) = as_suffix(tokens[tokens.len() - 1], tables) {
            suffix = Some(s);
            tokens.pop();
        }
    }
    let keyname = tokens.pop().unwrap_or_default().to_owned();
    let mut split = tokens.len();
    while split > 0 && tables.prefixes.contains(tokens[split - 1]) {
        split -= 1;
    }
    let join = |t: &[&str]| (!t.is_empty()).then(|| t.join(" "));
    AuthorName {
        keyname,
        forenames: join(&tokens[..split]),
        prefix: join(&tokens[split..]),
        suffix,
        affiliation: None,
    }
}

/// Parse an author line such as `Fred A Bloggs, Mark Smith II (Univ A)`.
///
/// A parenthesized group is the affiliation of every name since the previous
/// group. Input this parser cannot make sense of comes back as one name whose
/// keyname is the whole line.
pub fn parse_authors(raw: &str, tables: &CrosswalkTables) -> Vec<AuthorName> {
    let trimmed = collapse(raw);
    if trimmed.is_empty() {
        return Vec::new();
    }
    let Some(items) = items(&trimmed) else {
        return vec![AuthorName::keyname_only(&trimmed)];
    };
    let mut names: Vec<AuthorName> = Vec::new();
    // Start of the names not yet covered by an affiliation group, and the
    // range covered by the most recent group.
    let mut pending = 0;
    let mut last_group = 0..0;
    for item in items {
        match item {
            Item::Name(chunk) => {
                if let (Some(s), Some(prev)) = (
                    (!chunk.contains(' ')).then(|| as_suffix(&chunk, tables)).flatten(),
                    names.last_mut(),
                ) {
                    if prev.suffix.is_none() {
                        prev.suffix = Some(s);
                        continue;
                    }
                }
                names.push(parse_name(&chunk, tables));
            }
            Item::Affiliation(text) if text.is_empty() => {}
            Item::Affiliation(text) => {
                if pending < names.len() {
                    for n in &mut names[pending..] {
                        n.affiliation = Some(text.clone());
                    }
                    last_group = pending..names.len();
                    pending = names.len();
                } else {
                    for n in &mut names[last_group.clone()] {
                        let a = n.affiliation.get_or_insert_with(String::new);
                        if !a.is_empty() {
                            a.push_str("; ");
                        }
                        a.push_str(&text);
                    }
                }
            }
        }
    }
    if names.is_empty() {
        return vec![AuthorName::keyname_only(&trimmed)];
    }
    names
}
