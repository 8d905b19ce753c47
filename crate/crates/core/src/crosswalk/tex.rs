//! TeX accent macros and named glyphs to UTF-8.
//!
//! Handles `\'e`, `\'{e}`, `{\'e}`, `\c{c}`, `\c c`, `\'\i`, `\ss`, `{\ss}`,
//! `\ss{}`. Anything not in the tables, including math, is copied through
//! untouched.

use super::tables::CrosswalkTables;

const SYMBOL_ACCENTS: &[char] = &['\'', '`', '^', '"', '~', '=', '.'];
const LETTER_ACCENTS: &[&str] = &["c", "v", "u", "H", "k", "r", "d", "b"];

struct Converter<'a> {
    src: &'a str,
    tables: &'a CrosswalkTables,
}

impl Converter<'_> {
    fn peek(&self, at: usize) -> Option<char> {
        self.src[at..].chars().next()
    }

    fn letters_end(&self, start: usize) -> usize {
        self.src[start..]
            .find(|c: char| !c.is_ascii_alphabetic())
            .map_or(self.src.len(), |n| start + n)
    }

    /// A base letter for an accent: `e`, `\i`, `{e}` or `{\i}`. Returns the
    /// letter and the index after it.
    fn accent_arg(&self, at: usize) -> Option<(char, usize)> {
        match self.peek(at)? {
            '{' => {
                let (c, end) = self.bare_arg(at + 1)?;
                (self.peek(end)? == '}').then_some((c, end + 1))
            }
            _ => self.bare_arg(at),
        }
    }

    fn bare_arg(&self, at: usize) -> Option<(char, usize)> {
        match self.peek(at)? {
            c if c.is_ascii_alphabetic() => Some((c, at + 1)),
            '\\' => {
                let end = self.letters_end(at + 1);
                match &self.src[at + 1..end] {
                    "i" => Some(('i', end)),
                    "j" => Some(('j', end)),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn accent(&self, accent: &str, base: char) -> Option<&str> {
        self.tables
            .accents
            .get(&(accent.to_owned(), base))
            .map(String::as_str)
    }

    /// Try to convert the macro starting with the backslash at `at`.
    fn macro_at(&self, at: usize) -> Option<(&str, usize)> {
        let next = self.peek(at + 1)?;
        if SYMBOL_ACCENTS.contains(&next) {
            let (base, end) = self.accent_arg(at + 2)?;
            return Some((self.accent(&next.to_string(), base)?, end));
        }
        if !next.is_ascii_alphabetic() {
            return None;
        }
        let name_end = self.letters_end(at + 1);
        let name = &self.src[at + 1..name_end];
        if LETTER_ACCENTS.contains(&name) {
            let arg_at = match self.peek(name_end)? {
                ' ' => name_end + 1,
                '{' => name_end,
                _ => return None,
            };
            let (base, end) = self.accent_arg(arg_at)?;
            return Some((self.accent(name, base)?, end));
        }
        let glyph = self.tables.glyphs.get(name)?;
        let end = if self.src[name_end..].starts_with("{}") {
            name_end + 2
        } else if self.src[name_end..].starts_with(' ') {
            name_end + 1
        } else {
            name_end
        };
        Some((glyph, end))
    }

    fn run(&self) -> String {
        let src = self.src;
        let mut out = String::with_capacity(src.len());
        let mut i = 0;
        while i < src.len() {
            let c = self.peek(i).expect("in bounds");
            match c {
                '{' if self.peek(i + 1) == Some('\\') => {
                    if let Some((text, end)) = self.macro_at(i + 1) {
                        if self.peek(end) == Some('}') {
                            out.push_str(text);
                            i = end + 1;
                            continue;
                        }
                    }
                    out.push('{');
                    i += 1;
                }
                '\\' => {
                    if let Some((text, end)) = self.macro_at(i) {
                        out.push_str(text);
                        i = end;
                        continue;
                    }
                    // Copy the unknown control sequence whole so its name is
                    // never re-read as something else.
                    let end = match self.peek(i + 1) {
                        Some(n) if n.is_ascii_alphabetic() => self.letters_end(i + 1),
                        Some(n) => i + 1 + n.len_utf8(),
                        None => i + 1,
                    };
                    out.push_str(&src[i..end]);
                    i = end;
                }
                _ => {
                    out.push(c);
                    i += c.len_utf8();
                }
            }
        }
        out
    }
}

/// Replace TeX accent and glyph macros with UTF-8 characters.
pub fn tex_to_utf8(text: &str, tables: &CrosswalkTables) -> String {
    if !text.contains('\\') {
        return text.to_owned();
    }
    Converter { src: text, tables }.run()
}
