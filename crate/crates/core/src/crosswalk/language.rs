use super::tables::CrosswalkTables;

/// ISO 639 code for the first `in <Language>` phrase in a comment line.
pub fn detect_language<'t>(comments: Option<&str>, tables: &'t CrosswalkTables) -> Option<&'t str> {
    let words: Vec<&str> = comments?
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .collect();
    words.windows(2).find_map(|w| {
        if !w[0].eq_ignore_ascii_case("in") {
            return None;
        }
        tables.languages.get(&w[1].to_lowercase()).map(String::as_str)
    })
}
