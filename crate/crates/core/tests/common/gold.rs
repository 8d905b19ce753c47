//! Structural comparison of a response against a gold document.
//!
//! Element names, namespaces, attributes and nesting must agree; text is
//! compared after collapsing whitespace. The gold side may elide with `...`:
//! a `...` text node between elements stands for any run of sibling elements,
//! an element whose whole content is `...` matches any content, and text
//! ending in `...` matches any text with that prefix. `responseDate` content
//! is not compared.

use roxmltree::{Document, Node};

const ELLIPSIS: &str = "...";

pub fn normalize(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

enum Item<'a, 'i> {
    Element(Node<'a, 'i>),
    Elided,
}

fn text_of(n: Node) -> String {
    normalize(
        &n.children()
            .filter(|c| c.is_text())
            .map(|c| c.text().unwrap_or(""))
            .collect::<String>(),
    )
}

fn path_of(n: Node) -> String {
    let mut parts: Vec<String> = n
        .ancestors()
        .filter(|a| a.is_element())
        .map(|a| a.tag_name().name().to_owned())
        .collect();
    parts.reverse();
    format!("/{}", parts.join("/"))
}

fn expanded(n: Node) -> (Option<String>, String) {
    (n.tag_name().namespace().map(str::to_owned), n.tag_name().name().to_owned())
}

fn attributes(n: Node) -> Vec<(Option<String>, String, String)> {
    let mut v: Vec<_> = n
        .attributes()
        .map(|a| (a.namespace().map(str::to_owned), a.name().to_owned(), normalize(a.value())))
        .collect();
    v.sort();
    v
}

fn namespaces(n: Node) -> Vec<(Option<String>, String)> {
    let mut v: Vec<_> = n
        .namespaces()
        .map(|ns| (ns.name().map(str::to_owned), ns.uri().to_owned()))
        .collect();
    v.sort();
    v
}

fn compare(gold: Node, actual: Node) -> Result<(), String> {
    let at = path_of(actual);
    if expanded(gold) != expanded(actual) {
        return Err(format!("{at}: expected element {:?}, found {:?}", expanded(gold), expanded(actual)));
    }
    if attributes(gold) != attributes(actual) {
        return Err(format!("{at}: attributes {:?} != expected {:?}", attributes(actual), attributes(gold)));
    }
    if namespaces(gold) != namespaces(actual) {
        return Err(format!("{at}: namespaces {:?} != expected {:?}", namespaces(actual), namespaces(gold)));
    }
    if gold.tag_name().name() == "responseDate" {
        return Ok(());
    }
    let gold_elements: Vec<Node> = gold.children().filter(Node::is_element).collect();
    let actual_elements: Vec<Node> = actual.children().filter(Node::is_element).collect();
    if gold_elements.is_empty() {
        let expected = text_of(gold);
        if expected == ELLIPSIS {
            return Ok(());
        }
        if !actual_elements.is_empty() {
            return Err(format!("{at}: unexpected child elements"));
        }
        let found = text_of(actual);
        return match expected.strip_suffix(ELLIPSIS) {
            Some(prefix) if found.starts_with(prefix.trim_end()) => Ok(()),
            Some(prefix) => Err(format!("{at}: text {found:?} does not start with {:?}", prefix.trim_end())),
            None if found == expected => Ok(()),
            None => Err(format!("{at}: text {found:?} != expected {expected:?}")),
        };
    }
    let mut items = Vec::new();
    for c in gold.children() {
        if c.is_element() {
            items.push(Item::Element(c));
        } else if c.is_text() {
            match normalize(c.text().unwrap_or("")).as_str() {
                "" => {}
                ELLIPSIS => items.push(Item::Elided),
                other => return Err(format!("{at}: gold has mixed content {other:?}")),
            }
        }
    }
    if !text_of(actual).is_empty() {
        return Err(format!("{at}: unexpected text {:?}", text_of(actual)));
    }
    match_sequence(&items, &actual_elements).map_err(|e| e.unwrap_or_else(|| format!("{at}: child count differs")))
}

/// `Err(None)` is a plain length mismatch; `Err(Some(_))` the most specific
/// failure found.
fn match_sequence(gold: &[Item], actual: &[Node]) -> Result<(), Option<String>> {
    match gold.split_first() {
        None if actual.is_empty() => Ok(()),
        None => Err(Some(format!("{}: {} unexpected trailing element(s)", path_of(actual[0]), actual.len()))),
        Some((Item::Elided, rest)) => {
            let mut last = None;
            for skip in 0..=actual.len() {
                match match_sequence(rest, &actual[skip..]) {
                    Ok(()) => return Ok(()),
                    Err(e) => last = e.or(last),
                }
            }
            Err(last)
        }
        Some((Item::Element(g), rest)) => match actual.split_first() {
            None => Err(Some(format!("missing element {}", path_of(*g)))),
            Some((a, tail)) => {
                compare(*g, *a).map_err(Some)?;
                match_sequence(rest, tail)
            }
        },
    }
}

/// `Ok` when `actual` matches `gold` under the rules above.
pub fn structurally_equal(gold: &str, actual: &str) -> Result<(), String> {
    let g = Document::parse(gold).map_err(|e| format!("gold does not parse: {e}"))?;
    let a = Document::parse(actual).map_err(|e| format!("response does not parse: {e}"))?;
    compare(g.root_element(), a.root_element())
}
