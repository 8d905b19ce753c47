//! Following resumption tokens against a provider, reading every page with a
//! plain XML parser.

use eprint_oai::protocol::Provider;
use roxmltree::{Document, Node};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Listed {
    pub identifier: String,
    pub datestamp: Option<String>,
    pub deleted: bool,
    /// `oai_dc` title, when the page carries metadata.
    pub title: Option<String>,
    pub has_metadata: bool,
}

#[derive(Debug, Default)]
pub struct Walk {
    pub items: Vec<Listed>,
    pub pages: usize,
    pub tokens: Vec<String>,
}

fn child<'a, 'i>(n: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    n.children().find(|c| c.is_element() && c.tag_name().name() == name)
}

fn text(n: Node) -> String {
    n.text().unwrap_or("").trim().to_owned()
}

pub fn args(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Every page of a ListIdentifiers or ListRecords request.
pub fn walk(provider: &Provider, client: &str, initial: Vec<(String, String)>) -> Result<Walk, String> {
    let verb = initial
        .iter()
        .find(|(k, _)| k == "verb")
        .map(|(_, v)| v.clone())
        .ok_or("no verb")?;
    let mut walk = Walk::default();
    let mut request = initial;
    loop {
        let r = provider.handle(client, &request);
        if r.status != 200 {
            return Err(format!("HTTP {} for {:?}: {}", r.status, request, r.body));
        }
        let doc = Document::parse(&r.body).map_err(|e| e.to_string())?;
        let root = doc.root_element();
        if root.tag_name().name() != verb {
            return Err(format!("root {} for {verb}", root.tag_name().name()));
        }
        walk.pages += 1;
        let mut token = None;
        for n in root.children().filter(Node::is_element) {
            match n.tag_name().name() {
                "identifier" => walk.items.push(Listed {
                    identifier: text(n),
                    datestamp: None,
                    deleted: n.attribute("status") == Some("deleted"),
                    title: None,
                    has_metadata: false,
                }),
                "record" => {
                    let header = child(n, "header").ok_or("record without header")?;
                    let metadata = child(n, "metadata");
                    let title = metadata
                        .and_then(|m| child(m, "oai_dc"))
                        .and_then(|dc| child(dc, "title"))
                        .map(text);
                    walk.items.push(Listed {
                        identifier: child(header, "identifier").map(text).ok_or("no identifier")?,
                        datestamp: child(header, "datestamp").map(text),
                        deleted: n.attribute("status") == Some("deleted"),
                        title,
                        has_metadata: metadata.is_some(),
                    });
                }
                "resumptionToken" => token = Some(text(n)),
                _ => {}
            }
        }
        match token {
            Some(t) => {
                walk.tokens.push(t.clone());
                request = vec![("verb".into(), verb.clone()), ("resumptionToken".into(), t)];
            }
            None => return Ok(walk),
        }
    }
}
