//! Reading list responses.

use serde::{Deserialize, Serialize};

use crate::datestamp::Datestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarvestedRecord {
    pub identifier: String,
    /// Absent for ListIdentifiers, which carries identifiers only.
    pub datestamp: Option<Datestamp>,
    pub deleted: bool,
    /// The element inside `<metadata>`, as received.
    pub metadata: Option<String>,
}

#[derive(Debug, Default)]
pub(crate) struct ParsedPage {
    pub records: Vec<HarvestedRecord>,
    pub token: Option<String>,
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|n| n.is_element() && n.tag_name().name() == name)
}

fn text(node: roxmltree::Node<'_, '_>) -> String {
    node.text().unwrap_or_default().trim().to_owned()
}

fn deleted(node: roxmltree::Node<'_, '_>) -> bool {
    node.attribute("status") == Some("deleted")
}

/// Parse a ListIdentifiers or ListRecords body.
pub(crate) fn parse_list(body: &str, verb: &str) -> Result<ParsedPage, String> {
    let doc = roxmltree::Document::parse(body).map_err(|e| format!("response is not XML: {e}"))?;
    let root = doc.root_element();
    if root.tag_name().name() != verb {
        return Err(format!("expected <{verb}>, got <{}>", root.tag_name().name()));
    }
    let mut page = ParsedPage::default();
    for n in root.children().filter(|n| n.is_element()) {
        match n.tag_name().name() {
            "resumptionToken" => {
                let t = text(n);
                if !t.is_empty() {
                    page.token = Some(t);
                }
            }
            "identifier" if verb == "ListIdentifiers" => page.records.push(HarvestedRecord {
                identifier: text(n),
                datestamp: None,
                deleted: deleted(n),
                metadata: None,
            }),
            "record" if verb == "ListRecords" => {
                let header = child(n, "header").ok_or("record without header")?;
                let identifier = child(header, "identifier").map(text).ok_or("header without identifier")?;
                let datestamp = child(header, "datestamp")
                    .map(|d| text(d).parse::<Datestamp>().map_err(|e| format!("{identifier}: {e}")))
                    .transpose()?;
                let metadata = child(n, "metadata")
                    .and_then(|m| m.children().find(|c| c.is_element()))
                    .map(|m| body[m.range()].to_owned());
                page.records.push(HarvestedRecord {
                    identifier,
                    datestamp,
                    deleted: deleted(n),
                    metadata,
                });
            }
            _ => {}
        }
    }
    Ok(page)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_records_and_token() {
        let body = r#"<?xml version="1.0"?>
<ListRecords xmlns="http://www.openarchives.org/OAI/1.0/OAI_ListRecords">
 <responseDate>2001-01-22T10:08:02+00:00</responseDate>
 <record><header><identifier>oai:arXiv:a/9901001</identifier><datestamp>1999-01-01</datestamp></header>
  <metadata><oai_dc xmlns="http://purl.org/dc/elements/1.1/"><title>T &amp; U</title></oai_dc></metadata></record>
 <record status="deleted"><header><identifier>oai:arXiv:a/9901002</identifier><datestamp>1999-01-02</datestamp></header></record>
 <resumptionToken>1999-01-03___dc</resumptionToken>
</ListRecords>"#;
        let p = parse_list(body, "ListRecords").unwrap();
        assert_eq!(p.records.len(), 2);
        assert_eq!(
            p.records[0].metadata.as_deref(),
            Some(r#"<oai_dc xmlns="http://purl.org/dc/elements/1.1/"><title>T &amp; U</title></oai_dc>"#)
        );
        assert!(p.records[1].deleted && p.records[1].metadata.is_none());
        assert_eq!(p.token.as_deref(), Some("1999-01-03___dc"));
        assert!(parse_list(body, "ListIdentifiers").is_err());
        assert!(parse_list("<x", "ListRecords").is_err());
    }
}
