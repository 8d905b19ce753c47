//! Small helpers over the quick-xml writer shared by the response renderers.

use std::io;

use quick_xml::events::{BytesDecl, BytesText, Event};
use quick_xml::Writer;

pub const XSI_NS: &str = "http://www.w3.org/2000/10/XMLSchema-instance";

pub type XmlWriter = Writer<Vec<u8>>;

/// A writer with the XML declaration already emitted.
pub fn document() -> XmlWriter {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 1);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .expect("writing to a Vec cannot fail");
    w
}

/// A writer for a bare fragment.
pub fn fragment() -> XmlWriter {
    Writer::new_with_indent(Vec::new(), b' ', 1)
}

pub fn finish(w: XmlWriter) -> String {
    let mut s = String::from_utf8(w.into_inner()).expect("writer only receives str");
    s.push('\n');
    s
}

pub fn text_element(w: &mut XmlWriter, name: &str, text: &str) -> io::Result<()> {
    w.create_element(name).write_text_content(BytesText::new(text))?;
    Ok(())
}

pub fn opt_element(w: &mut XmlWriter, name: &str, text: Option<&str>) -> io::Result<()> {
    match text {
        Some(t) => text_element(w, name, t),
        None => Ok(()),
    }
}
