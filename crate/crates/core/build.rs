use std::fmt::Write as _;
use std::path::Path;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("demo").join("records");
    println!("cargo:rerun-if-changed={}", dir.display());
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .expect("demo/records exists")
        .map(|e| e.expect("readable entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "abs"))
        .collect();
    names.sort();
    let mut out = String::from("pub(crate) static RECORDS: &[(&str, &[u8])] = &[\n");
    for p in names {
        let file = p.file_name().unwrap().to_string_lossy().into_owned();
        writeln!(out, "    ({file:?}, include_bytes!({:?})),", p.display().to_string()).unwrap();
    }
    out.push_str("];\n");
    let dest = Path::new(&std::env::var("OUT_DIR").unwrap()).join("demo_records.rs");
    std::fs::write(dest, out).unwrap();
}
