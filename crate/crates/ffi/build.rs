use std::env;
use std::fs;
use std::path::PathBuf;

// Regenerates include/modalguard.h, which is committed so C consumers can
// build without cbindgen. Written only when the content changes to avoid
// rebuild churn.
fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header_path = crate_dir.join("include").join("modalguard.h");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml is well-formed");
    let mut generated = Vec::new();
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation succeeds")
        .write(&mut generated);

    let current = fs::read(&header_path).unwrap_or_default();
    if current != generated {
        fs::create_dir_all(header_path.parent().unwrap()).unwrap();
        fs::write(&header_path, generated).unwrap();
    }
}
