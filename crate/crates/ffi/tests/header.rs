//! Keeps the committed C header in `include/tk.h` in lockstep with the
//! exported surface. Regenerate after changing `src/lib.rs` with:
//!
//! ```sh
//! TK_BLESS_HEADER=1 cargo test -p tk-ffi --test header
//! ```

use std::path::Path;

#[test]
fn committed_header_matches_generated() {
    let crate_dir = env!("CARGO_MANIFEST_DIR");
    let config = cbindgen::Config::from_file(Path::new(crate_dir).join("cbindgen.toml"))
        .expect("cbindgen.toml parses");
    let mut generated = Vec::new();
    cbindgen::Builder::new()
        .with_crate(crate_dir)
        .with_config(config)
        .generate()
        .expect("the exported surface is representable in C")
        .write(&mut generated);
    let generated = String::from_utf8(generated).expect("header is UTF-8");

    let header_path = Path::new(crate_dir).join("include/tk.h");
    if std::env::var_os("TK_BLESS_HEADER").is_some() {
        std::fs::write(&header_path, &generated).expect("header written");
        return;
    }
    let committed = std::fs::read_to_string(&header_path)
        .expect("include/tk.h exists; bless it with TK_BLESS_HEADER=1");
    assert_eq!(committed, generated, "include/tk.h is stale; regenerate with TK_BLESS_HEADER=1");
}
