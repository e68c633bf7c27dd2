//! Regenerates the shipped case-study data files from the built-in
//! construction:
//!
//! ```text
//! cargo run --release -p rht-core --example export_joyce -- data/
//! ```
//!
//! The files in `data/` are committed; a corpus test asserts they match
//! this output byte for byte, so edit the construction, rerun this, and
//! commit the diff rather than editing the files by hand.

use std::env;
use std::fs;
use std::path::PathBuf;

use rht_core::joyce::{joyce_certificates, joyce_model, joyce_target};
use rht_core::textio::{emit_cdga, emit_cert, emit_galg};

fn main() {
    let dir = env::args().nth(1).unwrap_or_else(|| "data".into());
    let dir = PathBuf::from(dir);
    fs::create_dir_all(&dir).expect("create output directory");

    let model = joyce_model();
    let ctx = model.cdga().context();
    let flags: Vec<bool> = (0..ctx.len()).map(|i| model.is_c(i)).collect();

    let files = [
        ("joyce.cdga", emit_cdga(model.cdga(), Some(&flags))),
        ("joyce.galg", emit_galg(joyce_target())),
        ("joyce.cert", emit_cert(&joyce_certificates())),
    ];
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, &text).expect("write data file");
        println!("wrote {} ({} bytes)", path.display(), text.len());
    }
}
