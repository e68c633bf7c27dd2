//! The shipped `data/` corpus stays in sync with the code.
//!
//! Two guarantees: print∘parse is the identity on every shipped file (so
//! the formats round-trip), and the three case-study files are byte-equal
//! to what `examples/export_joyce.rs` regenerates (so nobody edits them by
//! hand and drifts away from the built-in construction).

use std::fs;
use std::path::{Path, PathBuf};

use rht_core::joyce::{joyce_certificates, joyce_model, joyce_target};
use rht_core::textio::{
    emit_cdga, emit_cert, emit_galg, parse_cdga, parse_cert, parse_galg,
};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn read(name: &str) -> String {
    let path = data_dir().join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

#[test]
fn print_parse_identity_on_cdga_corpus() {
    for name in ["heisenberg.cdga", "sphere2.cdga", "sphere3.cdga", "cp2.cdga", "joyce.cdga"] {
        let first = parse_cdga(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = emit_cdga(&first.cdga, first.c_flags.as_deref());
        let second = parse_cdga(&printed).unwrap_or_else(|e| panic!("reparse {name}: {e}"));
        assert_eq!(
            printed,
            emit_cdga(&second.cdga, second.c_flags.as_deref()),
            "{name}: print∘parse is not idempotent"
        );
    }
}

#[test]
fn print_parse_identity_on_galg_and_cert() {
    let galg = parse_galg(&read("joyce.galg")).unwrap();
    let printed = emit_galg(&galg);
    assert_eq!(printed, emit_galg(&parse_galg(&printed).unwrap()));

    let certs = parse_cert(&read("joyce.cert")).unwrap();
    let printed = emit_cert(&certs);
    assert_eq!(printed, emit_cert(&parse_cert(&printed).unwrap()));
}

#[test]
fn shipped_case_study_files_match_the_construction() {
    let model = joyce_model();
    let ctx = model.cdga().context();
    let flags: Vec<bool> = (0..ctx.len()).map(|i| model.is_c(i)).collect();

    assert_eq!(read("joyce.cdga"), emit_cdga(model.cdga(), Some(&flags)), "joyce.cdga drifted");
    assert_eq!(read("joyce.galg"), emit_galg(joyce_target()), "joyce.galg drifted");
    assert_eq!(read("joyce.cert"), emit_cert(&joyce_certificates()), "joyce.cert drifted");
}
