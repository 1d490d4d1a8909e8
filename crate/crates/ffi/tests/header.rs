use std::fs;
use std::path::Path;
use std::process::Command;

fn header() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qosroute.h");
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn header_declares_every_export() {
    let h = header();
    let source = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(h.contains(&format!("{name}(")), "{name} missing from the header");
    }
    for ty in ["typedef struct QrGraph QrGraph", "typedef struct QrWindow", "QR_STATUS_OK = 0", "QR_POLICY_KOQRA = 3"] {
        assert!(h.contains(ty), "{ty} missing from the header");
    }
}

/// The header must compile as C when a compiler is on the PATH.
#[test]
fn header_compiles_as_c() {
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    fs::write(
        &main,
        "#include \"qosroute.h\"\nint main(void) { QrGraph *g = 0; return (int)qr_graph_from_text(0, &g) == QR_STATUS_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&main)
        .status();
    match status {
        Ok(s) => assert!(s.success(), "cc rejected the header"),
        Err(e) => eprintln!("skipping, no C compiler: {e}"),
    }
}
