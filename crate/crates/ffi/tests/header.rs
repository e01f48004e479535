use std::path::Path;
use std::process::Command;

/// The generated header must be valid C on its own.
#[test]
fn header_compiles_as_c() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use_header.c");
    std::fs::write(
        &src,
        "#include \"emlsr_isac.h\"\n\
         int main(void) {\n\
             EmlsrConfig *cfg = emlsr_config_default();\n\
             EmlsrStatus s = emlsr_config_set_mode(cfg, EMLSR_MODE_COOPERATIVE);\n\
             emlsr_config_free(cfg);\n\
             return s == EMLSR_STATUS_OK ? 0 : 1;\n\
         }\n",
    )
    .unwrap();
    let status = match Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
    {
        Ok(s) => s,
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    };
    assert!(status.success());
}
