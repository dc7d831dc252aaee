//! Compiles tests/smoke.c against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libtfrotor_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/tfrotor.h")).unwrap();
    for name in ["tfr_grid_new", "tfr_signal_generate", "tfr_frft", "tfr_mp_norm", "tfr_psi_eps", "tfr_last_error", "typedef struct TfrGrid TfrGrid"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let (Some(lib), Ok(_)) = (staticlib(), Command::new("cc").arg("--version").output()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::temp_dir().join(format!("tfrotor_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "cc failed");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "smoke exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.000000");
}
