//! Compiles and runs a small C program against the generated header and the
//! static library. Skipped when no C compiler is on PATH.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "sizesched.h"

int main(void) {
    SizeschedWorkload *w = NULL;
    SizeschedOutcomes *o = NULL;
    double mst = 0.0;
    if (sizesched_workload_generate(0.25, 1.0, 0.5, 0.9, 1000, 3, &w) != SIZESCHED_STATUS_OK) return 1;
    for (size_t i = 0; i < sizesched_policy_count(); i++) {
        if (sizesched_simulate(w, sizesched_policy_name(i), &o) != SIZESCHED_STATUS_OK) return 2;
        if (sizesched_outcomes_len(o) != 1000) return 3;
        if (sizesched_outcomes_mean_sojourn(o, &mst) != SIZESCHED_STATUS_OK || !(mst > 0.0)) return 4;
        printf("%s %f\n", sizesched_policy_name(i), mst);
        sizesched_outcomes_free(o);
    }
    if (sizesched_simulate(w, "bogus", &o) != SIZESCHED_STATUS_UNKNOWN_POLICY) return 5;
    if (sizesched_last_error() == NULL) return 6;
    sizesched_workload_free(w);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc)
        .arg("--version")
        .output()
        .ok()?
        .status
        .success()
        .then_some(cc)
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // tests run from target/<profile>/deps; the static library sits one up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("libsizesched_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 12);
}
