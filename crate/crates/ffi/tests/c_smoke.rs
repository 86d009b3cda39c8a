use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "wpbdd.h"

static const char *NET =
    "{\"variables\":[{\"name\":\"a\",\"values\":[\"1\",\"2\"]},"
    "{\"name\":\"b\",\"values\":[\"1\",\"2\",\"3\"]}],"
    "\"cpts\":[{\"child\":\"a\",\"parents\":[],\"table\":[0.5,0.5]},"
    "{\"child\":\"b\",\"parents\":[\"a\"],\"table\":[0.3,0.3,0.4,0.3,0.3,0.4]}]}";

int main(void) {
    WpbddNetwork *net = NULL;
    WpbddModel *model = NULL;
    double p = 0.0;
    if (wpbdd_network_from_json(NET, &net) != WPBDD_STATUS_OK) return 10;
    if (wpbdd_model_compile(net, true, &model) != WPBDD_STATUS_OK) return 11;
    if (wpbdd_model_query(model, "b", "3", NULL, NULL, 0, &p) != WPBDD_STATUS_OK) return 12;
    if (fabs(p - 0.4) > 1e-12) return 13;
    if (wpbdd_model_query(model, "b", "7", NULL, NULL, 0, &p) != WPBDD_STATUS_UNKNOWN_ATOM) return 14;
    if (strstr(wpbdd_last_error_message(), "UnknownAtom") == NULL) return 15;
    printf("nodes=%zu P(b=3)=%.1f\n", wpbdd_model_node_count(model), p);
    wpbdd_model_free(model);
    wpbdd_network_free(net);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = target_dir().join("libwpbdd_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "nodes=3 P(b=3)=0.4\n");
}
