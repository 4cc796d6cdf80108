//! The generated header declares the whole ABI, and a C program built
//! against it links and runs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("fieldnorm.h")
}

#[test]
fn header_declares_every_symbol() {
    let text = std::fs::read_to_string(header()).expect("header generated by build script");
    for symbol in [
        "typedef struct FnCorpus FnCorpus;",
        "typedef struct FnScoreSet FnScoreSet;",
        "#define FN_OK 0",
        "#define FN_REFUSED 2",
        "#define FN_INVALID_ARGUMENT 64",
        "#define FN_DATA_ERROR 65",
        "#define FN_PANIC 70",
        "fn_corpus_from_csv(",
        "fn_corpus_table1(",
        "fn_corpus_len(",
        "fn_corpus_free(",
        "fn_normalize(",
        "fn_scores_len(",
        "fn_scores_get(",
        "fn_scores_linearity(",
        "fn_scores_aggregate(",
        "fn_scores_free(",
        "fn_check_equidistance(",
        "fn_last_error_message(",
    ] {
        assert!(text.contains(symbol), "header lacks `{symbol}`");
    }
}

const PROGRAM: &str = r#"
#include <stdio.h>
#include "fieldnorm.h"

int main(void) {
    FnCorpus *corpus = NULL;
    FnScoreSet *mean = NULL, *pct = NULL;
    const char *ids[] = {"T1-01", "T1-52"};
    double value = 0.0;
    if (fn_corpus_table1(&corpus) != FN_OK) return 10;
    if (fn_corpus_len(corpus) != 52) return 11;
    if (fn_normalize(corpus, "mean", 0, 0, 0, &mean) != FN_OK) return 12;
    if (fn_scores_aggregate(mean, ids, 2, FN_STAT_SUM, &value) != FN_OK) return 13;
    if (fn_normalize(corpus, "percentile-cp-in", 0, 0, 0, &pct) != FN_OK) return 14;
    if (fn_scores_linearity(pct) != FN_NONLINEAR) return 15;
    if (fn_scores_aggregate(pct, ids, 2, FN_STAT_SUM, &value) != FN_REFUSED) return 16;
    char message[128];
    fn_last_error_message(message, sizeof message);
    printf("%s\n", message);
    fn_scores_free(pct);
    fn_scores_free(mean);
    fn_corpus_free(corpus);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    // test binaries live in target/<profile>/deps; the library one level up
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libfieldnorm_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("smoke.c");
    let bin = work.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("refused"));
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
