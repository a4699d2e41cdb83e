use std::path::Path;
use std::process::{Command, Output};

fn gifs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gifs")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = gifs(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The single stderr line of a failed run, parsed.
fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

#[test]
fn full_pipeline_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let shape = d.join("sphere.obj");
    let spec = d.join("sphere.json");
    ok(&["demo-shape", "--shape", "sphere", "--out", s(&shape), "--spec-out", s(&spec), "--res0", "10"]);
    assert!(gifs::geometry::io::read_mesh(&shape).unwrap().faces.len() > 1000);

    let data = d.join("pairs.bin");
    ok(&["gen-data", "--mesh", s(&shape), "--pairs", "2000", "--out", s(&data)]);
    assert_eq!(gifs::datagen::read_dataset(&data).unwrap().len(), 2000);
    ok(&["gen-data", "--mesh", "shape:open-disc", "--pairs", "500", "--out", s(&d.join("disc.bin"))]);

    let model = d.join("m.gifs");
    ok(&["train", "--data", s(&data), "--epochs", "1", "--lr", "1e-3", "--out", s(&model)]);
    ok(&["train", "--data", s(&data), "--epochs", "1", "--flag-loss", "bce", "--out", s(&d.join("b.gifs"))]);

    for field in [
        format!("analytic:{}", s(&spec)),
        format!("mesh:{}", s(&shape)),
        "shape:double-sphere".to_string(),
        format!("model:{}", s(&model)),
    ] {
        let out = d.join("x.ply");
        ok(&["extract", "--field", &field, "--res0", "5", "--subdiv", "1", "--out", s(&out)]);
        assert!(out.exists());
    }

    let pred = d.join("pred.obj");
    ok(&["extract", "--field", &format!("analytic:{}", s(&spec)), "--out", s(&pred)]);
    let out = ok(&["eval", "--pred", s(&pred), "--gt", s(&shape)]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let squared = report["chamfer_mean"].as_f64().unwrap();
    assert!(squared > 0.0 && squared < 1e-5, "{squared}");
    assert!(report["fscore_001"].as_f64().unwrap() > 90.0);
    let out = ok(&["eval", "--pred", s(&pred), "--gt", s(&shape), "--unsquared"]);
    let unsquared: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // Distances are below one, so their squares are smaller.
    assert!(unsquared["chamfer_mean"].as_f64().unwrap() > squared);
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bytes = |p: &Path| std::fs::read(p).unwrap();
    let run = |threads: &str, tag: &str| {
        let data = d.join(format!("d{tag}.bin"));
        let model = d.join(format!("m{tag}.gifs"));
        let mesh = d.join(format!("x{tag}.ply"));
        let t = ["--threads", threads, "--seed", "3"];
        ok(&[&["gen-data", "--mesh", "shape:sphere", "--pairs", "3000", "--out", s(&data)][..], &t].concat());
        ok(&[&["train", "--data", s(&data), "--epochs", "1", "--out", s(&model)][..], &t].concat());
        ok(&[&["extract", "--field", "shape:double-sphere", "--res0", "10", "--out", s(&mesh)][..], &t].concat());
        (bytes(&data), bytes(&model), bytes(&mesh))
    };
    let a = run("1", "a");
    let b = run("3", "b");
    assert!(a.0 == b.0, "datasets differ");
    assert!(a.1 == b.1, "models differ");
    assert!(a.2 == b.2, "meshes differ");
}

#[test]
fn errors_are_json_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.join("o.obj");

    let usage = gifs(&["demo-shape", "--shape", "torus", "--out", s(&out)]);
    assert_eq!(usage.status.code(), Some(1));
    assert_eq!(error_json(&usage)["error"], "UsageError");

    let missing_flag = gifs(&["train"]);
    assert_eq!(missing_flag.status.code(), Some(1));
    assert_eq!(error_json(&missing_flag)["error"], "UsageError");

    let bad_kind = gifs(&["extract", "--field", "voxels:x", "--out", s(&out)]);
    assert_eq!(bad_kind.status.code(), Some(1));

    let bad_config = gifs(&["demo-shape", "--shape", "sphere", "--tau=-1", "--out", s(&out)]);
    assert_eq!(bad_config.status.code(), Some(1));
    assert_eq!(error_json(&bad_config)["error"], "InvalidConfig");

    let no_threads = gifs(&["--threads", "0", "demo-shape", "--shape", "sphere", "--out", s(&out)]);
    assert_eq!(no_threads.status.code(), Some(1));

    let missing = gifs(&["train", "--data", s(&d.join("none.bin")), "--out", s(&d.join("m"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_json(&missing)["error"], "FormatError");

    let junk = d.join("junk.bin");
    std::fs::write(&junk, b"not a dataset").unwrap();
    let corrupt = gifs(&["train", "--data", s(&junk), "--out", s(&d.join("m"))]);
    assert_eq!(corrupt.status.code(), Some(2));

    let junk_model = gifs(&["extract", "--field", &format!("model:{}", s(&junk)), "--out", s(&out)]);
    assert_eq!(junk_model.status.code(), Some(2));

    let bad_mesh = d.join("bad.obj");
    std::fs::write(&bad_mesh, "v 0 0 0\nf 1 2 3\n").unwrap();
    let invalid = gifs(&["eval", "--pred", s(&bad_mesh), "--gt", s(&bad_mesh)]);
    assert_ne!(invalid.status.code(), Some(0));
    assert!(error_json(&invalid)["message"].is_string());
}

#[test]
fn help_and_version_succeed() {
    let help = ok(&["--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["demo-shape", "gen-data", "train", "extract", "eval"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    ok(&["--version"]);
}
