//! Drive the command-line interface from code and replay its manifest.

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let p = |s: &str| dir.path().join(s).to_string_lossy().into_owned();
    let run = |args: &[&str]| {
        let mut argv = vec!["stripscreen"];
        argv.extend_from_slice(args);
        let code = stripscreen::cli::dispatch(argv);
        assert_eq!(code, 0, "{args:?}");
    };

    run(&["synth", "--preset", "separable", "--n", "400", "--out", &p("d.csv")]);
    run(&["validate", "--input", &p("d.csv")]);
    run(&["ensemble", "--input", &p("d.csv"), "--out", &p("ens"), "--family", "logreg", "--seed", "1"]);
    run(&["sweep", "--input", &p("d.csv"), "--model", &p("ens/ensemble.model"), "--out", &p("sweep")]);
    run(&["replay", "--manifest", &p("sweep/manifest.json")]);
}
