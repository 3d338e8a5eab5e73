use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TOY: &str = "p_target = \"1/4\"\np_num = [1, 1, 1]\np_den = [1, 2, 2]\ns = [1, 1, 1]\n";

fn rsponge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsponge"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("toy.toml"), TOY).unwrap();
    dir
}

fn generated() -> tempfile::TempDir {
    let dir = setup();
    let o = rsponge(dir.path(), &["generate", "--config", "toy.toml", "--seed", "7", "--depth", "2", "--out", "t"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

#[test]
fn validate_modes() {
    let dir = setup();
    let o = rsponge(dir.path(), &["validate", "--config", "toy.toml", "--mode", "relaxed"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("valid true"));
    // the toy schedule is far from the growth conditions
    assert_eq!(code(&rsponge(dir.path(), &["validate", "--config", "toy.toml", "--mode", "strict"])), 1);
}

#[test]
fn generate_writes_trace_and_manifest() {
    let dir = generated();
    let t = dir.path().join("t");
    for f in ["level0.dycx", "level1.dycx", "level2.dycx", "choices.txt", "schedule.toml", "manifest.txt"] {
        assert!(t.join(f).is_file(), "{f}");
    }
    let manifest = fs::read_to_string(t.join("manifest.txt")).unwrap();
    assert!(manifest.starts_with("MANIFEST 1\ncommand generate\n"));
    assert!(manifest.contains("seed 7\n"));
    let o = rsponge(dir.path(), &["inspect", "--in", "t"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("step 2 level 3 cubes 128 measure 1/2^2"));
}

#[test]
fn generate_is_reproducible() {
    let dir = generated();
    let o = rsponge(dir.path(), &["generate", "--config", "toy.toml", "--seed", "7", "--depth", "2", "--out", "u"]);
    assert_eq!(code(&o), 0);
    for f in ["level2.dycx", "choices.txt", "manifest.txt"] {
        let a = fs::read(dir.path().join("t").join(f)).unwrap();
        let b = fs::read(dir.path().join("u").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn detect_emits_witness() {
    let dir = generated();
    let o = rsponge(dir.path(), &["detect-subcongruence", "--in", "t/level2.dycx", "--scube-level", "2", "--out", "w.txt"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("WITNESS 1\ncube 2 "));
    assert_eq!(fs::read_to_string(dir.path().join("w.txt")).unwrap(), text);
    assert!(dir.path().join("w.txt.manifest").is_file());
    // one cube cannot move off itself and stay inside the complex
    fs::write(dir.path().join("one.dycx"), "DYCX 1\nlevel 1\ncount 1\n0 0 0\n").unwrap();
    let o = rsponge(dir.path(), &["detect-subcongruence", "--in", "one.dycx", "--scube-level", "1"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "none\n");
}

#[test]
fn section_four_pipeline() {
    let dir = generated();
    let o = rsponge(dir.path(), &["find-safe-cube", "--trace", "t", "--motion", "1 0 0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verified true"));
    let o = rsponge(
        dir.path(),
        &["expansion-audit", "--trace", "t", "--motion", "0 0 0", "--motion", "1 0 0", "--epsilon", "1/2"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("ratio 1/1\n"));
    let o = rsponge(dir.path(), &["build-xy", "--trace", "t", "--step", "1", "--out", "xy"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("mutual_cover true"));
    let cover = |motions: &[&str]| {
        let mut args = vec!["verify-cover", "--a", "xy/x.dycx", "--b", "xy/y.dycx"];
        for m in motions {
            args.extend(["--motion", m]);
        }
        code(&rsponge(dir.path(), &args))
    };
    assert_eq!(cover(&["0 0 0", "1 0 0", "-1 0 0"]), 0);
    assert_eq!(cover(&["1 0 0"]), 1);
}

#[test]
fn equidecomposition_files() {
    let dir = setup();
    // K₀ split into two halves that swap places
    let good = "EQUIDECOMP 1\nsource 0 1\n0 0 0\ntarget 0 1\n0 0 0\npieces 2\n\
        piece 1 4 1 0 0 1/2^1 0 1 0 0 0 0 1 0 0 0 0 1\n0 0 0\n0 0 1\n0 1 0\n0 1 1\n\
        piece 1 4 1 0 0 -1/2^1 0 1 0 0 0 0 1 0 0 0 0 1\n1 0 0\n1 0 1\n1 1 0\n1 1 1\n";
    fs::write(dir.path().join("good.txt"), good).unwrap();
    let o = rsponge(dir.path(), &["verify-equidecomp", "--in", "good.txt"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let bad = good.replace("-1/2^1", "0");
    fs::write(dir.path().join("bad.txt"), bad).unwrap();
    let o = rsponge(dir.path(), &["verify-equidecomp", "--in", "bad.txt"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("images-disjoint false"));
}

#[test]
fn probability_and_bounds() {
    let dir = setup();
    let o = rsponge(
        dir.path(),
        &["mc-probability", "--config", "toy.toml", "--depth", "1", "--scube-level", "1", "--resolution", "2", "--trials", "200"],
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("trials 200"));
    let o = rsponge(dir.path(), &["bounds-report", "--config", "toy.toml"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.contains(" logrange_step ")).count() == 2);
}

#[test]
fn export_formats() {
    let dir = setup();
    fs::write(dir.path().join("two.dycx"), "DYCX 1\nlevel 1\ncount 2\n0 0 0\n1 0 0\n").unwrap();
    let o = rsponge(dir.path(), &["export", "--in", "two.dycx", "--format", "stl", "--out", "m.stl"]);
    assert_eq!(code(&o), 0);
    let stl = fs::read_to_string(dir.path().join("m.stl")).unwrap();
    assert_eq!(stl.matches("facet normal").count(), 20);
    let o = rsponge(dir.path(), &["export", "--in", "two.dycx", "--format", "voxel", "--out", "v.txt"]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(dir.path().join("v.txt")).unwrap().contains("0.5 0 0\n"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = setup();
    assert_eq!(code(&rsponge(dir.path(), &["no-such-verb"])), 2);
    assert_eq!(code(&rsponge(dir.path(), &["validate", "--config", "toy.toml", "--bogus"])), 2);
    assert_eq!(code(&rsponge(dir.path(), &["validate"])), 2);
    assert_eq!(code(&rsponge(dir.path(), &["inspect", "--in", "missing.dycx"])), 2);
    assert_eq!(code(&rsponge(dir.path(), &["--help"])), 0);
}
