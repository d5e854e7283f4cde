use std::path::Path;
use std::process::{Command, Output};

use nctda::tda::{BettiCurves, PersistencePairs, PointCloud};
use nctda_cli::{CliError, EXIT_NUMERICAL, EXIT_PARSE, EXIT_SIZE, EXIT_TOLERANCE};

const TETRAHEDRON: &str = "1 2 3\n1 2 4\n1 3 4\n2 3 4\n";
const RP2: &str = "1 2 3\n1 3 4\n1 4 5\n1 5 6\n1 2 6\n2 3 5\n2 4 5\n2 4 6\n3 4 6\n3 5 6\n";

fn nctda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctda")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn betti_reports_spectra_and_euler() {
    let dir = tempfile::tempdir().unwrap();
    let tet = write(dir.path(), "tet.txt", TETRAHEDRON);
    let o = nctda(&["betti", "--input", &tet, "--engine", "spectral"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("betti: 1 0 1"), "{s}");
    assert!(s.contains("grade 2 measure: 1/4 d(0) + 3/4 d(4)"), "{s}");
    assert!(s.contains("euler: 2"));

    let point = write(dir.path(), "pt.txt", "1\n");
    let s = stdout(&nctda(&["betti", "--input", &point]));
    assert!(s.contains("betti: 1\n"), "{s}");
}

#[test]
fn betti_over_both_rings_shows_torsion() {
    let dir = tempfile::tempdir().unwrap();
    let rp2 = write(dir.path(), "rp2.txt", RP2);
    let z = stdout(&nctda(&["betti", "--input", &rp2, "--ring", "z"]));
    let f2 = stdout(&nctda(&["betti", "--input", &rp2, "--ring", "gf2"]));
    assert!(z.contains("betti: 1 0 0"), "{z}");
    assert!(f2.contains("betti: 1 1 1"), "{f2}");
    assert!(z.contains("integer torsion: H1 [2]"));
    assert!(f2.contains("note: integer Betti ranks are 1 0 0"));
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "1 2\n2 q\n");
    let o = nctda(&["betti", "--input", &bad]);
    assert_eq!(o.status.code(), Some(EXIT_PARSE));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let moments = write(dir.path(), "m.csv", "k,value\n1,0\n2,1/x\n");
    let o = nctda(&["cumulants", "--input", &moments, "--kind", "free"]);
    assert_eq!(o.status.code(), Some(EXIT_PARSE));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    assert_eq!(nctda(&["cloud", "--kind", "disk", "-n", "10"]).status.code(), Some(EXIT_PARSE));
    assert_eq!(nctda(&["curves", "--input", &bad, "--grid", "1:0:3"]).status.code(), Some(EXIT_PARSE));
    let same = nctda(&["betti", "--input", &bad, "--output", &bad]);
    assert_eq!(same.status.code(), Some(EXIT_PARSE));
    assert_eq!(std::fs::read_to_string(&bad).unwrap(), "1 2\n2 q\n");
}

#[test]
fn exit_codes_follow_the_error_class() {
    use nctda::Error;
    assert_eq!(CliError::Core(Error::Tolerance("x".into())).exit_code(), EXIT_TOLERANCE);
    assert_eq!(CliError::Core(Error::Numerical("x".into())).exit_code(), EXIT_NUMERICAL);
    assert_eq!(
        CliError::Core(Error::SizeLimit { what: "x", limit: 1, got: 2 }).exit_code(),
        EXIT_SIZE
    );
    assert_eq!(CliError::Core(Error::Parse { line: 1, msg: "x".into() }).exit_code(), EXIT_PARSE);
}

#[test]
fn size_cap_exits_with_four_and_keeps_the_prefix() {
    let dir = tempfile::tempdir().unwrap();
    // A dense 10x10 lattice: at large radii the clique expansion exceeds the cap.
    let mut cloud = String::new();
    for i in 0..10 {
        for j in 0..10 {
            cloud.push_str(&format!("{},{}\n", i as f64 * 0.1, j as f64 * 0.1));
        }
    }
    let input = write(dir.path(), "lattice.csv", &cloud);
    let out = dir.path().join("curves.csv");
    let o = nctda(&["curves", "--input", &input, "--grid", "0.01:2:10", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_SIZE), "{}", stderr(&o));
    assert!(stderr(&o).contains("stopped at t = "), "{}", stderr(&o));
    let partial = BettiCurves::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!partial.grid.is_empty() && partial.grid.len() < 11);
    assert_eq!(partial.curves[0][0], 100);
}

#[test]
fn curves_outputs_round_trip_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "square.csv", "x,y\n0,0\n2,0\n2,2\n0,2\n");
    let out = dir.path().join("c.csv");
    let bars = dir.path().join("bars.csv");
    let run = || {
        let o = nctda(&[
            "curves",
            "--input",
            &input,
            "--grid",
            "0.5:1.5:4",
            "--output",
            out.to_str().unwrap(),
            "--bars",
            bars.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (
            std::fs::read_to_string(&out).unwrap(),
            std::fs::read_to_string(out.with_extension("svg")).unwrap(),
            std::fs::read_to_string(&bars).unwrap(),
        )
    };
    let first = run();
    assert_eq!(first, run());
    let curves = BettiCurves::from_csv(&first.0).unwrap();
    assert_eq!(curves.to_csv(), first.0);
    assert_eq!(curves.curves[1], vec![0, 0, 1, 1, 0]);
    assert!(first.1.starts_with("<svg") && first.1.trim_end().ends_with("</svg>"));
    let pairs = PersistencePairs::from_csv(&first.2, 2).unwrap();
    assert_eq!(pairs.to_csv(), first.2);
    assert_eq!(pairs.bars(1).len(), 1);

    let single = write(dir.path(), "one.csv", "0.5,0.5\n");
    let s = stdout(&nctda(&["curves", "--input", &single, "--grid", "0:1:4"]));
    let flat = BettiCurves::from_csv(&s).unwrap();
    assert_eq!(flat.curves[0], vec![1; 5]);
}

#[test]
fn clouds_are_reproducible() {
    let a = nctda(&["cloud", "--kind", "disk", "-n", "200", "--seed", "4"]);
    let b = nctda(&["cloud", "--kind", "disk", "-n", "200", "--seed", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, nctda(&["cloud", "--kind", "disk", "-n", "200", "--seed", "5"]).stdout);
    let cloud = PointCloud::from_csv(&stdout(&a)).unwrap();
    assert_eq!(cloud.len(), 200);
    assert_eq!(cloud.to_csv(), stdout(&a));
}

#[test]
fn torus_cloud_lies_on_the_surface() {
    let o = nctda(&["cloud", "--kind", "torus-rep", "-n", "200", "--seed", "1", "--big-r", "2", "--small-r", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cloud = PointCloud::from_csv(&stdout(&o)).unwrap();
    assert_eq!((cloud.len(), cloud.dim()), (200, 3));
    for p in cloud.points() {
        let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
        assert!(((rho - 2.0).powi(2) + p[2] * p[2] - 1.0).abs() < 1e-9);
    }
    assert!(stderr(&o).contains("max distance from the torus surface"));
}

#[test]
fn circle_cloud_arcs() {
    let o = nctda(&["cloud", "--kind", "circle", "-n", "160", "--seed", "2"]);
    let cloud = PointCloud::from_csv(&stdout(&o)).unwrap();
    let mut arcs = [0i64; 8];
    for p in cloud.points() {
        let a = p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU);
        arcs[((a / std::f64::consts::FRAC_PI_4) as usize).min(7)] += 1;
    }
    assert!(arcs.iter().all(|&c| (c - 20).abs() <= 5 * 13), "{arcs:?}");
}

#[test]
fn cumulant_transforms() {
    let dir = tempfile::tempdir().unwrap();
    let bernoulli = write(dir.path(), "b.csv", "k,value\n1,0\n2,1\n3,0\n4,1\n5,0\n6,1\n");
    let s = stdout(&nctda(&["cumulants", "--input", &bernoulli, "--kind", "boolean"]));
    assert_eq!(s, "k,value\n1,0\n2,1\n3,0\n4,0\n5,0\n6,0\n");

    let catalan = write(dir.path(), "c.csv", "k,value\n1,0\n2,1\n3,0\n4,2\n5,0\n6,5\n");
    let s = stdout(&nctda(&["cumulants", "--input", &catalan, "--kind", "free"]));
    assert_eq!(s, "k,value\n1,0\n2,1\n3,0\n4,0\n5,0\n6,0\n");

    let odd = write(dir.path(), "o.csv", "k,value\n1,1/2\n2,-3/7\n3,0.25\n4,5\n");
    for kind in ["classical", "free", "boolean", "monotone"] {
        let cum = dir.path().join(format!("{kind}.csv"));
        let o = nctda(&["cumulants", "--input", &odd, "--kind", kind, "--output", cum.to_str().unwrap()]);
        assert!(o.status.success());
        let back = stdout(&nctda(&["cumulants", "--input", cum.to_str().unwrap(), "--kind", kind, "--direction", "to-moments"]));
        assert_eq!(back, "k,value\n1,1/2\n2,-3/7\n3,1/4\n4,5\n", "{kind}");
    }
}
