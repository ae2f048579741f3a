mod common;

use std::path::Path;
use std::process::{Command, Output};

use iris_dilate::pipeline::Sidecar;
use iris_dilate::synthetic::SyntheticEye;
use iris_dilate::{
    load_image, remap_dilation, save_image, DilationLevel, SamplingMethod, Semantics,
};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iris-dilate"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_eye(dir: &Path) -> std::path::PathBuf {
    // 320x280 NIR-like frame at λ = 0.282
    let eye = SyntheticEye {
        r_pupil: 28.2,
        ..SyntheticEye::default()
    };
    let path = dir.join("eye.png");
    save_image(&eye.render().unwrap().0, &path).unwrap();
    path
}

const GEOM: [&str; 8] = [
    "--cx",
    "160",
    "--cy",
    "140",
    "--r-pupil",
    "28.2",
    "--r-iris",
    "100",
];

#[test]
fn help_exits_zero_everywhere() {
    for sub in [
        None,
        Some("dilate"),
        Some("augment"),
        Some("normalize"),
        Some("iou"),
        Some("preview"),
        Some("bench"),
    ] {
        let mut args = Vec::from_iter(sub);
        args.push("--help");
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{sub:?}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn dilate_writes_image_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write_eye(dir.path());
    let out = dir.path().join("eye_lam550.png");
    let mut args = vec![
        "dilate",
        "--image",
        s(&eye),
        "--lambda",
        "0.55",
        "--out",
        s(&out),
    ];
    args.extend(GEOM);
    let o = run(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(stdout(&o), "lambda=0.550000");

    let side = Sidecar::read(dir.path().join("eye_lam550.geom")).unwrap();
    assert_eq!(side.lambda.value(), 0.55);
    assert_eq!(
        (side.geometry.center_x(), side.geometry.r_iris()),
        (160.0, 100.0)
    );

    // same bytes as the library call
    let img = load_image(&eye, Semantics::Intensity).unwrap();
    let g = iris_dilate::IrisGeometry::new(160.0, 140.0, 28.2, 100.0).unwrap();
    let lib = remap_dilation(
        &img,
        &g,
        DilationLevel::new(0.55).unwrap(),
        SamplingMethod::Nearest,
    )
    .unwrap();
    assert_eq!(load_image(&out, Semantics::Intensity).unwrap(), lib.image);
}

#[test]
fn dilate_reads_geometry_sidecar_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write_eye(dir.path());
    let side = dir.path().join("eye.geom");
    std::fs::write(&side, "cx=160\ncy=140\nr_pupil=50\nr_iris=100\n").unwrap();
    let out = dir.path().join("o.png");
    let o = run(&[
        "dilate",
        "--image",
        s(&eye),
        "--geometry",
        s(&side),
        "--r-pupil",
        "28.2",
        "--lambda",
        "0.4",
        "--method",
        "bilinear",
        "--out",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let img = load_image(&eye, Semantics::Intensity).unwrap();
    let g = iris_dilate::IrisGeometry::new(160.0, 140.0, 28.2, 100.0).unwrap();
    let lib = remap_dilation(
        &img,
        &g,
        DilationLevel::new(0.4).unwrap(),
        SamplingMethod::Bilinear,
    )
    .unwrap();
    assert_eq!(load_image(&out, Semantics::Intensity).unwrap(), lib.image);
}

#[test]
fn dilate_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write_eye(dir.path());
    let out = dir.path().join("o.png");

    let mut args = vec![
        "dilate",
        "--image",
        s(&eye),
        "--lambda",
        "1.2",
        "--out",
        s(&out),
    ];
    args.extend(GEOM);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    let missing = dir.path().join("missing.png");
    let mut args = vec![
        "dilate",
        "--image",
        s(&missing),
        "--lambda",
        "0.5",
        "--out",
        s(&out),
    ];
    args.extend(GEOM);
    assert_eq!(run(&args).status.code(), Some(3));

    // pupil not smaller than iris
    let o = run(&[
        "dilate",
        "--image",
        s(&eye),
        "--cx",
        "160",
        "--cy",
        "140",
        "--r-pupil",
        "120",
        "--r-iris",
        "100",
        "--lambda",
        "0.5",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));

    // missing geometry value
    let o = run(&[
        "dilate",
        "--image",
        s(&eye),
        "--cx",
        "160",
        "--lambda",
        "0.5",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let mut args = vec![
        "dilate",
        "--image",
        s(&eye),
        "--lambda",
        "0.5",
        "--method",
        "bicubic",
        "--out",
        s(&out),
    ];
    args.extend(GEOM);
    assert_eq!(run(&args).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn dilate_mask_mode_keeps_labels() {
    let dir = tempfile::tempdir().unwrap();
    let eye = SyntheticEye::default();
    let mask_path = dir.path().join("mask.png");
    save_image(&eye.four_class_mask().unwrap(), &mask_path).unwrap();
    let out = dir.path().join("m.png");
    let o = run(&[
        "dilate",
        "--image",
        s(&mask_path),
        "--cx",
        "160",
        "--cy",
        "140",
        "--r-pupil",
        "40",
        "--r-iris",
        "100",
        "--lambda",
        "0.7",
        "--method",
        "bilinear",
        "--mask-mode",
        "--out",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let m = load_image(&out, Semantics::Label).unwrap();
    let ids: Vec<u8> = iris_dilate::label_set(&m).unwrap().ids().collect();
    assert_eq!(ids, vec![0, 1, 2, 3]);
}

#[test]
fn augment_defaults_and_worker_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_dataset(dir.path(), 4, true, &[]);
    let mut trees = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("out{workers}"));
        let o = run(&[
            "augment",
            "--manifest",
            s(&manifest),
            "--out-dir",
            s(&out),
            "--workers",
            workers,
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let line = stdout(&o);
        assert!(
            line.starts_with("processed=4 skipped=0 outputs=160 seconds="),
            "{line}"
        );
        trees.push(common::tree(&out));
    }
    assert_eq!(trees[0], trees[1]);
    assert!(trees[0].contains_key(Path::new("images/eye00_orig.png")));
    assert!(trees[0].contains_key(Path::new("masks/eye03_mask_lam750.png")));

    let out = dir.path().join("no_orig");
    let o = run(&[
        "augment",
        "--manifest",
        s(&manifest),
        "--out-dir",
        s(&out),
        "--levels",
        "3",
        "--lambda-min",
        "0.2",
        "--lambda-max",
        "0.6",
        "--include-original",
        "false",
    ]);
    assert_eq!(
        stdout(&o).split(' ').take(3).collect::<Vec<_>>(),
        ["processed=4", "skipped=0", "outputs=24"]
    );
}

#[test]
fn augment_bad_manifest_exits_before_output() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.csv");
    std::fs::write(&manifest, "a.png,-,1,2,three,4\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["augment", "--manifest", s(&manifest), "--out-dir", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let o = run(&[
        "augment",
        "--manifest",
        s(&dir.path().join("nope.csv")),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn augment_skips_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = common::write_dataset(dir.path(), 5, false, &[1]);
    let out = dir.path().join("out");
    let o = run(&[
        "augment",
        "--manifest",
        s(&manifest),
        "--out-dir",
        s(&out),
        "--levels",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("processed=4 skipped=1 outputs=12 "));
}

#[test]
fn normalize_default_size() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write_eye(dir.path());
    let out = dir.path().join("sheet.png");
    let mut args = vec!["normalize", "--image", s(&eye), "--out", s(&out)];
    args.extend(GEOM);
    let o = run(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let sheet = load_image(&out, Semantics::Intensity).unwrap();
    assert_eq!((sheet.width(), sheet.height()), (512, 64));

    let mut args = vec![
        "normalize",
        "--image",
        s(&eye),
        "--out",
        s(&out),
        "--width",
        "1",
    ];
    args.extend(GEOM);
    assert_eq!(run(&args).status.code(), Some(1));
}

#[test]
fn iou_prints_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let eye = SyntheticEye::default();
    let a = dir.path().join("a.png");
    save_image(&eye.annulus_mask().unwrap(), &a).unwrap();
    let o = run(&["iou", "--a", s(&a), "--b", s(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.000000");

    let four = dir.path().join("four.png");
    save_image(&eye.four_class_mask().unwrap(), &four).unwrap();
    assert_eq!(
        run(&["iou", "--a", s(&a), "--b", s(&four)]).status.code(),
        Some(1)
    );
    let o = run(&["iou", "--a", s(&four), "--b", s(&four), "--class", "3"]);
    assert_eq!(stdout(&o), "1.000000");

    let small = dir.path().join("small.png");
    save_image(
        &SyntheticEye { width: 300, ..eye }.annulus_mask().unwrap(),
        &small,
    )
    .unwrap();
    assert_ne!(
        run(&["iou", "--a", s(&a), "--b", s(&small)]).status.code(),
        Some(0)
    );
}

#[test]
fn preview_strip_has_one_panel_per_level_plus_original() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write_eye(dir.path());
    let out = dir.path().join("strip.png");
    let mut args = vec![
        "preview",
        "--image",
        s(&eye),
        "--levels",
        "0.15,0.55",
        "--out",
        s(&out),
    ];
    args.extend(GEOM);
    let o = run(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let strip = load_image(&out, Semantics::Intensity).unwrap();
    assert_eq!((strip.width(), strip.height()), (3 * 320, 280));
    let original = load_image(&eye, Semantics::Intensity).unwrap();
    for r in [0, 139, 279] {
        for c in [0, 160, 319] {
            assert_eq!(strip.pixel(c, r), original.pixel(c, r));
        }
    }
}

#[test]
fn bench_prints_report_line() {
    let o = run(&["bench", "--iters", "12"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let line = stdout(&o);
    assert!(line.starts_with("n_images=12 "), "{line}");
    assert!(line.contains("shape=320x280x1 method=nearest threads=1"));
    assert_eq!(run(&["bench", "--iters", "5"]).status.code(), Some(1));
}
