#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use iris_dilate::save_image;
use iris_dilate::synthetic::SyntheticEye;

/// Eye `i` of a small synthetic dataset; sizes and dilations vary per index.
pub fn dataset_eye(i: usize) -> SyntheticEye {
    let r_iris = 40.0 + (i % 5) as f64 * 4.0;
    SyntheticEye {
        width: 128,
        height: 112,
        center_x: 64.0 + (i % 3) as f64 * 0.5,
        center_y: 56.0,
        r_pupil: r_iris * (0.25 + 0.04 * (i % 7) as f64),
        r_iris,
    }
}

/// Writes `n` eyes (with masks when `masks`) plus `manifest.csv` into `dir`.
/// Records listed in `bad` get a pupil radius larger than the iris.
pub fn write_dataset(dir: &Path, n: usize, masks: bool, bad: &[usize]) -> PathBuf {
    let mut manifest = String::from("# image,mask,cx,cy,r_pupil,r_iris,subject\n");
    fs::create_dir_all(dir.join("img")).unwrap();
    for i in 0..n {
        let eye = dataset_eye(i);
        let (img, _) = eye.render().unwrap();
        let image_rel = format!("img/eye{i:02}.png");
        save_image(&img, dir.join(&image_rel)).unwrap();
        let mask_rel = if masks {
            let rel = format!("img/eye{i:02}_mask.png");
            save_image(&eye.annulus_mask().unwrap(), dir.join(&rel)).unwrap();
            rel
        } else {
            "-".to_string()
        };
        let r_pupil = if bad.contains(&i) {
            eye.r_iris + 5.0
        } else {
            eye.r_pupil
        };
        manifest.push_str(&format!(
            "{image_rel},{mask_rel},{},{},{},{},subj{}\n",
            eye.center_x,
            eye.center_y,
            r_pupil,
            eye.r_iris,
            i / 2
        ));
    }
    let path = dir.join("manifest.csv");
    fs::write(&path, manifest).unwrap();
    path
}

/// Relative path → file bytes for every file under `root`.
pub fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
