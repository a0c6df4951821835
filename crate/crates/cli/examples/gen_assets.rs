//! Regenerates the bundled sample assets under `tests/assets/`.
//!
//! Everything is seeded, so reruns are byte-identical:
//! `cargo run -p sgwc-cli --example gen_assets`

use sgwc::imaging::{save_image, RasterImage};
use sgwc::saliency::{SaliencyAnnotation, SaliencyBox};
use sgwc::satisfaction::{synthesize_survey, ParametricParams};
use sgwc::synth;
use std::path::Path;

fn write_image(path: &Path, image: &RasterImage) {
    std::fs::write(path, save_image(image).expect("sample images are RGB or gray")).unwrap();
}

fn boxed(label: &str, x: u32, y: u32, w: u32, h: u32, level: u32) -> SaliencyBox {
    SaliencyBox { label: label.into(), x, y, w, h, level }
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/assets");
    for dir in ["images", "annotations", "repo"] {
        std::fs::create_dir_all(root.join(dir)).unwrap();
    }

    // customer images: photo-like background with textured salient regions
    let mut c1 = synth::photo(120, 90, 3, 101);
    synth::stamp_texture(&mut c1, 18, 20, 30, 24, 201);
    synth::stamp_texture(&mut c1, 64, 40, 36, 30, 202);
    synth::stamp_texture(&mut c1, 10, 60, 22, 18, 203);
    write_image(&root.join("images/c1.ppm"), &c1);
    let ann1 = SaliencyAnnotation {
        boxes: vec![
            boxed("ball", 18, 20, 30, 24, 2),
            boxed("player", 64, 40, 36, 30, 2),
            boxed("crowd", 10, 60, 22, 18, 1),
        ],
    };
    std::fs::write(root.join("annotations/c1.json"), ann1.to_json()).unwrap();

    let mut c2 = synth::photo(96, 96, 3, 102);
    synth::stamp_texture(&mut c2, 24, 16, 40, 32, 204);
    synth::stamp_texture(&mut c2, 12, 60, 28, 24, 205);
    write_image(&root.join("images/c2.ppm"), &c2);
    let ann2 = SaliencyAnnotation {
        boxes: vec![boxed("stage", 24, 16, 40, 32, 2), boxed("singer", 12, 60, 28, 24, 2)],
    };
    std::fs::write(root.join("annotations/c2.json"), ann2.to_json()).unwrap();

    let mut c3 = synth::photo(80, 100, 1, 103);
    synth::stamp_texture(&mut c3, 20, 24, 32, 28, 206);
    synth::stamp_texture(&mut c3, 44, 64, 24, 20, 207);
    write_image(&root.join("images/c3.pgm"), &c3);
    let ann3 = SaliencyAnnotation {
        boxes: vec![boxed("speaker", 20, 24, 32, 28, 2), boxed("podium", 44, 64, 24, 20, 1)],
    };
    std::fs::write(root.join("annotations/c3.json"), ann3.to_json()).unwrap();

    // shared repository: near-duplicates of the customer images plus filler
    let mut r0 = synth::photo(120, 90, 3, 101);
    synth::stamp_texture(&mut r0, 20, 22, 30, 24, 208);
    write_image(&root.join("repo/r0.ppm"), &r0);
    let r1 = synth::photo(100, 80, 3, 111);
    write_image(&root.join("repo/r1.ppm"), &r1);
    let mut r2 = synth::photo(96, 96, 3, 102);
    synth::stamp_texture(&mut r2, 26, 18, 38, 30, 209);
    write_image(&root.join("repo/r2.ppm"), &r2);
    let r3 = synth::photo(88, 72, 3, 112);
    write_image(&root.join("repo/r3.ppm"), &r3);
    let mut r4 = synth::photo(80, 100, 1, 103);
    synth::stamp_texture(&mut r4, 22, 26, 30, 26, 210);
    write_image(&root.join("repo/r4.pgm"), &r4);
    let r5 = synth::photo(64, 64, 3, 113);
    write_image(&root.join("repo/r5.ppm"), &r5);

    let manifest = serde_json::json!([
        {"image_path": "r0.ppm", "labels": ["ball", "player"]},
        {"image_path": "r1.ppm", "labels": ["crowd", "stage"]},
        {"image_path": "r2.ppm", "labels": ["stage", "singer"]},
        {"image_path": "r3.ppm", "labels": ["singer", "ball"]},
        {"image_path": "r4.pgm", "labels": ["speaker", "podium"]},
        {"image_path": "r5.ppm", "labels": ["ball", "stage", "speaker"]},
    ]);
    std::fs::write(
        root.join("repo/manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )
    .unwrap();

    // survey: 500 noisy rows from the default parametric generator
    let survey = synthesize_survey(&ParametricParams::default(), 500, 0.02, 30.0, 42);
    std::fs::write(root.join("survey.csv"), survey.to_csv()).unwrap();

    // three-customer scenario: measured file sizes, repository-driven SCM,
    // learned satisfaction model, SA optimizer
    let scenario = serde_json::json!({
        "bandwidth_bits_per_s": 30000.0,
        "objective": "total_abs",
        "optimizer": {"strategy": "sa", "seed": 7},
        "model": {"kind": "knn", "survey_csv": "survey.csv", "k": 5},
        "customers": [
            {
                "id": "c1", "tau": 0.75,
                "image_path": "images/c1.ppm",
                "annotations_path": "annotations/c1.json",
                "repository_manifest": "repo/manifest.json",
                "q": 2, "levels": 4, "budget": 0.25,
                "weights": [0.3, 0.3, 0.4],
                "s_orig": 24.0, "r_orig": 300.0, "s_sent": 24.0, "r_sent": 300.0
            },
            {
                "id": "c2", "tau": 0.6,
                "image_path": "images/c2.ppm",
                "annotations_path": "annotations/c2.json",
                "repository_manifest": "repo/manifest.json",
                "q": 1, "levels": 4, "budget": 0.2,
                "weights": [0.25, 0.25, 0.5],
                "s_orig": 18.0, "r_orig": 300.0, "s_sent": 18.0, "r_sent": 240.0
            },
            {
                "id": "c3", "tau": 0.85,
                "image_path": "images/c3.pgm",
                "annotations_path": "annotations/c3.json",
                "repository_manifest": "repo/manifest.json",
                "levels": 4, "budget": 0.3,
                "weights": [0.4, 0.3, 0.3],
                "s_orig": 12.0, "r_orig": 300.0, "s_sent": 12.0, "r_sent": 300.0
            }
        ]
    });
    std::fs::write(
        root.join("scenario.json"),
        serde_json::to_string_pretty(&scenario).unwrap(),
    )
    .unwrap();

    // a small analytic-route scenario used by CLI tests
    let scenario_n2 = serde_json::json!({
        "bandwidth_bits_per_s": 4000000.0,
        "objective": "max_abs",
        "optimizer": {"strategy": "ga", "seed": 3},
        "model": {"kind": "parametric", "delta_half": 3.0, "gamma": 2.0},
        "customers": [
            {
                "id": "a", "tau": 0.8, "file_bits": 8000000.0,
                "weights": [0.3, 0.3, 0.4],
                "s_orig": 24.0, "r_orig": 300.0, "s_sent": 24.0, "r_sent": 300.0
            },
            {
                "id": "b", "tau": 0.5, "file_bits": 2000000.0,
                "weights": [0.3, 0.3, 0.4],
                "s_orig": 24.0, "r_orig": 300.0, "s_sent": 20.0, "r_sent": 300.0
            }
        ]
    });
    std::fs::write(
        root.join("scenario_n2.json"),
        serde_json::to_string_pretty(&scenario_n2).unwrap(),
    )
    .unwrap();

    println!("assets written to {}", root.display());
}
