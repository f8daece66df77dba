//! Regenerates the ViT-Base spec fixtures: `cargo run -p costlens --example write_fixtures`.

use costlens_cli::specfile::SpecFile;
use costlens_core::archlib::{build_vit, VitConfig};

/// (patch, reported million params, reported GFLOPs, reported msec/example)
const REPORTED: [(u64, &str, &str, &str); 4] = [
    (8, "86.5", "78.54", "7.17"),
    (16, "86.6", "17.63", "1.30"),
    (32, "88.2", "4.42", "0.39"),
    (64, "95.3", "0.93", "0.11"),
];

fn main() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    for (patch, mparams, gflops, msec) in REPORTED {
        let mut arch = build_vit(&VitConfig::base(patch)).unwrap();
        arch.metadata.insert(
            "source".into(),
            format!(
                "ViT-Base/{patch} on 224x224x3 images. Reported: {mparams}M params, {gflops} GFLOPs \
                 (multiply-accumulates), {msec} msec/example on 64 TPUv3 cores."
            ),
        );
        let mut file = SpecFile::inline(arch);
        file.family = Some("vit-base".into());
        let mut text = serde_json::to_string_pretty(&file).unwrap();
        text.push('\n');
        std::fs::write(dir.join(format!("vit_b{patch}.json")), text).unwrap();
    }
}
