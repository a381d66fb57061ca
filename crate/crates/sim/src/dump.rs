//! Optional dataset persistence: a directory of CSV files plus a
//! `manifest.json` echoing the full configuration and seed. Datasets are
//! regenerable from the seed, so nothing is written unless asked.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::dataset::Dataset;
use crate::Result;

fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:.16e}", m[(i, j)]))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes `E.csv`, `xi.csv`, `tokens.csv`, `C.csv` and `manifest.json` under
/// `dir`, creating it if needed.
pub fn dump_dataset(dir: &Path, data: &Dataset, trial: u64) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_matrix_csv(&dir.join("E.csv"), &data.embeddings)?;
    write_matrix_csv(&dir.join("xi.csv"), &data.xi)?;
    write_matrix_csv(&dir.join("C.csv"), &data.pooled)?;

    let t = data.config.t;
    let mut out = BufWriter::new(fs::File::create(dir.join("tokens.csv"))?);
    for row in 0..data.config.samples {
        let cells: Vec<String> = (0..t)
            .map(|c| data.tokens[row * t + c].to_string())
            .collect();
        writeln!(out, "{}", cells.join(","))?;
    }

    let manifest = serde_json::json!({
        "config": data.config,
        "seed": data.config.seed,
        "trial": trial,
    });
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CorrSpec, SimConfig, WeightSpec};
    use crate::dataset::generate;

    #[test]
    fn dump_writes_all_files() {
        let cfg = SimConfig {
            d: 8,
            vocab: 12,
            samples: 10,
            t: 3,
            mu_norm: 1.0,
            r: CorrSpec::Prefix { len: 2 },
            weights: WeightSpec::Mean,
            noise: Default::default(),
            xi_mode: Default::default(),
            center_classes: true,
            seed: 4,
            trials: 1,
        };
        let data = generate(&cfg, 0).unwrap();
        let dir = std::env::temp_dir().join(format!("attnspec-dump-{}", std::process::id()));
        dump_dataset(&dir, &data, 0).unwrap();
        for f in ["E.csv", "xi.csv", "tokens.csv", "C.csv", "manifest.json"] {
            assert!(dir.join(f).exists(), "{f} missing");
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["seed"], 4);
        assert_eq!(manifest["config"]["d"], 8);
        std::fs::remove_dir_all(&dir).ok();
    }
}
