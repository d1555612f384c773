//! Contact sheets: one row per sample holding the mixed input followed by its
//! ground truths in component order.

use std::path::Path;

use crate::error::{Error, Result};
use crate::imgcore::{load_image, resize_bilinear, ImageBuffer};
use crate::manifest::MixManifest;

/// Builds a sheet from the first `k` samples in sample-id order. The sheet is
/// `(1 + L_max)` tiles wide, where `L_max` is the largest number of selected
/// components among the chosen rows; unused cells are black.
pub fn contact_sheet(manifests: &[MixManifest], dataset_root: &Path, k: usize) -> Result<ImageBuffer> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let mut chosen: Vec<&MixManifest> = manifests.iter().collect();
    chosen.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
    chosen.truncate(k);
    let first = chosen.first().ok_or(Error::EmptyInput("no samples to preview"))?;
    let tile = load_image(dataset_root.join(&first.mixed))?;
    let (tw, th) = (tile.width(), tile.height());
    let cols = 1 + chosen.iter().map(|m| m.ground_truths.len()).max().unwrap_or(0);
    let mut sheet = ImageBuffer::filled(cols * tw, chosen.len() * th, 3, 0.0);
    for (row, m) in chosen.iter().enumerate() {
        let mut paths = vec![&m.mixed];
        let mut gts: Vec<_> = m.ground_truths.iter().collect();
        gts.sort_by_key(|g| g.index);
        paths.extend(gts.iter().map(|g| &g.path));
        for (col, rel) in paths.into_iter().enumerate() {
            let mut img = load_image(dataset_root.join(rel))?.to_rgb();
            if img.width() != tw || img.height() != th {
                img = resize_bilinear(&img, tw, th)?;
            }
            for y in 0..th {
                for x in 0..tw {
                    for c in 0..3 {
                        sheet.set(col * tw + x, row * th + y, c, img.get(x, y, c));
                    }
                }
            }
        }
    }
    Ok(sheet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgcore::save_image;
    use crate::manifest::{read_manifests, GroundTruthEntry};
    use crate::scenario::ComponentKind;
    use crate::scenario::Task;
    use crate::synth::{run_synth, ComponentSource, RunConfig};
    use crate::weather::Mode;

    fn dataset(root: &Path) -> Vec<MixManifest> {
        for (d, v) in [("a", 0.2f32), ("b", 0.6)] {
            save_image(&ImageBuffer::filled(12, 12, 3, v), root.join(format!("{d}/x.png"))).unwrap();
        }
        let cfg = RunConfig {
            task: Task::Task1,
            mode: Mode::Test,
            master_seed: 3,
            samples: 8,
            size: 12,
            output: root.join("data"),
            background_dir: None,
            components: ["a", "b"]
                .iter()
                .map(|n| ComponentSource {
                    name: n.to_string(),
                    dir: Some(root.join(n)),
                })
                .collect(),
            probs: Some(vec![0.5, 0.5]),
            mixing_order: None,
            cases: None,
            haze_intensity: None,
            atmosphere_range: None,
            raindrop: None,
            vignette_strength: None,
            augment: false,
        };
        read_manifests(&run_synth(&cfg, 1).unwrap().manifest).unwrap()
    }

    #[test]
    fn single_row_layout() {
        let dir = tempfile::tempdir().unwrap();
        let manifests = dataset(dir.path());
        let sheet = contact_sheet(&manifests, &dir.path().join("data"), 1).unwrap();
        let first = manifests.iter().min_by(|a, b| a.sample_id.cmp(&b.sample_id)).unwrap();
        assert_eq!(sheet.height(), 12);
        assert_eq!(sheet.width(), 12 * (1 + first.ground_truths.len()));
    }

    #[test]
    fn width_follows_largest_case_and_order_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let manifests = dataset(dir.path());
        let root = dir.path().join("data");
        let sheet = contact_sheet(&manifests, &root, 8).unwrap();
        let l_max = manifests.iter().map(|m| m.case.len()).max().unwrap();
        assert_eq!(sheet.width(), 12 * (1 + l_max));
        assert_eq!(sheet.height(), 12 * 8);
        let mut rev = manifests.clone();
        rev.reverse();
        assert_eq!(contact_sheet(&rev, &root, 8).unwrap(), sheet);
        assert!(contact_sheet(&manifests, &root, 0).is_err());
    }

    #[test]
    fn missing_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifests = dataset(dir.path());
        manifests[0].ground_truths.push(GroundTruthEntry {
            index: 9,
            name: "ghost".into(),
            kind: ComponentKind::ImageDomain,
            path: "gt/none.png".into(),
        });
        assert!(contact_sheet(&manifests, &dir.path().join("data"), 1).is_err());
    }
}
