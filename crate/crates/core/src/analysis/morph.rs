//! Piecewise-linear morphing through a sequence of keyframe shapes that
//! share one vertex ordering.

use std::path::Path as FsPath;

use serde_json::json;

use crate::builder::mesh::{obj_string, Faces, Vertices};
use crate::builder::ShapeRecord;
use crate::cost::PathCost;
use crate::graph::{MatrixGraph, Path};
use crate::{Error, Result};

pub const DEFAULT_FRAME_COUNT: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct MorphSequence {
    pub keyframe_ids: Vec<String>,
    pub placements: Vec<f64>,
    pub faces: Option<Faces>,
    pub times: Vec<f64>,
    pub frames: Vec<Vertices>,
    /// Direct source-to-target blend at the same times, for comparison.
    pub naive: Vec<Vertices>,
}

fn check_placements(placements: &[f64], keyframes: usize) -> Result<()> {
    if keyframes < 2 {
        return Err(Error::InvalidInput("morphing needs at least two keyframes".into()));
    }
    if placements.len() != keyframes {
        return Err(Error::InvalidInput(format!(
            "{} placements for {keyframes} keyframes",
            placements.len()
        )));
    }
    if placements[0] != 0.0 || placements[keyframes - 1] != 1.0 {
        return Err(Error::InvalidInput("placements must start at 0 and end at 1".into()));
    }
    if placements.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("placements must be strictly increasing".into()));
    }
    Ok(())
}

fn check_topology(keyframes: &[ShapeRecord]) -> Result<()> {
    let first = &keyframes[0];
    for k in &keyframes[1..] {
        if k.vertices.len() != first.vertices.len() {
            return Err(Error::InvalidInput(format!(
                "keyframe `{}` has {} vertices, `{}` has {}",
                k.id,
                k.vertices.len(),
                first.id,
                first.vertices.len()
            )));
        }
        if k.faces != first.faces {
            return Err(Error::InvalidInput(format!(
                "keyframe `{}` does not share the face list of `{}`",
                k.id, first.id
            )));
        }
    }
    Ok(())
}

fn blend(a: &[[f64; 3]], b: &[[f64; 3]], w: f64) -> Vertices {
    a.iter()
        .zip(b)
        .map(|(p, q)| std::array::from_fn(|c| (1.0 - w) * p[c] + w * q[c]))
        .collect()
}

/// Vertices at time `t`, clamped to `[0, 1]`. Times that coincide with a
/// placement return that keyframe unchanged.
pub fn frame_at(keyframes: &[ShapeRecord], placements: &[f64], t: f64) -> Vertices {
    let t = t.clamp(0.0, 1.0);
    if let Some(i) = placements.iter().position(|&p| p == t) {
        return keyframes[i].vertices.clone();
    }
    let b = placements
        .iter()
        .position(|&p| p > t)
        .expect("t lies below the last placement");
    let a = b - 1;
    let w = (t - placements[a]) / (placements[b] - placements[a]);
    blend(&keyframes[a].vertices, &keyframes[b].vertices, w)
}

/// Samples `frame_count` frames uniformly over `[0, 1]` (both ends
/// included).
pub fn morph(keyframes: &[ShapeRecord], placements: &[f64], frame_count: usize) -> Result<MorphSequence> {
    check_placements(placements, keyframes.len())?;
    check_topology(keyframes)?;
    if frame_count == 0 {
        return Err(Error::InvalidInput("frame count must be positive".into()));
    }
    let times: Vec<f64> = if frame_count == 1 {
        vec![0.0]
    } else {
        (0..frame_count).map(|i| i as f64 / (frame_count - 1) as f64).collect()
    };
    let ends = [keyframes[0].clone(), keyframes[keyframes.len() - 1].clone()];
    Ok(MorphSequence {
        keyframe_ids: keyframes.iter().map(|k| k.id.clone()).collect(),
        placements: placements.to_vec(),
        faces: keyframes[0].faces.clone(),
        frames: times.iter().map(|&t| frame_at(keyframes, placements, t)).collect(),
        naive: times.iter().map(|&t| frame_at(&ends, &[0.0, 1.0], t)).collect(),
        times,
    })
}

/// Placements proportional to the cumulative edge cost along `weights`
/// (one entry per consecutive keyframe pair). Falls back to uniform spacing
/// when some step has zero weight, since placements must strictly increase.
pub fn placements_from_weights(weights: &[f64]) -> Vec<f64> {
    let m = weights.len();
    if m == 0 {
        return vec![0.0];
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() || weights.iter().any(|&w| !(w > 0.0)) {
        return (0..=m).map(|i| i as f64 / m as f64).collect();
    }
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for &w in &weights[..m - 1] {
        acc += w;
        out.push(acc / total);
    }
    out.push(1.0);
    out
}

/// Default keyframe times for a path: cumulative cost of its direct edges.
pub fn default_placements(graph: &MatrixGraph, path: &Path, cost: &dyn PathCost) -> Result<Vec<f64>> {
    if path.nodes.len() < 2 {
        return Err(Error::InvalidInput("a morph path needs at least two shapes".into()));
    }
    let weights = path
        .nodes
        .windows(2)
        .map(|w| cost.evaluate(graph.edge(w[0], w[1])))
        .collect::<Result<Vec<_>>>()?;
    Ok(placements_from_weights(&weights))
}

impl MorphSequence {
    /// `frame_0000.obj`, ... plus `manifest.json`; with `naive`, the direct
    /// blend goes to `naive/frame_0000.obj`, ...
    pub fn write(&self, dir: impl AsRef<FsPath>, naive: bool) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let faces: &[[usize; 3]] = self.faces.as_deref().unwrap_or(&[]);
        let names: Vec<String> = (0..self.frames.len()).map(|i| format!("frame_{i:04}.obj")).collect();
        for (name, frame) in names.iter().zip(&self.frames) {
            let p = dir.join(name);
            std::fs::write(&p, obj_string(frame, faces)).map_err(|e| Error::io(&p, e))?;
        }
        if naive {
            let sub = dir.join("naive");
            std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
            for (name, frame) in names.iter().zip(&self.naive) {
                let p = sub.join(name);
                std::fs::write(&p, obj_string(frame, faces)).map_err(|e| Error::io(&p, e))?;
            }
        }
        let manifest = json!({
            "path": self.keyframe_ids,
            "placements": self.placements,
            "frameCount": self.frames.len(),
            "times": self.times,
            "frames": names,
        });
        let p = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        std::fs::write(&p, text).map_err(|e| Error::io(&p, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(id: &str, x: f64) -> ShapeRecord {
        ShapeRecord::new(id, vec![[x, 0.0, 1.0], [x + 1.0, 2.0, -1.0]]).with_faces(vec![[0, 1, 0]])
    }

    #[test]
    fn two_keyframes_midpoint_is_mean() {
        let keys = [key("a", 0.0), key("b", 4.0)];
        let mid = frame_at(&keys, &[0.0, 1.0], 0.5);
        assert_eq!(mid, vec![[2.0, 0.0, 1.0], [3.0, 2.0, -1.0]]);
    }

    #[test]
    fn endpoints_and_placements_are_exact() {
        let keys = [key("a", 0.1), key("b", 0.7), key("c", 3.3)];
        let pl = [0.0, 0.8, 1.0];
        let seq = morph(&keys, &pl, 7).unwrap();
        assert_eq!(seq.frames.len(), 7);
        assert_eq!(seq.frames[0], keys[0].vertices);
        assert_eq!(seq.frames[6], keys[2].vertices);
        assert_eq!(frame_at(&keys, &pl, 0.8), keys[1].vertices);
        assert_eq!(seq.naive[6], keys[2].vertices);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let keys = [key("a", 0.0), key("b", 1.0)];
        assert!(morph(&keys, &[0.0, 0.5], 3).is_err());
        assert!(morph(&keys, &[0.0], 3).is_err());
        assert!(morph(&keys, &[0.0, 1.0], 0).is_err());
        let odd = ShapeRecord::new("odd", vec![[0.0; 3]]);
        let err = morph(&[keys[0].clone(), odd], &[0.0, 1.0], 2).unwrap_err();
        assert!(err.to_string().contains("`odd`"), "{err}");
        let three = [key("a", 0.0), key("b", 1.0), key("c", 2.0)];
        assert!(morph(&three, &[0.0, 0.6, 0.6], 3).is_err());
    }

    #[test]
    fn weight_placements() {
        assert_eq!(placements_from_weights(&[2.0]), vec![0.0, 1.0]);
        assert_eq!(placements_from_weights(&[3.0, 3.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(placements_from_weights(&[1.0, 4.0]), vec![0.0, 0.2, 1.0]);
        assert_eq!(placements_from_weights(&[0.0, 0.0]), vec![0.0, 0.5, 1.0]);
        assert_eq!(
            placements_from_weights(&[0.0, 2.0, 2.0]),
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]
        );
    }
}
