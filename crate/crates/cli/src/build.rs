//! Graph construction and synthetic inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Args, ValueEnum};
use mvsp::analysis::write_labels;
use mvsp::builder::{
    build_graph as build, compute_signatures, mesh, pairwise_distances, percentile_sorted, BuilderConfig, ShapeRecord,
    PRESETS,
};
use mvsp::synth;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{create_dir, emit};

/// Where the shapes come from.
#[derive(Args, Debug)]
pub struct ShapeInputs {
    /// Mesh files (.off or .obj); each file stem becomes a node name.
    meshes: Vec<PathBuf>,

    /// Also read every .off/.obj file in this directory, in name order.
    #[arg(long)]
    mesh_dir: Option<PathBuf>,

    /// Directory of per-vertex feature CSVs named `<stem>.csv`. Shapes
    /// without a file fall back to the built-in descriptor.
    #[arg(long)]
    features_dir: Option<PathBuf>,
}

/// Builder parameters: defaults, then a config file or preset, then flags.
#[derive(Args, Debug)]
pub struct ConfigArgs {
    /// Builder configuration JSON (camelCase BuilderConfig fields).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Named dataset preset (n = 28 with the preset's p and sigma).
    #[arg(long, value_parser = PossibleValuesParser::new(PRESETS.iter().map(|p| p.0)))]
    preset: Option<String>,

    /// Clusters per shape (edge-matrix dimension).
    #[arg(long)]
    n: Option<usize>,

    /// Percentile levels per cluster summary.
    #[arg(long)]
    p: Option<usize>,

    /// Gaussian kernel bandwidth, in raw cluster-distance units.
    #[arg(long)]
    sigma: Option<f64>,

    /// Histogram bins of the built-in descriptor.
    #[arg(long)]
    descriptor_bins: Option<usize>,

    /// k-means restarts per shape.
    #[arg(long)]
    kmeans_restarts: Option<usize>,

    /// Sinkhorn stopping tolerance on the largest marginal deviation.
    #[arg(long)]
    sinkhorn_tol: Option<f64>,

    /// Sinkhorn sweep cap.
    #[arg(long)]
    sinkhorn_max_iter: Option<usize>,

    /// Require feature files for every shape.
    #[arg(long)]
    no_builtin_descriptor: bool,
}

impl ConfigArgs {
    fn resolve(&self, seed: Option<u64>) -> Result<BuilderConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                BuilderConfig::from_json_str(&text).with_context(|| format!("config {}", path.display()))?
            }
            (None, Some(name)) => BuilderConfig::preset(name)?,
            (None, None) => BuilderConfig::default(),
        };
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.descriptor_bins {
            cfg.descriptor_bins = v;
        }
        if let Some(v) = self.kmeans_restarts {
            cfg.kmeans_restarts = v;
        }
        if let Some(v) = self.sinkhorn_tol {
            cfg.sinkhorn_tol = v;
        }
        if let Some(v) = self.sinkhorn_max_iter {
            cfg.sinkhorn_max_iter = v;
        }
        if self.no_builtin_descriptor {
            cfg.builtin_descriptor = false;
        }
        if let Some(s) = seed {
            cfg.kmeans_seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn is_mesh(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("off") || e.eq_ignore_ascii_case("obj"))
}

/// Mesh files from a directory, sorted by file name.
pub fn meshes_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    for entry in std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_file() && is_mesh(&path) {
            found.push(path);
        }
    }
    found.sort();
    Ok(found)
}

impl ShapeInputs {
    fn load(&self) -> Result<Vec<ShapeRecord>> {
        let mut paths = self.meshes.clone();
        if let Some(dir) = &self.mesh_dir {
            paths.extend(meshes_in(dir)?);
        }
        if paths.is_empty() {
            bail!(mvsp::Error::Usage("no meshes given (pass files or --mesh-dir)".into()));
        }
        paths
            .iter()
            .map(|p| {
                let features = self.features_dir.as_ref().and_then(|dir| {
                    let stem = p.file_stem()?;
                    let csv = dir.join(stem).with_extension("csv");
                    csv.is_file().then_some(csv)
                });
                Ok(ShapeRecord::load(p, features.as_deref())?)
            })
            .collect()
    }
}

#[derive(Args, Debug)]
pub struct BuildGraphArgs {
    #[command(flatten)]
    shapes: ShapeInputs,

    #[command(flatten)]
    config: ConfigArgs,

    /// Output graph JSON.
    #[arg(long)]
    out: PathBuf,

    /// Also write the effective builder configuration here.
    #[arg(long)]
    emit_config: Option<PathBuf>,
}

pub fn build_graph(args: BuildGraphArgs, seed: Option<u64>) -> Result<()> {
    let cfg = args.config.resolve(seed)?;
    let shapes = args.shapes.load()?;
    let graph = build(&shapes, &cfg)?;
    graph.write_json(&args.out)?;
    if let Some(path) = &args.emit_config {
        emit(Some(path), &(cfg.to_json_string() + "\n"))?;
    }
    println!(
        "{} shapes, edge dimension {}, wrote {}",
        graph.len(),
        graph.dim(),
        args.out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct DistanceStatsArgs {
    #[command(flatten)]
    shapes: ShapeInputs,

    #[command(flatten)]
    config: ConfigArgs,
}

pub fn distance_stats(args: DistanceStatsArgs, seed: Option<u64>) -> Result<()> {
    let cfg = args.config.resolve(seed)?;
    let shapes = args.shapes.load()?;
    if shapes.len() < 2 {
        bail!(mvsp::Error::InvalidInput("need at least two shapes".into()));
    }
    let sorted = pairwise_distances(&compute_signatures(&shapes, &cfg)?)?;
    println!("count {}", sorted.len());
    for (label, level) in [
        ("min", 0.0),
        ("p05", 5.0),
        ("p25", 25.0),
        ("median", 50.0),
        ("p75", 75.0),
        ("p95", 95.0),
        ("max", 100.0),
    ] {
        println!("{label} {}", percentile_sorted(&sorted, level));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MeshFormat {
    Off,
    Obj,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output directory for the meshes and `labels.csv`.
    #[arg(long)]
    out_dir: PathBuf,

    /// Number of shape families (at most the number of built-in families).
    #[arg(long, default_value_t = 3)]
    families: usize,

    /// Shapes per family.
    #[arg(long, default_value_t = 5)]
    per_family: usize,

    /// Latitude rings of the base sphere mesh.
    #[arg(long, default_value_t = 12)]
    rings: usize,

    /// Longitude segments of the base sphere mesh.
    #[arg(long, default_value_t = 16)]
    segments: usize,

    #[arg(long, value_enum, default_value_t = MeshFormat::Off)]
    format: MeshFormat,
}

pub fn synth(args: SynthArgs, seed: u64) -> Result<()> {
    if args.families == 0 || args.families > synth::FAMILY_COUNT {
        bail!(mvsp::Error::Usage(format!(
            "--families must be between 1 and {}",
            synth::FAMILY_COUNT
        )));
    }
    if args.per_family == 0 || args.rings < 2 || args.segments < 3 {
        bail!(mvsp::Error::Usage(
            "need --per-family >= 1, --rings >= 2 and --segments >= 3".into()
        ));
    }
    create_dir(&args.out_dir)?;
    let collection = synth::synthetic_collection(args.families, args.per_family, args.rings, args.segments, seed);
    let mut labels = BTreeMap::new();
    for (shape, label) in &collection {
        let faces = shape.faces.as_deref().unwrap_or(&[]);
        match args.format {
            MeshFormat::Off => mesh::write_off(args.out_dir.join(format!("{}.off", shape.id)), &shape.vertices, faces)?,
            MeshFormat::Obj => mesh::write_obj(args.out_dir.join(format!("{}.obj", shape.id)), &shape.vertices, faces)?,
        }
        labels.insert(shape.id.clone(), label.clone());
    }
    write_labels(args.out_dir.join("labels.csv"), &labels)?;
    println!(
        "{} shapes in {} families, wrote {}",
        collection.len(),
        args.families,
        args.out_dir.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct RandomGraphArgs {
    /// Number of nodes.
    #[arg(long)]
    nodes: usize,

    /// Edge-matrix dimension.
    #[arg(long, default_value_t = 28)]
    dim: usize,

    /// Each edge's peakedness is drawn uniformly from [0, beta-max); larger
    /// values give less ambiguous matrices.
    #[arg(long, default_value_t = 3.0)]
    beta_max: f64,

    /// Scalar 1x1 edges with uniform weights instead of matrices.
    #[arg(long)]
    scalar: bool,

    /// Smallest scalar weight (exclusive).
    #[arg(long, default_value_t = 0.0, requires = "scalar")]
    min_weight: f64,

    /// Largest scalar weight.
    #[arg(long, default_value_t = 10.0, requires = "scalar")]
    max_weight: f64,

    /// Output graph JSON.
    #[arg(long)]
    out: PathBuf,
}

pub fn random_graph(args: RandomGraphArgs, seed: u64) -> Result<()> {
    if args.nodes == 0 || args.dim == 0 {
        bail!(mvsp::Error::Usage("--nodes and --dim must be positive".into()));
    }
    if !(args.beta_max >= 0.0) || !(args.min_weight >= 0.0 && args.min_weight < args.max_weight) {
        bail!(mvsp::Error::Usage(
            "need --beta-max >= 0 and 0 <= --min-weight < --max-weight".into()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = if args.scalar {
        synth::random_scalar_graph(args.nodes, args.min_weight, args.max_weight, &mut rng)?
    } else {
        synth::random_graph(args.nodes, args.dim, args.beta_max, &mut rng)?
    };
    graph.write_json(&args.out)?;
    println!(
        "{} nodes, edge dimension {}, wrote {}",
        graph.len(),
        graph.dim(),
        args.out.display()
    );
    Ok(())
}
