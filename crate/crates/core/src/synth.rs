//! Seeded synthetic inputs: random doubly-stochastic graphs, scalar graphs
//! and families of deformed ellipsoid meshes sharing one topology.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::builder::{sinkhorn_normalize, ShapeRecord};
use crate::graph::MatrixGraph;
use crate::matrix::EdgeMatrix;
use crate::Result;

/// Sinkhorn-scaled `exp(beta * z)` with standard normal `z`. Larger `beta`
/// gives more peaked (lower entropy) matrices.
pub fn random_doubly_stochastic<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> Result<EdgeMatrix> {
    let raw = Array2::from_shape_fn((n, n), |_| {
        let z: f64 = StandardNormal.sample(rng);
        (beta * z).exp()
    });
    sinkhorn_normalize(&raw, 1e-13, 1_000_000)
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

/// Zero-padded names `n0`, `n1`, ... that sort in index order.
pub fn node_names(count: usize) -> Vec<String> {
    let width = count.saturating_sub(1).to_string().len();
    (0..count).map(|i| format!("n{i:0width$}")).collect()
}

/// Complete graph with independent random edges; each edge draws its
/// peakedness uniformly from `[0, beta_max)`.
pub fn random_graph<R: Rng + ?Sized>(nodes: usize, dim: usize, beta_max: f64, rng: &mut R) -> Result<MatrixGraph> {
    MatrixGraph::from_fn(dim, node_names(nodes), |_, _| {
        let beta = rng.random::<f64>() * beta_max;
        random_doubly_stochastic(dim, beta, rng)
    })
}

/// Complete graph of `1 x 1` edges with weights uniform in `(lo, hi]`.
pub fn random_scalar_graph<R: Rng + ?Sized>(nodes: usize, lo: f64, hi: f64, rng: &mut R) -> Result<MatrixGraph> {
    MatrixGraph::from_fn(1, node_names(nodes), |_, _| {
        let u: f64 = rng.random();
        EdgeMatrix::scalar(hi - u * (hi - lo))
    })
}

/// Latitude/longitude sphere: two poles plus `rings x segments` vertices.
pub fn uv_sphere(rings: usize, segments: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let mut v = vec![[0.0, 0.0, 1.0]];
    for r in 0..rings {
        let theta = std::f64::consts::PI * (r + 1) as f64 / (rings + 1) as f64;
        for s in 0..segments {
            let phi = 2.0 * std::f64::consts::PI * s as f64 / segments as f64;
            v.push([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]);
        }
    }
    v.push([0.0, 0.0, -1.0]);
    let south = v.len() - 1;
    let at = |r: usize, s: usize| 1 + r * segments + s % segments;
    let mut f = Vec::new();
    for s in 0..segments {
        f.push([0, at(0, s), at(0, s + 1)]);
    }
    for r in 0..rings.saturating_sub(1) {
        for s in 0..segments {
            f.push([at(r, s), at(r + 1, s), at(r + 1, s + 1)]);
            f.push([at(r, s), at(r + 1, s + 1), at(r, s + 1)]);
        }
    }
    for s in 0..segments {
        f.push([south, at(rings - 1, s + 1), at(rings - 1, s)]);
    }
    (v, f)
}

/// A family prototype: an ellipsoid whose surface is pushed out by a few
/// Gaussian bumps. The bumps break the symmetries of the bare ellipsoid, so
/// every region of the surface is distinguishable.
struct Family {
    axes: [f64; 3],
    /// (unit direction, height, angular width)
    bumps: &'static [([f64; 3], f64, f64)],
}

const FAMILIES: &[Family] = &[
    Family {
        axes: [1.0, 1.0, 1.0],
        bumps: &[([0.0, 0.0, 1.0], 0.8, 0.5)],
    },
    Family {
        axes: [0.7, 0.7, 2.2],
        bumps: &[([1.0, 0.0, 0.0], 0.7, 0.45), ([0.0, 0.0, -1.0], 0.3, 0.6)],
    },
    Family {
        axes: [1.5, 1.5, 0.45],
        bumps: &[([1.0, 0.0, 0.0], 0.5, 0.5), ([0.0, 1.0, 0.0], 0.25, 0.4)],
    },
    Family {
        axes: [1.0, 1.0, 1.0],
        bumps: &[
            ([1.0, 0.0, 0.0], 0.6, 0.35),
            ([-0.6, 0.8, 0.0], 0.6, 0.35),
            ([0.0, 0.0, 1.0], 0.3, 0.5),
        ],
    },
    Family {
        axes: [1.6, 1.0, 0.6],
        bumps: &[([0.0, 0.0, -1.0], 0.9, 0.4)],
    },
];

/// Number of distinct family prototypes; family indices wrap around.
pub const FAMILY_COUNT: usize = FAMILIES.len();

fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> [[f64; 3]; 3] {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let tau = 2.0 * std::f64::consts::PI;
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (w, x, y, z) = (
        a * (tau * u2).sin(),
        a * (tau * u2).cos(),
        b * (tau * u3).sin(),
        b * (tau * u3).cos(),
    );
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// `count` randomly posed, scaled and slightly jittered members of one
/// family. Every member has the same vertex count and face list.
pub fn shape_family_members(family: usize, count: usize, rings: usize, segments: usize, seed: u64) -> Vec<ShapeRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (family as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let proto = &FAMILIES[family % FAMILIES.len()];
    let (sphere, faces) = uv_sphere(rings, segments);
    (0..count)
        .map(|m| {
            let jitter: Vec<f64> = (0..3).map(|_| 1.0 + rng.random_range(-0.04..0.04)).collect();
            let rot = random_rotation(&mut rng);
            let scale = rng.random_range(0.5..2.0);
            let shift: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let vertices = sphere
                .iter()
                .map(|p| {
                    let push: f64 = proto
                        .bumps
                        .iter()
                        .map(|(d, h, w)| {
                            let d2: f64 = (0..3).map(|c| (p[c] - d[c]).powi(2)).sum();
                            h * (-d2 / (w * w)).exp()
                        })
                        .sum();
                    let local: [f64; 3] = std::array::from_fn(|c| p[c] * (1.0 + push) * proto.axes[c] * jitter[c]);
                    let mut out = [0.0; 3];
                    for (r, o) in out.iter_mut().enumerate() {
                        let noise: f64 = StandardNormal.sample(&mut rng);
                        *o = scale * ((0..3).map(|c| rot[r][c] * local[c]).sum::<f64>() + 0.005 * noise) + shift[r];
                    }
                    out
                })
                .collect();
            ShapeRecord::new(format!("f{family}_m{m}"), vertices).with_faces(faces.clone())
        })
        .collect()
}

/// `families x per_family` shapes with their family labels.
pub fn synthetic_collection(
    families: usize,
    per_family: usize,
    rings: usize,
    segments: usize,
    seed: u64,
) -> Vec<(ShapeRecord, String)> {
    (0..families)
        .flat_map(|f| {
            shape_family_members(f, per_family, rings, segments, seed)
                .into_iter()
                .map(move |s| (s, format!("family{f}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_matrices_are_doubly_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..8 {
            let m = random_doubly_stochastic(n, 2.5, &mut rng).unwrap();
            assert!(m.max_marginal_deviation() < 1e-12);
        }
    }

    #[test]
    fn permutations_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut p = random_permutation(9, &mut rng);
        p.sort();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn names_sort_in_index_order() {
        let names = node_names(12);
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names[3], "n03");
    }

    #[test]
    fn sphere_topology() {
        let (v, f) = uv_sphere(4, 6);
        assert_eq!(v.len(), 2 + 24);
        assert_eq!(f.len(), 2 * 6 + 2 * 3 * 6);
        assert!(f.iter().flatten().all(|&i| i < v.len()));
    }

    #[test]
    fn family_members_share_faces() {
        let shapes = shape_family_members(1, 3, 5, 8, 7);
        assert_eq!(shapes.len(), 3);
        assert!(shapes.iter().all(|s| s.faces == shapes[0].faces));
        assert_ne!(shapes[0].vertices, shapes[1].vertices);
    }
}
