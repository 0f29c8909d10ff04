//! OFF / OBJ triangle meshes and per-vertex feature CSV files.
//!
//! Polygons with more than three corners are fan-triangulated. OBJ records
//! other than `v` and `f` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::{Error, Result};

pub type Vertices = Vec<[f64; 3]>;
pub type Faces = Vec<[usize; 3]>;

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a mesh, choosing the parser from the file extension.
pub fn read_mesh(path: impl AsRef<Path>) -> Result<(Vertices, Faces)> {
    let path = path.as_ref();
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let text = read_text(path)?;
    match ext.as_deref() {
        Some("off") => parse_off(&text, path),
        Some("obj") => parse_obj(&text, path),
        _ => Err(Error::InvalidInput(format!(
            "{}: unsupported mesh format (expected .off or .obj)",
            path.display()
        ))),
    }
}

pub fn parse_off(text: &str, path: &Path) -> Result<(Vertices, Faces)> {
    // (line number, tokens) with comments and blank lines dropped
    let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
    });
    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if header[0] != "OFF" {
        return Err(parse_err(path, ln, "missing OFF header"));
    }
    let counts = if header.len() > 1 {
        (ln, header[1..].to_vec())
    } else {
        lines
            .next()
            .ok_or_else(|| parse_err(path, ln, "missing element counts"))?
    };
    let parse_usize = |ln: usize, s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_err(path, ln, format!("expected a count, found `{s}`")))
    };
    if counts.1.len() < 2 {
        return Err(parse_err(path, counts.0, "expected vertex and face counts"));
    }
    let nv = parse_usize(counts.0, counts.1[0])?;
    let nf = parse_usize(counts.0, counts.1[1])?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, tok) = lines
            .next()
            .ok_or_else(|| parse_err(path, 0, format!("expected {nv} vertices")))?;
        if tok.len() < 3 {
            return Err(parse_err(path, ln, "vertex needs three coordinates"));
        }
        let mut p = [0.0; 3];
        for k in 0..3 {
            p[k] = tok[k]
                .parse::<f64>()
                .map_err(|_| parse_err(path, ln, format!("bad coordinate `{}`", tok[k])))?;
        }
        vertices.push(p);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, tok) = lines
            .next()
            .ok_or_else(|| parse_err(path, 0, format!("expected {nf} faces")))?;
        let k = parse_usize(ln, tok[0])?;
        if k < 3 || tok.len() < k + 1 {
            return Err(parse_err(path, ln, "face needs at least three indices"));
        }
        let idx = tok[1..=k]
            .iter()
            .map(|s| {
                let i = parse_usize(ln, s)?;
                if i >= nv {
                    return Err(parse_err(path, ln, format!("vertex index {i} out of range")));
                }
                Ok(i)
            })
            .collect::<Result<Vec<_>>>()?;
        for j in 1..k - 1 {
            faces.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    Ok((vertices, faces))
}

pub fn parse_obj(text: &str, path: &Path) -> Result<(Vertices, Faces)> {
    let mut vertices = Vec::new();
    let mut polygons: Vec<(usize, Vec<i64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let coords = tok
                    .take(3)
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| parse_err(path, ln, format!("bad coordinate `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if coords.len() != 3 {
                    return Err(parse_err(path, ln, "vertex needs three coordinates"));
                }
                vertices.push([coords[0], coords[1], coords[2]]);
            }
            Some("f") => {
                let idx = tok
                    .map(|s| {
                        let head = s.split('/').next().unwrap_or("");
                        head.parse::<i64>()
                            .map_err(|_| parse_err(path, ln, format!("bad face index `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(path, ln, "face needs at least three indices"));
                }
                // negative indices are relative to the vertices read so far
                let seen = vertices.len() as i64;
                let resolved = idx.into_iter().map(|k| if k < 0 { seen + k + 1 } else { k }).collect();
                polygons.push((ln, resolved));
            }
            _ => {}
        }
    }
    let nv = vertices.len() as i64;
    let mut faces = Vec::new();
    for (ln, poly) in polygons {
        if let Some(bad) = poly.iter().find(|&&k| k < 1 || k > nv) {
            return Err(parse_err(path, ln, format!("vertex index {bad} out of range")));
        }
        let idx: Vec<usize> = poly.iter().map(|&k| (k - 1) as usize).collect();
        for j in 1..idx.len() - 1 {
            faces.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    Ok((vertices, faces))
}

pub fn obj_string(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut out = String::with_capacity(vertices.len() * 40 + faces.len() * 20);
    for p in vertices {
        let _ = writeln!(out, "v {:.17e} {:.17e} {:.17e}", p[0], p[1], p[2]);
    }
    for f in faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

pub fn off_string(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut out = format!("OFF\n{} {} 0\n", vertices.len(), faces.len());
    for p in vertices {
        let _ = writeln!(out, "{:.17e} {:.17e} {:.17e}", p[0], p[1], p[2]);
    }
    for f in faces {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

pub fn write_obj(path: impl AsRef<Path>, vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, obj_string(vertices, faces)).map_err(|e| Error::io(path, e))
}

pub fn write_off(path: impl AsRef<Path>, vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, off_string(vertices, faces)).map_err(|e| Error::io(path, e))
}

/// One row per vertex, one column per feature dimension. A first row that
/// does not parse as numbers is taken as a header.
pub fn read_features_csv(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(path, 0, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, i + 1, e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(parse_err(path, i + 1, e.to_string())),
        }
    }
    let f = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || f == 0 {
        return Err(parse_err(path, 1, "no feature rows"));
    }
    let mut out = Array2::zeros((rows.len(), f));
    for (i, row) in rows.iter().enumerate() {
        if row.len() != f {
            return Err(parse_err(
                path,
                i + 1,
                format!("expected {f} columns, found {}", row.len()),
            ));
        }
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(parse_err(path, i + 1, format!("non-finite value {x}")));
            }
            out[[i, j]] = x;
        }
    }
    Ok(out)
}

pub fn write_features_csv(path: impl AsRef<Path>, features: &Array2<f64>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for row in features.rows() {
        let line: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_with_quads_and_comments() {
        let text = "OFF\n# a unit square\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        let (v, f) = parse_off(text, Path::new("sq.off")).unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(f, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_ignores_other_records_and_resolves_negative_indices() {
        let text = "# test\nv 0 0 0\nv 1 0 0\nvn 0 0 1\nv 0 1 0\nvt 0 0\nf 1/1/1 2/2/1 3/3/1\nf -3 -2 -1\ng group\n";
        let (v, f) = parse_obj(text, Path::new("t.obj")).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(f, vec![[0, 1, 2], [0, 1, 2]]);
    }

    #[test]
    fn malformed_inputs_report_line_numbers() {
        let err = parse_off("OFF\n1 0 0\n0 zero 0\n", Path::new("x.off")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_obj("v 0 0 0\nf 1 2 3\n", Path::new("x.obj")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn writers_round_trip_exactly() {
        let v = vec![[0.1, -2.5e-7, 3.0], [1.0 / 3.0, 2.0, 1e10], [0.0, 0.0, -1.0]];
        let f = vec![[0, 1, 2]];
        assert_eq!(
            parse_obj(&obj_string(&v, &f), Path::new("a.obj")).unwrap(),
            (v.clone(), f.clone())
        );
        assert_eq!(parse_off(&off_string(&v, &f), Path::new("a.off")).unwrap(), (v, f));
    }

    #[test]
    fn features_csv_with_optional_header() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        std::fs::write(&a, "f0,f1\n1,2\n3,4.5\n").unwrap();
        let m = read_features_csv(&a).unwrap();
        assert_eq!(m, ndarray::array![[1.0, 2.0], [3.0, 4.5]]);
        let b = dir.path().join("b.csv");
        std::fs::write(&b, "1,2\n3,x\n").unwrap();
        assert!(read_features_csv(&b).is_err());
    }
}
