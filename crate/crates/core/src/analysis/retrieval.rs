use std::collections::BTreeMap;
use std::path::Path as FsPath;

use super::distance::{nearest_neighbors, DistanceTable};
use crate::{Error, Result};

/// Nearest-neighbor retrieval quality per query and neighbor count.
///
/// `g[i][k - 1]` is the fraction of the `k` nearest neighbors of query `i`
/// that share its label, normalized by `min(m_i, k)` where `m_i` counts the
/// *other* members of the query's family. Queries without any other family
/// member have no defined score and are left out of the aggregates.
#[derive(Clone, Debug, PartialEq)]
pub struct RetrievalEval {
    pub nodes: Vec<String>,
    pub labels: Vec<String>,
    pub g: Vec<Option<Vec<f64>>>,
    pub mean: Vec<f64>,
    /// Population standard deviation over the scored queries.
    pub std: Vec<f64>,
}

impl RetrievalEval {
    pub fn max_k(&self) -> usize {
        self.mean.len()
    }

    /// Columns `k, mean_g, std_g`, one row per neighbor count.
    pub fn summary_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["k", "mean_g", "std_g"]).expect("in-memory write");
        for k in 1..=self.max_k() {
            w.write_record([k.to_string(), self.mean[k - 1].to_string(), self.std[k - 1].to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    /// Long format `query, k, g` over the scored queries.
    pub fn per_query_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["query", "k", "g"]).expect("in-memory write");
        for (i, row) in self.g.iter().enumerate() {
            let Some(row) = row else { continue };
            for (k, g) in row.iter().enumerate() {
                w.write_record([self.nodes[i].clone(), (k + 1).to_string(), g.to_string()])
                    .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

pub fn evaluate_retrieval(table: &DistanceTable, labels: &BTreeMap<String, String>) -> Result<RetrievalEval> {
    let n = table.len();
    if n < 2 {
        return Err(Error::InvalidInput("retrieval needs at least two shapes".into()));
    }
    let label_of: Vec<String> = table
        .nodes
        .iter()
        .map(|name| {
            labels
                .get(name)
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("no label for shape `{name}`")))
        })
        .collect::<Result<_>>()?;
    let max_k = n - 1;
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let m = label_of.iter().filter(|l| **l == label_of[i]).count() - 1;
        if m == 0 {
            g.push(None);
            continue;
        }
        let ranked = nearest_neighbors(table, i, max_k)?;
        let mut hits = 0usize;
        let row: Vec<f64> = ranked
            .iter()
            .enumerate()
            .map(|(idx, &j)| {
                hits += usize::from(label_of[j] == label_of[i]);
                hits as f64 / m.min(idx + 1) as f64
            })
            .collect();
        g.push(Some(row));
    }
    let scored: Vec<&Vec<f64>> = g.iter().flatten().collect();
    if scored.is_empty() {
        return Err(Error::InvalidInput(
            "every family has a single member; retrieval scores are undefined".into(),
        ));
    }
    let count = scored.len() as f64;
    let mean: Vec<f64> = (0..max_k)
        .map(|k| scored.iter().map(|r| r[k]).sum::<f64>() / count)
        .collect();
    let std = (0..max_k)
        .map(|k| {
            let var = scored.iter().map(|r| (r[k] - mean[k]).powi(2)).sum::<f64>() / count;
            var.sqrt()
        })
        .collect();
    Ok(RetrievalEval {
        nodes: table.nodes.clone(),
        labels: label_of,
        g,
        mean,
        std,
    })
}

/// Reads `shape,label` rows. A first row whose label column reads `label`
/// is taken as a header.
pub fn read_labels(path: impl AsRef<FsPath>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(0, e.to_string()))?;
    let mut out = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(i + 1, e.to_string()))?;
        if record.len() != 2 {
            return Err(parse_err(i + 1, "expected `shape,label`".into()));
        }
        if i == 0 && record[1].eq_ignore_ascii_case("label") {
            continue;
        }
        if out.insert(record[0].to_string(), record[1].to_string()).is_some() {
            return Err(parse_err(i + 1, format!("duplicate shape `{}`", &record[0])));
        }
    }
    Ok(out)
}

pub fn write_labels(path: impl AsRef<FsPath>, labels: &BTreeMap<String, String>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["shape", "label"]).expect("in-memory write");
    for (shape, label) in labels {
        w.write_record([shape, label]).expect("in-memory write");
    }
    std::fs::write(path, w.into_inner().expect("in-memory flush")).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_table(xs: &[f64]) -> DistanceTable {
        let n = xs.len();
        DistanceTable {
            nodes: (0..n).map(|i| format!("s{i}")).collect(),
            dist: (0..n)
                .map(|i| (0..n).map(|j| (xs[i] - xs[j]).abs()).collect())
                .collect(),
            paths: Vec::new(),
        }
    }

    fn labels(ls: &[&str]) -> BTreeMap<String, String> {
        ls.iter()
            .enumerate()
            .map(|(i, l)| (format!("s{i}"), l.to_string()))
            .collect()
    }

    #[test]
    fn one_family_scores_one_everywhere() {
        let t = line_table(&[0.0, 1.0, 3.0, 7.0]);
        let e = evaluate_retrieval(&t, &labels(&["a", "a", "a", "a"])).unwrap();
        assert!(e.g.iter().flatten().flatten().all(|&g| g == 1.0));
        assert_eq!(e.mean, vec![1.0; 3]);
        assert_eq!(e.std, vec![0.0; 3]);
    }

    #[test]
    fn hand_computed_scores() {
        // s0, s1 in family a; s2, s3 in family b; s1 sits closer to b
        let t = line_table(&[0.0, 2.0, 2.5, 3.5]);
        let e = evaluate_retrieval(&t, &labels(&["a", "a", "b", "b"])).unwrap();
        // s1 neighbors: s2 (0.5), s3 (1.5), s0 (2.0) -> hits 0, 0, 1
        assert_eq!(e.g[1].as_ref().unwrap(), &vec![0.0, 0.0, 1.0]);
        // s0 neighbors: s1, s2, s3 -> 1, 1, 1 (m = 1)
        assert_eq!(e.g[0].as_ref().unwrap(), &vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn singletons_are_skipped() {
        let t = line_table(&[0.0, 1.0, 5.0]);
        let e = evaluate_retrieval(&t, &labels(&["a", "a", "z"])).unwrap();
        assert!(e.g[2].is_none());
        assert_eq!(e.per_query_csv().lines().count(), 1 + 2 * 2);
        assert!(evaluate_retrieval(&t, &labels(&["a", "b", "c"])).is_err());
        assert!(evaluate_retrieval(&t, &labels(&["a", "a"])).is_err());
    }

    #[test]
    fn summary_has_one_row_per_k() {
        let t = line_table(&[0.0, 1.0, 5.0, 6.0]);
        let e = evaluate_retrieval(&t, &labels(&["a", "a", "b", "b"])).unwrap();
        let csv = e.summary_csv();
        assert_eq!(csv.lines().next(), Some("k,mean_g,std_g"));
        assert_eq!(csv.lines().count(), 1 + 3);
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        let l = labels(&["x", "y", "x"]);
        write_labels(&p, &l).unwrap();
        assert_eq!(read_labels(&p).unwrap(), l);
    }
}
