//! Filtered simplicial complexes, their boundary matrices, and the persistence
//! diagrams read off a reduced matrix.
//!
//! Row and column 0 of every boundary matrix belong to the empty simplex, so
//! a vertex has boundary column `[1, 0, ..., 0]`. The vertex paired with the
//! empty simplex carries the H0 class that never dies, so it is reported as
//! essential rather than as a finite point.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::matrix::BinaryMatrix;

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<u32>);

impl Simplex {
    /// Sorts the vertices; rejects repeated ids.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams(format!(
                "simplex {vertices:?} repeats a vertex"
            )));
        }
        Ok(Self(vertices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    /// `|vertices| - 1`; the empty simplex has dimension -1.
    pub fn dimension(&self) -> i32 {
        self.0.len() as i32 - 1
    }

    /// Codimension-1 faces, in order of the omitted vertex.
    pub fn boundary_faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.0.len()).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        let ids: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// First broken invariant found by [`Filtration::validate`].
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("index {index}: {reason}")]
pub struct FiltrationViolation {
    pub index: usize,
    pub reason: String,
}

/// Simplices in insertion order with their scale values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FiltrationFile", into = "FiltrationFile")]
pub struct Filtration {
    simplices: Vec<Simplex>,
    scales: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FiltrationFile {
    simplices: Vec<Vec<u32>>,
    scales: Vec<f64>,
}

impl TryFrom<FiltrationFile> for Filtration {
    type Error = Error;

    fn try_from(file: FiltrationFile) -> Result<Self> {
        let simplices = file
            .simplices
            .into_iter()
            .map(Simplex::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Filtration {
            simplices,
            scales: file.scales,
        })
    }
}

impl From<Filtration> for FiltrationFile {
    fn from(f: Filtration) -> Self {
        FiltrationFile {
            simplices: f.simplices.into_iter().map(|s| s.0).collect(),
            scales: f.scales,
        }
    }
}

impl Filtration {
    /// Wraps the data without checking it; see [`Filtration::validate`].
    pub fn new(simplices: Vec<Simplex>, scales: Vec<f64>) -> Self {
        Self { simplices, scales }
    }

    /// Builds a filtration from vertex lists, using the list index as scale.
    pub fn from_vertex_lists(lists: &[&[u32]]) -> Result<Self> {
        let simplices = lists
            .iter()
            .map(|l| Simplex::new(l.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let scales = (0..simplices.len()).map(|i| i as f64).collect();
        Ok(Self { simplices, scales })
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn dims(&self) -> Vec<i32> {
        self.simplices.iter().map(Simplex::dimension).collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("filtration serializes")
    }

    /// Checks the filtration invariants and reports the first violation.
    ///
    /// Checking that codimension-1 faces precede each simplex is enough: by
    /// induction every proper face then precedes it too.
    pub fn validate(&self) -> std::result::Result<(), FiltrationViolation> {
        let fail = |index, reason: String| Err(FiltrationViolation { index, reason });
        if self.simplices.len() != self.scales.len() {
            return fail(
                self.simplices.len().min(self.scales.len()),
                format!(
                    "{} simplices but {} scales",
                    self.simplices.len(),
                    self.scales.len()
                ),
            );
        }
        match self.simplices.first() {
            None => return fail(0, "filtration is empty".into()),
            Some(s) if s.dimension() != -1 => {
                return fail(0, format!("expected the empty simplex, found {s}"))
            }
            _ => {}
        }
        let mut seen: HashMap<&Simplex, usize> = HashMap::new();
        for (j, s) in self.simplices.iter().enumerate() {
            if !self.scales[j].is_finite() {
                return fail(j, format!("scale {} is not finite", self.scales[j]));
            }
            if j > 0 && self.scales[j] < self.scales[j - 1] {
                return fail(
                    j,
                    format!(
                        "scale {} decreases from {}",
                        self.scales[j],
                        self.scales[j - 1]
                    ),
                );
            }
            if let Some(&first) = seen.get(s) {
                return fail(j, format!("{s} already appears at index {first}"));
            }
            if j > 0 {
                for face in s.boundary_faces() {
                    if !seen.contains_key(&face) {
                        return fail(j, format!("face {face} of {s} does not precede it"));
                    }
                }
            }
            seen.insert(s, j);
        }
        Ok(())
    }
}

/// A boundary matrix together with the dimension and scale of each column.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMatrix {
    pub matrix: BinaryMatrix,
    pub dims: Vec<i32>,
    pub scales: Vec<f64>,
}

impl BoundaryMatrix {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Entry `(i, j)` is 1 iff simplex `i` is a codimension-1 face of simplex `j`.
pub fn build_boundary_matrix(f: &Filtration) -> Result<BoundaryMatrix> {
    f.validate()?;
    let index: HashMap<&Simplex, usize> = f
        .simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    let n = f.len();
    let mut matrix = BinaryMatrix::zeros(n);
    for (j, s) in f.simplices.iter().enumerate().skip(1) {
        for face in s.boundary_faces() {
            matrix.set(index[&face], j, true);
        }
    }
    Ok(BoundaryMatrix {
        matrix,
        dims: f.dims(),
        scales: f.scales.clone(),
    })
}

/// One finite point of a persistence diagram.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub dim: i32,
    pub birth: f64,
    pub death: f64,
}

/// Finite points of a single homology dimension.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    pub dim: i32,
    pub points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn contains(&self, birth: f64, death: f64) -> bool {
        self.points
            .iter()
            .any(|p| p.birth == birth && p.death == death)
    }
}

/// Everything read off a reduced matrix.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagrams {
    /// Finite diagrams keyed by dimension.
    pub finite: BTreeMap<i32, PersistenceDiagram>,
    /// `(dim, birth)` of classes that never die.
    pub essential: Vec<(i32, f64)>,
    /// `(low, column)` index pairs, including the empty-simplex pairing and
    /// zero-persistence pairs that the diagrams omit.
    pub pairs: Vec<(usize, usize)>,
}

impl Diagrams {
    pub fn dim(&self, k: i32) -> Option<&PersistenceDiagram> {
        self.finite.get(&k)
    }

    pub fn point_count(&self) -> usize {
        self.finite.values().map(|d| d.points.len()).sum()
    }

    /// `{"dims": {"0": [[b, d], ...]}, "essential": {"0": [[b, "inf"]]}}`
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Map, Value};
        let mut dims = Map::new();
        for (k, d) in &self.finite {
            let pts: Vec<Value> = d.points.iter().map(|p| json!([p.birth, p.death])).collect();
            dims.insert(k.to_string(), Value::Array(pts));
        }
        let mut essential = Map::new();
        for &(k, birth) in &self.essential {
            essential
                .entry(k.to_string())
                .or_insert_with(|| Value::Array(Vec::new()))
                .as_array_mut()
                .expect("array")
                .push(json!([birth, "inf"]));
        }
        json!({ "dims": dims, "essential": essential })
    }
}

/// Reads persistence diagrams off a reduced matrix.
///
/// A nonzero column `j` with lowest one in row `i` gives the point
/// `(scales[i], scales[j])` in dimension `dims[i]`. Pairings with row 0 (the
/// empty simplex) and zero-length pairs are left out of the diagrams but kept
/// in [`Diagrams::pairs`].
pub fn extract_diagrams(r: &BinaryMatrix, dims: &[i32], scales: &[f64]) -> Result<Diagrams> {
    let n = r.n();
    if dims.len() != n || scales.len() != n {
        return Err(Error::Matrix(format!(
            "matrix is {n}x{n} but got {} dims and {} scales",
            dims.len(),
            scales.len()
        )));
    }
    if let Some((first, second, low)) = exact::duplicate_low(r) {
        return Err(Error::NotReduced { first, second, low });
    }
    let pairs = exact::pairs(r);
    let mut out = Diagrams {
        pairs: pairs.clone(),
        ..Diagrams::default()
    };
    let mut is_low = vec![false; n];
    for &(i, j) in &pairs {
        is_low[i] = true;
        if i == 0 || scales[i] == scales[j] {
            continue;
        }
        let dim = dims[i];
        out.finite
            .entry(dim)
            .or_insert_with(|| PersistenceDiagram {
                dim,
                points: Vec::new(),
            })
            .points
            .push(DiagramPoint {
                dim,
                birth: scales[i],
                death: scales[j],
            });
    }
    // A column paired with the empty simplex is the class that never dies
    // (reduced homology hides it).
    let with_empty: Vec<usize> = pairs.iter().filter(|p| p.0 == 0).map(|p| p.1).collect();
    for j in 1..n {
        if (r.is_zero_column(j) && !is_low[j]) || with_empty.contains(&j) {
            out.essential.push((dims[j], scales[j]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::reduce_exact;

    #[test]
    fn faces_before_cofaces() {
        let f = Filtration::new(
            vec![
                Simplex::empty(),
                Simplex::new(vec![0]).unwrap(),
                Simplex::new(vec![1]).unwrap(),
                Simplex::new(vec![0, 1]).unwrap(),
            ],
            vec![0.0, 0.0, 1.0, 2.0],
        );
        assert_eq!(f.validate(), Ok(()));
    }

    #[test]
    fn edge_before_its_vertices_is_rejected() {
        let f = Filtration::from_vertex_lists(&[&[], &[0, 1], &[0], &[1]]).unwrap();
        let v = f.validate().unwrap_err();
        assert_eq!(v.index, 1);
        assert!(v.reason.contains("does not precede"), "{}", v.reason);
        assert!(build_boundary_matrix(&f).is_err());
    }

    #[test]
    fn other_violations() {
        let f = Filtration::from_vertex_lists(&[&[0], &[1]]).unwrap();
        assert_eq!(f.validate().unwrap_err().index, 0);

        let f = Filtration::new(
            vec![Simplex::empty(), Simplex::new(vec![0]).unwrap()],
            vec![1.0, 0.0],
        );
        assert_eq!(f.validate().unwrap_err().index, 1);

        let f = Filtration::from_vertex_lists(&[&[], &[0], &[0]]).unwrap();
        assert_eq!(f.validate().unwrap_err().index, 2);

        let f = Filtration::new(vec![Simplex::empty()], vec![]);
        assert!(f.validate().is_err());

        assert!(Simplex::new(vec![1, 1]).is_err());
    }

    #[test]
    fn single_vertex_matrix() {
        let f = Filtration::from_vertex_lists(&[&[], &[0]]).unwrap();
        let b = build_boundary_matrix(&f).unwrap();
        assert_eq!(b.matrix.to_rows(), vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(b.dims, vec![-1, 0]);
    }

    #[test]
    fn edge_column_hits_both_vertices() {
        let f = Filtration::from_vertex_lists(&[&[], &[0], &[1], &[0, 1]]).unwrap();
        let b = build_boundary_matrix(&f).unwrap();
        let c = b.matrix.column(3);
        assert_eq!(c, &[false, true, true, false]);
    }

    #[test]
    fn zero_matrix_has_empty_diagrams() {
        let r = BinaryMatrix::zeros(4);
        let d = extract_diagrams(&r, &[-1, 0, 0, 0], &[0.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(d.point_count(), 0);
        assert!(d.pairs.is_empty());
    }

    #[test]
    fn unreduced_matrix_is_rejected() {
        let f = Filtration::from_vertex_lists(&[&[], &[0], &[1], &[0, 1]]).unwrap();
        let b = build_boundary_matrix(&f).unwrap();
        let err = extract_diagrams(&b.matrix, &b.dims, &b.scales).unwrap_err();
        assert!(matches!(
            err,
            Error::NotReduced {
                first: 1,
                second: 2,
                low: 0
            }
        ));
    }

    #[test]
    fn json_round_trip_and_format() {
        let json = r#"{"simplices": [[],[0],[1],[0,1]], "scales": [0,0,1,2]}"#;
        let f = Filtration::from_json(json).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(Filtration::from_json(&f.to_json()).unwrap(), f);

        let b = build_boundary_matrix(&f).unwrap();
        let r = reduce_exact(&b.matrix);
        let d = extract_diagrams(&r, &b.dims, &b.scales).unwrap();
        let v = d.to_json();
        assert_eq!(v["dims"]["0"], serde_json::json!([[1.0, 2.0]]));
        assert_eq!(v["essential"]["0"], serde_json::json!([[0.0, "inf"]]));
    }
}
