//! Four-valent combinatorial maps of filling multi-curves.
//!
//! Internally the darts of vertex `v` are numbered `4v..4v+4` in
//! counterclockwise order, so the slot of a dart is `d % 4`. File labels are
//! kept only for input and output.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Internal dart index.
pub type Dart = usize;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VertexSpec {
    pub id: i64,
    pub darts: Vec<u64>,
}

/// On-disk map description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<[u64; 2]>,
}

/// One edge of the dual graph, with its reference direction `tail -> head`:
/// from the face on the right of the edge's first dart to the face on its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualEdge {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug)]
pub struct DualGraph {
    pub face_count: usize,
    pub edges: Vec<DualEdge>,
    /// Per face, the incident dual edges (a loop is listed twice).
    pub incidence: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].tail == self.edges[e].head
    }
}

/// A validated four-valent map with all derived data cached.
#[derive(Clone, Debug)]
pub struct MultiCurveMap {
    name: Option<String>,
    vertex_ids: Vec<i64>,
    labels: Vec<u64>,
    twin: Vec<Dart>,
    edges: Vec<[Dart; 2]>,
    edge_of: Vec<usize>,
    faces: Vec<Vec<Dart>>,
    right_face: Vec<usize>,
    strands: Vec<Vec<Dart>>,
    dual: DualGraph,
}

impl MultiCurveMap {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        Self::build(&file)
    }

    pub fn build(file: &MapFile) -> Result<Self> {
        if file.vertices.is_empty() {
            return Err(Error::EmptyMap);
        }
        let mut index: HashMap<u64, Dart> = HashMap::new();
        let mut labels = Vec::with_capacity(4 * file.vertices.len());
        for vs in &file.vertices {
            if vs.darts.len() != 4 {
                return Err(Error::NonQuadrivalent { vertex: vs.id, count: vs.darts.len() });
            }
            for &l in &vs.darts {
                if index.insert(l, labels.len()).is_some() {
                    return Err(Error::DuplicateDart { dart: l });
                }
                labels.push(l);
            }
        }
        let n = labels.len();
        let mut twin = vec![usize::MAX; n];
        let mut edges = Vec::with_capacity(file.edges.len());
        let mut edge_of = vec![usize::MAX; n];
        for (k, &[a, b]) in file.edges.iter().enumerate() {
            if a == b {
                return Err(Error::BadInvolution { dart: a, reason: "self-paired" });
            }
            let da = *index.get(&a).ok_or(Error::DanglingDart { dart: a })?;
            let db = *index.get(&b).ok_or(Error::DanglingDart { dart: b })?;
            for (d, l) in [(da, a), (db, b)] {
                if twin[d] != usize::MAX {
                    return Err(Error::BadInvolution { dart: l, reason: "paired twice" });
                }
            }
            twin[da] = db;
            twin[db] = da;
            edge_of[da] = k;
            edge_of[db] = k;
            edges.push(if a < b { [da, db] } else { [db, da] });
        }
        if let Some(d) = twin.iter().position(|&t| t == usize::MAX) {
            return Err(Error::BadInvolution { dart: labels[d], reason: "unpaired" });
        }

        let mut map = MultiCurveMap {
            name: file.name.clone(),
            vertex_ids: file.vertices.iter().map(|v| v.id).collect(),
            labels,
            twin,
            edges,
            edge_of,
            faces: Vec::new(),
            right_face: Vec::new(),
            strands: Vec::new(),
            dual: DualGraph { face_count: 0, edges: Vec::new(), incidence: Vec::new() },
        };
        if !map.is_connected() {
            return Err(Error::Disconnected);
        }
        map.derive();
        Ok(map)
    }

    /// The `p x q` grid map of `p` horizontal and `q` vertical circles on the
    /// torus. Vertex `i*q + j` sits on horizontal `i` and vertical `j`; its
    /// slots are east, north, west, south and dart labels are `4v + slot`.
    pub fn grid(p: usize, q: usize) -> Result<Self> {
        Self::build(&grid_file(p, q)?)
    }

    fn is_connected(&self) -> bool {
        let nv = self.vertex_count();
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for s in 0..4 {
                let w = self.twin[4 * v + s] / 4;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    fn derive(&mut self) {
        let n = self.dart_count();
        self.right_face = vec![usize::MAX; n];
        for start in 0..n {
            if self.right_face[start] != usize::MAX {
                continue;
            }
            let id = self.faces.len();
            let mut cyc = Vec::new();
            let mut d = start;
            loop {
                self.right_face[d] = id;
                cyc.push(d);
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            self.faces.push(cyc);
        }

        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = start;
            loop {
                orbit.push(d);
                d = self.strand_next(d);
                if d == start {
                    break;
                }
            }
            for &d in &orbit {
                seen[d] = true;
                // the reverse traversal covers the twins
                seen[self.twin[d]] = true;
            }
            self.strands.push(orbit);
        }

        let f = self.faces.len();
        let mut dual = DualGraph { face_count: f, edges: Vec::new(), incidence: vec![Vec::new(); f] };
        for (k, &[d, _]) in self.edges.iter().enumerate() {
            let de = DualEdge { edge: k, tail: self.right_face(d), head: self.left_face(d) };
            dual.incidence[de.tail].push(k);
            dual.incidence[de.head].push(k);
            dual.edges.push(de);
        }
        self.dual = dual;
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }
    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }
    pub fn vertex_id(&self, v: usize) -> i64 {
        self.vertex_ids[v]
    }
    pub fn dart_count(&self) -> usize {
        self.labels.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }
    pub fn label(&self, d: Dart) -> u64 {
        self.labels[d]
    }
    pub fn vertex_of(&self, d: Dart) -> usize {
        d / 4
    }
    pub fn slot_of(&self, d: Dart) -> usize {
        d % 4
    }
    /// Dart at slot `s` (taken mod 4) of vertex `v`.
    pub fn dart_at(&self, v: usize, s: usize) -> Dart {
        4 * v + s % 4
    }
    pub fn twin(&self, d: Dart) -> Dart {
        self.twin[d]
    }
    /// Next dart counterclockwise around the same vertex.
    pub fn rot_next(&self, d: Dart) -> Dart {
        4 * (d / 4) + (d + 1) % 4
    }
    pub fn rot_prev(&self, d: Dart) -> Dart {
        4 * (d / 4) + (d + 3) % 4
    }
    pub fn opposite(&self, d: Dart) -> Dart {
        4 * (d / 4) + (d + 2) % 4
    }
    /// Successor of `d` along the face on its right.
    pub fn face_next(&self, d: Dart) -> Dart {
        self.rot_next(self.twin[d])
    }
    /// Successor of `d` along its strand.
    pub fn strand_next(&self, d: Dart) -> Dart {
        self.opposite(self.twin[d])
    }
    pub fn edge_of(&self, d: Dart) -> usize {
        self.edge_of[d]
    }
    /// `[first, second]` darts of an edge; the first has the smaller label.
    pub fn edge_darts(&self, e: usize) -> [Dart; 2] {
        self.edges[e]
    }
    pub fn first_dart(&self, e: usize) -> Dart {
        self.edges[e][0]
    }
    pub fn is_first(&self, d: Dart) -> bool {
        self.edges[self.edge_of[d]][0] == d
    }
    pub fn faces(&self) -> &[Vec<Dart>] {
        &self.faces
    }
    pub fn face(&self, f: usize) -> &[Dart] {
        &self.faces[f]
    }
    pub fn right_face(&self, d: Dart) -> usize {
        self.right_face[d]
    }
    pub fn left_face(&self, d: Dart) -> usize {
        self.right_face[self.twin[d]]
    }
    /// Face in quadrant `j` of vertex `v`, between slots `j` and `j+1`.
    pub fn quadrant_face(&self, v: usize, j: usize) -> usize {
        self.left_face(self.dart_at(v, j))
    }
    /// Each strand as the sequence of darts leaving its successive vertices.
    pub fn strands(&self) -> &[Vec<Dart>] {
        &self.strands
    }
    pub fn strand_count(&self) -> usize {
        self.strands.len()
    }
    pub fn dual(&self) -> &DualGraph {
        &self.dual
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            name: self.name.clone(),
            vertices: (0..self.vertex_count())
                .map(|v| VertexSpec { id: self.vertex_ids[v], darts: (0..4).map(|s| self.labels[4 * v + s]).collect() })
                .collect(),
            edges: self.edges_in_file_order(),
        }
    }

    fn edges_in_file_order(&self) -> Vec<[u64; 2]> {
        self.edges.iter().map(|&[a, b]| [self.labels[a], self.labels[b]]).collect()
    }

    /// Vertices incident to face `f`, with multiplicity, in boundary order.
    pub fn face_corners(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&d| d / 4).collect()
    }

    /// Faces adjacent to vertex `v`, one per quadrant.
    pub fn vertex_faces(&self, v: usize) -> [usize; 4] {
        [0, 1, 2, 3].map(|j| self.quadrant_face(v, j))
    }

    /// Faces sharing an edge with `f` (excluding `f`), deduplicated.
    pub fn neighbours(&self, f: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.faces[f]
            .iter()
            .map(|&d| self.left_face(d))
            .filter(|&g| g != f)
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        out.sort_unstable();
        out
    }
}

pub fn grid_file(p: usize, q: usize) -> Result<MapFile> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidGrid(format!("{p}x{q}")));
    }
    let idx = |i: usize, j: usize| (i % p) * q + (j % q);
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in 0..q {
            let v = idx(i, j) as u64;
            vertices.push(VertexSpec { id: v as i64, darts: (0..4).map(|s| 4 * v + s).collect() });
            let east = idx(i, j + 1) as u64;
            let north = idx(i + 1, j) as u64;
            edges.push([4 * v, 4 * east + 2]);
            edges.push([4 * v + 1, 4 * north + 3]);
        }
    }
    Ok(MapFile { name: Some(format!("grid-{p}x{q}")), vertices, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t1_counts() {
        let m = MultiCurveMap::grid(1, 1).unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count(), m.genus()), (1, 2, 1, 1));
        assert_eq!(m.face(0).len(), 4);
        assert_eq!(m.strand_count(), 2);
        assert!(m.strands().iter().all(|s| s.len() == 1));
    }

    #[test]
    fn t6_counts() {
        let m = MultiCurveMap::grid(2, 3).unwrap();
        assert_eq!((m.vertex_count(), m.edge_count(), m.face_count(), m.genus()), (6, 12, 6, 1));
        assert!(m.faces().iter().all(|f| f.len() == 4));
        assert_eq!(m.strand_count(), 5);
    }

    #[test]
    fn quadrant_faces_agree() {
        let m = MultiCurveMap::grid(2, 3).unwrap();
        for v in 0..6 {
            for j in 0..4 {
                assert_eq!(m.left_face(m.dart_at(v, j)), m.right_face(m.dart_at(v, j + 1)));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let three = r#"{"vertices":[{"id":0,"darts":[0,1,2]}],"edges":[[0,2]]}"#;
        assert!(matches!(MultiCurveMap::from_json(three), Err(Error::NonQuadrivalent { .. })));
        let selfp = r#"{"vertices":[{"id":0,"darts":[0,1,2,3]}],"edges":[[0,0],[1,3]]}"#;
        assert!(matches!(MultiCurveMap::from_json(selfp), Err(Error::BadInvolution { .. })));
        let unp = r#"{"vertices":[{"id":0,"darts":[0,1,2,3]}],"edges":[[0,2]]}"#;
        assert!(matches!(MultiCurveMap::from_json(unp), Err(Error::BadInvolution { .. })));
        let dang = r#"{"vertices":[{"id":0,"darts":[0,1,2,3]}],"edges":[[0,2],[1,3],[5,6]]}"#;
        assert!(matches!(MultiCurveMap::from_json(dang), Err(Error::DanglingDart { .. })));
        let empty = r#"{"vertices":[],"edges":[]}"#;
        assert!(matches!(MultiCurveMap::from_json(empty), Err(Error::EmptyMap)));
    }

    #[test]
    fn file_round_trip() {
        let m = MultiCurveMap::grid(2, 3).unwrap();
        let text = serde_json::to_string(&m.to_file()).unwrap();
        let back = MultiCurveMap::from_json(&text).unwrap();
        assert_eq!(back.to_file(), m.to_file());
    }
}
