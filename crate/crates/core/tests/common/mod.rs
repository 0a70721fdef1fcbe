#![allow(dead_code)]

use std::path::PathBuf;

use birkhoff_core::cohomology::dual_tree;
use birkhoff_core::coorient::{enumerate_eulerian, is_acyclic, Coorientation, DualStep, DualWalk};
use birkhoff_core::MultiCurveMap;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load(name: &str) -> MultiCurveMap {
    let text = std::fs::read_to_string(data_path(&format!("{name}.json"))).unwrap();
    MultiCurveMap::from_json(&text).unwrap()
}

pub fn test_maps() -> Vec<(&'static str, MultiCurveMap)> {
    ["t1", "t6", "genus2"].into_iter().map(|n| (n, load(n))).collect()
}

pub fn acyclic(map: &MultiCurveMap) -> Vec<Coorientation> {
    enumerate_eulerian(map).into_iter().filter(|e| is_acyclic(map, e).unwrap()).collect()
}

/// Brute force over all bit vectors: edge normals balanced two in, two out
/// at every vertex, read straight off the darts.
pub fn brute_force_eulerian(map: &MultiCurveMap) -> Vec<Coorientation> {
    let m = map.edge_count();
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        let bits: Vec<bool> = (0..m).map(|e| mask >> e & 1 == 1).collect();
        let balanced = (0..map.vertex_count()).all(|v| {
            // a dart points "ccw" when the normal sits on its left
            let ccw = (0..4)
                .filter(|&s| {
                    let d = map.dart_at(v, s);
                    bits[map.edge_of(d)] == map.is_first(d)
                })
                .count();
            ccw == 2
        });
        if balanced {
            out.push(Coorientation::new(map, bits).unwrap());
        }
    }
    out
}

fn tree_path_to_root(map: &MultiCurveMap, parent: &[Option<usize>], mut f: usize) -> Vec<DualStep> {
    let mut steps = Vec::new();
    while let Some(e) = parent[f] {
        let de = map.dual().edges[e];
        if de.head == f {
            steps.push(DualStep { edge: e, forward: false });
            f = de.tail;
        } else {
            steps.push(DualStep { edge: e, forward: true });
            f = de.head;
        }
    }
    steps
}

/// Tree path from face 0 to `f`.
pub fn path_from_root(map: &MultiCurveMap, f: usize) -> DualWalk {
    let (parent, _) = dual_tree(map, 0);
    DualWalk { steps: tree_path_to_root(map, &parent, f) }.reversed()
}

/// Fundamental cycle of the non-tree dual edge `e`, based at face 0.
pub fn fundamental_cycle(map: &MultiCurveMap, e: usize) -> DualWalk {
    let (parent, _) = dual_tree(map, 0);
    let de = map.dual().edges[e];
    let mut steps: Vec<DualStep> = DualWalk { steps: tree_path_to_root(map, &parent, de.tail) }.reversed().steps;
    steps.push(DualStep { edge: e, forward: true });
    steps.extend(tree_path_to_root(map, &parent, de.head));
    DualWalk { steps }
}

pub fn non_tree_edges(map: &MultiCurveMap) -> Vec<usize> {
    let (parent, _) = dual_tree(map, 0);
    let tree: Vec<usize> = parent.iter().flatten().copied().collect();
    (0..map.edge_count()).filter(|e| !tree.contains(e)).collect()
}

pub fn concat(a: &DualWalk, b: &DualWalk) -> DualWalk {
    DualWalk { steps: a.steps.iter().chain(&b.steps).copied().collect() }
}
