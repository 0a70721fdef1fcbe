//! Integer cochains on the dual graph, height functions, and the
//! construction of an Eulerian coorientation in a prescribed class.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::coorient::{require_eulerian, Coorientation, DualStep, DualWalk};
use crate::error::{Error, Result};
use crate::map::MultiCurveMap;

/// Integer weight per dual edge, measured along its reference direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cochain {
    pub weights: Vec<i64>,
}

impl Cochain {
    pub fn new(map: &MultiCurveMap, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != map.edge_count() {
            return Err(Error::WrongLength { expected: map.edge_count(), got: weights.len() });
        }
        Ok(Cochain { weights })
    }

    pub fn from_json(map: &MultiCurveMap, text: &str) -> Result<Self> {
        let c: Cochain = serde_json::from_str(text)?;
        Self::new(map, c.weights)
    }

    pub fn eval(&self, walk: &DualWalk) -> i64 {
        walk.eval(&self.weights)
    }

    /// `self + δp` for a face potential `p`.
    pub fn add_coboundary(&self, map: &MultiCurveMap, p: &[i64]) -> Self {
        let weights = map.dual().edges.iter().map(|de| self.weights[de.edge] + p[de.head] - p[de.tail]).collect();
        Cochain { weights }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Cochain { weights: self.weights.iter().zip(&other.weights).map(|(a, b)| a - b).collect() }
    }
}

/// Closed dual walk around vertex `v`, crossing its four edges
/// counterclockwise.
pub fn vertex_star(map: &MultiCurveMap, v: usize) -> DualWalk {
    let steps = (0..4)
        .map(|j| {
            let d = map.dart_at(v, j);
            DualStep { edge: map.edge_of(d), forward: map.is_first(d) }
        })
        .collect();
    DualWalk { steps }
}

pub fn check_cocycle(map: &MultiCurveMap, c: &Cochain) -> Result<()> {
    if c.weights.len() != map.edge_count() {
        return Err(Error::WrongLength { expected: map.edge_count(), got: c.weights.len() });
    }
    for v in 0..map.vertex_count() {
        let sum = c.eval(&vertex_star(map, v));
        if sum != 0 {
            return Err(Error::NotCocycle { vertex: v, sum });
        }
    }
    Ok(())
}

/// The ±1 cochain of an Eulerian coorientation.
pub fn class_of(map: &MultiCurveMap, eta: &Coorientation) -> Result<Cochain> {
    require_eulerian(map, eta)?;
    Ok(Cochain { weights: (0..map.edge_count()).map(|e| eta.value(e)).collect() })
}

/// Breadth-first spanning tree of the dual graph rooted at `root`: per
/// face, the tree edge used to reach it, plus the faces in visiting order.
pub fn dual_tree(map: &MultiCurveMap, root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let dual = map.dual();
    let mut parent = vec![None; dual.face_count];
    let mut seen = vec![false; dual.face_count];
    seen[root] = true;
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let f = order[i];
        i += 1;
        for &e in &dual.incidence[f] {
            let de = dual.edges[e];
            let g = if de.tail == f { de.head } else { de.tail };
            if !seen[g] {
                seen[g] = true;
                parent[g] = Some(e);
                order.push(g);
            }
        }
    }
    (parent, order)
}

/// Canonical representative of the class of `c`: the weights left after
/// subtracting the coboundary that kills `c` on the dual spanning tree.
/// Two cochains are cohomologous exactly when their keys agree.
pub fn class_key(map: &MultiCurveMap, c: &Cochain) -> Vec<i64> {
    let (parent, order) = dual_tree(map, 0);
    let dual = map.dual();
    let mut p = vec![0i64; dual.face_count];
    for f in order {
        if let Some(e) = parent[f] {
            let de = dual.edges[e];
            if de.head == f {
                p[f] = p[de.tail] + c.weights[e];
            } else {
                p[f] = p[de.head] - c.weights[e];
            }
        }
    }
    dual.edges.iter().map(|de| c.weights[de.edge] - (p[de.head] - p[de.tail])).collect()
}

pub fn cochain_equivalent(map: &MultiCurveMap, c1: &Cochain, c2: &Cochain) -> bool {
    c1.weights.len() == c2.weights.len() && class_key(map, c1) == class_key(map, c2)
}

/// Integer potential on faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightFunction {
    pub base: usize,
    pub heights: Vec<i64>,
}

/// A dual cycle on which the prescribed class exceeds the number of
/// crossings with the multi-curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub cycle: Vec<usize>,
    pub length: i64,
    pub omega: i64,
    #[serde(skip)]
    pub walk: DualWalk,
}

#[derive(Clone, Debug)]
pub enum Construction {
    Realized { coorientation: Coorientation, height: HeightFunction },
    Obstructed(Certificate),
}

impl Construction {
    pub fn coorientation(&self) -> Option<&Coorientation> {
        match self {
            Construction::Realized { coorientation, .. } => Some(coorientation),
            Construction::Obstructed(_) => None,
        }
    }
}

/// Mod 2 potential `p` with `w + δp` odd on every edge, with `p(base) = 0`.
fn parity_potential(map: &MultiCurveMap, w: &Cochain, base: usize) -> Result<Vec<i64>> {
    let dual = map.dual();
    let mut p: Vec<Option<i64>> = vec![None; dual.face_count];
    p[base] = Some(0);
    let mut queue = VecDeque::from([base]);
    // requirement: p(head) + p(tail) ≡ 1 + w (mod 2)
    while let Some(f) = queue.pop_front() {
        for &e in &dual.incidence[f] {
            let de = dual.edges[e];
            let g = if de.tail == f { de.head } else { de.tail };
            let want = (1 + w.weights[e] + p[f].unwrap()).rem_euclid(2);
            match p[g] {
                None => {
                    p[g] = Some(want);
                    queue.push_back(g);
                }
                Some(x) if x != want => return Err(Error::ParityMismatch),
                _ => {}
            }
        }
    }
    Ok(p.into_iter().map(|x| x.unwrap_or(0)).collect())
}

/// Difference-constraint arc: `h(to) <= h(from) + len`, realized by
/// crossing `edge` forward or backward.
#[derive(Clone, Copy, Debug)]
struct Arc {
    from: usize,
    to: usize,
    len: i64,
    step: DualStep,
}

/// Builds an Eulerian coorientation in the class of `omega` from the maximal
/// height function with `h(base) = 0`, or returns a violating dual cycle.
pub fn construct_coorientation(map: &MultiCurveMap, omega: &Cochain) -> Result<Construction> {
    height_of(map, omega, 0)
}

pub fn height_of(map: &MultiCurveMap, omega: &Cochain, base: usize) -> Result<Construction> {
    check_cocycle(map, omega)?;
    let dual = map.dual();
    let n = dual.face_count;
    let parity = parity_potential(map, omega, base)?;
    let w = omega.add_coboundary(map, &parity);

    let mut arcs = Vec::with_capacity(2 * dual.edges.len());
    for de in &dual.edges {
        let x = w.weights[de.edge];
        arcs.push(Arc { from: de.tail, to: de.head, len: 1 - x, step: DualStep { edge: de.edge, forward: true } });
        arcs.push(Arc { from: de.head, to: de.tail, len: 1 + x, step: DualStep { edge: de.edge, forward: false } });
    }

    let inf = i64::MAX / 4;
    let mut dist = vec![inf; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    dist[base] = 0;
    let mut last_relaxed = None;
    for _ in 0..n {
        last_relaxed = None;
        for (i, a) in arcs.iter().enumerate() {
            if dist[a.from] < inf && dist[a.from] + a.len < dist[a.to] {
                dist[a.to] = dist[a.from] + a.len;
                pred[a.to] = Some(i);
                last_relaxed = Some(a.to);
            }
        }
        if last_relaxed.is_none() {
            break;
        }
    }

    if let Some(mut f) = last_relaxed {
        for _ in 0..n {
            f = arcs[pred[f].unwrap()].from;
        }
        let start = f;
        let mut cyc = Vec::new();
        loop {
            let a = arcs[pred[f].unwrap()];
            cyc.push(a);
            f = a.from;
            if f == start {
                break;
            }
        }
        cyc.reverse();
        let walk = DualWalk { steps: cyc.iter().map(|a| a.step).collect() };
        let cycle = cyc.iter().map(|a| a.from).collect();
        let omega_val = omega.eval(&walk);
        return Ok(Construction::Obstructed(Certificate { cycle, length: walk.len() as i64, omega: omega_val, walk }));
    }

    let bits = dual.edges.iter().map(|de| w.weights[de.edge] + dist[de.head] - dist[de.tail] == 1).collect();
    let heights = dist.iter().zip(&parity).map(|(h, p)| h + p).collect();
    Ok(Construction::Realized {
        coorientation: Coorientation::new(map, bits)?,
        height: HeightFunction { base, heights },
    })
}

/// Whether every edge of `omega + δh` is ±1.
pub fn height_is_valid(map: &MultiCurveMap, omega: &Cochain, h: &HeightFunction) -> bool {
    let c = omega.add_coboundary(map, &h.heights);
    c.weights.iter().all(|&x| x == 1 || x == -1)
}
