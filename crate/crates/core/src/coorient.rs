//! Eulerian coorientations, the oriented dual graph, flips and the coherent
//! order on vertices and faces.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{Dart, MultiCurveMap};

/// One bit per edge: `true` means the normal points to the left of the
/// edge's first dart.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<u8>", from = "Vec<u8>")]
pub struct Coorientation {
    bits: Vec<bool>,
}

impl From<Coorientation> for Vec<u8> {
    fn from(c: Coorientation) -> Self {
        c.bits.iter().map(|&b| b as u8).collect()
    }
}

impl From<Vec<u8>> for Coorientation {
    fn from(v: Vec<u8>) -> Self {
        Coorientation { bits: v.into_iter().map(|b| b != 0).collect() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoorientationFile {
    #[serde(default)]
    pub map: Option<String>,
    pub bits: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Ccw,
    Cw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexType {
    Alternating,
    NonAlternating,
}

/// How the coorientation meets one quadrant of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadrantKind {
    Sink,
    Source,
    Mixed,
}

impl Coorientation {
    pub fn new(map: &MultiCurveMap, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != map.edge_count() {
            return Err(Error::WrongLength { expected: map.edge_count(), got: bits.len() });
        }
        Ok(Coorientation { bits })
    }

    pub fn from_file(map: &MultiCurveMap, file: &CoorientationFile) -> Result<Self> {
        Self::new(map, file.bits.iter().map(|&b| b != 0).collect())
    }

    pub fn from_json(map: &MultiCurveMap, text: &str) -> Result<Self> {
        Self::from_file(map, &serde_json::from_str(text)?)
    }

    pub fn to_file(&self, map: &MultiCurveMap) -> CoorientationFile {
        CoorientationFile { map: map.name().map(str::to_owned), bits: self.bits.iter().map(|&b| b as u8).collect() }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
    pub fn bit(&self, e: usize) -> bool {
        self.bits[e]
    }
    pub fn len(&self) -> usize {
        self.bits.len()
    }
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `+1` when the normal crosses the edge along the dual reference
    /// direction, `-1` otherwise.
    pub fn value(&self, e: usize) -> i64 {
        if self.bits[e] {
            1
        } else {
            -1
        }
    }

    /// Sense of a dart at its vertex: counterclockwise when the normal lies
    /// on the left of the outgoing dart.
    pub fn sense(&self, map: &MultiCurveMap, d: Dart) -> Sense {
        let left = self.bits[map.edge_of(d)] == map.is_first(d);
        if left {
            Sense::Ccw
        } else {
            Sense::Cw
        }
    }

    pub fn with_flipped_edges(&self, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = self.bits.clone();
        for e in edges {
            bits[e] = !bits[e];
        }
        Coorientation { bits }
    }

    /// Edges on which two coorientations differ.
    pub fn difference(&self, other: &Self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&e| self.bits[e] != other.bits[e]).collect()
    }
}

fn ccw_count(map: &MultiCurveMap, eta: &Coorientation, v: usize) -> usize {
    (0..4).filter(|&s| eta.sense(map, map.dart_at(v, s)) == Sense::Ccw).count()
}

pub fn is_eulerian(map: &MultiCurveMap, eta: &Coorientation) -> bool {
    eta.len() == map.edge_count() && (0..map.vertex_count()).all(|v| ccw_count(map, eta, v) == 2)
}

pub fn require_eulerian(map: &MultiCurveMap, eta: &Coorientation) -> Result<()> {
    if eta.len() != map.edge_count() {
        return Err(Error::WrongLength { expected: map.edge_count(), got: eta.len() });
    }
    match (0..map.vertex_count()).find(|&v| ccw_count(map, eta, v) != 2) {
        Some(v) => Err(Error::NotEulerian { vertex: v }),
        None => Ok(()),
    }
}

pub fn vertex_type(map: &MultiCurveMap, eta: &Coorientation, v: usize) -> Result<VertexType> {
    if ccw_count(map, eta, v) != 2 {
        return Err(Error::NotEulerian { vertex: v });
    }
    let s0 = eta.sense(map, map.dart_at(v, 0));
    let s1 = eta.sense(map, map.dart_at(v, 1));
    let s2 = eta.sense(map, map.dart_at(v, 2));
    Ok(if s0 != s1 && s1 != s2 { VertexType::Alternating } else { VertexType::NonAlternating })
}

/// Kind of quadrant `j` (between slots `j` and `j+1`) at `v`.
pub fn quadrant_kind(map: &MultiCurveMap, eta: &Coorientation, v: usize, j: usize) -> QuadrantKind {
    let a = eta.sense(map, map.dart_at(v, j));
    let b = eta.sense(map, map.dart_at(v, j + 1));
    match (a, b) {
        (Sense::Ccw, Sense::Cw) => QuadrantKind::Sink,
        (Sense::Cw, Sense::Ccw) => QuadrantKind::Source,
        _ => QuadrantKind::Mixed,
    }
}

/// All Eulerian coorientations, in lexicographic order of their bit vectors.
pub fn enumerate_eulerian(map: &MultiCurveMap) -> Vec<Coorientation> {
    let ne = map.edge_count();
    let nv = map.vertex_count();
    // last edge index touching each vertex: the vertex is decided after it
    let mut last = vec![0usize; nv];
    for e in 0..ne {
        for d in map.edge_darts(e) {
            let v = map.vertex_of(d);
            last[v] = last[v].max(e);
        }
    }
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for v in 0..nv {
        closes[last[v]].push(v);
    }
    let mut out = Vec::new();
    let mut eta = Coorientation { bits: vec![false; ne] };
    fn rec(
        map: &MultiCurveMap,
        e: usize,
        eta: &mut Coorientation,
        closes: &[Vec<usize>],
        out: &mut Vec<Coorientation>,
    ) {
        if e == eta.bits.len() {
            out.push(eta.clone());
            return;
        }
        for b in [false, true] {
            eta.bits[e] = b;
            if closes[e].iter().all(|&v| ccw_count(map, eta, v) == 2) {
                rec(map, e + 1, eta, closes, out);
            }
        }
        eta.bits[e] = false;
    }
    rec(map, 0, &mut eta, &closes, &mut out);
    out
}

/// A step of a walk in the dual graph, crossing `edge` along (`forward`) or
/// against its reference direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualStep {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualWalk {
    pub steps: Vec<DualStep>,
}

impl DualWalk {
    fn ends(map: &MultiCurveMap, s: DualStep) -> (usize, usize) {
        let de = map.dual().edges[s.edge];
        if s.forward {
            (de.tail, de.head)
        } else {
            (de.head, de.tail)
        }
    }

    /// Faces visited, starting face first; the walk must be closed.
    pub fn faces(&self, map: &MultiCurveMap) -> Result<Vec<usize>> {
        let mut faces = Vec::with_capacity(self.steps.len());
        let mut cur: Option<usize> = None;
        for (i, &s) in self.steps.iter().enumerate() {
            if s.edge >= map.edge_count() {
                return Err(Error::NotAClosedWalk(format!("edge {} out of range", s.edge)));
            }
            let (a, b) = Self::ends(map, s);
            if let Some(c) = cur {
                if c != a {
                    return Err(Error::NotAClosedWalk(format!("step {i} starts at face {a}, expected {c}")));
                }
            }
            faces.push(a);
            cur = Some(b);
        }
        if let (Some(c), Some(&f0)) = (cur, faces.first()) {
            if c != f0 {
                return Err(Error::NotAClosedWalk(format!("ends at face {c}, started at {f0}")));
            }
        }
        Ok(faces)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Evaluation of an edge weight vector on the walk.
    pub fn eval(&self, weights: &[i64]) -> i64 {
        self.steps.iter().map(|s| if s.forward { weights[s.edge] } else { -weights[s.edge] }).sum()
    }

    pub fn reversed(&self) -> Self {
        DualWalk {
            steps: self.steps.iter().rev().map(|s| DualStep { edge: s.edge, forward: !s.forward }).collect(),
        }
    }
}

/// Algebraic intersection of a closed dual walk with the coorientation.
pub fn cohomology_eval(map: &MultiCurveMap, eta: &Coorientation, walk: &DualWalk) -> Result<i64> {
    walk.faces(map)?;
    Ok(walk.steps.iter().map(|s| if s.forward { eta.value(s.edge) } else { -eta.value(s.edge) }).sum())
}

/// Face that the normal of edge `e` points into, and the one it leaves.
pub fn arc(map: &MultiCurveMap, eta: &Coorientation, e: usize) -> (usize, usize) {
    let de = map.dual().edges[e];
    if eta.bit(e) {
        (de.tail, de.head)
    } else {
        (de.head, de.tail)
    }
}

/// Outgoing arcs `(edge, target)` of the oriented dual graph, per face.
pub fn oriented_dual(map: &MultiCurveMap, eta: &Coorientation) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new(); map.face_count()];
    for e in 0..map.edge_count() {
        let (from, to) = arc(map, eta, e);
        out[from].push((e, to));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acyclicity {
    /// Faces in an order where every arc goes forward.
    Acyclic(Vec<usize>),
    /// A directed cycle, each step following the coorientation.
    Cyclic(DualWalk),
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Acyclicity::Acyclic(_))
    }
}

pub fn acyclicity(map: &MultiCurveMap, eta: &Coorientation) -> Result<Acyclicity> {
    require_eulerian(map, eta)?;
    Ok(acyclicity_unchecked(map, eta))
}

/// Depth-first topological sort of the oriented dual graph with cycle
/// extraction. Does not require the coorientation to be Eulerian.
pub fn acyclicity_unchecked(map: &MultiCurveMap, eta: &Coorientation) -> Acyclicity {
    let adj = oriented_dual(map, eta);
    let n = adj.len();
    // 0 white, 1 on stack, 2 done
    let mut color = vec![0u8; n];
    let mut post = Vec::with_capacity(n);
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        // stack of (face, next arc index, arc used to enter)
        let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(root, 0, None)];
        color[root] = 1;
        while let Some(top) = stack.last_mut() {
            let (f, i, _) = *top;
            if i < adj[f].len() {
                top.1 += 1;
                let (e, g) = adj[f][i];
                match color[g] {
                    0 => {
                        color[g] = 1;
                        stack.push((g, 0, Some(e)));
                    }
                    1 => {
                        let pos = stack.iter().position(|&(h, _, _)| h == g).unwrap();
                        let mut edges: Vec<usize> = stack[pos + 1..].iter().map(|&(_, _, e)| e.unwrap()).collect();
                        edges.push(e);
                        let steps = edges.into_iter().map(|e| DualStep { edge: e, forward: eta.bit(e) }).collect();
                        return Acyclicity::Cyclic(DualWalk { steps });
                    }
                    _ => {}
                }
            } else {
                color[f] = 2;
                post.push(f);
                stack.pop();
            }
        }
    }
    post.reverse();
    Acyclicity::Acyclic(post)
}

pub fn is_acyclic(map: &MultiCurveMap, eta: &Coorientation) -> Result<bool> {
    Ok(acyclicity(map, eta)?.is_acyclic())
}

/// Faces whose whole boundary is cooriented inward.
pub fn sink_faces(map: &MultiCurveMap, eta: &Coorientation) -> Vec<usize> {
    (0..map.face_count()).filter(|&f| is_sink(map, eta, f)).collect()
}

pub fn is_sink(map: &MultiCurveMap, eta: &Coorientation, f: usize) -> bool {
    map.face(f).iter().all(|&d| eta.sense(map, d) == Sense::Cw)
}

pub fn is_source(map: &MultiCurveMap, eta: &Coorientation, f: usize) -> bool {
    map.face(f).iter().all(|&d| eta.sense(map, d) == Sense::Ccw)
}

/// Edges on the boundary of `f`, each once.
pub fn boundary_edges(map: &MultiCurveMap, f: usize) -> Vec<usize> {
    let mut es: Vec<usize> = map.face(f).iter().map(|&d| map.edge_of(d)).collect();
    es.sort_unstable();
    es.dedup();
    es
}

/// Elementary flip along a sink face.
pub fn flip(map: &MultiCurveMap, eta: &Coorientation, f: usize) -> Result<Coorientation> {
    if f >= map.face_count() || !is_sink(map, eta, f) {
        return Err(Error::NotASink { face: f });
    }
    Ok(eta.with_flipped_edges(boundary_edges(map, f)))
}

/// Flip along a source face: the inverse of an elementary flip.
pub fn unflip(map: &MultiCurveMap, eta: &Coorientation, f: usize) -> Option<Coorientation> {
    if is_source(map, eta, f) {
        Some(eta.with_flipped_edges(boundary_edges(map, f)))
    } else {
        None
    }
}

/// Checks that `order` (lowest first) lists every face once and that each
/// arc goes from a larger face into a smaller one.
pub fn check_face_order(map: &MultiCurveMap, eta: &Coorientation, order: &[usize]) -> Result<Vec<usize>> {
    let n = map.face_count();
    let mut pos = vec![usize::MAX; n];
    if order.len() != n {
        return Err(Error::OrderInconsistent(format!("{} faces listed, expected {n}", order.len())));
    }
    for (i, &f) in order.iter().enumerate() {
        if f >= n || pos[f] != usize::MAX {
            return Err(Error::OrderInconsistent(format!("face {f} repeated or out of range")));
        }
        pos[f] = i;
    }
    for e in 0..map.edge_count() {
        let (from, to) = arc(map, eta, e);
        if pos[to] >= pos[from] {
            return Err(Error::OrderInconsistent(format!("edge {e} points from face {from} into larger face {to}")));
        }
    }
    Ok(pos)
}

/// Runs the flip algorithm: flips the faces in `order`, lowest first.
/// Returns the `n + 1` coorientations `eta_0 = eta, ..., eta_n`.
pub fn flip_algorithm(map: &MultiCurveMap, eta: &Coorientation, order: &[usize]) -> Result<Vec<Coorientation>> {
    if !acyclicity(map, eta)?.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    check_face_order(map, eta, order)?;
    let mut seq = Vec::with_capacity(order.len() + 1);
    seq.push(eta.clone());
    for &f in order {
        let next = flip(map, seq.last().unwrap(), f)
            .map_err(|_| Error::OrderInconsistent(format!("face {f} is not a sink when its turn comes")))?;
        seq.push(next);
    }
    Ok(seq)
}

/// After flipping the first `k` faces of `order`, the coorientation differs
/// from `eta` exactly on edges with one side among those faces.
pub fn straddle_holds(map: &MultiCurveMap, eta: &Coorientation, order: &[usize], k: usize, eta_k: &Coorientation) -> bool {
    let mut flipped = vec![false; map.face_count()];
    for &f in &order[..k] {
        flipped[f] = true;
    }
    map.dual()
        .edges
        .iter()
        .all(|de| (eta.bit(de.edge) != eta_k.bit(de.edge)) == (flipped[de.tail] != flipped[de.head]))
}

/// Element of the coherent order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Face(usize),
    Vertex(usize),
}

/// The coherent order as a DAG over nodes indexed faces first, then vertices.
#[derive(Clone, Debug)]
pub struct CoherentOrder {
    pub faces: usize,
    pub vertices: usize,
    /// `less[x]` lists nodes `y` with `x < y` as generating relations.
    pub less: Vec<Vec<usize>>,
}

impl CoherentOrder {
    pub fn node(&self, i: usize) -> Node {
        if i < self.faces {
            Node::Face(i)
        } else {
            Node::Vertex(i - self.faces)
        }
    }
    pub fn index(&self, n: Node) -> usize {
        match n {
            Node::Face(f) => f,
            Node::Vertex(v) => self.faces + v,
        }
    }
    pub fn len(&self) -> usize {
        self.faces + self.vertices
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Generating relations `(x, y)` meaning `x < y`.
    pub fn relations(&self) -> Vec<(Node, Node)> {
        let mut out = Vec::new();
        for (x, ys) in self.less.iter().enumerate() {
            for &y in ys {
                out.push((self.node(x), self.node(y)));
            }
        }
        out
    }

    fn indegrees(&self) -> Vec<usize> {
        let mut indeg = vec![0; self.len()];
        for ys in &self.less {
            for &y in ys {
                indeg[y] += 1;
            }
        }
        indeg
    }

    /// Whether `order` (lowest first) is a linear extension.
    pub fn is_extension(&self, order: &[Node]) -> bool {
        if order.len() != self.len() {
            return false;
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &n) in order.iter().enumerate() {
            let k = self.index(n);
            if k >= self.len() || pos[k] != usize::MAX {
                return false;
            }
            pos[k] = i;
        }
        self.less.iter().enumerate().all(|(x, ys)| ys.iter().all(|&y| pos[x] < pos[y]))
    }

    /// Linear extensions in lexicographic order of node indices, greedy
    /// minimal-first, at most `limit` of them.
    pub fn linear_extensions(&self, limit: usize) -> Vec<Vec<Node>> {
        let mut out = Vec::new();
        let mut indeg = self.indegrees();
        let mut cur = Vec::with_capacity(self.len());
        let mut used = vec![false; self.len()];
        self.extend_rec(&mut indeg, &mut used, &mut cur, limit, &mut out);
        out
    }

    fn extend_rec(
        &self,
        indeg: &mut [usize],
        used: &mut [bool],
        cur: &mut Vec<usize>,
        limit: usize,
        out: &mut Vec<Vec<Node>>,
    ) {
        if out.len() >= limit {
            return;
        }
        if cur.len() == self.len() {
            out.push(cur.iter().map(|&i| self.node(i)).collect());
            return;
        }
        for x in 0..self.len() {
            if used[x] || indeg[x] != 0 {
                continue;
            }
            used[x] = true;
            cur.push(x);
            for &y in &self.less[x] {
                indeg[y] -= 1;
            }
            self.extend_rec(indeg, used, cur, limit, out);
            for &y in &self.less[x] {
                indeg[y] += 1;
            }
            cur.pop();
            used[x] = false;
            if out.len() >= limit {
                return;
            }
        }
    }

    /// A uniformly chosen minimal element at each step.
    pub fn random_extension<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Node> {
        let mut indeg = self.indegrees();
        let mut ready: Vec<usize> = (0..self.len()).filter(|&x| indeg[x] == 0).collect();
        let mut out = Vec::with_capacity(self.len());
        while !ready.is_empty() {
            let i = rng.gen_range(0..ready.len());
            let x = ready.swap_remove(i);
            out.push(self.node(x));
            for &y in &self.less[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.push(y);
                }
            }
        }
        out
    }
}

/// The coherent order of an acyclic Eulerian coorientation.
pub fn coherent_order(map: &MultiCurveMap, eta: &Coorientation) -> Result<CoherentOrder> {
    if !acyclicity(map, eta)?.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let nf = map.face_count();
    let nv = map.vertex_count();
    let mut less = vec![Vec::new(); nf + nv];
    for e in 0..map.edge_count() {
        let (from, to) = arc(map, eta, e);
        less[to].push(from);
    }
    for v in 0..nv {
        let vi = nf + v;
        let mut sources = Vec::new();
        let mut sinks = Vec::new();
        for j in 0..4 {
            let f = map.quadrant_face(v, j);
            match quadrant_kind(map, eta, v, j) {
                QuadrantKind::Source => sources.push(f),
                QuadrantKind::Sink => sinks.push(f),
                QuadrantKind::Mixed => sinks.push(f),
            }
        }
        if let Some(&f) = sources.iter().find(|f| sinks.contains(f)) {
            return Err(Error::OrderInconsistent(format!("face {f} is both above and below vertex {v}")));
        }
        for f in sources {
            less[vi].push(f);
        }
        for f in sinks {
            less[f].push(vi);
        }
    }
    for ys in &mut less {
        ys.sort_unstable();
        ys.dedup();
    }
    let order = CoherentOrder { faces: nf, vertices: nv, less };
    if order.linear_extensions(1).is_empty() {
        return Err(Error::OrderInconsistent("coherent order has a cycle".into()));
    }
    Ok(order)
}

/// Linear extensions of the coherent order, at most `limit`.
pub fn representations(map: &MultiCurveMap, eta: &Coorientation, limit: usize) -> Result<Vec<Vec<Node>>> {
    Ok(coherent_order(map, eta)?.linear_extensions(limit))
}

/// Face order induced by a representation.
pub fn faces_of(order: &[Node]) -> Vec<usize> {
    order
        .iter()
        .filter_map(|n| match n {
            Node::Face(f) => Some(*f),
            Node::Vertex(_) => None,
        })
        .collect()
}

/// Random linear extension of the face order of `eta`.
pub fn random_face_order<R: Rng + ?Sized>(map: &MultiCurveMap, eta: &Coorientation, rng: &mut R) -> Result<Vec<usize>> {
    let nf = map.face_count();
    if !acyclicity(map, eta)?.is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let mut less = vec![Vec::new(); nf];
    for e in 0..map.edge_count() {
        let (from, to) = arc(map, eta, e);
        less[to].push(from);
    }
    let order = CoherentOrder { faces: nf, vertices: 0, less };
    Ok(faces_of(&order.random_extension(rng)))
}

/// Coorientation with every edge normal set from a per-dart rule: `left(d)`
/// says whether the normal should lie on the left of dart `d`.
pub fn from_dart_rule(map: &MultiCurveMap, left: impl Fn(Dart) -> bool) -> Coorientation {
    Coorientation { bits: (0..map.edge_count()).map(|e| left(map.first_dart(e))).collect() }
}
