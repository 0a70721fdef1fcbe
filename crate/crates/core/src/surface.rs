//! Ribbon-graph model of the section surface, its homology and intersection
//! form, and the curves along which the first-return map twists.
//!
//! The skeleton has one trivalent node per dart of the multi-curve. At a
//! crossing the four nodes form a square, plain at alternating vertices and
//! twisted at non-alternating ones, and each node carries a leg joining it to
//! the node of the twin dart.

use serde::{Deserialize, Serialize};

use crate::coorient::{acyclicity, require_eulerian, vertex_type, Coorientation, QuadrantKind, VertexType};
use crate::error::{Error, Result};
use crate::map::{Dart, MultiCurveMap};

/// A ribbon graph: nodes with counterclockwise half-edge rotations, an edge
/// involution and an optional twist flag per edge.
#[derive(Clone, Debug)]
pub struct RibbonGraph {
    rotations: Vec<Vec<usize>>,
    node_of: Vec<usize>,
    pos: Vec<usize>,
    twin: Vec<usize>,
    twisted: Vec<bool>,
    edges: Vec<[usize; 2]>,
    edge_of: Vec<usize>,
}

impl RibbonGraph {
    /// `rotations[n]` lists the half-edges at node `n` counterclockwise;
    /// `pairs` joins half-edges into edges.
    pub fn new(rotations: Vec<Vec<usize>>, pairs: &[([usize; 2], bool)]) -> Self {
        let nh: usize = rotations.iter().map(Vec::len).sum();
        let mut node_of = vec![usize::MAX; nh];
        let mut pos = vec![0; nh];
        for (n, rot) in rotations.iter().enumerate() {
            for (i, &h) in rot.iter().enumerate() {
                node_of[h] = n;
                pos[h] = i;
            }
        }
        let mut twin = vec![usize::MAX; nh];
        let mut twisted = vec![false; nh];
        let mut edges = Vec::with_capacity(pairs.len());
        let mut edge_of = vec![usize::MAX; nh];
        for (k, &([a, b], t)) in pairs.iter().enumerate() {
            twin[a] = b;
            twin[b] = a;
            twisted[a] = t;
            twisted[b] = t;
            edge_of[a] = k;
            edge_of[b] = k;
            edges.push([a.min(b), a.max(b)]);
        }
        debug_assert!(twin.iter().all(|&t| t != usize::MAX));
        RibbonGraph { rotations, node_of, pos, twin, twisted, edges, edge_of }
    }

    pub fn node_count(&self) -> usize {
        self.rotations.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn half_edge_count(&self) -> usize {
        self.twin.len()
    }
    pub fn node_of(&self, h: usize) -> usize {
        self.node_of[h]
    }
    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }
    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }
    pub fn edge_halves(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }
    pub fn is_twisted(&self, e: usize) -> bool {
        self.twisted[self.edges[e][0]]
    }
    pub fn rotation(&self, n: usize) -> &[usize] {
        &self.rotations[n]
    }
    pub fn next_ccw(&self, h: usize) -> usize {
        let rot = &self.rotations[self.node_of[h]];
        rot[(self.pos[h] + 1) % rot.len()]
    }
    pub fn next_cw(&self, h: usize) -> usize {
        let rot = &self.rotations[self.node_of[h]];
        rot[(self.pos[h] + rot.len() - 1) % rot.len()]
    }

    /// Boundary components of the thickened graph, each as the closed walk
    /// of half-edges it runs along.
    pub fn boundary_components(&self) -> Vec<Vec<usize>> {
        let nh = self.half_edge_count();
        // state (h, flipped): leaving along h, local orientation reversed
        // an odd number of times so far; each component is traced once in
        // each direction, and both traces use the same corners
        let mut seen = vec![[false; 2]; nh];
        let mut keys = std::collections::HashSet::new();
        let mut comps = Vec::new();
        for r0 in [false, true] {
            for start in 0..nh {
                if seen[start][r0 as usize] {
                    continue;
                }
                let mut walk = Vec::new();
                let mut corners = Vec::new();
                let (mut h, mut r) = (start, r0);
                loop {
                    seen[h][r as usize] = true;
                    walk.push(h);
                    let t = self.twin[h];
                    r ^= self.twisted[h];
                    // corner named by its clockwise-first half-edge
                    if r {
                        h = self.next_cw(t);
                        corners.push(h);
                    } else {
                        h = self.next_ccw(t);
                        corners.push(t);
                    }
                    if h == start && r == r0 {
                        break;
                    }
                }
                corners.sort_unstable();
                if keys.insert(corners) {
                    comps.push(walk);
                }
            }
        }
        comps
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.node_count() as i64 - self.edge_count() as i64
    }

    pub fn is_orientable_twists(&self) -> bool {
        self.twisted.iter().all(|t| !t)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &h in &self.rotations[x] {
                let y = self.node_of[self.twin[h]];
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A closed walk in the skeleton, given by the half-edges it leaves along.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub walk: Vec<usize>,
    pub class: Vec<i64>,
    pub simple: bool,
}

/// Which way a curve around a face turns through the square at a corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Turn {
    /// Along the square's cyclic order.
    Forward,
    /// Against it.
    Backward,
}

/// Corner of a face at a vertex, classified by the vertex type and the
/// position of the quadrant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerKind {
    Sink,
    AlternatingSource,
    NonAlternatingSource,
    /// Mixed quadrant following the sink counterclockwise.
    MixedAfterSink,
    /// Mixed quadrant preceding the sink counterclockwise.
    MixedBeforeSink,
}

/// Turn taken at each non-sink corner kind. Sink corners use the single
/// square edge joining the two darts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routing {
    pub alternating_source: Turn,
    pub non_alternating_source: Turn,
    pub mixed_after_sink: Turn,
    pub mixed_before_sink: Turn,
}

impl Routing {
    pub fn turn(&self, kind: CornerKind) -> Option<Turn> {
        match kind {
            CornerKind::Sink => None,
            CornerKind::AlternatingSource => Some(self.alternating_source),
            CornerKind::NonAlternatingSource => Some(self.non_alternating_source),
            CornerKind::MixedAfterSink => Some(self.mixed_after_sink),
            CornerKind::MixedBeforeSink => Some(self.mixed_before_sink),
        }
    }

    /// Every combination of turns.
    pub fn all() -> Vec<Routing> {
        let t = [Turn::Forward, Turn::Backward];
        let mut out = Vec::new();
        for a in t {
            for b in t {
                for c in t {
                    for d in t {
                        out.push(Routing {
                            alternating_source: a,
                            non_alternating_source: b,
                            mixed_after_sink: c,
                            mixed_before_sink: d,
                        });
                    }
                }
            }
        }
        out
    }
}

impl Default for Routing {
    /// Source corners take the single square edge between their darts;
    /// mixed corners pass through the node on the sink side.
    fn default() -> Self {
        Routing {
            alternating_source: Turn::Forward,
            non_alternating_source: Turn::Backward,
            mixed_after_sink: Turn::Backward,
            mixed_before_sink: Turn::Backward,
        }
    }
}

/// Local data of one crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingInfo {
    pub kind: VertexType,
    /// Slot of the sink quadrant at a non-alternating vertex; 0 otherwise.
    pub sink_slot: usize,
    /// The four darts in the cyclic order of the square.
    pub square: [Dart; 4],
}

/// Ribbon model of the section surface for one coorientation.
#[derive(Clone, Debug)]
pub struct SurfaceModel {
    eta: Coorientation,
    graph: RibbonGraph,
    crossings: Vec<CrossingInfo>,
    strands: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    chord_index: Vec<Option<usize>>,
    basis: Vec<Vec<usize>>,
    form: Vec<Vec<i64>>,
}

/// Half-edges at a dart node: first square edge, second square edge, leg.
const FIRST: usize = 0;
const SECOND: usize = 1;
const LEG: usize = 2;

fn half(d: Dart, k: usize) -> usize {
    3 * d + k
}

impl SurfaceModel {
    pub fn build(map: &MultiCurveMap, eta: &Coorientation) -> Result<Self> {
        require_eulerian(map, eta)?;
        let nd = map.dart_count();
        let rotations: Vec<Vec<usize>> = (0..nd).map(|d| vec![half(d, FIRST), half(d, SECOND), half(d, LEG)]).collect();
        let mut pairs = Vec::with_capacity(6 * map.vertex_count());
        let mut crossings = Vec::with_capacity(map.vertex_count());
        for v in 0..map.vertex_count() {
            let kind = vertex_type(map, eta, v)?;
            let ccw: Vec<bool> = (0..4).map(|s| eta.sense(map, map.dart_at(v, s)) == crate::coorient::Sense::Ccw).collect();
            // arcs covered by each dart node: arc j points into quadrant j
            let mut covers: Vec<Vec<usize>> = vec![Vec::new(); 4];
            for s in 0..4 {
                let d = map.dart_at(v, s);
                let arcs = if ccw[s] { [s, (s + 1) % 4] } else { [(s + 3) % 4, (s + 2) % 4] };
                covers[arcs[0]].push(half(d, FIRST));
                covers[arcs[1]].push(half(d, SECOND));
            }
            let sink_slot = match kind {
                VertexType::Alternating => 0,
                VertexType::NonAlternating => (0..4).find(|&j| covers[j].len() == 4).unwrap(),
            };
            for (j, hs) in covers.iter().enumerate() {
                match hs.len() {
                    0 => {}
                    2 => pairs.push(([hs[0], hs[1]], false)),
                    4 => {
                        // the sink arc is split between the two darts on
                        // each side of the sink quadrant
                        let at = |k: usize| {
                            let d = map.dart_at(v, j + k);
                            *hs.iter().find(|&&h| h / 3 == d).unwrap()
                        };
                        pairs.push(([at(0), at(1)], false));
                        pairs.push(([at(2), at(3)], false));
                    }
                    n => unreachable!("arc covered {n} times"),
                }
            }
            let d = |k: usize| map.dart_at(v, k);
            let square = match kind {
                VertexType::Alternating => [d(0), d(1), d(2), d(3)],
                VertexType::NonAlternating => {
                    let s = sink_slot;
                    [d(s), d(s + 1), d(s + 3), d(s + 2)]
                }
            };
            crossings.push(CrossingInfo { kind, sink_slot, square });
        }
        for e in 0..map.edge_count() {
            let [a, b] = map.edge_darts(e);
            pairs.push(([half(a, LEG), half(b, LEG)], false));
        }
        let graph = RibbonGraph::new(rotations, &pairs);
        let mut model = SurfaceModel {
            eta: eta.clone(),
            graph,
            crossings,
            strands: map.strand_count(),
            parent: Vec::new(),
            depth: Vec::new(),
            chord_index: Vec::new(),
            basis: Vec::new(),
            form: Vec::new(),
        };
        model.build_homology();
        Ok(model)
    }

    fn build_homology(&mut self) {
        let g = &self.graph;
        let n = g.node_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut tree_edge = vec![false; g.edge_count()];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &h in g.rotation(x) {
                let t = g.twin(h);
                let y = g.node_of(t);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(t);
                    depth[y] = depth[x] + 1;
                    tree_edge[g.edge_of(h)] = true;
                    queue.push_back(y);
                }
            }
        }
        let mut chord_index = vec![None; g.edge_count()];
        let mut k = 0;
        for e in 0..g.edge_count() {
            if !tree_edge[e] {
                chord_index[e] = Some(k);
                k += 1;
            }
        }
        self.parent = parent;
        self.depth = depth;
        self.chord_index = chord_index;
        let mut basis = Vec::with_capacity(k);
        for e in 0..g.edge_count() {
            if !tree_edge[e] {
                let [h, _] = g.edge_halves(e);
                let a = g.node_of(h);
                let b = g.node_of(g.twin(h));
                let mut walk = vec![h];
                walk.extend(self.tree_path(b, a));
                basis.push(walk);
            }
        }
        self.form = basis.iter().map(|x| basis.iter().map(|y| self.walk_pairing(x, y)).collect()).collect();
        self.basis = basis;
    }

    /// Half-edges of the tree path from node `a` to node `b`.
    fn tree_path(&self, mut a: usize, mut b: usize) -> Vec<usize> {
        let mut up = Vec::new();
        let mut down = Vec::new();
        while a != b {
            if self.depth[a] >= self.depth[b] {
                // parent[a] is the half-edge at a leading to its parent
                let h = self.parent[a].unwrap();
                up.push(h);
                a = self.graph.node_of(self.graph.twin(h));
            } else {
                let h = self.parent[b].unwrap();
                down.push(self.graph.twin(h));
                b = self.graph.node_of(self.graph.twin(h));
            }
        }
        down.reverse();
        up.extend(down);
        up
    }

    pub fn graph(&self) -> &RibbonGraph {
        &self.graph
    }
    pub fn coorientation(&self) -> &Coorientation {
        &self.eta
    }
    pub fn crossing(&self, v: usize) -> &CrossingInfo {
        &self.crossings[v]
    }
    pub fn euler_characteristic(&self) -> i64 {
        self.graph.euler_characteristic()
    }
    pub fn boundary_count(&self) -> usize {
        self.graph.boundary_components().len()
    }
    pub fn strand_count(&self) -> usize {
        self.strands
    }
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic() - self.boundary_count() as i64) / 2
    }
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
    pub fn basis_walks(&self) -> &[Vec<usize>] {
        &self.basis
    }
    /// Intersection form on the chord basis.
    pub fn intersection_form(&self) -> &[Vec<i64>] {
        &self.form
    }

    /// Checks that a walk is closed and returns its starting node.
    pub fn check_closed(&self, walk: &[usize]) -> Result<usize> {
        let g = &self.graph;
        let Some(&h0) = walk.first() else {
            return Err(Error::NotAClosedWalk("empty skeleton walk".into()));
        };
        let start = g.node_of(h0);
        let mut cur = start;
        for &h in walk {
            if g.node_of(h) != cur {
                return Err(Error::NotAClosedWalk(format!("half-edge {h} does not leave node {cur}")));
            }
            cur = g.node_of(g.twin(h));
        }
        if cur != start {
            return Err(Error::NotAClosedWalk("skeleton walk does not return to its start".into()));
        }
        Ok(start)
    }

    /// Homology class of a closed walk in chord coordinates.
    pub fn walk_class(&self, walk: &[usize]) -> Vec<i64> {
        let mut c = vec![0; self.rank()];
        for &h in walk {
            let e = self.graph.edge_of(h);
            if let Some(i) = self.chord_index[e] {
                c[i] += if self.graph.edge_halves(e)[0] == h { 1 } else { -1 };
            }
        }
        c
    }

    /// Algebraic intersection number of two closed walks, computed from the
    /// local position of `x` relative to a copy of `y` pushed to its left.
    pub fn walk_pairing(&self, x: &[usize], y: &[usize]) -> i64 {
        let g = &self.graph;
        let visits = |w: &[usize]| -> Vec<(usize, usize, usize)> {
            (0..w.len())
                .map(|i| {
                    let prev = w[(i + w.len() - 1) % w.len()];
                    (g.node_of(w[i]), g.twin(prev), w[i])
                })
                .collect()
        };
        let vx = visits(x);
        let vy = visits(y);
        let mut total = 0;
        for &(n, g_in, g_out) in &vx {
            for &(m, h_in, h_out) in &vy {
                if n != m {
                    continue;
                }
                let rot = g.rotation(n);
                let k = rot.len();
                let p_out = g.pos[h_out];
                let p_in = g.pos[h_in];
                // strictly counterclockwise from h_out to h_in
                let inside = |h: usize| {
                    let p = g.pos[h];
                    let a = (p + k - p_out) % k;
                    let b = (p_in + k - p_out) % k;
                    a > 0 && a < b
                };
                total += inside(g_in) as i64 - inside(g_out) as i64;
            }
        }
        total
    }

    /// Intersection number of two classes.
    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                s += xi * self.form[i][j] * yj;
            }
        }
        s
    }

    fn curve(&self, walk: Vec<usize>) -> Curve {
        let mut nodes: Vec<usize> = walk.iter().map(|&h| self.graph.node_of(h)).collect();
        nodes.sort_unstable();
        let simple = nodes.windows(2).all(|w| w[0] != w[1]);
        let class = self.walk_class(&walk);
        Curve { walk, class, simple }
    }

    /// Half-edge at node `a` whose edge ends at node `b`.
    fn square_step(&self, a: Dart, b: Dart) -> usize {
        [half(a, FIRST), half(a, SECOND)]
            .into_iter()
            .find(|&h| self.graph.twin(h) / 3 == b)
            .expect("adjacent square nodes")
    }

    /// Path around the square at `v` from dart `x` to dart `y`.
    fn square_path(&self, v: usize, x: Dart, y: Dart, turn: Turn) -> Vec<usize> {
        let sq = self.crossings[v].square;
        let i = sq.iter().position(|&d| d == x).unwrap();
        let step = match turn {
            Turn::Forward => 1,
            Turn::Backward => 3,
        };
        let mut path = Vec::new();
        let mut cur = i;
        while sq[cur] != y {
            let next = (cur + step) % 4;
            path.push(self.square_step(sq[cur], sq[next]));
            cur = next;
        }
        path
    }

    /// Core curve of the annulus around vertex `v`: the square.
    pub fn gamma_v(&self, v: usize) -> Curve {
        let sq = self.crossings[v].square;
        let walk = (0..4).map(|i| self.square_step(sq[i], sq[(i + 1) % 4])).collect();
        self.curve(walk)
    }

    /// Kind of the corner of quadrant `j` at vertex `v`.
    pub fn corner_kind(&self, map: &MultiCurveMap, v: usize, j: usize) -> CornerKind {
        let info = &self.crossings[v];
        match crate::coorient::quadrant_kind(map, &self.eta, v, j) {
            QuadrantKind::Sink => CornerKind::Sink,
            QuadrantKind::Source => match info.kind {
                VertexType::Alternating => CornerKind::AlternatingSource,
                VertexType::NonAlternating => CornerKind::NonAlternatingSource,
            },
            QuadrantKind::Mixed => {
                if (info.sink_slot + 1) % 4 == j % 4 {
                    CornerKind::MixedAfterSink
                } else {
                    CornerKind::MixedBeforeSink
                }
            }
        }
    }

    /// Curve going once around face `f`, with the given corner routing.
    pub fn gamma_f_with(&self, map: &MultiCurveMap, f: usize, routing: &Routing) -> Result<Curve> {
        let mut walk = Vec::new();
        for &d in map.face(f) {
            walk.push(half(d, LEG));
            let x = map.twin(d);
            let y = map.rot_next(x);
            let v = map.vertex_of(x);
            let kind = self.corner_kind(map, v, map.slot_of(x));
            match routing.turn(kind) {
                None => walk.push(self.square_step(x, y)),
                Some(turn) => walk.extend(self.square_path(v, x, y, turn)),
            }
        }
        self.check_closed(&walk)?;
        Ok(self.curve(walk))
    }

    /// Curve going once around face `f`; requires an acyclic coorientation.
    pub fn gamma_f(&self, map: &MultiCurveMap, f: usize) -> Result<Curve> {
        if !acyclicity(map, &self.eta)?.is_acyclic() {
            return Err(Error::NotAcyclic);
        }
        self.gamma_f_with(map, f, &Routing::default())
    }

    /// Classes of the boundary components.
    pub fn boundary_classes(&self) -> Vec<Vec<i64>> {
        self.graph.boundary_components().iter().map(|w| self.walk_class(w)).collect()
    }

    /// Skeleton nodes visited by a curve.
    pub fn support(&self, c: &Curve) -> Vec<usize> {
        let mut s: Vec<usize> = c.walk.iter().map(|&h| self.graph.node_of(h)).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coorient::enumerate_eulerian;

    #[test]
    fn t1_invariants() {
        let m = MultiCurveMap::grid(1, 1).unwrap();
        for eta in enumerate_eulerian(&m) {
            let s = SurfaceModel::build(&m, &eta).unwrap();
            assert_eq!(s.graph().node_count(), 4);
            assert_eq!(s.euler_characteristic(), -2);
            assert_eq!(s.boundary_count(), 4);
            assert_eq!(s.genus(), 0);
            assert_eq!(s.rank(), 3);
        }
    }

    #[test]
    fn t6_invariants() {
        let m = MultiCurveMap::grid(2, 3).unwrap();
        for eta in enumerate_eulerian(&m) {
            let s = SurfaceModel::build(&m, &eta).unwrap();
            assert!(s.graph().is_connected());
            assert_eq!(s.euler_characteristic(), -12);
            assert_eq!(s.boundary_count(), 10);
            assert_eq!(s.genus(), 2);
            assert_eq!(s.rank(), 13);
        }
    }

    #[test]
    fn form_is_skew_and_kills_boundary() {
        let m = MultiCurveMap::grid(2, 3).unwrap();
        for eta in enumerate_eulerian(&m).into_iter().step_by(7) {
            let s = SurfaceModel::build(&m, &eta).unwrap();
            let j = s.intersection_form();
            for a in 0..s.rank() {
                assert_eq!(j[a][a], 0);
                for b in 0..s.rank() {
                    assert_eq!(j[a][b], -j[b][a]);
                }
            }
            let bc = s.boundary_classes();
            let mut total = vec![0; s.rank()];
            for c in &bc {
                for (t, x) in total.iter_mut().zip(c) {
                    *t += x;
                }
                for e in 0..s.rank() {
                    let mut u = vec![0; s.rank()];
                    u[e] = 1;
                    assert_eq!(s.pairing(c, &u), 0);
                }
            }
            assert!(total.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn gamma_v_is_simple_square() {
        let m = MultiCurveMap::grid(2, 3).unwrap();
        let eta = &enumerate_eulerian(&m)[0];
        let s = SurfaceModel::build(&m, eta).unwrap();
        for v in 0..6 {
            let c = s.gamma_v(v);
            assert_eq!(c.walk.len(), 4);
            assert!(c.simple);
            assert_eq!(s.walk_pairing(&c.walk, &c.walk), 0);
            for w in 0..6 {
                if w != v {
                    let d = s.gamma_v(w);
                    assert!(s.support(&c).iter().all(|n| !s.support(&d).contains(n)));
                }
            }
        }
    }
}
