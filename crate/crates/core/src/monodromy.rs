//! First-return maps as words of negative Dehn twists and their action on
//! the first homology of the section.

use serde::{Deserialize, Serialize};

use crate::coorient::{acyclicity, coherent_order, Coorientation, Node};
use crate::error::{Error, Result};
use crate::map::MultiCurveMap;
use crate::matrix::IntMatrix;
use crate::surface::{CornerKind, Curve, Routing, SurfaceModel};

/// Exponent of every twist in the factorization.
pub const TWIST_SIGN: i64 = -1;

/// The surface model of an acyclic coorientation together with its curves.
#[derive(Clone, Debug)]
pub struct CurveSystem {
    pub model: SurfaceModel,
    pub gamma_v: Vec<Curve>,
    pub gamma_f: Vec<Curve>,
    form: IntMatrix,
}

impl CurveSystem {
    pub fn build(map: &MultiCurveMap, eta: &Coorientation) -> Result<Self> {
        Self::with_routing(map, eta, &Routing::default())
    }

    pub fn with_routing(map: &MultiCurveMap, eta: &Coorientation, routing: &Routing) -> Result<Self> {
        if !acyclicity(map, eta)?.is_acyclic() {
            return Err(Error::NotAcyclic);
        }
        let model = SurfaceModel::build(map, eta)?;
        let gamma_v = (0..map.vertex_count()).map(|v| model.gamma_v(v)).collect();
        let gamma_f = (0..map.face_count()).map(|f| model.gamma_f_with(map, f, routing)).collect::<Result<_>>()?;
        let form = IntMatrix::from_rows(model.intersection_form());
        Ok(CurveSystem { model, gamma_v, gamma_f, form })
    }

    pub fn curve(&self, n: Node) -> &Curve {
        match n {
            Node::Vertex(v) => &self.gamma_v[v],
            Node::Face(f) => &self.gamma_f[f],
        }
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.form.dim()
    }

    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        self.model.pairing(x, y)
    }

    /// Twist `x ↦ x + k⟨c,x⟩c` along class `c` with exponent `k`.
    pub fn twist_matrix(&self, c: &[i64], k: i64) -> IntMatrix {
        let n = self.rank();
        // row vector cᵀJ
        let cj: Vec<i64> = (0..n).map(|j| (0..n).map(|i| c[i] * self.form.get(i, j)).sum()).collect();
        let mut m = IntMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, m.get(i, j) + k * c[i] * cj[j]);
            }
        }
        m
    }

    /// Image of the class `x` under the twist along `c` with exponent `k`.
    pub fn twist_class(&self, c: &[i64], k: i64, x: &[i64]) -> Vec<i64> {
        let p = self.pairing(c, x);
        x.iter().zip(c).map(|(xi, ci)| xi + k * p * ci).collect()
    }
}

/// One factor of a twist word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistEntry {
    pub node: Node,
    pub sign: i64,
    pub class: Vec<i64>,
    pub walk: Vec<usize>,
}

impl TwistEntry {
    pub fn label(&self) -> String {
        let curve = match self.node {
            Node::Face(f) => format!("gamma_f(face {f})"),
            Node::Vertex(v) => format!("gamma_v(vertex {v})"),
        };
        if self.sign < 0 {
            format!("T^{}[{curve}]", self.sign)
        } else {
            format!("T^+{}[{curve}]", self.sign)
        }
    }
}

/// Product of twists written left to right, from the last applied to the
/// first applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistWord {
    pub entries: Vec<TwistEntry>,
}

impl TwistWord {
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        self.entries.iter().enumerate().map(|(k, e)| format!("{}: {}", k + 1, e.label())).collect()
    }

    pub fn nodes(&self) -> Vec<Node> {
        self.entries.iter().map(|e| e.node).collect()
    }

    /// Matrix of the product.
    pub fn matrix(&self, sys: &CurveSystem) -> Result<IntMatrix> {
        let mut m = IntMatrix::identity(sys.rank());
        for e in &self.entries {
            m = m.mul(&sys.twist_matrix(&e.class, e.sign))?;
        }
        Ok(m)
    }
}

fn entry(sys: &CurveSystem, n: Node) -> TwistEntry {
    let c = sys.curve(n);
    TwistEntry { node: n, sign: TWIST_SIGN, class: c.class.clone(), walk: c.walk.clone() }
}

/// Twist word of a representation given lowest first.
pub fn twist_word(map: &MultiCurveMap, sys: &CurveSystem, representation: &[Node]) -> Result<TwistWord> {
    let order = coherent_order(map, sys.model.coorientation())?;
    if !order.is_extension(representation) {
        return Err(Error::BadRepresentation("not a linear extension of the coherent order".into()));
    }
    Ok(word_in_order(sys, representation))
}

/// Word over the curves of `sys` taken in `order` (lowest first), without
/// checking the order.
pub fn word_in_order(sys: &CurveSystem, order: &[Node]) -> TwistWord {
    TwistWord { entries: order.iter().rev().map(|&n| entry(sys, n)).collect() }
}

/// Homological action of the first-return map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyMatrix {
    pub matrix: IntMatrix,
    pub char_poly: Vec<i64>,
    pub determinant: i64,
    /// Lower bound for the stretch factor of the return map.
    pub spectral_radius: f64,
}

impl MonodromyMatrix {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        Ok(MonodromyMatrix {
            char_poly: matrix.char_poly()?,
            determinant: matrix.det()?,
            spectral_radius: matrix.spectral_radius(),
            matrix,
        })
    }
}

pub fn monodromy(map: &MultiCurveMap, sys: &CurveSystem, representation: &[Node]) -> Result<MonodromyMatrix> {
    MonodromyMatrix::new(twist_word(map, sys, representation)?.matrix(sys)?)
}

/// Whether two curves share no skeleton node.
fn disjoint(a: &TwistEntry, b: &TwistEntry, sys: &CurveSystem) -> bool {
    let g = sys.model.graph();
    let na: std::collections::HashSet<usize> = a.walk.iter().map(|&h| g.node_of(h)).collect();
    b.walk.iter().all(|&h| !na.contains(&g.node_of(h)))
}

/// Canonical form of a word under swaps of adjacent factors with disjoint
/// supports: the lexicographically least equivalent word, reading nodes
/// faces first.
pub fn commuting_normalize(word: &TwistWord, sys: &CurveSystem) -> TwistWord {
    let mut rest = word.entries.clone();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            let free = rest[..i].iter().all(|p| disjoint(p, &rest[i], sys));
            if free && best.is_none_or(|b| rest[i].node < rest[b].node) {
                best = Some(i);
            }
        }
        out.push(rest.remove(best.unwrap()));
    }
    TwistWord { entries: out }
}

/// One elementary flip between neighbouring acyclic coorientations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipMove {
    pub face: usize,
    /// `true` when the face is a sink of the earlier coorientation.
    pub sink_flip: bool,
}

/// Shortest flip path between two acyclic coorientations through acyclic
/// coorientations of the same class.
pub fn flip_path(map: &MultiCurveMap, eta: &Coorientation, nu: &Coorientation) -> Option<Vec<FlipMove>> {
    use crate::coorient::{flip, is_source, sink_faces, unflip};
    use std::collections::{HashMap, VecDeque};
    let mut prev: HashMap<Coorientation, Option<(Coorientation, FlipMove)>> = HashMap::new();
    prev.insert(eta.clone(), None);
    let mut queue = VecDeque::from([eta.clone()]);
    while let Some(mu) = queue.pop_front() {
        if &mu == nu {
            let mut moves = Vec::new();
            let mut cur = mu;
            while let Some(Some((p, m))) = prev.get(&cur).cloned() {
                moves.push(m);
                cur = p;
            }
            moves.reverse();
            return Some(moves);
        }
        let mut next = Vec::new();
        for f in sink_faces(map, &mu) {
            next.push((flip(map, &mu, f).unwrap(), FlipMove { face: f, sink_flip: true }));
        }
        for f in (0..map.face_count()).filter(|&f| is_source(map, &mu, f)) {
            next.push((unflip(map, &mu, f).unwrap(), FlipMove { face: f, sink_flip: false }));
        }
        for (x, m) in next {
            if !prev.contains_key(&x) {
                prev.insert(x.clone(), Some((mu.clone(), m)));
                queue.push_back(x);
            }
        }
    }
    None
}

/// Apply a move to a coorientation.
pub fn apply_move(map: &MultiCurveMap, mu: &Coorientation, m: &FlipMove) -> Result<Coorientation> {
    if m.sink_flip {
        crate::coorient::flip(map, mu, m.face)
    } else {
        crate::coorient::unflip(map, mu, m.face).ok_or(Error::NotASink { face: m.face })
    }
}

/// Representation with `first` as its lowest element.
pub fn representation_starting_with(map: &MultiCurveMap, eta: &Coorientation, first: Node) -> Result<Vec<Node>> {
    let mut order = coherent_order(map, eta)?;
    let k = order.index(first);
    if order.less.iter().any(|ys| ys.contains(&k)) {
        return Err(Error::BadRepresentation(format!("{first:?} is not minimal")));
    }
    order.less[k] = (0..order.len()).filter(|&x| x != k).collect();
    order.linear_extensions(1).pop().ok_or(Error::NotAcyclic)
}

/// Trace of moving the lowest twist of a word to the top by Hurwitz moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzStep {
    pub face: usize,
    pub moves: usize,
    /// Product equal to the original at every intermediate word.
    pub product_preserved: bool,
    pub char_poly_before: Vec<i64>,
    pub char_poly_after: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurwitzReport {
    pub path: Vec<FlipMove>,
    pub steps: Vec<HurwitzStep>,
    pub char_poly_eta: Vec<i64>,
    pub char_poly_nu: Vec<i64>,
    pub char_poly_equal: bool,
}

/// Moves the rightmost (first applied) factor of `word` to the left end,
/// conjugating each factor it crosses. Returns the new word and whether
/// the product stayed bitwise equal after every move.
pub fn hurwitz_lift_last(word: &TwistWord, sys: &CurveSystem) -> Result<(TwistWord, usize, bool)> {
    let target = word.matrix(sys)?;
    let mut w = word.clone();
    let mut ok = true;
    let mut moves = 0;
    let mut i = w.entries.len();
    while i > 1 {
        i -= 1;
        // a·b = b·(b⁻¹ a b) and b⁻¹ T_c b = T_{b⁻¹(c)}
        let b = w.entries[i].clone();
        let a = w.entries[i - 1].clone();
        let conj = TwistEntry { class: sys.twist_class(&b.class, -b.sign, &a.class), ..a };
        w.entries[i - 1] = b;
        w.entries[i] = conj;
        moves += 1;
        ok &= w.matrix(sys)? == target;
    }
    Ok((w, moves, ok))
}

fn char_poly_of(map: &MultiCurveMap, mu: &Coorientation) -> Result<Vec<i64>> {
    let sys = CurveSystem::build(map, mu)?;
    let rep = crate::coorient::representations(map, mu, 1)?.pop().ok_or(Error::NotAcyclic)?;
    Ok(monodromy(map, &sys, &rep)?.char_poly)
}

/// Compares the monodromies of two cohomologous acyclic coorientations along
/// a flip path, recording a Hurwitz trace for every flip.
pub fn hurwitz_compare(map: &MultiCurveMap, eta: &Coorientation, nu: &Coorientation) -> Result<HurwitzReport> {
    use crate::cohomology::{class_of, cochain_equivalent};
    for c in [eta, nu] {
        if !acyclicity(map, c)?.is_acyclic() {
            return Err(Error::NotAcyclic);
        }
    }
    if !cochain_equivalent(map, &class_of(map, eta)?, &class_of(map, nu)?) {
        return Err(Error::NotCohomologous);
    }
    let path = flip_path(map, eta, nu).ok_or(Error::NotCohomologous)?;
    let mut steps = Vec::with_capacity(path.len());
    let mut mu = eta.clone();
    for m in &path {
        let next = apply_move(map, &mu, m)?;
        // trace the flip in the direction where the face is a sink
        let (lo, hi) = if m.sink_flip { (&mu, &next) } else { (&next, &mu) };
        let sys = CurveSystem::build(map, lo)?;
        let rep = representation_starting_with(map, lo, Node::Face(m.face))?;
        let word = twist_word(map, &sys, &rep)?;
        let (_, moves, ok) = hurwitz_lift_last(&word, &sys)?;
        let before = MonodromyMatrix::new(word.matrix(&sys)?)?.char_poly;
        let after = char_poly_of(map, hi)?;
        let (char_poly_before, char_poly_after) = if m.sink_flip { (before, after) } else { (after, before) };
        steps.push(HurwitzStep { face: m.face, moves, product_preserved: ok, char_poly_before, char_poly_after });
        mu = next;
    }
    let char_poly_eta = char_poly_of(map, eta)?;
    let char_poly_nu = char_poly_of(map, nu)?;
    Ok(HurwitzReport { path, steps, char_poly_equal: char_poly_eta == char_poly_nu, char_poly_eta, char_poly_nu })
}

/// Strongly connected component index per face of the oriented dual graph.
pub fn dual_components(map: &MultiCurveMap, eta: &Coorientation) -> Vec<usize> {
    let out = crate::coorient::oriented_dual(map, eta);
    let n = out.len();
    let mut rev = vec![Vec::new(); n];
    for (f, arcs) in out.iter().enumerate() {
        for &(_, g) in arcs {
            rev[g].push(f);
        }
    }
    // Kosaraju: finishing order on the graph, then sweep the reverse graph
    let mut seen = vec![false; n];
    let mut finish = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (f, ref mut i)) = stack.last_mut() {
            if let Some(&(_, g)) = out[f].get(*i) {
                *i += 1;
                if !seen[g] {
                    seen[g] = true;
                    stack.push((g, 0));
                }
            } else {
                finish.push(f);
                stack.pop();
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut c = 0;
    for &s in finish.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = c;
        let mut stack = vec![s];
        while let Some(f) = stack.pop() {
            for &g in &rev[f] {
                if comp[g] == usize::MAX {
                    comp[g] = c;
                    stack.push(g);
                }
            }
        }
        c += 1;
    }
    comp
}

/// Dual edges lying on some oriented cycle.
pub fn cycle_edges(map: &MultiCurveMap, eta: &Coorientation) -> Vec<usize> {
    let comp = dual_components(map, eta);
    map.dual().edges.iter().filter(|de| comp[de.tail] == comp[de.head]).map(|de| de.edge).collect()
}

/// Number of connected pieces of the union of oriented cycles.
pub fn cycle_union_pieces(map: &MultiCurveMap, eta: &Coorientation) -> usize {
    let dual = map.dual();
    let mut uf = UnionFind::new(dual.face_count);
    let mut touched = vec![false; dual.face_count];
    for e in cycle_edges(map, eta) {
        let de = dual.edges[e];
        uf.union(de.tail, de.head);
        touched[de.tail] = true;
        touched[de.head] = true;
    }
    let mut roots: Vec<usize> = (0..dual.face_count).filter(|&f| touched[f]).map(|f| uf.find(f)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One connected component of the flip graph within a class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipComponent {
    pub size: usize,
    pub acyclic: usize,
    /// Member with the lexicographically least bits.
    pub representative: Coorientation,
    /// Pieces of the union of oriented cycles of the representative (0 when acyclic).
    pub cycle_pieces: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub class_key: Vec<i64>,
    pub members: usize,
    pub acyclic_members: usize,
    pub components: Vec<FlipComponent>,
    /// Components of the flip graph restricted to acyclic coorientations.
    pub acyclic_components: usize,
    /// Two cohomologous coorientations in distinct components, reported when
    /// the union of oriented cycles of one of them is disconnected.
    pub obstruction: Option<(Coorientation, Coorientation)>,
}

impl ConnectivityReport {
    pub fn acyclic_connected(&self) -> bool {
        self.acyclic_components <= 1
    }
}

/// Flip graph on the Eulerian coorientations cohomologous to `omega`.
pub fn flip_connectivity(map: &MultiCurveMap, omega: &crate::cohomology::Cochain) -> Result<ConnectivityReport> {
    use crate::cohomology::{check_cocycle, class_key, class_of};
    use crate::coorient::{enumerate_eulerian, flip, is_acyclic, sink_faces};
    use std::collections::HashMap;
    check_cocycle(map, omega)?;
    let key = class_key(map, omega);
    let members: Vec<Coorientation> = enumerate_eulerian(map)
        .into_iter()
        .filter(|c| class_of(map, c).map(|w| class_key(map, &w) == key).unwrap_or(false))
        .collect();
    if members.is_empty() {
        return Err(Error::ClassEmpty);
    }
    let index: HashMap<&Coorientation, usize> = members.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let acyclic: Vec<bool> = members.iter().map(|c| is_acyclic(map, c)).collect::<Result<_>>()?;
    let mut all = UnionFind::new(members.len());
    let mut acyc = UnionFind::new(members.len());
    for (i, mu) in members.iter().enumerate() {
        for f in sink_faces(map, mu) {
            let j = index[&flip(map, mu, f)?];
            all.union(i, j);
            if acyclic[i] && acyclic[j] {
                acyc.union(i, j);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..members.len() {
        let r = all.find(i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let components: Vec<FlipComponent> = groups
        .iter()
        .map(|(_, g)| {
            let rep = g.iter().map(|&i| &members[i]).min_by(|a, b| a.bits().cmp(b.bits())).unwrap().clone();
            FlipComponent {
                size: g.len(),
                acyclic: g.iter().filter(|&&i| acyclic[i]).count(),
                cycle_pieces: cycle_union_pieces(map, &rep),
                representative: rep,
            }
        })
        .collect();
    let mut acyclic_roots: Vec<usize> = (0..members.len()).filter(|&i| acyclic[i]).map(|i| acyc.find(i)).collect();
    acyclic_roots.sort_unstable();
    acyclic_roots.dedup();
    let obstruction = if components.len() > 1 {
        components.iter().position(|c| c.cycle_pieces > 1).map(|k| {
            let other = if k == 0 { 1 } else { 0 };
            (components[k].representative.clone(), components[other].representative.clone())
        })
    } else {
        None
    };
    Ok(ConnectivityReport {
        class_key: key,
        members: members.len(),
        acyclic_members: acyclic.iter().filter(|&&a| a).count(),
        components,
        acyclic_components: acyclic_roots.len(),
        obstruction,
    })
}

/// How the permutation of a common-model word was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommonMethod {
    Identity,
    /// Each flip along a flip path moves the flipped face from the bottom to the top.
    FlipPath,
    /// Representation of the reference order closest to the target's order.
    NearestExtension,
}

/// Local comparison at one vertex: corner kinds of the four quadrants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCase {
    pub vertex: usize,
    pub reference: [CornerKind; 4],
    pub target: [CornerKind; 4],
}

impl VertexCase {
    pub fn differs(&self) -> bool {
        self.reference != self.target
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonModel {
    pub method: CommonMethod,
    /// Order of the reference curves, lowest first.
    pub permutation: Vec<Node>,
    pub word: TwistWord,
    pub char_poly: Vec<i64>,
    pub target_char_poly: Vec<i64>,
    pub char_poly_agrees: bool,
    pub vertex_cases: Vec<VertexCase>,
}

/// Follows a flip path on an order of the reference curves: a flipped face is
/// brought to the bottom through factors with disjoint support and then
/// conjugated to the top; an unflip does the reverse. `None` when a
/// non-commuting factor blocks the face.
fn track_flips(sys: &CurveSystem, mut order: Vec<Node>, path: &[FlipMove]) -> Option<Vec<Node>> {
    let free = |a: Node, b: Node| disjoint(&entry(sys, a), &entry(sys, b), sys);
    for m in path {
        let f = Node::Face(m.face);
        let mut k = order.iter().position(|&n| n == f)?;
        if m.sink_flip {
            while k > 0 {
                if !free(order[k - 1], f) {
                    return None;
                }
                order.swap(k - 1, k);
                k -= 1;
            }
            order.remove(0);
            order.push(f);
        } else {
            while k + 1 < order.len() {
                if !free(order[k + 1], f) {
                    return None;
                }
                order.swap(k, k + 1);
                k += 1;
            }
            order.pop();
            order.insert(0, f);
        }
    }
    Some(order)
}

/// Word over the curves of `eta_ref` whose product models the first-return
/// map of `nu`.
pub fn common_model_word(map: &MultiCurveMap, eta_ref: &Coorientation, nu: &Coorientation) -> Result<CommonModel> {
    use crate::cohomology::{class_of, cochain_equivalent};
    let sys = CurveSystem::build(map, eta_ref)?;
    let target = CurveSystem::build(map, nu)?;
    let ref_order = coherent_order(map, eta_ref)?;
    let base = ref_order.linear_extensions(1).pop().ok_or(Error::NotAcyclic)?;
    let nu_rep = crate::coorient::representations(map, nu, 1)?.pop().ok_or(Error::NotAcyclic)?;
    let vertex_cases = (0..map.vertex_count())
        .map(|v| VertexCase {
            vertex: v,
            reference: std::array::from_fn(|j| sys.model.corner_kind(map, v, j)),
            target: std::array::from_fn(|j| target.model.corner_kind(map, v, j)),
        })
        .collect();

    let (method, permutation) = if eta_ref == nu {
        (CommonMethod::Identity, base)
    } else if let Some(order) = cochain_equivalent(map, &class_of(map, eta_ref)?, &class_of(map, nu)?)
        .then(|| flip_path(map, eta_ref, nu))
        .flatten()
        .and_then(|path| {
            let start = match path.first() {
                Some(m) if m.sink_flip => representation_starting_with(map, eta_ref, Node::Face(m.face)).ok()?,
                _ => base.clone(),
            };
            track_flips(&sys, start, &path)
        })
    {
        (CommonMethod::FlipPath, order)
    } else {
        let pos = |n: Node| nu_rep.iter().position(|&x| x == n).unwrap();
        let mut indeg = vec![0usize; ref_order.len()];
        for ys in &ref_order.less {
            for &y in ys {
                indeg[y] += 1;
            }
        }
        let mut order = Vec::with_capacity(ref_order.len());
        let mut done = vec![false; ref_order.len()];
        while order.len() < ref_order.len() {
            let x = (0..ref_order.len())
                .filter(|&x| !done[x] && indeg[x] == 0)
                .min_by_key(|&x| pos(ref_order.node(x)))
                .ok_or(Error::NotAcyclic)?;
            done[x] = true;
            for &y in &ref_order.less[x] {
                indeg[y] -= 1;
            }
            order.push(ref_order.node(x));
        }
        (CommonMethod::NearestExtension, order)
    };

    let word = word_in_order(&sys, &permutation);
    let char_poly = MonodromyMatrix::new(word.matrix(&sys)?)?.char_poly;
    let target_char_poly = monodromy(map, &target, &nu_rep)?.char_poly;
    Ok(CommonModel {
        method,
        permutation,
        word,
        char_poly_agrees: char_poly == target_char_poly,
        char_poly,
        target_char_poly,
        vertex_cases,
    })
}
