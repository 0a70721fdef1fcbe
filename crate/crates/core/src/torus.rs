//! Straight-line flow on a flat torus carrying a grid of horizontal and
//! vertical circles, in exact rational arithmetic.

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohomology::Cochain;
use crate::coorient::{acyclicity, flip_algorithm, Acyclicity, Coorientation, DualStep, DualWalk};
use crate::error::{Error, Result};
use crate::map::MultiCurveMap;

pub type Q = Ratio<i128>;

/// Default horizon for return-time searches, in units of length.
pub const DEFAULT_HORIZON: f64 = 100.0;

/// Unit direction of each dart slot: east, north, west, south.
const SLOT_DIR: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Grid of `p` horizontal circles `y = heights[i]` and `q` vertical circles
/// `x = abscissas[j]` on the unit torus, with its grid map.
#[derive(Clone, Debug)]
pub struct FlatMultiCurve {
    heights: Vec<Q>,
    abscissas: Vec<Q>,
    map: MultiCurveMap,
}

fn check_coords(c: &[Q], what: &str) -> Result<()> {
    if c.is_empty() {
        return Err(Error::InvalidGrid(format!("no {what}")));
    }
    for x in c {
        if x.is_negative() || *x >= Q::from_integer(1) {
            return Err(Error::InvalidGrid(format!("{what} {x} outside [0, 1)")));
        }
    }
    for (i, a) in c.iter().enumerate() {
        if c[..i].contains(a) {
            return Err(Error::DuplicateCoordinate(format!("{what} {a}")));
        }
    }
    Ok(())
}

/// Geometric event along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    /// Transverse crossing of an edge.
    Edge(usize),
    /// Passage through a crossing point.
    Vertex(usize),
}

/// Time along a trajectory `start + s·u`; its length is `s·|u|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Time {
    pub param: Q,
    pub speed2: i128,
}

impl Time {
    pub fn length(&self) -> f64 {
        q_to_f64(&self.param) * (self.speed2 as f64).sqrt()
    }

    /// Whether the length is at most `sqrt(bound2)`, decided exactly.
    pub fn length_at_most(&self, bound2: &Q) -> bool {
        &(self.param * self.param * Q::from_integer(self.speed2)) <= bound2
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Outcome of a first-return search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Return {
    At(Time),
    /// No hit up to the horizon.
    NoReturn,
    /// The trajectory runs through a crossing point before any hit.
    ThroughVertex(Time),
}

/// Ordered crossings of one family of parallel circles.
struct AxisEvents<'a> {
    coords: &'a [Q],
    start: Q,
    vel: i128,
    idx: usize,
    wrap: i128,
}

impl<'a> AxisEvents<'a> {
    fn new(coords: &'a [Q], start: Q, vel: i128) -> Option<Self> {
        if vel == 0 {
            return None;
        }
        let k = start.floor().to_integer();
        let frac = start - Q::from_integer(k);
        let n = coords.len();
        let (idx, wrap) = if vel > 0 {
            match coords.iter().position(|c| *c > frac) {
                Some(i) => (i, k),
                None => (0, k + 1),
            }
        } else {
            match coords.iter().rposition(|c| *c < frac) {
                Some(i) => (i, k),
                None => (n - 1, k - 1),
            }
        };
        Some(AxisEvents { coords, start, vel, idx, wrap })
    }

    fn peek(&self) -> (Q, usize) {
        let level = self.coords[self.idx] + Q::from_integer(self.wrap);
        ((level - self.start) / Q::from_integer(self.vel), self.idx)
    }

    fn advance(&mut self) {
        let n = self.coords.len();
        if self.vel > 0 {
            self.idx += 1;
            if self.idx == n {
                self.idx = 0;
                self.wrap += 1;
            }
        } else if self.idx == 0 {
            self.idx = n - 1;
            self.wrap -= 1;
        } else {
            self.idx -= 1;
        }
    }
}

/// Iterator over the events of one trajectory.
pub struct Events<'a> {
    model: &'a FlatMultiCurve,
    start: (Q, Q),
    u: (i64, i64),
    xs: Option<AxisEvents<'a>>,
    ys: Option<AxisEvents<'a>>,
    max_param: Q,
}

impl Iterator for Events<'_> {
    type Item = (Q, Event);

    fn next(&mut self) -> Option<(Q, Event)> {
        let m = self.model;
        let tx = self.xs.as_ref().map(|e| e.peek());
        let ty = self.ys.as_ref().map(|e| e.peek());
        let (t, ev) = match (tx, ty) {
            (Some((s, j)), Some((t, i))) if s == t => {
                self.xs.as_mut()?.advance();
                self.ys.as_mut()?.advance();
                (s, Event::Vertex(m.vertex(i, j)))
            }
            (Some((s, j)), ty) if ty.is_none_or(|(t, _)| s < t) => {
                self.xs.as_mut()?.advance();
                let y = self.start.1 + s * Q::from_integer(self.u.1 as i128);
                match cell_of(&m.heights, y) {
                    Ok(i) => (s, Event::Edge(m.vertical_edge(i, j))),
                    Err(i) => (s, Event::Vertex(m.vertex(i, j))),
                }
            }
            (_, Some((t, i))) => {
                self.ys.as_mut()?.advance();
                let x = self.start.0 + t * Q::from_integer(self.u.0 as i128);
                match cell_of(&m.abscissas, x) {
                    Ok(j) => (t, Event::Edge(m.horizontal_edge(i, j))),
                    Err(j) => (t, Event::Vertex(m.vertex(i, j))),
                }
            }
            _ => return None,
        };
        (t <= self.max_param).then_some((t, ev))
    }
}

/// Index of the cell `[c_j, c_{j+1})` containing `x` mod 1, or `Err(j)` when
/// `x` is exactly `c_j`.
fn cell_of(coords: &[Q], x: Q) -> std::result::Result<usize, usize> {
    let frac = x - x.floor();
    if let Some(j) = coords.iter().position(|c| *c == frac) {
        return Err(j);
    }
    Ok(coords.iter().rposition(|c| *c < frac).unwrap_or(coords.len() - 1))
}

impl FlatMultiCurve {
    /// Embeds the `p x q` grid map with the given circle positions, each
    /// list in `[0, 1)` and sorted on output.
    pub fn embed_grid(p: usize, q: usize, heights: Vec<Q>, abscissas: Vec<Q>) -> Result<Self> {
        if heights.len() != p || abscissas.len() != q {
            return Err(Error::InvalidGrid(format!(
                "expected {p} heights and {q} abscissas, got {} and {}",
                heights.len(),
                abscissas.len()
            )));
        }
        check_coords(&heights, "height")?;
        check_coords(&abscissas, "abscissa")?;
        let (mut heights, mut abscissas) = (heights, abscissas);
        heights.sort();
        abscissas.sort();
        Ok(FlatMultiCurve { heights, abscissas, map: MultiCurveMap::grid(p, q)? })
    }

    /// Equally spaced circles starting at 0.
    pub fn uniform(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidGrid(format!("{p}x{q}")));
        }
        let spaced = |n: usize| (0..n).map(|i| Q::new(i as i128, n as i128)).collect();
        Self::embed_grid(p, q, spaced(p), spaced(q))
    }

    pub fn map(&self) -> &MultiCurveMap {
        &self.map
    }
    pub fn heights(&self) -> &[Q] {
        &self.heights
    }
    pub fn abscissas(&self) -> &[Q] {
        &self.abscissas
    }
    pub fn p(&self) -> usize {
        self.heights.len()
    }
    pub fn q(&self) -> usize {
        self.abscissas.len()
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        (i % self.p()) * self.q() + (j % self.q())
    }

    /// Edge of horizontal circle `i` between verticals `j` and `j + 1`.
    pub fn horizontal_edge(&self, i: usize, j: usize) -> usize {
        self.map.edge_of(self.map.dart_at(self.vertex(i, j), 0))
    }

    /// Edge of vertical circle `j` between horizontals `i` and `i + 1`.
    pub fn vertical_edge(&self, i: usize, j: usize) -> usize {
        self.map.edge_of(self.map.dart_at(self.vertex(i, j), 1))
    }

    /// Coorienting normal of edge `e` as an axis vector.
    pub fn normal(&self, eta: &Coorientation, e: usize) -> (i64, i64) {
        let (dx, dy) = SLOT_DIR[self.map.slot_of(self.map.first_dart(e))];
        let left = (-dy, dx);
        if eta.bit(e) {
            left
        } else {
            (-left.0, -left.1)
        }
    }

    /// Whether crossing `e` with velocity `u` lands on the section.
    pub fn hits(&self, eta: &Coorientation, e: usize, u: (i64, i64)) -> bool {
        let n = self.normal(eta, e);
        n.0 * u.0 + n.1 * u.1 > 0
    }

    /// Square of the largest cell diagonal.
    pub fn max_face_diameter2(&self) -> Q {
        let gaps = |c: &[Q]| -> Vec<Q> {
            (0..c.len())
                .map(|i| if i + 1 < c.len() { c[i + 1] - c[i] } else { c[0] + Q::from_integer(1) - c[i] })
                .collect()
        };
        let w = gaps(&self.abscissas).into_iter().max().unwrap();
        let h = gaps(&self.heights).into_iter().max().unwrap();
        w * w + h * h
    }

    /// Square of the return bound `|Γ_2|·d`.
    pub fn return_bound2(&self) -> Q {
        let n = Q::from_integer(self.map.face_count() as i128);
        n * n * self.max_face_diameter2()
    }

    fn on_gamma(&self, start: (Q, Q)) -> bool {
        cell_of(&self.heights, start.1).is_err() || cell_of(&self.abscissas, start.0).is_err()
    }

    /// Events of the trajectory from `start` with velocity `u`, strictly
    /// after time 0 and up to parameter `max_param`, in order. Starting on
    /// a circle does not count as an event.
    pub fn events(&self, start: (Q, Q), u: (i64, i64), max_param: Q) -> Events<'_> {
        let mut xs = AxisEvents::new(&self.abscissas, start.0, u.0 as i128);
        let mut ys = AxisEvents::new(&self.heights, start.1, u.1 as i128);
        // a start on a circle sits exactly on the first level in that direction
        for ev in [&mut xs, &mut ys].into_iter().flatten() {
            if ev.peek().0.is_zero() {
                ev.advance();
            }
        }
        Events { model: self, start, u, xs, ys, max_param }
    }

    /// Largest parameter whose length stays within `horizon`.
    fn max_param(u: (i64, i64), horizon: f64) -> Q {
        let speed = ((u.0 * u.0 + u.1 * u.1) as f64).sqrt();
        // round up so that no event inside the horizon is lost
        let den = 1_000_000i128;
        Q::new((horizon / speed * den as f64).ceil() as i128 + 1, den)
    }

    /// First time the trajectory from `start` with velocity `u` hits the
    /// section of `eta`.
    pub fn first_return_time(&self, eta: &Coorientation, start: (Q, Q), u: (i64, i64), horizon: f64) -> Result<Return> {
        if self.on_gamma(start) {
            return Err(Error::StartOnGamma);
        }
        Ok(self.next_hit(eta, start, u, Q::zero(), false, horizon))
    }

    /// First hit at parameter `> from` (or `>= from` when `closed`).
    fn next_hit(&self, eta: &Coorientation, start: (Q, Q), u: (i64, i64), from: Q, closed: bool, horizon: f64) -> Return {
        let speed2 = (u.0 * u.0 + u.1 * u.1) as i128;
        let max = Self::max_param(u, horizon);
        for (t, ev) in self.events(start, u, max) {
            if t < from || (t == from && !closed) {
                continue;
            }
            let time = Time { param: t, speed2 };
            match ev {
                Event::Vertex(_) => return Return::ThroughVertex(time),
                Event::Edge(e) if self.hits(eta, e, u) => {
                    return if time.length() <= horizon { Return::At(time) } else { Return::NoReturn };
                }
                Event::Edge(_) => {}
            }
        }
        Return::NoReturn
    }

    /// Dual cycle that winds once around the horizontal direction, through
    /// the cells between horizontals 0 and 1, and one around the vertical
    /// direction, through the cells between verticals 0 and 1.
    pub fn grid_cycles(&self) -> [DualWalk; 2] {
        let m = &self.map;
        let horizontal = (0..self.q())
            .map(|j| {
                let d = m.dart_at(self.vertex(0, j), 1);
                DualStep { edge: m.edge_of(d), forward: !m.is_first(d) }
            })
            .collect();
        let vertical = (0..self.p())
            .map(|i| {
                let d = m.dart_at(self.vertex(i, 0), 0);
                DualStep { edge: m.edge_of(d), forward: m.is_first(d) }
            })
            .collect();
        [DualWalk { steps: horizontal }, DualWalk { steps: vertical }]
    }

    /// Values of a cochain on the two grid cycles.
    pub fn periods(&self, c: &Cochain) -> (i64, i64) {
        let [h, v] = self.grid_cycles();
        (c.eval(&h), c.eval(&v))
    }

    /// Cocycle with the given periods on the grid cycles, supported on the
    /// vertical edges of column 0 and the horizontal edges of row 0.
    pub fn grid_class(&self, a: i64, b: i64) -> Cochain {
        let m = &self.map;
        let mut w = vec![0i64; m.edge_count()];
        for i in 0..self.p() {
            let d = m.dart_at(self.vertex(i, 0), 1);
            // the horizontal cycle crosses this column once
            w[m.edge_of(d)] = if m.is_first(d) { -a } else { a };
        }
        for j in 0..self.q() {
            let d = m.dart_at(self.vertex(0, j), 0);
            w[m.edge_of(d)] = if m.is_first(d) { b } else { -b };
        }
        Cochain { weights: w }
    }
}

/// Trajectory that avoids the section up to the horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub start: [String; 2],
    pub direction: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffVerdict {
    /// Every sampled trajectory returned and no escape witness was found.
    pub bounded: bool,
    pub samples: usize,
    /// Samples that ran through a crossing point and were set aside.
    pub degenerate: usize,
    pub escapes: usize,
    pub max_return: Option<f64>,
    /// The bound `|Γ_2|·d` with `d` the largest cell diameter.
    pub bound: f64,
    pub within_bound: bool,
    /// Counts of return lengths in ten equal bins over `[0, bound]`, plus
    /// one overflow bin.
    pub histogram: Vec<usize>,
    pub witness: Option<Witness>,
}

/// Generic start inside a cell and a nonzero integer direction.
fn sample_start<R: Rng>(rng: &mut R, model: &FlatMultiCurve) -> ((Q, Q), (i64, i64)) {
    const DEN: i128 = 10_007;
    loop {
        let x = Q::new(rng.gen_range(0..DEN), DEN);
        let y = Q::new(rng.gen_range(0..DEN), DEN);
        let a = rng.gen_range(-1000..=1000);
        let b = rng.gen_range(-1000..=1000);
        if (a, b) != (0, 0) && !model.on_gamma((x, y)) {
            return ((x, y), (a, b));
        }
    }
}

fn sample_rng(seed: u64, k: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(k as u64))
}

/// Net winding of a dual walk, as a lattice direction.
fn winding(model: &FlatMultiCurve, walk: &DualWalk) -> (i64, i64) {
    let m = model.map();
    let (mut dx, mut dy) = (0i64, 0i64);
    for s in &walk.steps {
        // tail is right of the first dart, head is left of it
        let (fx, fy) = SLOT_DIR[m.slot_of(m.first_dart(s.edge))];
        let left = (-fy, fx);
        let sign = if s.forward { 1 } else { -1 };
        dx += sign * left.0;
        dy += sign * left.1;
    }
    (dx / model.q() as i64, dy / model.p() as i64)
}

/// Searches for a trajectory escaping the section, trying the reversed
/// winding of a dual cycle first and then small lattice directions.
pub fn escape_witness(model: &FlatMultiCurve, eta: &Coorientation, cycle: Option<&DualWalk>, horizon: f64) -> Option<Witness> {
    let mut dirs = Vec::new();
    if let Some(w) = cycle {
        let (a, b) = winding(model, w);
        if (a, b) != (0, 0) {
            dirs.push((-a, -b));
        }
    }
    for r in 1..=4i64 {
        for a in -r..=r {
            for b in -r..=r {
                if a.abs().max(b.abs()) == r && !dirs.contains(&(a, b)) {
                    dirs.push((a, b));
                }
            }
        }
    }
    // cell centres and off-centre points
    let mut starts = Vec::new();
    let (ys, xs) = (model.heights(), model.abscissas());
    let mid = |c: &[Q], k: usize, t: Q| {
        let next = if k + 1 < c.len() { c[k + 1] } else { c[0] + Q::from_integer(1) };
        c[k] + (next - c[k]) * t
    };
    for t in [Q::new(1, 2), Q::new(1, 3), Q::new(2, 7)] {
        for i in 0..ys.len() {
            for j in 0..xs.len() {
                starts.push((mid(xs, j, t), mid(ys, i, Q::new(1, 1) - t)));
            }
        }
    }
    for u in dirs {
        for &s in &starts {
            if matches!(model.first_return_time(eta, s, u, horizon), Ok(Return::NoReturn)) {
                return Some(Witness { start: [s.0.to_string(), s.1.to_string()], direction: u });
            }
        }
    }
    None
}

/// Samples trajectories and decides whether every one returns to the
/// section of `eta` within the horizon.
pub fn verify_birkhoff(model: &FlatMultiCurve, eta: &Coorientation, samples: usize, horizon: f64, seed: u64) -> Result<BirkhoffVerdict> {
    let cycle = match acyclicity(model.map(), eta)? {
        Acyclicity::Acyclic(_) => None,
        Acyclicity::Cyclic(w) => Some(w),
    };
    let outcomes: Vec<Return> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let (s, u) = sample_start(&mut rng, model);
            model.first_return_time(eta, s, u, horizon)
        })
        .collect::<Result<_>>()?;
    let bound2 = model.return_bound2();
    let bound = q_to_f64(&bound2).sqrt();
    let mut histogram = vec![0usize; 11];
    let (mut degenerate, mut escapes) = (0, 0);
    let mut max_time: Option<Time> = None;
    let mut within_bound = true;
    for r in &outcomes {
        match r {
            Return::At(t) => {
                within_bound &= t.length_at_most(&bound2);
                let bin = ((t.length() / bound) * 10.0).floor() as usize;
                histogram[bin.min(10)] += 1;
                if max_time.is_none_or(|m| m.length() < t.length()) {
                    max_time = Some(*t);
                }
            }
            Return::NoReturn => escapes += 1,
            Return::ThroughVertex(_) => degenerate += 1,
        }
    }
    let witness = if escapes > 0 || cycle.is_some() { escape_witness(model, eta, cycle.as_ref(), horizon) } else { None };
    Ok(BirkhoffVerdict {
        bounded: escapes == 0 && witness.is_none(),
        samples,
        degenerate,
        escapes,
        max_return: max_time.map(|t| t.length()),
        bound,
        within_bound,
        histogram,
        witness,
    })
}

/// Hitting times of the intermediate sections for one start on the section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationSample {
    pub start: [String; 2],
    pub direction: (i64, i64),
    /// `s_1, ..., s_n` as lengths.
    pub times: Vec<f64>,
    pub nondecreasing: bool,
    /// `s_n` equals the first return time exactly.
    pub matches_return: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationVerdict {
    pub samples: usize,
    /// Starts excluded because the trajectory meets a crossing point.
    pub excluded: usize,
    pub holds: bool,
    pub failures: Vec<FactorizationSample>,
}

/// Start on the section: a point inside edge `e` with velocity on the
/// coorienting side.
fn sample_on_section<R: Rng>(rng: &mut R, model: &FlatMultiCurve, eta: &Coorientation) -> ((Q, Q), (i64, i64), usize) {
    const DEN: i128 = 10_007;
    let (p, q) = (model.p(), model.q());
    loop {
        let i = rng.gen_range(0..p);
        let j = rng.gen_range(0..q);
        let t = Q::new(rng.gen_range(1..DEN), DEN);
        let horizontal = rng.gen_bool(0.5);
        let (ys, xs) = (model.heights(), model.abscissas());
        let next = |c: &[Q], k: usize| if k + 1 < c.len() { c[k + 1] } else { c[0] + Q::from_integer(1) };
        let (pt, e) = if horizontal {
            ((xs[j] + (next(xs, j) - xs[j]) * t, ys[i]), model.horizontal_edge(i, j))
        } else {
            ((xs[j], ys[i] + (next(ys, i) - ys[i]) * t), model.vertical_edge(i, j))
        };
        let u = (rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000));
        if u != (0, 0) && model.hits(eta, e, u) {
            let wrap = |x: Q| x - x.floor();
            return ((wrap(pt.0), wrap(pt.1)), u, e);
        }
    }
}

/// Checks that hitting the sections of the flip sequence one after the
/// other ends exactly at the first return to the section of `eta`.
pub fn verify_factorization(
    model: &FlatMultiCurve,
    eta: &Coorientation,
    face_order: &[usize],
    samples: usize,
    horizon: f64,
    seed: u64,
) -> Result<FactorizationVerdict> {
    let seq = flip_algorithm(model.map(), eta, face_order)?;
    let results: Vec<Option<FactorizationSample>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let (s, u, e0) = sample_on_section(&mut rng, model, eta);
            let speed2 = (u.0 * u.0 + u.1 * u.1) as i128;
            let mut times = Vec::with_capacity(seq.len() - 1);
            let mut prev = Q::zero();
            for eta_i in &seq[1..] {
                // the start point itself lies on the next section
                if prev.is_zero() && model.hits(eta_i, e0, u) {
                    times.push(Time { param: prev, speed2 });
                    continue;
                }
                match model.next_hit(eta_i, s, u, prev, true, horizon) {
                    Return::At(t) => {
                        times.push(t);
                        prev = t.param;
                    }
                    _ => return None,
                }
            }
            let direct = match model.next_hit(eta, s, u, Q::zero(), false, horizon) {
                Return::At(t) => t,
                _ => return None,
            };
            let nondecreasing = times.windows(2).all(|w| w[0].param <= w[1].param);
            let matches_return = times.last().is_some_and(|t| t.param == direct.param);
            Some(FactorizationSample {
                start: [s.0.to_string(), s.1.to_string()],
                direction: u,
                times: times.iter().map(Time::length).collect(),
                nondecreasing,
                matches_return,
            })
        })
        .collect();
    let excluded = results.iter().filter(|r| r.is_none()).count();
    let failures: Vec<FactorizationSample> =
        results.into_iter().flatten().filter(|r| !(r.nondecreasing && r.matches_return)).collect();
    Ok(FactorizationVerdict { samples, excluded, holds: failures.is_empty(), failures })
}
