//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the summary is always printed.

mod common;

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use birkhoff_core::cohomology::{class_key, class_of, construct_coorientation, Cochain, Construction};
use birkhoff_core::coorient::{
    cohomology_eval, enumerate_eulerian, flip, flip_algorithm, is_acyclic, random_face_order, representations,
    sink_faces, unflip, Coorientation, Node,
};
use birkhoff_core::matrix::IntMatrix;
use birkhoff_core::monodromy::{flip_connectivity, hurwitz_compare, monodromy, twist_word, CurveSystem};
use birkhoff_core::surface::SurfaceModel;
use birkhoff_core::torus::{verify_birkhoff, verify_factorization, FlatMultiCurve};
use birkhoff_core::MultiCurveMap;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn t6() -> MultiCurveMap {
    load("t6")
}

/// Normal of edge `e` on the left of dart `d`.
fn normal_left(map: &MultiCurveMap, eta: &Coorientation, d: usize) -> bool {
    eta.bit(map.edge_of(d)) == map.is_first(d)
}

fn flip_cyclicity() -> Outcome {
    let map = t6();
    let n = map.face_count();
    let etas = acyclic(&map);
    let mut runs = 0;
    for (k, eta) in etas.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for _ in 0..10 {
            let order = random_face_order(&map, eta, &mut rng).map_err(|e| e.to_string())?;
            let seq = flip_algorithm(&map, eta, &order).map_err(|e| e.to_string())?;
            ensure!(seq.len() == n + 1, "sequence of length {}", seq.len());
            ensure!(&seq[n] == eta, "no return after {n} flips");
            ensure!(seq[1..n].iter().all(|mu| mu != eta), "returned to eta before {n} flips");
            for (s, mu) in seq.iter().enumerate() {
                // an edge changed iff exactly one of its two faces was flipped
                let flipped: HashSet<usize> = order[..s].iter().copied().collect();
                for e in 0..map.edge_count() {
                    let d = map.first_dart(e);
                    let straddles = flipped.contains(&map.right_face(d)) != flipped.contains(&map.left_face(d));
                    ensure!((mu.bit(e) != eta.bit(e)) == straddles, "straddle fails at step {s}, edge {e}");
                }
            }
            runs += 1;
        }
    }
    Ok(format!("{} coorientations x 10 orders, {runs} runs of exactly {n} flips", etas.len()))
}

fn class_round_trip() -> Outcome {
    let mut realized = 0;
    for name in ["t1", "t6"] {
        let map = load(name);
        let brute = brute_force_eulerian(&map);
        ensure!(brute.len() == enumerate_eulerian(&map).len(), "{name}: enumeration misses coorientations");
        let cycles: Vec<_> = non_tree_edges(&map).into_iter().map(|e| fundamental_cycle(&map, e)).collect();
        for eta in &brute {
            let class = class_of(&map, eta).map_err(|e| e.to_string())?;
            let built = match construct_coorientation(&map, &class).map_err(|e| e.to_string())? {
                Construction::Realized { coorientation, .. } => coorientation,
                Construction::Obstructed(c) => return Err(format!("{name}: realizable class obstructed by {c:?}")),
            };
            ensure!(brute.contains(&built), "{name}: result is not Eulerian");
            for c in &cycles {
                ensure!(
                    cohomology_eval(&map, eta, c).unwrap() == cohomology_eval(&map, &built, c).unwrap(),
                    "{name}: class changed"
                );
            }
            realized += 1;
        }
    }

    let mut certificates = Vec::new();
    for (p, q) in [(2, 3), (1, 1)] {
        let model = FlatMultiCurve::uniform(p, q).map_err(|e| e.to_string())?;
        let map = model.map();
        let mut pairs: Vec<(i64, i64)> = (-8i64..=8).flat_map(|a| (-8i64..=8).map(move |b| (a, b))).collect();
        pairs.sort_by_key(|&(a, b)| (a.abs() + b.abs(), a, b));
        for (a, b) in pairs {
            if certificates.len() >= 20 {
                break;
            }
            let omega: Cochain = model.grid_class(a, b);
            if let Ok(Construction::Obstructed(cert)) = construct_coorientation(map, &omega) {
                ensure!(cert.walk.faces(map).is_ok(), "certificate is not a closed walk");
                ensure!(cert.length == cert.walk.len() as i64, "certificate length mismatch");
                ensure!(omega.eval(&cert.walk) == cert.omega, "certificate value mismatch");
                ensure!(cert.length < cert.omega, "certificate does not violate |c| >= omega(c)");
                certificates.push(((p, q), (a, b)));
            }
        }
    }
    ensure!(certificates.len() == 20, "only {} infeasible classes found", certificates.len());
    Ok(format!("{realized} classes realized on T1 and T6, 20 certificates with |c| < omega(c)"))
}

fn birkhoff_flat() -> Outcome {
    let mut total = 0;
    for p in 1..=2 {
        for q in 1..=3 {
            let model = FlatMultiCurve::uniform(p, q).map_err(|e| e.to_string())?;
            for eta in enumerate_eulerian(model.map()) {
                let acyc = is_acyclic(model.map(), &eta).unwrap();
                let v = verify_birkhoff(&model, &eta, 1000, 100.0, 1).map_err(|e| e.to_string())?;
                ensure!(v.bounded == acyc, "{p}x{q}: verdict {} but acyclic {acyc}", v.bounded);
                ensure!(v.samples >= 1000, "too few samples");
                if acyc {
                    ensure!(v.within_bound, "{p}x{q}: return {:?} above bound {}", v.max_return, v.bound);
                } else {
                    ensure!(v.witness.is_some(), "{p}x{q}: cyclic without escape witness");
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} coorientations on grids up to 2x3 agree, 1000 directions each"))
}

fn factorization() -> Outcome {
    let model = FlatMultiCurve::uniform(2, 3).map_err(|e| e.to_string())?;
    let map = model.map();
    let mut excluded = 0;
    let etas = acyclic(map);
    for eta in &etas {
        let rep = representations(map, eta, 1).map_err(|e| e.to_string())?.pop().unwrap();
        let v = verify_factorization(&model, eta, &birkhoff_core::coorient::faces_of(&rep), 1000, 100.0, 3)
            .map_err(|e| e.to_string())?;
        ensure!(v.holds && v.failures.is_empty(), "failure {:?}", v.failures.first());
        excluded += v.excluded;
    }
    Ok(format!("{} coorientations x 1000 samples, {excluded} excluded at crossing points", etas.len()))
}

fn word_shape() -> Outcome {
    let mut words = 0;
    for (name, map) in test_maps() {
        let expected = map.vertex_count() + map.face_count();
        for eta in acyclic(&map) {
            let sys = CurveSystem::build(&map, &eta).map_err(|e| e.to_string())?;
            for rep in representations(&map, &eta, 100).map_err(|e| e.to_string())? {
                let word = twist_word(&map, &sys, &rep).map_err(|e| e.to_string())?;
                ensure!(word.len() == expected, "{name}: length {}", word.len());
                ensure!(word.entries.iter().all(|e| e.sign < 0), "{name}: positive twist");
                let nodes: HashSet<Node> = word.nodes().into_iter().collect();
                ensure!(nodes.len() == expected, "{name}: repeated node");
                // lowest first is the word read right to left
                let mut pos = BTreeMap::new();
                for (i, n) in word.nodes().into_iter().rev().enumerate() {
                    pos.insert(n, i);
                }
                for v in 0..map.vertex_count() {
                    for j in 0..4 {
                        let a = normal_left(&map, &eta, map.dart_at(v, j));
                        let b = normal_left(&map, &eta, map.dart_at(v, (j + 1) % 4));
                        let f = map.quadrant_face(v, j);
                        let (pv, pf) = (pos[&Node::Vertex(v)], pos[&Node::Face(f)]);
                        if !a && b {
                            ensure!(pv < pf, "{name}: vertex {v} not below its source face {f}");
                        } else {
                            ensure!(pf < pv, "{name}: vertex {v} not above face {f}");
                        }
                    }
                }
                words += 1;
            }
        }
    }
    Ok(format!("{words} words of length |V|+|F| with negative twists extending the coherent order"))
}

fn representation_independence() -> Outcome {
    let map = t6();
    let mut checked = 0;
    for eta in acyclic(&map) {
        let sys = CurveSystem::build(&map, &eta).map_err(|e| e.to_string())?;
        let reps = representations(&map, &eta, 100).map_err(|e| e.to_string())?;
        let first = monodromy(&map, &sys, &reps[0]).map_err(|e| e.to_string())?.matrix;
        for rep in &reps {
            ensure!(monodromy(&map, &sys, rep).unwrap().matrix == first, "monodromy depends on representation");
            checked += 1;
        }
    }
    Ok(format!("{checked} representations give identical matrices"))
}

fn symplectic(m: &IntMatrix, j: &IntMatrix) -> bool {
    m.transpose().mul(j).and_then(|x| x.mul(m)).map(|x| &x == j).unwrap_or(false) && m.det().ok() == Some(1)
}

fn symplectic_preservation() -> Outcome {
    let (mut twists, mut monodromies) = (0, 0);
    for (name, map) in test_maps() {
        for eta in acyclic(&map) {
            let sys = CurveSystem::build(&map, &eta).map_err(|e| e.to_string())?;
            let j = sys.form().clone();
            let rep = representations(&map, &eta, 1).unwrap().pop().unwrap();
            let word = twist_word(&map, &sys, &rep).map_err(|e| e.to_string())?;
            for e in &word.entries {
                ensure!(symplectic(&sys.twist_matrix(&e.class, e.sign), &j), "{name}: twist not symplectic");
                twists += 1;
            }
            ensure!(symplectic(&word.matrix(&sys).unwrap(), &j), "{name}: monodromy not symplectic");
            monodromies += 1;
        }
    }
    Ok(format!("{twists} twist matrices and {monodromies} monodromies satisfy MtJM = J, det 1"))
}

fn hurwitz_shadow() -> Outcome {
    let map = t6();
    let etas = acyclic(&map);
    let keys: Vec<Vec<i64>> = etas.iter().map(|e| class_key(&map, &class_of(&map, e).unwrap())).collect();
    let (mut pairs, mut moves) = (0, 0);
    for (a, eta) in etas.iter().enumerate() {
        for (b, nu) in etas.iter().enumerate() {
            if a == b || keys[a] != keys[b] {
                continue;
            }
            let r = hurwitz_compare(&map, eta, nu).map_err(|e| e.to_string())?;
            ensure!(r.char_poly_equal && r.char_poly_eta == r.char_poly_nu, "pair {a},{b}: char polys differ");
            for s in &r.steps {
                ensure!(s.product_preserved, "pair {a},{b}: product changed at face {}", s.face);
                ensure!(s.char_poly_before == s.char_poly_after, "pair {a},{b}: char poly changed");
                moves += s.moves;
            }
            pairs += 1;
        }
    }
    Ok(format!("{pairs} cohomologous pairs, {moves} Hurwitz moves preserve the product"))
}

/// Acyclic coorientations reachable from `start` by sink flips and
/// source unflips.
fn acyclic_reach(map: &MultiCurveMap, start: &Coorientation) -> usize {
    let mut seen: HashSet<Vec<bool>> = HashSet::from([start.bits().to_vec()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(mu) = queue.pop_front() {
        let mut next: Vec<Coorientation> = sink_faces(map, &mu).into_iter().map(|f| flip(map, &mu, f).unwrap()).collect();
        next.extend((0..map.face_count()).filter_map(|f| unflip(map, &mu, f)));
        for nu in next {
            if is_acyclic(map, &nu).unwrap() && seen.insert(nu.bits().to_vec()) {
                queue.push_back(nu);
            }
        }
    }
    seen.len()
}

fn flip_connectivity_check() -> Outcome {
    let map = t6();
    let mut classes: BTreeMap<Vec<i64>, Vec<Coorientation>> = BTreeMap::new();
    for eta in enumerate_eulerian(&map) {
        classes.entry(class_key(&map, &class_of(&map, &eta).unwrap())).or_default().push(eta);
    }
    let mut strata = 0;
    for members in classes.values() {
        let acyc: Vec<&Coorientation> = members.iter().filter(|e| is_acyclic(&map, e).unwrap()).collect();
        let report = flip_connectivity(&map, &class_of(&map, &members[0]).unwrap()).map_err(|e| e.to_string())?;
        ensure!(report.acyclic_members == acyc.len(), "acyclic count mismatch");
        if acyc.is_empty() {
            continue;
        }
        ensure!(report.acyclic_connected(), "{} acyclic components", report.acyclic_components);
        ensure!(acyclic_reach(&map, acyc[0]) == acyc.len(), "BFS does not reach the whole stratum");
        strata += 1;
    }
    Ok(format!("{} classes, {strata} nonempty acyclic strata, each one flip component", classes.len()))
}

fn surface_invariants() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, map) in test_maps() {
        let mut seen = HashSet::new();
        for eta in enumerate_eulerian(&map) {
            let s = SurfaceModel::build(&map, &eta).map_err(|e| e.to_string())?;
            let (chi, b, g) = (s.euler_characteristic(), s.boundary_count() as i64, s.genus());
            ensure!(b == 2 * map.strand_count() as i64, "{name}: b = {b}, strands {}", map.strand_count());
            ensure!(g >= 0 && 2 - 2 * g - b == chi, "{name}: genus {g} not integral for chi {chi}, b {b}");
            seen.insert((chi, b, g));
            let want = -4 * map.vertex_count() as i64;
            if chi != want && !failures.iter().any(|f: &String| f.starts_with(name)) {
                failures.push(format!("{name} chi {chi} != {want}"));
            }
            checked += 1;
        }
        ensure!(seen.len() == 1, "{name}: invariants depend on eta");
    }
    if failures.is_empty() {
        Ok(format!("{checked} coorientations"))
    } else {
        Err(format!("b = 2 strands and genus hold on {checked} coorientations; {}", failures.join(", ")))
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("flip cyclicity", flip_cyclicity),
        ("class construction round trip", class_round_trip),
        ("acyclicity iff Birkhoff on flat tori", birkhoff_flat),
        ("first-return factorization", factorization),
        ("twist word shape", word_shape),
        ("representation independence", representation_independence),
        ("symplectic preservation", symplectic_preservation),
        ("Hurwitz and conjugacy shadow", hurwitz_shadow),
        ("flip connectivity", flip_connectivity_check),
        ("surface invariants", surface_invariants),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
