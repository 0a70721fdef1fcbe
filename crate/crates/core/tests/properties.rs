mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use birkhoff_core::cohomology::{class_of, cochain_equivalent, construct_coorientation, vertex_star, Construction};
use birkhoff_core::coorient::{
    cohomology_eval, coherent_order, enumerate_eulerian, flip, flip_algorithm, is_acyclic, is_eulerian,
    random_face_order, representations, sink_faces, Coorientation,
};
use birkhoff_core::map::{MapFile, VertexSpec};
use birkhoff_core::monodromy::{monodromy, twist_word, CurveSystem};
use birkhoff_core::surface::SurfaceModel;
use birkhoff_core::MultiCurveMap;

use common::*;

fn maps() -> &'static [(&'static str, MultiCurveMap)] {
    static MAPS: std::sync::OnceLock<Vec<(&'static str, MultiCurveMap)>> = std::sync::OnceLock::new();
    MAPS.get_or_init(test_maps)
}

fn eulerian(k: usize) -> &'static [Coorientation] {
    static ETAS: std::sync::OnceLock<Vec<Vec<Coorientation>>> = std::sync::OnceLock::new();
    &ETAS.get_or_init(|| maps().iter().map(|(_, m)| enumerate_eulerian(m)).collect())[k]
}

fn acyclic_of(k: usize) -> Vec<&'static Coorientation> {
    let map = &maps()[k].1;
    eulerian(k).iter().filter(|e| is_acyclic(map, e).unwrap()).collect()
}

/// Same map under fresh dart labels, shuffled vertices and edges, and a
/// cyclic shift of every rotation.
fn relabel(file: &MapFile, seed: u64) -> MapFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 4 * file.vertices.len() as u64;
    let mut fresh: Vec<u64> = (0..n).map(|k| 1000 + 7 * k).collect();
    fresh.shuffle(&mut rng);
    let rename = |l: u64| fresh[l as usize];
    let mut vertices: Vec<VertexSpec> = file
        .vertices
        .iter()
        .map(|v| {
            let mut darts: Vec<u64> = v.darts.iter().map(|&l| rename(l)).collect();
            darts.rotate_left(rand::Rng::gen_range(&mut rng, 0..4));
            VertexSpec { id: v.id + 50, darts }
        })
        .collect();
    vertices.shuffle(&mut rng);
    let mut edges: Vec<[u64; 2]> = file
        .edges
        .iter()
        .map(|&[a, b]| if rand::Rng::gen_bool(&mut rng, 0.5) { [rename(b), rename(a)] } else { [rename(a), rename(b)] })
        .collect();
    edges.shuffle(&mut rng);
    MapFile { name: None, vertices, edges }
}

fn face_lengths(map: &MultiCurveMap) -> Vec<usize> {
    let mut l: Vec<usize> = map.faces().iter().map(Vec::len).collect();
    l.sort();
    l
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn relabeling_preserves_invariants(k in 0usize..3, seed in any::<u64>()) {
        let map = &maps()[k].1;
        let other = MultiCurveMap::build(&relabel(&map.to_file(), seed)).unwrap();
        prop_assert_eq!(other.genus(), map.genus());
        prop_assert_eq!(other.face_count(), map.face_count());
        prop_assert_eq!(other.strand_count(), map.strand_count());
        prop_assert_eq!(face_lengths(&other), face_lengths(map));
        prop_assert_eq!(enumerate_eulerian(&other).len(), eulerian(k).len());
        prop_assert_eq!(acyclic(&other).len(), acyclic_of(k).len());
    }

    #[test]
    fn faces_partition_the_darts(k in 0usize..3) {
        let map = &maps()[k].1;
        let mut seen = vec![0usize; map.dart_count()];
        for face in map.faces() {
            for (i, &d) in face.iter().enumerate() {
                seen[d] += 1;
                prop_assert_eq!(map.face_next(d), face[(i + 1) % face.len()]);
                prop_assert_eq!(map.face_next(d), map.rot_next(map.twin(d)));
            }
        }
        prop_assert!(seen.iter().all(|&c| c == 1));
        let dual = map.dual();
        prop_assert_eq!(dual.face_count, map.face_count());
        prop_assert_eq!(dual.edges.len(), map.edge_count());
        let edges: HashSet<usize> = dual.edges.iter().map(|de| de.edge).collect();
        prop_assert_eq!(edges.len(), map.edge_count());
    }

    #[test]
    fn evaluation_is_constant_on_homologous_cycles(k in 0usize..3, i in any::<prop::sample::Index>(),
                                                  j in any::<prop::sample::Index>(), v in any::<prop::sample::Index>(),
                                                  extra in 0usize..3) {
        let map = &maps()[k].1;
        let eta = i.get(eulerian(k));
        let free = non_tree_edges(map);
        let cycle = fundamental_cycle(map, *j.get(&free));
        let base = cohomology_eval(map, eta, &cycle).unwrap();
        // homologous: add vertex stars, each conjugated to start at face 0
        let mut walk = cycle.clone();
        for t in 0..extra {
            let vtx = (v.index(map.vertex_count()) + t) % map.vertex_count();
            let star = vertex_star(map, vtx);
            let start = star.faces(map).unwrap()[0];
            let to = path_from_root(map, start);
            walk = concat(&walk, &concat(&to, &concat(&star, &to.reversed())));
        }
        prop_assert_eq!(cohomology_eval(map, eta, &walk).unwrap(), base);
        prop_assert_eq!(cohomology_eval(map, eta, &cycle.reversed()).unwrap(), -base);
        // parity of the class is fixed by the length
        prop_assert_eq!((base - cycle.len() as i64).rem_euclid(2), 0);
        prop_assert_eq!((cohomology_eval(map, eta, &walk).unwrap() - walk.len() as i64).rem_euclid(2), 0);
    }

    #[test]
    fn flips_preserve_class_and_period(k in 0usize..3, i in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let map = &maps()[k].1;
        let pool = acyclic_of(k);
        prop_assume!(!pool.is_empty());
        let eta = *i.get(&pool);
        let class = class_of(map, eta).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = random_face_order(map, eta, &mut rng).unwrap();
        let seq = flip_algorithm(map, eta, &order).unwrap();
        let n = map.face_count();
        prop_assert_eq!(seq.len(), n + 1);
        prop_assert_eq!(&seq[n], eta);
        for (s, mu) in seq.iter().enumerate() {
            prop_assert!(is_eulerian(map, mu));
            prop_assert!(is_acyclic(map, mu).unwrap());
            prop_assert!(!sink_faces(map, mu).is_empty());
            prop_assert!(!representations(map, mu, 1).unwrap().is_empty());
            prop_assert!(cochain_equivalent(map, &class_of(map, mu).unwrap(), &class));
            if s > 0 && s < n {
                prop_assert!(mu != eta);
            }
        }
    }

    #[test]
    fn acyclic_iff_representable(k in 0usize..3, i in any::<prop::sample::Index>()) {
        let map = &maps()[k].1;
        let eta = i.get(eulerian(k));
        let acyc = is_acyclic(map, eta).unwrap();
        prop_assert_eq!(representations(map, eta, 1).map(|r| !r.is_empty()).unwrap_or(false), acyc);
        if acyc {
            for de in &map.dual().edges {
                prop_assert_ne!(de.tail, de.head);
            }
            for f in sink_faces(map, eta) {
                prop_assert!(is_eulerian(map, &flip(map, eta, f).unwrap()));
            }
        }
    }

    #[test]
    fn construction_round_trips_under_coboundaries(k in 0usize..3, i in any::<prop::sample::Index>(),
                                                   p in prop::collection::vec(-3i64..=3, 8)) {
        let map = &maps()[k].1;
        let eta = i.get(eulerian(k));
        let class = class_of(map, eta).unwrap();
        let shifted = class.add_coboundary(map, &p[..map.face_count()]);
        match construct_coorientation(map, &shifted).unwrap() {
            Construction::Realized { coorientation, .. } => {
                prop_assert!(is_eulerian(map, &coorientation));
                prop_assert!(cochain_equivalent(map, &class_of(map, &coorientation).unwrap(), &class));
            }
            Construction::Obstructed(c) => prop_assert!(false, "class of a coorientation obstructed by {:?}", c),
        }
    }

    #[test]
    fn monodromy_is_representation_independent(k in 1usize..3, i in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let map = &maps()[k].1;
        let pool = acyclic_of(k);
        let eta = *i.get(&pool);
        let sys = CurveSystem::build(map, eta).unwrap();
        let first = representations(map, eta, 1).unwrap().pop().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = coherent_order(map, eta).unwrap().random_extension(&mut rng);
        let a = monodromy(map, &sys, &first).unwrap();
        let b = monodromy(map, &sys, &other).unwrap();
        prop_assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn conjugation_moves_twist_curves(k in 1usize..3, i in any::<prop::sample::Index>(), cut in 0usize..20,
                                      c in any::<prop::sample::Index>()) {
        let map = &maps()[k].1;
        let pool = acyclic_of(k);
        let eta = *i.get(&pool);
        let sys = CurveSystem::build(map, eta).unwrap();
        let rep = representations(map, eta, 1).unwrap().pop().unwrap();
        let word = twist_word(map, &sys, &rep).unwrap();
        let prefix = birkhoff_core::monodromy::TwistWord { entries: word.entries[..cut % (word.len() + 1)].to_vec() };
        let p = prefix.matrix(&sys).unwrap();
        let curve = &c.get(&word.entries).class;
        let lhs = p.mul(&sys.twist_matrix(curve, -1)).unwrap();
        let rhs = sys.twist_matrix(&p.apply(curve).unwrap(), -1).mul(&p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn surface_invariants_do_not_depend_on_eta(k in 0usize..3, i in any::<prop::sample::Index>(),
                                               j in any::<prop::sample::Index>()) {
        let map = &maps()[k].1;
        let a = SurfaceModel::build(map, i.get(eulerian(k))).unwrap();
        let b = SurfaceModel::build(map, j.get(eulerian(k))).unwrap();
        prop_assert_eq!(a.euler_characteristic(), b.euler_characteristic());
        prop_assert_eq!(a.boundary_count(), b.boundary_count());
        prop_assert_eq!(a.genus(), b.genus());
        prop_assert_eq!(a.boundary_count(), 2 * map.strand_count());
        prop_assert!(a.genus() >= 0);
    }
}

#[test]
fn brute_force_matches_enumeration() {
    for (k, (_, map)) in maps().iter().enumerate().take(2) {
        let mut brute: Vec<Vec<bool>> = brute_force_eulerian(map).iter().map(|e| e.bits().to_vec()).collect();
        let mut listed: Vec<Vec<bool>> = eulerian(k).iter().map(|e| e.bits().to_vec()).collect();
        brute.sort();
        listed.sort();
        assert_eq!(brute, listed);
    }
}
