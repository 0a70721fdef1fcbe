//! Command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{class_key, class_of, construct_coorientation, Cochain, Construction};
use crate::coorient::{
    acyclicity, coherent_order, enumerate_eulerian, flip_algorithm, random_face_order, representations, sink_faces,
    straddle_holds, vertex_type, Acyclicity, Coorientation, Node,
};
use crate::error::{Error, Result};
use crate::map::MultiCurveMap;
use crate::monodromy::{common_model_word, flip_connectivity, hurwitz_compare, monodromy, twist_word, CurveSystem};
use crate::surface::SurfaceModel;
use crate::torus::{verify_birkhoff, verify_factorization, FlatMultiCurve, DEFAULT_HORIZON};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompareMode {
    Hurwitz,
    Common,
}

/// Birkhoff sections from multi-curves: maps, coorientations, surfaces and
/// first-return monodromy.
#[derive(Debug, Parser)]
#[command(name = "birkhoff", version)]
pub struct Cli {
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel fan-out.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a map file, and optionally a coorientation on it.
    Validate { map: PathBuf, coorientation: Option<PathBuf> },
    /// List the Eulerian coorientations of a map.
    Enumerate {
        map: PathBuf,
        #[arg(long)]
        acyclic_only: bool,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Build a coorientation in a prescribed class, or a certificate that none exists.
    Construct {
        map: PathBuf,
        #[arg(long)]
        class: PathBuf,
    },
    /// Run the flip algorithm along a face order.
    FlipRun {
        map: PathBuf,
        coorientation: PathBuf,
        /// Comma-separated faces, lowest first; a random order when absent.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Invariants of the surface of a coorientation.
    Surface { map: PathBuf, coorientation: PathBuf },
    /// Twist word of a representation.
    Word {
        map: PathBuf,
        coorientation: PathBuf,
        /// `first`, `random`, or an index into the enumerated representations.
        #[arg(long, default_value = "first")]
        representation: String,
    },
    /// Homological monodromy of a representation.
    Matrix {
        map: PathBuf,
        coorientation: PathBuf,
        #[arg(long, default_value = "first")]
        representation: String,
    },
    /// Compare the monodromies of two coorientations.
    Compare {
        map: PathBuf,
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value = "hurwitz")]
        mode: CompareMode,
    },
    /// Flip-graph connectivity within a class.
    Connectivity {
        map: PathBuf,
        #[arg(long)]
        class: PathBuf,
    },
    /// Sample the straight-line flow on a flat grid torus.
    Oracle {
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        grid: Vec<usize>,
        #[arg(long)]
        coorientation: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: f64,
        /// Also check the factorization through the flip sequence.
        #[arg(long)]
        factorization: bool,
    },
}

/// A finished report: JSON payload plus its human rendering.
pub struct Report {
    pub json: Value,
    pub human: String,
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_map(path: &Path) -> Result<MultiCurveMap> {
    MultiCurveMap::from_json(&read(path)?)
}

fn load_coorientation(map: &MultiCurveMap, path: &Path) -> Result<Coorientation> {
    Coorientation::from_json(map, &read(path)?)
}

fn load_cochain(map: &MultiCurveMap, path: &Path) -> Result<Cochain> {
    Cochain::from_json(map, &read(path)?)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn bits_string(eta: &Coorientation) -> String {
    eta.bits().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn pick_representation(map: &MultiCurveMap, eta: &Coorientation, which: &str, seed: u64) -> Result<Vec<Node>> {
    match which {
        "first" => representations(map, eta, 1)?.pop().ok_or(Error::NotAcyclic),
        "random" => Ok(coherent_order(map, eta)?.random_extension(&mut ChaCha8Rng::seed_from_u64(seed))),
        k => {
            let k: usize = k.parse().map_err(|_| Error::BadRepresentation(format!("unknown representation {k:?}")))?;
            representations(map, eta, k + 1)?
                .into_iter()
                .nth(k)
                .ok_or_else(|| Error::BadRepresentation(format!("fewer than {} representations", k + 1)))
        }
    }
}

fn validate(map: &MultiCurveMap, eta: Option<&Coorientation>) -> Result<Report> {
    let mut human = format!(
        "V={} E={} F={} genus={} strands={}\n",
        map.vertex_count(),
        map.edge_count(),
        map.face_count(),
        map.genus(),
        map.strand_count()
    );
    let mut out = json!({
        "name": map.name(),
        "vertices": map.vertex_count(),
        "edges": map.edge_count(),
        "faces": map.face_count(),
        "genus": map.genus(),
        "strands": map.strand_count(),
    });
    if let Some(eta) = eta {
        let types = (0..map.vertex_count()).map(|v| vertex_type(map, eta, v)).collect::<Result<Vec<_>>>()?;
        let sinks = sink_faces(map, eta);
        let (acyclic, cycle) = match acyclicity(map, eta)? {
            Acyclicity::Acyclic(_) => (true, None),
            Acyclicity::Cyclic(w) => (false, Some(w.faces(map)?)),
        };
        for (v, t) in types.iter().enumerate() {
            writeln!(human, "vertex {}: {:?}", map.vertex_id(v), t).unwrap();
        }
        writeln!(human, "sinks: {sinks:?}").unwrap();
        match &cycle {
            None => writeln!(human, "acyclic").unwrap(),
            Some(c) => writeln!(human, "oriented cycle through faces {c:?}").unwrap(),
        }
        out["vertex_types"] = to_value(&types);
        out["sinks"] = to_value(&sinks);
        out["acyclic"] = json!(acyclic);
        out["cycle"] = to_value(&cycle);
    }
    Ok(Report { json: out, human })
}

fn enumerate(map: &MultiCurveMap, acyclic_only: bool, limit: Option<usize>) -> Result<Report> {
    let all = enumerate_eulerian(map);
    let rows: Vec<Value> = all
        .par_iter()
        .map(|eta| -> Result<Option<Value>> {
            let acyclic = acyclicity(map, eta)?.is_acyclic();
            if acyclic_only && !acyclic {
                return Ok(None);
            }
            let key = class_key(map, &class_of(map, eta)?);
            Ok(Some(json!({ "bits": to_value(eta), "acyclic": acyclic, "class_key": key })))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .take(limit.unwrap_or(usize::MAX))
        .collect();
    let mut human = String::new();
    for r in &rows {
        let bits: Vec<u8> = serde_json::from_value(r["bits"].clone()).unwrap();
        let s: String = bits.iter().map(|b| b.to_string()).collect();
        writeln!(human, "{s} {}", if r["acyclic"] == json!(true) { "acyclic" } else { "cyclic" }).unwrap();
    }
    writeln!(human, "{} of {} Eulerian coorientations listed", rows.len(), all.len()).unwrap();
    Ok(Report { json: json!({ "total": all.len(), "coorientations": rows }), human })
}

fn construct(map: &MultiCurveMap, class: &Cochain) -> Result<Report> {
    Ok(match construct_coorientation(map, class)? {
        Construction::Realized { coorientation, height } => Report {
            human: format!("realized: {}\nheights: {:?}\n", bits_string(&coorientation), height.heights),
            json: json!({ "map": map.name(), "bits": to_value(&coorientation), "heights": height.heights }),
        },
        Construction::Obstructed(c) => Report {
            human: format!(
                "no coorientation: dual cycle {:?} has length {} but the class takes value {}\n",
                c.cycle, c.length, c.omega
            ),
            json: json!({ "cycle": c.cycle, "length": c.length, "omega": c.omega }),
        },
    })
}

fn flip_run(map: &MultiCurveMap, eta: &Coorientation, order: Option<Vec<usize>>, seed: u64) -> Result<Report> {
    let order = match order {
        Some(o) => o,
        None => random_face_order(map, eta, &mut ChaCha8Rng::seed_from_u64(seed))?,
    };
    let seq = flip_algorithm(map, eta, &order)?;
    let straddle: Vec<bool> = (0..seq.len()).map(|k| straddle_holds(map, eta, &order, k, &seq[k])).collect();
    let returned = seq.last() == Some(eta);
    let mut human = String::new();
    for (k, c) in seq.iter().enumerate() {
        let face = if k == 0 { String::new() } else { format!(" after face {}", order[k - 1]) };
        writeln!(human, "{k}: {}{face}", bits_string(c)).unwrap();
    }
    writeln!(human, "returned: {returned}").unwrap();
    Ok(Report {
        json: json!({ "order": order, "sequence": to_value(&seq), "straddle": straddle, "returned": returned }),
        human,
    })
}

/// Darts crossed by a skeleton walk, consecutive repeats removed.
fn walk_darts(map: &MultiCurveMap, walk: &[usize]) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for &h in walk {
        let d = map.label(h / 3);
        if out.last() != Some(&d) {
            out.push(d);
        }
    }
    out
}

fn surface(map: &MultiCurveMap, eta: &Coorientation) -> Result<Report> {
    let model = SurfaceModel::build(map, eta)?;
    let gamma_v: Vec<Vec<u64>> = (0..map.vertex_count()).map(|v| walk_darts(map, &model.gamma_v(v).walk)).collect();
    let gamma_f: Option<Vec<Vec<u64>>> = if acyclicity(map, eta)?.is_acyclic() {
        Some((0..map.face_count()).map(|f| Ok(walk_darts(map, &model.gamma_f(map, f)?.walk))).collect::<Result<_>>()?)
    } else {
        None
    };
    let mut human = format!(
        "chi={} boundary={} genus={} rank={}\n",
        model.euler_characteristic(),
        model.boundary_count(),
        model.genus(),
        model.rank()
    );
    for (v, w) in gamma_v.iter().enumerate() {
        writeln!(human, "gamma_v(vertex {v}): {w:?}").unwrap();
    }
    for (f, w) in gamma_f.iter().flatten().enumerate() {
        writeln!(human, "gamma_f(face {f}): {w:?}").unwrap();
    }
    for row in model.intersection_form() {
        writeln!(human, "{row:?}").unwrap();
    }
    Ok(Report {
        json: json!({
            "chi": model.euler_characteristic(),
            "boundary": model.boundary_count(),
            "genus": model.genus(),
            "rank": model.rank(),
            "gamma_v": gamma_v,
            "gamma_f": gamma_f,
            "pairing": model.intersection_form(),
        }),
        human,
    })
}

fn word(map: &MultiCurveMap, eta: &Coorientation, which: &str, seed: u64) -> Result<Report> {
    let sys = CurveSystem::build(map, eta)?;
    let rep = pick_representation(map, eta, which, seed)?;
    let w = twist_word(map, &sys, &rep)?;
    let lines = w.lines();
    Ok(Report { human: lines.join("\n") + "\n", json: json!({ "representation": to_value(&rep), "word": lines }) })
}

fn matrix(map: &MultiCurveMap, eta: &Coorientation, which: &str, seed: u64) -> Result<Report> {
    let sys = CurveSystem::build(map, eta)?;
    let rep = pick_representation(map, eta, which, seed)?;
    let m = monodromy(map, &sys, &rep)?;
    let mut human = String::new();
    for row in m.matrix.rows() {
        writeln!(human, "{row:?}").unwrap();
    }
    writeln!(human, "char poly: {:?}", m.char_poly).unwrap();
    writeln!(human, "det: {}", m.determinant).unwrap();
    writeln!(human, "spectral radius (lower bound for the dilatation): {:.9}", m.spectral_radius).unwrap();
    Ok(Report {
        json: json!({
            "rows": m.matrix.rows(),
            "char_poly": m.char_poly,
            "determinant": m.determinant,
            "spectral_radius": m.spectral_radius,
        }),
        human,
    })
}

fn compare(map: &MultiCurveMap, eta: &Coorientation, nu: &Coorientation, mode: CompareMode) -> Result<Report> {
    match mode {
        CompareMode::Hurwitz => {
            let r = hurwitz_compare(map, eta, nu)?;
            let mut human = format!("flip path of length {}\n", r.path.len());
            for s in &r.steps {
                writeln!(human, "face {}: {} moves, product preserved {}", s.face, s.moves, s.product_preserved).unwrap();
            }
            writeln!(human, "characteristic polynomials equal: {}", r.char_poly_equal).unwrap();
            Ok(Report { json: to_value(&r), human })
        }
        CompareMode::Common => {
            let c = common_model_word(map, eta, nu)?;
            let mut human = format!("method: {:?}\n", c.method);
            for l in c.word.lines() {
                writeln!(human, "{l}").unwrap();
            }
            let differing: Vec<usize> = c.vertex_cases.iter().filter(|v| v.differs()).map(|v| v.vertex).collect();
            writeln!(human, "vertices with changed corners: {differing:?}").unwrap();
            writeln!(human, "characteristic polynomials agree: {}", c.char_poly_agrees).unwrap();
            Ok(Report { json: to_value(&c), human })
        }
    }
}

fn connectivity(map: &MultiCurveMap, class: &Cochain) -> Result<Report> {
    let r = flip_connectivity(map, class)?;
    let mut human = format!("{} coorientations in the class, {} acyclic\n", r.members, r.acyclic_members);
    for (k, c) in r.components.iter().enumerate() {
        writeln!(
            human,
            "component {k}: {} members, {} acyclic, cycle union in {} pieces",
            c.size, c.acyclic, c.cycle_pieces
        )
        .unwrap();
    }
    writeln!(human, "acyclic components: {}", r.acyclic_components).unwrap();
    if let Some((a, b)) = &r.obstruction {
        writeln!(human, "obstruction pair: {} / {}", bits_string(a), bits_string(b)).unwrap();
    }
    Ok(Report { json: to_value(&r), human })
}

fn oracle(grid: &[usize], path: &Path, samples: usize, horizon: f64, factorization: bool, seed: u64) -> Result<Report> {
    let (p, q) = match grid {
        [p, q] => (*p, *q),
        _ => return Err(Error::InvalidGrid("--grid takes two sizes".into())),
    };
    let model = FlatMultiCurve::uniform(p, q)?;
    let eta = load_coorientation(model.map(), path)?;
    let v = verify_birkhoff(&model, &eta, samples, horizon, seed)?;
    let mut human = match (&v.max_return, &v.witness) {
        (_, Some(w)) => format!("no return within horizon {horizon} from {:?} in direction {:?}\n", w.start, w.direction),
        (Some(m), None) => format!("all {} samples returned; max return {m:.6} (bound {:.6})\n", v.samples, v.bound),
        (None, None) => "no samples\n".to_string(),
    };
    let mut out = json!({ "birkhoff": to_value(&v) });
    if factorization {
        let rep = representations(model.map(), &eta, 1)?.pop().ok_or(Error::NotAcyclic)?;
        let faces = crate::coorient::faces_of(&rep);
        let f = verify_factorization(&model, &eta, &faces, samples, horizon, seed)?;
        writeln!(human, "factorization holds: {} ({} starts excluded)", f.holds, f.excluded).unwrap();
        out["factorization"] = to_value(&f);
    }
    Ok(Report { json: out, human })
}

/// Runs one command.
pub fn run(cli: &Cli) -> Result<Report> {
    let seed = cli.seed;
    match &cli.command {
        Command::Validate { map, coorientation } => {
            let m = load_map(map)?;
            let eta = coorientation.as_deref().map(|p| load_coorientation(&m, p)).transpose()?;
            validate(&m, eta.as_ref())
        }
        Command::Enumerate { map, acyclic_only, limit } => enumerate(&load_map(map)?, *acyclic_only, *limit),
        Command::Construct { map, class } => {
            let m = load_map(map)?;
            construct(&m, &load_cochain(&m, class)?)
        }
        Command::FlipRun { map, coorientation, order } => {
            let m = load_map(map)?;
            flip_run(&m, &load_coorientation(&m, coorientation)?, order.clone(), seed)
        }
        Command::Surface { map, coorientation } => {
            let m = load_map(map)?;
            surface(&m, &load_coorientation(&m, coorientation)?)
        }
        Command::Word { map, coorientation, representation } => {
            let m = load_map(map)?;
            word(&m, &load_coorientation(&m, coorientation)?, representation, seed)
        }
        Command::Matrix { map, coorientation, representation } => {
            let m = load_map(map)?;
            matrix(&m, &load_coorientation(&m, coorientation)?, representation, seed)
        }
        Command::Compare { map, first, second, mode } => {
            let m = load_map(map)?;
            compare(&m, &load_coorientation(&m, first)?, &load_coorientation(&m, second)?, *mode)
        }
        Command::Connectivity { map, class } => {
            let m = load_map(map)?;
            connectivity(&m, &load_cochain(&m, class)?)
        }
        Command::Oracle { grid, coorientation, samples, horizon, factorization } => {
            oracle(grid, coorientation, *samples, *horizon, *factorization, seed)
        }
    }
}

fn init_logging() {
    let level = match std::env::var("BIRKHOFF_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

/// Exit code for an error: 2 for input and parse failures, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_io() {
        2
    } else {
        1
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(j) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    log::info!("running {:?}", cli.command);
    let result = run(&cli).and_then(|r| {
        let text = match cli.format {
            Format::Json => serde_json::to_string_pretty(&r.json)? + "\n",
            Format::Human => r.human,
        };
        match &cli.out {
            Some(p) => std::fs::write(p, text)?,
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            log::debug!("{e:?}");
            let record = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{record}");
            exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
