use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polybuild::cone_building::{Cone, ConePoint};
use polybuild::configurations::{ConfigSpec, EntrySpec, WeightedConfiguration};
use polybuild::coxeter::DeltaVector;
use polybuild::io::{LoadedPolygon, PolygonSpec, RationalJson, SpaceSpec};
use polybuild::polygons::{
    close_polygon, embed_transfer, gauss_map, image_refined_lengths, side_lengths,
    verify_gauss_semistable, ClosureOptions, ClosureStatus, GaussReport,
};
use polybuild::scalar::Rational;
use polybuild::spherical_building::{build_spherical, BuildingError, BuildingGraph, BuildingSpec};
use polybuild::trees::Tree;
use polybuild::weightspace::{self, compare_buildings, membership, sample_pn, SampleOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Polygons in Euclidean buildings: stability, closure, Gauss maps, transfer and weight spaces.
///
/// Buildings are JSON files (`"fano"`, `{"kind": "pg23"}` or an explicit graph
/// `{"m", "vertices", "edges"}`); a bare name such as `fano` or `points:3` is
/// accepted in place of a file. All randomness derives from `--seed`.
///
/// Exit codes: 0 success, 1 malformed input, 2 validation failure, 3 inconclusive closure.
#[derive(Debug, Parser)]
#[command(name = "polybuild", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Iteration budget for closure.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_iter: u64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a building is a thick spherical building (and that a polygon parses).
    Validate {
        #[arg(long)]
        building: Option<String>,
        #[arg(long)]
        polygon: Option<PathBuf>,
    },
    /// Minimal slope and stability class of a weighted configuration.
    Stability(ConfigArgs),
    /// Delta-weights of a weighted configuration.
    Weights(ConfigArgs),
    /// Close a polygon as a fixed point of the composed ray maps.
    Close(ConfigArgs),
    /// Gauss maps of a polygon.
    Gauss {
        #[arg(long)]
        polygon: PathBuf,
    },
    /// Check semistability of the Gauss configurations of a polygon.
    VerifyGauss {
        #[arg(long)]
        polygon: PathBuf,
        /// Random ideal points for the per-side inequalities.
        #[arg(long, default_value_t = 32)]
        samples: usize,
        /// Check all Gauss configurations up to this many, otherwise the canonical one.
        #[arg(long, default_value_t = 4096)]
        max_configurations: u64,
    },
    /// Transfer a tree polygon to another tree, preserving refined side lengths.
    Transfer {
        #[arg(long)]
        polygon: PathBuf,
        /// Target space: a file, or `tree:Q` / `spider:K`.
        #[arg(long)]
        target: String,
    },
    /// Decide whether Delta-weights belong to the weight space of a building.
    Membership {
        #[arg(long, conflicts_with = "rank1")]
        building: Option<String>,
        /// Use the rank-one chamber (a finite set of points).
        #[arg(long)]
        rank1: bool,
        /// Comma-separated masses.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        /// Comma-separated types in radians (default 0).
        #[arg(long, value_delimiter = ',')]
        types: Vec<f64>,
    },
    /// Compare membership on two buildings with the same chamber.
    Compare {
        #[arg(long)]
        building: String,
        #[arg(long)]
        other: String,
        /// JSON list of weight tuples `[[{"length", "theta"}, ...], ...]`.
        #[arg(long, conflicts_with = "random")]
        grid: Option<PathBuf>,
        /// Number of random triples with vertex types.
        #[arg(long, default_value_t = 50)]
        random: usize,
        /// Masses are drawn from 1..=max_mass.
        #[arg(long, default_value_t = 4)]
        max_mass: u32,
    },
    /// Sample weight tuples with membership flags.
    Sample {
        #[arg(long, conflicts_with = "rank1")]
        building: Option<String>,
        #[arg(long)]
        rank1: bool,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long, value_delimiter = ',')]
        types: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        max_mass: f64,
        #[arg(long, default_value_t = 1.0)]
        last_mass: f64,
        /// Random sampling (seeded by --seed) instead of a grid.
        #[arg(long)]
        random: bool,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Configuration file `{"building"?, "entries": [{"at", "mass"}]}`.
    #[arg(long)]
    config: PathBuf,
    /// Building, when the configuration does not name one.
    #[arg(long)]
    building: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    Validation(Value),
    Inconclusive(Value),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Malformed(e.to_string())
    }
}

#[derive(Debug, Deserialize)]
struct ConfigFile {
    building: Option<BuildingSpec>,
    entries: Vec<EntrySpec>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return malformed(&e.to_string());
        }
    };
    match run(&cli) {
        Ok(doc) => emit(&cli.common, &doc, ExitCode::SUCCESS),
        Err(Failure::Malformed(msg)) => malformed(&msg),
        Err(Failure::Validation(doc)) => emit(&cli.common, &Output::Json(doc), ExitCode::from(2)),
        Err(Failure::Inconclusive(doc)) => emit(&cli.common, &Output::Json(doc), ExitCode::from(3)),
    }
}

enum Output {
    Json(Value),
    Text(String),
}

fn malformed(msg: &str) -> ExitCode {
    let doc = json!({"error": {"kind": "malformed_input", "message": msg.trim()}});
    eprintln!("{doc}");
    ExitCode::from(1)
}

fn emit(common: &Common, doc: &Output, code: ExitCode) -> ExitCode {
    let text = match doc {
        Output::Json(v) => serde_json::to_string_pretty(v).expect("json") + "\n",
        Output::Text(s) => s.clone(),
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                return malformed(&format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    code
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Malformed(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}

fn building_spec(arg: &str) -> Result<BuildingSpec, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        read_json(path)
    } else {
        Ok(BuildingSpec::Name(arg.to_string()))
    }
}

fn load_building(spec: &BuildingSpec) -> Result<Arc<BuildingGraph>, Failure> {
    match build_spherical(spec) {
        Ok(b) => Ok(Arc::new(b)),
        Err(BuildingError::Validation(failures)) => {
            Err(Failure::Validation(json!({"valid": false, "failures": failures})))
        }
        Err(e) => Err(e.into()),
    }
}

fn rank_one_building(n: usize) -> Arc<BuildingGraph> {
    Arc::new(BuildingGraph::points(n.max(3)).expect("at least three points"))
}

fn load_config(args: &ConfigArgs) -> Result<WeightedConfiguration, Failure> {
    let file: ConfigFile = read_json(&args.config)?;
    let spec = match (&args.building, file.building) {
        (Some(b), _) => building_spec(b)?,
        (None, Some(b)) => b,
        (None, None) => return Err(Failure::Malformed("no building given".into())),
    };
    let building = load_building(&spec)?;
    Ok(ConfigSpec { building: spec, entries: file.entries }.load_on(building)?)
}

fn json_output<T: Serialize>(common: &Common, value: T) -> Result<Output, Failure> {
    if common.format == Format::Csv {
        return Err(Failure::Malformed("this command has no CSV output".into()));
    }
    Ok(Output::Json(serde_json::to_value(value)?))
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let common = &cli.common;
    match &cli.command {
        Command::Validate { building, polygon } => {
            let mut doc = json!({"valid": true});
            if let Some(b) = building {
                let b = load_building(&building_spec(b)?)?;
                doc["building"] = json!({
                    "dim": b.dim(),
                    "m": b.m(),
                    "vertices": b.vertex_count(),
                    "edges": b.edge_count(),
                });
            }
            if let Some(p) = polygon {
                let spec: PolygonSpec = read_json(p)?;
                let n = match spec.load()? {
                    LoadedPolygon::Cone(_, p) => p.len(),
                    LoadedPolygon::Tree(_, p) => p.len(),
                };
                doc["polygon"] = json!({"vertices": n});
            }
            if building.is_none() && polygon.is_none() {
                return Err(Failure::Malformed("nothing to validate: pass --building or --polygon".into()));
            }
            json_output(common, doc)
        }
        Command::Stability(args) => {
            let cfg = load_config(args)?;
            let rep = cfg.min_slope_with_tol(common.tol);
            let b = &cfg.building;
            let per_edge: Vec<Value> = rep
                .per_edge_minima
                .iter()
                .map(|em| {
                    let (u, v) = b.edges()[em.edge];
                    json!({
                        "edge": [b.vertex_id(u), b.vertex_id(v)],
                        "min_slope": em.min_slope,
                        "at": b.encode(&em.at),
                    })
                })
                .collect();
            json_output(
                common,
                json!({
                    "min_slope": rep.min_slope,
                    "class": rep.classification,
                    "argmin": b.encode(&rep.argmin),
                    "per_edge_minima": per_edge,
                }),
            )
        }
        Command::Weights(args) => {
            let cfg = load_config(args)?;
            let h = cfg.delta_weights();
            match common.format {
                Format::Csv => Ok(Output::Text(weightspace::weights_csv(&h))),
                Format::Json => json_output(common, json!({"weights": h})),
            }
        }
        Command::Close(args) => close(common, args),
        Command::Gauss { polygon } => {
            let spec: PolygonSpec = read_json(polygon)?;
            let doc = match spec.load()? {
                LoadedPolygon::Cone(cone, p) => {
                    let g = gauss_map(&cone, &p);
                    let b = cone.building();
                    json!({
                        "total_configurations": g.count(),
                        "masses": g.masses,
                        "choices": g.choices.iter().map(|c| c.iter().map(|x| b.encode(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    })
                }
                LoadedPolygon::Tree(tree, p) => {
                    let g = gauss_map(&tree, &p);
                    json!({
                        "total_configurations": g.count(),
                        "masses": g.masses.iter().map(|m| RationalJson::encode(*m)).collect::<Vec<_>>(),
                        "choices": g.choices,
                    })
                }
            };
            json_output(common, doc)
        }
        Command::VerifyGauss { polygon, samples, max_configurations } => {
            let spec: PolygonSpec = read_json(polygon)?;
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let doc = match spec.load()? {
                LoadedPolygon::Cone(cone, p) => {
                    let rep = verify_gauss_semistable(&cone, &p, common.tol, *samples, *max_configurations, &mut rng);
                    let b = cone.building().clone();
                    gauss_doc(&rep, |x| serde_json::to_value(b.encode(x)).expect("json"))
                }
                LoadedPolygon::Tree(tree, p) => {
                    let rep = verify_gauss_semistable(&tree, &p, common.tol, *samples, *max_configurations, &mut rng);
                    gauss_doc(&rep, |x| serde_json::to_value(x).expect("json"))
                }
            };
            if doc["ok"] == json!(true) {
                json_output(common, doc)
            } else {
                Err(Failure::Validation(doc))
            }
        }
        Command::Transfer { polygon, target } => {
            let spec: PolygonSpec = read_json(polygon)?;
            let target = target_space(target)?;
            let LoadedPolygon::Tree(from, p) = spec.load()? else {
                return Err(Failure::Malformed("transfer needs a tree polygon".into()));
            };
            let to_kind = target
                .tree_kind()
                .ok_or_else(|| Failure::Malformed("transfer target must be a tree or spider".into()))?;
            let to: Tree<Rational> = Tree::new(to_kind)?;
            let q = embed_transfer(&from, &p, &to)?;
            let expected = image_refined_lengths(&from, &p, &to);
            let got = side_lengths(&to, &q).1;
            let doc = json!({
                "polygon": PolygonSpec::from_tree(&to, &q),
                "expected_refined": expected,
                "refined": got,
                "preserved": expected == got,
            });
            if expected == got {
                json_output(common, doc)
            } else {
                Err(Failure::Validation(doc))
            }
        }
        Command::Membership { building, rank1, weights, types } => {
            let b = if *rank1 {
                rank_one_building(weights.len())
            } else {
                let spec = building
                    .as_ref()
                    .ok_or_else(|| Failure::Malformed("pass --building or --rank1".into()))?;
                load_building(&building_spec(spec)?)?
            };
            let h = delta_weights(weights, types)?;
            let r = membership(&h, &b)?;
            json_output(
                common,
                json!({
                    "member": r.member,
                    "exhaustive": r.exhaustive,
                    "min_slope": r.min_slope,
                    "witness": r.witness.map(|w| w.to_spec().entries),
                }),
            )
        }
        Command::Compare { building, other, grid, random, max_mass } => {
            let b = load_building(&building_spec(building)?)?;
            let b2 = load_building(&building_spec(other)?)?;
            let grid: Vec<Vec<DeltaVector>> = match grid {
                Some(path) => read_json(path)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
                    let width = if b.dim() == 0 { 0.0 } else { b.edge_length() };
                    (0..*random)
                        .map(|_| {
                            (0..3)
                                .map(|_| {
                                    let theta = if rng.gen_bool(0.5) { 0.0 } else { width };
                                    DeltaVector::new(rng.gen_range(1..=(*max_mass).max(1)) as f64, theta)
                                })
                                .collect()
                        })
                        .collect()
                }
            };
            let report = compare_buildings(&grid, &b, &b2)?;
            let doc = serde_json::to_value(&report)?;
            if report.disagreements.is_empty() {
                json_output(common, doc)
            } else {
                Err(Failure::Validation(doc))
            }
        }
        Command::Sample { building, rank1, n, resolution, types, max_mass, last_mass, random } => {
            let b = if *rank1 {
                rank_one_building(*n)
            } else {
                let spec = building
                    .as_ref()
                    .ok_or_else(|| Failure::Malformed("pass --building or --rank1".into()))?;
                load_building(&building_spec(spec)?)?
            };
            let opts = SampleOptions {
                n: *n,
                types: types.clone(),
                resolution: *resolution,
                max_mass: *max_mass,
                last_mass: *last_mass,
                seed: random.then_some(common.seed),
            };
            let data = sample_pn(&b, &opts)?;
            Ok(match common.format {
                Format::Csv => Output::Text(data.to_csv()),
                Format::Json => Output::Json(serde_json::to_value(&data)?),
            })
        }
    }
}

fn delta_weights(weights: &[f64], types: &[f64]) -> Result<Vec<DeltaVector>, Failure> {
    if !types.is_empty() && types.len() != weights.len() {
        return Err(Failure::Malformed(format!(
            "{} weights but {} types",
            weights.len(),
            types.len()
        )));
    }
    Ok(weights
        .iter()
        .enumerate()
        .map(|(i, &m)| DeltaVector::new(m, types.get(i).copied().unwrap_or(0.0)))
        .collect())
}

fn target_space(arg: &str) -> Result<SpaceSpec, Failure> {
    let path = Path::new(arg);
    if path.exists() {
        return read_json(path);
    }
    let parse = |s: &str| s.parse::<u32>().map_err(|e| Failure::Malformed(format!("{arg}: {e}")));
    match arg.split_once(':') {
        Some(("tree", q)) => Ok(SpaceSpec::Tree { valence: parse(q)? }),
        Some(("spider", k)) => Ok(SpaceSpec::Spider { legs: parse(k)? }),
        _ => Err(Failure::Malformed(format!("unknown target space {arg:?}"))),
    }
}

fn gauss_doc<I>(rep: &GaussReport<I>, enc: impl Fn(&I) -> Value) -> Value {
    json!({
        "ok": rep.ok,
        "min_slope": rep.min_slope,
        "configurations_checked": rep.configurations_checked,
        "total_configurations": rep.total_configurations,
        "inequalities_checked": rep.inequalities_checked,
        "violations": rep.violations.iter().map(|v| json!({
            "side": v.side,
            "xi": enc(&v.xi),
            "eta": enc(&v.eta),
            "increment": v.increment,
            "bound": v.bound,
        })).collect::<Vec<_>>(),
    })
}

fn close(common: &Common, args: &ConfigArgs) -> Result<Output, Failure> {
    let cfg = load_config(args)?;
    let cone = Cone::new(cfg.building.clone());
    let opts = ClosureOptions {
        tol: common.tol,
        max_iter: common.max_iter,
        stability_tol: common.tol,
        ..ClosureOptions::default()
    };
    let r = close_polygon(&cone, &cfg.entries, ConePoint::TIP, &opts);
    let b = cone.building();
    let (polygon, delta_sides) = match &r.polygon {
        Some(p) => (
            Some(PolygonSpec::from_cone(&cone, p)),
            Some(side_lengths(&cone, p).0),
        ),
        None => (None, None),
    };
    let doc = json!({
        "status": r.status,
        "displacement": r.displacement,
        "iterations": r.iterations,
        "averaged_from": r.averaged_from,
        "min_slope": r.min_slope,
        "witness": r.witness.map(|(xi, s)| json!({"at": b.encode(&xi), "slope": s})),
        "point": cone.encode(&r.point),
        "polygon": polygon,
        "delta_sides": delta_sides,
        "delta_weights": cfg.delta_weights(),
        "closure_gap": r.polygon.as_ref().map(|_| r.closure_gap),
        "tail_radius": r.tail_radius,
        "tail_trend": r.tail_trend,
        "note": r.note,
        "base_distance": cone.distance(&ConePoint::TIP, &r.point),
    });
    if r.status == ClosureStatus::Inconclusive {
        return Err(Failure::Inconclusive(doc));
    }
    json_output(common, doc)
}
