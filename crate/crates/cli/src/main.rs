mod cache;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lmsb::arith::poly::z_names;
use lmsb::arith::RationalFunction;
use lmsb::check::{run_criterion, CriterionResult};
use lmsb::gkz::{frobenius_basis, pf_operators};
use lmsb::hae::{genus1, genus1_invariants, genus2, genus2_invariants, special_geometry};
use lmsb::polytope::{
    dual_polytope, integral_points, is_reflexive, lattice_of_relations, normalized_volume, LatticePolytope,
};
use lmsb::registry::{ModelData, Registry};
use lmsb::yukawa::{gw0_invariants, yukawa_closed_forms, yukawa_from_wronskian, MirrorMap};
use lmsb::{Error, Result};

use cache::Cache;

#[derive(Parser, Debug)]
#[command(name = "lmsb", version, about = "Exact B-model computations for local toric Calabi-Yau threefolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Built-in or registry model name.
    #[arg(long, global = true, default_value = "p2")]
    model: String,
    /// Total-degree truncation of every series.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    order: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cache directory; defaults to LMSB_CACHE_DIR, then the user cache directory.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write cached results.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Polytope JSON `{"dim":2,"vertices":[...]}` for `polytope` and `relations`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Directory of additional model JSON files.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Genus-two holomorphic ambiguity in the z variables, overriding the registry value.
    #[arg(long, global = true)]
    f2: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// List the available models.
    Models,
    /// Vertices, points, volume and dual of the Newton polytope.
    Polytope,
    /// Basis of the lattice of relations.
    Relations,
    /// Picard-Fuchs operators.
    PfOps,
    /// Frobenius solution basis.
    Solutions,
    /// Inverse mirror map z(q).
    MirrorMap,
    /// Yukawa couplings normalized to unit constant.
    Yukawa,
    /// Genus-zero invariants.
    Gw0,
    /// Genus-one amplitude and invariants.
    Genus1,
    /// Genus-two amplitude and invariants.
    Genus2,
    /// Run the acceptance suite.
    Check,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Models => "models",
            Command::Polytope => "polytope",
            Command::Relations => "relations",
            Command::PfOps => "pf-ops",
            Command::Solutions => "solutions",
            Command::MirrorMap => "mirror-map",
            Command::Yukawa => "yukawa",
            Command::Gw0 => "gw0",
            Command::Genus1 => "genus1",
            Command::Genus2 => "genus2",
            Command::Check => "check",
        }
    }
}

/// Largest curve degree reported by the invariant commands.
const MAX_DEGREE: u32 = 6;

fn q_names(k: usize) -> Vec<String> {
    z_names(k).into_iter().map(|n| n.replacen('z', "q", 1)).collect()
}

fn indexed(prefix: &str, i: usize, k: usize) -> String {
    if k == 1 {
        prefix.to_string()
    } else {
        format!("{prefix}{}", i + 1)
    }
}

fn polytope_json(p: &LatticePolytope) -> Result<Value> {
    let points = integral_points(p);
    let reflexive = is_reflexive(p)?;
    let mut out = json!({
        "dim": p.dim,
        "vertices": p.vertices,
        "points": points,
        "normalized_volume": normalized_volume(p),
        "reflexive": reflexive,
    });
    if reflexive {
        out["dual_vertices"] = json!(dual_polytope(p)?.vertices);
    }
    Ok(out)
}

fn solutions(m: &ModelData, order: u32) -> Result<Value> {
    let fb = frobenius_basis(m, order)?;
    let names = m.z_names();
    let k = m.nmoduli();
    let mut out = serde_json::Map::new();
    out.insert("period".into(), json!(render::log_series(&fb.omega0, &names)));
    for (i, t) in fb.mirror_maps.iter().enumerate() {
        out.insert(indexed("t", i, k), json!(render::log_series(t, &names)));
    }
    out.insert("dF".into(), json!(render::log_series(&fb.double_log, &names)));
    Ok(Value::Object(out))
}

fn mirror_map(m: &ModelData, order: u32) -> Result<Value> {
    let mm = MirrorMap::new(&frobenius_basis(m, order)?)?;
    let k = m.nmoduli();
    let names = q_names(k);
    let out = (0..k).map(|i| (indexed("z", i, k), json!(render::series(&mm.z_of_q(i), &names)))).collect();
    Ok(Value::Object(out))
}

fn yukawa(m: &ModelData, order: u32) -> Result<Value> {
    let table = yukawa_from_wronskian(m, &frobenius_basis(m, order)?)?;
    let c = table
        .ratio_to(&yukawa_closed_forms(m))
        .ok_or_else(|| Error::Incompatible(format!("{}: Wronskian table is not proportional to the closed forms", m.name)))?;
    Ok(table.scale(&c.recip()).to_json(m))
}

fn genus_json(m: &ModelData, order: u32, genus: u32, f2: Option<&RationalFunction>) -> Result<Value> {
    let fb = frobenius_basis(m, order)?;
    let sg = special_geometry(m, &fb)?;
    let mm = MirrorMap::new(&fb)?;
    let g0 = gw0_invariants(m, &fb, MAX_DEGREE)?.bps;
    let names = m.z_names();
    let (amp, inv) = if genus == 1 {
        let amp = genus1(m);
        let inv = genus1_invariants(m, &sg, &mm, &g0, MAX_DEGREE)?;
        (amp, inv)
    } else {
        let amp = genus2(m, &sg, f2)?;
        let inv = genus2_invariants(m, &sg, &mm, &amp, &g0, MAX_DEGREE)?;
        (amp, inv)
    };
    let integral = inv.is_integral();
    Ok(json!({ "amplitude": amp.to_json(&names, None), "invariants": inv.to_json(), "integral": integral }))
}

fn check(order: u32) -> Vec<CriterionResult> {
    std::thread::scope(|s| {
        let handles: Vec<_> = (1..=10).map(|id| s.spawn(move || run_criterion(id, order))).collect();
        handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect()
    })
}

struct Job {
    command: Command,
    order: u32,
    model: Option<ModelData>,
    input: Option<LatticePolytope>,
    f2: Option<RationalFunction>,
}

impl Job {
    fn fingerprint(&self) -> String {
        match (&self.input, &self.model) {
            (Some(p), _) => format!("input:{p:?}"),
            (None, Some(m)) => format!("model:{m:?};f2:{:?}", self.f2),
            (None, None) => String::new(),
        }
    }

    fn compute(&self) -> Result<Value> {
        if let Some(p) = &self.input {
            return match self.command {
                Command::Polytope => polytope_json(p),
                _ => Ok(json!(lattice_of_relations(p).basis)),
            };
        }
        let m = self.model.as_ref().expect("model-based command");
        let order = self.order;
        match self.command {
            Command::Polytope => {
                let mut out = polytope_json(&m.polytope)?;
                out["points"] = json!(m.points);
                Ok(out)
            }
            Command::Relations => Ok(json!(m.relations)),
            Command::PfOps => {
                let ops = pf_operators(&m.relations)?;
                Ok(json!({
                    "operators": ops.iter().map(|o| o.to_json()).collect::<Vec<_>>(),
                    "display": ops.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
                }))
            }
            Command::Solutions => solutions(m, order),
            Command::MirrorMap => mirror_map(m, order),
            Command::Yukawa => yukawa(m, order),
            Command::Gw0 => Ok(gw0_invariants(m, &frobenius_basis(m, order)?, MAX_DEGREE)?.to_json()),
            Command::Genus1 => genus_json(m, order, 1, None),
            Command::Genus2 => genus_json(m, order, 2, self.f2.as_ref()),
            Command::Models | Command::Check => unreachable!("handled without a job"),
        }
    }
}

fn emit(value: &Value, format: Format) {
    match format {
        Format::Json => println!("{value}"),
        Format::Text => println!("{}", render::text_table(value)),
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let registry = match &cli.registry {
        Some(dir) => Registry::with_dir(dir)?,
        None => Registry::builtin(),
    };
    match cli.command {
        Command::Models => {
            let list: Vec<Value> = registry
                .models()
                .iter()
                .map(|m| json!({ "name": m.name, "title": m.title, "points": m.npoints(), "moduli": m.nmoduli() }))
                .collect();
            emit(&json!(list), cli.format);
            return Ok(ExitCode::SUCCESS);
        }
        Command::Check => {
            let results = check(cli.order);
            match cli.format {
                Format::Json => println!("{}", json!(results.iter().map(|r| r.to_json()).collect::<Vec<_>>())),
                Format::Text => results.iter().for_each(|r| println!("{}", r.line())),
            }
            let ok = results.iter().all(|r| r.passed);
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        _ => {}
    }

    let input = match &cli.input {
        Some(path) if matches!(cli.command, Command::Polytope | Command::Relations) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            Some(LatticePolytope::from_json(&text)?)
        }
        Some(_) => return Err(Error::Incompatible("--input applies only to polytope and relations".into())),
        None => None,
    };
    let model = match input {
        Some(_) => None,
        None => Some(registry.get(&cli.model)?.clone()),
    };
    let f2 = match (&cli.f2, &model) {
        (Some(s), Some(m)) => Some(RationalFunction::parse_with(s, &m.z_names())?),
        _ => None,
    };
    let job = Job { command: cli.command, order: cli.order, model, input, f2 };

    let store = (!cli.no_cache).then(|| Cache::new(cache::resolve_dir(cli.cache_dir.as_deref())));
    let key = store.as_ref().map(|c| c.key(&job.fingerprint(), cli.command.name(), cli.order));
    let cached = store.as_ref().zip(key.as_ref()).and_then(|(c, k)| c.load(k));
    let value = match cached {
        Some(v) => v,
        None => {
            let v = job.compute()?;
            if let (Some(c), Some(k)) = (&store, &key) {
                // A read-only cache location only costs the next run a recomputation.
                if let Err(e) = c.store(k, &v) {
                    eprintln!("warning: cache write to {} failed: {e}", c.dir().display());
                }
            }
            v
        }
    };
    emit(&value, cli.format);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::from(2)
        }
    }
}
