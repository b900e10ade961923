use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pinwheel_core::enumerate::{stabilized_collared, Catalog};
use pinwheel_core::frequency::{
    build_substitution_matrix, counting_oracle, frequency_module_report, module_membership,
    perron_frequencies, ratio_string, FrequencyTable, DEFAULT_BUDGET,
};
use pinwheel_core::ktheory::{k0_summary, pairings};
use pinwheel_core::lattice::{q_vectors, verify_kernel_lattice};
use pinwheel_core::patch::{anchored_key, Patch};
use pinwheel_core::substitution::{supertile_with_limit, SvgStyle};
use pinwheel_core::verify::{run_verification, Check, Status, Suite, VerifyConfig, SCHEMA};
use pinwheel_core::winding::{winding_report, Epsilon, WindingLoop};
use pinwheel_core::{par, Chirality, CollarConvention, Error, Tile};

#[derive(Parser, Debug)]
#[command(name = "pinwheel", version, about = "Exact pinwheel tiling computations and verification reports")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Worker threads for the data-parallel loops.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest supertile, in tiles. Defaults to PINWHEEL_MAX_TILES, else 390625.
    #[arg(long, global = true)]
    max_tiles: Option<u64>,
    /// Primary output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON report file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Zero the per-check timings so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Convention {
    Closed,
    Edge,
}

impl From<Convention> for CollarConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Closed => CollarConvention::Closed,
            Convention::Edge => CollarConvention::Edge,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KCheck {
    Kernel,
    Pairing,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit supertile(n) as JSON or SVG.
    Generate {
        #[arg(long, default_value_t = 3)]
        level: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Enumerate collared prototiles until the catalogue stabilises.
    Collared {
        /// Supertile level to start from.
        #[arg(long, alias = "level", default_value_t = 6)]
        depth: u32,
        /// Last level tried when looking for stabilisation.
        #[arg(long)]
        max_level: Option<u32>,
        #[arg(long, value_enum, default_value_t = Convention::Closed)]
        collar_convention: Convention,
    },
    /// Exact patch frequencies and their module.
    Frequencies {
        /// Corona depth of the patch families.
        #[arg(long, default_value_t = 1)]
        depth: u32,
        /// Supertile level of the collared catalogue.
        #[arg(long, default_value_t = 6)]
        level: u32,
        /// Largest supertile used by the counting oracle; 0 skips it.
        #[arg(long, default_value_t = 7)]
        oracle_level: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long, value_enum, default_value_t = Convention::Closed)]
        collar_convention: Convention,
    },
    /// Kernel lattice and trace pairing.
    Ktheory {
        #[arg(long, value_enum, default_value_t = KCheck::All)]
        check: KCheck,
        /// Supertile level searched for symmetric centres.
        #[arg(long, default_value_t = 5)]
        level: u32,
        #[arg(long, default_value = "z2")]
        epsilon: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
    },
    /// Winding number of ε and the pairing values l·μ(U).
    Pairing {
        #[arg(long, default_value = "z2")]
        epsilon: String,
        #[arg(long, default_value_t = 5)]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u32,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Run verification suites.
    Verify {
        /// Suites to run, comma separated; all when absent.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<Suite>,
        /// Level of the collared catalogue.
        #[arg(long)]
        level: Option<u32>,
        /// Corona depth of the frequency module check.
        #[arg(long)]
        depth: Option<u32>,
        /// Largest oracle level; the two below it are also used.
        #[arg(long)]
        oracle_level: Option<u32>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        budget: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// Random vectors for the kernel membership criterion.
        #[arg(long)]
        samples: Option<usize>,
        /// Random motions per class for the canonical key check.
        #[arg(long)]
        motions: Option<usize>,
        /// Replace q2 by a vector outside the kernel.
        #[arg(long, hide = true)]
        tamper_q: bool,
    },
}

struct Outcome {
    command: &'static str,
    config: Value,
    checks: Vec<Check>,
    result: Value,
    /// Non-JSON primary output (SVG).
    text: Option<String>,
}

fn check(suite: Suite, name: &str, ok: bool, detail: String, witnesses: Vec<String>) -> Check {
    Check {
        suite,
        name: name.into(),
        status: Status::from_bool(ok),
        detail,
        witnesses,
        seconds: 0.0,
    }
}

fn error_check(suite: Suite, name: &str, e: &Error) -> Check {
    let status = match e {
        Error::UndecidedAtBudget { .. } | Error::ResourceLimit { .. } | Error::NonStabilization { .. } => {
            Status::UndecidedAtBudget
        }
        _ => Status::Fail,
    };
    Check {
        suite,
        name: name.into(),
        status,
        detail: e.to_string(),
        witnesses: vec![e.to_string()],
        seconds: 0.0,
    }
}

fn max_tiles(common: &Common) -> u64 {
    common.max_tiles.unwrap_or_else(pinwheel_core::substitution::max_tiles_from_env)
}

fn common_echo(common: &Common) -> Value {
    json!({
        "workers": common.workers,
        "max_tiles": max_tiles(common),
        "out": common.out,
        "report": common.report,
        "no_timings": common.no_timings,
    })
}

fn table(level: u32, conv: CollarConvention) -> Result<(Catalog, FrequencyTable), Error> {
    let cat = stabilized_collared(level, level + 1, conv)?;
    let m = build_substitution_matrix(&cat)?;
    let t = perron_frequencies(&m)?;
    Ok((cat, t))
}

fn generate(common: &Common, level: u32, format: Format) -> Result<Outcome, Error> {
    let s = supertile_with_limit(level, max_tiles(common))?;
    let counts = s.chirality_counts();
    let text = match format {
        Format::Svg => Some(s.to_svg(&SvgStyle::default())),
        Format::Json => None,
    };
    let cover = (level <= 5).then(|| s.cover_report());
    let mut checks = vec![check(
        Suite::Cover,
        "tile-count",
        s.tiles.len() as u64 == 5u64.pow(level),
        format!("{} tiles", s.tiles.len()),
        Vec::new(),
    )];
    if let Some(r) = &cover {
        checks.push(check(Suite::Cover, "exact-cover", r.passed(), format!("{r:?}"), Vec::new()));
    }
    Ok(Outcome {
        command: "generate",
        config: json!({"level": level, "format": format!("{format:?}").to_lowercase()}),
        checks,
        result: json!({
            "level": level,
            "tile_count": s.tiles.len(),
            "chirality_counts": {"minus": counts[0], "plus": counts[1]},
            "tiles": serde_json::to_value(&s.tiles).expect("tiles serialise"),
        }),
        text,
    })
}

fn mirror_hash(cat: &Catalog, i: usize) -> Option<String> {
    let key = &cat.classes[i].key;
    let m = anchored_key(&key.representative().mirrored(), key.anchor_position());
    cat.index_of(&m).map(|j| cat.classes[j].key.hash.clone())
}

fn collared(depth: u32, max_level: Option<u32>, conv: Convention) -> Outcome {
    let max_level = max_level.unwrap_or(depth + 1);
    let config = json!({
        "depth": depth,
        "max_level": max_level,
        "collar_convention": CollarConvention::from(conv).as_str(),
    });
    let cat = match stabilized_collared(depth, max_level, conv.into()) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                command: "collared",
                config,
                checks: vec![error_check(Suite::Collared, "stabilised", &e)],
                result: Value::Null,
                text: None,
            }
        }
    };
    let indices: Vec<usize> = (0..cat.len()).collect();
    let mirrors = par::map(&indices, |&i| mirror_hash(&cat, i));
    let mirror_closed = mirrors.iter().all(Option::is_some);
    let classes: Vec<Value> = cat
        .classes
        .iter()
        .zip(&mirrors)
        .map(|(c, m)| {
            json!({
                "key_hash": c.key.hash,
                "center_chirality": c.center_chirality.as_str(),
                "tiles": c.key.len(),
                "count": c.count_context,
                "symmetry_order": c.symmetry_order,
                "mirror": m,
            })
        })
        .collect();
    let minus = cat.classes.iter().filter(|c| c.center_chirality == Chirality::Minus).count();
    let checks = vec![
        check(
            Suite::Collared,
            "stabilised",
            true,
            format!("level {} equals level {}", cat.level, cat.level + 1),
            Vec::new(),
        ),
        check(
            Suite::Collared,
            "mirror-closed",
            mirror_closed,
            format!("{} classes, {} up to reflection", cat.len(), cat.len() / 2),
            mirrors
                .iter()
                .zip(&cat.classes)
                .filter(|(m, _)| m.is_none())
                .map(|(_, c)| format!("mirror of {} missing", c.key.hash))
                .collect(),
        ),
    ];
    Outcome {
        command: "collared",
        config,
        checks,
        result: json!({
            "level": cat.level,
            "convention": cat.convention.as_str(),
            "count": cat.len(),
            "count_minus_centred": minus,
            "count_plus_centred": cat.len() - minus,
            "count_up_to_reflection": mirror_closed.then_some(cat.len() / 2),
            "classes": classes,
        }),
        text: None,
    }
}

fn frequencies(depth: u32, level: u32, oracle_level: u32, budget: u32, conv: Convention) -> Outcome {
    let config = json!({
        "depth": depth,
        "level": level,
        "oracle_level": oracle_level,
        "budget": budget,
        "collar_convention": CollarConvention::from(conv).as_str(),
    });
    let mut checks = Vec::new();
    let mut result = serde_json::Map::new();
    let t = match table(level, conv.into()) {
        Ok((_, t)) => t,
        Err(e) => {
            checks.push(error_check(Suite::Perron, "perron-vector", &e));
            return Outcome { command: "frequencies", config, checks, result: Value::Null, text: None };
        }
    };
    let collared: Vec<Value> = t
        .keys
        .iter()
        .zip(&t.values)
        .map(|(k, v)| {
            let m = module_membership(v);
            json!({"key_hash": k.hash, "freq": ratio_string(v), "k_min": m.k_min, "in_module": m.in_module})
        })
        .collect();
    checks.push(check(
        Suite::Perron,
        "sum-to-one",
        t.sum() == num_rational::BigRational::from_integer(1.into()),
        format!("{} collared classes", t.keys.len()),
        Vec::new(),
    ));
    result.insert("collared".into(), Value::Array(collared));
    match frequency_module_report(&t, depth, budget) {
        Ok(r) => {
            let outside: Vec<String> = r
                .entries
                .iter()
                .filter(|e| !e.in_module)
                .map(|e| format!("{} {} = {}", e.family, e.key_hash, ratio_string(&e.freq)))
                .collect();
            checks.push(check(
                Suite::Module,
                "membership",
                outside.is_empty(),
                format!("{} patch frequencies, generator {}", r.entries.len(), ratio_string(&r.generator)),
                outside,
            ));
            checks.push(check(
                Suite::Module,
                "refinement-consistent",
                r.all_consistent(),
                format!("{:?}", r.levels),
                Vec::new(),
            ));
            result.insert(
                "frequencies".into(),
                serde_json::to_value(&r.entries).expect("entries serialise"),
            );
            result.insert(
                "module".into(),
                json!({
                    "generator": ratio_string(&r.generator),
                    "generator_k_min": r.generator_k_min,
                    "max_k_min": r.max_k_min,
                    "depth": r.depth,
                    "levels": r.levels,
                }),
            );
        }
        Err(e) => checks.push(error_check(Suite::Module, "membership", &e)),
    }
    if oracle_level > 0 {
        let levels: Vec<u32> = (oracle_level.saturating_sub(2).max(1)..=oracle_level).collect();
        let mut targets = vec![(
            "single MINUS tile".to_string(),
            Patch::new(vec![Tile::reference(Chirality::Minus)]),
            0usize,
            num_rational::BigRational::new(1.into(), 2.into()),
        )];
        if let Some((k, v)) = t.keys.iter().zip(&t.values).max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))) {
            targets.push((format!("collared {}", k.hash), k.representative(), k.anchor_position(), v.clone()));
        }
        let mut oracles = Vec::new();
        for (label, p, anchor, f) in targets {
            match counting_oracle(&label, &p, anchor, &f, &levels) {
                Ok(r) => {
                    checks.push(check(
                        Suite::Oracle,
                        &format!("counting {label}"),
                        r.passed(),
                        format!("decreasing {}, within bound {}", r.strictly_decreasing(), r.within_bound()),
                        Vec::new(),
                    ));
                    oracles.push(serde_json::to_value(&r).expect("oracle serialises"));
                }
                Err(e) => checks.push(error_check(Suite::Oracle, &format!("counting {label}"), &e)),
            }
        }
        result.insert("oracle".into(), Value::Array(oracles));
    }
    Outcome { command: "frequencies", config, checks, result: Value::Object(result), text: None }
}

fn parse_epsilon(s: &str) -> Result<Epsilon, Error> {
    let e = Epsilon::parse(s)?;
    e.check_boundary()?;
    Ok(e)
}

fn ktheory(check_kind: KCheck, level: u32, epsilon: &str, budget: u32) -> Result<Outcome, Error> {
    let eps = parse_epsilon(epsilon)?;
    let config = json!({"check": format!("{check_kind:?}").to_lowercase(), "level": level, "epsilon": epsilon, "budget": budget});
    let mut checks = Vec::new();
    let mut result = serde_json::Map::new();
    let kernel = verify_kernel_lattice();
    if check_kind != KCheck::Pairing {
        checks.push(check(
            Suite::Kernel,
            "kernel-lattice",
            kernel.passed(),
            format!("rank {}, HNF equality {}", kernel.rank, kernel.equality),
            kernel.witness.clone().into_iter().collect(),
        ));
        result.insert("kernel".into(), serde_json::to_value(&kernel).expect("kernel serialises"));
    }
    if check_kind != KCheck::Kernel {
        let entries = table(6, CollarConvention::Closed).and_then(|(_, t)| pairings(level, &t, &eps, budget));
        match entries {
            Ok(p) => {
                let outside: Vec<String> = p.iter().filter(|e| !e.in_module).map(|e| e.center_key.clone()).collect();
                checks.push(check(
                    Suite::Pairing,
                    "trace-pairing",
                    !p.is_empty() && outside.is_empty(),
                    format!("{} centres", p.len()),
                    outside,
                ));
                result.insert("pairing".into(), serde_json::to_value(&p).expect("pairing serialises"));
                if check_kind == KCheck::All {
                    let k0 = k0_summary(p);
                    checks.push(check(Suite::Pairing, "k0", k0.passed(), format!("{} summands", k0.summands.len()), Vec::new()));
                    result.insert(
                        "k0".into(),
                        json!({"summands": k0.summands, "all_in_module": k0.all_in_module}),
                    );
                }
            }
            Err(e) => checks.push(error_check(Suite::Pairing, "trace-pairing", &e)),
        }
    }
    Ok(Outcome { command: "ktheory", config, checks, result: Value::Object(result), text: None })
}

fn pairing(epsilon: &str, level: u32, budget: u32, samples: usize) -> Result<Outcome, Error> {
    let eps = parse_epsilon(epsilon)?;
    let config = json!({"epsilon": epsilon, "level": level, "budget": budget, "samples": samples});
    let w = winding_report(&WindingLoop::new(eps.clone())?, samples)?;
    let mut checks = vec![check(
        Suite::Pairing,
        "winding",
        w.agrees(),
        format!("symbolic {:?}, sampled {}, integral {:.12}", w.symbolic, w.sampled, w.numerical),
        Vec::new(),
    )];
    let mut result = json!({"epsilon": eps.label(), "l": w.index(), "winding": w});
    match table(6, CollarConvention::Closed).and_then(|(_, t)| pairings(level, &t, &eps, budget)) {
        Ok(p) => {
            let outside: Vec<String> = p.iter().filter(|e| !e.in_module).map(|e| e.center_key.clone()).collect();
            checks.push(check(
                Suite::Pairing,
                "in-module",
                !p.is_empty() && outside.is_empty(),
                format!("{} centres", p.len()),
                outside,
            ));
            result["pairing"] = serde_json::to_value(&p).expect("pairing serialises");
        }
        Err(e) => checks.push(error_check(Suite::Pairing, "in-module", &e)),
    }
    Ok(Outcome { command: "pairing", config, checks, result, text: None })
}

#[allow(clippy::too_many_arguments)]
fn verify(
    suite: &[Suite],
    level: Option<u32>,
    depth: Option<u32>,
    oracle_level: Option<u32>,
    epsilon: Option<String>,
    budget: Option<u32>,
    seed: Option<u64>,
    samples: Option<usize>,
    motions: Option<usize>,
    tamper_q: bool,
) -> Outcome {
    let mut cfg = VerifyConfig::default();
    if let Some(l) = level {
        cfg.collared_level = l;
    }
    if let Some(d) = depth {
        cfg.module_depth = d;
    }
    if let Some(n) = oracle_level {
        cfg.oracle_levels = (n.saturating_sub(2).max(1)..=n).collect();
    }
    if let Some(e) = &epsilon {
        cfg.epsilon = e.clone();
    }
    if let Some(b) = budget {
        cfg.budget = b;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(s) = samples {
        cfg.criterion_samples = s;
    }
    if let Some(m) = motions {
        cfg.canonical_motions = m;
    }
    if tamper_q {
        let mut q = q_vectors();
        q[1][0] += 1;
        cfg.q_override = Some(q);
    }
    let suites: Vec<Suite> = if suite.is_empty() { Suite::ALL.to_vec() } else { suite.to_vec() };
    let config = json!({
        "suite": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "level": level,
        "depth": depth,
        "oracle_level": oracle_level,
        "epsilon": epsilon,
        "budget": budget,
        "seed": seed,
        "samples": samples,
        "motions": motions,
        "tamper_q": tamper_q,
    });
    let report = run_verification(cfg, &suites);
    Outcome {
        command: "verify",
        config,
        checks: report.checks.clone(),
        result: json!({
            "suites": report.suites().iter().map(|s| s.name()).collect::<Vec<_>>(),
            "verify_config": report.config,
        }),
        text: None,
    }
}

fn envelope(common: &Common, mut o: Outcome) -> Value {
    if common.no_timings {
        for c in &mut o.checks {
            c.seconds = 0.0;
        }
    }
    let mut config = common_echo(common);
    if let (Value::Object(dst), Value::Object(src)) = (&mut config, o.config) {
        dst.extend(src);
    }
    let failed = o.checks.iter().any(|c| c.status == Status::Fail);
    json!({
        "schema": SCHEMA,
        "version": env!("CARGO_PKG_VERSION"),
        "command": o.command,
        "config": config,
        "status": if failed { "fail" } else { "pass" },
        "checks": o.checks,
        "result": o.result,
    })
}

fn write(path: &Path, data: &str) -> Result<(), String> {
    std::fs::write(path, data).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<bool, String> {
    let common = cli.common.clone();
    par::init_workers(common.workers);
    if common.max_tiles.is_some() {
        std::env::set_var("PINWHEEL_MAX_TILES", max_tiles(&common).to_string());
    }
    let outcome = match cli.command {
        Command::Generate { level, format } => generate(&common, level, format),
        Command::Collared { depth, max_level, collar_convention } => Ok(collared(depth, max_level, collar_convention)),
        Command::Frequencies { depth, level, oracle_level, budget, collar_convention } => {
            Ok(frequencies(depth, level, oracle_level, budget, collar_convention))
        }
        Command::Ktheory { check, level, epsilon, budget } => ktheory(check, level, &epsilon, budget),
        Command::Pairing { epsilon, level, budget, samples } => pairing(&epsilon, level, budget, samples),
        Command::Verify { suite, level, depth, oracle_level, epsilon, budget, seed, samples, motions, tamper_q } => Ok(
            verify(&suite, level, depth, oracle_level, epsilon, budget, seed, samples, motions, tamper_q),
        ),
    }
    .map_err(|e| e.to_string())?;
    for c in &outcome.checks {
        eprintln!("{:<20} {:<10} {}  {}", c.status.as_str(), c.suite.name(), c.name, c.detail);
    }
    let text = outcome.text.clone();
    let report = envelope(&common, outcome);
    let passed = report["status"] == "pass";
    let json = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    if let Some(p) = &common.report {
        write(p, &json)?;
    }
    let primary = text.unwrap_or(json);
    match &common.out {
        Some(p) => write(p, &primary)?,
        None if common.report.is_none() || primary.starts_with('<') => print!("{primary}"),
        None => {}
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
