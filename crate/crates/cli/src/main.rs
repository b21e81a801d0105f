use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gq_core::analysis::{self, Property};
use gq_core::construct;
use gq_core::enumerate::{enumerate, Kind};
use gq_core::formula::{eval_pp, parse_formula, RelationStore};
use gq_core::ops::{self, FiniteOperation, Identity, LatticeOps};
use gq_core::relation::set_max_points;
use gq_core::suites::{run_suite, Suite, SuiteParams};
use gq_core::text::{parse_partition, parse_relation, serialize_partition, serialize_relation};
use gq_core::{EquivPartition, FiniteRelation, GqError, IndexMap, SurjectiveMap, Universe};

#[derive(Parser)]
#[command(name = "gq", version, about = "Generalized quasiorders on finite sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a relation file.
    Check(CheckArgs),
    /// Build a relation from others.
    Construct {
        #[command(subcommand)]
        op: ConstructCmd,
        /// Output file (stdout if omitted).
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// List all relations of a kind.
    Enumerate(EnumerateArgs),
    /// Run a named verification suite.
    Verify(VerifyArgs),
    /// Work with finite operations.
    #[command(name = "op")]
    Op {
        #[command(subcommand)]
        cmd: OpCmd,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long)]
    gquord: bool,
    #[arg(long)]
    geq: bool,
    #[arg(long)]
    gpord: bool,
    #[arg(long)]
    wgpord: bool,
    #[arg(long)]
    reflexive: bool,
    #[arg(long)]
    transitive: bool,
    #[arg(long)]
    tolerance: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Permute coordinates: tuple `a` becomes `(a[π0],…,a[π(m-1)])`.
    Permute {
        rel: PathBuf,
        #[arg(long, value_delimiter = ',')]
        map: Vec<usize>,
    },
    /// Append a fictitious coordinate.
    Fictitious { rel: PathBuf },
    /// Identify the first two coordinates.
    Identify { rel: PathBuf },
    /// Intersection of two relations of equal arity.
    Intersect { a: PathBuf, b: PathBuf },
    /// Direct product; the pair `(x,y)` is element `x·n2 + y`.
    Product { a: PathBuf, b: PathBuf },
    /// Restrict to a subset, renumbered in increasing order.
    Restrict {
        rel: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
    },
    /// Image under a surjective map given as its value list.
    Image {
        rel: PathBuf,
        #[arg(long, value_delimiter = ',')]
        map: Vec<usize>,
    },
    /// Preimage under a surjective map given as its value list.
    Preimage {
        rel: PathBuf,
        #[arg(long, value_delimiter = ',')]
        map: Vec<usize>,
    },
    /// Image under the quotient map of a partition of the base set.
    Factor { rel: PathBuf, partition: PathBuf },
    /// Block tuples whose whole box lies in the relation.
    BlockFactor { rel: PathBuf, partition: PathBuf },
    /// Generalized transitive closure.
    Closure { rel: PathBuf },
    /// Tuples all of whose coordinate permutations lie in the relation.
    Tos { rel: PathBuf },
    /// Tuples whose set of entries spans a full cube inside the relation.
    Abs { rel: PathBuf },
    /// Pairs (a,b) with {a,b}^m inside the relation.
    Binsym { rel: PathBuf },
    /// Exchange equivalence, written as a partition.
    Exch { rel: PathBuf },
    /// Lift a binary relation or partition file to arity `m`.
    Lift {
        input: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Writes PREFIX.part and PREFIX.rel.
    Decompose {
        rel: PathBuf,
        #[arg(long)]
        prefix: PathBuf,
    },
    /// Inverse of decompose.
    Recompose { partition: PathBuf, rel: PathBuf },
    /// Evaluate a formula file; relations are bound with `--env name=file`.
    Eval {
        formula: PathBuf,
        #[arg(long = "env", value_name = "NAME=FILE")]
        env: Vec<String>,
    },
}

#[derive(Args)]
struct EnumerateArgs {
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    count_only: bool,
    #[arg(long, default_value_t = 1_000_000)]
    limit: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// boolean-thm, example-5-3, decomposition, closure-props, factor-props,
    /// geq-iso, rectangular, xi or conjecture-search
    suite: String,
    /// Restrict to this base set size where the suite supports it
    #[arg(long)]
    n: Option<usize>,
    /// Restrict to this arity where the suite supports it
    #[arg(long)]
    m: Option<usize>,
    /// Number of random samples [default: 10000]
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for the sampler [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum OpCmd {
    /// Print an operation table. OP is a file or a builtin such as
    /// `and`, `const 1`, `proj 2 0`, `rect-band 2`, `majority-from-order r.rel`.
    Show {
        op: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Whether OP preserves REL; prints a violating row set otherwise.
    Preserves {
        op: String,
        rel: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Check ID, AB, `AB<i>` or C (with `--with`).
    Identity {
        op: String,
        identity: String,
        #[arg(long)]
        with: Option<String>,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Entropic/idempotent/absorptive flags and graph classification.
    Rect {
        op: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Graph of an operation as a relation.
    Graph {
        op: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

enum Failure {
    /// Exit 1: a requested property does not hold.
    Check,
    /// Exit 2: usage or input problem.
    Input(String),
}

impl From<GqError> for Failure {
    fn from(e: GqError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_rel(path: &Path) -> std::result::Result<FiniteRelation, Failure> {
    parse_relation(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_part(path: &Path) -> std::result::Result<EquivPartition, Failure> {
    parse_partition(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Outcome {
    match output {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn surjection(map: &[usize]) -> std::result::Result<SurjectiveMap, Failure> {
    let k = map.iter().max().map_or(0, |&x| x + 1);
    Ok(SurjectiveMap::new(map.to_vec(), k)?)
}

fn check(args: CheckArgs) -> Outcome {
    let rel = load_rel(&args.file)?;
    let report = analysis::classify(&rel);
    let requested: Vec<Property> = [
        (args.gquord, Property::GQuord),
        (args.geq, Property::GEq),
        (args.gpord, Property::GPord),
        (args.wgpord, Property::WgPord),
        (args.reflexive, Property::Reflexive),
        (args.transitive, Property::Transitive),
        (args.tolerance, Property::GTolerance),
    ]
    .into_iter()
    .filter_map(|(on, p)| on.then_some(p))
    .collect();
    let failed: Vec<Property> = requested.iter().copied().filter(|&p| !report.get(p)).collect();
    match args.format {
        Format::Kv => {
            print!("{}", report.to_kv());
            let result = if failed.is_empty() { "PASS" } else { "FAIL" };
            println!("RESULT={result}");
        }
        Format::Text => {
            println!("arity {}, {} tuples{}", report.arity, report.size, if report.empty { " (empty)" } else { "" });
            for p in Property::ALL {
                let mark = if report.get(p) { "yes" } else { "no" };
                println!("  {:<22}{mark}", p.key());
            }
            for p in &failed {
                if let Some(w) = report.witness(*p) {
                    println!("{} fails: {w}", p.key());
                }
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn construct(cmd: ConstructCmd, output: Option<PathBuf>) -> Outcome {
    let rel_out = |r: FiniteRelation| emit(&output, &serialize_relation(&r));
    match cmd {
        ConstructCmd::Permute { rel, map } => {
            let r = load_rel(&rel)?;
            let pi = IndexMap::new(map, r.arity())?;
            rel_out(construct::permute(&r, &pi)?)
        }
        ConstructCmd::Fictitious { rel } => rel_out(construct::add_fictitious(&load_rel(&rel)?)?),
        ConstructCmd::Identify { rel } => rel_out(construct::identify_first_two(&load_rel(&rel)?)?),
        ConstructCmd::Intersect { a, b } => rel_out(construct::intersect(&load_rel(&a)?, &load_rel(&b)?)?),
        ConstructCmd::Product { a, b } => rel_out(construct::direct_product(&load_rel(&a)?, &load_rel(&b)?)?),
        ConstructCmd::Restrict { rel, subset } => rel_out(construct::restrict(&load_rel(&rel)?, &subset)?),
        ConstructCmd::Image { rel, map } => rel_out(construct::image(&load_rel(&rel)?, &surjection(&map)?)?),
        ConstructCmd::Preimage { rel, map } => {
            rel_out(construct::preimage(&load_rel(&rel)?, &surjection(&map)?)?)
        }
        ConstructCmd::Factor { rel, partition } => {
            rel_out(construct::factor(&load_rel(&rel)?, &load_part(&partition)?)?)
        }
        ConstructCmd::BlockFactor { rel, partition } => {
            rel_out(construct::block_factor(&load_rel(&rel)?, &load_part(&partition)?)?)
        }
        ConstructCmd::Closure { rel } => rel_out(analysis::transitive_closure(&load_rel(&rel)?)),
        ConstructCmd::Tos { rel } => rel_out(analysis::tos(&load_rel(&rel)?)),
        ConstructCmd::Abs { rel } => rel_out(analysis::abs(&load_rel(&rel)?)),
        ConstructCmd::Binsym { rel } => rel_out(analysis::bin_sym(&load_rel(&rel)?)),
        ConstructCmd::Exch { rel } => emit(&output, &serialize_partition(&analysis::exchange_eq(&load_rel(&rel)?))),
        ConstructCmd::Lift { input, m } => {
            let text = read(&input)?;
            let lifted = if text.trim_start().starts_with("part") {
                analysis::lift_partition(&parse_partition(&text)?, m)?
            } else {
                analysis::lift_relation(&parse_relation(&text)?, m)?
            };
            rel_out(lifted)
        }
        ConstructCmd::Decompose { rel, prefix } => {
            let dec = construct::decompose(&load_rel(&rel)?)?;
            let mut part = prefix.clone().into_os_string();
            part.push(".part");
            let mut quotient = prefix.into_os_string();
            quotient.push(".rel");
            write(Path::new(&part), &serialize_partition(&dec.sigma))?;
            write(Path::new(&quotient), &serialize_relation(&dec.tau))
        }
        ConstructCmd::Recompose { partition, rel } => {
            rel_out(construct::recompose(&load_part(&partition)?, &load_rel(&rel)?)?)
        }
        ConstructCmd::Eval { formula, env } => {
            let phi = parse_formula(&read(&formula)?).map_err(|e| Failure::Input(format!("{}: {e}", formula.display())))?;
            let mut bindings = Vec::new();
            for item in &env {
                let (name, file) = item
                    .split_once('=')
                    .ok_or_else(|| Failure::Input(format!("--env expects NAME=FILE, got `{item}`")))?;
                bindings.push((name.to_string(), load_rel(Path::new(file))?));
            }
            let universe = bindings
                .first()
                .map(|(_, r)| r.universe())
                .ok_or_else(|| Failure::Input("at least one --env binding is needed".into()))?;
            let mut store = RelationStore::new(universe);
            for (name, r) in bindings {
                store.insert(&name, r)?;
            }
            rel_out(eval_pp(&phi, &store)?)
        }
    }
}

fn enumerate_cmd(args: EnumerateArgs) -> Outcome {
    let kind: Kind = args.kind.parse()?;
    let rels = enumerate(kind, args.n, args.m, args.limit)?;
    if args.count_only {
        println!("{}", rels.len());
    } else {
        println!("count {}", rels.len());
        for r in &rels {
            print!("{}", serialize_relation(r));
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Outcome {
    let suite: Suite = args.suite.parse()?;
    let defaults = SuiteParams::default();
    let params = SuiteParams {
        n: args.n,
        m: args.m,
        samples: args.samples.unwrap_or(defaults.samples),
        seed: args.seed.unwrap_or(defaults.seed),
    };
    let report = run_suite(suite, &params)?;
    match args.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Kv => print!("{}", report.to_kv()),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn number(word: Option<&str>, what: &str) -> std::result::Result<usize, Failure> {
    word.ok_or_else(|| Failure::Input(format!("missing {what}")))?
        .parse()
        .map_err(|_| Failure::Input(format!("{what} must be a number")))
}

fn load_op(source: &str, n: usize) -> std::result::Result<FiniteOperation, Failure> {
    let path = Path::new(source);
    if path.is_file() {
        return FiniteOperation::parse(&read(path)?).map_err(|e| Failure::Input(format!("{source}: {e}")));
    }
    let mut words = source.split_whitespace();
    let universe = Universe::new(n)?;
    let op = match words.next() {
        Some("and") => ops::and(),
        Some("or") => ops::or(),
        Some("not") => ops::not(),
        Some("const") => FiniteOperation::constant(universe, number(words.next(), "constant")?)?,
        Some("proj") => {
            let k = number(words.next(), "arity")?;
            FiniteOperation::projection(universe, k, number(words.next(), "position")?)?
        }
        Some("rect-band") => ops::rect_band(number(words.next(), "band size")?)?,
        Some("majority-from-order") => {
            let file = words.next().ok_or_else(|| Failure::Input("missing order file".into()))?;
            match ops::lattice_ops_from_order(&load_rel(Path::new(file))?)? {
                LatticeOps::Lattice { majority, .. } => majority,
                LatticeOps::NotLattice { pair, missing } => {
                    return Err(Failure::Input(format!(
                        "order is not a lattice: {pair:?} lacks a {missing:?} bound"
                    )))
                }
            }
        }
        _ => return Err(Failure::Input(format!("`{source}` is neither a file nor a builtin operation"))),
    };
    if let Some(extra) = words.next() {
        return Err(Failure::Input(format!("unexpected `{extra}` in `{source}`")));
    }
    Ok(op)
}

fn parse_identity(s: &str) -> std::result::Result<Identity, Failure> {
    Ok(match s {
        "ID" => Identity::Idempotent,
        "AB" => Identity::Absorb,
        "C" => Identity::Commute,
        other => match other.strip_prefix("AB").and_then(|i| i.trim_start_matches('^').parse().ok()) {
            Some(i) => Identity::AbsorbAt(i),
            None => return Err(Failure::Input(format!("unknown identity `{other}`"))),
        },
    })
}

fn op_cmd(cmd: OpCmd) -> Outcome {
    match cmd {
        OpCmd::Show { op, n } => {
            print!("{}", load_op(&op, n)?.to_text());
            Ok(())
        }
        OpCmd::Preserves { op, rel, n } => match ops::preserves(&load_op(&op, n)?, &load_rel(&rel)?)? {
            Ok(()) => {
                println!("preserved");
                Ok(())
            }
            Err(rows) => {
                println!("not preserved; rows {rows:?}");
                Err(Failure::Check)
            }
        },
        OpCmd::Identity { op, identity, with, n } => {
            let f = load_op(&op, n)?;
            let g = with.map(|w| load_op(&w, n)).transpose()?;
            let id = parse_identity(&identity)?;
            match ops::check_identity(&f, g.as_ref(), id)? {
                None => {
                    println!("{} holds", id.tag());
                    Ok(())
                }
                Some(w) => {
                    println!("{} fails at {w:?}", id.tag());
                    Err(Failure::Check)
                }
            }
        }
        OpCmd::Rect { op, n } => {
            let rep = ops::rectangular_theorem_check(&load_op(&op, n)?)?;
            println!("entropic={}", rep.entropic);
            println!("idempotent={}", rep.idempotent);
            println!("absorptive={}", rep.absorptive);
            println!("graph_reflexive={}", rep.graph_reflexive);
            println!("graph_transitive={}", rep.graph_transitive);
            println!("graph_gquord={}", rep.graph_gquord);
            println!("graph_gpord={}", rep.graph_gpord);
            println!("consistent={}", rep.consistent());
            if rep.consistent() {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        OpCmd::Graph { op, n } => {
            print!("{}", serialize_relation(&ops::graph_of(&load_op(&op, n)?)));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("GQ_MAX_POINTS") {
        match v.trim().parse::<usize>() {
            Ok(limit) if limit > 0 => set_max_points(limit),
            _ => {
                eprintln!("error: GQ_MAX_POINTS must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    let outcome = match cli.command {
        Command::Check(args) => check(args),
        Command::Construct { op, output } => construct(op, output),
        Command::Enumerate(args) => enumerate_cmd(args),
        Command::Verify(args) => verify(args),
        Command::Op { cmd } => op_cmd(cmd),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
