use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use gemcensus::catalog::{self, Catalogue, CatalogueEntry};
use gemcensus::classify::{self, SearchBudget};
use gemcensus::generation::{self, generate_order};
use gemcensus::invariants::{face_vector, first_homology, fundamental_group_simplified, seifert_space_homology};
use gemcensus::moves::is_rigid;
use gemcensus::seifert::{self, Horizontal, SeifertSpec};
use gemcensus::sum::prime_pieces;
use gemcensus::{canonical_code, from_code, Code, ColouredGraph};

const THREADS_ENV: &str = "GEMCENSUS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "gem-census", version, about = "Census, classification and invariants of 3-manifold crystallizations")]
struct Cli {
    /// key=value file supplying defaults for any long flag; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: $GEMCENSUS_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More progress output on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate rigid crystallizations of a given regular genus.
    Generate(GenerateArgs),
    /// Partition a catalogue into move-equivalence classes.
    Classify(ClassifyArgs),
    /// Homology, genus, face vector and fundamental group of crystallizations.
    Invariants(InvariantsArgs),
    /// Build a Seifert manifold from three layered solid tori.
    Seifert(SeifertArgs),
    /// Canonical codes: canonicalise raw graphs or check round-trips.
    Code(CodeArgs),
    /// Split graphs along sharp cuts into prime pieces.
    Split(SplitArgs),
    /// Print a catalogue, optionally filtered.
    Cat(CatArgs),
    /// Codes present in exactly one of two catalogues.
    Diff(DiffArgs),
    /// Count table of a catalogue by order.
    Table1(Table1Args),
    /// Bundled tables of named manifolds.
    Names(NamesArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Only {
    Bipartite,
    NonBipartite,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long)]
    max_order: usize,
    #[arg(long, default_value_t = 2)]
    min_order: usize,
    #[arg(long, default_value_t = 2)]
    genus: usize,
    /// Registered generator strategy.
    #[arg(long, default_value = "pruned")]
    strategy: String,
    #[arg(long, value_enum)]
    only: Option<Only>,
    /// Print the count table instead of the catalogue.
    #[arg(long)]
    table1: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Files of `<code> <name>` lines.
    #[arg(long)]
    known: Vec<PathBuf>,
    /// Do not add the bundled genus ≤ 1 crystallizations to the known list.
    #[arg(long)]
    no_builtin_known: bool,
    /// m,n,inflate,len
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    max_frontier: Option<usize>,
    /// Comma-separated move families.
    #[arg(long)]
    moves: Option<String>,
    /// Also report entries that split as connected sums.
    #[arg(long)]
    sums: bool,
    /// Exit with status 2 if any graph is unresolved.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GraphInput {
    /// A single canonical code.
    #[arg(long, conflicts_with = "input")]
    code: Option<String>,
    /// Catalogue, known-names file or one code per line.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InvariantsArgs {
    #[command(flatten)]
    graphs: GraphInput,
    /// Include a simplified fundamental group presentation.
    #[arg(long)]
    pi1: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeifertArgs {
    /// Three LST triples, e.g. "(2,1,-3),(4,1,-5),(4,-5,1)".
    #[arg(long)]
    triples: String,
    /// Per-fibre section edge: theta or sigma, e.g. "theta,theta,sigma".
    #[arg(long)]
    horizontal: Option<String>,
    /// Reduce the coloured graph to a rigid crystallization.
    #[arg(long)]
    crystallize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Check that every code decodes and re-encodes to itself.
    #[arg(long, conflicts_with = "from_rows")]
    roundtrip: bool,
    /// Input lines are graphs given as rows `a b c d;a b c d;...` (0-based neighbours).
    #[arg(long)]
    from_rows: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SplitArgs {
    #[command(flatten)]
    graphs: GraphInput,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CatArgs {
    file: PathBuf,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum)]
    only: Option<Only>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DiffArgs {
    left: PathBuf,
    right: PathBuf,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct NamesArgs {
    #[arg(long, conflicts_with = "table3", required_unless_present = "table3")]
    table2: bool,
    #[arg(long)]
    table3: bool,
}

/// Failure carrying the process exit status.
#[derive(Debug)]
struct Exit(u8);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(Exit(code)) = e.downcast_ref::<Exit>() {
                return ExitCode::from(*code);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(mut args: Vec<String>) -> Result<()> {
    if let Some(path) = config_path(&args) {
        let text = fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        args.extend(config_args(&text, &args)?);
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let informational = !e.use_stderr();
            let _ = e.print();
            return if informational { Ok(()) } else { Err(Exit(1).into()) };
        }
    };
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| anyhow!("{THREADS_ENV}={v:?} is not a thread count"))?),
            Err(_) => None,
        },
    };
    if threads == Some(0) {
        bail!("thread count must be at least 1");
    }
    // 0 lets the pool pick one thread per core
    rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build_global().context("starting worker pool")?;
    let verbose = cli.verbose;
    match cli.command {
        Command::Generate(a) => generate(a, verbose),
        Command::Classify(a) => classify_cmd(a, verbose),
        Command::Invariants(a) => invariants(a),
        Command::Seifert(a) => seifert_cmd(a),
        Command::Code(a) => code_cmd(a),
        Command::Split(a) => split(a),
        Command::Cat(a) => cat(a),
        Command::Diff(a) => diff(a),
        Command::Table1(a) => table1(a),
        Command::Names(a) => names(a),
    }
}

fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

/// Turns config lines into flags for the chosen subcommand, skipping flags already given.
fn config_args(text: &str, args: &[String]) -> Result<Vec<String>> {
    let cmd = Cli::command();
    let sub = args.iter().skip(1).find_map(|a| cmd.find_subcommand(a));
    let longs = |c: &clap::Command| c.get_arguments().filter_map(|a| a.get_long().map(str::to_string)).collect::<Vec<_>>();
    let global = longs(&cmd);
    let local = sub.map(longs).unwrap_or_default();
    let known_anywhere = |k: &str| global.iter().any(|g| g == k) || cmd.get_subcommands().any(|s| longs(s).iter().any(|l| l == k));
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| anyhow!("config line {}: expected key=value", n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "config" {
            continue;
        }
        if !known_anywhere(key) {
            bail!("config line {}: unknown key {key:?}", n + 1);
        }
        if !global.iter().any(|g| g == key) && !local.iter().any(|l| l == key) {
            continue;
        }
        let flag = format!("--{key}");
        let given = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        let repeatable = key == "known";
        if given && !repeatable {
            continue;
        }
        match value {
            "true" => out.push(flag),
            "false" => {}
            v => {
                out.push(flag);
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_catalogue(path: &Path) -> Result<Catalogue> {
    Catalogue::load(path).with_context(|| format!("loading catalogue {}", path.display()))
}

/// Codes from a catalogue, a known-names file, or bare code lines.
fn read_codes(path: &Path) -> Result<Vec<Code>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.lines().any(|l| l.trim_start().starts_with(&format!("# {}", catalog::FORMAT_NAME))) {
        return Ok(Catalogue::parse(&text)?.entries().iter().map(|e| e.code.clone()).collect());
    }
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or_default();
        out.push(first.parse().with_context(|| format!("{}:{}", path.display(), n + 1))?);
    }
    Ok(out)
}

fn input_graphs(g: &GraphInput) -> Result<Vec<(Code, ColouredGraph)>> {
    let codes = match (&g.code, &g.input) {
        (Some(c), None) => vec![c.parse::<Code>()?],
        (None, Some(p)) => read_codes(p)?,
        _ => bail!("give exactly one of --code or --in"),
    };
    codes
        .into_iter()
        .map(|c| {
            let graph = from_code(&c).with_context(|| format!("decoding {c}"))?;
            Ok((c, graph))
        })
        .collect()
}

fn keep(only: Option<Only>, bipartite: bool) -> bool {
    match only {
        None => true,
        Some(Only::Bipartite) => bipartite,
        Some(Only::NonBipartite) => !bipartite,
    }
}

fn generate(a: GenerateArgs, verbose: bool) -> Result<()> {
    if a.max_order % 2 != 0 || a.min_order % 2 != 0 || a.min_order == 0 {
        bail!("orders must be even and positive");
    }
    if a.min_order > a.max_order {
        bail!("--min-order exceeds --max-order");
    }
    let strategy = generation::strategy(&a.strategy).ok_or_else(|| {
        let names: Vec<&str> = generation::strategies().iter().map(|s| s.name()).collect();
        anyhow!("unknown strategy {:?} (known: {})", a.strategy, names.join(", "))
    })?;
    let filter = match a.only {
        None => "none",
        Some(Only::Bipartite) => "bipartite",
        Some(Only::NonBipartite) => "non-bipartite",
    };
    let mut cat = Catalogue::new()
        .with_provenance("generator", format!("gem-census {}", env!("CARGO_PKG_VERSION")))
        .with_provenance("strategy", &a.strategy)
        .with_provenance("genus", a.genus)
        .with_provenance("min order", a.min_order)
        .with_provenance("max order", a.max_order)
        .with_provenance("filter", filter);
    let progress = |s: String| eprintln!("  {s}");
    for p in a.min_order / 2..=a.max_order / 2 {
        let t = Instant::now();
        let r = generate_order(strategy.as_ref(), p, a.genus, if verbose { Some(&progress) } else { None });
        eprintln!(
            "order {}: {} seeds, {} bipartite, {} non-bipartite ({:.1?})",
            2 * p,
            r.seeds,
            r.bipartite.len(),
            r.non_bipartite.len(),
            t.elapsed()
        );
        for (codes, bipartite) in [(&r.bipartite, true), (&r.non_bipartite, false)] {
            if keep(a.only, bipartite) {
                for code in codes {
                    cat.insert(CatalogueEntry { code: code.clone(), bipartite, genus: a.genus });
                }
            }
        }
    }
    if let Some(p) = &a.out {
        cat.save(p).with_context(|| format!("writing {}", p.display()))?;
    }
    if a.table1 {
        emit(None, &catalog::format_table1(&cat.counts_by_order()))
    } else if a.out.is_none() {
        emit(None, &cat.to_text())
    } else {
        Ok(())
    }
}

fn classify_cmd(a: ClassifyArgs, verbose: bool) -> Result<()> {
    let cat = load_catalogue(&a.input)?;
    let mut budget = match &a.budget {
        Some(b) => SearchBudget::parse(b)?,
        None => SearchBudget::default(),
    };
    if let Some(f) = a.max_frontier {
        if f == 0 {
            bail!("--max-frontier must be positive");
        }
        budget.max_frontier = f;
    }
    let families = match &a.moves {
        None => classify::move_families(),
        Some(list) => list.split(',').map(|n| classify::move_family(n.trim())).collect::<Result<Vec<_>, _>>()?,
    };
    let mut known = if a.no_builtin_known { Vec::new() } else { classify::standard_known() };
    for p in &a.known {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        known.extend(classify::ingest_known(&[&text]).with_context(|| format!("parsing {}", p.display()))?);
    }
    // codes of known files are canonicalised so that non-rigid graphs are accepted too
    let known: Vec<(Code, String)> = known
        .into_iter()
        .map(|(c, n)| from_code(&c).map(|g| (canonical_code(&g), n)))
        .collect::<Result<_, _>>()?;
    let t = Instant::now();
    let result = classify::gamma_class(cat.entries(), &known, &budget, &families);
    eprintln!(
        "{} entries, {} classes, {} unresolved, {} merges refused ({:.1?})",
        cat.len(),
        result.classes.len(),
        result.unresolved(),
        result.refused_merges,
        t.elapsed()
    );
    if verbose {
        for c in result.classes.iter().filter(|c| c.unresolved) {
            eprintln!("  unresolved: class {} {}", c.id, c.representative);
        }
    }
    emit(a.out.as_deref(), &catalog::format_classes(&result.classes))?;
    if a.sums {
        let mut text = String::new();
        for s in classify::detect_connected_sums(cat.entries(), &known) {
            let parts: Vec<String> = s.summands.iter().map(|(c, n)| format!("{}[{c}]", n.as_deref().unwrap_or("?"))).collect();
            text.push_str(&format!("sum {} = {}\n", s.code, parts.join(" # ")));
        }
        if a.out.is_some() {
            emit(None, &text)?;
        } else {
            eprint!("{text}");
        }
    }
    if a.strict && result.unresolved() > 0 {
        eprintln!("strict: {} unresolved graphs", result.unresolved());
        return Err(Exit(2).into());
    }
    Ok(())
}

fn invariants(a: InvariantsArgs) -> Result<()> {
    let mut text = String::new();
    for (code, g) in input_graphs(&a.graphs)? {
        let genus = g.regular_genus().map(|x| x.to_string()).unwrap_or_else(|_| "-".into());
        text.push_str(&format!(
            "{code}\n  order={} bipartite={} crystallization={} rigid={} genus={genus} faces={} H1={}\n",
            g.order(),
            g.is_bipartite(),
            g.is_crystallization(),
            is_rigid(&g),
            face_vector(&g),
            first_homology(&g),
        ));
        if a.pi1 {
            text.push_str(&format!("  pi1={}\n", fundamental_group_simplified(&g)));
        }
    }
    emit(a.out.as_deref(), &text)
}

fn parse_horizontal(s: &str) -> Result<[Horizontal; 3]> {
    let v: Vec<Horizontal> = s
        .split(',')
        .map(|t| match t.trim() {
            "theta" => Ok(Horizontal::Theta),
            "sigma" => Ok(Horizontal::Sigma),
            other => Err(anyhow!("expected theta or sigma, got {other:?}")),
        })
        .collect::<Result<_>>()?;
    v.try_into().map_err(|_| anyhow!("--horizontal needs three entries"))
}

fn seifert_cmd(a: SeifertArgs) -> Result<()> {
    let triples = SeifertSpec::parse_triples(&a.triples)?;
    let spec = match &a.horizontal {
        Some(h) => SeifertSpec::new(triples, parse_horizontal(h)?)?,
        None => SeifertSpec::from_triples(triples)?,
    };
    let b = seifert::build(&spec, a.crystallize)?;
    let fibres = spec.fibres();
    let f: Vec<String> = fibres.iter().map(|(x, y)| format!("({x},{y})")).collect();
    let mut text = format!("triples {spec}\nmanifold (S2,{})\n", f.join(","));
    let [v, e, fc, t] = b.triangulation.face_counts()?;
    text.push_str(&format!("triangulation tetrahedra={t} faces={fc} edges={e} vertices={v}\n"));
    text.push_str(&format!("H1 triangulation={}\n", b.triangulation.first_homology()?));
    text.push_str(&format!("H1 expected={}\n", seifert_space_homology(&fibres)));
    text.push_str(&format!(
        "graph order={} bipartite={} gem={} H1={}\n",
        b.graph.order(),
        b.graph.is_bipartite(),
        b.graph.is_manifold_gem(),
        first_homology(&b.graph)
    ));
    if let Some((g, log)) = &b.crystallization {
        let genus = g.regular_genus().map(|x| x.to_string()).unwrap_or_else(|_| "-".into());
        text.push_str(&format!(
            "crystallization order={} genus={genus} H1={} moves={} rho3={}\ncode {}\n",
            g.order(),
            first_homology(g),
            log.moves.len(),
            log.rho3_count,
            canonical_code(g)
        ));
    } else {
        text.push_str(&format!("code {}\n", canonical_code(&b.graph)));
    }
    emit(a.out.as_deref(), &text)
}

fn parse_rows(line: &str) -> Result<ColouredGraph> {
    let rows = line
        .split(';')
        .map(|r| {
            let v: Vec<u32> = r.split_whitespace().map(str::parse).collect::<Result<_, _>>()?;
            v.try_into().map_err(|_| anyhow!("row {r:?} does not have four entries"))
        })
        .collect::<Result<Vec<[u32; 4]>>>()?;
    Ok(ColouredGraph::from_rows(rows)?)
}

fn code_cmd(a: CodeArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    if a.from_rows {
        let mut out = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let g = parse_rows(line).with_context(|| format!("line {}", n + 1))?;
            out.push_str(&format!("{}\n", canonical_code(&g)));
        }
        return emit(a.out.as_deref(), &out);
    }
    let codes = read_codes(&a.input)?;
    let mut bad = 0;
    let mut out = String::new();
    for c in &codes {
        let ok = from_code(c).map(|g| canonical_code(&g) == *c).unwrap_or(false);
        if !ok {
            bad += 1;
            eprintln!("round-trip failed: {c}");
        }
        if !a.roundtrip {
            out.push_str(&format!("{c}\n"));
        }
    }
    if a.roundtrip {
        out.push_str(&format!("{} codes, {} round-trip failures\n", codes.len(), bad));
    }
    emit(a.out.as_deref(), &out)?;
    if bad > 0 {
        return Err(Exit(1).into());
    }
    Ok(())
}

fn split(a: SplitArgs) -> Result<()> {
    let mut text = String::new();
    for (code, g) in input_graphs(&a.graphs)? {
        let pieces = prime_pieces(&g);
        text.push_str(&format!("{code} pieces={}\n", pieces.len()));
        if pieces.len() > 1 {
            for p in pieces {
                let r = gemcensus::moves::reduce_to_rigid(&p).0;
                let name = classify::small_genus_name(&r).unwrap_or_else(|| "?".into());
                text.push_str(&format!("  {} {name} H1={}\n", canonical_code(&r), first_homology(&r)));
            }
        }
    }
    emit(a.out.as_deref(), &text)
}

fn cat(a: CatArgs) -> Result<()> {
    let cat = load_catalogue(&a.file)?;
    let filtered = cat.filtered(|e| a.order.map_or(true, |o| e.order() == o) && keep(a.only, e.bipartite));
    emit(a.out.as_deref(), &filtered.to_text())
}

fn diff(a: DiffArgs) -> Result<()> {
    let d = catalog::diff(&load_catalogue(&a.left)?, &load_catalogue(&a.right)?);
    emit(None, &d.to_string())?;
    if !d.is_empty() {
        eprintln!("catalogues differ");
    }
    Ok(())
}

fn table1(a: Table1Args) -> Result<()> {
    let cat = load_catalogue(&a.input)?;
    let counts: BTreeMap<usize, (usize, usize)> = cat.counts_by_order();
    emit(None, &catalog::format_table1(&counts))
}

fn names(a: NamesArgs) -> Result<()> {
    let t = if a.table2 { catalog::table2() } else { catalog::table3() };
    emit(None, &t.to_text())
}
