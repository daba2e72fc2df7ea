//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code; diagnostics go to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use srgpa::io::{read_mask_2d, read_mask_3d, read_seeds, read_volume_header, write_labels, write_trace_frames, LabelFile};
use srgpa::oracle::oracle_labels;
use srgpa::order::{parse_order, random_orders, shuffled_order, XorShift64Star};
use srgpa::{
    canonical_relabel, is_simple_partition, is_v_boundary_partition, reachable, Connectivity, GridDomain, Grower,
    Mode, Neighborhood, PointSet, SeedList,
};

#[derive(Parser, Debug)]
#[command(name = "srgpa", version, about = "Seeded region growing on binary images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grow regions from seeds and write a label file.
    Segment(SegmentArgs),
    /// Write the influence zones and the ambiguous set as a label file.
    Oracle(OracleArgs),
    /// Validate a label file against the partition axioms.
    Check(CheckArgs),
    /// Compare two label files point by point.
    Diff(DiffArgs),
    /// Run the ambiguous-point growth under random seed orders and compare.
    Invariance(InvarianceArgs),
}

#[derive(clap::Args, Debug)]
struct Input {
    /// Mask image: `.pgm` for 2D, otherwise a JSON volume header.
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    seeds: PathBuf,
    /// 4 or 8 in 2D, 6 or 26 in 3D.
    #[arg(long)]
    neighborhood: u32,
}

#[derive(clap::Args, Debug)]
struct SegmentArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[command(flatten)]
    input: Input,
    /// Initialisation order as comma-separated seed indices.
    #[arg(long, conflicts_with = "shuffle")]
    order: Option<String>,
    /// Initialise seeds in a random order drawn from this RNG seed.
    #[arg(long)]
    shuffle: Option<u64>,
    /// Directory for label-map snapshots taken during growth.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1, requires = "trace")]
    trace_every: u64,
    /// Recompute the zones of influence after every growth.
    #[arg(long)]
    check: bool,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Simple,
    Vboundary,
    Ambiguous,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Simple => Mode::Simple,
            ModeArg::Vboundary => Mode::VBoundary,
            ModeArg::Ambiguous => Mode::Ambiguous,
        }
    }
}

#[derive(clap::Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PartitionArg {
    Simple,
    Vboundary,
}

#[derive(clap::Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    neighborhood: u32,
    #[arg(long, value_enum)]
    partition: PartitionArg,
}

#[derive(clap::Args, Debug)]
struct DiffArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

#[derive(clap::Args, Debug)]
struct InvarianceArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 10)]
    orders: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 when a check or comparison fails, 2 on errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn execute(command: Command, out: &mut impl Write) -> Result<bool> {
    match command {
        Command::Segment(args) => segment(args, out),
        Command::Oracle(args) => oracle(args),
        Command::Check(args) => check(args, out),
        Command::Diff(args) => diff(args, out),
        Command::Invariance(args) => invariance(args, out),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

/// Loads a mask. Anything not ending in `.pgm` is a volume header whose body
/// sits next to it, named by the header or by swapping the extension to
/// `.raw`.
pub fn load_image(path: &Path) -> Result<GridDomain> {
    let bytes = read(path)?;
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        return read_mask_2d(&bytes).with_context(|| format!("bad image {}", path.display()));
    }
    let header = read_volume_header(&bytes).with_context(|| format!("bad volume header {}", path.display()))?;
    let body_path = match &header.body {
        Some(name) => path.parent().unwrap_or(Path::new("")).join(name),
        None => path.with_extension("raw"),
    };
    let body = read(&body_path)?;
    read_mask_3d(&bytes, &body).with_context(|| format!("bad volume {}", path.display()))
}

fn neighborhood(domain: &GridDomain, count: u32) -> Result<Neighborhood> {
    let Some(conn) = Connectivity::from_count(count) else {
        bail!("unknown neighborhood {count}; expected 4, 8, 6 or 26");
    };
    Ok(Neighborhood::standard(domain.dim(), conn)?)
}

fn load_input(input: &Input) -> Result<(GridDomain, SeedList, Neighborhood)> {
    let domain = load_image(&input.image)?;
    let seeds = read_seeds(&read(&input.seeds)?, &domain)
        .with_context(|| format!("bad seeds {}", input.seeds.display()))?;
    let v = neighborhood(&domain, input.neighborhood)?;
    Ok((domain, seeds, v))
}

fn segment(args: SegmentArgs, out: &mut impl Write) -> Result<bool> {
    let (domain, seeds, v) = load_input(&args.input)?;
    let n = seeds.len();
    let order = match (&args.order, args.shuffle) {
        (Some(text), _) => parse_order(text, n)?,
        (None, Some(seed)) => shuffled_order(n, &mut XorShift64Star::new(seed)),
        (None, None) => (0..n).collect(),
    };
    let grower = Grower::new(args.mode.into()).check_zi(args.check);
    let mut trace = Vec::new();
    let mut result = grower.run_traced(&domain, &seeds.permuted(&order)?, &v, &mut trace)?;
    result.seed_order = seeds.ids();
    write(&args.output, &write_labels(&result))?;

    if let Some(dir) = &args.trace {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (k, frame) in write_trace_frames(&result, &trace, args.trace_every)?.iter().enumerate() {
            write(&dir.join(format!("frame_{k:05}.json")), frame)?;
        }
    }
    let s = result.stats;
    writeln!(
        out,
        "{}: {} growths ({} boundary), {} pops, {} skipped",
        result.mode, s.growths, s.boundary_growths, s.pops, s.skips
    )?;
    Ok(true)
}

fn oracle(args: OracleArgs) -> Result<bool> {
    let (domain, seeds, v) = load_input(&args.input)?;
    write(&args.output, &write_labels(&oracle_labels(&domain, &seeds, &v)?))?;
    Ok(true)
}

fn check(args: CheckArgs, out: &mut impl Write) -> Result<bool> {
    let labels = LabelFile::parse(&read(&args.labels)?).with_context(|| format!("bad labels {}", args.labels.display()))?;
    let domain = load_image(&args.image)?;
    if labels.dims != domain.dims() {
        bail!("label dims {:?} do not match image dims {:?}", labels.dims, domain.dims());
    }
    let v = neighborhood(&domain, args.neighborhood)?;
    let blocks: Vec<PointSet> = labels.seed_blocks()?.into_iter().map(|(_, b)| b).collect();
    let boundary = labels.boundary_points()?;
    // seeds are labeled and labeled points lie in their component, so this
    // is the set reachable from the seeds
    let grown: PointSet = blocks.iter().chain([&boundary]).flatten().cloned().collect();
    if let Some(p) = grown.iter().find(|p| !domain.contains(p).unwrap_or(false)) {
        bail!("labeled point {p} is outside the image mask");
    }
    let universe = reachable(&domain, &grown, &v)?;
    let report = match args.partition {
        PartitionArg::Simple => {
            let mut all = blocks;
            if !boundary.is_empty() {
                all.push(boundary);
            }
            is_simple_partition(&all, &universe)
        }
        PartitionArg::Vboundary => is_v_boundary_partition(&blocks, &boundary, &v, &universe),
    };
    write!(out, "{report}")?;
    Ok(report.verdict())
}

fn diff(args: DiffArgs, out: &mut impl Write) -> Result<bool> {
    let a = LabelFile::parse(&read(&args.a)?).with_context(|| format!("bad labels {}", args.a.display()))?;
    let b = LabelFile::parse(&read(&args.b)?).with_context(|| format!("bad labels {}", args.b.display()))?;
    let points = a.diff(&b)?;
    writeln!(out, "{} differing points", points.len())?;
    for p in &points {
        writeln!(out, "{p}")?;
    }
    Ok(points.is_empty())
}

fn invariance(args: InvarianceArgs, out: &mut impl Write) -> Result<bool> {
    let (domain, seeds, v) = load_input(&args.input)?;
    if args.orders == 0 {
        bail!("--orders must be at least 1");
    }
    let orders = random_orders(seeds.len(), args.orders, args.rng_seed);
    let grower = Grower::new(Mode::Ambiguous);
    let maps = orders
        .par_iter()
        .map(|order| grower.run_with_order(&domain, &seeds, &v, order).map(|r| canonical_relabel(&r)))
        .collect::<srgpa::error::Result<Vec<_>>>()?;
    let mut differing = 0;
    for (order, map) in orders.iter().zip(&maps).skip(1) {
        let d = maps[0].diff(map);
        if !d.is_empty() {
            differing += 1;
            let shown: Vec<String> = d.iter().take(8).map(|p| p.to_string()).collect();
            writeln!(out, "order {order:?}: {} differing points {}", d.len(), shown.join(" "))?;
        }
    }
    writeln!(out, "{} orders, {} differ from {:?}", orders.len(), differing, orders[0])?;
    Ok(differing == 0)
}
