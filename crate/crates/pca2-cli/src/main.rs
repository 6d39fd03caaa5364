use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pca2::invariance::{check_condition, find_hzpm, ConditionId};
use pca2::marginals::{rotated_marginal, zigzag_pushforward, ZigzagPolyline};
use pca2::models::{
    animals_density, animals_gf, coloring_to_orientation, eight_vertex_kernel, eight_vertex_kernel_qr, tasep_gap_law,
    tasep_simulate, Lattice, TasepKernel, VertexClass, VertexWeights,
};
use pca2::primitives::io::{kernel_hash, kernel_to_json, parse_kernel_json};
use pca2::primitives::scalar::{fmt_scalar, parse_scalar, to_f64};
use pca2::reversibility::{
    admissible_interval, binary_family, family_dimension, gen_member, parameter_count, quasi_reversibility_report,
    reverse_kernel, reversibility_report, FamilyId,
};
use pca2::simulator::{
    ergodicity_tv, line_iid_tests, sample_diagram, write_pgm, BoundaryPolicy, InitPolicy, LineSpec, SpaceTimeWindow,
};
use pca2::{DihedralElement, Error, ProbVector, Scalar, TransitionKernel};

#[derive(Parser)]
#[command(name = "pca2", version, about = "Probabilistic cellular automata with memory two")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact check of HZPM, R or RINV for a kernel.
    Check {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        cond: ConditionId,
    },
    /// The invariant product measure of a positive-rate kernel.
    FindP {
        #[arg(long)]
        kernel: PathBuf,
    },
    /// The g-reverse of a kernel, as a kernel file.
    Reverse {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long)]
        g: DihedralElement,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quasi-reversibility and reversibility groups.
    Report {
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Dimension of a family of kernels.
    Dims {
        #[arg(long)]
        family: FamilyId,
        #[arg(long)]
        n: usize,
        /// Print the number of free generator parameters instead.
        #[arg(long)]
        exact: bool,
    },
    /// A random member of a family.
    Gen(GenArgs),
    /// Exact marginals of invariant measures.
    Marginals {
        #[command(flatten)]
        kernel: KernelArgs,
        /// Law of the 2m+1 zigzag sites of the rotated measure.
        #[arg(long, conflicts_with = "zigzag")]
        m: Option<usize>,
        /// One-step pushforward of a zigzag of half-width K.
        #[arg(long)]
        zigzag: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples a space-time diagram and writes it as text.
    Simulate {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact distance to the invariant law on a finite window.
    Ergodicity {
        #[arg(long)]
        kernel: PathBuf,
        /// Window half-width.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        t_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Chi-square tests that lines of a sampled diagram are i.i.d. p.
    LinesTest {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = 1)]
        windows: usize,
        #[arg(long, default_value_t = 0.01)]
        significance: f64,
        /// Comma separated subset of h,v,d,z.
        #[arg(long, default_value = "h,v,d,z")]
        lines: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Samples a diagram and writes it as a PGM image.
    Render {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// The 8-vertex model through its coloring PCA.
    #[command(name = "model-8v")]
    Model8v {
        #[arg(long, conflicts_with = "weights")]
        q: Option<String>,
        #[arg(long, requires = "q")]
        r: Option<String>,
        /// Vertex weights a,b,c,d with a+c=b+d.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        /// Write the edge orientations here.
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density of directed animals.
    ModelAnimals {
        #[arg(long, value_enum, default_value_t = LatticeArg::Square)]
        lattice: LatticeArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        width: usize,
        #[arg(long, default_value_t = 2000)]
        height: usize,
        #[arg(long, default_value_t = 200)]
        burn_in: usize,
        #[arg(long, default_value_t = 20)]
        blocks: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete-time TASEP: exact headway law and a simulation.
    ModelTasep {
        /// Move probability of the classical kernel.
        #[arg(long, default_value = "1/2")]
        move_prob: String,
        /// Stationary speed law q(1).
        #[arg(long)]
        q1: String,
        #[arg(long, default_value_t = 20)]
        cutoff: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        particles: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    kernel: PathBuf,
    /// Comma separated rationals; defaults to the file's p, then to find-p.
    #[arg(long)]
    p: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: FamilyId,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Defaults to uniform; binary families take --k instead.
    #[arg(long)]
    p: Option<String>,
    /// Ratio p(0)/p(1) of a binary family.
    #[arg(long, default_value = "1")]
    k: String,
    #[arg(long)]
    seed: u64,
    /// Size of the perturbation away from the memoryless kernel.
    #[arg(long, default_value = "1/10")]
    eps: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    height: usize,
    /// iid, periodic or fixed:L,R.
    #[arg(long, default_value = "iid")]
    boundary: String,
    /// hzpm or const:S.
    #[arg(long, default_value = "hzpm")]
    init: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Square,
    Triangular,
}

/// A failed check (exit 1) or bad input (exit 2).
enum Failure {
    Check(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotInTriang | Error::PreconditionFailed(..) => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            println!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_kernel(path: &Path) -> std::result::Result<(TransitionKernel, Option<ProbVector>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("--kernel {}: {e}", path.display())))?;
    parse_kernel_json(&text).map_err(|e| usage(format!("--kernel {}: {e}", path.display())))
}

fn scalar_flag(flag: &str, s: &str) -> std::result::Result<Scalar, Failure> {
    parse_scalar(s).map_err(|e| usage(format!("--{flag}: {e}")))
}

/// Kernel and the product measure to use with it.
fn load(args: &KernelArgs) -> std::result::Result<(TransitionKernel, ProbVector), Failure> {
    let (t, file_p) = read_kernel(&args.kernel)?;
    let p = match (&args.p, file_p) {
        (Some(s), _) => ProbVector::parse_csv(s).map_err(|e| usage(format!("--p: {e}")))?,
        (None, Some(p)) => p,
        (None, None) => match find_hzpm(&t)? {
            Some(p) => p,
            None => return Err(Failure::Check("no invariant product measure".into())),
        },
    };
    if p.n() != t.n() {
        return Err(usage(format!("--p has {} entries, kernel has alphabet {}", p.n(), t.n())));
    }
    Ok((t, p))
}

fn provenance(hash: Option<&str>, seed: Option<u64>) -> String {
    let mut s = format!("# pca2 {}\n", env!("CARGO_PKG_VERSION"));
    if let Some(h) = hash {
        s.push_str(&format!("# kernel_sha256\t{h}\n"));
    }
    if let Some(seed) = seed {
        s.push_str(&format!("# seed\t{seed}\n"));
    }
    s
}

fn emit(out: Option<&Path>, header: &str, body: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, format!("{header}{body}")).map_err(|e| usage(format!("--out {}: {e}", path.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cmd: Command) -> CliResult {
    match cmd {
        Command::Check { kernel, cond } => {
            if !matches!(cond, ConditionId::Hzpm | ConditionId::R | ConditionId::Rinv) {
                return Err(usage(format!("--cond {cond}: only HZPM, R and RINV are product-measure conditions")));
            }
            let (t, p) = load(&kernel)?;
            match check_condition(&t, &p, cond)? {
                None => {
                    println!("{cond}: HOLDS");
                    Ok(())
                }
                Some(w) => Err(Failure::Check(format!("{cond}: FAILS {w}"))),
            }
        }
        Command::FindP { kernel } => {
            let (t, _) = read_kernel(&kernel)?;
            match find_hzpm(&t)? {
                Some(p) => {
                    println!("{}", p.to_csv());
                    Ok(())
                }
                None => Err(Failure::Check("no invariant product measure".into())),
            }
        }
        Command::Reverse { kernel, g, out } => {
            let (t, p) = load(&kernel)?;
            let rev = reverse_kernel(&t, &p, g)?;
            emit(out.as_deref(), "", &kernel_to_json(&rev, Some(&p)))
        }
        Command::Report { kernel } => {
            let (t, p) = load(&kernel)?;
            let quasi = quasi_reversibility_report(&t, &p)?;
            let rev = reversibility_report(&t, &p)?;
            let names = |gs: &[DihedralElement]| gs.iter().map(|g| g.name()).collect::<Vec<_>>().join(",");
            println!("p\t{}", p.to_csv());
            for c in [ConditionId::Hzpm, ConditionId::R, ConditionId::Rinv] {
                let verdict = if check_condition(&t, &p, c)?.is_none() { "HOLDS" } else { "FAILS" };
                println!("{c}\t{verdict}");
            }
            println!("quasi-reversible\t{}", names(&quasi.group()));
            println!("reversible\t{}", names(&rev));
            Ok(())
        }
        Command::Dims { family, n, exact } => {
            if n < 2 {
                return Err(usage("--n must be at least 2"));
            }
            if FamilyId::BINARY.contains(&family) && n != 2 {
                return Err(usage(format!("--family {family} is binary; use --n 2")));
            }
            let d = if exact { parameter_count(family, n) } else { family_dimension(family, n) };
            println!("{d}");
            Ok(())
        }
        Command::Gen(args) => gen(args),
        Command::Marginals { kernel, m, zigzag, out } => {
            let (t, p) = load(&kernel)?;
            let hash = kernel_hash(&t);
            let dist = match (m, zigzag) {
                (Some(m), _) => rotated_marginal(&t, &p, m)?.distribution,
                (None, Some(k)) => zigzag_pushforward(&t, &p, k)?,
                (None, None) => return Err(usage("one of --m or --zigzag is required")),
            };
            emit(out.as_deref(), &provenance(Some(&hash), None), &dist.to_table())
        }
        Command::Simulate { sample, out } => {
            let (t, win) = sample_window(&sample, sample.seed)?;
            emit(out.as_deref(), &provenance(Some(&kernel_hash(&t)), Some(sample.seed)), &window_text(&win)?)
        }
        Command::Ergodicity { kernel, k, t_max, out } => {
            let (t, _) = read_kernel(&kernel)?;
            let points = ergodicity_tv(&t, k, t_max)?;
            let mut body = String::from("t\tdistance\tbound\n");
            let mut violated = None;
            for pt in &points {
                body.push_str(&format!("{}\t{:.6e}\t{:.6e}\n", pt.t, pt.distance_f64(), pt.bound_f64()));
                if pt.distance > pt.bound && violated.is_none() {
                    violated = Some(pt.t);
                }
            }
            emit(out.as_deref(), &provenance(Some(&kernel_hash(&t)), None), &body)?;
            match violated {
                Some(tt) => Err(Failure::Check(format!("distance exceeds the bound at t={tt}"))),
                None => Ok(()),
            }
        }
        Command::LinesTest { sample, windows, significance, lines, out } => {
            let mut wins = Vec::with_capacity(windows);
            let mut kernel = None;
            for j in 0..windows.max(1) {
                let (t, w) = sample_window(&sample, sample.seed.wrapping_add(j as u64))?;
                kernel = Some(t);
                wins.push(w);
            }
            let (_, p) = load(&sample.kernel)?;
            let first = &wins[0];
            let (w, h) = (first.width(), first.height());
            let mut specs = Vec::new();
            let mut labels = Vec::new();
            for name in lines.split(',').map(str::trim) {
                let spec = match name {
                    "h" => LineSpec::Horizontal(h / 2),
                    "v" => LineSpec::Vertical(w / 2 - (w / 2) % 2),
                    "d" => LineSpec::Sloped { dx: 1, dy: 1, origin: (0, 0) },
                    "z" => {
                        let ups: Vec<bool> = (0..w - 1).map(|i| i % 2 == 0).collect();
                        LineSpec::Zigzag(ZigzagPolyline::from_steps(0, (h / 2 - (h / 2) % 2) as i64, &ups)?)
                    }
                    other => return Err(usage(format!("--lines: unknown line {other:?}"))),
                };
                specs.push(spec);
                labels.push(name);
            }
            let reports = line_iid_tests(&wins, &specs, &p, significance)?;
            let mut body = String::from("line\tsites\tgof_p\tpairs\tindep_p\tlevel\tverdict\n");
            let mut all = true;
            for (name, r) in labels.iter().zip(&reports) {
                all &= r.passed();
                body.push_str(&format!(
                    "{name}\t{}\t{:.4}\t{}\t{:.4}\t{:.4e}\t{}\n",
                    r.sites,
                    r.gof_p_value,
                    r.pairs,
                    r.independence_p_value,
                    r.level,
                    if r.passed() { "PASS" } else { "FAIL" }
                ));
            }
            let hash = kernel_hash(kernel.as_ref().unwrap());
            emit(out.as_deref(), &provenance(Some(&hash), Some(sample.seed)), &body)?;
            if all {
                Ok(())
            } else {
                Err(Failure::Check("some line is not i.i.d. at the requested level".into()))
            }
        }
        Command::Render { sample, out } => {
            let (_, win) = sample_window(&sample, sample.seed)?;
            write_pgm(&win, &out)?;
            Ok(())
        }
        Command::Model8v { q, r, weights, seed, width, height, edges, out } => {
            let (t, q, r) = match (weights, q, r) {
                (Some(w), _, _) => {
                    let ws: Vec<Scalar> = w.split(',').map(|s| scalar_flag("weights", s)).collect::<Result<_, _>>()?;
                    if ws.len() != 4 {
                        return Err(usage("--weights needs four values a,b,c,d"));
                    }
                    let vw = VertexWeights::new(ws[0].clone(), ws[1].clone(), ws[2].clone(), ws[3].clone())?;
                    eight_vertex_kernel(&vw)?
                }
                (None, Some(q), Some(r)) => {
                    let (q, r) = (scalar_flag("q", &q)?, scalar_flag("r", &r)?);
                    (eight_vertex_kernel_qr(&q, &r)?, q, r)
                }
                _ => return Err(usage("give --weights or both --q and --r")),
            };
            let half = ProbVector::uniform(2);
            let win = sample_diagram(&t, &InitPolicy::Hzpm(half), &BoundaryPolicy::Periodic, width, height, seed)?;
            let (field, hist) = coloring_to_orientation(&win)?;
            let mut body = format!("# q\t{}\n# r\t{}\nSW,SE,NW,NE\tclass\tcount\n", fmt_scalar(&q), fmt_scalar(&r));
            for (cfg, count) in hist.iter() {
                let class = VertexClass::of(cfg[0], cfg[1], cfg[2], cfg[3]).unwrap();
                body.push_str(&format!("{},{},{},{}\t{class:?}\t{count}\n", cfg[0], cfg[1], cfg[2], cfg[3]));
            }
            let frac = |num: VertexClass, den: [VertexClass; 2]| {
                let d = hist.class_count(den[0]) + hist.class_count(den[1]);
                hist.class_count(num) as f64 / d.max(1) as f64
            };
            body.push_str(&format!("P(A|SW!=SE)\t{:.4}\n", frac(VertexClass::A, [VertexClass::A, VertexClass::C])));
            body.push_str(&format!("P(B|SW=SE)\t{:.4}\n", frac(VertexClass::B, [VertexClass::B, VertexClass::D])));
            let header = provenance(Some(&kernel_hash(&t)), Some(seed));
            if let Some(path) = edges {
                fs::write(&path, format!("{header}{}", field.edge_list()))
                    .map_err(|e| usage(format!("--edges {}: {e}", path.display())))?;
            }
            emit(out.as_deref(), &header, &body)
        }
        Command::ModelAnimals { lattice, p, seed, width, height, burn_in, blocks, out } => {
            let p = scalar_flag("p", &p)?;
            let lat = match lattice {
                LatticeArg::Square => Lattice::Square,
                LatticeArg::Triangular => Lattice::Triangular,
            };
            let est = animals_density(lat, &p, width, height, burn_in, blocks, seed)?;
            let pf = to_f64(&p);
            let mut body = format!("density\t{:.6}\nstd_err\t{:.6}\n", est.mean, est.std_err);
            let z = match lat {
                Lattice::Square => -pf,
                Lattice::Triangular => -pf / (1.0 + pf),
            };
            if let Ok((gs, _, _)) = animals_gf(z) {
                body.push_str(&format!("closed_form\t{:.6}\n", -gs));
            }
            emit(out.as_deref(), &provenance(None, Some(seed)), &body)
        }
        Command::ModelTasep { move_prob, q1, cutoff, seed, particles, steps, out } => {
            let kernel = TasepKernel::classical(scalar_flag("move-prob", &move_prob)?)?;
            let q1 = scalar_flag("q1", &q1)?;
            let law = tasep_gap_law(&kernel, &q1, cutoff)?;
            let stats = tasep_simulate(&kernel, &q1, particles, steps, seed)?;
            let hist = stats.gap_histogram();
            let total = stats.final_gaps.len() as f64;
            let mut body = String::from("k\tp(k)\tobserved\n");
            for k in 1..=cutoff {
                let seen = hist.get(k - 1).copied().unwrap_or(0) as f64 / total;
                body.push_str(&format!("{k}\t{}\t{seen:.5}\n", fmt_scalar(&law.prob(k))));
            }
            body.push_str(&format!("displacement\t{}\n", stats.displacement()));
            emit(out.as_deref(), &provenance(None, Some(seed)), &body)
        }
    }
}

fn gen(args: GenArgs) -> CliResult {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    if FamilyId::BINARY.contains(&args.family) {
        if args.n != 2 {
            return Err(usage(format!("--family {} is binary; use --n 2", args.family)));
        }
        let k = scalar_flag("k", &args.k)?;
        let (lo, hi) = admissible_interval(args.family, &k)?;
        let count = match args.family {
            FamilyId::BinHzpm => 4,
            FamilyId::BinD4 => 1,
            _ => 2,
        };
        let params: Vec<Scalar> = (0..count)
            .map(|_| {
                let j = rng.gen_range(1..1000i64);
                &lo + (&hi - &lo) * Scalar::new(j.into(), 1000.into())
            })
            .collect();
        let (t, p) = binary_family(args.family, &k, &params)?;
        return emit(args.out.as_deref(), "", &kernel_to_json(&t, Some(&p)));
    }
    let p = match &args.p {
        Some(s) => ProbVector::parse_csv(s).map_err(|e| usage(format!("--p: {e}")))?,
        None => ProbVector::uniform(args.n),
    };
    if p.n() != args.n {
        return Err(usage(format!("--p has {} entries but --n is {}", p.n(), args.n)));
    }
    let params: Vec<Scalar> = (0..parameter_count(args.family, args.n))
        .map(|_| Scalar::new(rng.gen_range(-10i64..=10).into(), 10.into()))
        .collect();
    let mut eps = scalar_flag("eps", &args.eps)?;
    // Shrink until every entry stays inside (0,1).
    for _ in 0..64 {
        match gen_member(args.family, &p, &params, &eps) {
            Ok(t) => return emit(args.out.as_deref(), "", &kernel_to_json(&t, Some(&p))),
            Err(Error::EpsilonTooLarge(..)) => eps /= Scalar::from_integer(2.into()),
            Err(e) => return Err(e.into()),
        }
    }
    Err(usage("--eps: no admissible perturbation found"))
}

fn sample_window(args: &SampleArgs, seed: u64) -> std::result::Result<(TransitionKernel, SpaceTimeWindow), Failure> {
    let (t, p) = load(&args.kernel)?;
    let boundary = match args.boundary.as_str() {
        "iid" => BoundaryPolicy::IidP(p.clone()),
        "periodic" => BoundaryPolicy::Periodic,
        s => match s.strip_prefix("fixed:").and_then(|v| v.split_once(',')) {
            Some((l, r)) => BoundaryPolicy::Fixed(
                l.parse().map_err(|_| usage("--boundary: bad left symbol"))?,
                r.parse().map_err(|_| usage("--boundary: bad right symbol"))?,
            ),
            None => return Err(usage(format!("--boundary: unknown policy {s:?}"))),
        },
    };
    let init = match args.init.as_str() {
        "hzpm" => InitPolicy::Hzpm(p),
        s => match s.strip_prefix("const:").map(str::parse::<usize>) {
            Some(Ok(v)) => InitPolicy::Constant(v),
            _ => return Err(usage(format!("--init: unknown policy {s:?}"))),
        },
    };
    let win = sample_diagram(&t, &init, &boundary, args.width, args.height, seed)?;
    Ok((t, win))
}

/// One line per time step, `.` off the lattice.
fn window_text(win: &SpaceTimeWindow) -> std::result::Result<String, Failure> {
    if win.n() > 36 {
        return Err(usage("text output supports alphabets of at most 36 symbols"));
    }
    let mut s = String::with_capacity((win.width() + 1) * win.height());
    for t in 0..win.height() {
        for i in 0..win.width() {
            s.push(match win.get(i, t) {
                Some(v) => char::from_digit(v as u32, 36).unwrap(),
                None => '.',
            });
        }
        s.push('\n');
    }
    Ok(s)
}
