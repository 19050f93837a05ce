use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use clocklat::clock::{
    build_flip_graph, chain_diagnostics, check_lattice, clock_dag, clocked_state, counterclocked_state, diameter,
    height, orient_clock, summarize, Convention, DEFAULT_ALL_PAIRS_BOUND, LATTICE_CHECK_BOUND,
};
use clocklat::decompose::{
    check_cycle_properties, height_formula, peel_decompose, symdiff_decompose, Decomposition, DecompositionReport,
};
use clocklat::diagram::{auto_stars, detect_nugatory, is_prime_like, isomorphic_with_stars};
use clocklat::dot::{gamma_dot, lattice_dot};
use clocklat::generators::{fixture_text, grid, grid_height_closed_form, load_fixture, FIXTURE_NAMES};
use clocklat::matchings::{count_spanning_trees, enumerate_matchings, is_elementary, is_resonant, DEFAULT_CAP};
use clocklat::morse::{matching_to_morse, verify_morse};
use clocklat::tait::{
    balanced_from_universe, build_tait, check_periphery, checkerboard, parse_balanced_json, periphery_report,
    reconstruct_universe,
};
use clocklat::{parse_pd, parse_universe_json, BalancedGraph, ErrorKind, StarPair, Universe};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Lib(#[from] clocklat::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Violation(String),
    /// A check battery ran to completion with failures; `report` goes to
    /// the normal output.
    #[error("{failed} check(s) failed")]
    Checks { failed: usize, report: String },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Parse => 2,
                ErrorKind::Precondition => 3,
                ErrorKind::Cap => 4,
                ErrorKind::TheoremViolation => 5,
            },
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Violation(_) | CliError::Checks { .. } => 5,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "clocklat", version, about = "Clock lattices of knot universes and their balanced overlaid Tait graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Planar diagram code, e.g. "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]".
    #[arg(long)]
    pd: Option<String>,
    /// A PD text file, a universe JSON or a balanced graph JSON.
    #[arg(long)]
    file: Option<PathBuf>,
    /// A shipped fixture, or grid_M_N.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Args)]
struct Run {
    #[command(flatten)]
    source: Source,
    /// Starred faces as "i,j", or "auto" for the smallest adjacent pair.
    #[arg(long)]
    stars: Option<String>,
    /// Upper bound on enumerated perfect matchings.
    #[arg(long, default_value_t = DEFAULT_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Reject diagrams with nugatory crossings or that are not prime-like.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Symdiff,
    Peel,
}

#[derive(Clone, Copy, ValueEnum)]
enum Export {
    Gamma,
    Lattice,
    Morse,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a universe and its balanced graph.
    Parse(Run),
    /// Count (and optionally list) the states.
    Matchings {
        #[command(flatten)]
        run: Run,
        #[arg(long)]
        list: bool,
    },
    /// Clock lattice summary: extremes, height, gradedness.
    Lattice(Run),
    /// Height of the clock lattice.
    Height {
        #[command(flatten)]
        run: Run,
        /// Compare the BFS height with both cycle-sum routes.
        #[arg(long)]
        verify: bool,
    },
    /// Split the graph into nested cycles and leaves.
    Decompose {
        #[command(flatten)]
        run: Run,
        #[arg(long, value_enum, default_value = "symdiff")]
        route: RouteArg,
    },
    /// Generate the m by n grid graph (both odd).
    Grid { m: usize, n: usize },
    /// List fixtures, or print one.
    Fixture { name: Option<String> },
    /// Emit DOT or JSON for the graph, the lattice or a Morse pairing.
    Export {
        what: Export,
        #[command(flatten)]
        run: Run,
        /// State index (enumeration order) for the Morse pairing; defaults to
        /// the clocked state.
        #[arg(long)]
        state: Option<usize>,
    },
    /// Run every check on one input.
    Verify(Run),
}

struct Input {
    universe: Option<Universe>,
    balanced: BalancedGraph,
    cap: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn parse_stars(text: &str, u: &Universe) -> Result<StarPair> {
    if text == "auto" {
        return Ok(auto_stars(u));
    }
    let parts: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("bad --stars value {text:?}"))))
        .collect::<Result<_>>()?;
    match parts[..] {
        [first, second] => Ok(StarPair { first, second }),
        _ => Err(CliError::Usage(format!("--stars takes two face ids, got {text:?}"))),
    }
}

fn load(run: &Run) -> Result<Input> {
    let src = &run.source;
    let (universe, stored) = if let Some(pd) = &src.pd {
        (Some(parse_pd(pd)?), None)
    } else if let Some(path) = &src.file {
        let text = read(path)?;
        if text.trim_start().starts_with('{') {
            let value: Value = serde_json::from_str(&text).map_err(clocklat::Error::from)?;
            if value.get("crossings").is_some() {
                (Some(parse_universe_json(text.as_bytes())?), None)
            } else {
                (None, Some(parse_balanced_json(text.as_bytes())?))
            }
        } else {
            (Some(parse_pd(&text)?), None)
        }
    } else {
        let f = load_fixture(src.fixture.as_deref().expect("clap enforces one source"))?;
        (f.universe, f.balanced)
    };
    let universe = match (universe, &run.stars) {
        (Some(u), Some(s)) => {
            let stars = parse_stars(s, &u)?;
            Some(u.with_stars(stars)?)
        }
        (None, Some(_)) => return Err(CliError::Usage("--stars needs a universe input".into())),
        (u, None) => u,
    };
    if run.strict {
        if let Some(u) = &universe {
            let nugatory = detect_nugatory(u);
            if !nugatory.is_empty() {
                return Err(clocklat::Error::NugatoryPresent(nugatory).into());
            }
            if !is_prime_like(u)? {
                return Err(clocklat::Error::NotPrimeLike.into());
            }
        }
    }
    let balanced = match (stored, &universe) {
        (Some(b), _) if run.stars.is_none() => b,
        (_, Some(u)) => balanced_from_universe(u)?,
        (Some(b), None) => b,
        (None, None) => unreachable!("every source yields a universe or a graph"),
    };
    if run.strict {
        if !balanced.nugatory().is_empty() {
            return Err(clocklat::Error::NugatoryPresent(balanced.nugatory().to_vec()).into());
        }
        if balanced.prime_like() == Some(false) {
            return Err(clocklat::Error::NotPrimeLike.into());
        }
    }
    Ok(Input { universe, balanced, cap: run.cap as usize })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn symdiff(b: &BalancedGraph) -> Result<Decomposition> {
    Ok(symdiff_decompose(b, &clocked_state(b)?, &counterclocked_state(b)?)?)
}

fn cmd_parse(inp: &Input, format: Format) -> Result<String> {
    let b = &inp.balanced;
    let g = b.graph();
    let mut v = json!({
        "gamma": {
            "black": b.num_black(),
            "white": g.num_white(),
            "edges": b.num_edges(),
            "squares": b.squares().len(),
            "periphery": periphery_report(b),
        },
        "nugatory": b.nugatory(),
        "prime_like": b.prime_like(),
    });
    if let Some(u) = &inp.universe {
        let stars = u.stars();
        v["universe"] = json!({
            "label": u.label(),
            "crossings": u.num_crossings(),
            "faces": u.faces().len(),
            "face_degrees": u.faces().iter().map(|f| f.degree()).collect::<Vec<_>>(),
            "stars": [stars.first, stars.second],
        });
    }
    Ok(match format {
        Format::Json => pretty(&v),
        Format::Dot => gamma_dot(b),
        Format::Text => {
            let mut out = String::new();
            if let Some(u) = &inp.universe {
                let s = u.stars();
                out += &format!(
                    "universe: {} crossings, {} faces, stars {},{}\n",
                    u.num_crossings(),
                    u.faces().len(),
                    s.first,
                    s.second
                );
            }
            out += &format!(
                "gamma: {} black, {} white, {} edges, {} squares\n",
                b.num_black(),
                g.num_white(),
                b.num_edges(),
                b.squares().len()
            );
            out += &format!("nugatory: {:?}\nprime-like: {:?}\n", b.nugatory(), b.prime_like());
            let r = periphery_report(b);
            out += &format!(
                "periphery: {} two-valent, {} three-valent, {} four-valent blacks; passes {}\n",
                r.n2,
                r.n3,
                r.n4,
                r.passes()
            );
            out
        }
    })
}

fn cmd_matchings(inp: &Input, list: bool, format: Format) -> Result<String> {
    let b = &inp.balanced;
    let ms = enumerate_matchings(b, inp.cap)?;
    let trees = inp.universe.as_ref().map(|u| {
        let (g, _) = build_tait(u, &checkerboard(u, u.stars()));
        count_spanning_trees(&g).to_string()
    });
    Ok(match format {
        Format::Text => {
            let mut out = format!("states: {}\n", ms.len());
            if let Some(t) = &trees {
                out += &format!("spanning trees: {t}\n");
            }
            if list {
                for m in &ms {
                    out += &format!("{:?}\n", m.pairs(b.graph()));
                }
            }
            out
        }
        _ => {
            let mut v = json!({ "count": ms.len(), "spanning_trees": trees });
            if list {
                v["matchings"] = json!(ms.iter().map(|m| m.pairs(b.graph())).collect::<Vec<_>>());
            }
            pretty(&v)
        }
    })
}

fn cmd_lattice(inp: &Input, format: Format) -> Result<String> {
    let b = &inp.balanced;
    let cd = clock_dag(b, inp.cap)?;
    if format == Format::Dot {
        return Ok(lattice_dot(&cd));
    }
    let summary = summarize(&cd, b);
    let chains = chain_diagnostics(&cd);
    let lattice = if cd.base.num_nodes() <= LATTICE_CHECK_BOUND { Some(check_lattice(&cd, LATTICE_CHECK_BOUND)?) } else { None };
    Ok(match format {
        Format::Text => format!(
            "states: {}\nheight: {}\nclock number: {}\ngraded: {}\nlattice: {}\nclocked: {:?}\ncounterclocked: {:?}\n",
            summary.num_states,
            summary.height,
            summary.clock_number,
            chains.graded,
            lattice.map_or("not checked".to_string(), |l| l.to_string()),
            summary.zero_hat,
            summary.one_hat
        ),
        _ => pretty(&json!({ "summary": summary, "chains": chains, "lattice": lattice })),
    })
}

fn cmd_height(inp: &Input, verify: bool, format: Format) -> Result<String> {
    let b = &inp.balanced;
    let d = symdiff(b)?;
    let s_list = d.s_list();
    let sym = height_formula(&d);
    let bfs = match clock_dag(b, inp.cap) {
        Ok(cd) => Some((height(&cd), cd.base.num_nodes())),
        Err(clocklat::Error::CapExceeded(_)) if verify => None,
        Err(e) => return Err(e.into()),
    };
    let peel = if verify { Some(height_formula(&peel_decompose(b)?)) } else { None };
    let h = bfs.map_or(sym, |(x, _)| x.height);
    let v = json!({
        "height": h,
        "clock_number": h + 1,
        "num_states": bfs.map(|(_, n)| n),
        "num_cycles": d.num_cycles(),
        "num_leaves": d.leaves.len(),
        "s_list": s_list,
    });
    let mut report = match format {
        Format::Text => format!(
            "height: {h}\nclock number: {}\ncycles: {}\nleaves: {}\ns: {:?}\n",
            h + 1,
            d.num_cycles(),
            d.leaves.len(),
            d.s_list()
        ),
        _ => String::new(),
    };
    if verify {
        let routes = json!({ "bfs": bfs.map(|(x, _)| x.height), "symdiff": sym, "peel": peel });
        let agree = bfs.is_none_or(|(x, _)| x.height == sym) && peel == Some(sym);
        if !agree {
            return Err(CliError::Violation(format!("height routes disagree: {routes}")));
        }
        match format {
            Format::Text => {
                report += &format!(
                    "verify: bfs {}, symdiff {sym}, peel {}: agree\n",
                    bfs.map_or("skipped (cap)".to_string(), |(x, _)| x.height.to_string()),
                    peel.unwrap_or(sym)
                );
            }
            _ => {
                let mut v = v;
                v["verify"] = routes;
                return Ok(pretty(&v));
            }
        }
    }
    Ok(if format == Format::Text { report } else { pretty(&v) })
}

fn cmd_decompose(inp: &Input, route: RouteArg, format: Format) -> Result<String> {
    let b = &inp.balanced;
    let d = match route {
        RouteArg::Symdiff => symdiff(b)?,
        RouteArg::Peel => peel_decompose(b)?,
    };
    let report: DecompositionReport = d.to_report();
    Ok(match format {
        Format::Text => {
            let mut out = format!("cycles: {}\nleaves: {:?}\n", d.num_cycles(), d.leaves);
            for c in &d.cycles {
                out += &format!("cycle {} (depth {}): s = {}, {} edges\n", c.id, c.depth, c.s, c.edges.len());
            }
            out + &format!("height: {}\n", report.height_formula)
        }
        _ => pretty(&serde_json::to_value(&report).map_err(clocklat::Error::from)?),
    })
}

fn cmd_export(inp: &Input, what: Export, state: Option<usize>, format: Option<Format>) -> Result<String> {
    let b = &inp.balanced;
    match (what, format) {
        (Export::Gamma, None | Some(Format::Dot)) => Ok(gamma_dot(b)),
        (Export::Gamma, Some(Format::Json)) => Ok(b.to_json_string()),
        (Export::Lattice, None | Some(Format::Dot)) => Ok(lattice_dot(&clock_dag(b, inp.cap)?)),
        (Export::Lattice, Some(Format::Json)) => {
            let cd = clock_dag(b, inp.cap)?;
            let states: Vec<_> = cd.base.nodes.iter().map(|m| m.pairs(b.graph())).collect();
            let edges: Vec<_> = (0..cd.base.num_edges()).map(|e| [cd.tail(e), cd.head(e), cd.base.edges[e].face]).collect();
            Ok(pretty(&json!({ "states": states, "covers": edges, "zero_hat": cd.zero_hat, "one_hat": cd.one_hat })))
        }
        (Export::Morse, None | Some(Format::Json)) => {
            let u = match &inp.universe {
                Some(u) => u.clone(),
                None => reconstruct_universe(b)?,
            };
            let b = balanced_from_universe(&u)?;
            let m = match state {
                None => clocked_state(&b)?,
                Some(i) => {
                    let ms = enumerate_matchings(&b, inp.cap)?;
                    ms.get(i).cloned().ok_or_else(|| CliError::Usage(format!("state {i} out of range ({})", ms.len())))?
                }
            };
            let p = matching_to_morse(&b, &m, &u)?;
            let report = verify_morse(&p);
            if !report.passes() {
                return Err(CliError::Violation(format!("Morse pairing fails: {:?}", report.failures)));
            }
            Ok(pretty(&json!({ "pairing": p.to_export(), "critical_dims": report.critical_dims })))
        }
        (_, Some(f)) => Err(CliError::Usage(format!(
            "export does not support --format {}",
            f.to_possible_value().expect("no skipped variants").get_name()
        ))),
    }
}

fn cmd_verify(inp: &Input) -> Result<String> {
    let b = &inp.balanced;
    let mut lines = Vec::new();
    if !b.nugatory().is_empty() {
        lines.push(format!("skip periphery: nugatory crossings {:?}", b.nugatory()));
    }
    let mut failures = 0;
    let mut check = |name: &str, ok: bool, detail: String| {
        if !ok {
            failures += 1;
        }
        lines.push(format!("{} {name}: {detail}", if ok { "ok  " } else { "FAIL" }));
    };

    if b.nugatory().is_empty() {
        let periphery = check_periphery(b);
        check("periphery", periphery.is_ok(), periphery.map_or_else(|e| e.to_string(), |r| format!("{r:?}")));
    }

    let ms = enumerate_matchings(b, inp.cap)?;
    let fg = build_flip_graph(b, &ms);
    let cd = orient_clock(fg.clone(), Convention::Counterclockwise)?;
    let h = height(&cd).height;
    check("clock theorem", true, format!("{} states, unique source and sink", ms.len()));
    if ms.len() <= DEFAULT_ALL_PAIRS_BOUND {
        let d = diameter(&fg, DEFAULT_ALL_PAIRS_BOUND)?;
        check("height = diameter", d == h, format!("height {h}, diameter {d}"));
    }
    let (z, o) = (clocked_state(b)?, counterclocked_state(b)?);
    check("extremes", &z == cd.zero_hat_matching() && &o == cd.one_hat_matching(), "greedy and enumerated agree".into());
    let d = symdiff_decompose(b, &z, &o)?;
    check("cycle sum", height_formula(&d) == h, format!("s = {:?}, height {h}", d.s_list()));
    if b.prime_like() != Some(false) && b.nugatory().is_empty() {
        let peel = peel_decompose(b)?;
        check("routes agree", peel.same_partition(&d), format!("peel s = {:?}", peel.s_list()));
        let props = check_cycle_properties(&d, b, &z, &o, inp.cap);
        check("cycle properties", props.passes(), format!("{:?}", props.problems()));
        let resonant = (0..b.faces().cycles.len()).all(|f| is_resonant(b, f, &ms));
        check(
            "elementary",
            is_elementary(b, &ms) && b.graph().is_two_connected() && resonant,
            "elementary, 2-connected, every face resonant".into(),
        );
    }
    if let Some(u) = &inp.universe {
        let (g, dual) = build_tait(u, &checkerboard(u, u.stars()));
        let (t, td) = (count_spanning_trees(&g), count_spanning_trees(&dual));
        check("matchings = trees", t == ms.len().into() && td == ms.len().into(), format!("{} vs {t}, {td}", ms.len()));
        if b.nugatory().is_empty() {
            let back = reconstruct_universe(b)?;
            check("round trip", isomorphic_with_stars(&back, u), "universe recovered".into());
        }
        // Pairings need the graph labelled by this universe's crossings and faces.
        let own = balanced_from_universe(u)?;
        let own_ms = enumerate_matchings(&own, inp.cap)?;
        let bad = own_ms
            .iter()
            .filter(|m| matching_to_morse(&own, m, u).map_or(true, |p| !verify_morse(&p).passes()))
            .count();
        check("Morse pairings", bad == 0, format!("{bad} of {} pairings invalid", own_ms.len()));
    }
    let report = lines.join("\n") + "\n";
    if failures > 0 {
        return Err(CliError::Checks { failed: failures, report });
    }
    Ok(report)
}

fn cmd_fixture(name: Option<&str>, format: Format) -> Result<String> {
    let Some(name) = name else {
        return Ok(FIXTURE_NAMES.iter().map(|n| format!("{n}\n")).collect::<String>() + "grid_M_N\n");
    };
    if format == Format::Dot {
        return Ok(gamma_dot(&load_fixture(name)?.balanced()?));
    }
    let f = load_fixture(name)?;
    if name.starts_with("grid_") {
        return Ok(f.balanced()?.to_json_string());
    }
    let file = if fixture_text(&format!("{name}_universe.json")).is_some() { format!("{name}_universe.json") } else { format!("{name}.json") };
    Ok(fixture_text(&file).ok_or_else(|| clocklat::Error::UnknownFixture(name.into()))?.to_string())
}

fn cmd_grid(m: usize, n: usize, format: Format) -> Result<String> {
    let b = grid(m, n)?;
    Ok(match format {
        Format::Json => b.to_json_string(),
        Format::Dot => gamma_dot(&b),
        Format::Text => format!(
            "grid {m}x{n}: {} black, {} white, {} edges, closed-form height {}\n",
            b.num_black(),
            b.graph().num_white(),
            b.num_edges(),
            grid_height_closed_form(m, n)
        ),
    })
}

fn run(cli: &Cli) -> Result<String> {
    let fmt = |default| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Parse(run) => cmd_parse(&load(run)?, fmt(Format::Text)),
        Command::Matchings { run, list } => cmd_matchings(&load(run)?, *list, fmt(Format::Text)),
        Command::Lattice(run) => cmd_lattice(&load(run)?, fmt(Format::Text)),
        Command::Height { run, verify } => cmd_height(&load(run)?, *verify, fmt(Format::Text)),
        Command::Decompose { run, route } => cmd_decompose(&load(run)?, *route, fmt(Format::Json)),
        Command::Grid { m, n } => cmd_grid(*m, *n, fmt(Format::Json)),
        Command::Fixture { name } => cmd_fixture(name.as_deref(), fmt(Format::Json)),
        Command::Export { what, run, state } => cmd_export(&load(run)?, *what, *state, cli.format),
        Command::Verify(run) => cmd_verify(&load(run)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &text).map_err(|source| CliError::Io { path: path.clone(), source }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Err(e) => {
            if let CliError::Checks { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
