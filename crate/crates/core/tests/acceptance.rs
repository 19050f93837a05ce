//! Acceptance gate. Runs every criterion at its exact tolerance, prints one
//! PASS or FAIL line per criterion and exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clocklat::clock::{
    build_flip_graph, clocked_state, counterclocked_state, diameter, height, orient_clock, verify_clock_theorem,
    ClockDag, Convention, FlipGraph, DEFAULT_ALL_PAIRS_BOUND,
};
use clocklat::decompose::{check_cycle_properties, height_formula, peel_decompose, symdiff_decompose, Decomposition};
use clocklat::diagram::isomorphic_with_stars;
use clocklat::generators::{grid, grid_height_closed_form, load_fixture};
use clocklat::matchings::{count_spanning_trees, enumerate_matchings, is_elementary, is_resonant, Matching};
use clocklat::morse::{matching_to_morse, verify_morse, Cell};
use clocklat::tait::{balanced_from_universe, build_tait, check_periphery, checkerboard, reconstruct_universe};
use clocklat::{BalancedGraph, Error, Universe};

/// Large enough to enumerate every grid up to 5 by 7 (167 089 states).
const CAP: usize = 200_000;

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fail<E: std::fmt::Display>(ctx: &str) -> impl FnOnce(E) -> String + '_ {
    move |e| format!("{ctx}: {e}")
}

struct Lattice {
    ms: Vec<Matching>,
    fg: FlipGraph,
    cd: ClockDag,
}

fn lattice(b: &BalancedGraph, name: &str) -> std::result::Result<Lattice, String> {
    let ms = enumerate_matchings(b, CAP).map_err(fail(name))?;
    let fg = build_flip_graph(b, &ms);
    let cd = orient_clock(fg.clone(), Convention::Counterclockwise).map_err(fail(name))?;
    Ok(Lattice { ms, fg, cd })
}

fn symdiff(b: &BalancedGraph, name: &str) -> std::result::Result<Decomposition, String> {
    let z = clocked_state(b).map_err(fail(name))?;
    let o = counterclocked_state(b).map_err(fail(name))?;
    symdiff_decompose(b, &z, &o).map_err(fail(name))
}

fn balanced(name: &str) -> std::result::Result<BalancedGraph, String> {
    load_fixture(name).and_then(|f| f.balanced()).map_err(fail(name))
}

fn universe(name: &str) -> std::result::Result<Universe, String> {
    load_fixture(name)
        .map_err(fail(name))?
        .universe
        .ok_or_else(|| format!("{name}: no universe"))
}

const KNOTS: &[&str] = &["trefoil", "figure8", "abe6", "k11n157"];
const UNIVERSES: &[&str] = &["trefoil", "figure8", "curl", "granny_shadow", "abe6", "k11n157"];
/// Grids whose lattices stay below the all-pairs bound.
const SMALL_GRIDS: &[(usize, usize)] = &[(1, 1), (1, 3), (3, 3), (3, 5), (5, 5)];

fn grid_name((m, n): (usize, usize)) -> String {
    format!("grid_{m}_{n}")
}

fn lattice_fixtures() -> Vec<String> {
    KNOTS.iter().map(|s| s.to_string()).chain(SMALL_GRIDS.iter().map(|&g| grid_name(g))).collect()
}

fn grid_heights() -> Outcome {
    let mut parts = Vec::new();
    for (m, n, want) in [(1, 1, 1), (3, 3, 10), (5, 5, 35), (3, 5, 18), (5, 7, 53)] {
        let name = grid_name((m, n));
        let b = grid(m, n).map_err(fail(&name))?;
        let bfs = height(&lattice(&b, &name)?.cd).height;
        let sym = height_formula(&symdiff(&b, &name)?);
        let peel = height_formula(&peel_decompose(&b).map_err(fail(&name))?);
        let closed = grid_height_closed_form(m, n);
        ensure!(
            [bfs, sym, peel, closed] == [want; 4],
            "{name}: bfs {bfs}, symdiff {sym}, peel {peel}, closed form {closed}, expected {want}"
        );
        parts.push(format!("{m}x{n}={want}"));
    }
    Ok(parts.join(" "))
}

fn clock_theorem() -> Outcome {
    let mut total = 0;
    for name in lattice_fixtures() {
        let b = balanced(&name)?;
        let ms = enumerate_matchings(&b, CAP).map_err(fail(&name))?;
        let fg = build_flip_graph(&b, &ms);
        let dag = orient_clock(fg, Convention::Counterclockwise);
        let cd = dag.map_err(fail(&name))?;
        let r = verify_clock_theorem(&cd);
        ensure!(r.passes(), "{name}: {}", r.describe());
        ensure!(
            r.acyclic && r.sources.len() == 1 && r.sinks.len() == 1 && r.unreachable == 0,
            "{name}: {}",
            r.describe()
        );
        total += ms.len();
    }
    Ok(format!("{} fixtures, {total} states, one source and one sink each", lattice_fixtures().len()))
}

fn height_is_diameter() -> Outcome {
    let mut parts = Vec::new();
    for name in lattice_fixtures() {
        let b = balanced(&name)?;
        let l = lattice(&b, &name)?;
        ensure!(l.ms.len() <= DEFAULT_ALL_PAIRS_BOUND, "{name}: {} states above the bound", l.ms.len());
        let h = height(&l.cd).height;
        let d = diameter(&l.fg, DEFAULT_ALL_PAIRS_BOUND).map_err(fail(&name))?;
        ensure!(h == d, "{name}: height {h} but diameter {d}");
        parts.push(format!("{name}={h}"));
    }
    Ok(parts.join(" "))
}

fn main_theorem() -> Outcome {
    let mut names = lattice_fixtures();
    names.push("granny_shadow".into());
    names.push(grid_name((5, 7)));
    let mut parts = Vec::new();
    for name in names {
        let b = balanced(&name)?;
        let h = height(&lattice(&b, &name)?.cd).height;
        let d = symdiff(&b, &name)?;
        let s = d.s_list();
        ensure!(height_formula(&d) == h, "{name}: s = {s:?} sums to {} but height is {h}", height_formula(&d));
        parts.push(format!("{name}:{s:?}"));
    }
    Ok(parts.join(" "))
}

fn decomposition_structure() -> Outcome {
    let b = balanced("k11n157")?;
    for d in [symdiff(&b, "k11n157")?, peel_decompose(&b).map_err(fail("k11n157 peel"))?] {
        ensure!(
            d.num_cycles() == 2 && d.leaves.len() == 1,
            "k11n157 ({:?}): {} cycles, {} leaves",
            d.route,
            d.num_cycles(),
            d.leaves.len()
        );
    }
    let grids = [(1, 1), (1, 3), (3, 3), (3, 5), (5, 5), (5, 7), (7, 7), (7, 9)];
    for (m, n) in grids {
        let name = grid_name((m, n));
        let b = grid(m, n).map_err(fail(&name))?;
        let want: Vec<usize> = (0..(m + 1) / 2).map(|i| (m - 2 * i) * (n - 2 * i)).collect();
        for d in [symdiff(&b, &name)?, peel_decompose(&b).map_err(fail(&name))?] {
            ensure!(d.s_list() == want, "{name} ({:?}): s = {:?}, expected {want:?}", d.route, d.s_list());
            ensure!(d.leaves.is_empty(), "{name}: unexpected leaves {:?}", d.leaves);
        }
    }
    Ok(format!("k11n157 2 cycles + 1 leaf; {} grids with s_i = (m-2i)(n-2i)", grids.len()))
}

fn prime_fixtures() -> Vec<String> {
    let mut names = lattice_fixtures();
    names.push(grid_name((5, 7)));
    names
}

fn elementarity() -> Outcome {
    let mut interiors = 0;
    for name in prime_fixtures() {
        let b = balanced(&name)?;
        ensure!(b.nugatory().is_empty() && b.prime_like() != Some(false), "{name}: not a prime-like reduced input");
        let ms = enumerate_matchings(&b, CAP).map_err(fail(&name))?;
        ensure!(is_elementary(&b, &ms), "{name}: not elementary");
        ensure!(b.graph().is_two_connected(), "{name}: not 2-connected");
        let faces = b.faces().cycles.len();
        ensure!((0..faces).all(|f| is_resonant(&b, f, &ms)), "{name}: a face is not resonant");
        let z = clocked_state(&b).map_err(fail(&name))?;
        let o = counterclocked_state(&b).map_err(fail(&name))?;
        let d = symdiff_decompose(&b, &z, &o).map_err(fail(&name))?;
        let report = check_cycle_properties(&d, &b, &z, &o, CAP);
        for c in &report.cycles {
            ensure!(
                c.elementary && c.two_connected && c.all_faces_resonant == Some(true),
                "{name} interior {}: elementary {} ({}), 2-connected {}, resonant {:?}",
                c.id,
                c.elementary,
                c.elementary_route,
                c.two_connected,
                c.all_faces_resonant
            );
        }
        interiors += report.cycles.len();
    }
    Ok(format!("{} graphs and {interiors} interior graphs", prime_fixtures().len()))
}

fn matchings_are_trees() -> Outcome {
    let mut parts = Vec::new();
    for name in UNIVERSES {
        let u = universe(name)?;
        let b = balanced_from_universe(&u).map_err(fail(name))?;
        let count = enumerate_matchings(&b, CAP).map_err(fail(name))?.len();
        let (g, dual) = build_tait(&u, &checkerboard(&u, u.stars()));
        let (t, t_dual) = (count_spanning_trees(&g), count_spanning_trees(&dual));
        ensure!(
            t == count.into() && t_dual == count.into(),
            "{name}: {count} matchings, {t} and {t_dual} spanning trees"
        );
        let oracle = (common::matching_count_dp(b.graph()), common::tree_count_float(g.num_vertices(), &g.edges));
        ensure!(oracle == (count as u64, count as u64), "{name}: reference counts {oracle:?} vs {count}");
        parts.push(format!("{name}={count}"));
    }
    Ok(parts.join(" "))
}

fn periphery() -> Outcome {
    let mut names: Vec<String> = UNIVERSES.iter().filter(|&&n| n != "curl").map(|s| s.to_string()).collect();
    names.extend(prime_fixtures().into_iter().filter(|n| n.starts_with("grid")));
    let mut interiors = 0;
    for name in &names {
        let b = balanced(name)?;
        let r = check_periphery(&b).map_err(fail(name))?;
        ensure!(r.n2 == 2 && r.n4 == 0 && r.black_leaves.is_empty(), "{name}: {r:?}");
        if b.prime_like() == Some(false) {
            continue;
        }
        let z = clocked_state(&b).map_err(fail(name))?;
        let o = counterclocked_state(&b).map_err(fail(name))?;
        let d = symdiff_decompose(&b, &z, &o).map_err(fail(name))?;
        let report = check_cycle_properties(&d, &b, &z, &o, CAP);
        for c in &report.cycles {
            ensure!(c.periphery && c.two_valent_blacks.len() == 2, "{name} interior {}: {:?}", c.id, c.problems);
        }
        interiors += report.cycles.len();
    }
    // The curl is nugatory: its black leaf must be reported, not tolerated.
    let curl = balanced("curl")?;
    ensure!(
        matches!(check_periphery(&curl), Err(Error::PeripheryViolation { .. })),
        "curl: nugatory crossing not reported"
    );
    Ok(format!("{} graphs and {interiors} interior graphs; curl rejected", names.len()))
}

fn round_trip() -> Outcome {
    let mut done = Vec::new();
    for name in UNIVERSES {
        let u = universe(name)?;
        let b = balanced_from_universe(&u).map_err(fail(name))?;
        if !b.nugatory().is_empty() {
            ensure!(
                matches!(reconstruct_universe(&b), Err(Error::PeripheryViolation { .. })),
                "{name}: nugatory input not rejected"
            );
            continue;
        }
        let back = reconstruct_universe(&b).map_err(fail(name))?;
        ensure!(isomorphic_with_stars(&back, &u), "{name}: reconstructed universe differs");
        done.push(*name);
    }
    for name in ["abe6", "k11n157"] {
        let f = load_fixture(name).map_err(fail(name))?;
        let stored = f.balanced.ok_or_else(|| format!("{name}: no stored graph"))?;
        let back = reconstruct_universe(&stored).map_err(fail(name))?;
        ensure!(balanced_from_universe(&back).map_err(fail(name))?.isomorphic(&stored), "{name}: graph round trip");
    }
    Ok(format!("{} (curl rejected as nugatory)", done.join(" ")))
}

fn morse() -> Outcome {
    let g33 = reconstruct_universe(&grid(3, 3).map_err(fail("grid_3_3"))?).map_err(fail("grid_3_3"))?;
    let mut parts = Vec::new();
    for (name, u) in [("trefoil", universe("trefoil")?), ("figure8", universe("figure8")?), ("grid_3_3", g33)] {
        let b = balanced_from_universe(&u).map_err(fail(name))?;
        let stars = u.stars();
        let dims = checkerboard(&u, stars);
        let cell = |f: usize| Cell { dim: if dims.color(f) == clocklat::tait::Color::Black { 0 } else { 2 }, id: f };
        let want: BTreeSet<Cell> = [cell(stars.first), cell(stars.second)].into();
        let ms = enumerate_matchings(&b, CAP).map_err(fail(name))?;
        for m in &ms {
            let p = matching_to_morse(&b, m, &u).map_err(fail(name))?;
            let r = verify_morse(&p);
            ensure!(r.passes(), "{name}: {:?}", r.failures);
            let got: BTreeSet<Cell> = r.critical.iter().copied().collect();
            ensure!(got == want, "{name}: critical {got:?}, stars {want:?}");
        }
        parts.push(format!("{name}={}", ms.len()));
    }
    Ok(format!("{} pairings acyclic with the starred cells critical", parts.join(" ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("grid heights", grid_heights, Some(Duration::from_secs(30))),
        ("clock theorem", clock_theorem, Some(Duration::from_secs(60))),
        ("height equals diameter", height_is_diameter, None),
        ("sum of cycle squares equals height", main_theorem, None),
        ("decomposition structure", decomposition_structure, None),
        ("elementary, 2-connected, resonant", elementarity, None),
        ("matchings equal spanning trees", matchings_are_trees, None),
        ("periphery valences", periphery, None),
        ("universe round trip", round_trip, None),
        ("discrete Morse pairings", morse, None),
    ];
    let mut failed = 0;
    for (i, (label, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, budget) {
            if took > *limit {
                outcome = Err(format!("took {took:.1?}, budget {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS {:>2} {label} [{took:.2?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {label} [{took:.2?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
