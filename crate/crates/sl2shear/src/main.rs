//! Command-line front end: distances, factorizations, two-slip reduction,
//! sphere meshes, disc paths and the verification suites.

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sl2shear::algebra::{AlgebraElement, GroupElement};
use sl2shear::cover::{cover_map, CoverElement};
use sl2shear::fammaps::Family;
use sl2shear::oracle;
use sl2shear::paths::{plan_rscp, write_path_csv};
use sl2shear::solver::{
    distance_psl2, distance_sl2, normalize_two_slip, DistanceResult, SlipPair,
};
use sl2shear::spheres::{build_sphere, filter_optimal, write_csv, write_obj, SphereGroup};
use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sl2shear",
    about = "Dissipation distance and optimal shear factorizations on SL(2)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupArg {
    Sl2,
    Psl2,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    F,
    F1,
    F2,
}

impl FamilyArg {
    fn family(self) -> Family {
        match self {
            FamilyArg::F => Family::F,
            FamilyArg::F1 => Family::F1,
            FamilyArg::F2 => Family::F2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SphereGroupArg {
    Sl2,
    Cover,
}

#[derive(Subcommand)]
enum Command {
    /// Distance from the identity: cost, optimal map, parameters, factors
    Dist {
        /// Row-major matrix entries a,b,c,d with det = 1
        #[arg(long)]
        matrix: String,
        #[arg(long, value_enum, default_value = "sl2")]
        group: GroupArg,
        #[arg(long, value_enum, default_value = "f1")]
        family: FamilyArg,
        #[arg(long)]
        json: bool,
    },
    /// Same as dist, with the factor sequence spelled out arc by arc
    Factorize {
        #[arg(long)]
        matrix: String,
        #[arg(long, value_enum, default_value = "sl2")]
        group: GroupArg,
        #[arg(long, value_enum, default_value = "f1")]
        family: FamilyArg,
        #[arg(long)]
        json: bool,
    },
    /// Reduce an arbitrary two-slip system to the canonical one
    Twoslip {
        /// First slip system in (h, t, u) coordinates
        #[arg(long)]
        s1: String,
        /// Second slip system in (h, t, u) coordinates
        #[arg(long)]
        s2: String,
        #[arg(long)]
        matrix: String,
        #[arg(long, value_enum, default_value = "f1")]
        family: FamilyArg,
        #[arg(long)]
        json: bool,
    },
    /// Mesh a metric sphere and write it as OBJ (or CSV by extension)
    Sphere {
        #[arg(long)]
        cost: f64,
        #[arg(long, default_value = "24")]
        res: usize,
        #[arg(long)]
        out: String,
        /// Prune vertices that are not optimal, with this tolerance
        #[arg(long)]
        filter: Option<f64>,
        #[arg(long, value_enum, default_value = "sl2")]
        group: SphereGroupArg,
    },
    /// Optimal Reeds-Shepp car path in the Poincare disc, as CSV plot data
    Path {
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "0.01")]
        step: f64,
        #[arg(long)]
        out: String,
    },
    /// Run the numeric verification suites; exit 0 iff everything passes
    Verify {
        /// One of: identities, oracle, all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "7")]
        seed: u64,
        #[arg(long, default_value = "64")]
        samples: usize,
    },
}

fn parse_matrix(text: &str) -> Result<GroupElement, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("matrix entries must be numbers: {e}"))?;
    if parts.len() != 4 {
        return Err(format!("expected 4 matrix entries, got {}", parts.len()));
    }
    GroupElement::new(parts[0], parts[1], parts[2], parts[3]).map_err(|e| e.to_string())
}

fn parse_triple(text: &str) -> Result<AlgebraElement, String> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("coordinates must be numbers: {e}"))?;
    if parts.len() != 3 {
        return Err(format!("expected 3 coordinates, got {}", parts.len()));
    }
    Ok(AlgebraElement::new(parts[0], parts[1], parts[2]))
}

fn fmt(x: f64) -> String {
    format!("{:.16e}", x)
}

fn result_json(res: &DistanceResult) -> String {
    let factors: Vec<String> = res
        .factorization
        .factors
        .iter()
        .map(|(c, d)| format!("{{\"control\":\"{}\",\"duration\":{}}}", c, fmt(*d)))
        .collect();
    format!(
        "{{\"cost\":{},\"group\":\"{}\",\"map\":\"{}\",\"symmetry\":\"{}\",\"params\":[{},{},{}],\"factors\":[{}]}}",
        fmt(res.cost),
        res.group.as_str(),
        res.map_name,
        res.symmetry,
        fmt(res.params.0),
        fmt(res.params.1),
        fmt(res.params.2),
        factors.join(",")
    )
}

fn print_result(res: &DistanceResult, json: bool, spell_out: bool) {
    if json {
        println!("{}", result_json(res));
        return;
    }
    println!("cost {}", fmt(res.cost));
    println!(
        "map {} symmetry {} params ({}, {}, {})",
        res.map_name,
        res.symmetry,
        fmt(res.params.0),
        fmt(res.params.1),
        fmt(res.params.2)
    );
    if spell_out {
        let mut tau = 0.0;
        for (ctrl, dur) in &res.factorization.factors {
            println!("  t = {} .. {}  control {}", fmt(tau), fmt(tau + dur), ctrl);
            tau += dur;
        }
        if res.factorization.is_empty() {
            println!("  (identity, no factors)");
        }
    } else {
        println!("factors {}", res.factorization);
    }
}

fn distance_command(
    matrix: &str,
    group: GroupArg,
    family: FamilyArg,
    json: bool,
    spell_out: bool,
) -> Result<u8, String> {
    let g = parse_matrix(matrix)?;
    let res = match group {
        GroupArg::Sl2 => distance_sl2(&g, family.family()),
        GroupArg::Psl2 => distance_psl2(&g, family.family()),
    }
    .map_err(|e| e.to_string())?;
    print_result(&res, json, spell_out);
    Ok(0)
}

fn run() -> Result<u8, String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Dist {
            matrix,
            group,
            family,
            json,
        } => distance_command(&matrix, group, family, json, false),
        Command::Factorize {
            matrix,
            group,
            family,
            json,
        } => distance_command(&matrix, group, family, json, true),
        Command::Twoslip {
            s1,
            s2,
            matrix,
            family,
            json,
        } => {
            let s1 = parse_triple(&s1)?;
            let s2 = parse_triple(&s2)?;
            let g = parse_matrix(&matrix)?;
            let pair = SlipPair::new(s1, s2).map_err(|e| e.to_string())?;
            let (mu, g0) = normalize_two_slip(&pair).map_err(|e| e.to_string())?;
            let conj = g0.inverse().mul(&g).mul(&g0);
            let res = distance_sl2(&conj, family.family()).map_err(|e| e.to_string())?;
            let dist = res.cost / mu;
            if json {
                println!(
                    "{{\"mu\":{},\"lambda\":{},\"g0\":[{},{},{},{}],\"distance\":{}}}",
                    fmt(mu),
                    fmt(1.0 / mu),
                    fmt(g0.a),
                    fmt(g0.b),
                    fmt(g0.c),
                    fmt(g0.d),
                    fmt(dist)
                );
            } else {
                println!("mu {}", fmt(mu));
                println!("lambda {}", fmt(1.0 / mu));
                println!(
                    "g0 [{}, {}; {}, {}]",
                    fmt(g0.a),
                    fmt(g0.b),
                    fmt(g0.c),
                    fmt(g0.d)
                );
                println!("distance {}", fmt(dist));
            }
            Ok(0)
        }
        Command::Sphere {
            cost,
            res,
            out,
            filter,
            group,
        } => {
            let sphere_group = match group {
                SphereGroupArg::Sl2 => SphereGroup::Sl2,
                SphereGroupArg::Cover => SphereGroup::Cover,
            };
            let mut patches = build_sphere(cost, res, sphere_group).map_err(|e| e.to_string())?;
            if let Some(tol) = filter {
                patches = filter_optimal(&patches, tol);
            }
            let file = File::create(&out).map_err(|e| format!("cannot write {out}: {e}"))?;
            let mut w = BufWriter::new(file);
            if out.ends_with(".csv") {
                write_csv(&patches, &mut w).map_err(|e| e.to_string())?;
            } else {
                write_obj(&patches, &mut w).map_err(|e| e.to_string())?;
            }
            eprintln!(
                "wrote {} patches, {} vertices to {out}",
                patches.len(),
                patches.iter().map(|p| p.vertices.len()).sum::<usize>()
            );
            Ok(0)
        }
        Command::Path { matrix, step, out } => {
            if step <= 0.0 || step.is_nan() {
                return Err("step must be positive".into());
            }
            let g = parse_matrix(&matrix)?;
            let (res, samples) = plan_rscp(&g, step).map_err(|e| e.to_string())?;
            let file = File::create(&out).map_err(|e| format!("cannot write {out}: {e}"))?;
            write_path_csv(&samples, BufWriter::new(file)).map_err(|e| e.to_string())?;
            eprintln!(
                "cost {} with {} arcs; {} samples written to {out}",
                fmt(res.cost),
                res.factorization.len(),
                samples.len()
            );
            Ok(0)
        }
        Command::Verify {
            suite,
            seed,
            samples,
        } => {
            let mut all_pass = true;
            match suite.as_str() {
                "identities" => all_pass &= verify_identities(seed, samples),
                "oracle" => all_pass &= verify_oracle(seed, samples),
                "all" => {
                    all_pass &= verify_identities(seed, samples);
                    all_pass &= verify_oracle(seed, samples);
                }
                other => return Err(format!("unknown suite `{other}`")),
            }
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

fn verify_identities(seed: u64, samples: usize) -> bool {
    let report = oracle::identity_suite(seed, samples.max(50));
    println!("{report}");
    report.all_pass()
}

fn verify_oracle(seed: u64, samples: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass = true;

    // rotations must reproduce sin(a) + 2 tan(a/2)
    let mut max_err = 0.0f64;
    for k in 1..=5 {
        let alpha = 0.28 * k as f64;
        let g = sl2shear::algebra::exp_matrix(&AlgebraElement::U.scale(alpha));
        let expect = alpha.sin() + 2.0 * (alpha / 2.0).tan();
        let d = distance_sl2(&g, Family::F1)
            .expect("rotation is unimodular")
            .cost;
        max_err = max_err.max((d - expect).abs());
    }
    let ok = max_err < 1e-8;
    println!(
        "[{}] rotation formula           samples    5  max err {:.3e}  (tol 1.0e-8)",
        if ok { "PASS" } else { "FAIL" },
        max_err
    );
    pass &= ok;

    // the oracle never undercuts the solver
    let n = samples.clamp(10, 200);
    let mut worst = f64::INFINITY;
    for i in 0..n {
        let g = cover_map(&CoverElement::new(
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
        ));
        let exact = distance_sl2(&g, Family::F2)
            .expect("sampled unimodular")
            .cost;
        let ub = oracle::refine_upper_bound(&g, 5, 16, seed.wrapping_add(i as u64));
        worst = worst.min(ub - exact);
    }
    let ok = worst > -1e-5;
    println!(
        "[{}] oracle soundness           samples {:>4}  min slack {:.3e}  (tol -1.0e-5)",
        if ok { "PASS" } else { "FAIL" },
        n,
        worst
    );
    pass &= ok;
    pass
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
