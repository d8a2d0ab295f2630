//! Command-line front end: validation, curvature tables, the
//! prescribed-curvature solver, Schwarz-Pick comparison checks, the
//! counterexample, degeneration scans, and doubling.
//!
//! Files are 0-based; vertex arguments and printed tables use 1-based
//! labels, matching the usual convention for these surfaces. Exit
//! codes: 0 success, 1 domain failure (invalid metric, solver failure,
//! violated conclusion), 2 malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use circlepack::io::{
    pairs_to_map, report_to_json, verdict_to_json, FixedRadiiFile, RadiusFile, SurfaceFile,
    TargetCurvatureFile,
};
use circlepack::*;

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;

struct CliError {
    code: u8,
    message: String,
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Library errors hit while operating on well-formed inputs: metric
/// and solver failures exit 1, anything structural exits 2.
fn op_error(e: Error) -> CliError {
    let code = match e {
        Error::NotAPackingMetric { .. }
        | Error::InfeasibleTarget { .. }
        | Error::NotConcaveRegion { .. }
        | Error::MaxIterations(_)
        | Error::DegenerateTriangle { .. }
        | Error::InversiveOutOfRange { .. }
        | Error::AlreadyClosed => EXIT_DOMAIN,
        _ => EXIT_USAGE,
    };
    CliError {
        code,
        message: e.to_string(),
    }
}

#[derive(Parser)]
#[command(
    name = "circlepack",
    about = "Inversive-distance circle packing metrics on triangulated surfaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether radii induce a packing metric (exit 0 iff they do)
    Validate {
        #[arg(short = 's', long)]
        surface: PathBuf,
        #[arg(short = 'r', long)]
        radii: PathBuf,
        /// Emit the full metric report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Print the discrete curvature table induced by radii
    Curvature {
        #[arg(short = 's', long)]
        surface: PathBuf,
        #[arg(short = 'r', long)]
        radii: PathBuf,
        /// Emit the full metric report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Solve for radii achieving target curvatures on A with radii fixed on B
    Solve {
        #[arg(short = 's', long)]
        surface: PathBuf,
        /// JSON file {"fixed": [[vertex, radius], ...]} (0-based)
        #[arg(long)]
        fix: PathBuf,
        /// JSON file {"target": [[vertex, curvature], ...]} (0-based)
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        /// Backtracking shrink factor of the line search
        #[arg(long, default_value_t = 0.5)]
        damping: f64,
        /// Output radius file
        #[arg(short = 'o', long, default_value = "solved_radii.json")]
        out: PathBuf,
        /// Convergence log (CSV: iteration, residual, step size)
        #[arg(long, default_value = "convergence.csv")]
        log: PathBuf,
    },
    /// Check the Schwarz-Pick comparison verdict (exit 0 iff R >= r)
    Compare {
        #[arg(short = 's', long)]
        surface: PathBuf,
        /// Reference metric r
        #[arg(long = "r", value_name = "FILE")]
        reference: PathBuf,
        /// Candidate metric R
        #[arg(long = "R", value_name = "FILE")]
        candidate: PathBuf,
        /// Vertices of A, 1-based, comma-separated (B is the rest)
        #[arg(long = "A", value_name = "LIST")]
        part_a: String,
        /// Slack for all three inequality families
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Write the I >= 1 counterexample (optionally doubled) and print its verdict
    Counterexample {
        /// Use the doubled, closed version
        #[arg(long)]
        doubled: bool,
        /// Directory receiving surface.json, r.json, R.json
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Emit everything as JSON instead of tables
        #[arg(long)]
        json: bool,
    },
    /// Scan sum_J K as the radii on J shrink, against the degeneration limit
    Degenerate {
        #[arg(short = 's', long)]
        surface: PathBuf,
        #[arg(short = 'r', long)]
        radii: PathBuf,
        /// Vertices of J, 1-based, comma-separated
        #[arg(long = "J", value_name = "LIST")]
        subset: String,
        /// Comma-separated radii to assign on J, e.g. 1,0.1,0.01
        #[arg(long)]
        eps: String,
        /// Emit the scan as JSON
        #[arg(long)]
        json: bool,
    },
    /// Double a disk along its boundary and write the closed surface
    Double {
        #[arg(short = 's', long)]
        surface: PathBuf,
        #[arg(short = 'o', long, default_value = "doubled_surface.json")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage_error(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| usage_error(format!("cannot parse {}: {}", path.display(), e)))
}

fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| usage_error(format!("cannot write {}: {}", path.display(), e)))
}

fn load_surface(path: &Path) -> CliResult<WeightedSurface> {
    read_json::<SurfaceFile>(path)?
        .into_surface()
        .map_err(|e| usage_error(format!("{}: {}", path.display(), e)))
}

fn load_radii(path: &Path, vertex_count: usize) -> CliResult<RadiusVector> {
    read_json::<RadiusFile>(path)?
        .into_radii(vertex_count)
        .map_err(|e| usage_error(format!("{}: {}", path.display(), e)))
}

/// Parses a 1-based comma-separated vertex list into 0-based indices.
fn parse_vertices(list: &str, vertex_count: usize) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for item in list.split(',') {
        let label: usize = item
            .trim()
            .parse()
            .map_err(|_| usage_error(format!("bad vertex label '{}'", item.trim())))?;
        if label == 0 || label > vertex_count {
            return Err(usage_error(format!(
                "vertex label {} out of range 1..{}",
                label, vertex_count
            )));
        }
        out.push(label - 1);
    }
    Ok(out)
}

fn parse_eps_list(list: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for item in list.split(',') {
        let eps: f64 = item
            .trim()
            .parse()
            .map_err(|_| usage_error(format!("bad radius '{}'", item.trim())))?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(usage_error(format!("radius {} must be positive", eps)));
        }
        out.push(eps);
    }
    Ok(out)
}

fn face_label(face: Face) -> String {
    format!("{{{},{},{}}}", face[0] + 1, face[1] + 1, face[2] + 1)
}

fn edge_label(e: Edge) -> String {
    format!("{{{},{}}}", e.0 + 1, e.1 + 1)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Validate { surface, radii, json } => validate(&surface, &radii, json),
        Command::Curvature { surface, radii, json } => curvature(&surface, &radii, json),
        Command::Solve {
            surface,
            fix,
            target,
            tol,
            max_iter,
            damping,
            out,
            log,
        } => solve(&surface, &fix, &target, tol, max_iter, damping, &out, &log),
        Command::Compare {
            surface,
            reference,
            candidate,
            part_a,
            tol,
        } => compare(&surface, &reference, &candidate, &part_a, tol),
        Command::Counterexample { doubled, out_dir, json } => counterexample(doubled, &out_dir, json),
        Command::Degenerate {
            surface,
            radii,
            subset,
            eps,
            json,
        } => degenerate(&surface, &radii, &subset, &eps, json),
        Command::Double { surface, out } => double_cmd(&surface, &out),
    }
}

fn validate(surface_path: &Path, radii_path: &Path, json: bool) -> CliResult<u8> {
    let surface = load_surface(surface_path)?;
    let r = load_radii(radii_path, surface.vertex_count())?;
    let report = metric_report(&surface, &r);
    if json {
        println!("{}", serde_json::to_string_pretty(&report_to_json(&report)).unwrap());
    } else {
        for (face, ok) in &report.face_valid {
            println!(
                "face {}: {}",
                face_label(*face),
                if *ok { "valid" } else { "DEGENERATE" }
            );
        }
        println!(
            "packing metric: {}",
            if report.is_packing_metric { "yes" } else { "no" }
        );
    }
    Ok(if report.is_packing_metric { 0 } else { EXIT_DOMAIN })
}

fn curvature_table(heading: &str, curvatures: &[f64]) {
    println!("{:<8} {:>12}", "vertex", heading);
    for (v, k) in curvatures.iter().enumerate() {
        println!("{:<8} {:>12.5}", v + 1, k);
    }
}

fn curvature(surface_path: &Path, radii_path: &Path, json: bool) -> CliResult<u8> {
    let surface = load_surface(surface_path)?;
    let r = load_radii(radii_path, surface.vertex_count())?;
    let report = metric_report(&surface, &r);
    if json {
        println!("{}", serde_json::to_string_pretty(&report_to_json(&report)).unwrap());
        return Ok(if report.is_packing_metric { 0 } else { EXIT_DOMAIN });
    }
    let curvatures = report.curvatures().ok_or_else(|| {
        op_error(Error::NotAPackingMetric {
            metric: "r".into(),
            face: report.first_invalid_face().unwrap(),
        })
    })?;
    curvature_table("K", &curvatures);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn solve(
    surface_path: &Path,
    fix_path: &Path,
    target_path: &Path,
    tol: f64,
    max_iter: usize,
    damping: f64,
    out: &Path,
    log: &Path,
) -> CliResult<u8> {
    let surface = load_surface(surface_path)?;
    let fixed_file: FixedRadiiFile = read_json(fix_path)?;
    let target_file: TargetCurvatureFile = read_json(target_path)?;
    let fixed = pairs_to_map(&fixed_file.fixed, "fixed").map_err(|e| usage_error(e.to_string()))?;
    let target =
        pairs_to_map(&target_file.target, "target").map_err(|e| usage_error(e.to_string()))?;

    let options = SolveOptions { tol, max_iter, damping };
    let outcome =
        solve_prescribed_curvature(&surface, &fixed, &target, &options).map_err(op_error)?;

    write_json(
        out,
        &serde_json::to_value(RadiusFile::from_radii(&outcome.radii)).unwrap(),
    )?;
    let mut csv = String::from("iteration,residual,step_size\n");
    for record in &outcome.trace {
        csv.push_str(&format!(
            "{},{:e},{:e}\n",
            record.iteration, record.residual, record.step_size
        ));
    }
    fs::write(log, csv).map_err(|e| usage_error(format!("cannot write {}: {}", log.display(), e)))?;

    println!(
        "converged in {} iterations, residual {:.3e}",
        outcome.iterations, outcome.residual
    );
    println!("wrote {} and {}", out.display(), log.display());
    Ok(0)
}

fn compare(
    surface_path: &Path,
    reference_path: &Path,
    candidate_path: &Path,
    part_a: &str,
    tol: f64,
) -> CliResult<u8> {
    let surface = load_surface(surface_path)?;
    let n = surface.vertex_count();
    let reference = load_radii(reference_path, n)?;
    let candidate = load_radii(candidate_path, n)?;
    let a = parse_vertices(part_a, n)?;
    let partition =
        PartitionAB::from_a(VertexSubset::new(a), n).map_err(|e| usage_error(e.to_string()))?;
    let tolerance = VerdictTolerance {
        hypothesis_slack: tol,
        violation_threshold: tol,
    };
    let verdict = check_comparison(&surface, &partition, &reference, &candidate, tolerance)
        .map_err(op_error)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&verdict_to_json(&verdict, &reference, &candidate)).unwrap()
    );
    Ok(if verdict.conclusion_ok { 0 } else { EXIT_DOMAIN })
}

fn counterexample(doubled: bool, out_dir: &Path, json: bool) -> CliResult<u8> {
    let instance = if doubled {
        doubled_counterexample()
    } else {
        build_counterexample()
    };
    let report_r = metric_report(&instance.surface, &instance.reference);
    let report_big = metric_report(&instance.surface, &instance.candidate);
    let k_r = report_r.curvatures().expect("packing metric");
    let k_big = report_big.curvatures().expect("packing metric");
    let verdict = check_comparison(
        &instance.surface,
        &instance.partition,
        &instance.reference,
        &instance.candidate,
        VerdictTolerance::EXACT,
    )
    .expect("counterexample metrics are valid");

    fs::create_dir_all(out_dir)
        .map_err(|e| usage_error(format!("cannot create {}: {}", out_dir.display(), e)))?;
    write_json(
        &out_dir.join("surface.json"),
        &serde_json::to_value(SurfaceFile::from_surface(&instance.surface)).unwrap(),
    )?;
    write_json(
        &out_dir.join("r.json"),
        &serde_json::to_value(RadiusFile::from_radii(&instance.reference)).unwrap(),
    )?;
    write_json(
        &out_dir.join("R.json"),
        &serde_json::to_value(RadiusFile::from_radii(&instance.candidate)).unwrap(),
    )?;

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "surface": SurfaceFile::from_surface(&instance.surface),
                "r": instance.reference.values(),
                "R": instance.candidate.values(),
                "K_r": k_r,
                "K_R": k_big,
                "verdict": verdict_to_json(&verdict, &instance.reference, &instance.candidate),
            }))
            .unwrap()
        );
        return Ok(0);
    }

    if doubled {
        println!("Doubled counterexample: closed surface from two copies of the disk");
    } else {
        println!("Counterexample: weighted triangulated disk, Euclidean background, I >= 1");
    }
    let t = instance.surface.triangulation();
    let faces: Vec<String> = t.faces().iter().map(|f| face_label(*f)).collect();
    println!("faces {}; I(2,4) = 4, I(3,4) = 3, I = 1 elsewhere", faces.join(" "));
    let labels = |s: &VertexSubset| -> String {
        let inside: Vec<String> = s.iter().map(|v| (v + 1).to_string()).collect();
        format!("{{{}}}", inside.join(","))
    };
    println!(
        "A = {}, B = {}",
        labels(instance.partition.a()),
        labels(instance.partition.b())
    );
    let radii_list = |r: &RadiusVector| -> String {
        let values: Vec<String> = r.values().iter().map(|x| format!("{}", x)).collect();
        format!("({})", values.join(", "))
    };
    println!("r = {}", radii_list(&instance.reference));
    println!("R = {}", radii_list(&instance.candidate));
    println!();
    println!("edge     {:>12} {:>12}", "l_r", "l_R");
    for (e, l) in &report_r.edge_lengths {
        println!(
            "{:<8} {:>12.5} {:>12.5}",
            edge_label(*e),
            l,
            report_big.edge_lengths[e]
        );
    }
    println!();
    println!("vertex   {:>12} {:>12}", "K_r", "K_R");
    for v in 0..t.vertex_count() {
        println!("{:<8} {:>12.5} {:>12.5}", v + 1, k_r[v], k_big[v]);
    }
    println!();
    println!(
        "hypothesis R|_B >= r|_B: {}",
        if verdict.hyp_radii_ok { "holds" } else { "fails" }
    );
    println!(
        "hypothesis K_R|_A >= K_r|_A: {}",
        if verdict.hyp_curv_ok { "holds" } else { "fails" }
    );
    if verdict.conclusion_ok {
        println!("conclusion R >= r: holds");
    } else {
        println!("conclusion R >= r: VIOLATED");
        for &v in &verdict.violating_vertices {
            println!(
                "  at vertex {}: r = {:.5} > R = {:.5}",
                v + 1,
                instance.reference.get(v),
                instance.candidate.get(v)
            );
        }
    }
    println!("wrote surface.json, r.json, R.json");
    Ok(0)
}

fn degenerate(
    surface_path: &Path,
    radii_path: &Path,
    subset: &str,
    eps: &str,
    json: bool,
) -> CliResult<u8> {
    let surface = load_surface(surface_path)?;
    let n = surface.vertex_count();
    let base = load_radii(radii_path, n)?;
    let members = parse_vertices(subset, n)?;
    let j = VertexSubset::new(members.iter().copied());
    let eps_list = parse_eps_list(eps)?;

    let limit = degeneration_limit(&surface, &j).map_err(op_error)?;
    let mut rows = Vec::new();
    for &eps in &eps_list {
        let values: Vec<f64> = (0..n)
            .map(|v| if j.contains(v) { eps } else { base.get(v) })
            .collect();
        let report = metric_report(&surface, &RadiusVector::new(values).map_err(op_error)?);
        let sum: Option<f64> = j.iter().map(|v| report.curvature[v]).sum();
        rows.push((eps, sum));
    }

    if json {
        let rows: Vec<serde_json::Value> = rows
            .iter()
            .map(|(eps, sum)| {
                serde_json::json!({
                    "eps": eps,
                    "sum_K_J": sum,
                    "limit": limit,
                    "gap": sum.map(|s| s - limit),
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&rows).unwrap());
        return Ok(0);
    }

    println!(
        "{:<12} {:>12} {:>12} {:>12}",
        "eps", "sum_K_J", "limit", "gap"
    );
    for (eps, sum) in rows {
        match sum {
            Some(s) => println!(
                "{:<12} {:>12.5} {:>12.5} {:>12.5}",
                format!("{}", eps),
                s,
                limit,
                s - limit
            ),
            None => println!(
                "{:<12} {:>12} {:>12.5} {:>12}",
                format!("{}", eps),
                "degenerate",
                limit,
                "-"
            ),
        }
    }
    Ok(0)
}

fn double_cmd(surface_path: &Path, out: &Path) -> CliResult<u8> {
    let disk = load_surface(surface_path)?;
    let doubling = double(&disk).map_err(op_error)?;
    let t = doubling.surface.triangulation();
    write_json(
        out,
        &serde_json::to_value(SurfaceFile::from_surface(&doubling.surface)).unwrap(),
    )?;
    println!(
        "doubled: {} vertices, {} edges, {} faces, chi = {}",
        t.vertex_count(),
        t.edges().len(),
        t.faces().len(),
        t.euler_characteristic()
    );
    println!("wrote {}", out.display());
    Ok(0)
}
