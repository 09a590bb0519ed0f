//! One function per subcommand. Each prints either a human summary or, with
//! `--json`, a [`ReportFile`]; verdicts always carry the rank fraction and
//! the tolerance that produced them.

use std::fs;
use std::path::Path;

use lumpsys::compartmental::chain_to_network;
use lumpsys::lumping::{
    build_m_from_eigenvectors, is_kinetic_lumping, make_scheme, verify_preservation_with,
    KineticWitness,
};
use lumpsys::{
    classify, gen_chain, lump_system, simulate, steer, AnalysisReport, ChainSpec,
    Classification, ControlSignal, Error, LtiSystem, Matrix,
};
use serde_json::json;

use crate::files::{self, ControlFile, NetworkFile, ReportFile, SystemFile};
use crate::CliError;

pub struct Ctx {
    pub tol: Option<f64>,
    pub json: bool,
}

fn lib_error(e: Error) -> CliError {
    match &e {
        Error::InvalidShape(_)
        | Error::NonFinite { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotSquare { .. }
        | Error::InvalidTolerance(_)
        | Error::InvalidSelection(_)
        | Error::NonPositive { .. }
        | Error::UnsupportedChainLength(_)
        | Error::SelfLoop { .. }
        | Error::UnknownSpecies { .. }
        | Error::InvalidControl(_) => CliError::Input(e.to_string()),
        _ => CliError::Math(e.to_string()),
    }
}

fn analysis_json(r: &AnalysisReport) -> serde_json::Value {
    json!({
        "verdict": r.verdict,
        "rank": r.rank.rank,
        "state_dim": r.state_dim,
        "test_matrix_rows": r.test_matrix_dims.0,
        "test_matrix_cols": r.test_matrix_dims.1,
        "singular_values": r.rank.singular_values,
        "tolerance_used": r.rank.tolerance_used,
    })
}

fn verdict_line(label: &str, r: &AnalysisReport) -> String {
    format!(
        "{label}: {} (rank {}/{}, tolerance {:.1e})",
        if r.verdict { "yes" } else { "no" },
        r.rank.rank,
        r.state_dim,
        r.rank.tolerance_used
    )
}

fn witness_line(w: &KineticWitness) -> String {
    match w {
        KineticWitness::Kinetic { pivot_columns } => {
            let cols: Vec<String> = pivot_columns.iter().map(|c| (c + 1).to_string()).collect();
            format!("yes (pivot columns {})", cols.join(", "))
        }
        KineticWitness::NegativeEntry { row, col } => {
            format!("no (negative entry at row {}, column {})", row + 1, col + 1)
        }
        KineticWitness::MissingPivot { row } => {
            format!("no (row {} owns no column of its own)", row + 1)
        }
    }
}

fn witness_json(w: &KineticWitness) -> serde_json::Value {
    match w {
        KineticWitness::Kinetic { pivot_columns } => json!({
            "kind": "kinetic",
            "pivot_columns": pivot_columns.iter().map(|c| c + 1).collect::<Vec<_>>(),
        }),
        KineticWitness::NegativeEntry { row, col } => json!({
            "kind": "negative_entry",
            "row": row + 1,
            "col": col + 1,
        }),
        KineticWitness::MissingPivot { row } => json!({
            "kind": "missing_pivot",
            "row": row + 1,
        }),
    }
}

fn print_report(report: &ReportFile) {
    print!(
        "{}",
        files::render_json(report).expect("report serialization cannot fail")
    );
}

fn system_echo(path: &Path, sys: &LtiSystem) -> serde_json::Value {
    json!({
        "system": path.display().to_string(),
        "n": sys.state_dim(),
        "r": sys.input_dim(),
        "p": sys.output_dim(),
    })
}

pub fn analyze(path: &Path, ctx: &Ctx) -> Result<(), CliError> {
    let sys = files::read_system(path)?.to_system()?;
    let c = sys.is_controllable(ctx.tol).map_err(lib_error)?;
    let o = sys.is_observable(ctx.tol).map_err(lib_error)?;

    if ctx.json {
        print_report(&ReportFile {
            command: "analyze".into(),
            inputs: system_echo(path, &sys),
            results: json!({
                "controllability": analysis_json(&c),
                "observability": analysis_json(&o),
            }),
            tolerances: json!({ "rank_rel_tol": ctx.tol }),
        });
    } else {
        println!(
            "system: {} states, {} inputs, {} outputs",
            sys.state_dim(),
            sys.input_dim(),
            sys.output_dim()
        );
        println!("{}", verdict_line("controllable", &c));
        println!("{}", verdict_line("observable", &o));
    }
    Ok(())
}

pub struct LumpArgs<'a> {
    pub system: &'a Path,
    pub m_file: Option<&'a Path>,
    pub eigvecs: Option<Vec<usize>>,
    pub mix: Option<Vec<f64>>,
    pub out: Option<&'a Path>,
}

fn build_m(sys: &LtiSystem, args: &LumpArgs) -> Result<Matrix, CliError> {
    match (&args.m_file, &args.eigvecs) {
        (Some(path), None) => files::read_matrix(path),
        (None, Some(indices)) => {
            let mix = args.mix.as_ref().expect("clap ties --mix to --eigvecs");
            let l = indices.len();
            if mix.len() != l * l {
                return Err(CliError::Input(format!(
                    "--mix needs {} entries for {l} eigenvectors, got {}",
                    l * l,
                    mix.len()
                )));
            }
            if indices.contains(&0) {
                return Err(CliError::Input(
                    "--eigvecs indices are 1-based (1 = lowest eigenvalue)".into(),
                ));
            }
            let selection: Vec<usize> = indices.iter().map(|&i| i - 1).collect();
            let mix = Matrix::new(l, l, mix.clone()).map_err(files::input_error)?;
            build_m_from_eigenvectors(&sys.a, &selection, &mix).map_err(lib_error)
        }
        _ => Err(CliError::Input(
            "provide a lumping matrix via --m-file or --eigvecs/--mix".into(),
        )),
    }
}

pub fn lump(args: &LumpArgs, ctx: &Ctx) -> Result<(), CliError> {
    let sys = files::read_system(args.system)?.to_system()?;
    let m = build_m(&sys, args)?;
    let scheme = make_scheme(&sys.a, m, None).map_err(lib_error)?;
    let lumped = lump_system(&sys, &scheme).map_err(lib_error)?;
    let kinetic = is_kinetic_lumping(&scheme.m);
    let preservation = verify_preservation_with(&sys, &scheme, ctx.tol).map_err(lib_error)?;

    if let Some(out) = args.out {
        files::write_json(out, &SystemFile::from_system(&lumped.system, None))?;
    }

    if ctx.json {
        print_report(&ReportFile {
            command: "lump".into(),
            inputs: system_echo(args.system, &sys),
            results: json!({
                "m": files::matrix_rows(&scheme.m),
                "a_hat": files::matrix_rows(&scheme.a_hat),
                "residual": scheme.residual,
                "dual_residual": lumped.dual_residual,
                "kinetic": witness_json(&kinetic),
                "preservation": {
                    "original": analysis_json(&preservation.original),
                    "lumped": analysis_json(&preservation.lumped),
                    "consistent": preservation.theorem_consistent,
                },
                "out": args.out.map(|p| p.display().to_string()),
            }),
            tolerances: json!({
                "rank_rel_tol": ctx.tol,
                "exactness_tol": scheme.tolerance,
            }),
        });
    } else {
        println!(
            "lumping: {} x {}, residual {:.1e} (tolerance {:.1e})",
            scheme.m.rows(),
            scheme.m.cols(),
            scheme.residual,
            scheme.tolerance
        );
        println!(
            "A_hat: {}",
            serde_json::to_string(&files::matrix_rows(&scheme.a_hat)).unwrap()
        );
        println!("kinetic: {}", witness_line(&kinetic));
        println!("{}", verdict_line("original: controllable", &preservation.original));
        println!("{}", verdict_line("lumped: controllable", &preservation.lumped));
        println!(
            "preservation: {}",
            if preservation.theorem_consistent { "consistent" } else { "INCONSISTENT" }
        );
        if let Some(out) = args.out {
            println!("wrote lumped system to {}", out.display());
        }
    }
    Ok(())
}

pub fn mmatrix(path: &Path, s: Option<f64>, ctx: &Ctx) -> Result<(), CliError> {
    let sys = files::read_system(path)?.to_system()?;
    let report = classify(&sys.a, s).map_err(lib_error)?;
    let classification = match report.classification {
        Classification::NonsingularMMatrix => "nonsingular M-matrix",
        Classification::SingularMMatrix => "singular M-matrix",
        Classification::NotApplicable => "not applicable",
    };

    if ctx.json {
        print_report(&ReportFile {
            command: "mmatrix".into(),
            inputs: system_echo(path, &sys),
            results: json!({
                "s": report.s,
                "t": files::matrix_rows(&report.t),
                "t_nonnegative": report.t_nonnegative,
                "t_symmetric": report.t_symmetric,
                "t_irreducible": report.t_irreducible,
                "rho": report.rho,
                "classification": classification,
            }),
            tolerances: json!({ "rho_tol": 1e-9 }),
        });
    } else {
        println!("splitting: A = -s(I - T) with s = {}", report.s);
        println!(
            "T: nonnegative {}, symmetric {}, irreducible {}",
            yes_no(report.t_nonnegative),
            yes_no(report.t_symmetric),
            yes_no(report.t_irreducible)
        );
        println!("spectral radius: {}", report.rho);
        println!("classification: {classification}");
    }
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn gen_chain_cmd(
    n: usize,
    k: f64,
    out: Option<&Path>,
    network_out: Option<&Path>,
    ctx: &Ctx,
) -> Result<(), CliError> {
    let spec = ChainSpec::new(n, k).map_err(lib_error)?;
    let sys = gen_chain(&spec);
    let file = SystemFile::from_system(&sys, Some(format!("uniform exchange rate k = {k}")));

    if let Some(path) = network_out {
        let net = NetworkFile::from_network(&chain_to_network(&spec));
        files::write_json(path, &net)?;
    }
    match out {
        Some(path) => {
            files::write_json(path, &file)?;
            if ctx.json {
                print_report(&ReportFile {
                    command: "gen-chain".into(),
                    inputs: json!({ "n": n, "k": k }),
                    results: json!({
                        "out": path.display().to_string(),
                        "network_out": network_out.map(|p| p.display().to_string()),
                    }),
                    tolerances: json!({}),
                });
            } else {
                println!("wrote {n}-species chain (k = {k}) to {}", path.display());
            }
        }
        None => {
            print!(
                "{}",
                files::render_json(&file).expect("system serialization cannot fail")
            );
        }
    }
    Ok(())
}

pub struct SimulateArgs<'a> {
    pub system: &'a Path,
    pub x0: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub u_file: Option<&'a Path>,
    pub out_csv: Option<&'a Path>,
}

pub fn simulate_cmd(args: &SimulateArgs, ctx: &Ctx) -> Result<(), CliError> {
    let sys = files::read_system(args.system)?.to_system()?;
    let u = match args.u_file {
        Some(path) => files::read_control(path)?.to_signal(),
        None => ControlSignal::Zero,
    };
    let traj = simulate(&sys, &args.x0, &u, args.t, args.dt).map_err(lib_error)?;
    let final_state = traj.states.last().expect("trajectory is never empty");

    match args.out_csv {
        Some(path) => {
            fs::write(path, traj.to_csv_string())
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if ctx.json {
                print_report(&ReportFile {
                    command: "simulate".into(),
                    inputs: json!({
                        "system": args.system.display().to_string(),
                        "x0": args.x0,
                        "t": args.t,
                        "dt": args.dt,
                        "u_file": args.u_file.map(|p| p.display().to_string()),
                    }),
                    results: json!({
                        "rows": traj.times.len(),
                        "final_state": final_state,
                        "out_csv": path.display().to_string(),
                    }),
                    tolerances: json!({}),
                });
            } else {
                println!(
                    "wrote {} rows to {}; final state {}",
                    traj.times.len(),
                    path.display(),
                    serde_json::to_string(final_state).unwrap()
                );
            }
        }
        None => {
            if ctx.json {
                return Err(CliError::Input(
                    "--json needs --out-csv so the report does not mix with the CSV".into(),
                ));
            }
            print!("{}", traj.to_csv_string());
        }
    }
    Ok(())
}

pub struct SteerArgs<'a> {
    pub system: &'a Path,
    pub x0: Vec<f64>,
    pub x1: Vec<f64>,
    pub t1: f64,
    pub steps: usize,
    pub out: Option<&'a Path>,
}

pub fn steer_cmd(args: &SteerArgs, ctx: &Ctx) -> Result<(), CliError> {
    let sys = files::read_system(args.system)?.to_system()?;
    let u = steer(&sys, &args.x0, &args.x1, args.t1, args.steps).map_err(lib_error)?;

    // Round-trip check: drive the system with the computed control on a grid
    // aligned with the control's segments.
    let dt = args.t1 / (4 * args.steps) as f64;
    let traj = simulate(&sys, &args.x0, &u, args.t1, dt).map_err(lib_error)?;
    let final_state = traj.states.last().expect("trajectory is never empty");
    let error = final_state
        .iter()
        .zip(&args.x1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let scale = 1.0 + args.x1.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let relative = error / scale;

    if let Some(path) = args.out {
        files::write_json(path, &ControlFile::from_signal(&u))?;
    }

    if ctx.json {
        print_report(&ReportFile {
            command: "steer".into(),
            inputs: json!({
                "system": args.system.display().to_string(),
                "x0": args.x0,
                "x1": args.x1,
                "t1": args.t1,
                "steps": args.steps,
            }),
            results: json!({
                "segments": args.steps,
                "endpoint_error": error,
                "endpoint_error_relative": relative,
                "final_state": final_state,
                "out": args.out.map(|p| p.display().to_string()),
            }),
            tolerances: json!({ "gramian_condition_limit": 1e12 }),
        });
    } else {
        println!(
            "control: {} piecewise-constant segments on [0, {}]",
            args.steps, args.t1
        );
        println!("endpoint error: {error:.1e} (relative {relative:.1e})");
        if let Some(path) = args.out {
            println!("wrote control to {}", path.display());
        }
    }
    Ok(())
}

pub fn verify(path: &Path, m_file: &Path, ctx: &Ctx) -> Result<(), CliError> {
    let sys = files::read_system(path)?.to_system()?;
    let m = files::read_matrix(m_file)?;
    let scheme = make_scheme(&sys.a, m, None).map_err(lib_error)?;
    let report = verify_preservation_with(&sys, &scheme, ctx.tol).map_err(lib_error)?;

    if ctx.json {
        print_report(&ReportFile {
            command: "verify".into(),
            inputs: json!({
                "system": path.display().to_string(),
                "m_file": m_file.display().to_string(),
            }),
            results: json!({
                "m": files::matrix_rows(&scheme.m),
                "a_hat": files::matrix_rows(&scheme.a_hat),
                "residual": scheme.residual,
                "preservation": {
                    "original": analysis_json(&report.original),
                    "lumped": analysis_json(&report.lumped),
                    "consistent": report.theorem_consistent,
                },
            }),
            tolerances: json!({
                "rank_rel_tol": ctx.tol,
                "exactness_tol": scheme.tolerance,
            }),
        });
    } else {
        println!(
            "lumping: {} x {}, residual {:.1e} (tolerance {:.1e})",
            scheme.m.rows(),
            scheme.m.cols(),
            scheme.residual,
            scheme.tolerance
        );
        println!("{}", verdict_line("original: controllable", &report.original));
        println!("{}", verdict_line("lumped: controllable", &report.lumped));
        println!(
            "preservation: {}",
            if report.theorem_consistent { "consistent" } else { "INCONSISTENT" }
        );
    }
    if !report.theorem_consistent {
        return Err(CliError::Math(
            "exact lumping of a controllable system tested uncontrollable".into(),
        ));
    }
    Ok(())
}
