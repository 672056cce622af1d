use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use sdl_core::distortion::{
    bourgain_embedding, distortion_lower_bound, local_opt_distortion, pascal_planar_embedding,
    realized_distortion, Embedding, LocalOptOptions,
};
use sdl_core::families::{parse_spec, schreier_graph, Family};
use sdl_core::graph::Multigraph;
use sdl_core::inequalities::{
    bourgain_log_slope, eq6_check, eq8_check, family_sweep, sweep_rho, theorem3_check, to_csv,
    InequalityReport, SweepOptions, Theorem3Inputs,
};
use sdl_core::metric::{all_pairs_distances, diameter, DistanceMatrix};
use sdl_core::spectral::{
    lambda1_p2_exact, lambda1_variational, Convention, SpectralResult, VariationalOptions,
};
use sdl_core::volume::{check_prop6, rho_exact, rho_lower_ballcount, rho_upper_witness};

use crate::args::{
    parse_levels, Command, ConventionArg, EmbedArgs, EmbedMethod, Format, IneqArg, RhoMethodArg,
    Source, SpectralMethod,
};

pub type CliResult<T> = Result<T, String>;

/// Whether every hard assertion of the run held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

struct Loaded {
    id: String,
    graph: Multigraph,
    /// Set when the graph came from a named family.
    family: Option<(Family, usize)>,
}

fn load(source: &Source) -> CliResult<Loaded> {
    match (&source.family, &source.spec, &source.graph) {
        (Some(name), None, None) => {
            let family: Family = name.parse().map_err(err)?;
            let level = source.level.ok_or("--family needs --level")?;
            let graph = family.build(level).map_err(err)?;
            Ok(Loaded {
                id: format!("{family}({level})"),
                graph,
                family: Some((family, level)),
            })
        }
        (None, Some(path), None) => {
            let level = source.level.ok_or("--spec needs --level")?;
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let spec = parse_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            let graph = schreier_graph(&spec, level).map_err(err)?;
            Ok(Loaded {
                id: format!("{}({level})", stem(path)),
                graph,
                family: None,
            })
        }
        (None, None, Some(path)) => {
            let graph = Multigraph::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(Loaded {
                id: stem(path),
                graph,
                family: None,
            })
        }
        _ => Err("give exactly one of --family, --spec or --graph".into()),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "graph".into(), |s| s.to_string_lossy().into_owned())
}

fn distances(g: &Multigraph) -> CliResult<DistanceMatrix> {
    all_pairs_distances(g).map_err(err)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: std::io::Error| format!("{}: {e}", path.display());
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(err)? + "\n";
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_embedding(
    loaded: &Loaded,
    d: &DistanceMatrix,
    args: &EmbedArgs,
) -> CliResult<(Embedding<f64>, &'static str)> {
    let method = args.method.unwrap_or(match loaded.family {
        Some((Family::Hanoi, _)) => EmbedMethod::Lattice,
        _ => EmbedMethod::Bourgain,
    });
    if loaded.graph.vertex_count() < 2 {
        return Err("need at least two vertices to embed".into());
    }
    match method {
        EmbedMethod::Bourgain => Ok((
            bourgain_embedding(&loaded.graph, d, args.p, args.seed),
            "bourgain",
        )),
        EmbedMethod::Lattice => match loaded.family {
            Some((Family::Hanoi, level)) => Ok((
                pascal_planar_embedding(level, args.p).map_err(err)?,
                "lattice",
            )),
            _ => Err("the lattice embedding needs --family hanoi".into()),
        },
        EmbedMethod::Local => {
            let opts = LocalOptOptions {
                dim: args.dim,
                seed: args.seed,
                iters: args.iters,
            };
            let (_, e) = local_opt_distortion(&loaded.graph, d, args.p, opts).map_err(err)?;
            Ok((e, "local_opt"))
        }
    }
}

fn spectral_json(r: &SpectralResult<f64>) -> Value {
    json!({
        "p": r.p,
        "lambda_operator": r.operator_lambda(),
        "lambda_eq3": r.in_convention(Convention::Eq3),
        "method": format!("{:?}", r.method).to_lowercase(),
        "residual": r.residual,
        "minimizer": r.minimizer,
    })
}

fn report_line(r: &InequalityReport<f64>) -> String {
    let status = if r.pass {
        "pass"
    } else if r.hard {
        "FAIL"
    } else {
        "fail (not asserted)"
    };
    format!("{} {}: {status}", r.inequality, r.graph)
}

pub fn run(command: Command) -> CliResult<Outcome> {
    match command {
        Command::Gen { source, out } => {
            let loaded = load(&source)?;
            write_atomic(&out, &loaded.graph.to_json())?;
            println!(
                "{}: {} vertices written to {}",
                loaded.id,
                loaded.graph.vertex_count(),
                out.display()
            );
            Ok(Outcome::Pass)
        }
        Command::Spectral {
            source,
            p,
            convention,
            method,
            seed,
            restarts,
            out,
        } => {
            let loaded = load(&source)?;
            let opts = VariationalOptions {
                restarts,
                seed,
                ..VariationalOptions::default()
            };
            let mut values = Vec::new();
            for &exp in &p {
                let exact = match method {
                    SpectralMethod::Exact if exp != 2.0 => {
                        return Err(format!("no exact solver for p = {exp}"))
                    }
                    SpectralMethod::Variational => false,
                    _ => exp == 2.0,
                };
                let r = if exact {
                    lambda1_p2_exact(&loaded.graph, Convention::Operator)
                } else {
                    lambda1_variational(&loaded.graph, exp, Convention::Operator, opts)
                }
                .map_err(err)?;
                let mut v = spectral_json(&r);
                match convention {
                    ConventionArg::Operator => {
                        v.as_object_mut().unwrap().remove("lambda_eq3");
                    }
                    ConventionArg::Eq3 => {
                        v.as_object_mut().unwrap().remove("lambda_operator");
                    }
                    ConventionArg::Both => {}
                }
                values.push(v);
            }
            emit(&out, &json!({ "graph": loaded.id, "results": values }))?;
            if let Some(path) = &out {
                println!(
                    "{}: {} spectral value(s) written to {}",
                    loaded.id,
                    p.len(),
                    path.display()
                );
            }
            Ok(Outcome::Pass)
        }
        Command::Distortion {
            source,
            embed,
            embedding,
            eps,
            out,
        } => {
            let loaded = load(&source)?;
            let d = distances(&loaded.graph)?;
            let (e, tag) = match &embedding {
                Some(path) => (
                    Embedding::<f64>::load(path).map_err(|e| format!("{}: {e}", path.display()))?,
                    "given",
                ),
                None => build_embedding(&loaded, &d, &embed)?,
            };
            let report = realized_distortion(&d, &e).map_err(err)?;
            let delta = diameter(&d);
            let rho = sweep_rho(&loaded.graph, &d, eps).map_err(err)?;
            let lambda = lambda1_p2_exact(&loaded.graph, Convention::Eq3).map_err(err)?;
            let lower = if e.p == 2.0 {
                distortion_lower_bound(
                    lambda.lambda,
                    delta,
                    rho.to_f64(),
                    loaded.graph.max_degree(),
                    eps,
                    2.0,
                )
                .ok()
            } else {
                None
            };
            let value = json!({
                "graph": loaded.id,
                "method": tag,
                "p": e.p,
                "seed": embed.seed,
                "expansion": report.expansion,
                "contraction": report.contraction,
                "realized": report.realized,
                "lower_bound": lower,
                "rho": rho.to_f64(),
                "rho_method": rho.method.tag(),
                "eps": eps,
            });
            emit(&out, &value)?;
            let sandwich_ok = lower.is_none_or(|lb| lb <= report.realized + 1e-9);
            if out.is_some() {
                println!(
                    "{}: {tag} distortion report written; lower bound {}",
                    loaded.id,
                    if lower.is_none() {
                        "n/a"
                    } else if sandwich_ok {
                        "consistent"
                    } else {
                        "EXCEEDS realized"
                    }
                );
            }
            Ok(if sandwich_ok {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Command::Rho {
            source,
            eps,
            method,
            out,
        } => {
            let loaded = load(&source)?;
            let d = distances(&loaded.graph)?;
            let mut rows = Vec::new();
            for &e in &eps {
                if matches!(method, RhoMethodArg::Exact | RhoMethodArg::All)
                    && (method == RhoMethodArg::Exact
                        || loaded.graph.vertex_count() <= sdl_core::volume::EXACT_LIMIT)
                {
                    rows.push(rho_exact(&loaded.graph, &d, e).map_err(err)?);
                }
                if matches!(method, RhoMethodArg::Lower | RhoMethodArg::All) {
                    rows.push(rho_lower_ballcount(&loaded.graph, &d, e).map_err(err)?);
                }
                if matches!(method, RhoMethodArg::Upper | RhoMethodArg::All) {
                    rows.push(rho_upper_witness(&loaded.graph, &d, e).map_err(err)?);
                }
            }
            let values: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "eps": r.eps,
                        "value": r.to_f64(),
                        "exact_fraction": r.value.to_string(),
                        "method": r.method.tag(),
                        "threshold": r.threshold,
                        "degenerate": r.degenerate,
                        "witness": r.witness,
                    })
                })
                .collect();
            emit(&out, &json!({ "graph": loaded.id, "results": values }))?;
            if let Some(path) = &out {
                println!(
                    "{}: {} rho value(s) written to {}",
                    loaded.id,
                    rows.len(),
                    path.display()
                );
            }
            Ok(Outcome::Pass)
        }
        Command::Verify {
            source,
            ineq,
            eps,
            p,
            method,
            embedding,
            seed,
            out,
        } => {
            let loaded = load(&source)?;
            let d = distances(&loaded.graph)?;
            let report = match ineq {
                IneqArg::Eq6 => eq6_check(&loaded.id, &loaded.graph, &d).map_err(err)?,
                IneqArg::Eq8 => eq8_check(&loaded.id, &loaded.graph, &d).map_err(err)?,
                IneqArg::Prop6 => check_prop6(&loaded.graph, &d, &loaded.id).map_err(err)?,
                IneqArg::Thm3 => {
                    let exact = p == 2.0;
                    let lambda = if exact {
                        lambda1_p2_exact(&loaded.graph, Convention::Eq3)
                    } else {
                        lambda1_variational(
                            &loaded.graph,
                            p,
                            Convention::Eq3,
                            VariationalOptions {
                                seed,
                                ..Default::default()
                            },
                        )
                    }
                    .map_err(err)?;
                    let rho = sweep_rho(&loaded.graph, &d, eps).map_err(err)?;
                    let e = match &embedding {
                        Some(path) => Embedding::<f64>::load(path)
                            .map_err(|e| format!("{}: {e}", path.display()))?,
                        None => {
                            let args = EmbedArgs {
                                method,
                                p,
                                seed,
                                dim: 2,
                                iters: 200,
                            };
                            build_embedding(&loaded, &d, &args)?.0
                        }
                    };
                    let dist = realized_distortion(&d, &e).map_err(err)?;
                    let mut r = theorem3_check(
                        &loaded.id,
                        Theorem3Inputs {
                            p,
                            eps,
                            lambda_eq3: lambda.lambda,
                            lambda_exact: exact,
                            rho: rho.to_f64(),
                            k: loaded.graph.max_degree(),
                            delta: diameter(&d),
                            distortion: dist.realized,
                        },
                    )
                    .map_err(err)?;
                    r.note(format!("rho method {}", rho.method.tag()));
                    r
                }
            };
            println!("{}", report_line(&report));
            if out.is_some() {
                emit(&out, &serde_json::to_value(&report).map_err(err)?)?;
            }
            Ok(if report.failed() {
                Outcome::Fail
            } else {
                Outcome::Pass
            })
        }
        Command::Sweep {
            family,
            levels,
            p,
            eps,
            seed,
            bourgain_limit,
            format,
            out,
        } => {
            let family: Family = family.parse().map_err(err)?;
            let levels = parse_levels(&levels)?;
            let opts = SweepOptions {
                ps: p,
                epss: eps,
                seed,
                bourgain_limit,
                variational: VariationalOptions {
                    seed,
                    ..VariationalOptions::default()
                },
            };
            let rows = family_sweep::<f64>(family, &levels, &opts).map_err(err)?;
            let format = format.unwrap_or_else(|| {
                if out.extension().is_some_and(|e| e == "json") {
                    Format::Json
                } else {
                    Format::Csv
                }
            });
            let text = match format {
                Format::Csv => to_csv(&rows, &opts),
                Format::Json => {
                    let v = json!({
                        "family": family.name(),
                        "rows": rows,
                        "bourgain_log_slope": bourgain_log_slope(&rows),
                    });
                    serde_json::to_string_pretty(&v).map_err(err)? + "\n"
                }
            };
            write_atomic(&out, &text)?;
            let failed = rows
                .iter()
                .any(|r| r.reports.iter().any(|rep| rep.failed()));
            println!(
                "{family}: {} row(s) written to {}; inequalities {}",
                rows.len(),
                out.display(),
                if failed { "FAIL" } else { "pass" }
            );
            Ok(if failed { Outcome::Fail } else { Outcome::Pass })
        }
        Command::Embed { source, embed, out } => {
            let loaded = load(&source)?;
            let d = distances(&loaded.graph)?;
            let (e, tag) = build_embedding(&loaded, &d, &embed)?;
            write_atomic(&out, &e.to_json())?;
            println!(
                "{}: {tag} embedding in dimension {} written to {}",
                loaded.id,
                e.dim,
                out.display()
            );
            Ok(Outcome::Pass)
        }
    }
}
