use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use permqubo::reductions::{generate, reduce_text};
use permqubo::solvers::{brute_force, exact_minimum, permutation_oracle, simulated_annealing, DEFAULT_VAR_CAP};
use permqubo::{
    compose, decode_solution, export, import, term_counts, verify_kernel, EncodedProblem, EncodingMeta, KernelSpec,
    ModelFile, ModelStats, PppInstance, QuadraticModel, Rational, SaParams, Solution, Temperature,
};
use serde_json::json;

use crate::{Command, Invalid, KernelArgs, SolverName};

/// Diameter search costs about `vars * (vars + terms)`; skip it past this.
const DIAMETER_BUDGET: u128 = 2_000_000_000;

pub fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Kernel { kernel, format, out, stats } => {
            let spec = kernel_spec(&kernel)?;
            let h = spec.build()?;
            let meta = EncodingMeta {
                technique: spec.technique,
                m: spec.m,
                n: spec.n,
                optimal: h.optimal_value,
                lambda: 1,
                objective_scale: 1,
                objective_shift: Rational::from_integer(0),
            };
            let file = ModelFile { model: h.model, layout: h.layout, encoding: Some(meta) };
            let to_stdout = out.as_deref().map_or(!stats, is_stdout);
            if let Some(path) = &out {
                write_out(path, &export(&file, format)?)?;
            } else if !stats {
                write_out(Path::new("-"), &export(&file, format)?)?;
            }
            if stats {
                let text = stats_text(&file.model);
                // Keep standard output parseable when the model went there.
                if to_stdout {
                    eprint!("{text}");
                } else {
                    print!("{text}");
                }
            }
        }
        Command::Reduce { problem, input, big, out } => {
            let text = read_text(&input)?;
            let inst = reduce_text(problem, &text, big).with_context(|| format!("reducing {}", input.display()))?;
            write_out(&out, inst.to_json().as_bytes())?;
        }
        Command::Compose { ppp, technique, kind, lambda, format, out } => {
            let inst = read_ppp(&ppp)?;
            KernelSpec::new(technique, inst.m(), inst.n(), kind).map_err(|e| Invalid(e.to_string()))?;
            let enc = compose(&inst, technique, kind, lambda)?;
            write_out(&out, &export(&enc.to_model_file(), format)?)?;
        }
        Command::Solve { solver, model, seed, sweeps, restarts, t_initial, t_final, max_vars, out } => {
            let value = if let SolverName::Oracle = solver {
                solve_oracle(&model)?
            } else {
                let file = import(&fs::read(&model).with_context(|| format!("reading {}", model.display()))?)?;
                let params = SaParams {
                    seed,
                    sweeps,
                    restarts,
                    t_initial: t_initial.map_or(Temperature::Auto, Temperature::Fixed),
                    t_final: t_final.map_or(Temperature::Auto, Temperature::Fixed),
                };
                solve_model(solver, file, &params, max_vars)?
            };
            let text = serde_json::to_string_pretty(&value)? + "\n";
            write_out(out.as_deref().unwrap_or(Path::new("-")), text.as_bytes())?;
        }
        Command::Stats { model } => {
            let file = import(&fs::read(&model).with_context(|| format!("reading {}", model.display()))?)?;
            print!("{}", stats_text(&file.model));
        }
        Command::Verify { kernel } => {
            let spec = kernel_spec(&kernel)?;
            if spec.num_vars() > DEFAULT_VAR_CAP {
                return Err(Invalid(format!("{} variables, exhaustive check is limited to {DEFAULT_VAR_CAP}", spec.num_vars())).into());
            }
            let report = verify_kernel(spec.technique, spec.m, spec.n, spec.kind)?;
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Counts { problem, technique, kind, lambda, big, input, nodes, edges, seed } => {
            let inst = match (&input, nodes) {
                (Some(path), _) => reduce_text(problem, &read_text(path)?, big)?,
                (None, Some(nodes)) => generate(problem, nodes, edges, seed).map_err(|e| Invalid(e.to_string()))?,
                (None, None) => return Err(Invalid("either --input or --nodes is required".into()).into()),
            };
            KernelSpec::new(technique, inst.m(), inst.n(), kind).map_err(|e| Invalid(e.to_string()))?;
            let c = term_counts(&inst, technique, kind, lambda)?;
            println!("total {}, kernel {}", c.total, c.kernel);
            println!("interactions {}", c.interactions);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn kernel_spec(k: &KernelArgs) -> Result<KernelSpec> {
    Ok(KernelSpec::new(k.technique, k.m.unwrap_or(k.n), k.n, k.kind).map_err(|e| Invalid(e.to_string()))?)
}

fn is_stdout(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<()> {
    if is_stdout(path) {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
    } else {
        fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_ppp(path: &Path) -> Result<PppInstance> {
    PppInstance::from_json(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn fmt_set(s: &BTreeSet<i64>) -> String {
    let items: Vec<String> = s.iter().map(i64::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn stats_text(model: &QuadraticModel) -> String {
    let v = model.num_vars() as u128;
    let cost = v * (v + model.quadratic().len() as u128);
    let s = if cost <= DIAMETER_BUDGET { ModelStats::of(model) } else { ModelStats::without_diameter(model) };
    let diameter = s.diameter.map_or_else(|| "skipped".to_string(), |d| d.to_string());
    format!(
        "kind {}\nvars {}\nlinear_count {}\nlinear_coeffs {}\nquad_count {}\nquad_coeffs {}\ndiameter {}\noffset {}\n",
        model.kind(),
        s.num_vars,
        s.linear_term_count,
        fmt_set(&s.linear_coeff_set),
        s.quadratic_term_count,
        fmt_set(&s.quadratic_coeff_set),
        diameter,
        fmt_rational(&s.offset),
    )
}

fn solve_oracle(path: &Path) -> Result<serde_json::Value> {
    let inst = read_ppp(path)?;
    let r = permutation_oracle(&inst).map_err(|e| Invalid(e.to_string()))?;
    Ok(json!({
        "energy": {"num": r.best, "den": 1},
        "assignment": [],
        "feasible": true,
        "permutation": r.argmin.values(),
        "solver": "oracle",
        "seed": null,
        "objective": r.best,
        "minimizers": r.count,
    }))
}

fn solve_model(solver: SolverName, file: ModelFile, params: &SaParams, max_vars: usize) -> Result<serde_json::Value> {
    let model = &file.model;
    let mut extra = None;
    let (assignment, mut sol) = match solver {
        SolverName::Brute => {
            if model.num_vars() > max_vars {
                return Err(Invalid(format!("{} variables exceed the brute-force limit {max_vars}", model.num_vars())).into());
            }
            let bf = brute_force(model, max_vars)?;
            extra = Some(bf.minimizer_count);
            let a = bf.minimizers.into_iter().next().unwrap_or_default();
            (a, None)
        }
        SolverName::Exact => (exact_minimum(model)?.assignment, None),
        SolverName::Sa => {
            params.validate(model).map_err(|e| Invalid(e.to_string()))?;
            let s = simulated_annealing(model, params)?;
            (s.assignment.clone(), Some(s))
        }
        SolverName::Oracle => unreachable!("handled by solve_oracle"),
    };
    let name = match solver {
        SolverName::Brute => "brute",
        SolverName::Exact => "exact",
        _ => "sa",
    };
    if file.encoding.is_some() {
        let enc = EncodedProblem::from_model_file(file.clone())?;
        let decoded = decode_solution(&enc, &assignment)?;
        sol = Some(match sol {
            Some(s) => Solution { solver: s.solver, seed: s.seed, sweeps: s.sweeps, ..decoded },
            None => decoded,
        });
    }
    let mut sol = match sol {
        Some(s) => s,
        None => Solution {
            energy: model.evaluate(&assignment)?,
            assignment,
            feasible: true,
            permutation: None,
            objective: None,
            solver: String::new(),
            seed: None,
            sweeps: None,
        },
    };
    sol.solver = name.to_string();
    let mut v = sol.to_json();
    if let Some(count) = extra {
        v["minimizers"] = json!(count);
    }
    Ok(v)
}
