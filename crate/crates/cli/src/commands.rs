use std::path::Path;

use serde::Serialize;

use qflqg_core::{
    analytic_cost_decomposition, brute_force_mdp, monte_carlo, monte_carlo_with_traces,
    offline_schedule, pareto_sweep, schedule::schedule_scores, Error, ExperimentResult, Instance,
    OraclePolicy, SelectionPolicy, SimTrace,
};

use crate::config::{ExperimentConfig, Flavor};
use crate::error::CliError;
use crate::output::{
    flatten, matrix_columns, num, prepare_dir, vector_columns, write_json, Csv, Meta,
};

fn meta(cfg: &ExperimentConfig, command: &str) -> Meta {
    Meta {
        seed: cfg.run.seed,
        config_hash: cfg.hash(),
        command: command.into(),
    }
}

fn bank_error(e: Error) -> CliError {
    match e {
        Error::InvalidPartition(_)
        | Error::DegenerateCell { .. }
        | Error::PartitionGap(_)
        | Error::InvalidReduction(_)
        | Error::Dimension(_)
        | Error::InvalidArgument(_) => CliError::Config {
            field: "bank".into(),
            msg: e.to_string(),
        },
        e => e.into(),
    }
}

/// Gaussian instance, or its sigma-point discretization when `points` is set.
pub fn build_instance(cfg: &ExperimentConfig, points: Option<usize>) -> Result<Instance, CliError> {
    cfg.validate()?;
    let model = cfg.system_model()?;
    let specs = cfg.quantizer_specs()?;
    let open = cfg.bank.include_open_loop;
    // Build the banks first so partition problems surface as config errors
    // before any recursion runs.
    let built = match points {
        None => Instance::new(model, &specs, open),
        Some(k) => Instance::new_discretized(model, &specs, open, k),
    };
    built.map_err(|e| match e {
        Error::IllConditioned { .. } => e.into(),
        e => bank_error(e),
    })
}

fn finish(cfg: &ExperimentConfig, dir: &Path) -> Result<(), CliError> {
    let text = format!("# seed={}, config_hash={}\n{}", cfg.run.seed, cfg.hash(), cfg.to_toml());
    std::fs::write(dir.join("resolved.toml"), text)?;
    Ok(())
}

pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let inst = build_instance(cfg, None)?;
    for warning in inst.banks.process.ordering_warnings() {
        eprintln!("warning: {warning}");
    }
    let dir = prepare_dir(Path::new(&cfg.output.dir))?;
    let meta = meta(cfg, "solve");
    let (n, m) = (inst.state_dim(), inst.model.input_dim());
    let horizon = inst.horizon();
    let ricc = &inst.ricc;

    let mut header = vec!["k".to_string()];
    header.extend(matrix_columns("P", n, n));
    header.extend(matrix_columns("L", m, n));
    header.extend(matrix_columns("N", n, n));
    header.push("r".into());
    header.extend(matrix_columns("Pi", n, n));
    header.extend(matrix_columns("Upsilon", n, n));
    header.extend(matrix_columns("Omega", n, n));
    let mut csv = Csv::new(&meta, &header);
    let blank = |count: usize| vec![String::new(); count];
    let cells = |x: &nalgebra::DMatrix<f64>| flatten(x).into_iter().map(num).collect::<Vec<_>>();
    for k in 0..=horizon {
        let mut row = vec![k.to_string()];
        row.extend(cells(&ricc.p[k]));
        if k < horizon {
            row.extend(cells(&ricc.l[k]));
            row.extend(cells(&ricc.n[k]));
        } else {
            row.extend(blank(m * n + n * n));
        }
        row.push(num(ricc.r[k]));
        row.extend(cells(&ricc.pi[k]));
        row.extend(cells(&ricc.upsilon[k]));
        if k < horizon {
            row.extend(cells(&ricc.omega[k]));
        } else {
            row.extend(blank(n * n));
        }
        csv.row(&row);
    }
    csv.write(&dir.join("riccati.csv"))?;

    let names: Vec<String> = inst.banks.process.quantizers.iter().map(|q| q.name.clone()).collect();
    let schedule = offline_schedule(&inst)?;
    let scores = schedule_scores(&inst, inst.costs())?;
    let mut header = vec!["k".to_string(), "theta".into(), "name".into()];
    header.extend(vector_columns("score", names.len()));
    let mut csv = Csv::new(&meta, &header);
    for k in 0..horizon {
        let theta = schedule.at(k);
        let mut row = vec![k.to_string(), theta.to_string(), names[theta].clone()];
        row.extend(scores[k].iter().map(|s| num(*s)));
        csv.row(&row);
    }
    csv.write(&dir.join("schedule.csv"))?;

    let mut header = vec![
        "bank".to_string(),
        "quantizer".into(),
        "name".into(),
        "cost".into(),
        "cell".into(),
        "prob".into(),
    ];
    header.extend(vector_columns("lower", n));
    header.extend(vector_columns("upper", n));
    header.extend(vector_columns("centroid", n));
    let mut csv = Csv::new(&meta, &header);
    for (label, bank) in [("initial", &inst.banks.initial), ("process", &inst.banks.process)] {
        for (i, q) in bank.quantizers.iter().enumerate() {
            for (j, cell) in q.cells.iter().enumerate() {
                let mut row = vec![
                    label.to_string(),
                    i.to_string(),
                    q.name.clone(),
                    num(q.cost),
                    j.to_string(),
                    num(q.probs[j]),
                ];
                row.extend(cell.lower.iter().map(|x| num(*x)));
                row.extend(cell.upper.iter().map(|x| num(*x)));
                row.extend(q.centroids[j].iter().map(|x| num(*x)));
                csv.row(&row);
            }
        }
    }
    csv.write(&dir.join("bank.csv"))?;
    finish(cfg, &dir)
}

#[derive(Serialize)]
struct Analytic {
    control_part: f64,
    selection_part: f64,
    total: f64,
}

#[derive(Serialize)]
struct Summary {
    meta: Meta,
    policy: &'static str,
    noise: String,
    n_runs: usize,
    mean_cost: f64,
    cost_se: f64,
    j_lqg: f64,
    j_lqg_se: f64,
    j_quant: f64,
    j_quant_se: f64,
    selection_cost: f64,
    selection_cost_se: f64,
    bit_rate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<Analytic>,
}

/// Instance and policy for the configured flavor. The oracle runs on the
/// sigma-point discretization.
fn policy_for(cfg: &ExperimentConfig) -> Result<(Instance, SelectionPolicy, String), CliError> {
    let flavor = cfg.policy.flavor;
    let points = (flavor == Flavor::Oracle).then_some(cfg.policy.oracle_points);
    let inst = build_instance(cfg, points)?;
    let noise = match points {
        Some(k) => format!("sigma-points-{k}"),
        None => "gaussian".into(),
    };
    let policy = match flavor {
        Flavor::Offline => SelectionPolicy::Offline(offline_schedule(&inst)?),
        Flavor::Greedy => SelectionPolicy::Greedy,
        Flavor::Rollout => SelectionPolicy::Rollout {
            base: offline_schedule(&inst)?,
            n_samples: cfg.policy.n_samples,
        },
        Flavor::Oracle => SelectionPolicy::Oracle(brute_force_mdp(&inst)?),
    };
    Ok((inst, policy, noise))
}

fn write_traces(path: &Path, meta: &Meta, inst: &Instance, traces: &[SimTrace]) -> Result<(), CliError> {
    let (n, m) = (inst.state_dim(), inst.model.input_dim());
    let mut header = vec!["run".to_string(), "t".into(), "theta".into(), "cell".into()];
    for (prefix, len) in [
        ("x", n),
        ("u", m),
        ("w_prev", n),
        ("w_hat", n),
        ("x_pred", n),
        ("x_filt", n),
        ("delta", n),
    ] {
        header.extend(vector_columns(prefix, len));
    }
    header.push("stage_control".into());
    header.push("stage_quant".into());
    let mut csv = Csv::new(meta, &header);
    let nums = |v: &nalgebra::DVector<f64>| v.iter().map(|x| num(*x)).collect::<Vec<_>>();
    for (run, tr) in traces.iter().enumerate() {
        let horizon = tr.inputs.len();
        for t in 0..=horizon {
            let mut row = vec![run.to_string(), t.to_string()];
            if t < horizon {
                row.push(tr.selections[t].to_string());
                row.push(tr.cells[t].to_string());
                row.extend(nums(&tr.states[t]));
                row.extend(nums(&tr.inputs[t]));
                row.extend(nums(&tr.noise[t]));
                row.extend(nums(&tr.received[t]));
                row.extend(nums(&tr.predicted[t]));
                row.extend(nums(&tr.filtered[t]));
                row.extend(nums(&tr.errors[t]));
                row.push(num(tr.control_costs[t]));
                row.push(num(tr.quant_costs[t]));
            } else {
                row.extend(vec![String::new(); 2]);
                row.extend(nums(&tr.states[t]));
                row.extend(vec![String::new(); m + 5 * n]);
                row.push(num(tr.control_costs[t]));
                row.push(String::new());
            }
            csv.row(&row);
        }
    }
    csv.write(path)
}

fn write_utilization(path: &Path, meta: &Meta, inst: &Instance, result: &ExperimentResult) -> Result<(), CliError> {
    let mut header = vec!["t".to_string()];
    header.extend(inst.banks.process.quantizers.iter().map(|q| format!("rho_{}", q.name)));
    let mut csv = Csv::new(meta, &header);
    for (t, row) in result.utilization.row_iter().enumerate() {
        let mut fields = vec![(t + 1).to_string()];
        fields.extend(row.iter().map(|x| num(*x)));
        csv.row(&fields);
    }
    csv.write(path)
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let (inst, policy, noise) = policy_for(cfg)?;
    let dir = prepare_dir(Path::new(&cfg.output.dir))?;
    let meta = meta(cfg, "simulate");
    let keep = cfg.run.trace_runs.min(cfg.run.n_runs);
    let result = monte_carlo_with_traces(&inst, &policy, cfg.run.n_runs, cfg.run.seed, keep)?;
    let analytic = match &policy {
        SelectionPolicy::Offline(schedule) => {
            let d = analytic_cost_decomposition(&inst, schedule)?;
            Some(Analytic {
                control_part: d.control_part,
                selection_part: d.selection_part,
                total: d.total(),
            })
        }
        _ => None,
    };
    let summary = Summary {
        meta: meta.clone(),
        policy: policy.flavor().name(),
        noise,
        n_runs: result.n_runs,
        mean_cost: result.mean_cost,
        cost_se: result.cost_se,
        j_lqg: result.j_lqg,
        j_lqg_se: result.j_lqg_se,
        j_quant: result.j_quant,
        j_quant_se: result.j_quant_se,
        selection_cost: result.selection_cost,
        selection_cost_se: result.selection_cost_se,
        bit_rate: result.bit_rate,
        analytic,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    write_utilization(&dir.join("utilization.csv"), &meta, &inst, &result)?;
    if keep > 0 {
        write_traces(&dir.join("traces.csv"), &meta, &inst, &result.traces)?;
    }
    finish(cfg, &dir)
}

pub fn cmd_pareto(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let inst = build_instance(cfg, None)?;
    let betas = cfg.betas()?;
    let dir = prepare_dir(Path::new(&cfg.output.dir))?;
    let meta = meta(cfg, "pareto");
    let points = pareto_sweep(&inst, &betas, cfg.run.n_runs, cfg.run.seed)?;
    let header: Vec<String> = ["beta", "j_lqg", "j_lqg_se", "j_quant", "dominated"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut csv = Csv::new(&meta, &header);
    for p in &points {
        csv.row(&[
            num(p.beta),
            num(p.j_lqg),
            num(p.j_lqg_se),
            num(p.j_quant),
            u8::from(p.dominated).to_string(),
        ]);
    }
    csv.write(&dir.join("pareto.csv"))?;
    finish(cfg, &dir)
}

#[derive(Serialize)]
struct FirstStage {
    support: usize,
    w: Vec<f64>,
    prob: f64,
    action: usize,
    value: f64,
}

#[derive(Serialize)]
struct Comparison {
    policy: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
    mc_mean: f64,
    mc_se: f64,
}

#[derive(Serialize)]
struct OracleReport {
    meta: Meta,
    points_per_axis: usize,
    nodes: u128,
    /// Optimal expected selection cost.
    value: f64,
    /// Part of the cost no selection rule can change.
    control_part: f64,
    first_stage: Vec<FirstStage>,
    comparisons: Vec<Comparison>,
}

fn first_stage(inst: &Instance, oracle: &OraclePolicy) -> Vec<FirstStage> {
    let (points, probs) = inst.banks.initial.law.support().expect("discrete law");
    oracle
        .roots
        .iter()
        .enumerate()
        .map(|(j, node)| FirstStage {
            support: j,
            w: points[j].iter().copied().collect(),
            prob: probs[j],
            action: node.action,
            value: node.value,
        })
        .collect()
}

pub fn cmd_oracle(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let inst = build_instance(cfg, Some(cfg.policy.oracle_points))?;
    let oracle = brute_force_mdp(&inst)?;
    let dir = prepare_dir(Path::new(&cfg.output.dir))?;
    let meta = meta(cfg, "oracle");
    let schedule = offline_schedule(&inst)?;
    let analytic = analytic_cost_decomposition(&inst, &schedule)?;
    let (runs, seed) = (cfg.run.n_runs, cfg.run.seed);

    let candidates: Vec<(&'static str, Option<f64>, SelectionPolicy)> = vec![
        ("oracle", Some(oracle.value), SelectionPolicy::Oracle(oracle.clone())),
        (
            "rollout",
            None,
            SelectionPolicy::Rollout {
                base: schedule.clone(),
                n_samples: cfg.policy.n_samples,
            },
        ),
        ("greedy", None, SelectionPolicy::Greedy),
        ("offline", Some(analytic.selection_part), SelectionPolicy::Offline(schedule.clone())),
    ];
    let mut comparisons = Vec::with_capacity(candidates.len());
    for (name, exact, policy) in candidates {
        let result = monte_carlo(&inst, &policy, runs, seed)?;
        comparisons.push(Comparison {
            policy: name,
            exact,
            mc_mean: result.selection_cost,
            mc_se: result.selection_cost_se,
        });
    }
    let report = OracleReport {
        meta,
        points_per_axis: cfg.policy.oracle_points,
        nodes: oracle.nodes,
        value: oracle.value,
        control_part: analytic.control_part,
        first_stage: first_stage(&inst, &oracle),
        comparisons,
    };
    write_json(&dir.join("oracle.json"), &report)?;
    finish(cfg, &dir)
}
