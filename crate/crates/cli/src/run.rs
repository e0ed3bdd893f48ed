//! The pipeline behind each subcommand. Every artifact is written only after
//! all seeds have finished, in seed order, so reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use locol::analysis::{check_structural_claims, growth_csv, DiagnosticRun};
use locol::coloring::vizing_color;
use locol::decomposition::{generator_count, relaxed_bound, strict_bound};
use locol::driver::{edge_color, DriverParams, Mode};
use locol::engine::{build_k, initial_matching_lenient, run_rounds, RunOptions};
use locol::generators::{load_edge_list, plant_high_degree, random_regular, rotation_cycle};
use locol::labeling::sparse_labeling;
use locol::oracle::{brute_chromatic_index, verify_proper};
use locol::precolor::{search_f_counterexample, ExtendOptions, FVerdict};
use locol::{Exec, Instance};

use crate::config::{ExperimentConfig, GeneratorSpec, ModeSpec};
use crate::report::emit_report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Color,
    Diagnose,
    Decompose,
    Oracle,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Color => "color",
            Command::Diagnose => "diagnose",
            Command::Decompose => "decompose",
            Command::Oracle => "oracle",
            Command::Sweep => "sweep",
        }
    }
}

pub fn build_instance(cfg: &ExperimentConfig, seed: u64) -> Result<Instance> {
    let inst = match &cfg.generator {
        GeneratorSpec::RotationCycle => rotation_cycle(cfg.n)?,
        GeneratorSpec::RandomRegular => random_regular(cfg.n, cfg.d, cfg.bipartite_graph, seed)?,
        GeneratorSpec::Planted => {
            let base = random_regular(cfg.n, cfg.d, false, seed)?;
            plant_high_degree(&base, cfg.planted_r, cfg.planted_fraction, seed)?
        }
        GeneratorSpec::File(p) => load_edge_list(p).with_context(|| format!("loading {}", p.display()))?,
    };
    Ok(inst)
}

pub fn mode_for(cfg: &ExperimentConfig, inst: &Instance) -> Result<Mode> {
    Ok(match cfg.mode {
        ModeSpec::Auto if inst.bipartite => Mode::Bipartite,
        ModeSpec::Auto | ModeSpec::General => Mode::General,
        ModeSpec::Bipartite if inst.bipartite => Mode::Bipartite,
        ModeSpec::Bipartite => bail!("bipartite mode requested for a graph with an odd cycle"),
    })
}

/// Palette bound for the mode: `d + 1` or `d + ⌈9√d⌉ + 1`.
pub fn palette_bound(mode: Mode, d: usize) -> usize {
    match mode {
        Mode::Bipartite => d + 1,
        Mode::General => strict_bound(d) + 1,
    }
}

pub fn driver_params(cfg: &ExperimentConfig, seed: u64, exec: Exec) -> Result<DriverParams> {
    Ok(DriverParams {
        schedule: cfg.engine_schedule()?,
        finite_threshold: cfg.finite_threshold,
        s_max: cfg.s_max,
        extend: ExtendOptions { samples: cfg.samples, seed },
        exec,
        check_each_flip: true,
    })
}

/// `level,round,unhappy_count,unhappy_fraction` rows, top level first.
pub fn decay_csv(n: usize, curves: &[(usize, Vec<usize>)]) -> String {
    let mut s = String::from("level,round,unhappy_count,unhappy_fraction\n");
    for (level, curve) in curves {
        for (round, &c) in curve.iter().enumerate() {
            writeln!(s, "{},{},{},{:.6}", level, round, c, c as f64 / n.max(1) as f64).unwrap();
        }
    }
    s
}

struct ColorRun {
    seed: u64,
    n: usize,
    d: usize,
    edges: usize,
    palette: usize,
    exceptional_edges: usize,
    exceptional_fraction: f64,
    proper: bool,
    coloring: String,
    audit: String,
    decay: String,
    final_unhappy: f64,
}

fn color_one(cfg: &ExperimentConfig, seed: u64) -> Result<(ColorRun, Mode)> {
    let inst = build_instance(cfg, seed)?;
    let mode = mode_for(cfg, &inst)?;
    let params = driver_params(cfg, seed, Exec::Sequential)?;
    let st = edge_color(&inst, mode, &params)?;
    let curves: Vec<(usize, Vec<usize>)> =
        st.audit.iter().map(|a| a.level).zip(st.unhappy_curves.iter().cloned()).collect();
    let final_unhappy = curves.first().and_then(|(_, c)| c.last()).copied().unwrap_or(0) as f64 / inst.n().max(1) as f64;
    Ok((
        ColorRun {
            seed,
            n: inst.n(),
            d: inst.d,
            edges: inst.graph.edge_count(),
            palette: st.palette_used(),
            exceptional_edges: st.exceptional().len(),
            exceptional_fraction: st.exceptional_vertex_fraction(),
            proper: verify_proper(&inst.graph, &st.colored_pairs()),
            coloring: st.to_text(),
            audit: st.audit_csv(),
            decay: decay_csv(inst.n(), &curves),
            final_unhappy,
        },
        mode,
    ))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::write(dir.join(name), body).with_context(|| format!("writing {name}"))
}

fn meta(cfg: &ExperimentConfig, cmd: Command, rows: &[(&str, String)]) -> String {
    let mut s = String::from("key,value\n");
    writeln!(s, "command,{}", cmd.name()).unwrap();
    writeln!(s, "generator,{:?}", cfg.generator).unwrap();
    writeln!(s, "seeds,{}", cfg.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")).unwrap();
    for (k, v) in rows {
        writeln!(s, "{k},{v}").unwrap();
    }
    s
}

const RUNS_HEADER: &str = "seed,n,d,edges,palette,exceptional_edges,exceptional_vertex_fraction,proper\n";

fn runs_row(r: &ColorRun) -> String {
    format!(
        "{},{},{},{},{},{},{:.6},{}\n",
        r.seed, r.n, r.d, r.edges, r.palette, r.exceptional_edges, r.exceptional_fraction, r.proper
    )
}

/// Runs one subcommand and writes its artifacts plus `report.txt` into
/// `cfg.out`. Returns the report text.
pub fn run_experiment(cmd: Command, cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let dir = cfg.out.as_path();
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let exec = Exec::default();
    match cmd {
        Command::Color => {
            let runs = exec.map(&cfg.seeds, |&s| color_one(cfg, s));
            let runs: Vec<(ColorRun, Mode)> = runs.into_iter().collect::<Result<_>>()?;
            let mut table = String::from(RUNS_HEADER);
            for (r, _) in &runs {
                write(dir, &format!("coloring_s{}.txt", r.seed), &r.coloring)?;
                write(dir, &format!("audit_s{}.csv", r.seed), &r.audit)?;
                write(dir, &format!("decay_s{}.csv", r.seed), &r.decay)?;
                table.push_str(&runs_row(r));
            }
            write(dir, "runs.csv", &table)?;
            let (first, mode) = &runs[0];
            let rows = [("mode", format!("{mode:?}")), ("d", first.d.to_string()), ("bound", palette_bound(*mode, first.d).to_string())];
            write(dir, "meta.csv", &meta(cfg, cmd, &rows))?;
        }
        Command::Sweep => {
            let jobs: Vec<(usize, u64)> = cfg.n0_sweep.iter().flat_map(|&n0| cfg.seeds.iter().map(move |&s| (n0, s))).collect();
            let runs = exec.map(&jobs, |&(n0, s)| {
                let mut c = cfg.clone();
                c.n0 = n0;
                color_one(&c, s)
            });
            let runs: Vec<(ColorRun, Mode)> = runs.into_iter().collect::<Result<_>>()?;
            let mut table = String::from("n0,seed,palette,exceptional_vertex_fraction,final_unhappy_fraction,proper\n");
            for ((n0, _), (r, _)) in jobs.iter().zip(&runs) {
                write(dir, &format!("decay_n0_{}_s{}.csv", n0, r.seed), &r.decay)?;
                writeln!(table, "{},{},{},{:.6},{:.6},{}", n0, r.seed, r.palette, r.exceptional_fraction, r.final_unhappy, r.proper).unwrap();
            }
            write(dir, "sweep.csv", &table)?;
            let mut runs_table = String::from(RUNS_HEADER);
            for (r, _) in &runs {
                runs_table.push_str(&runs_row(r));
            }
            write(dir, "runs.csv", &runs_table)?;
            let (first, mode) = &runs[0];
            let rows = [("mode", format!("{mode:?}")), ("d", first.d.to_string()), ("bound", palette_bound(*mode, first.d).to_string())];
            write(dir, "meta.csv", &meta(cfg, cmd, &rows))?;
        }
        Command::Diagnose => {
            let sched = cfg.engine_schedule()?;
            let outs = exec.map(&cfg.seeds, |&seed| -> Result<(u64, String, String, String)> {
                let inst = build_instance(cfg, seed)?;
                let lab = sparse_labeling(&inst.graph, sched.r + 2);
                let kctx = build_k(&inst, sched.r, sched.r_prime, &lab);
                let (m0, _) = initial_matching_lenient(&inst, sched.r1);
                let opts = RunOptions { exec: Exec::Sequential, record_history: false, check_each_flip: true };
                let st = run_rounds(&inst, &kctx, m0, sched.n0, opts)?;
                let mut curve: Vec<usize> = st.flip_log.iter().map(|l| l.unhappy_count).collect();
                curve.push(st.unhappy.len());
                let run = DiagnosticRun {
                    inst: &inst,
                    kctx: &kctx,
                    matching: st.matching.edges(),
                    n0: sched.n0,
                    c_tilde: sched.c_tilde.min(usize::MAX as u64) as usize,
                };
                let rep = check_structural_claims(&run, Exec::Sequential);
                Ok((seed, rep.to_csv(), growth_csv(&rep.growth), decay_csv(inst.n(), &[(inst.d, curve)])))
            });
            for out in outs {
                let (seed, claims, growth, decay) = out?;
                write(dir, &format!("claims_s{seed}.csv"), &claims)?;
                write(dir, &format!("growth_s{seed}.csv"), &growth)?;
                write(dir, &format!("decay_s{seed}.csv"), &decay)?;
            }
            write(dir, "meta.csv", &meta(cfg, cmd, &[("n0", sched.n0.to_string())]))?;
        }
        Command::Decompose => {
            for &seed in &cfg.seeds {
                let inst = build_instance(cfg, seed)?;
                let params = driver_params(cfg, seed, exec)?;
                let rep = generator_count(&inst, cfg.relaxed, &params)?;
                if let Err(msg) = rep.maps.verify(&inst.graph, !cfg.relaxed) {
                    bail!("maps do not generate the edge set: {msg}");
                }
                write(dir, &format!("maps_s{seed}.txt"), &rep.maps.to_text())?;
                write(dir, &format!("decomposition_s{seed}.csv"), &rep.to_csv())?;
            }
            let bound = if cfg.relaxed { relaxed_bound(cfg.d) } else { strict_bound(cfg.d) };
            write(dir, "meta.csv", &meta(cfg, cmd, &[("relaxed", cfg.relaxed.to_string()), ("map_bound", bound.to_string())]))?;
        }
        Command::Oracle => {
            let mut s = String::from("task,seed,value\n");
            match cfg.oracle_task.as_str() {
                "chromatic" => {
                    for &seed in &cfg.seeds {
                        let inst = build_instance(cfg, seed)?;
                        let chi = brute_chromatic_index(&inst.graph)?;
                        let viz = vizing_color(&inst.graph).palette_size();
                        writeln!(s, "chromatic_index,{seed},{chi}").unwrap();
                        writeln!(s, "vizing_palette,{seed},{viz}").unwrap();
                    }
                }
                "fsearch" => {
                    let res = search_f_counterexample(cfg.d, cfg.n_max, exec)?;
                    let verdict = match &res.verdict {
                        FVerdict::NoCounterexample => "none".to_string(),
                        FVerdict::Counterexample { graph, .. } => format!("counterexample on {} vertices", graph.n()),
                        FVerdict::Partial { completed_n } => format!("partial up to n={completed_n}"),
                    };
                    writeln!(s, "f_graphs,,{}", res.graphs).unwrap();
                    writeln!(s, "f_precolorings,,{}", res.precolorings).unwrap();
                    writeln!(s, "f_verdict,,{verdict}").unwrap();
                }
                other => bail!("unknown oracle task {other:?} (chromatic or fsearch)"),
            }
            write(dir, "oracle.csv", &s)?;
            write(dir, "meta.csv", &meta(cfg, cmd, &[("task", cfg.oracle_task.clone())]))?;
        }
    }
    let report = emit_report(dir);
    write(dir, "report.txt", &report.text)?;
    Ok(report.text)
}

