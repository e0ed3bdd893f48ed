//! One-page summary assembled from the artifacts in an output directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use locol::stats::geometric_fit;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub text: String,
    /// Artifacts the command should have produced but that are absent.
    pub missing: Vec<String>,
}

impl Report {
    pub fn is_partial(&self) -> bool {
        !self.missing.is_empty()
    }
}

fn rows(text: &str, fields: usize) -> Vec<Vec<String>> {
    text.lines().skip(1).filter(|l| !l.is_empty()).map(|l| l.splitn(fields, ',').map(str::to_string).collect()).collect()
}

fn files_with_prefix(dir: &Path, prefix: &str, suffix: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(Result::ok)
                .filter_map(|e| e.file_name().into_string().ok())
                .filter(|n| n.starts_with(prefix) && n.ends_with(suffix))
                .filter_map(|n| fs::read_to_string(dir.join(&n)).ok().map(|t| (n, t)))
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

/// Ratio estimate for the top level of a decay CSV; `None` with fewer than
/// two rounds.
pub fn decay_fit_line(text: &str) -> String {
    let rows = rows(text, 4);
    let top = rows.first().map(|r| r[0].clone());
    let counts: Vec<f64> = rows
        .iter()
        .filter(|r| Some(&r[0]) == top.as_ref())
        .filter_map(|r| r.get(2).and_then(|c| c.parse().ok()))
        .collect();
    match geometric_fit(&counts) {
        Some(f) => format!("ratio {:.4}, R^2 {:.4} over {} rounds", f.ratio, f.r_squared, f.points),
        None => format!("ratio undefined ({} row{})", counts.len(), if counts.len() == 1 { "" } else { "s" }),
    }
}

pub fn emit_report(dir: &Path) -> Report {
    let mut s = String::new();
    let mut missing = Vec::new();
    let meta: BTreeMap<String, String> = match fs::read_to_string(dir.join("meta.csv")) {
        Ok(t) => rows(&t, 2).into_iter().filter(|r| r.len() == 2).map(|r| (r[0].clone(), r[1].clone())).collect(),
        Err(_) => {
            missing.push("meta.csv".to_string());
            BTreeMap::new()
        }
    };
    let command = meta.get("command").cloned().unwrap_or_else(|| "unknown".into());
    writeln!(s, "command: {command}").unwrap();

    let wants_runs = matches!(command.as_str(), "color" | "sweep");
    let wants_decay = matches!(command.as_str(), "color" | "sweep" | "diagnose");

    s.push_str("\n[palette]\n");
    match fs::read_to_string(dir.join("runs.csv")) {
        Ok(t) => {
            let rs = rows(&t, 8);
            let palette = rs.iter().filter_map(|r| r[4].parse::<usize>().ok()).max().unwrap_or(0);
            let proper = rs.iter().all(|r| r[7] == "true");
            let bound = meta.get("bound").cloned().unwrap_or_else(|| "?".into());
            writeln!(s, "palette used {palette} of bound {bound}; proper on all runs: {proper}").unwrap();
            s.push_str("\n[exceptional]\n");
            let fr: Vec<f64> = rs.iter().filter_map(|r| r[6].parse().ok()).collect();
            let max = fr.iter().cloned().fold(0.0, f64::max);
            let mean = if fr.is_empty() { 0.0 } else { fr.iter().sum::<f64>() / fr.len() as f64 };
            writeln!(s, "exceptional vertex fraction: max {max:.4}, mean {mean:.4} over {} runs", fr.len()).unwrap();
        }
        Err(_) if wants_runs => {
            missing.push("runs.csv".to_string());
            s.push_str("missing\n");
        }
        Err(_) => s.push_str("not produced by this command\n"),
    }

    s.push_str("\n[decay]\n");
    let decays = files_with_prefix(dir, "decay", ".csv");
    if decays.is_empty() {
        if wants_decay {
            missing.push("decay*.csv".to_string());
            s.push_str("missing\n");
        } else {
            s.push_str("not produced by this command\n");
        }
    }
    for (name, text) in &decays {
        writeln!(s, "{name}: {}", decay_fit_line(text)).unwrap();
    }

    s.push_str("\n[claims]\n");
    let claims = files_with_prefix(dir, "claims", ".csv");
    if claims.is_empty() {
        if command == "diagnose" {
            missing.push("claims*.csv".to_string());
            s.push_str("missing\n");
        } else {
            s.push_str("not produced by this command\n");
        }
    } else {
        let mut tally: Vec<(String, usize, usize)> = Vec::new();
        let mut failing = Vec::new();
        for (name, text) in &claims {
            for r in rows(text, 4) {
                let pass = r.get(2).map_or(false, |p| p == "true");
                match tally.iter_mut().find(|t| t.0 == r[0]) {
                    Some(t) => {
                        t.1 += usize::from(pass);
                        t.2 += 1;
                    }
                    None => tally.push((r[0].clone(), usize::from(pass), 1)),
                }
                if !pass {
                    failing.push(format!("{name}: {} at n={}: {}", r[0], r.get(1).map_or("", |x| x), r.get(3).map_or("", |x| x)));
                }
            }
        }
        let (p, c) = tally.iter().fold((0, 0), |acc, t| (acc.0 + t.1, acc.1 + t.2));
        writeln!(s, "{p} of {c} checks passed").unwrap();
        for (id, p, c) in &tally {
            writeln!(s, "  {id}: {p}/{c}").unwrap();
        }
        if !failing.is_empty() {
            s.push_str("failing:\n");
            for f in &failing {
                writeln!(s, "  {f}").unwrap();
            }
        }
    }

    let decomp = files_with_prefix(dir, "decomposition", ".csv");
    if !decomp.is_empty() || command == "decompose" {
        s.push_str("\n[decomposition]\n");
        if decomp.is_empty() {
            missing.push("decomposition*.csv".to_string());
            s.push_str("missing\n");
        }
        for (name, text) in &decomp {
            if let Some(r) = rows(text, 6).first() {
                writeln!(s, "{name}: {} maps (bound {}), {} exceptional edges", r[1], r[2], r[4]).unwrap();
            }
        }
    }
    if command == "oracle" {
        s.push_str("\n[oracle]\n");
        match fs::read_to_string(dir.join("oracle.csv")) {
            Ok(t) => {
                for r in rows(&t, 3) {
                    writeln!(s, "{} {} {}", r[0], r[1], r[2]).unwrap();
                }
            }
            Err(_) => {
                missing.push("oracle.csv".to_string());
                s.push_str("missing\n");
            }
        }
    }

    if !missing.is_empty() {
        writeln!(s, "\nPARTIAL: missing {}", missing.join(", ")).unwrap();
    }
    Report { text: s, missing }
}
