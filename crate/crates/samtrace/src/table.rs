//! Fixed-column text tables for standard output, and CSV matrices.

use std::fmt::Write;

use samtrace_core::{FrameTrace, PcaResult};

use crate::commands::{AnalyzeOutput, CompareOutput, FitOutput, GenerationSidecar, PredictOutput, SimulateOutput};

pub fn fit(out: &FitOutput) -> String {
    let m = &out.model;
    let p = &m.params;
    let mut t = String::new();
    let _ = writeln!(t, "model    SAM {} mode {}", p.order(), m.mode);
    let _ = writeln!(t, "source   {}  (n_effective {})", m.source, m.n_effective);
    let _ = writeln!(
        t,
        "season   used {}  declared {}  detected {}",
        out.seasonality.used,
        opt(out.seasonality.declared),
        opt(out.seasonality.detected)
    );
    let _ = writeln!(t, "{:<10} {:>14}", "param", "value");
    for (name, v) in [
        ("phi", p.phi),
        ("theta", p.theta),
        ("Phi_s", p.seasonal_phi),
        ("Theta_s", p.seasonal_theta),
        ("sigma", p.sigma),
    ] {
        let _ = writeln!(t, "{name:<10} {v:>14.6}");
    }
    let _ = writeln!(
        t,
        "css {:.6e}  converged {}  iterations {}  evaluations {}",
        m.objective_value, m.converged, m.iterations, m.evaluations
    );
    if let Some(d) = &out.diagnostics {
        let _ = writeln!(
            t,
            "ljung-box Q({}) = {:.3}  df {}  p {}",
            d.diagnostics.ljung_box_lag,
            d.diagnostics.ljung_box,
            d.diagnostics.degrees_of_freedom,
            d.p_value.map_or("-".to_string(), |p| format!("{p:.4}"))
        );
    }
    t
}

pub fn generate(sidecar: &GenerationSidecar, trace: &FrameTrace) -> String {
    let sizes = trace.sizes();
    let mean = sizes.iter().sum::<f64>() / sizes.len().max(1) as f64;
    format!(
        "wrote {} frames to {}  (seed {}, mode {}, mean {:.1} bytes)\n",
        sidecar.frames,
        sidecar.trace_path.display(),
        sidecar.config.seed,
        sidecar.mode,
        mean
    )
}

pub fn predict(out: &PredictOutput) -> String {
    let mut t = String::new();
    let f = &out.forecast;
    let _ = writeln!(t, "forecast from frame {} ({} steps)", f.origin, f.horizon);
    for (i, v) in f.point_values.iter().enumerate() {
        let _ = writeln!(t, "  +{:<4} {:>14.1}", i + 1, v);
    }
    if let Some(r) = &out.evaluation {
        let _ = writeln!(
            t,
            "rolling-origin evaluation: train {}  origins {}  baseline {}",
            r.train_len, r.origins, r.baseline.name
        );
        let _ = writeln!(
            t,
            "{:<6} {:>12} {:>12} {:>12} {:>12} {:>9}",
            "step", "sam_mae", "sam_rmse", "base_mae", "base_rmse", "improve"
        );
        for (i, (a, b)) in r.sam.per_step.iter().zip(&r.baseline.per_step).enumerate() {
            let _ = writeln!(
                t,
                "{:<6} {:>12.2} {:>12.2} {:>12.2} {:>12.2} {:>8.1}%",
                i + 1,
                a.mae,
                a.rmse,
                b.mae,
                b.rmse,
                100.0 * (1.0 - a.rmse / b.rmse)
            );
        }
        let _ = writeln!(
            t,
            "{:<6} {:>12.2} {:>12.2} {:>12.2} {:>12.2} {:>8.1}%",
            "all",
            r.sam.overall.mae,
            r.sam.overall.rmse,
            r.baseline.overall.mae,
            r.baseline.overall.rmse,
            100.0 * r.improvement
        );
    }
    t
}

pub fn simulate(out: &SimulateOutput) -> String {
    let sc = &out.scenario;
    let mut t = String::new();
    let _ = writeln!(
        t,
        "scenario {}  capacity {} B/interval  demand {:.1} B/interval  duration {} x {} s",
        if sc.name.is_empty() { "-" } else { &sc.name },
        sc.capacity,
        sc.demand_per_interval,
        sc.duration,
        sc.interval
    );
    let _ = writeln!(
        t,
        "{:<8} {:>5} {:>10} {:>14} {:>14} {:>10} {:>9} {:>10}",
        "sched", "flow", "offset", "offered", "served", "norm_tput", "miss", "mean_dly"
    );
    for r in &out.reports {
        for (f, spec) in r.flows.iter().zip(&sc.flows) {
            let _ = writeln!(
                t,
                "{:<8} {:>5} {:>10} {:>14} {:>14} {:>10.4} {:>8.2}% {:>10.1}",
                r.scheduler.name(),
                f.id,
                spec.deadline_offset,
                f.offered_bytes,
                f.served_bytes,
                f.normalized_throughput,
                100.0 * f.miss_rate(),
                f.mean_delay_intervals
            );
        }
    }
    let _ = writeln!(t, "{:<8} {:>10} {:>12}", "sched", "jain", "utilization");
    for r in &out.reports {
        let _ = writeln!(
            t,
            "{:<8} {:>10.6} {:>12.4}",
            r.scheduler.name(),
            r.jain_fairness,
            r.utilization
        );
    }
    t
}

pub fn analyze(out: &AnalyzeOutput) -> String {
    let mut t = String::new();
    let _ = write!(t, "{:<20}", "trace");
    for name in &out.feature_names {
        let _ = write!(t, " {:>14}", truncate(name, 14));
    }
    if out.clusters.is_some() {
        let _ = write!(t, " {:>7}", "cluster");
    }
    t.push('\n');
    for (i, fv) in out.features.iter().enumerate() {
        let _ = write!(t, "{:<20}", truncate(&fv.name, 20));
        for v in fv.values {
            let _ = write!(t, " {:>14.4}", v);
        }
        if let Some(c) = &out.clusters {
            let _ = write!(t, " {:>7}", c.result.assignments[i]);
        }
        t.push('\n');
    }
    if let Some(p) = &out.pca {
        let _ = writeln!(t, "{:<10} {:>12} {:>10}", "component", "eigenvalue", "explained");
        for (i, r) in p.explained_ratio.iter().enumerate() {
            let _ = writeln!(t, "{:<10} {:>12.4} {:>9.2}%", i + 1, p.eigenvalues[i], 100.0 * r);
        }
    }
    if let Some(c) = &out.clusters {
        let _ = writeln!(
            t,
            "k-means k={} on {}: wcss {:.4}  iterations {}  converged {}",
            c.k, c.space, c.result.wcss, c.result.iterations, c.result.converged
        );
    }
    t
}

pub fn compare(out: &CompareOutput) -> String {
    let r = &out.report;
    let mut t = String::new();
    let _ = writeln!(t, "real {}  synthetic {}  s {}", out.real, out.synthetic, r.s);
    let _ = writeln!(
        t,
        "{:<16} {:>14} {:>14} {:>10}",
        "statistic", "real", "synthetic", "rel_diff"
    );
    for (name, d) in [("mean", &r.mean), ("std_dev", &r.std_dev)] {
        let _ = writeln!(
            t,
            "{:<16} {:>14.2} {:>14.2} {:>9.2}%",
            name,
            d.real,
            d.synthetic,
            100.0 * d.relative
        );
    }
    let _ = writeln!(
        t,
        "acf distance (mean |diff|, lags 1..{}): {:.4}",
        3 * r.s,
        r.acf_distance
    );
    let _ = writeln!(t, "cdf distance (KS): {:.4}", r.cdf_distance);
    t
}

pub fn features_csv(out: &AnalyzeOutput) -> String {
    let mut t = String::from("trace");
    for name in &out.feature_names {
        t.push(',');
        t.push_str(name);
    }
    t.push('\n');
    for fv in &out.features {
        t.push_str(&csv_field(&fv.name));
        for v in fv.values {
            let _ = write!(t, ",{v}");
        }
        t.push('\n');
    }
    t
}

pub fn scores_csv(traces: &[String], pca: &PcaResult) -> String {
    let mut t = String::from("trace");
    for i in 0..pca.components.len() {
        let _ = write!(t, ",pc{}", i + 1);
    }
    t.push('\n');
    for (name, row) in traces.iter().zip(&pca.scores) {
        t.push_str(&csv_field(name));
        for v in row {
            let _ = write!(t, ",{v}");
        }
        t.push('\n');
    }
    t
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn truncate(s: &str, width: usize) -> &str {
    match s.char_indices().nth(width) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or("-".to_string(), |v| v.to_string())
}
