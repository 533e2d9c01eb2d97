//! Report rendering: human-readable text and stable CSV schemas.
//!
//! All numbers are printed with 9 significant digits; re-parsing a CSV
//! reproduces the report exactly at that precision. Files are written
//! atomically (temp file plus rename).

use super::pipeline::{PayoffSection, PipelineReport};
use super::reference::ReferenceCell;
use super::sweep::SweepPoint;
use crate::bargain::SimulationReport;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

/// 9 significant digits.
pub fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Columns of the per-player report CSV.
pub const REPORT_HEADER: &str =
    "scenario_id,sweep_parameter,sweep_value,player,role,p,beta,S,h,R,n,v,admitted,w,x_shapley,T,note";

fn payoff_lookup(payoffs: &PayoffSection, cp: usize) -> Option<(f64, f64, f64)> {
    payoffs.admitted.iter().position(|&a| a == cp).map(|pos| {
        (
            payoffs.egalitarian_share,
            payoffs.shapley_cps[pos],
            payoffs.transfers[pos],
        )
    })
}

fn report_rows(report: &PipelineReport, out: &mut String) {
    let (sweep_param, sweep_value) = match &report.sweep_key {
        Some((name, value)) => (name.clone(), fmt9(*value)),
        None => (String::new(), String::new()),
    };
    for cp in &report.cps {
        let d = &cp.outcome.design;
        let (w, x, t) = match report
            .payoffs
            .as_ref()
            .and_then(|p| payoff_lookup(p, cp.index))
        {
            Some((w, x, t)) => (fmt9(w), fmt9(x), fmt9(t)),
            None => (String::new(), String::new(), String::new()),
        };
        let note = match cp.removal {
            Some(crate::game::RemovalReason::Unprofitable) => "denied: unprofitable",
            Some(crate::game::RemovalReason::SmallestContributor) => "denied: smallest contributor",
            None => "",
        };
        writeln!(
            out,
            "{},{},{},{},cp,{},{},{},{},{},{},{},{},{},{},{},{}",
            report.scenario_id,
            sweep_param,
            sweep_value,
            cp.index,
            fmt9(d.price),
            fmt9(d.capacity_increment),
            fmt9(d.cache_size),
            fmt9(cp.state.hit_prob),
            fmt9(cp.state.avg_capacity),
            fmt9(cp.state.subscribers),
            fmt9(cp.outcome.virtual_profit),
            cp.admitted,
            w,
            x,
            t,
            note
        )
        .expect("write to string");
    }
    // ISP row: payoffs only
    let isp_id = report.cps.len() + 1;
    match &report.payoffs {
        Some(p) => {
            writeln!(
                out,
                "{},{},{},{},isp,,,,,,,,true,{},{},,",
                report.scenario_id,
                sweep_param,
                sweep_value,
                isp_id,
                fmt9(p.egalitarian_share),
                fmt9(p.shapley_isp),
            )
            .expect("write to string");
        }
        None => {
            writeln!(
                out,
                "{},{},{},{},isp,,,,,,,,false,,,,no coalition",
                report.scenario_id, sweep_param, sweep_value, isp_id
            )
            .expect("write to string");
        }
    }
}

/// Per-player CSV for one or more pipeline reports.
pub fn report_csv(reports: &[&PipelineReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for report in reports {
        report_rows(report, &mut out);
    }
    out
}

/// Long-format CSV over sweep points; failed points keep their grid
/// value with the error in the note column.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for point in points {
        match &point.report {
            Ok(report) => report_rows(report, &mut out),
            Err(message) => {
                writeln!(
                    out,
                    ",,{},,,,,,,,,,,,,,sweep point failed: {}",
                    fmt9(point.value),
                    message.replace(',', ";")
                )
                .expect("write to string");
            }
        }
    }
    out
}

/// One agreement record per trial: round 0 marks disagreement, the
/// coalition is a bitmask with bit `i-1` for player `i`, and payoffs
/// are discounted.
pub fn bargain_trace_csv(sim: &SimulationReport) -> String {
    let players = sim.mean_payoffs.len();
    let mut out = String::from("trial,round,coalition_mask");
    for p in 1..=players {
        write!(out, ",payoff_{p}").expect("write to string");
    }
    out.push('\n');
    for (trial, rec) in sim.records.iter().enumerate() {
        write!(out, "{},{},{}", trial, rec.round, rec.coalition.mask()).expect("write to string");
        for &p in &rec.payoffs {
            write!(out, ",{}", fmt9(p)).expect("write to string");
        }
        out.push('\n');
    }
    out
}

/// Reference-table comparison as CSV.
pub fn reference_csv(cells: &[ReferenceCell]) -> String {
    let mut out = String::from("regime,eta_S,quantity,expected,computed,pass\n");
    for c in cells {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            c.regime.label(),
            fmt9(c.eta_s),
            c.quantity,
            fmt9(c.expected),
            fmt9(c.computed),
            c.pass
        )
        .expect("write to string");
    }
    out
}

/// Aligned text diff of the reference tables.
pub fn render_reference_diff(cells: &[ReferenceCell]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<6} {:>10} {:>6} {:>16} {:>16}  result",
        "regime", "eta_S", "qty", "published", "computed"
    )
    .expect("write to string");
    for c in cells {
        writeln!(
            out,
            "{:<6} {:>10} {:>6} {:>16} {:>16}  {}",
            c.regime.label(),
            c.eta_s,
            c.quantity,
            format!("{:.6}", c.expected),
            format!("{:.6}", c.computed),
            if c.pass { "ok" } else { "MISMATCH" }
        )
        .expect("write to string");
    }
    let failed = cells.iter().filter(|c| !c.pass).count();
    writeln!(
        out,
        "{} of {} cells match the published tables",
        cells.len() - failed,
        cells.len()
    )
    .expect("write to string");
    out
}

/// Human-readable report.
pub fn render_text(report: &PipelineReport) -> String {
    let mut out = String::new();
    let regime = if report.net_neutrality { "NN" } else { "NNN" };
    writeln!(out, "scenario {} [{}]", report.scenario_id, regime).expect("write");
    for w in &report.warnings {
        writeln!(out, "  warning: {w}").expect("write");
    }
    writeln!(out, "\n  design optimization").expect("write");
    writeln!(
        out,
        "  {:>3} {:>14} {:>14} {:>14} {:>10} {:>14} {:>16}  standing",
        "cp", "p", "beta", "S", "h", "n", "v"
    )
    .expect("write");
    for cp in &report.cps {
        let d = &cp.outcome.design;
        let standing = match (cp.admitted, cp.removal) {
            (true, _) => "admitted".to_owned(),
            (false, Some(crate::game::RemovalReason::Unprofitable)) => {
                "denied (unprofitable)".to_owned()
            }
            (false, Some(crate::game::RemovalReason::SmallestContributor)) => {
                "denied (smallest contributor)".to_owned()
            }
            (false, None) => "denied".to_owned(),
        };
        writeln!(
            out,
            "  {:>3} {:>14.6} {:>14.6} {:>14.6} {:>10.4} {:>14.4} {:>16.6}  {}",
            cp.index,
            d.price,
            d.capacity_increment,
            d.cache_size,
            cp.state.hit_prob,
            cp.state.subscribers,
            cp.outcome.virtual_profit,
            standing
        )
        .expect("write");
    }
    writeln!(
        out,
        "\n  full coalition: value {} | admission condition {}",
        fmt9(report.full_value),
        if report.full_admission {
            "holds"
        } else {
            "fails"
        }
    )
    .expect("write");

    match &report.payoffs {
        None => {
            writeln!(out, "\n  payoffs: no coalition forms").expect("write");
        }
        Some(p) => {
            writeln!(
                out,
                "\n  admitted coalition {:?}: value {}",
                p.admitted,
                fmt9(p.coalition_value)
            )
            .expect("write");
            writeln!(
                out,
                "  egalitarian share per player: {}",
                fmt9(p.egalitarian_share)
            )
            .expect("write");
            for (pos, &cp) in p.admitted.iter().enumerate() {
                writeln!(
                    out,
                    "  cp {:>2}: shapley {} settlement {}",
                    cp,
                    fmt9(p.shapley_cps[pos]),
                    fmt9(p.transfers[pos])
                )
                .expect("write");
            }
            writeln!(
                out,
                "  isp : shapley {} (identity residual {:.3e})",
                fmt9(p.shapley_isp),
                p.isp_residual
            )
            .expect("write");
        }
    }

    if let Some(b) = &report.bargain {
        writeln!(out, "\n  bargaining").expect("write");
        writeln!(
            out,
            "  subgame efficient: {} (per-capita monotone {}, deviation-free {})",
            b.equilibrium.subgame_efficient,
            b.equilibrium.percapita_monotone,
            b.equilibrium.deviation_free
        )
        .expect("write");
        if let Some(w) = &b.equilibrium.witness {
            writeln!(
                out,
                "  deviation witness: proposer {} prefers coalition mask {:#b} in subgame mask {:#b} (gain {})",
                w.proposer,
                w.coalition.mask(),
                w.subgame.mask(),
                fmt9(w.gain)
            )
            .expect("write");
        }
        writeln!(
            out,
            "  continuation values: {}",
            b.equilibrium
                .continuation
                .iter()
                .map(|&c| fmt9(c))
                .collect::<Vec<_>>()
                .join(" ")
        )
        .expect("write");
        writeln!(
            out,
            "  simulation: {} trials, agreement rate {:.4}, mean round {:.3}",
            b.simulation.trials, b.simulation.agreement_rate, b.simulation.mean_agreement_round
        )
        .expect("write");
        writeln!(
            out,
            "  mean payoffs: {}",
            b.simulation
                .mean_payoffs
                .iter()
                .map(|&c| fmt9(c))
                .collect::<Vec<_>>()
                .join(" ")
        )
        .expect("write");
        if !b.simulation.note.is_empty() {
            writeln!(out, "  note: {}", b.simulation.note).expect("write");
        }
    }
    out
}

/// Writes a file atomically: contents land under a temporary name in
/// the target directory, then replace the destination by rename.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}
