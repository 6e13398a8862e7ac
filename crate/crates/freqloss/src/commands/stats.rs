use std::path::{Path, PathBuf};

use clap::Args;
use freqloss_core::ambiguity::{tally_frame, AmbiguityTally, TallyRow};
use freqloss_core::geometry::disparity_sampler;
use freqloss_core::ScalarMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigFlags, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{load_image, load_map};

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Pair list: `target source disparity` per line, where disparity is a
    /// number or a PFM map; paths are relative to the list.
    #[arg(long)]
    pub pairs: PathBuf,
    /// CSV with columns set, number_pct, mean_loss, loss_pct.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsSummary {
    pub pairs: usize,
    pub pixels: u64,
    pub ambiguous_number_pct: f64,
    pub ambiguous_mean_loss: f64,
    pub ambiguous_loss_pct: f64,
    pub other_number_pct: f64,
    pub other_mean_loss: f64,
    pub other_loss_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Disparity {
    Constant(f64),
    Map(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
struct PairEntry {
    target: PathBuf,
    source: PathBuf,
    disparity: Disparity,
}

fn parse_list(path: &Path) -> Result<Vec<PairEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [t, s, d] = fields[..] else {
            return Err(CliError::format(
                path,
                format!("line {}: expected `target source disparity`", n + 1),
            ));
        };
        let disparity = match d.parse::<f64>() {
            Ok(v) => Disparity::Constant(v),
            Err(_) => Disparity::Map(base.join(d)),
        };
        entries.push(PairEntry {
            target: base.join(t),
            source: base.join(s),
            disparity,
        });
    }
    if entries.is_empty() {
        return Err(CliError::format(path, "no pairs listed"));
    }
    Ok(entries)
}

fn tally_entry(e: &PairEntry, cfg: &RunConfig) -> Result<AmbiguityTally> {
    let target = load_image(&e.target)?;
    let source = load_image(&e.source)?;
    let (h, w) = (target.height(), target.width());
    let disparity = match &e.disparity {
        Disparity::Constant(d) => ScalarMap::filled(h, w, *d),
        Disparity::Map(p) => {
            let m = load_map(p)?;
            if m.height() != h || m.width() != w {
                return Err(CliError::format(p, format!("disparity map is not {h}x{w}")));
            }
            m
        }
    };
    let sampler = disparity_sampler(&disparity, 1.0)?;
    Ok(tally_frame(&target, &source, &sampler, &cfg.loss, &cfg.ambiguity)?)
}

/// Two-row table with a header.
pub fn stats_csv(ambiguous: &TallyRow, other: &TallyRow) -> String {
    let mut out = String::from("set,number_pct,mean_loss,loss_pct\n");
    for (name, r) in [("ambiguous", ambiguous), ("other", other)] {
        out.push_str(&format!("{name},{:.6},{:.6},{:.6}\n", r.number_pct, r.mean_loss, r.loss_pct));
    }
    out
}

pub fn run(args: &StatsArgs, flags: &ConfigFlags) -> Result<StatsSummary> {
    let cfg = flags.resolve(RunConfig::default())?;
    let entries = parse_list(&args.pairs)?;
    let tallies = entries
        .par_iter()
        .map(|e| tally_entry(e, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut total = AmbiguityTally::default();
    for t in &tallies {
        total.merge(t);
    }
    let (amb, other) = total.rows();
    std::fs::write(&args.out, stats_csv(&amb, &other)).map_err(|e| CliError::io(&args.out, e))?;
    Ok(StatsSummary {
        pairs: entries.len(),
        pixels: total.ambiguous_count + total.other_count,
        ambiguous_number_pct: amb.number_pct,
        ambiguous_mean_loss: amb.mean_loss,
        ambiguous_loss_pct: amb.loss_pct,
        other_number_pct: other.number_pct,
        other_mean_loss: other.mean_loss,
        other_loss_pct: other.loss_pct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_lines_resolve_against_the_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("list.txt");
        std::fs::write(&path, "# comment\n\na.png b.png 2.5\nc.png d.png gt.pfm\n").unwrap();
        let e = parse_list(&path).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].target, dir.path().join("a.png"));
        assert_eq!(e[0].disparity, Disparity::Constant(2.5));
        assert_eq!(e[1].disparity, Disparity::Map(dir.path().join("gt.pfm")));
        std::fs::write(&path, "a.png b.png\n").unwrap();
        assert!(matches!(parse_list(&path), Err(CliError::Format { .. })));
    }

    #[test]
    fn csv_layout() {
        let r = TallyRow {
            number_pct: 25.0,
            mean_loss: 0.5,
            loss_pct: 40.0,
        };
        let csv = stats_csv(&r, &r);
        assert_eq!(csv.lines().next(), Some("set,number_pct,mean_loss,loss_pct"));
        assert_eq!(csv.lines().nth(1), Some("ambiguous,25.000000,0.500000,40.000000"));
    }
}
