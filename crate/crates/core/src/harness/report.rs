use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::Task;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: Task,
    pub model: String,
    pub metrics: BTreeMap<String, f64>,
    pub config_digest: String,
    pub timestamp: String,
}

impl EvalReport {
    pub fn primary(&self) -> Option<f64> {
        self.metrics.get(self.task.primary_metric()).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedReport {
    pub table: String,
    pub tsv: String,
}

/// Orders reports by primary metric (descending, ties by model name) and
/// renders them as an aligned table with the best primary value starred,
/// plus the same rows as TSV. Values are printed in shortest round-trip
/// form, so both outputs match the JSON reports exactly.
pub fn render_report(reports: &[EvalReport]) -> Result<RenderedReport> {
    let first = reports.first().ok_or_else(|| Error::Validation("no reports to render".into()))?;
    let task = first.task;
    if let Some(other) = reports.iter().find(|r| r.task != task) {
        return Err(Error::Validation(format!("cannot mix {task} and {} reports in one table", other.task)));
    }
    let primary = task.primary_metric();
    let mut rows: Vec<&EvalReport> = reports.iter().collect();
    rows.sort_by(|a, b| {
        let (pa, pb) = (a.primary().unwrap_or(f64::NEG_INFINITY), b.primary().unwrap_or(f64::NEG_INFINITY));
        pb.total_cmp(&pa).then_with(|| a.model.cmp(&b.model))
    });
    let mut columns = vec![primary.to_owned()];
    let rest: BTreeSet<&String> = reports.iter().flat_map(|r| r.metrics.keys()).filter(|k| *k != primary).collect();
    columns.extend(rest.into_iter().cloned());

    let cell = |r: &EvalReport, c: &str| r.metrics.get(c).map_or_else(|| "-".to_owned(), |v| v.to_string());
    let mut tsv = format!("model\t{}\n", columns.join("\t"));
    let mut grid: Vec<Vec<String>> = vec![std::iter::once("model".to_owned()).chain(columns.iter().cloned()).collect()];
    for (i, r) in rows.iter().enumerate() {
        let cells: Vec<String> = columns.iter().map(|c| cell(r, c)).collect();
        let _ = writeln!(tsv, "{}\t{}", r.model, cells.join("\t"));
        let mut line = vec![r.model.clone()];
        line.extend(cells);
        if i == 0 && r.primary().is_some() {
            line[1].push('*');
        }
        grid.push(line);
    }
    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut table = format!("task: {task}\n");
    for (n, row) in grid.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (v, &w))| if c == 0 { format!("{v:<w$}") } else { format!("{v:>w$}") })
            .collect();
        let _ = writeln!(table, "{}", line.join("  ").trim_end());
        if n == 0 {
            let _ = writeln!(table, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        }
    }
    Ok(RenderedReport { table, tsv })
}

/// Collects every `report.json` below `dir` whose task is `task`.
pub fn read_reports(dir: &Path, task: Task) -> Result<Vec<EvalReport>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        let mut entries: Vec<_> = fs::read_dir(&d)
            .map_err(|e| Error::io(&d, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n == "report.json") {
                let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
                let r: EvalReport = serde_json::from_slice(&bytes)?;
                if r.task == task {
                    out.push(r);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Validation(format!("no {task} reports under {}", dir.display())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(model: &str, f1: f64) -> EvalReport {
        EvalReport {
            task: Task::Sentiment,
            model: model.into(),
            metrics: [("macro_f1_3".to_string(), f1), ("accuracy".to_string(), 0.5)].into(),
            config_digest: "d".into(),
            timestamp: "t".into(),
        }
    }

    #[test]
    fn single_row() {
        let r = render_report(&[report("tfidf", 0.571)]).unwrap();
        assert_eq!(r.tsv.lines().count(), 2);
        assert!(r.table.contains("0.571*"));
    }

    #[test]
    fn ordering_and_marking() {
        let r = render_report(&[report("b", 0.5), report("a", 0.7), report("c", 0.6)]).unwrap();
        let models: Vec<&str> = r.tsv.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
        assert_eq!(models, ["a", "c", "b"]);
        assert_eq!(r.table.matches('*').count(), 1);
        assert!(r.table.contains("0.7*"));
    }

    #[test]
    fn ties_by_name() {
        let r = render_report(&[report("zeta", 0.5), report("alpha", 0.5)]).unwrap();
        let models: Vec<&str> = r.tsv.lines().skip(1).map(|l| l.split('\t').next().unwrap()).collect();
        assert_eq!(models, ["alpha", "zeta"]);
    }

    #[test]
    fn tsv_matches_json_values() {
        let v = 0.1 + 0.2;
        let r = render_report(&[report("m", v)]).unwrap();
        let cell: f64 = r.tsv.lines().nth(1).unwrap().split('\t').nth(1).unwrap().parse().unwrap();
        assert_eq!(cell.to_bits(), v.to_bits());
        let json: f64 = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(cell.to_bits(), json.to_bits());
    }

    #[test]
    fn mixed_tasks_rejected() {
        let mut other = report("x", 0.1);
        other.task = Task::Docclass;
        assert!(render_report(&[report("m", 0.2), other]).is_err());
        assert!(render_report(&[]).is_err());
    }
}
