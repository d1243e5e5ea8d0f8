use std::fmt::Write;

use nefcone::engine::{FiltrationReport, Mode};

use crate::files::{self, ReportFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Structured,
}

pub fn report(r: &FiltrationReport, format: Format) -> String {
    match format {
        Format::Table => table(r),
        Format::Csv => csv(r),
        Format::Structured => files::to_text(&ReportFile::from_report(r)),
    }
}

pub fn csv(r: &FiltrationReport) -> String {
    let mut out = String::from("step,facets,gamma\n");
    for s in &r.steps {
        writeln!(out, "{},{},{}", s.step, s.facets, s.gamma).unwrap();
    }
    out
}

/// Steps as columns, quantities as rows.
pub fn table(r: &FiltrationReport) -> String {
    let cone = match r.mode {
        Mode::Ambient => "E",
        Mode::Quotient => "Ē",
    };
    let cell = |x: Option<usize>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
    let rows: Vec<(String, Vec<String>)> = vec![
        (
            String::new(),
            r.steps.iter().map(|s| format!("{cone}({})", s.step)).collect(),
        ),
        (
            "added".into(),
            r.steps
                .iter()
                .map(|s| s.generator.clone().unwrap_or_else(|| "-".into()))
                .collect(),
        ),
        (
            "raw inequalities".into(),
            r.steps.iter().map(|s| cell(s.counts.map(|c| c.raw))).collect(),
        ),
        (
            "number of facets".into(),
            r.steps.iter().map(|s| s.facets.to_string()).collect(),
        ),
        (format!("Γ(F, {cone}(i))"), r.steps.iter().map(|s| s.gamma.to_string()).collect()),
        (
            "enlarged".into(),
            r.steps
                .iter()
                .enumerate()
                .map(|(i, s)| match (s.enlarged, i.checked_sub(1).map(|p| r.steps[p].gamma)) {
                    (Some(e), Some(g)) => format!("{e}/{g}"),
                    _ => "-".into(),
                })
                .collect(),
        ),
    ];
    let width = |s: &str| s.chars().count();
    let head = rows.iter().map(|(h, _)| width(h)).max().unwrap_or(0);
    let cols: Vec<usize> = (0..r.steps.len())
        .map(|j| rows.iter().map(|(_, c)| width(&c[j])).max().unwrap_or(0))
        .collect();
    let mut out = format!("n = {}, {}, {}\n", r.n, r.mode.as_str(), r.outcome.as_str());
    for (h, cells) in &rows {
        let mut line = format!("{h}{}", " ".repeat(head - width(h)));
        for (c, w) in cells.iter().zip(&cols) {
            line.push_str("  ");
            line.push_str(&" ".repeat(w - width(c)));
            line.push_str(c);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nefcone::engine::{run_ambient_filtration, Order};

    #[test]
    fn csv_rows_for_n5() {
        let r = run_ambient_filtration(5, &Order::Paper, None, false).unwrap();
        assert_eq!(csv(&r), "step,facets,gamma\n0,10,10\n1,10,10\n2,12,12\n3,11,9\n4,10,7\n5,10,0\n");
    }

    #[test]
    fn table_has_one_column_per_step() {
        let r = run_ambient_filtration(5, &Order::Paper, None, false).unwrap();
        let t = table(&r);
        let facets = t.lines().find(|l| l.starts_with("number of facets")).unwrap();
        assert_eq!(facets.split_whitespace().skip(3).collect::<Vec<_>>(), ["10", "10", "12", "11", "10", "10"]);
        assert!(t.starts_with("n = 5, ambient-line, contained\n"));
    }
}
