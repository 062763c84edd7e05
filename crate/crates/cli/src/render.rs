//! Fixed-precision text tables for terminal output.

use fqfd_core::ahp::MatrixAnalysis;
use fqfd_core::hoq::{NormalizationMode, PriorityReport};
use fqfd_core::pipeline::AhpAnalysis;
use fqfd_core::sensitivity::StabilityReport;

pub const DECIMALS: usize = 4;

#[derive(Clone, Copy)]
pub enum Align {
    Left,
    Right,
}

/// Column-aligned table with a two-space gutter.
pub fn table(headers: &[&str], align: &[Align], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells
            .zip(&widths)
            .zip(align)
            .map(|((c, &w), a)| match a {
                Align::Left => format!("{c:<w$}"),
                Align::Right => format!("{c:>w$}"),
            })
            .collect();
        let mut s = parts.join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&mut headers.iter().copied());
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

pub fn num(v: f64) -> String {
    format!("{v:.DECIMALS$}")
}

fn matrix_block(title: &str, a: &MatrixAnalysis) -> String {
    let c = &a.consistency;
    let mut out = format!(
        "{title}  lambda_max={}  ci={}  cr={}{}\n",
        num(c.lambda_max),
        num(c.ci),
        num(c.cr),
        if c.acceptable { "" } else { "  (exceeds threshold)" }
    );
    let rows: Vec<Vec<String>> =
        a.weights.element_ids.iter().zip(&a.weights.weights).map(|(id, w)| vec![id.clone(), num(*w)]).collect();
    out.push_str(&table(&["element", "weight"], &[Align::Left, Align::Right], &rows));
    out
}

pub fn ahp(a: &AhpAnalysis) -> String {
    let h = &a.hierarchy;
    let mut out = format!("selection: {}\nmethod: {}\nthreshold: {}\n\n", a.selection, a.method, num(a.threshold));
    out.push_str(&matrix_block("criteria", &h.criteria));
    for local in &h.local {
        out.push('\n');
        out.push_str(&matrix_block(&format!("local {}", local.label), local));
    }
    out.push('\n');
    match &h.global {
        Some(g) => {
            out.push_str("global\n");
            let rows: Vec<Vec<String>> =
                g.element_ids.iter().zip(&g.weights).map(|(id, w)| vec![id.clone(), num(*w)]).collect();
            out.push_str(&table(&["element", "weight"], &[Align::Left, Align::Right], &rows));
        }
        None => out.push_str("global  withheld: a matrix exceeds the consistency threshold\n"),
    }
    out
}

pub fn priorities(report: &PriorityReport) -> String {
    let rows: Vec<Vec<String>> = report
        .ranked()
        .into_iter()
        .map(|p| {
            vec![
                p.rank.to_string(),
                p.code.clone(),
                p.label.clone(),
                format!("{:.DECIMALS$}", p.ri),
                format!("{:.DECIMALS$}", p.ri_star),
                format!("{:.DECIMALS$}", p.nri_star),
                num(p.crisp),
            ]
        })
        .collect();
    use Align::*;
    let mut out = table(
        &["rank", "code", "label", "RI", "RI*", "NRI*", "crisp"],
        &[Right, Left, Left, Left, Left, Left, Right],
        &rows,
    );
    if report.normalization.mode == NormalizationMode::ScalarFallback {
        out.push_str("note: normalization fell back to scalar division\n");
    }
    out
}

pub fn stability(r: &StabilityReport) -> String {
    let mut out = format!("trials: {}\nvalid: {}\ndiscarded: {}\n", r.trials, r.valid_trials, r.discarded);
    for (code, n) in &r.discard_reasons {
        out.push_str(&format!("  {code}: {n}\n"));
    }
    out.push('\n');
    let m = r.tr_codes.len();
    let mut headers = vec!["code".to_string(), "baseline".into(), "top1".into()];
    headers.extend((1..=m).map(|k| format!("r{k}")));
    let rows: Vec<Vec<String>> = (0..m)
        .map(|j| {
            let mut row = vec![r.tr_codes[j].clone(), r.baseline_ranks[j].to_string(), num(r.top1_frequency[j])];
            row.extend(r.rank_histogram[j].iter().map(|c| c.to_string()));
            row
        })
        .collect();
    let mut align = vec![Align::Left, Align::Right, Align::Right];
    align.extend(std::iter::repeat_n(Align::Right, m));
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    out.push_str(&table(&headers, &align, &rows));

    let mut pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|j| (j + 1..m).map(move |k| (j, k))).filter(|&(j, k)| r.reversal_counts[j][k] > 0).collect();
    pairs.sort_by(|a, b| r.reversal_counts[b.0][b.1].cmp(&r.reversal_counts[a.0][a.1]).then(a.cmp(b)));
    out.push_str("\nreversals\n");
    if pairs.is_empty() {
        out.push_str("none\n");
    } else {
        let rows: Vec<Vec<String>> = pairs
            .iter()
            .map(|&(j, k)| {
                vec![
                    r.tr_codes[j].clone(),
                    r.tr_codes[k].clone(),
                    r.reversal_counts[j][k].to_string(),
                    num(r.reversal_rate[j][k]),
                ]
            })
            .collect();
        use Align::*;
        out.push_str(&table(&["first", "second", "count", "rate"], &[Left, Left, Right, Right], &rows));
    }
    out
}
