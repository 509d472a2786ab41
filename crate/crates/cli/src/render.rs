//! Output in the four supported formats. JSON is rendered from the report
//! structs directly; the other formats go through a flat [`Tabular`] view.

use serde::Serialize;

use nsmooth_core::enumeration::{ClassificationTable, Summary};
use nsmooth_core::{ManifoldInvariants, Result};

use crate::config::Format;
use crate::fixtures::TableReport;
use crate::verify::VerificationReport;

/// Header, rows and trailing key/value notes.
#[derive(Clone, Debug, Default)]
pub struct Tabular {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<(String, String)>,
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| nsmooth_core::Error::Internal(format!("JSON encoding failed: {e}")))
}

fn csv_text(t: &Tabular) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| nsmooth_core::Error::Internal(format!("CSV encoding failed: {e}"));
    w.write_record(&t.headers).map_err(io)?;
    for row in &t.rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| nsmooth_core::Error::Internal(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn markdown_text(t: &Tabular) -> String {
    let mut out = format!("## {}\n\n", t.title);
    out += &format!("| {} |\n", t.headers.join(" | "));
    out += &format!("|{}\n", "---|".repeat(t.headers.len()));
    for row in &t.rows {
        out += &format!("| {} |\n", row.join(" | "));
    }
    if !t.notes.is_empty() {
        out.push('\n');
        for (k, v) in &t.notes {
            out += &format!("- **{k}**: {v}\n");
        }
    }
    out
}

fn plain_text(t: &Tabular) -> String {
    let mut widths: Vec<usize> = t.headers.iter().map(|h| h.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = format!("{}\n", t.title);
    out += &line(&t.headers);
    for row in &t.rows {
        out += &line(row);
    }
    for (k, v) in &t.notes {
        out += &format!("{k}: {v}\n");
    }
    out
}

/// CSV carries only the table body; the notes go to the other formats.
pub fn render_tabular(t: &Tabular, format: Format) -> Result<String> {
    match format {
        Format::Csv => csv_text(t),
        Format::Markdown => Ok(markdown_text(t)),
        Format::Text | Format::Json => Ok(plain_text(t)),
    }
}

fn summary_notes(s: &Summary) -> Vec<(String, String)> {
    [
        ("total", s.total),
        ("ns", s.ns),
        ("no_recipe", s.no_recipe),
        ("homologically_trivial", s.homologically_trivial),
        ("homologically_trivial_ns", s.homologically_trivial_ns),
        ("eigenspaces_nonnegative", s.eigenspaces_nonnegative),
        ("raw_admissible", s.raw_admissible),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn manifold_title(m: &ManifoldInvariants) -> String {
    format!("{} (e={}, s={}, b+={}, b-={})", m.name, m.e, m.s, m.b_plus, m.b_minus)
}

#[derive(Serialize)]
struct ClassificationDoc<'a> {
    version: u32,
    p: u32,
    manifold: &'a ManifoldInvariants,
    structure: &'a Option<nsmooth_core::sw::SmoothStructureDesc>,
    classes: &'a [nsmooth_core::enumeration::ClassRecord],
    summary: &'a Summary,
}

pub fn classification(table: &ClassificationTable, format: Format) -> Result<String> {
    if format == Format::Json {
        return json(&ClassificationDoc {
            version: crate::SCHEMA_VERSION,
            p: table.p,
            manifold: &table.manifold,
            structure: &table.structure,
            classes: &table.records,
            summary: &table.summary,
        });
    }
    let headers = [
        "label", "counts", "fix", "b2G", "bpG", "bmG", "sign_quotient", "ns_verdict", "ht",
        "recipe",
    ];
    let rows = table
        .records
        .iter()
        .map(|r| {
            vec![
                r.label.clone(),
                r.class.to_string(),
                r.fix_count.to_string(),
                r.b2_g.to_string(),
                r.b_plus_g.to_string(),
                r.b_minus_g.to_string(),
                r.sign_quotient.to_string(),
                r.ns_verdict.to_string(),
                r.homologically_trivial.to_string(),
                r.recipe_status.to_string(),
            ]
        })
        .collect();
    let t = Tabular {
        title: format!("Z/{} classes on {}", table.p, manifold_title(&table.manifold)),
        headers: headers.map(String::from).to_vec(),
        rows,
        notes: summary_notes(&table.summary),
    };
    render_tabular(&t, format)
}

pub fn verification(report: &VerificationReport, format: Format) -> Result<String> {
    if format == Format::Json {
        return json(report);
    }
    let rows = report
        .entries
        .iter()
        .map(|e| {
            let check = e.check.as_ref();
            vec![
                e.label.clone(),
                e.class.to_string(),
                e.recipe.clone().unwrap_or_else(|| "-".into()),
                serde_json::to_value(e.outcome)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
                check.map_or("-".into(), |c| format!("{:?}", c.fixed_inertia)),
                check.map_or("-".into(), |c| c.g_signature.to_string()),
                if e.failures.is_empty() { "-".into() } else { e.failures.join(";") },
            ]
        })
        .collect();
    let s = &report.summary;
    let t = Tabular {
        title: format!("Z/{} form verification on {}", report.p, manifold_title(&report.manifold)),
        headers: ["label", "counts", "form", "outcome", "fixed_inertia", "g_signature", "failures"]
            .map(String::from)
            .to_vec(),
        rows,
        notes: [
            ("checked", s.checked),
            ("passed", s.passed),
            ("failed", s.failed),
            ("no_recipe", s.no_recipe),
            ("smooth_example", s.smooth_example),
        ]
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect(),
    };
    render_tabular(&t, format)
}

/// Seiberg–Witten data of one smooth structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwReport {
    pub version: u32,
    pub n: u32,
    pub p: u32,
    pub log_mult: (u64, u64),
    pub knot_a0: i64,
    /// Decimal; the values outgrow 64 bits quickly.
    pub sw: String,
    pub sw_mod_p: u32,
    /// Base-p digit criterion for SW of the unsurgered E(n) being a unit mod p.
    pub digit_condition: bool,
    pub in_family: bool,
}

pub fn sw(report: &SwReport, format: Format) -> Result<String> {
    if format == Format::Json {
        return json(report);
    }
    let t = Tabular {
        title: format!("SW(c_spin) of E({})_{{{},{}}}", report.n, report.log_mult.0, report.log_mult.1),
        headers: vec!["quantity".into(), "value".into()],
        rows: vec![
            vec!["n".into(), report.n.to_string()],
            vec!["p".into(), report.p.to_string()],
            vec!["knot_a0".into(), report.knot_a0.to_string()],
            vec!["SW".into(), report.sw.clone()],
            vec!["SW mod p".into(), report.sw_mod_p.to_string()],
            vec!["digit_condition".into(), report.digit_condition.to_string()],
            vec!["in_family".into(), report.in_family.to_string()],
        ],
        notes: Vec::new(),
    };
    render_tabular(&t, format)
}

pub fn table_report(report: &TableReport, format: Format) -> Result<String> {
    if format == Format::Json {
        return json(report);
    }
    let mut notes = vec![("matches_reference".to_string(), report.matches().to_string())];
    notes.extend(report.diffs.iter().map(|d| {
        (
            format!("diff {} / {}", d.row, d.column),
            format!("expected {}, actual {}", d.expected, d.actual),
        )
    }));
    let t = Tabular {
        title: report.table.clone(),
        headers: report.columns.clone(),
        rows: report.rows.clone(),
        notes,
    };
    render_tabular(&t, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tabular {
        Tabular {
            title: "t".into(),
            headers: vec!["a".into(), "bb".into()],
            rows: vec![vec!["1".into(), "x,y".into()]],
            notes: vec![("total".into(), "1".into())],
        }
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(render_tabular(&sample(), Format::Csv).unwrap(), "a,bb\n1,\"x,y\"\n");
    }

    #[test]
    fn text_and_markdown_layout() {
        assert_eq!(render_tabular(&sample(), Format::Text).unwrap(), "t\na  bb\n1  x,y\ntotal: 1\n");
        let md = render_tabular(&sample(), Format::Markdown).unwrap();
        assert!(md.contains("| a | bb |\n|---|---|\n| 1 | x,y |\n"));
    }
}
