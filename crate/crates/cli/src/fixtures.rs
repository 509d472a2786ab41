//! Reference tables shipped with the crate and their comparison against
//! freshly computed results.

use serde::{Deserialize, Serialize};

use nsmooth_core::enumeration::{count_table_en, enumerate_classes, ClassRecord, EnumOptions};
use nsmooth_core::forms::RecipeStatus;
use nsmooth_core::sw::Verdict;
use nsmooth_core::{Error, ManifoldInvariants, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableName {
    /// p = 3 classes on E(4).
    Table1,
    /// p = 3 classes on E(8).
    Table2,
    /// p = 3 classes on E(10).
    Table3,
    /// p = 3 class counts on E(n), n = 2..28.
    Table4,
    /// p = 5 class counts on K3.
    Z5counts,
    /// p = 7 class counts on K3.
    Z7counts,
}

impl TableName {
    pub fn name(&self) -> &'static str {
        match self {
            TableName::Table1 => "table1",
            TableName::Table2 => "table2",
            TableName::Table3 => "table3",
            TableName::Table4 => "table4",
            TableName::Z5counts => "z5counts",
            TableName::Z7counts => "z7counts",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct ClassRow {
    pub label: String,
    pub fix_count: i64,
    pub m_plus: u32,
    pub m_minus: u32,
    #[serde(rename = "b2G")]
    pub b2_g: i64,
    #[serde(rename = "bpG")]
    pub b_plus_g: i64,
    #[serde(rename = "bmG")]
    pub b_minus_g: i64,
    pub sign_quotient: Option<i64>,
    pub ns: bool,
    pub no_rep: bool,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ClassFixture {
    pub p: u32,
    pub surface: String,
    pub rows: Vec<ClassRow>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CountRow {
    pub n: u32,
    pub total: u64,
    pub ns: u64,
    pub no_rep: u64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CountFixture {
    pub p: u32,
    pub rows: Vec<CountRow>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct SummaryFixture {
    pub p: u32,
    pub surface: String,
    pub total: u64,
    pub ns: Option<u64>,
    pub homologically_trivial: Option<u64>,
    pub homologically_trivial_ns: Option<u64>,
}

fn parse<T: for<'a> Deserialize<'a>>(name: &str, text: &str) -> T {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("fixture {name} is malformed: {e}"))
}

pub fn class_fixture(which: TableName) -> Option<ClassFixture> {
    let text = match which {
        TableName::Table1 => include_str!("../fixtures/table1.json"),
        TableName::Table2 => include_str!("../fixtures/table2.json"),
        TableName::Table3 => include_str!("../fixtures/table3.json"),
        _ => return None,
    };
    Some(parse(which.name(), text))
}

pub fn count_fixture() -> CountFixture {
    parse("table4", include_str!("../fixtures/table4.json"))
}

pub fn summary_fixture(which: TableName) -> Option<SummaryFixture> {
    let text = match which {
        TableName::Z5counts => include_str!("../fixtures/z5counts.json"),
        TableName::Z7counts => include_str!("../fixtures/z7counts.json"),
        _ => return None,
    };
    Some(parse(which.name(), text))
}

/// One cell that differs from the reference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub row: String,
    pub column: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub version: u32,
    pub table: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub diffs: Vec<DiffEntry>,
}

impl TableReport {
    pub fn matches(&self) -> bool {
        self.diffs.is_empty()
    }
}

#[derive(Default)]
struct Differ {
    diffs: Vec<DiffEntry>,
}

impl Differ {
    fn cmp<T: PartialEq + ToString>(&mut self, row: &str, column: &str, expected: T, actual: T) {
        if expected != actual {
            self.diffs.push(DiffEntry {
                row: row.to_string(),
                column: column.to_string(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }
}

fn class_columns(with_sign: bool) -> Vec<String> {
    let mut c = vec!["label", "fix_count", "m_plus", "m_minus", "b2G", "bpG", "bmG"];
    if with_sign {
        c.push("sign_quotient");
    }
    c.extend(["ns", "no_rep", "recipe"]);
    c.into_iter().map(String::from).collect()
}

fn class_row(r: &ClassRecord, with_sign: bool) -> Vec<String> {
    let c = r.class.counts();
    let mut row = vec![
        r.label.clone(),
        r.fix_count.to_string(),
        c[0].to_string(),
        c[1].to_string(),
        r.b2_g.to_string(),
        r.b_plus_g.to_string(),
        r.b_minus_g.to_string(),
    ];
    if with_sign {
        row.push(r.sign_quotient.to_string());
    }
    row.push((r.ns_verdict == Verdict::Nonsmoothable).to_string());
    row.push(matches!(r.recipe_status, RecipeStatus::NoRecipe).to_string());
    row.push(r.recipe_status.to_string());
    row
}

fn compare_classes(fixture: &ClassFixture, records: &[ClassRecord], d: &mut Differ) {
    d.cmp("*", "row_count", fixture.rows.len(), records.len());
    for (e, a) in fixture.rows.iter().zip(records) {
        let row = e.label.as_str();
        let c = a.class.counts();
        d.cmp(row, "label", e.label.as_str(), a.label.as_str());
        d.cmp(row, "fix_count", e.fix_count, a.fix_count);
        d.cmp(row, "m_plus", e.m_plus, c[0]);
        d.cmp(row, "m_minus", e.m_minus, c[1]);
        d.cmp(row, "b2G", e.b2_g, a.b2_g);
        d.cmp(row, "bpG", e.b_plus_g, a.b_plus_g);
        d.cmp(row, "bmG", e.b_minus_g, a.b_minus_g);
        if let Some(s) = e.sign_quotient {
            d.cmp(row, "sign_quotient", s, a.sign_quotient);
        }
        d.cmp(row, "ns", e.ns, a.ns_verdict == Verdict::Nonsmoothable);
        d.cmp(row, "no_rep", e.no_rep, matches!(a.recipe_status, RecipeStatus::NoRecipe));
    }
}

/// Recomputes one reference table and diffs it cell by cell.
pub fn run_table(which: TableName, workers: Option<usize>) -> Result<TableReport> {
    let options = EnumOptions { workers, ..EnumOptions::default() };
    let mut d = Differ::default();
    let (columns, rows) = match which {
        TableName::Table1 | TableName::Table2 | TableName::Table3 => {
            let fixture = class_fixture(which).expect("class table");
            let manifold = ManifoldInvariants::parse(&fixture.surface)?;
            let table = enumerate_classes(fixture.p, &manifold, &options)?;
            let with_sign = which == TableName::Table1;
            compare_classes(&fixture, &table.records, &mut d);
            let rows = table.records.iter().map(|r| class_row(r, with_sign)).collect();
            (class_columns(with_sign), rows)
        }
        TableName::Table4 => {
            let fixture = count_fixture();
            let ns: Vec<u32> = fixture.rows.iter().map(|r| r.n).collect();
            let computed = count_table_en(&ns, workers)?;
            let mut rows = Vec::new();
            for (e, &(n, total, ns, no_rep)) in fixture.rows.iter().zip(&computed) {
                let row = format!("n={n}");
                d.cmp(&row, "total", e.total, total);
                d.cmp(&row, "ns", e.ns, ns);
                d.cmp(&row, "no_rep", e.no_rep, no_rep);
                rows.push(vec![n.to_string(), total.to_string(), ns.to_string(), no_rep.to_string()]);
            }
            let columns = ["n", "total", "ns", "no_rep"].map(String::from).to_vec();
            (columns, rows)
        }
        TableName::Z5counts | TableName::Z7counts => {
            let fixture = summary_fixture(which).expect("summary table");
            let manifold = ManifoldInvariants::parse(&fixture.surface)?;
            let s = enumerate_classes(fixture.p, &manifold, &options)?.summary;
            d.cmp("summary", "total", fixture.total, s.total);
            if let Some(ns) = fixture.ns {
                d.cmp("summary", "ns", ns, s.ns);
            }
            if let Some(ht) = fixture.homologically_trivial {
                d.cmp("summary", "homologically_trivial", ht, s.homologically_trivial);
            }
            if let Some(htns) = fixture.homologically_trivial_ns {
                d.cmp("summary", "homologically_trivial_ns", htns, s.homologically_trivial_ns);
            }
            let pairs = [
                ("total", s.total),
                ("ns", s.ns),
                ("no_recipe", s.no_recipe),
                ("homologically_trivial", s.homologically_trivial),
                ("homologically_trivial_ns", s.homologically_trivial_ns),
                ("eigenspaces_nonnegative", s.eigenspaces_nonnegative),
                ("raw_admissible", s.raw_admissible),
            ];
            let rows = pairs.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect();
            (vec!["quantity".into(), "value".into()], rows)
        }
    };
    Ok(TableReport {
        version: crate::SCHEMA_VERSION,
        table: which.name().to_string(),
        columns,
        rows,
        diffs: d.diffs,
    })
}

/// Error used when a table run differs from its reference.
pub fn mismatch_error(report: &TableReport) -> Error {
    Error::Verification(format!("{} differs from the reference in {} cells", report.table, report.diffs.len()))
}
