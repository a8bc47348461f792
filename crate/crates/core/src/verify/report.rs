use serde::Serialize;
use thiserror::Error;

use super::VerificationRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot aggregate an empty set of records")]
pub struct EmptyCorpus;

/// Corpus-level rates in percent, mean IoU in percent and mean Hausdorff over
/// records with a finite distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusReport {
    pub n: usize,
    pub tse: f64,
    pub rge: f64,
    pub pe: f64,
    pub vpr: f64,
    pub iou: f64,
    pub hausdorff: Option<f64>,
    pub success: f64,
}

pub const COLUMNS: [&str; 7] = ["TSE", "RGE", "PE", "VPR", "IoU", "Hausdorff", "Success"];

pub fn aggregate(records: &[VerificationRecord]) -> Result<CorpusReport, EmptyCorpus> {
    if records.is_empty() {
        return Err(EmptyCorpus);
    }
    let n = records.len();
    let rate = |f: fn(&VerificationRecord) -> bool| 100.0 * records.iter().filter(|r| f(r)).count() as f64 / n as f64;
    let finite: Vec<f64> = records.iter().map(|r| r.hausdorff).filter(|h| h.is_finite()).collect();
    Ok(CorpusReport {
        n,
        tse: rate(|r| r.tse),
        rge: rate(|r| r.rge),
        pe: rate(|r| r.pe),
        vpr: rate(|r| r.vpr_pass),
        iou: 100.0 * records.iter().map(|r| r.iou).sum::<f64>() / n as f64,
        hausdorff: (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64),
        success: rate(|r| r.success),
    })
}

impl CorpusReport {
    /// Cells in column order: rates with two decimals, Hausdorff with four.
    pub fn cells(&self) -> [String; 7] {
        let pct = |x: f64| format!("{x:.2}");
        [
            pct(self.tse),
            pct(self.rge),
            pct(self.pe),
            pct(self.vpr),
            pct(self.iou),
            self.hausdorff.map_or_else(|| "-".to_owned(), |h| format!("{h:.4}")),
            pct(self.success),
        ]
    }
}

/// Aligned text table; a leading Model column appears only for several rows.
pub fn render_text(rows: &[(String, CorpusReport)]) -> String {
    let with_model = rows.len() > 1;
    let mut table: Vec<Vec<String>> = Vec::new();
    let mut header: Vec<String> = COLUMNS.iter().map(|c| c.to_string()).collect();
    if with_model {
        header.insert(0, "Model".into());
    }
    table.push(header);
    for (name, r) in rows {
        let mut row: Vec<String> = r.cells().to_vec();
        if with_model {
            row.insert(0, name.clone());
        }
        table.push(row);
    }
    let widths: Vec<usize> = (0..table[0].len()).map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| if with_model && c == 0 { format!("{v:<w$}", w = widths[c]) } else { format!("{v:>w$}", w = widths[c]) })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// CSV with the column set `TSE,RGE,PE,VPR,IoU,Hausdorff,Success`, prefixed by
/// `Model` only for several rows.
pub fn render_csv(rows: &[(String, CorpusReport)]) -> String {
    let with_model = rows.len() > 1;
    let mut out = String::new();
    if with_model {
        out.push_str("Model,");
    }
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for (name, r) in rows {
        if with_model {
            out.push_str(&csv_field(name));
            out.push(',');
        }
        out.push_str(&r.cells().join(","));
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// One JSON object per line.
pub fn records_jsonl(records: &[VerificationRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::super::PhysicsDetail;
    use super::*;
    use crate::tangram::TseReport;

    fn rec(vpr: bool, iou: f64) -> VerificationRecord {
        VerificationRecord {
            instance_id: "i".into(),
            tse: false,
            tse_report: TseReport::default(),
            rge: !vpr,
            rge_details: Vec::new(),
            pe: false,
            pe_detail: PhysicsDetail::default(),
            vpr_pass: vpr,
            iou,
            hausdorff: if vpr { 0.0 } else { f64::INFINITY },
            success: vpr,
        }
    }

    #[test]
    fn vpr_formatting_fixture() {
        let records: Vec<_> = (0..1000).map(|i| rec(i < 226, 1.0)).collect();
        let r = aggregate(&records).unwrap();
        assert_eq!(r.cells()[3], "22.60");
    }

    #[test]
    fn mean_iou_and_hausdorff() {
        let records = vec![rec(true, 1.0), rec(true, 0.5), rec(true, 0.5), rec(false, 0.0)];
        let r = aggregate(&records).unwrap();
        assert_eq!(r.cells()[4], "50.00");
        assert_eq!(r.hausdorff, Some(0.0));
        assert_eq!(aggregate(&[]), Err(EmptyCorpus));
    }

    #[test]
    fn all_pass() {
        let r = aggregate(&[rec(true, 1.0), rec(true, 1.0)]).unwrap();
        assert_eq!((r.tse, r.rge, r.pe, r.vpr, r.success), (0.0, 0.0, 0.0, 100.0, 100.0));
    }

    #[test]
    fn table_columns() {
        let r = aggregate(&[rec(true, 1.0)]).unwrap();
        let csv = render_csv(&[("m".into(), r.clone())]);
        assert_eq!(csv.lines().next().unwrap(), "TSE,RGE,PE,VPR,IoU,Hausdorff,Success");
        let multi = render_csv(&[("a".into(), r.clone()), ("b,c".into(), r.clone())]);
        assert!(multi.starts_with("Model,TSE,"));
        assert!(multi.contains("\"b,c\","));
        let text = render_text(&[("m".into(), r)]);
        assert!(text.lines().next().unwrap().ends_with("Success"));
    }
}
