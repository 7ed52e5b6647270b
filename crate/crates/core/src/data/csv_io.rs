use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::time::SystemTime;

use super::{Center, ClinicalFlag, Dataset, Gender, Label, PadId, Provenance, Rgb8, StripSample, PAD_COUNT};
use crate::error::{Error, Result};

/// Leading non-color columns, in order.
const META_COLUMNS: [&str; 8] = ["id", "center", "age", "gender", "diabetes", "blood_pressure", "smoking", "pcr_label"];

/// Total column count: 8 metadata columns plus 33 channel columns.
pub const CSV_COLUMN_COUNT: usize = META_COLUMNS.len() + 3 * PAD_COUNT;

/// The exact header row, as owned strings.
pub fn csv_header() -> Vec<String> {
    let mut cols: Vec<String> = META_COLUMNS.iter().map(|s| s.to_string()).collect();
    for pad in PadId::ALL {
        for ch in ["R", "G", "B"] {
            cols.push(format!("{}_{}", pad.token(), ch));
        }
    }
    cols
}

/// A row dropped during lenient ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based line number in the source file (the header is line 1).
    pub line: u64,
    /// The row's id, if it could be read.
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RejectionReport {
    pub rejected: Vec<Rejection>,
}

impl RejectionReport {
    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["line", "id", "reason"]).expect("in-memory write");
        for r in &self.rejected {
            w.write_record([r.line.to_string(), r.id.clone().unwrap_or_default(), r.reason.clone()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

/// Result of ingestion: the accepted samples and what was dropped.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: Dataset,
    pub rejections: RejectionReport,
}

/// Reads and validates a sample CSV. In strict mode the first violation
/// aborts; otherwise offending rows are dropped and reported.
pub fn ingest_csv(path: impl AsRef<Path>, strict: bool) -> Result<Ingested> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut ingested = ingest_reader(file, strict)?;
    ingested.dataset.provenance = Provenance {
        source: path.to_path_buf(),
        ingested_at: SystemTime::now(),
    };
    Ok(ingested)
}

pub fn ingest_reader<R: Read>(reader: R, strict: bool) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let found: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::data(format!("cannot read header: {e}")))?
        .iter()
        .map(|s| s.trim().to_string())
        .collect();
    check_header(&found)?;

    let mut samples = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut rejections = RejectionReport::default();
    let columns = csv_header();

    for (i, record) in rdr.records().enumerate() {
        // header is line 1
        let line = i as u64 + 2;
        let sample = match record {
            Err(e) => Err((None, format!("unreadable record: {e}"))),
            Ok(rec) => {
                let id = rec.get(0).map(|s| s.trim().to_string()).filter(|s| !s.is_empty());
                match parse_row(&rec, &columns) {
                    Ok(s) if seen.contains(&s.id) => Err((id, format!("duplicate id '{}'", s.id))),
                    Ok(s) => Ok(s),
                    Err(msg) => Err((id, msg)),
                }
            }
        };
        match sample {
            Ok(s) => {
                seen.insert(s.id.clone());
                samples.push(s);
            }
            Err((id, msg)) => {
                if strict {
                    return Err(Error::data(format!("line {line}: {msg}")));
                }
                rejections.rejected.push(Rejection { line, id, reason: msg });
            }
        }
    }

    Ok(Ingested {
        dataset: Dataset {
            samples,
            provenance: Provenance::in_memory("<reader>"),
        },
        rejections,
    })
}

fn check_header(found: &[String]) -> Result<()> {
    let expected = csv_header();
    for (i, want) in expected.iter().enumerate() {
        match found.get(i) {
            Some(got) if got == want => {}
            Some(got) => {
                return Err(Error::data(format!("header column {} must be '{want}', found '{got}'", i + 1)));
            }
            None => return Err(Error::data(format!("missing column '{want}'"))),
        }
    }
    if found.len() > expected.len() {
        return Err(Error::data(format!("unexpected extra column '{}'", found[expected.len()])));
    }
    Ok(())
}

fn parse_row(rec: &csv::StringRecord, columns: &[String]) -> std::result::Result<StripSample, String> {
    if rec.len() != columns.len() {
        return Err(format!("expected {} fields, found {}", columns.len(), rec.len()));
    }
    let field = |i: usize| rec.get(i).unwrap_or("").trim();
    let named = |i: usize, e: Error| match e {
        Error::Data(m) | Error::InvalidInput(m) => format!("column {}: {m}", columns[i]),
        other => format!("column {}: {other}", columns[i]),
    };

    let id = field(0).to_string();
    if id.is_empty() {
        return Err("column id: empty id".to_string());
    }
    let center: Center = field(1).parse().map_err(|e| named(1, e))?;
    let age: u32 = field(2)
        .parse()
        .map_err(|_| format!("column age: unparsable age '{}'", field(2)))?;
    let gender: Gender = field(3).parse().map_err(|e| named(3, e))?;
    let diabetes: ClinicalFlag = field(4).parse().map_err(|e| named(4, e))?;
    let blood_pressure: ClinicalFlag = field(5).parse().map_err(|e| named(5, e))?;
    let smoking: ClinicalFlag = field(6).parse().map_err(|e| named(6, e))?;
    let pcr_label: Label = field(7).parse().map_err(|e| named(7, e))?;

    let mut pads = [Rgb8::default(); PAD_COUNT];
    for (p, pad) in pads.iter_mut().enumerate() {
        let mut ch = [0u8; 3];
        for (c, slot) in ch.iter_mut().enumerate() {
            let col = 8 + 3 * p + c;
            let raw = field(col);
            let v: i64 = raw
                .parse()
                .map_err(|_| format!("column {}: channel value '{raw}' is not an integer", columns[col]))?;
            if !(0..=255).contains(&v) {
                return Err(format!("column {}: value {v} outside [0,255]", columns[col]));
            }
            *slot = v as u8;
        }
        *pad = Rgb8::new(ch[0], ch[1], ch[2]);
    }

    Ok(StripSample {
        id,
        center,
        age,
        gender,
        diabetes,
        blood_pressure,
        smoking,
        pcr_label,
        pads,
    })
}

/// Writes a dataset in the ingestion schema.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let wrap = |e: csv::Error| Error::data(format!("csv write failed: {e}"));
    w.write_record(csv_header()).map_err(wrap)?;
    let mut row: Vec<String> = Vec::with_capacity(CSV_COLUMN_COUNT);
    for s in ds.samples() {
        row.clear();
        row.push(s.id.clone());
        row.push(s.center.code().to_string());
        row.push(s.age.to_string());
        row.push(s.gender.code().to_string());
        row.push(s.diabetes.code().to_string());
        row.push(s.blood_pressure.code().to_string());
        row.push(s.smoking.code().to_string());
        row.push(s.pcr_label.code().to_string());
        for px in s.pads {
            for c in px.channels() {
                row.push(c.to_string());
            }
        }
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::data(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Serializes a dataset to CSV text.
pub fn emit_csv(ds: &Dataset) -> String {
    let mut buf = Vec::new();
    write_csv(ds, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, label: &str, blood_r: &str) -> String {
        let mut cols = vec![id.to_string(), "B".into(), "41".into(), "M".into(), "0".into(), "NA".into(), "1".into(), label.into()];
        cols.push(blood_r.to_string());
        for _ in 1..33 {
            cols.push("120".into());
        }
        cols.join(",")
    }

    fn file(rows: &[String]) -> String {
        let mut s = csv_header().join(",");
        s.push('\n');
        for r in rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    #[test]
    fn header_has_41_columns_in_canonical_order() {
        let h = csv_header();
        assert_eq!(h.len(), 41);
        assert_eq!(h[8], "Blood_R");
        assert_eq!(h[10], "Blood_B");
        assert_eq!(h[40], "Leukocytes_B");
    }

    #[test]
    fn well_formed_three_rows() {
        let text = file(&[row("a", "1", "10"), row("b", "0", "20"), row("c", "1", "30")]);
        let ing = ingest_reader(text.as_bytes(), true).unwrap();
        assert_eq!(ing.dataset.len(), 3);
        assert!(ing.rejections.is_empty());
        let s = &ing.dataset.samples()[1];
        assert_eq!(s.id, "b");
        assert_eq!(s.center, Center::B);
        assert_eq!(s.blood_pressure, ClinicalFlag::Unknown);
        assert_eq!(s.pads[0], Rgb8::new(20, 120, 120));
    }

    #[test]
    fn strict_out_of_range_names_row_and_column() {
        let text = file(&[row("a", "1", "10"), row("b", "0", "300")]);
        let err = ingest_reader(text.as_bytes(), true).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("Blood_R"), "{err}");
    }

    #[test]
    fn lenient_drops_duplicate_id() {
        let text = file(&[row("a", "1", "10"), row("a", "0", "20"), row("c", "0", "30")]);
        let ing = ingest_reader(text.as_bytes(), false).unwrap();
        assert_eq!(ing.dataset.len(), 2);
        assert_eq!(ing.rejections.len(), 1);
        assert_eq!(ing.rejections.rejected[0].id.as_deref(), Some("a"));
        assert_eq!(ing.rejections.rejected[0].line, 3);
    }

    #[test]
    fn strict_duplicate_id_errors() {
        let text = file(&[row("a", "1", "10"), row("a", "0", "20")]);
        assert!(ingest_reader(text.as_bytes(), true).is_err());
    }

    #[test]
    fn renamed_column_is_rejected_even_when_lenient() {
        let text = file(&[row("a", "1", "10")]).replacen("Blood_R", "Blood_Red", 1);
        let err = ingest_reader(text.as_bytes(), false).unwrap_err().to_string();
        assert!(err.contains("Blood_R"), "{err}");
    }

    #[test]
    fn missing_column_is_rejected() {
        let text = file(&[]).replace(",Leukocytes_B", "");
        assert!(ingest_reader(text.as_bytes(), false).is_err());
    }

    #[test]
    fn bad_fields_are_reported() {
        let bad_age = row("a", "1", "10").replacen(",41,", ",4x,", 1);
        let bad_center = row("b", "1", "10").replacen(",B,", ",Z,", 1);
        let bad_label = row("c", "2", "10");
        let text = file(&[bad_age, bad_center, bad_label]);
        let ing = ingest_reader(text.as_bytes(), false).unwrap();
        assert_eq!(ing.dataset.len(), 0);
        let reasons: Vec<_> = ing.rejections.rejected.iter().map(|r| r.reason.clone()).collect();
        assert!(reasons[0].contains("age"));
        assert!(reasons[1].contains("center"));
        assert!(reasons[2].contains("pcr_label"));
        assert_eq!(ing.rejections.to_csv().lines().count(), 4);
    }

    #[test]
    fn emit_then_ingest_is_identity() {
        let text = file(&[row("a", "1", "10"), row("b", "0", "255")]);
        let ds = ingest_reader(text.as_bytes(), true).unwrap().dataset;
        let again = ingest_reader(emit_csv(&ds).as_bytes(), true).unwrap().dataset;
        assert_eq!(ds, again);
        assert_eq!(emit_csv(&ds), text);
    }
}
