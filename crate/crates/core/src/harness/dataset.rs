//! Event collections and their JSON / CSV files.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::synth::SyntheticConfig;
use crate::encoding::{Matrix, RawEvent, TurnLabel};
use crate::{check_format_version, CttmError, Result, FORMAT_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DatasetProvenance {
    Synthetic { config: SyntheticConfig },
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub format_version: u32,
    pub provenance: DatasetProvenance,
    pub events: Vec<RawEvent>,
}

impl Dataset {
    pub fn new(events: Vec<RawEvent>, provenance: DatasetProvenance) -> Result<Dataset> {
        let ds = Dataset {
            format_version: FORMAT_VERSION,
            provenance,
            events,
        };
        ds.validate()?;
        Ok(ds)
    }

    /// Non-empty events with a common channel count, unique ids, and both
    /// labels present.
    pub fn validate(&self) -> Result<()> {
        check_format_version(self.format_version)?;
        let first = self
            .events
            .first()
            .ok_or_else(|| CttmError::InvalidInput("dataset has no events".into()))?;
        let channels = first.channels();
        if channels == 0 {
            return Err(CttmError::InvalidInput("events have no channels".into()));
        }
        let mut ids = std::collections::HashSet::new();
        for e in &self.events {
            if e.is_empty() || e.channels() != channels {
                return Err(CttmError::InvalidInput(format!(
                    "event {} must have at least one sample of {channels} channels",
                    e.event_id
                )));
            }
            if !ids.insert(e.event_id) {
                return Err(CttmError::InvalidInput(format!("duplicate event id {}", e.event_id)));
            }
            if e.samples.as_slice().iter().any(|v| !v.is_finite()) {
                return Err(CttmError::NumericDomain(format!("event {} has non-finite samples", e.event_id)));
            }
        }
        let gives = self.events.iter().filter(|e| e.label.is_give()).count();
        if gives == 0 || gives == self.events.len() {
            return Err(CttmError::InvalidInput("dataset must contain both labels".into()));
        }
        Ok(())
    }

    pub fn channels(&self) -> usize {
        self.events.first().map_or(0, RawEvent::channels)
    }

    /// Sorted distinct subject ids.
    pub fn subjects(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.events.iter().map(|e| e.subject_id).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let give = self.events.iter().filter(|e| e.label.is_give()).count();
        (give, self.events.len() - give)
    }

    pub fn event(&self, id: u64) -> Option<&RawEvent> {
        self.events.iter().find(|e| e.event_id == id)
    }

    /// Load by extension: `.csv` or JSON otherwise.
    pub fn load(path: &Path) -> Result<Dataset> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            Self::load_csv(path)
        } else {
            Self::load_json(path)
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            self.save_csv(path)
        } else {
            self.save_json(path)
        }
    }

    pub fn load_json(path: &Path) -> Result<Dataset> {
        let ds: Dataset = serde_json::from_reader(BufReader::new(std::fs::File::open(path)?))?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut w, self)?;
        w.flush()?;
        Ok(())
    }

    /// Long format: a `# format_version=N` line, then one row per sample
    /// with columns `event_id,subject_id,label,t,ch0,...`.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(file, "# format_version={FORMAT_VERSION}")?;
        let mut w = csv::Writer::from_writer(file);
        let mut header = vec!["event_id".to_string(), "subject_id".into(), "label".into(), "t".into()];
        header.extend((0..self.channels()).map(|c| format!("ch{c}")));
        w.write_record(&header)?;
        for e in &self.events {
            for t in 0..e.len() {
                let mut rec = vec![
                    e.event_id.to_string(),
                    e.subject_id.to_string(),
                    e.label.as_u8().to_string(),
                    t.to_string(),
                ];
                rec.extend(e.samples.row(t).iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Rows of one event must be contiguous and in `t` order.
    pub fn load_csv(path: &Path) -> Result<Dataset> {
        let mut reader = BufReader::new(std::fs::File::open(path)?);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let version = first
            .trim()
            .strip_prefix("# format_version=")
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| CttmError::InvalidInput("CSV must start with '# format_version=N'".into()))?;
        check_format_version(version)?;

        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        let fixed = ["event_id", "subject_id", "label", "t"];
        if headers.len() <= fixed.len() || headers.iter().zip(fixed).any(|(h, f)| h != f) {
            return Err(CttmError::InvalidInput(format!(
                "CSV header must begin with {} and at least one channel",
                fixed.join(",")
            )));
        }
        let channels = headers.len() - fixed.len();
        let mut order: Vec<u64> = Vec::new();
        let mut acc: BTreeMap<u64, (u32, TurnLabel, Vec<f64>, usize)> = BTreeMap::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| CttmError::InvalidInput(format!("CSV row {}: bad {what}", line + 1));
            let id: u64 = rec[0].parse().map_err(|_| bad("event_id"))?;
            let subject: u32 = rec[1].parse().map_err(|_| bad("subject_id"))?;
            let label = TurnLabel::try_from(rec[2].parse::<u8>().map_err(|_| bad("label"))?)?;
            let t: usize = rec[3].parse().map_err(|_| bad("t"))?;
            let entry = acc.entry(id).or_insert_with(|| {
                order.push(id);
                (subject, label, Vec::new(), 0)
            });
            if entry.0 != subject || entry.1 != label || entry.3 != t {
                return Err(bad("event row (inconsistent subject/label or t out of order)"));
            }
            for c in 0..channels {
                entry.2.push(rec[4 + c].parse().map_err(|_| bad("sample value"))?);
            }
            entry.3 += 1;
        }
        let mut events = Vec::with_capacity(order.len());
        for id in order {
            let (subject_id, label, data, rows) = acc.remove(&id).expect("inserted above");
            events.push(RawEvent {
                event_id: id,
                subject_id,
                label,
                samples: Matrix::from_vec(rows, channels, data)?,
            });
        }
        Dataset::new(
            events,
            DatasetProvenance::File {
                path: path.display().to_string(),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        let ev = |id, subject, label, v: f64| RawEvent {
            event_id: id,
            subject_id: subject,
            label,
            samples: Matrix::from_rows(&[vec![v, 0.5], vec![v + 0.25, -1.0]]).unwrap(),
        };
        Dataset::new(
            vec![ev(1, 0, TurnLabel::Give, 1.0), ev(2, 1, TurnLabel::Keep, 0.1)],
            DatasetProvenance::File { path: "x".into() },
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip() {
        let ds = tiny();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        ds.save(&p).unwrap();
        let back = Dataset::load(&p).unwrap();
        assert_eq!(back.events, ds.events);
    }

    #[test]
    fn json_round_trip() {
        let ds = tiny();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.json");
        ds.save(&p).unwrap();
        assert_eq!(Dataset::load(&p).unwrap(), ds);
    }

    #[test]
    fn version_mismatch_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        std::fs::write(&p, "# format_version=9\nevent_id,subject_id,label,t,ch0\n").unwrap();
        assert!(matches!(Dataset::load(&p), Err(CttmError::FormatVersion { found: 9, .. })));
    }

    #[test]
    fn single_label_rejected() {
        let mut ds = tiny();
        ds.events[1].label = TurnLabel::Give;
        assert!(ds.validate().is_err());
    }
}
