use std::io::Write;

use serde::{Deserialize, Serialize};

/// One slow-time sample of one confirmed track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub target_id: u64,
    pub chirp_index: u64,
    pub t_slow: f64,
    pub bin: usize,
    pub raw_power_db: f64,
    pub recon_amp: f64,
    pub impulses: f64,
    pub envelope: f64,
    /// Latest rate decision at this sample.
    pub rate_bpm: Option<f64>,
    /// Latest presence decision at this sample.
    pub presence: bool,
}

pub const TRACE_CSV_HEADER: &str =
    "target_id,chirp_index,t_slow,bin,raw_power_db,recon_amp,impulses,envelope,rate_bpm,presence";

/// Rows as CSV; floats use the shortest representation that round-trips,
/// and a missing rate is an empty field.
pub fn write_trace_csv<W: Write>(mut out: W, rows: &[TraceRow]) -> std::io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for r in rows {
        write_trace_row(&mut out, r)?;
    }
    Ok(())
}

pub(crate) fn write_trace_row<W: Write>(out: &mut W, r: &TraceRow) -> std::io::Result<()> {
    write!(
        out,
        "{},{},{},{},{},{},{},{},",
        r.target_id,
        r.chirp_index,
        r.t_slow,
        r.bin,
        r.raw_power_db,
        r.recon_amp,
        r.impulses,
        r.envelope
    )?;
    if let Some(rate) = r.rate_bpm {
        write!(out, "{rate}")?;
    }
    writeln!(out, ",{}", r.presence)
}

/// Column view of one target's rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RespirationTrace {
    pub target_id: u64,
    pub t_slow: Vec<f64>,
    pub raw_power_db: Vec<f64>,
    pub recon_amp: Vec<f64>,
    pub impulses: Vec<f64>,
    pub envelope: Vec<f64>,
    pub rate_bpm: Vec<Option<f64>>,
    pub presence: Vec<bool>,
}

impl RespirationTrace {
    pub fn from_rows(rows: &[TraceRow], target_id: u64) -> Self {
        let mut t = Self {
            target_id,
            ..Default::default()
        };
        for r in rows.iter().filter(|r| r.target_id == target_id) {
            t.t_slow.push(r.t_slow);
            t.raw_power_db.push(r.raw_power_db);
            t.recon_amp.push(r.recon_amp);
            t.impulses.push(r.impulses);
            t.envelope.push(r.envelope);
            t.rate_bpm.push(r.rate_bpm);
            t.presence.push(r.presence);
        }
        t
    }

    pub fn len(&self) -> usize {
        self.t_slow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_slow.is_empty()
    }

    /// Last rate decision, if any.
    pub fn final_rate_bpm(&self) -> Option<f64> {
        self.rate_bpm.last().copied().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: u64, i: u64, rate: Option<f64>) -> TraceRow {
        TraceRow {
            target_id: id,
            chirp_index: i,
            t_slow: i as f64 * 1e-3,
            bin: 80,
            raw_power_db: 41.5,
            recon_amp: 0.25,
            impulses: 0.0,
            envelope: 0.125,
            rate_bpm: rate,
            presence: rate.is_some(),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[row(2, 7, None), row(2, 8, Some(15.5))]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], TRACE_CSV_HEADER);
        assert_eq!(lines[1], "2,7,0.007,80,41.5,0.25,0,0.125,,false");
        assert_eq!(lines[2], "2,8,0.008,80,41.5,0.25,0,0.125,15.5,true");
    }

    #[test]
    fn columns_per_target() {
        let rows = vec![row(0, 0, None), row(1, 0, None), row(0, 1, Some(12.0))];
        let t = RespirationTrace::from_rows(&rows, 0);
        assert_eq!(t.len(), 2);
        assert_eq!(t.final_rate_bpm(), Some(12.0));
        assert!(RespirationTrace::from_rows(&rows, 5).is_empty());
    }
}
