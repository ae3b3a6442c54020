use std::io::Write;

use crate::cfar::Detection;
use crate::pipeline::StreamSummary;
use crate::range::RangeProfile;

use super::recording::TruthSample;

pub const TRUTH_CSV_HEADER: &str = "time_s,displacement_m";

/// Ground truth as CSV. One target gives a `displacement_m` column; several
/// give `displacement_m_0`, `displacement_m_1`, ...
pub fn write_truth_csv<W: Write>(mut out: W, truth: &[TruthSample]) -> std::io::Result<()> {
    let targets = truth.first().map_or(1, |t| t.displacement_m.len());
    write!(out, "time_s")?;
    match targets {
        0 => {}
        1 => write!(out, ",displacement_m")?,
        n => {
            for i in 0..n {
                write!(out, ",displacement_m_{i}")?;
            }
        }
    }
    writeln!(out)?;
    for t in truth {
        write!(out, "{}", t.time_s)?;
        for d in &t.displacement_m {
            write!(out, ",{d}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// One JSON object per line.
pub fn write_detections_jsonl<W: Write>(mut out: W, detections: &[Detection]) -> std::io::Result<()> {
    for d in detections {
        serde_json::to_writer(&mut out, d)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_summary_json<W: Write>(mut out: W, summary: &StreamSummary) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)
}

/// Waterfall CSV matrix: rows are profiles, columns are range bins in dB.
pub fn write_waterfall_csv<'a, W, I>(out: W, profiles: I, bin_spacing_m: f64) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RangeProfile>,
{
    crate::range::write_profiles_csv(out, profiles, bin_spacing_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_columns() {
        let one = vec![
            TruthSample {
                time_s: 0.0,
                displacement_m: vec![0.0],
            },
            TruthSample {
                time_s: 0.001,
                displacement_m: vec![1.5e-4],
            },
        ];
        let mut buf = Vec::new();
        write_truth_csv(&mut buf, &one).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "time_s,displacement_m\n0,0\n0.001,0.00015\n"
        );
        let two = vec![TruthSample {
            time_s: 0.0,
            displacement_m: vec![0.0, 1.0],
        }];
        let mut buf = Vec::new();
        write_truth_csv(&mut buf, &two).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("time_s,displacement_m_0,displacement_m_1\n"));
    }

    #[test]
    fn detections_one_per_line() {
        let d = Detection {
            bin: 80,
            range_m: 2.0,
            power_db: 40.0,
            threshold_db: 20.0,
            chirp_index: 3,
            t_slow: 0.003,
        };
        let mut buf = Vec::new();
        write_detections_jsonl(&mut buf, &[d, d]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: Detection = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, d);
    }
}
