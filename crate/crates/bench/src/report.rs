//! CSV output of error records.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};

use crate::experiment::ErrorRecord;

pub const CSV_HEADER: [&str; 8] = [
    "mechanism",
    "n",
    "epsilon",
    "rep",
    "max_abs_error",
    "mean_abs_error",
    "runtime_ms",
    "clamped_count",
];

/// Reals are written with 17 significant digits, which round-trips every
/// `f64` exactly.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[ErrorRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.mechanism.name().to_string(),
            r.n.to_string(),
            real(r.epsilon),
            r.rep.to_string(),
            real(r.max_abs_error),
            real(r.mean_abs_error),
            real(r.runtime_ms),
            r.clamped_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[ErrorRecord], path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(records, std::io::BufWriter::new(file))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ErrorRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        bail!("unexpected CSV header {:?}", header);
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let f = |k: usize| row.get(k).with_context(|| format!("row {}: missing column {k}", i + 1));
        out.push(ErrorRecord {
            mechanism: f(0)?.parse()?,
            n: f(1)?.parse()?,
            epsilon: f(2)?.parse()?,
            rep: f(3)?.parse()?,
            max_abs_error: f(4)?.parse()?,
            mean_abs_error: f(5)?.parse()?,
            runtime_ms: f(6)?.parse()?,
            clamped_count: f(7)?.parse()?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mechanism;

    #[test]
    fn round_trip_is_exact() {
        let recs = vec![
            ErrorRecord {
                mechanism: Mechanism::OutputBaseline,
                n: 101,
                epsilon: 0.1,
                rep: 7,
                max_abs_error: 1.0 / 3.0,
                mean_abs_error: 1e-300,
                runtime_ms: 0.0,
                clamped_count: 4,
            },
            ErrorRecord {
                mechanism: Mechanism::Alg1,
                n: 5,
                epsilon: 2.0,
                rep: 0,
                max_abs_error: f64::MAX,
                mean_abs_error: 12345.678901234567,
                runtime_ms: 3.25,
                clamped_count: 0,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "mechanism,n,epsilon,rep,max_abs_error,mean_abs_error,runtime_ms,clamped_count\n"
        ));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
