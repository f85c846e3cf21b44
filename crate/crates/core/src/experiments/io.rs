use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::record::ExperimentRecord;
use crate::asymptotics::EllSample;
use crate::error::{KacError, Result};

/// First line of every CSV table.
pub const SCHEMA_HEADER: &str = "# kaczeros-schema v1";
const SCHEMA_VERSION: &str = "kaczeros-schema v1";

/// Seventeen significant digits, enough to round-trip any `f64`.
fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn parse_f64(field: &str, column: &str) -> Result<f64> {
    field.parse().map_err(|_| {
        KacError::Config(format!(
            "column {column}: cannot parse {field:?} as a number"
        ))
    })
}

fn parse_int<T: std::str::FromStr>(field: &str, column: &str) -> Result<T> {
    field.parse().map_err(|_| {
        KacError::Config(format!(
            "column {column}: cannot parse {field:?} as an integer"
        ))
    })
}

pub fn write_csv<W: Write>(out: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{SCHEMA_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ExperimentRecord::COLUMNS)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.model.to_string(),
            r.region.to_string(),
            r.method.to_string(),
            fmt_f64(r.value),
            fmt_f64(r.err),
            r.trials.to_string(),
            r.seed.to_string(),
            fmt_f64(r.wall_time_ms),
            r.suspect_fraction.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_HEADER {
        return Err(KacError::Config(format!(
            "missing schema line {SCHEMA_HEADER:?}, found {:?}",
            first.trim_end()
        )));
    }
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(ExperimentRecord::COLUMNS) {
        return Err(KacError::Config(format!(
            "unexpected CSV columns {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let col = |i: usize| rec.get(i).unwrap_or("");
        let c = ExperimentRecord::COLUMNS;
        rows.push(ExperimentRecord {
            n: parse_int(col(0), c[0])?,
            model: col(1).parse()?,
            region: col(2).parse()?,
            method: col(3).parse()?,
            value: parse_f64(col(4), c[4])?,
            err: parse_f64(col(5), c[5])?,
            trials: parse_int(col(6), c[6])?,
            seed: parse_int(col(7), c[7])?,
            wall_time_ms: parse_f64(col(8), c[8])?,
            suspect_fraction: match col(9) {
                "" => None,
                s => Some(parse_f64(s, c[9])?),
            },
        });
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    schema: String,
    records: Vec<ExperimentRecord>,
}

pub fn write_json<W: Write>(mut out: W, records: &[ExperimentRecord]) -> Result<()> {
    let table = JsonTable {
        schema: SCHEMA_VERSION.to_string(),
        records: records.to_vec(),
    };
    serde_json::to_writer_pretty(&mut out, &table)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let table: JsonTable = serde_json::from_reader(input)?;
    if table.schema != SCHEMA_VERSION {
        return Err(KacError::Config(format!(
            "unsupported schema {:?}",
            table.schema
        )));
    }
    Ok(table.records)
}

pub fn write_csv_file(path: impl AsRef<Path>, records: &[ExperimentRecord]) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_csv(f, records)
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    read_csv(std::fs::File::open(path)?)
}

/// Plot-ready `l` table: `x, ell, density`.
pub fn write_ell_table<W: Write>(out: W, samples: &[EllSample]) -> Result<()> {
    let mut out = out;
    writeln!(out, "{SCHEMA_HEADER}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "ell", "density"])?;
    for s in samples {
        w.write_record([fmt_f64(s.x), fmt_f64(s.ell), fmt_f64(s.density)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::CoefficientModel;
    use crate::experiments::record::Method;
    use crate::moments::RegionSpec;

    fn rows() -> Vec<ExperimentRecord> {
        vec![
            ExperimentRecord {
                n: 64,
                model: CoefficientModel::fractional(0.3).unwrap(),
                region: RegionSpec::PositiveAxis,
                method: Method::Montecarlo,
                value: 1.0 / 3.0,
                err: 2.0f64.sqrt() * 1e-3,
                trials: 10_000,
                seed: u64::MAX,
                wall_time_ms: 12.5,
                suspect_fraction: Some(0.0),
            },
            ExperimentRecord {
                n: 1,
                model: CoefficientModel::LimitZero,
                region: RegionSpec::All,
                method: Method::Quadrature,
                value: 0.0,
                err: 5e-324,
                trials: 0,
                seed: 0,
                wall_time_ms: 0.0,
                suspect_fraction: None,
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# kaczeros-schema v1\nn,model,region,method,value,err,trials,seed,wall_time_ms,suspect_fraction\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut buf = Vec::new();
        write_json(&mut buf, &rows()).unwrap();
        assert_eq!(read_json(&buf[..]).unwrap(), rows());
    }

    #[test]
    fn missing_schema_line_is_rejected() {
        let text = "n,model\n1,limit-zero\n";
        assert!(read_csv(text.as_bytes()).is_err());
    }
}
