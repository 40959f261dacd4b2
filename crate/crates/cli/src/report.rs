use std::fs::File;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::ser::{Serialize, SerializeSeq, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA: &str = "balanced-lab/1";

/// A float serialized with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            String::new()
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(self.text())
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

/// `x0`, which may be infinite.
#[derive(Debug, Clone, Copy)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            Num(self.0).serialize(s)
        }
    }
}

/// Complex coordinates as `[re, im]` pairs.
#[derive(Debug, Clone)]
pub struct Coords(pub Vec<Complex64>);

impl Serialize for Coords {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for z in &self.0 {
            seq.serialize_element(&[Num(z.re), Num(z.im)])?;
        }
        seq.end()
    }
}

pub fn nums(values: &[f64]) -> Vec<Num> {
    values.iter().copied().map(Num).collect()
}

fn sink(out: &str) -> io::Result<Box<dyn Write>> {
    Ok(if out == "-" {
        Box::new(io::stdout().lock())
    } else {
        Box::new(File::create(out)?)
    })
}

pub fn write_json<T: Serialize>(out: &str, report: &T) -> io::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()
}

pub fn write_csv(out: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}
