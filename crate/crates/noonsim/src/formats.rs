//! On-disk formats. Every float is written with 17 significant digits
//! (`{:.16e}`), which round-trips `f64` exactly.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use noonsim_core::{Complex64, FockState, ModeUnitary, ScanResult};

/// `x` with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with floats as [`sig17`]; non-finite floats become `null`.
struct Sig17Formatter(PrettyFormatter<'static>);

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(sig17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialize to pretty JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, Sig17Formatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// `{"dim": n, "re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ModeUnitary> for MatrixJson {
    fn from(u: &ModeUnitary) -> Self {
        Self {
            dim: u.dim(),
            re: u.rows().map(|r| r.iter().map(|z| z.re).collect()).collect(),
            im: u.rows().map(|r| r.iter().map(|z| z.im).collect()).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_unitary(&self) -> Result<ModeUnitary, noonsim_core::Error> {
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        let shape_ok = self.re.len() == self.dim
            && self.im.len() == self.dim
            && self.re.iter().chain(&self.im).all(|r| r.len() == self.dim);
        if !shape_ok {
            return Err(noonsim_core::Error::MalformedMatrix {
                expected: self.dim * self.dim,
                found: self.re.iter().map(Vec::len).sum(),
            });
        }
        for (rr, ri) in self.re.iter().zip(&self.im) {
            entries.extend(rr.iter().zip(ri).map(|(&a, &b)| Complex64::new(a, b)));
        }
        ModeUnitary::new(self.dim, entries)
    }
}

pub fn matrix_to_json(u: &ModeUnitary) -> String {
    to_json(&MatrixJson::from(u))
}

pub fn matrix_from_json(text: &str) -> anyhow::Result<ModeUnitary> {
    let m: MatrixJson = serde_json::from_str(text)?;
    Ok(m.to_unitary()?)
}

/// One basis ket of a state dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KetRecord {
    pub occupation: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

/// Kets in lexicographic order.
pub fn state_records(s: &FockState) -> Vec<KetRecord> {
    s.iter()
        .map(|(k, a)| KetRecord {
            occupation: k.counts().to_vec(),
            re: a.re,
            im: a.im,
        })
        .collect()
}

pub fn state_to_json(s: &FockState) -> String {
    to_json(&state_records(s))
}

/// One line per ket: the occupation numbers, then real and imaginary part.
pub fn state_to_text(s: &FockState) -> String {
    let mut out = String::new();
    for r in state_records(s) {
        for n in &r.occupation {
            out.push_str(&n.to_string());
            out.push(' ');
        }
        out.push_str(&sig17(r.re));
        out.push(' ');
        out.push_str(&sig17(r.im));
        out.push('\n');
    }
    out
}

pub fn state_from_json(text: &str) -> anyhow::Result<FockState> {
    let records: Vec<KetRecord> = serde_json::from_str(text)?;
    let n_modes = records
        .first()
        .map(|r| r.occupation.len())
        .ok_or_else(|| anyhow::anyhow!("state dump has no kets"))?;
    Ok(FockState::from_amplitudes(
        n_modes,
        records
            .into_iter()
            .map(|r| (r.occupation, Complex64::new(r.re, r.im))),
    )?)
}

pub const SCAN_CSV_HEADER: &str = "phi,post_prob,parity,fidelity";

pub fn scan_to_csv(scan: &ScanResult) -> String {
    let mut out = String::from(SCAN_CSV_HEADER);
    out.push('\n');
    for r in &scan.rows {
        let fields = [r.phi, r.post_prob, r.parity, r.fidelity].map(sig17);
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Serialize)]
struct ScanRowJson {
    phi: f64,
    post_prob: f64,
    parity: f64,
    fidelity: f64,
}

#[derive(Debug, Serialize)]
struct ScanJson<'a, C: Serialize> {
    n: usize,
    rows: Vec<ScanRowJson>,
    config_echo: &'a C,
}

pub fn scan_to_json<C: Serialize>(scan: &ScanResult, config_echo: &C) -> String {
    to_json(&ScanJson {
        n: scan.n,
        rows: scan
            .rows
            .iter()
            .map(|r| ScanRowJson {
                phi: r.phi,
                post_prob: r.post_prob,
                parity: r.parity,
                fidelity: r.fidelity,
            })
            .collect(),
        config_echo,
    })
}

/// Generic two-or-more column CSV with a header and 17-digit floats.
pub fn table_to_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().copied().map(sig17).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}
