//! Output format: `#`-prefixed metadata lines, one header row, then
//! comma-separated records with LF endings. Reals carry 17 significant
//! digits; fields that do not apply to a run are left empty.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub const RESULT_COLUMNS: [&str; 12] = [
    "t",
    "re_exact",
    "im_exact",
    "re_protocol",
    "im_protocol",
    "identity_residual",
    "re_estimate",
    "re_stderr",
    "re_band",
    "im_estimate",
    "im_stderr",
    "n_shots",
];

pub const DRESSING_COLUMNS: [&str; 4] = ["r_um", "j_off_mhz", "j_on_mhz", "inverted"];

/// Metadata written ahead of every table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Header {
    pub command: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    /// Extra `key: value` lines, in order.
    pub extra: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str, config_bytes: &[u8]) -> Self {
        Self {
            command: command.to_owned(),
            config_sha256: hex::encode(Sha256::digest(config_bytes)),
            seed: None,
            generator: None,
            extra: Vec::new(),
        }
    }

    fn write(&self, out: &mut String) {
        let _ = writeln!(out, "# otoc {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# config_sha256: {}", self.config_sha256);
        match self.seed {
            Some(seed) => {
                let _ = writeln!(out, "# seed: {seed}");
            }
            None => out.push_str("# seed: none\n"),
        }
        let _ = writeln!(out, "# generator: {}", self.generator.as_deref().unwrap_or("none"));
        for (key, value) in &self.extra {
            let _ = writeln!(out, "# {key}: {value}");
        }
    }
}

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// One time point of an exact or sampled run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResultRow {
    pub t: f64,
    pub re_exact: f64,
    pub im_exact: f64,
    pub re_protocol: Option<f64>,
    pub im_protocol: Option<f64>,
    pub identity_residual: Option<f64>,
    pub re_estimate: Option<f64>,
    pub re_stderr: Option<f64>,
    pub re_band: Option<f64>,
    pub im_estimate: Option<f64>,
    pub im_stderr: Option<f64>,
    pub n_shots: Option<u64>,
}

impl ResultRow {
    fn fields(&self) -> [String; 12] {
        [
            real(self.t),
            real(self.re_exact),
            real(self.im_exact),
            opt_real(self.re_protocol),
            opt_real(self.im_protocol),
            opt_real(self.identity_residual),
            opt_real(self.re_estimate),
            opt_real(self.re_stderr),
            opt_real(self.re_band),
            opt_real(self.im_estimate),
            opt_real(self.im_stderr),
            self.n_shots.map(|n| n.to_string()).unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressingRow {
    pub r: f64,
    pub j_off: f64,
    pub j_on: Option<f64>,
    pub inverted: Option<bool>,
}

fn table<'a>(header: &Header, columns: &[&str], rows: impl Iterator<Item = Vec<String>> + 'a) -> String {
    let mut out = String::new();
    header.write(&mut out);
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_results(header: &Header, rows: &[ResultRow]) -> String {
    table(header, &RESULT_COLUMNS, rows.iter().map(|r| r.fields().to_vec()))
}

pub fn render_dressing(header: &Header, rows: &[DressingRow]) -> String {
    table(
        header,
        &DRESSING_COLUMNS,
        rows.iter().map(|row| {
            vec![
                real(row.r),
                real(row.j_off),
                opt_real(row.j_on),
                row.inverted.map(|b| b.to_string()).unwrap_or_default(),
            ]
        }),
    )
}
