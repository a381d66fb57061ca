//! Plain-text interchange: weight vectors and correlation matrices round-trip
//! through CSV with a `# T=<int> kind=<string>` header line, and density
//! tables are written as `x, rho` CSV with a full-precision parameter header.

use std::io::{BufRead, Write};

use crate::bulk::BulkLaw;
use crate::error::CoreError;
use crate::matrix::SymMatrix;
use crate::model::{CorrKind, CorrelationModel, PoolWeights};
use crate::scalar::Scalar;
use crate::Result;

/// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt<S: Scalar>(x: S) -> String {
    format!("{:.16e}", x)
}

fn parse<S: Scalar>(tok: &str) -> Result<S> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|e| CoreError::invalid(format!("bad numeric field {tok:?}: {e}")))?;
    Ok(S::of(v))
}

fn header_line(t: usize, kind: &str) -> String {
    format!("# T={t} kind={kind}")
}

fn parse_header(line: &str) -> Result<(usize, String)> {
    let rest = line
        .strip_prefix('#')
        .ok_or_else(|| CoreError::invalid("missing `# T=<int> kind=<string>` header"))?
        .trim();
    let mut t = None;
    let mut kind = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("T=") {
            t = Some(
                v.parse::<usize>()
                    .map_err(|e| CoreError::invalid(format!("bad T in header: {e}")))?,
            );
        } else if let Some(v) = tok.strip_prefix("kind=") {
            kind = Some(v.to_string());
        }
    }
    match (t, kind) {
        (Some(t), Some(kind)) => Ok((t, kind)),
        _ => Err(CoreError::invalid(
            "header must contain both T=<int> and kind=<string>",
        )),
    }
}

/// Writes a weight vector as one CSV row after the header.
pub fn write_weights<S: Scalar, W: Write>(out: &mut W, w: &PoolWeights<S>) -> Result<()> {
    writeln!(out, "{}", header_line(w.t(), w.label().as_str()))
        .map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    let row: Vec<String> = w.as_slice().iter().map(|&x| fmt(x)).collect();
    writeln!(out, "{}", row.join(","))
        .map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    Ok(())
}

/// Reads a weight vector written by [`write_weights`].
pub fn read_weights<S: Scalar, R: BufRead>(input: R) -> Result<PoolWeights<S>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::invalid("empty weights file"))?
        .map_err(|e| CoreError::invalid(format!("read failed: {e}")))?;
    let (t, _kind) = parse_header(&header)?;
    let row = lines
        .next()
        .ok_or_else(|| CoreError::invalid("weights file has no data row"))?
        .map_err(|e| CoreError::invalid(format!("read failed: {e}")))?;
    let w: Vec<S> = row.split(',').map(parse::<S>).collect::<Result<Vec<_>>>()?;
    if w.len() != t {
        return Err(CoreError::invalid(format!(
            "weights row has {} entries, header says T = {t}",
            w.len()
        )));
    }
    PoolWeights::custom(w)
}

/// Writes a correlation matrix as `T` CSV rows after the header.
pub fn write_correlation<S: Scalar, W: Write>(
    out: &mut W,
    model: &CorrelationModel<S>,
) -> Result<()> {
    let kind = match model.kind() {
        CorrKind::Prefix { .. } => "prefix",
        CorrKind::Spiked { .. } => "spiked",
        CorrKind::Custom => "custom",
    };
    writeln!(out, "{}", header_line(model.t(), kind))
        .map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    for i in 0..model.t() {
        let row: Vec<String> = model.matrix().row(i).iter().map(|&x| fmt(x)).collect();
        writeln!(out, "{}", row.join(","))
            .map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    }
    Ok(())
}

/// Reads a correlation matrix written by [`write_correlation`]; the matrix is
/// re-validated (symmetry, PSD) on the way in.
pub fn read_correlation<S: Scalar, R: BufRead>(input: R) -> Result<CorrelationModel<S>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::invalid("empty correlation file"))?
        .map_err(|e| CoreError::invalid(format!("read failed: {e}")))?;
    let (t, _kind) = parse_header(&header)?;
    let mut data = Vec::with_capacity(t * t);
    for _ in 0..t {
        let row = lines
            .next()
            .ok_or_else(|| CoreError::invalid(format!("expected {t} matrix rows")))?
            .map_err(|e| CoreError::invalid(format!("read failed: {e}")))?;
        let vals: Vec<S> = row.split(',').map(parse::<S>).collect::<Result<Vec<_>>>()?;
        if vals.len() != t {
            return Err(CoreError::invalid(format!(
                "matrix row has {} entries, header says T = {t}",
                vals.len()
            )));
        }
        data.extend(vals);
    }
    CorrelationModel::custom(SymMatrix::from_row_major(t, data)?)
}

/// Writes a sampled density as CSV columns `x, rho` with a comment header
/// recording the law's parameters at full precision.
pub fn write_density<S: Scalar, W: Write>(out: &mut W, law: &BulkLaw<S>, eta: S) -> Result<()> {
    writeln!(
        out,
        "# delta={} gamma={} kappa={} eta={} lambda_plus={}",
        fmt(law.params.delta),
        fmt(law.params.gamma),
        fmt(law.params.kappa),
        fmt(eta),
        fmt(law.edge_right)
    )
    .map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    writeln!(out, "x,rho").map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    for (x, rho) in law.grid.iter().zip(&law.density) {
        writeln!(out, "{},{}", fmt(*x), fmt(*rho))
            .map_err(|e| CoreError::invalid(format!("write failed: {e}")))?;
    }
    Ok(())
}
