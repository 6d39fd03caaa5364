//! Kernel files: `{"n": 2, "p": ["1/2","1/2"], "T": {"0,0,0": ["1/2","1/2"], ...}}`.

use std::fmt::Write as _;

use serde_json::Value;
use sha2::{Digest, Sha256};

use super::kernel::{tuples, TransitionKernel};
use super::prob::ProbVector;
use super::scalar::{fmt_scalar, parse_scalar, Scalar};
use crate::error::{Error, Result};

fn scalar_of(v: &Value, ctx: &str) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) => parse_scalar(&n.to_string()),
        _ => Err(Error::Parse(format!("{ctx}: expected a rational string"))),
    }
}

fn scalar_list(v: &Value, ctx: &str) -> Result<Vec<Scalar>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{ctx}: expected an array")))?
        .iter()
        .map(|x| scalar_of(x, ctx))
        .collect()
}

/// Parses a kernel file and its optional `p`.
pub fn parse_kernel_json(text: &str) -> Result<(TransitionKernel, Option<ProbVector>)> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let n = root
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer field \"n\"".into()))? as usize;
    if n < 2 {
        return Err(Error::AlphabetTooSmall(n));
    }
    let p = match root.get("p") {
        None | Some(Value::Null) => None,
        Some(v) => Some(ProbVector::new(scalar_list(v, "p")?)?),
    };
    let table = root
        .get("T")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Parse("missing object field \"T\"".into()))?;
    let mut entries = vec![None; n * n * n];
    for (key, row) in table {
        let idx: Vec<usize> = key
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("bad row key {key:?}")))?;
        if idx.len() != 3 || idx.iter().any(|&x| x >= n) {
            return Err(Error::Parse(format!("bad row key {key:?}")));
        }
        let values = scalar_list(row, key)?;
        if values.len() != n {
            return Err(Error::Parse(format!("row {key:?} has {} entries, expected {n}", values.len())));
        }
        entries[(idx[0] * n + idx[1]) * n + idx[2]] = Some(values);
    }
    let mut flat = Vec::with_capacity(n * n * n * n);
    for (r, row) in entries.into_iter().enumerate() {
        let row = row.ok_or_else(|| {
            Error::Parse(format!("missing row \"{},{},{}\"", r / (n * n), (r / n) % n, r % n))
        })?;
        flat.extend(row);
    }
    let kernel = TransitionKernel::new(n, flat)?;
    if let Some(p) = &p {
        if p.n() != n {
            return Err(Error::AlphabetMismatch(p.n(), n));
        }
    }
    Ok((kernel, p))
}

/// Canonical serialisation: rows in `(a,b,c)` lexicographic order, values as
/// `"num/den"`.
pub fn kernel_to_json(kernel: &TransitionKernel, p: Option<&ProbVector>) -> String {
    let n = kernel.n();
    let quote = |xs: &[Scalar]| xs.iter().map(|x| format!("\"{}\"", fmt_scalar(x))).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"n\": {n},");
    if let Some(p) = p {
        let _ = writeln!(out, "  \"p\": [{}],", quote(p.entries()));
    }
    let _ = writeln!(out, "  \"T\": {{");
    let rows: Vec<String> = tuples(n, 3)
        .map(|t| format!("    \"{},{},{}\": [{}]", t[0], t[1], t[2], quote(kernel.row(t[0], t[1], t[2]))))
        .collect();
    let _ = writeln!(out, "{}", rows.join(",\n"));
    let _ = writeln!(out, "  }}");
    let _ = writeln!(out, "}}");
    out
}

/// SHA-256 of the canonical serialisation, hex encoded.
pub fn kernel_hash(kernel: &TransitionKernel) -> String {
    let digest = Sha256::digest(kernel_to_json(kernel, None).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
