//! Machine-readable output helpers: profile key-value blocks, CSV assembly,
//! and stable float formatting.

use crate::error::{Error, Result};
use crate::profiles::{CuspMetric, ProfileVariant, UProfile};
use crate::real::Real;

/// Shortest round-trip decimal form; identical across runs for identical
/// inputs, so artifacts are byte-reproducible.
pub fn fmt_float<T: Real>(x: T) -> String {
    match x.to_f64() {
        Some(v) if v.is_finite() => format!("{v}"),
        Some(v) if v.is_infinite() && v > 0.0 => "inf".into(),
        Some(v) if v.is_infinite() => "-inf".into(),
        _ => "nan".into(),
    }
}

/// Serialize a metric as the flat key-value block
/// (`variant`, `alpha`, `epsilon0`, `kappa`, `a`).
pub fn profile_kv_block<T: Real>(metric: &CuspMetric<T>) -> String {
    let p = &metric.profile;
    let variant = match p.variant {
        ProfileVariant::PureLog => "pure_log",
        ProfileVariant::Lemma22 => "lemma22",
        ProfileVariant::Remark24 => "remark24",
    };
    format!(
        "variant = {variant}\nalpha = {}\nepsilon0 = {}\nkappa = {}\na = {}\n",
        fmt_float(p.alpha),
        fmt_float(p.epsilon0),
        fmt_float(p.kappa),
        fmt_float(metric.a),
    )
}

/// Parse the flat key-value block produced by [`profile_kv_block`].
pub fn parse_profile_kv<T: Real>(text: &str) -> Result<CuspMetric<T>> {
    let mut variant = None;
    let mut alpha = T::zero();
    let mut epsilon0 = T::one();
    let mut kappa = crate::real::lit(0.9);
    let mut a = T::zero();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::WordSyntax(format!("line {}: missing '='", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let parse_num = |v: &str| -> Result<T> {
            v.parse::<f64>()
                .ok()
                .and_then(T::from_f64)
                .ok_or_else(|| Error::WordSyntax(format!("line {}: bad number {v:?}", lineno + 1)))
        };
        match key {
            "variant" => {
                variant = Some(match value {
                    "pure_log" => ProfileVariant::PureLog,
                    "lemma22" => ProfileVariant::Lemma22,
                    "remark24" => ProfileVariant::Remark24,
                    other => {
                        return Err(Error::WordSyntax(format!(
                            "line {}: unknown variant {other:?}",
                            lineno + 1
                        )))
                    }
                })
            }
            "alpha" => alpha = parse_num(value)?,
            "epsilon0" => epsilon0 = parse_num(value)?,
            "kappa" => kappa = parse_num(value)?,
            "a" => a = parse_num(value)?,
            other => {
                return Err(Error::WordSyntax(format!(
                    "line {}: unknown key {other:?}",
                    lineno + 1
                )))
            }
        }
    }
    let variant =
        variant.ok_or_else(|| Error::WordSyntax("missing required key 'variant'".into()))?;
    let profile = match variant {
        ProfileVariant::PureLog => UProfile::pure_log(),
        ProfileVariant::Lemma22 => UProfile::lemma22(alpha, epsilon0, kappa),
        ProfileVariant::Remark24 => UProfile::remark24(),
    };
    Ok(CuspMetric::new(a, profile))
}

/// Assemble a CSV document: one header row, then data rows.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_block_round_trips() {
        let metric = CuspMetric::new(2.5, UProfile::lemma22(1.5, 0.125, 0.9));
        let block = profile_kv_block(&metric);
        let parsed: CuspMetric<f64> = parse_profile_kv(&block).unwrap();
        assert_eq!(parsed.a, 2.5);
        assert_eq!(parsed.profile.alpha, 1.5);
        assert_eq!(parsed.profile.epsilon0, 0.125);
        assert_eq!(parsed.profile.variant, ProfileVariant::Lemma22);
    }

    #[test]
    fn kv_block_rejects_unknown_keys() {
        let err = parse_profile_kv::<f64>("variant = lemma22\nbogus = 1\n");
        assert!(err.is_err());
        let msg = format!("{}", err.unwrap_err());
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn floats_format_shortest() {
        assert_eq!(fmt_float(0.125f64), "0.125");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(1.0 / 3.0), "0.3333333333333333");
    }
}
