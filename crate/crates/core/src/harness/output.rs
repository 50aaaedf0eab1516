//! CSV emission of round records.

use std::io::{BufRead, Write};

use super::RoundRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "algo,trial,t,arm,instant_psg,cum_pareto_regret,front_size,jaccard";

/// Formats like C's `%.9g`: nine significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-4 ≤ |v| < 1e9`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(records: &[RoundRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let ji = r.jaccard.map(format_sig9).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.algo,
            r.trial,
            r.t,
            r.arm,
            format_sig9(r.instant_psg),
            format_sig9(r.cum_pareto_regret),
            r.front_size,
            ji
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a file produced by [`write_csv`].
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<RoundRecord>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end() != CSV_HEADER {
        return Err(Error::Format(format!("unexpected CSV header '{header}'")));
    }
    let bad = |n: usize, what: &str| Error::Format(format!("CSV line {n}: bad {what}"));
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let n = i + 2;
        let f: Vec<&str> = line.trim_end().split(',').collect();
        if f.len() != 8 {
            return Err(Error::Format(format!(
                "CSV line {n}: expected 8 fields, got {}",
                f.len()
            )));
        }
        records.push(RoundRecord {
            algo: f[0].parse().map_err(|_| bad(n, "algo"))?,
            trial: f[1].parse().map_err(|_| bad(n, "trial"))?,
            t: f[2].parse().map_err(|_| bad(n, "t"))?,
            arm: f[3].parse().map_err(|_| bad(n, "arm"))?,
            instant_psg: f[4].parse().map_err(|_| bad(n, "instant_psg"))?,
            cum_pareto_regret: f[5].parse().map_err(|_| bad(n, "cum_pareto_regret"))?,
            front_size: f[6].parse().map_err(|_| bad(n, "front_size"))?,
            jaccard: if f[7].is_empty() {
                None
            } else {
                Some(f[7].parse().map_err(|_| bad(n, "jaccard"))?)
            },
        });
    }
    Ok(records)
}
