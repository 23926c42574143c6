//! CSV emission. Floats are printed with 12 significant digits.

use std::fs::File;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::run::{EpisodeResult, SummaryRow};

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-5 ≤ |x| < 1e12`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn rounds_header(p: usize) -> Vec<String> {
    let mut h: Vec<String> = ["run_id", "seed", "agent", "t", "omega", "cost", "cum_cost"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=p).map(|i| format!("theta_hat_{i}")));
    h.push("radius".into());
    h.push("flags".into());
    h
}

pub fn summary_header(p: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "run_id",
        "agent",
        "seed",
        "total_cost",
        "mean_round_cost",
        "fallback_rounds",
        "ambiguous_rounds",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((1..=p).map(|i| format!("final_theta_hat_{i}")));
    h.push("final_radius".into());
    h
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

/// One row per round per agent per seed, in episode order. `omega` is 1-based.
pub fn write_rounds(path: &Path, run_id: &str, p: usize, episodes: &[EpisodeResult]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(rounds_header(p))
        .map_err(|e| csv_err(path, e))?;
    for ep in episodes {
        for r in &ep.records {
            let mut row = vec![
                run_id.to_string(),
                ep.seed.to_string(),
                r.agent.clone(),
                r.t.to_string(),
                (r.omega + 1).to_string(),
                fmt_num(r.cost),
                fmt_num(r.cum_cost),
            ];
            match &r.theta_hat {
                Some(th) => row.extend(th.iter().map(|&v| fmt_num(v))),
                None => row.extend(std::iter::repeat_n(String::new(), p)),
            }
            row.push(opt_num(r.radius));
            let mut flags = Vec::new();
            if r.is_exploration() {
                flags.push("explore");
            }
            if r.fallback_flag {
                flags.push("fallback");
            }
            if r.ambiguity_flag {
                flags.push("ambiguous");
            }
            row.push(flags.join(";"));
            w.write_record(&row).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_summary(path: &Path, p: usize, rows: &[SummaryRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(summary_header(p))
        .map_err(|e| csv_err(path, e))?;
    for s in rows {
        let mut row = vec![
            s.run_id.clone(),
            s.agent.clone(),
            s.seed.to_string(),
            fmt_num(s.total_cost),
            fmt_num(s.mean_round_cost),
            s.fallback_rounds.to_string(),
            s.ambiguous_rounds.to_string(),
        ];
        match &s.final_theta_hat {
            Some(th) => row.extend(th.iter().map(|&v| fmt_num(v))),
            None => row.extend(std::iter::repeat_n(String::new(), p)),
        }
        row.push(opt_num(s.final_radius));
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Writes `records` under `header` with the given field formatter.
pub fn write_table<T>(
    path: &Path,
    header: &[&str],
    records: &[T],
    fields: impl Fn(&T) -> Vec<String>,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in records {
        w.write_record(fields(r)).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(9.438552410975099), "9.43855241098");
        assert_eq!(fmt_num(-1.2957980714095747), "-1.29579807141");
        assert_eq!(fmt_num(1234567.891234567), "1234567.89123");
        assert_eq!(fmt_num(1.5e-7), "1.5e-7");
        assert_eq!(fmt_num(2.0e13), "2e13");
        assert_eq!(fmt_num(9.9999999999995), "10");
        assert_eq!(fmt_num(0.0001), "0.0001");
    }

    #[test]
    fn headers_are_stable() {
        assert_eq!(
            rounds_header(2).join(","),
            "run_id,seed,agent,t,omega,cost,cum_cost,theta_hat_1,theta_hat_2,radius,flags"
        );
        assert_eq!(
            summary_header(2).join(","),
            "run_id,agent,seed,total_cost,mean_round_cost,fallback_rounds,ambiguous_rounds,final_theta_hat_1,final_theta_hat_2,final_radius"
        );
    }
}
