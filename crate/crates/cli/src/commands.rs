use std::fmt::Write as _;

use serde_json::{json, Value};
use trieshape::asym::{params, FourierCoeffs, RatioSpec, SymmetricFluctuations, Truncation};
use trieshape::exact::MomentTable;
use trieshape::mc::{joint_histogram, run, samples, whiten, write_raw_csv, MatrixSource};
use trieshape::{Error, Result};

use crate::args::{
    AsymArgs, Command, CompareArgs, ExactArgs, Format, HistArgs, SimulateArgs, WhitenArgs,
};
use crate::output::write_atomic;

/// Runs `cmd` and returns the text of its main output.
pub fn execute(cmd: &mut Command) -> Result<String> {
    // resolve defaults that depend on other flags so the echo shows them
    if let Command::Whiten(a) = cmd {
        a.source.get_or_insert(MatrixSource::default_for(a.run.n));
    }
    let line = cmd.config_line();
    let config = cmd.config_json();
    match cmd {
        Command::Exact(a) => exact(a, &line, config),
        Command::Asym(a) => asym(a, &line, config),
        Command::Simulate(a) => simulate(a, &line, config),
        Command::Whiten(a) => whiten_cmd(a, &line, config),
        Command::Hist(a) => hist(a, &line, config),
        Command::Compare(a) => compare(a, &line, config),
    }
}

fn utf8(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("writers emit UTF-8")
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn exact(a: &ExactArgs, line: &str, config: Value) -> Result<String> {
    let table = MomentTable::compute(a.p, a.nmax, a.precision)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf, Some(line))?;
            Ok(utf8(buf))
        }
        Format::Json => pretty(&json!({ "config": config, "table": table.to_json()? })),
    }
}

fn asym(a: &AsymArgs, line: &str, config: Value) -> Result<String> {
    let ratio = if a.irrational {
        Some(RatioSpec::Irrational)
    } else {
        a.ratio.as_deref().map(str::parse).transpose()?
    };
    let m = params(a.p, ratio)?;
    let trunc = Truncation {
        l_max: a.lmax,
        j_max: a.jmax,
        k_max: a.kmax,
        tol: a.tol,
    };

    if a.emit_f {
        if !m.is_symmetric() {
            return Err(Error::VariantUnavailable(
                "F(n) is only available at p = 1/2".into(),
            ));
        }
        if a.points == 0 {
            return Err(Error::InvalidParameter("points must be >= 1".into()));
        }
        let fl = SymmetricFluctuations::new(trunc)?;
        let samples = fl.correlation_samples(10.0, a.points);
        let stats = fl.correlation_period(a.points);
        return match a.output.format.unwrap_or(Format::Csv) {
            Format::Csv => {
                let mut s = format!("# config: {line}\nlog2n,F\n");
                for (x, f) in samples {
                    writeln!(s, "{x},{f}").unwrap();
                }
                Ok(s)
            }
            Format::Json => {
                let points: Vec<_> = samples
                    .iter()
                    .map(|(x, f)| json!({ "log2n": x, "F": f }))
                    .collect();
                pretty(&json!({
                    "config": config,
                    "period": stats,
                    "amplitude": stats.amplitude(),
                    "points": points,
                }))
            }
        };
    }

    let unavailable = |fam: &str| json!({ "family": fam, "available": false, "reason": "only available at p = 1/2" });
    let (families, g0_ratio, period) = if m.is_symmetric() {
        let fl = SymmetricFluctuations::new(trunc)?;
        let r = fl.g2.get(0).re / (fl.g1.get(0).re * fl.g3.get(0).re).sqrt();
        let period = fl.correlation_period(512);
        (
            vec![Some(fl.g1), Some(fl.g2), Some(fl.g3)],
            Some(r),
            Some(period),
        )
    } else {
        (
            vec![None, Some(FourierCoeffs::g2(&m, trunc)?), None],
            None,
            None,
        )
    };

    match a.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let coeffs: Vec<Value> = families
                .iter()
                .zip(["g1", "g2", "g3"])
                .map(|(c, name)| match c {
                    Some(c) => {
                        let mut v = c.to_json();
                        v["available"] = json!(true);
                        v
                    }
                    None => unavailable(name),
                })
                .collect();
            pretty(&json!({
                "config": config,
                "params": m,
                "g1": coeffs[0],
                "g2": coeffs[1],
                "g3": coeffs[2],
                "g0_ratio": g0_ratio,
                "period": period,
            }))
        }
        Format::Csv => {
            let mut s = format!("# config: {line}\nfamily,k,re,im\n");
            for c in families.iter().flatten() {
                for k in -(c.k_max as i64)..=c.k_max as i64 {
                    let g = c.get(k);
                    writeln!(s, "{},{k},{},{}", c.family, g.re, g.im).unwrap();
                }
            }
            Ok(s)
        }
    }
}

fn simulate(a: &SimulateArgs, line: &str, config: Value) -> Result<String> {
    let r = &a.run;
    let summary = run(r.n, r.p, r.trials, r.seed, r.threads)?;
    if let Some(path) = &a.raw_out {
        let shapes = samples(r.n, r.p, r.trials, r.seed, r.threads)?;
        let mut buf = Vec::new();
        write_raw_csv(&mut buf, &shapes, Some(line))?;
        write_atomic(path, &buf)?;
    }
    match a.output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut buf = Vec::new();
            summary.write_csv(&mut buf, Some(line))?;
            Ok(utf8(buf))
        }
        Format::Json => pretty(&json!({ "config": config, "summary": summary })),
    }
}

fn whiten_cmd(a: &WhitenArgs, line: &str, config: Value) -> Result<String> {
    let r = &a.run;
    let report = whiten(r.n, r.p, r.trials, r.seed, a.source, r.threads)?;
    match a.output.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf, Some(line))?;
            Ok(utf8(buf))
        }
        Format::Json => pretty(&json!({ "config": config, "report": report })),
    }
}

fn hist(a: &HistArgs, line: &str, config: Value) -> Result<String> {
    let r = &a.run;
    let h = joint_histogram(r.n, r.p, r.trials, r.seed, a.bins, r.threads)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            h.write_csv(&mut buf, Some(line))?;
            Ok(utf8(buf))
        }
        Format::Json => pretty(&json!({ "config": config, "histogram": h })),
    }
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn compare(a: &CompareArgs, line: &str, config: Value) -> Result<String> {
    let m = params(a.p, None)?;
    if a.nmin < 2 || a.nmin > a.nmax {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= nmin <= nmax, got nmin={} nmax={}",
            a.nmin, a.nmax
        )));
    }
    if a.trials > 0 && a.trials < trieshape::mc::MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "trials must be 0 or >= {}, got {}",
            trieshape::mc::MIN_TRIALS,
            a.trials
        )));
    }
    let table = MomentTable::compute(a.p, a.nmax, a.precision)?;
    let trunc = Truncation::default();
    let g2 = FourierCoeffs::g2(&m, trunc)?;
    let sym = if m.is_symmetric() {
        Some(SymmetricFluctuations::new(trunc)?)
    } else {
        None
    };
    let g20 = g2.get(0).re;

    let grid: Vec<usize> = std::iter::successors(Some(a.nmin), |&n| n.checked_mul(2))
        .take_while(|&n| n <= a.nmax)
        .collect();
    let mut rows = Vec::new();
    for &n in &grid {
        let nf = n as f64;
        let (vs, vk, c) = (table.var_s(n)?, table.var_k(n)?, table.cov_sk(n)?);
        let g2n = g2.eval(nf);
        let mc = if a.trials > 0 {
            Some(run(n as u64, a.p, a.trials, a.seed, a.threads)?.rho_sk)
        } else {
            None
        };
        rows.push(json!({
            "n": n,
            "cov_sk_over_n": c / nf,
            "g2_fluct": g2n,
            "cov_diff_over_g20": (c / nf - g2n).abs() / g20.abs(),
            "var_s_over_n": vs / nf,
            "g1_fluct": sym.as_ref().map(|f| f.g1.eval(nf)),
            "var_k_over_n": vk / nf,
            "g3_fluct": sym.as_ref().map(|f| f.g3.eval(nf)),
            "rho_sk": table.rho_sk(n)?,
            "F": sym.as_ref().map(|f| f.correlation(nf)),
            "rho_sk_shifted": c / (vs * (vk + a.kpl_shift)).sqrt(),
            "rho_sn": table.rho_sn(n)?,
            "mc_rho_sk": mc,
        }));
    }

    let xs: Vec<f64> = grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|r| r["var_k_over_n"].as_f64().unwrap())
        .collect();
    let fit = (grid.len() >= 2).then(|| slope(&xs, &ys));
    let max_diff = rows
        .iter()
        .map(|r| r["cov_diff_over_g20"].as_f64().unwrap())
        .fold(0.0, f64::max);
    let summary = json!({
        "lambda": m.lambda,
        "lambda_alt": m.lambda_alt,
        "var_k_slope": fit,
        "slope_rel_err": fit.filter(|_| m.lambda > 0.0).map(|s| (s - m.lambda) / m.lambda),
        "g2_0": g20,
        "max_cov_diff_over_g20": max_diff,
    });

    match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => pretty(&json!({ "config": config, "rows": rows, "summary": summary })),
        Format::Csv => {
            let cols = [
                "n",
                "cov_sk_over_n",
                "g2_fluct",
                "cov_diff_over_g20",
                "var_s_over_n",
                "g1_fluct",
                "var_k_over_n",
                "g3_fluct",
                "rho_sk",
                "F",
                "rho_sk_shifted",
                "rho_sn",
                "mc_rho_sk",
            ];
            let mut s = format!("# config: {line}\n# summary:");
            for (k, v) in summary.as_object().unwrap() {
                write!(
                    s,
                    " {k}={}",
                    if v.is_null() {
                        String::new()
                    } else {
                        v.to_string()
                    }
                )
                .unwrap();
            }
            s.push('\n');
            s.push_str(&cols.join(","));
            s.push('\n');
            for r in &rows {
                let cells: Vec<String> = cols
                    .iter()
                    .map(|c| match &r[*c] {
                        Value::Number(x) => x.to_string(),
                        other => opt(other.as_f64()),
                    })
                    .collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            Ok(s)
        }
    }
}
