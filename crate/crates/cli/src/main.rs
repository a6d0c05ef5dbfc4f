//! Command-line harness for the `gaussent` library.
//!
//! Exit status: 0 on success, 2 when a sample violates a structural
//! invariant, 3 when a linear program is infeasible, 1 for anything else.

mod args;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use gaussent::analytics::{
    asymptotic_entropy, asymptotic_invariant, canonical_invpurity_moments, entropy_from_purity,
    haar_invpurity_moments, max_entropy, max_inv_purity, microcanonical_invpurity_moments,
    page_entropy, MomentPair,
};
use gaussent::bounds::solve_entropy_bounds;
use gaussent::ensemble::{run_ensemble, EnsembleConfig};
use gaussent::entropy::entropic_h;
use gaussent::output::{
    read_samples_csv, sidecar_path, write_histogram_csv, write_json, write_samples_csv,
    write_table_csv, Sidecar,
};
use gaussent::scan::{concentration_scan, mdep_scan, ScanSettings, SubsystemSize};
use gaussent::stats::histogram;
use gaussent::{CanonicalConfig, EnergyVector, Error, LogBase, MicrocanonicalConfig, Result};
use serde::Serialize;
use serde_json::{json, Value};

use args::{
    AnalyticsArgs, BoundsArgs, Cli, Command, ConcentrationArgs, Format, Formula, HistogramArgs,
    MdepArgs, SampleArgs,
};

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            let mut w = sink(None)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn sample(a: &SampleArgs) -> Result<()> {
    let cfg = EnsembleConfig::new(a.measure()?, a.m, a.samples, a.common.seed)?
        .with_log_base(a.common.log_base.into())
        .with_validation(a.validation())
        .with_bins(a.bins);
    let run = run_ensemble(&cfg)?;
    let summary = Sidecar::new(&run.summary);
    let out = a.common.out.as_deref();
    match a.common.format {
        Format::Csv => {
            let mut w = sink(out)?;
            write_samples_csv(&mut w, &run.samples)?;
            w.flush()?;
            if let Some(p) = out {
                write_json(&sidecar_path(p), &summary)?;
            }
            Ok(())
        }
        Format::Json => emit_json(out, &summary),
    }
}

fn subsystem(a: &ConcentrationArgs) -> Result<SubsystemSize> {
    match (a.m, a.m_fraction) {
        (Some(m), None) => Ok(SubsystemSize::Fixed(m)),
        (None, Some(f)) if f > 0.0 && f <= 1.0 => Ok(SubsystemSize::Fraction(f)),
        (None, None) => Ok(SubsystemSize::Fixed(1)),
        _ => Err(Error::InvalidArgument(
            "--m-fraction must lie in (0, 1]".into(),
        )),
    }
}

fn scan_concentration(a: &ConcentrationArgs) -> Result<()> {
    let settings = ScanSettings {
        scale: a.scale.scale()?,
        samples: a.samples,
        seed: a.common.seed,
        log_base: a.common.log_base.into(),
    };
    let m = subsystem(a)?;
    let scan = concentration_scan(&a.n, m, &settings)?;
    let out = a.common.out.as_deref();
    let meta = json!({ "settings": settings, "subsystem": m, "fit": scan.fit });
    match a.common.format {
        Format::Csv => {
            let mut w = sink(out)?;
            write_table_csv(&mut w, &scan.points)?;
            w.flush()?;
            if let Some(p) = out {
                write_json(&sidecar_path(p), &Sidecar::new(meta))?;
            }
            Ok(())
        }
        Format::Json => emit_json(
            out,
            &Sidecar::new(
                json!({ "settings": settings, "subsystem": m, "fit": scan.fit, "points": scan.points }),
            ),
        ),
    }
}

fn scan_mdep(a: &MdepArgs) -> Result<()> {
    let settings = ScanSettings {
        scale: a.scale.scale()?,
        samples: a.samples,
        seed: a.common.seed,
        log_base: a.common.log_base.into(),
    };
    let points = mdep_scan(&a.n, &a.m, &settings)?;
    let out = a.common.out.as_deref();
    match a.common.format {
        Format::Csv => {
            let mut w = sink(out)?;
            write_table_csv(&mut w, &points)?;
            w.flush()?;
            if let Some(p) = out {
                write_json(
                    &sidecar_path(p),
                    &Sidecar::new(json!({ "settings": settings })),
                )?;
            }
            Ok(())
        }
        Format::Json => emit_json(
            out,
            &Sidecar::new(json!({ "settings": settings, "points": points })),
        ),
    }
}

fn recorded_max_entropy(input: &Path) -> Option<f64> {
    let text = std::fs::read_to_string(sidecar_path(input)).ok()?;
    let v: Value = serde_json::from_str(&text).ok()?;
    v.get("max_entropy")?.as_f64()
}

fn histogram_cmd(a: &HistogramArgs) -> Result<()> {
    let samples = read_samples_csv(BufReader::new(File::open(&a.input)?))?;
    let s: Vec<f64> = samples.iter().map(|x| x.entropy).collect();
    let observed = s.iter().cloned().fold(0.0f64, f64::max);
    let hi = a
        .s_max
        .or_else(|| recorded_max_entropy(&a.input))
        .unwrap_or(if observed > 0.0 { observed } else { 1.0 });
    let h = histogram(&s, 0.0, hi, a.bins)?;
    let out = a.out.as_deref();
    match a.format {
        Format::Csv => {
            let mut w = sink(out)?;
            write_histogram_csv(&mut w, &h)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => emit_json(
            out,
            &Sidecar::new(json!({ "bins": a.bins, "range": [0.0, hi], "histogram": h })),
        ),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, formula: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("formula {formula} needs --{flag}")))
}

fn moments_value(m: MomentPair) -> Value {
    json!({ "mean_a": m.mean_a, "mean_a2": m.mean_a2, "std": m.std() })
}

fn analytics(a: &AnalyticsArgs) -> Result<()> {
    let base: LogBase = a.log_base.into();
    let name = clap::ValueEnum::to_possible_value(&a.formula)
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let f = name.as_str();
    let (inputs, value, units) = match a.formula {
        Formula::Page => {
            let (m, n) = (need(a.m, "m", f)?, need(a.n, "n", f)?);
            (
                json!({ "m": m, "n": n }),
                json!(page_entropy(m, n)?),
                "nats",
            )
        }
        Formula::Haar => {
            let e = EnergyVector::from_energies(&a.energies)?;
            (
                json!({ "energies": a.energies }),
                moments_value(haar_invpurity_moments(&e)),
                "dimensionless",
            )
        }
        Formula::Canonical => {
            let (n, t) = (need(a.n, "n", f)?, need(a.temperature, "temperature", f)?);
            let m = canonical_invpurity_moments(&CanonicalConfig::new(n, t)?);
            (json!({ "n": n, "T": t }), moments_value(m), "dimensionless")
        }
        Formula::Microcanonical => {
            let (n, e) = (need(a.n, "n", f)?, need(a.energy, "energy", f)?);
            let cfg = MicrocanonicalConfig::new(n, e)?;
            let m = microcanonical_invpurity_moments(&cfg);
            let max = max_inv_purity(cfg.excess())?;
            let mut v = moments_value(m);
            v["max_inv_purity"] = json!(max);
            v["std_distance_to_max"] = json!(m.std_distance(max));
            (json!({ "n": n, "E": e }), v, "dimensionless")
        }
        Formula::MaxInvPurity => {
            let (n, e) = (need(a.n, "n", f)?, need(a.energy, "energy", f)?);
            let cfg = MicrocanonicalConfig::new(n, e)?;
            (
                json!({ "n": n, "E": e }),
                json!(max_inv_purity(cfg.excess())?),
                "dimensionless",
            )
        }
        Formula::MaxEntropy => {
            let (m, n, e) = (
                need(a.m, "m", f)?,
                need(a.n, "n", f)?,
                need(a.energy, "energy", f)?,
            );
            (
                json!({ "m": m, "n": n, "E": e }),
                json!(max_entropy(m, n, e, base)?),
                base.unit(),
            )
        }
        Formula::AsymptoticEntropy => {
            let (m, t) = (need(a.m, "m", f)?, need(a.temperature, "temperature", f)?);
            (
                json!({ "m": m, "T": t }),
                json!(asymptotic_entropy(m, t, base)?),
                base.unit(),
            )
        }
        Formula::AsymptoticInvariant => {
            let (d, m, t) = (
                need(a.d, "d", f)?,
                need(a.m, "m", f)?,
                need(a.temperature, "temperature", f)?,
            );
            (
                json!({ "d": d, "m": m, "T": t }),
                json!(asymptotic_invariant(d, m, t)?),
                "dimensionless",
            )
        }
        Formula::EntropyFromPurity => {
            let mu = need(a.mu, "mu", f)?;
            (
                json!({ "mu": mu }),
                json!(entropy_from_purity(mu, base)?),
                base.unit(),
            )
        }
        Formula::H => {
            let x = need(a.x, "x", f)?;
            (json!({ "x": x }), json!(entropic_h(x, base)?), base.unit())
        }
    };
    emit_json(
        None,
        &json!({ "formula": f, "inputs": inputs, "value": value, "units": units }),
    )
}

fn bounds(a: &BoundsArgs) -> Result<()> {
    let base: LogBase = a.log_base.into();
    let cfg = MicrocanonicalConfig::new(a.n, a.energy)?;
    let res = solve_entropy_bounds(&cfg, a.bins, base)?;
    emit_json(
        None,
        &json!({
            "n": a.n,
            "E": a.energy,
            "lower": res.lower,
            "upper": res.upper,
            "M": res.bins,
            "active_bins": { "upper": res.active_bins_upper, "lower": res.active_bins_lower },
            "duality_gap": res.duality_gap,
            "log_base": base,
            "units": base.unit(),
        }),
    )
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sample(a) => sample(a),
        Command::ScanConcentration(a) => scan_concentration(a),
        Command::ScanMdep(a) => scan_mdep(a),
        Command::Histogram(a) => histogram_cmd(a),
        Command::Analytics(a) => analytics(a),
        Command::Bounds(a) => bounds(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvariantViolation { .. } => 2,
                Error::Infeasible(_) => 3,
                _ => 1,
            })
        }
    }
}
