use anosov_trace::clt::{orbit_covariance_check, samples_csv, Experiment, StatReport};
use anosov_trace::fields::{assemble_roof, sample_band, LatticeSynthesizer};
use anosov_trace::torus::{enumerate_with_budget, min_periodic_distance};
use anosov_trace::trace::{flat_trace_with, regime_rate, xi_for_regime};
use anosov_trace::{fmt_f64, ExperimentConfig, FieldSpec, OrbitTable, PressureCurve, ToralAutomorphism};
use serde::Serialize;
use serde_json::json;

use crate::config::{FieldCommandConfig, OrbitsConfig, PressureConfig, RegimeConfig, TraceConfig};
use crate::output::Outputs;
use crate::CliError;

/// What a subcommand reports back for its manifest.
pub struct Ran {
    pub seed: Option<u64>,
    pub config: serde_json::Value,
}

fn ran<T: Serialize>(seed: Option<u64>, config: &T) -> Ran {
    Ran { seed, config: serde_json::to_value(config).expect("serializable config") }
}

fn automorphism(matrix: &[Vec<i64>]) -> Result<ToralAutomorphism, CliError> {
    ToralAutomorphism::new(matrix.to_vec()).map_err(CliError::invalid)
}

fn require(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::invalid(anosov_trace::Error::InvalidConfig(msg.into())))
    }
}

fn table(map: &ToralAutomorphism, n: u32, budget: u64) -> Result<OrbitTable, CliError> {
    enumerate_with_budget(map, n, budget).map_err(CliError::core)
}

#[derive(Serialize)]
struct PeriodCount {
    m: u32,
    orbits: usize,
}

pub fn orbits(cfg: OrbitsConfig, out: &mut Outputs) -> Result<Ran, CliError> {
    let map = automorphism(&cfg.matrix)?;
    require(cfg.n >= 1, "n must be at least 1")?;
    let t = table(&map, cfg.n, cfg.budget)?;
    let min_distance = match min_periodic_distance(&t) {
        Ok(d) => Some(d),
        Err(anosov_trace::Error::Degenerate(_)) => None,
        Err(e) => return Err(CliError::core(e)),
    };
    let mut by_period: Vec<PeriodCount> = Vec::new();
    for o in t.orbits() {
        match by_period.iter_mut().find(|p| p.m == o.primitive_period()) {
            Some(p) => p.orbits += 1,
            None => by_period.push(PeriodCount { m: o.primitive_period(), orbits: 1 }),
        }
    }
    by_period.sort_by_key(|p| p.m);
    out.text("orbits.csv", &t.to_csv())?;
    out.json(
        "orbits.json",
        &json!({
            "matrix": cfg.matrix,
            "n": cfg.n,
            "points": t.total_points(),
            "orbits": t.orbits().len(),
            "by_period": by_period,
            "amplitude": t.amplitude(),
            "min_distance": min_distance,
            "h_top": map.h_top(),
            "lambda": map.lambda(),
        }),
    )?;
    Ok(ran(None, &cfg))
}

fn band_summary(spec: &FieldSpec) -> serde_json::Value {
    (1..=spec.j_max())
        .map(|j| {
            let r = spec.band_range(j);
            json!({ "band": j, "h": spec.band_scale(j), "modes": r.len(), "first_mode": r.start })
        })
        .collect()
}

pub fn field(cfg: FieldCommandConfig, out: &mut Outputs) -> Result<Ran, CliError> {
    let map = automorphism(&cfg.matrix)?;
    require(cfg.n >= 1, "n must be at least 1")?;
    let spec = cfg.field.to_spec(&map, cfg.n, None).map_err(CliError::invalid)?;
    let t = table(&map, cfg.n, cfg.budget)?;
    let sample = match cfg.band {
        Some(j) => sample_band(&spec, j, cfg.seed),
        None => assemble_roof(&spec, cfg.seed),
    }
    .map_err(CliError::core)?;
    let plan = spec.roof_plan().map_err(CliError::core)?;
    let synth = LatticeSynthesizer::new(t.lattice(), spec.basis());
    let values = sample.evaluate_on(&synth);
    let lattice = t.lattice();
    let big_n = lattice.modulus() as f64;
    let d = map.dimension();
    let mut csv = String::from("index,");
    csv.push_str(&(1..=d).map(|i| format!("x{i}")).collect::<Vec<_>>().join(","));
    csv.push_str(",value\n");
    for (i, v) in values.iter().enumerate() {
        let x: Vec<String> = lattice.numerators(i).iter().map(|&p| fmt_f64(p as f64 / big_n)).collect();
        csv.push_str(&format!("{i},{},{}\n", x.join(","), fmt_f64(*v)));
    }
    out.text("field.csv", &sample.to_csv())?;
    out.text("field_values.csv", &csv)?;
    out.json(
        "field.json",
        &json!({
            "seed": cfg.seed,
            "band": cfg.band,
            "basis_size": spec.basis().len(),
            "j_max": spec.j_max(),
            "lambda_tilde": spec.lambda_tilde(),
            "kappa": plan.kappa(),
            "bands": band_summary(&spec),
            "lattice_points": values.len(),
        }),
    )?;
    Ok(ran(Some(cfg.seed), &cfg))
}

pub fn trace(cfg: TraceConfig, out: &mut Outputs) -> Result<Ran, CliError> {
    let map = automorphism(&cfg.matrix)?;
    require(cfg.n >= 1, "n must be at least 1")?;
    let xi = match cfg.xi {
        Some(x) => {
            require(x.is_finite(), "xi must be finite")?;
            x
        }
        None => {
            require(cfg.c > 0.0 && cfg.c < 1.0, "c must lie in (0, 1)")?;
            require(cfg.field.alpha > 1.0, "alpha must exceed 1")?;
            xi_for_regime(&map, cfg.n, cfg.field.alpha, cfg.c)
        }
    };
    let spec = cfg.field.to_spec(&map, cfg.n, None).map_err(CliError::invalid)?;
    let t = table(&map, cfg.n, cfg.budget)?;
    let roof = assemble_roof(&spec, cfg.seed).map_err(CliError::core)?;
    let synth = LatticeSynthesizer::new(t.lattice(), spec.basis());
    let sample = flat_trace_with(&t, &synth, &roof, xi);
    out.text("trace.csv", &samples_csv(&[sample]))?;
    out.json(
        "trace.json",
        &json!({
            "sample": sample,
            "regime": cfg.xi.is_none(),
            "amplitude": t.amplitude(),
            "points": t.total_points(),
            "orbits": t.orbits().len(),
        }),
    )?;
    Ok(ran(Some(cfg.seed), &cfg))
}

pub fn clt(cfg: ExperimentConfig, covariance: bool, out: &mut Outputs) -> Result<Ran, CliError> {
    automorphism(&cfg.matrix)?;
    cfg.validate().map_err(CliError::invalid)?;
    let exp = Experiment::prepare(&cfg).map_err(CliError::core)?;
    let samples = exp.run().map_err(CliError::core)?;
    let mut report = StatReport::build(&cfg, exp.table(), exp.xi(), &samples).map_err(CliError::core)?;
    if covariance {
        report = report.with_covariance(orbit_covariance_check(&cfg).map_err(CliError::core)?);
    }
    let mut cf = String::from("mu,nu,re_empirical,im_empirical,gaussian,bessel\n");
    for r in &report.cf {
        cf.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(r.mu),
            fmt_f64(r.nu),
            fmt_f64(r.empirical.re),
            fmt_f64(r.empirical.im),
            fmt_f64(r.gaussian),
            fmt_f64(r.bessel)
        ));
    }
    out.text("clt_samples.csv", &samples_csv(&samples))?;
    out.text("clt_cf.csv", &cf)?;
    out.json("clt_report.json", &report)?;
    Ok(ran(Some(cfg.seed), &cfg))
}

pub fn pressure(cfg: PressureConfig, out: &mut Outputs) -> Result<Ran, CliError> {
    let map = automorphism(&cfg.matrix)?;
    require(!cfg.betas.is_empty(), "beta grid is empty")?;
    require(cfg.betas.iter().all(|b| *b > 0.0 && b.is_finite()), "beta grid must be positive")?;
    require(!cfg.periods.is_empty() && !cfg.periods.contains(&0), "period range must be nonempty and positive")?;
    let curve = PressureCurve::compute(&map, &cfg.betas, &cfg.periods, cfg.budget).map_err(CliError::core)?;
    let mut decay = String::from("n,v_n\n");
    for (n, v) in &curve.decay {
        decay.push_str(&format!("{n},{}\n", fmt_f64(*v)));
    }
    out.text("pressure.csv", &curve.to_csv())?;
    out.text("decay.csv", &decay)?;
    out.json("pressure.json", &curve)?;
    Ok(ran(None, &cfg))
}

pub fn regime(cfg: RegimeConfig, out: &mut Outputs) -> Result<Ran, CliError> {
    let map = automorphism(&cfg.matrix)?;
    require(cfg.c > 0.0 && cfg.c < 1.0, "c must lie in (0, 1)")?;
    require(cfg.alpha > 1.0, "alpha must exceed 1")?;
    require(!cfg.periods.is_empty(), "period list is empty")?;
    let rate = regime_rate(&map, cfg.alpha);
    let mut csv = String::from("n,xi,log_xi\n");
    for &n in &cfg.periods {
        let xi = xi_for_regime(&map, n, cfg.alpha, cfg.c);
        csv.push_str(&format!("{n},{},{}\n", fmt_f64(xi), fmt_f64(n as f64 * rate / cfg.c)));
    }
    let n_max = match cfg.xi {
        Some(xi) => {
            require(xi > 1.0 && xi.is_finite(), "xi must be finite and exceed 1")?;
            Some((cfg.c * xi.ln() / rate).floor() as u64)
        }
        None => None,
    };
    out.text("regime.csv", &csv)?;
    out.json(
        "regime.json",
        &json!({
            "rate": rate,
            "h_top": map.h_top(),
            "lambda": map.lambda(),
            "alpha": cfg.alpha,
            "c": cfg.c,
            "xi": cfg.xi,
            "n_max": n_max,
        }),
    )?;
    Ok(ran(None, &cfg))
}
