use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::StudyConfig;
use crate::error::{Error, Result};
use crate::pipeline::StudyOutput;
use crate::record::{float, RECORD_COLUMNS};
use crate::svg;

pub const SCHEMA: &str = "\
records.csv: one row per successful realization, in seed order
  seed             realization seed (base_seed + index)
  abs_error        ||a - a_hat||_2
  rel_error        ||a - a_hat||_2 / ||a||_2
  lower_k1         one-term lower bound on rel_error
  lower_k2         two-term lower bound on rel_error
  upper            spectral-norm upper bound on rel_error
  b0               dominant Laguerre coefficient of the true response
  b0_tilde         dominant Laguerre coefficient of the homogeneous response
  peak_time_true   sample time of the true response maximum
  peak_time_model  sample time of the homogeneous response maximum
  peak_class       early if peak_time_true < peak_time_model, else late
  sign_changes     sign changes of the reconstructed boundary series on the
                   400-point grid over [0, 4T], dead-band 1e-3 of its max
  error_sign_changes  sign changes of the reconstruction minus the true
                   input, same grid and dead-band
  recon_peak_time  time of the reconstructed boundary series maximum

histogram.csv: relative-error histogram, 20 equal bins over [0, max]
  bin_lo, bin_hi, count, density

bound_scatter.csv: bounds against the realized relative error
  seed, lower_k1, lower_k2, rel_error, upper, peak_class

reconstructions/<seed>.csv: reconstructed boundary series
  time, value

summary.json: counts, exclusions, histogram, quantiles, bound violations,
  per-class sign-change statistics, estimator discrepancy, warnings

config.txt: the configuration that produced these files
";

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>> {
    Ok(std::io::BufWriter::new(fs::File::create(path).map_err(|e| Error::io(path, e))?))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::io(path, e))
}

/// Write every artifact of a run into `cfg.output_dir`.
pub fn emit_outputs(out: &StudyOutput, cfg: &StudyConfig) -> Result<()> {
    let dir = &cfg.output_dir;
    let recon_dir = dir.join("reconstructions");
    fs::create_dir_all(&recon_dir).map_err(|e| Error::io(&recon_dir, e))?;

    let path = dir.join("records.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(RECORD_COLUMNS).map_err(|e| Error::io(&path, e))?;
    for r in &out.records {
        w.write_record(r.csv_fields()).map_err(|e| Error::io(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("histogram.csv");
    let mut w = csv_writer(&path)?;
    let h = &out.summary.histogram;
    w.write_record(["bin_lo", "bin_hi", "count", "density"]).map_err(|e| Error::io(&path, e))?;
    for ((e, c), d) in h.edges.windows(2).zip(&h.counts).zip(h.density()) {
        w.write_record([float(e[0]), float(e[1]), c.to_string(), float(d)]).map_err(|e| Error::io(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join("bound_scatter.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["seed", "lower_k1", "lower_k2", "rel_error", "upper", "peak_class"]).map_err(|e| Error::io(&path, e))?;
    for r in &out.records {
        w.write_record([
            r.seed.to_string(),
            float(r.lower_k1),
            float(r.lower_k2),
            float(r.rel_error),
            float(r.upper),
            r.peak_class.as_str().to_string(),
        ])
        .map_err(|e| Error::io(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    for (r, series) in out.records.iter().zip(&out.reconstructions) {
        let path = recon_dir.join(format!("{}.csv", r.seed));
        series.write_csv(create(&path)?, true).map_err(|e| Error::io(&path, e))?;
    }

    let path = dir.join("summary.json");
    let json = serde_json::to_string_pretty(&out.summary).map_err(|e| Error::io(&path, e))?;
    let mut f = create(&path)?;
    writeln!(f, "{json}").map_err(|e| Error::io(&path, e))?;

    let path = dir.join("schema.txt");
    fs::write(&path, SCHEMA).map_err(|e| Error::io(&path, e))?;
    let path = dir.join("config.txt");
    fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))?;

    if cfg.plots {
        for (name, body) in [
            ("histogram.svg", svg::histogram(&out.summary.histogram)),
            ("bound_scatter.svg", svg::bound_scatter(&out.records)),
            ("reconstructions.svg", svg::reconstructions(&out.records, &out.reconstructions)),
        ] {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
    }
    Ok(())
}
