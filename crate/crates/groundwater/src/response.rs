use std::io::Write;

use lagdeconv::laguerre::{expand, Expansion};
use lagdeconv::{LaguerreBasis, LaguerreSeries, Signal};

use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::solver::ImpulseResponse;

/// The response must fall below this fraction of its peak by `t_end`.
pub const DECAY_FRACTION: f64 = 0.1;

/// Laguerre expansion of a simulated response, with tail diagnostics.
pub fn greens_expansion(resp: &ImpulseResponse, basis: &LaguerreBasis) -> Result<Expansion> {
    let values = resp.series.values();
    let (ip, _) = resp.series.argmax();
    let peak = values[ip];
    let last = *values.last().expect("series is non-empty");
    if !(last < DECAY_FRACTION * peak) {
        return Err(Error::TailNotDecayed { peak, last });
    }
    Ok(expand(Signal::Sampled(&resp.series), basis)?)
}

/// Transfer coefficients `b` of a simulated response.
pub fn greens_coeffs(resp: &ImpulseResponse, basis: &LaguerreBasis) -> Result<LaguerreSeries> {
    Ok(greens_expansion(resp, basis)?.series)
}

/// Write a nodal field as `x,y,value` rows.
pub fn write_field_csv<W: Write>(mut w: W, dom: &DomainConfig, values: &[f64]) -> std::io::Result<()> {
    writeln!(w, "x,y,value")?;
    for i in 0..=dom.nx {
        for j in 0..=dom.ny {
            let (x, y) = dom.node_coords(i, j);
            writeln!(w, "{x:.16e},{y:.16e},{:.16e}", values[dom.node(i, j)])?;
        }
    }
    Ok(())
}

pub fn write_field_path(path: &std::path::Path, dom: &DomainConfig, values: &[f64]) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let file = std::fs::File::create(path).map_err(io)?;
    write_field_csv(std::io::BufWriter::new(file), dom, values).map_err(io)
}

/// Write a response as `t,value` rows.
pub fn write_response_path(path: &std::path::Path, resp: &ImpulseResponse) -> Result<()> {
    let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    let file = std::fs::File::create(path).map_err(io)?;
    resp.series.write_csv(std::io::BufWriter::new(file), true).map_err(io)
}
