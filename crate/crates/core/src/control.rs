//! Piecewise-constant control schedules and simulation of the Bloch equations.

use std::io::{Read, Write};

use crate::bloch::{bloch_rhs, BlochVector};
use crate::error::{Error, Result};
use crate::ode::{integrate, IntegratorConfig, Trajectory};
use crate::params::SystemParams;

/// Default coherent-control cap in units of `omega / (2 kappa)`.
pub const DEFAULT_U_MAX_FACTOR: f64 = 1e3;

/// `u_max = 1e3 omega / (2 kappa)`.
pub fn default_u_max(params: &SystemParams) -> f64 {
    DEFAULT_U_MAX_FACTOR * params.omega() / (2.0 * params.kappa())
}

/// Controls held constant on `[t_k, t_{k+1})`, the last piece ending at `final_time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    times: Vec<f64>,
    u: Vec<f64>,
    n: Vec<f64>,
    final_time: f64,
}

impl ControlSchedule {
    pub fn new(times: Vec<f64>, u: Vec<f64>, n: Vec<f64>, final_time: f64) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Schedule("schedule has no samples".into()));
        }
        if times.len() != u.len() || times.len() != n.len() {
            return Err(Error::Schedule("column lengths differ".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::Schedule(format!(
                "first sample time must be 0, got {}",
                times[0]
            )));
        }
        if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Schedule(format!(
                "times not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some(&bad) = n.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::NegativeIncoherentControl(bad));
        }
        if u.iter().any(|v| !v.is_finite()) || n.iter().any(|v| !v.is_finite()) {
            return Err(Error::Schedule("non-finite control value".into()));
        }
        let last = *times.last().unwrap();
        if !(final_time > 0.0 && final_time > last) || !final_time.is_finite() {
            return Err(Error::Schedule(format!(
                "final time {final_time} must exceed the last sample time {last}"
            )));
        }
        Ok(Self {
            times,
            u,
            n,
            final_time,
        })
    }

    pub fn constant(u: f64, n: f64, final_time: f64) -> Result<Self> {
        Self::new(vec![0.0], vec![u], vec![n], final_time)
    }

    /// Reads `t,u,n` CSV with a header row. Times are multiplied by `time_scale`;
    /// pass `1/omega` for files written in scaled time.
    pub fn from_csv<R: Read>(reader: R, time_scale: f64, final_time: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Schedule(e.to_string()))?
            .clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols != ["t", "u", "n"] {
            return Err(Error::Schedule(format!(
                "expected header t,u,n, got {}",
                cols.join(",")
            )));
        }
        let (mut times, mut u, mut n) = (Vec::new(), Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Schedule(e.to_string()))?;
            let parse = |k: usize| -> Result<f64> {
                rec[k].parse::<f64>().map_err(|e| {
                    Error::Schedule(format!("row {}: column {}: {e}", line + 2, cols[k]))
                })
            };
            times.push(parse(0)? * time_scale);
            u.push(parse(1)?);
            n.push(parse(2)?);
        }
        Self::new(times, u, n, final_time)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["t", "u", "n"]).map_err(io)?;
        for k in 0..self.times.len() {
            w.write_record([
                self.times[k].to_string(),
                self.u[k].to_string(),
                self.n[k].to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    /// Same controls, truncated or extended to a new final time.
    pub fn with_final_time(&self, final_time: f64) -> Result<Self> {
        let keep = self.times.partition_point(|&t| t < final_time).max(1);
        Self::new(
            self.times[..keep].to_vec(),
            self.u[..keep].to_vec(),
            self.n[..keep].to_vec(),
            final_time,
        )
    }

    /// `(u, n)` in force at time `t`.
    pub fn value_at(&self, t: f64) -> (f64, f64) {
        let k = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        (self.u[k], self.n[k])
    }

    /// Largest `|u|`.
    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Intervals `(start, end, u, n)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.times.len()).map(move |k| {
            let end = self.times.get(k + 1).copied().unwrap_or(self.final_time);
            (self.times[k], end, self.u[k], self.n[k])
        })
    }
}

/// Concatenation of per-segment trajectories; each piece carries its start time.
#[derive(Debug, Clone)]
pub struct PiecewiseTrajectory {
    pieces: Vec<(f64, Trajectory)>,
}

impl PiecewiseTrajectory {
    pub fn pieces(&self) -> &[(f64, Trajectory)] {
        &self.pieces
    }

    pub fn end_time(&self) -> f64 {
        let (t0, tr) = self.pieces.last().expect("non-empty");
        t0 + tr.end_time()
    }

    pub fn end_state(&self) -> BlochVector {
        let s = self.pieces.last().expect("non-empty").1.last_state();
        BlochVector::new(s[0], s[1], s[2])
    }

    /// Dense-output state at absolute time `t` (clamped to the horizon).
    pub fn sample(&self, t: f64) -> BlochVector {
        let k = self
            .pieces
            .partition_point(|(t0, _)| *t0 <= t)
            .saturating_sub(1);
        let (t0, tr) = &self.pieces[k];
        let s = tr.sample(t - t0);
        BlochVector::new(s[0], s[1], s[2])
    }

    /// All accepted steps as `(t, r)`, without repeating segment joints.
    pub fn samples(&self) -> Vec<(f64, BlochVector)> {
        let mut out = Vec::new();
        for (idx, (t0, tr)) in self.pieces.iter().enumerate() {
            let skip = usize::from(idx > 0);
            for k in skip..tr.len() {
                let s = tr.state(k);
                out.push((t0 + tr.times()[k], BlochVector::new(s[0], s[1], s[2])));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimulationOptions {
    pub integrator: IntegratorConfig,
    /// Cap on `|u|`; `None` uses [`default_u_max`].
    pub u_max: Option<f64>,
}

/// Integrates the Bloch equations under a schedule, segment by segment.
pub fn simulate(
    r0: BlochVector,
    schedule: &ControlSchedule,
    params: &SystemParams,
    opts: &SimulationOptions,
) -> Result<PiecewiseTrajectory> {
    let cap = opts.u_max.unwrap_or_else(|| default_u_max(params));
    let worst = schedule.max_abs_u();
    if worst > cap {
        return Err(Error::ControlCapExceeded { value: worst, cap });
    }
    if !r0.in_ball(1e-9) {
        return Err(Error::InvalidParameter(format!(
            "initial state |r| = {} > 1",
            r0.norm()
        )));
    }
    let mut y = r0.to_array();
    let mut pieces = Vec::with_capacity(schedule.len());
    for (start, end, u, n) in schedule.segments() {
        let rhs = |_t: f64, s: &[f64], out: &mut [f64]| -> Result<()> {
            let v = bloch_rhs(BlochVector::new(s[0], s[1], s[2]), u, n, params)?;
            out.copy_from_slice(&v);
            Ok(())
        };
        let tr = integrate(rhs, &y, end - start, &opts.integrator).map_err(|e| match e {
            Error::Integration { t, reason } => Error::Integration {
                t: t + start,
                reason,
            },
            Error::Rhs { t, source } => Error::Rhs {
                t: t + start,
                source,
            },
            other => other,
        })?;
        y.copy_from_slice(tr.last_state());
        pieces.push((start, tr));
    }
    Ok(PiecewiseTrajectory { pieces })
}
