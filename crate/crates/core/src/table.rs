//! Lookup table from target points of the meridian half-disc to the costate
//! seed of the first extremal reaching them.
//!
//! File format: a header line
//! `#qubit-reach-table v1 gamma_ratio=<value> grid=<N>` followed by rows
//! `i,j,psi0,theta0,Tmin`, one per recorded cell, every line newline-terminated.
//! Cell `(i, j)` covers `z` in `[-1 + i/N, -1 + (i+1)/N)` and `R` in
//! `[j/N, (j+1)/N)`, with `0 <= i < 2N` and `0 <= j < N`.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::pmp::{seed, ExtremalOptions};
use crate::reachset::{ReachOptions, ReachSweep};

const MAGIC: &str = "#qubit-reach-table";
const VERSION: &str = "v1";

/// Seed and first-passage time stored for one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRecord {
    pub psi0: f64,
    pub theta0: f64,
    /// First-passage time in units of `1/omega`.
    pub t_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    gamma_ratio: f64,
    grid: usize,
    /// Keyed by `(j, i)` so iteration follows file order.
    records: BTreeMap<(usize, usize), TableRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableOptions {
    pub n_seeds: usize,
    pub t_max: f64,
    /// Cells per unit length.
    pub grid: usize,
    /// Sampling step along extremals, scaled time.
    pub dtau: f64,
    pub extremal: ExtremalOptions,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            n_seeds: 4096,
            t_max: 10.0,
            grid: 256,
            dtau: 0.01,
            extremal: ExtremalOptions::default(),
        }
    }
}

/// A query answer: the record and the cell it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryResult {
    pub cell: (usize, usize),
    pub record: TableRecord,
}

impl LookupTable {
    pub fn empty(gamma_ratio: f64, grid: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::InvalidParameter("grid must be > 0".into()));
        }
        Ok(Self {
            gamma_ratio,
            grid,
            records: BTreeMap::new(),
        })
    }

    pub fn gamma_ratio(&self) -> f64 {
        self.gamma_ratio
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.grid as f64
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&TableRecord> {
        self.records.get(&(j, i))
    }

    /// `((i, j), record)` in file order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &TableRecord)> {
        self.records.iter().map(|(&(j, i), r)| ((i, j), r))
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.cell_width();
        (-1.0 + (i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
    }

    /// Cell containing `(z, |R|)`, clamped to the grid.
    pub fn cell_of(&self, z: f64, r: f64) -> (usize, usize) {
        let n = self.grid as f64;
        let i = ((z + 1.0) * n).floor().clamp(0.0, 2.0 * n - 1.0) as usize;
        let j = (r.abs() * n).floor().clamp(0.0, n - 1.0) as usize;
        (i, j)
    }

    pub fn insert(&mut self, i: usize, j: usize, rec: TableRecord) -> Result<()> {
        if i >= 2 * self.grid || j >= self.grid {
            return Err(Error::InvalidParameter(format!(
                "cell ({i}, {j}) outside the grid"
            )));
        }
        if !(rec.t_min >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "negative T_min {}",
                rec.t_min
            )));
        }
        self.records.insert((j, i), rec);
        Ok(())
    }

    /// Record of the cell containing `(z1, R1)`, or of the nearest recorded
    /// cell within two cell widths. `R1` is folded to `|R1|`.
    pub fn query(&self, z1: f64, r1: f64) -> Result<QueryResult> {
        if !(z1.is_finite() && r1.is_finite()) || z1.hypot(r1) > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "target ({z1}, {r1}) outside the unit disc"
            )));
        }
        let (ci, cj) = self.cell_of(z1, r1);
        if let Some(rec) = self.get(ci, cj) {
            return Ok(QueryResult {
                cell: (ci, cj),
                record: *rec,
            });
        }
        let mut best: Option<(i64, (usize, usize))> = None;
        for dj in -2i64..=2 {
            for di in -2i64..=2 {
                let d2 = di * di + dj * dj;
                if d2 > 4 {
                    continue;
                }
                let (i, j) = (ci as i64 + di, cj as i64 + dj);
                if i < 0 || j < 0 || self.get(i as usize, j as usize).is_none() {
                    continue;
                }
                let key = (i as usize, j as usize);
                if best.is_none_or(|(b, k)| d2 < b || (d2 == b && (key.1, key.0) < (k.1, k.0))) {
                    best = Some((d2, key));
                }
            }
        }
        match best {
            Some((_, (i, j))) => Ok(QueryResult {
                cell: (i, j),
                record: self.records[&(j, i)],
            }),
            None => Err(Error::Unreachable { z: z1, r: r1 }),
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "{MAGIC} {VERSION} gamma_ratio={} grid={}",
            self.gamma_ratio, self.grid
        )?;
        for ((i, j), r) in self.iter() {
            writeln!(w, "{i},{j},{},{},{}", r.psi0, r.theta0, r.t_min)?;
        }
        Ok(())
    }

    pub fn read<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        if text.is_empty() {
            return Err(Error::TableTruncated);
        }
        if !text.ends_with('\n') {
            return Err(Error::TableTruncated);
        }
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::TableTruncated)?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some(MAGIC) {
            return Err(Error::TableFormat(format!("bad header {header:?}")));
        }
        match tokens.next() {
            Some(VERSION) => {}
            Some(v) => return Err(Error::TableVersion(v.to_string())),
            None => return Err(Error::TableTruncated),
        }
        let mut gamma_ratio = None;
        let mut grid = None;
        for tok in tokens {
            match tok.split_once('=') {
                Some(("gamma_ratio", v)) => gamma_ratio = Some(parse_f64(v)?),
                Some(("grid", v)) => {
                    grid = Some(
                        v.parse::<usize>()
                            .map_err(|e| Error::TableFormat(e.to_string()))?,
                    )
                }
                _ => return Err(Error::TableFormat(format!("unknown header field {tok:?}"))),
            }
        }
        let (Some(gamma_ratio), Some(grid)) = (gamma_ratio, grid) else {
            return Err(Error::TableFormat(
                "header lacks gamma_ratio or grid".into(),
            ));
        };
        let mut table = Self::empty(gamma_ratio, grid)?;
        for (n, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(Error::TableFormat(format!(
                    "row {}: expected 5 fields",
                    n + 2
                )));
            }
            let idx = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::TableFormat(e.to_string()))
            };
            let rec = TableRecord {
                psi0: parse_f64(f[2])?,
                theta0: parse_f64(f[3])?,
                t_min: parse_f64(f[4])?,
            };
            table
                .insert(idx(f[0])?, idx(f[1])?, rec)
                .map_err(|e| Error::TableFormat(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(std::fs::File::open(path)?)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| Error::TableFormat(format!("{s:?}: {e}")))
}

/// Sweeps extremals to `t_max` and records, per cell, the seed that reaches it first.
pub fn build_table(params: &SystemParams, opts: &TableOptions) -> Result<LookupTable> {
    if opts.n_seeds < 256 {
        return Err(Error::InvalidParameter(format!(
            "need >= 256 seeds, got {}",
            opts.n_seeds
        )));
    }
    let reach = ReachOptions {
        n_seeds: opts.n_seeds,
        raster: 2 * opts.grid,
        dtau: opts.dtau,
        extremal: opts.extremal,
        ..ReachOptions::default()
    };
    let sw = ReachSweep::new(opts.t_max, params, &reach)?;
    let mut table = LookupTable::empty(params.ratio(), opts.grid)?;
    let h = table.cell_width();

    let hits: Vec<HashMap<(usize, usize), f64>> = sw
        .paths()
        .par_iter()
        .map(|path| {
            let mut first: HashMap<(usize, usize), f64> = HashMap::new();
            let mut visit = |z: f64, r: f64, tau: f64| {
                first.entry(table.cell_of(z, r)).or_insert(tau);
            };
            if let Some(p) = path.first() {
                visit(p[0], p[1], 0.0);
            }
            for (k, w) in path.windows(2).enumerate() {
                let len = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
                let m = (4.0 * len / h).ceil().max(1.0) as usize;
                for s in 1..=m {
                    let t = s as f64 / m as f64;
                    visit(
                        w[0][0] + t * (w[1][0] - w[0][0]),
                        w[0][1] + t * (w[1][1] - w[0][1]),
                        (k as f64 + t) * opts.dtau,
                    );
                }
            }
            first
        })
        .collect();

    // Merge in seed order; the earliest passage wins, ties go to the earlier seed.
    let mut best: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
    for (k, map) in hits.iter().enumerate() {
        for (&cell, &tau) in map {
            let e = best.entry(cell).or_insert((tau, k));
            if tau < e.0 {
                *e = (tau, k);
            }
        }
    }
    let seeds: Vec<Option<f64>> = sw
        .psis()
        .par_iter()
        .map(|&psi| seed(psi, params).ok().map(|s| s.theta0))
        .collect();
    for ((i, j), (tau, k)) in best {
        if let Some(theta0) = seeds[k] {
            table.insert(
                i,
                j,
                TableRecord {
                    psi0: sw.psis()[k],
                    theta0,
                    t_min: tau,
                },
            )?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LookupTable {
        let mut t = LookupTable::empty(0.1, 4).unwrap();
        t.insert(
            4,
            1,
            TableRecord {
                psi0: 0.1,
                theta0: 3.0,
                t_min: 0.0,
            },
        )
        .unwrap();
        t.insert(
            1,
            0,
            TableRecord {
                psi0: 2.5,
                theta0: 1.0 / 3.0,
                t_min: 6.25,
            },
        )
        .unwrap();
        t
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let t = sample();
        let mut a = Vec::new();
        t.write(&mut a).unwrap();
        let back = LookupTable::read(a.as_slice()).unwrap();
        assert_eq!(back, t);
        let mut b = Vec::new();
        back.write(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_damaged_files() {
        let mut a = Vec::new();
        sample().write(&mut a).unwrap();
        let text = String::from_utf8(a).unwrap();
        let bad_magic = text.replacen("#qubit-reach-table", "#qubit-reach-tab1e", 1);
        assert!(matches!(
            LookupTable::read(bad_magic.as_bytes()),
            Err(Error::TableFormat(_))
        ));
        let bad_version = text.replacen(" v1 ", " v2 ", 1);
        assert_eq!(
            LookupTable::read(bad_version.as_bytes()),
            Err(Error::TableVersion("v2".into()))
        );
        let cut = &text[..text.len() - 3];
        assert_eq!(
            LookupTable::read(cut.as_bytes()),
            Err(Error::TableTruncated)
        );
        assert_eq!(LookupTable::read("".as_bytes()), Err(Error::TableTruncated));
    }

    #[test]
    fn empty_table_loads() {
        let t = LookupTable::empty(0.1, 8).unwrap();
        let mut a = Vec::new();
        t.write(&mut a).unwrap();
        assert_eq!(LookupTable::read(a.as_slice()).unwrap(), t);
    }

    #[test]
    fn query_falls_back_to_neighbours() {
        let t = sample();
        let (z, r) = t.cell_center(4, 1);
        assert_eq!(t.query(z, r).unwrap().cell, (4, 1));
        assert_eq!(t.query(z, -r).unwrap().cell, (4, 1));
        // Two cells away along z.
        assert_eq!(t.query(z + 0.5, r).unwrap().cell, (4, 1));
        assert!(t.query(z + 0.5, r - 0.25).is_err());
        assert!(matches!(t.query(0.9, 0.3), Err(Error::Unreachable { .. })));
        assert!(t.query(1.0, 1.0).is_err());
    }
}
