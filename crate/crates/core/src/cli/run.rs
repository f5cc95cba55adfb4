//! Grid evaluation and CSV/JSON emission.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{Format, GridMode, Method, RunConfig};
use crate::bloch::{laplace_route_odm, symmetric_wk_odm};
use crate::error::{Error, Result};
use crate::fermi::FermiContext;
use crate::odm::{
    gvodm_diagonal_terms, gvodm_terms, kodm_diagonal_terms, kodm_terms, to_pair, to_symmetric, PairPoint,
    SymmetricPoint,
};
use crate::oracle::{exact_odm, SpectrumSpec};
use crate::potential::Potential;

pub const VALUE_COLUMNS: [&str; 4] = ["order0", "order1", "order2", "total"];

/// One evaluated grid point. `values` is `None` for skipped forbidden
/// points; individual orders are `None` when a method has no order split.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coords: Vec<f64>,
    pub values: Option<[Option<f64>; 4]>,
}

pub fn coordinate_names(mode: GridMode, d: usize) -> Vec<String> {
    let axis = |p: &'static str| (1..=d).map(move |i| format!("{p}{i}"));
    match mode {
        GridMode::PairPoints => axis("r").chain(axis("rp")).collect(),
        GridMode::SymmetricPoints => axis("R").chain(axis("s")).collect(),
        GridMode::Diagonal => axis("r").collect(),
    }
}

/// Cartesian product of the grid axes, last axis fastest.
pub fn grid_points(cfg: &RunConfig) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = cfg.grid.first.iter().chain(&cfg.grid.second).map(|a| a.values()).collect();
    let mut out = vec![Vec::new()];
    for values in &axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(*x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Evaluates one method at one grid point.
pub struct Evaluator {
    ctx: FermiContext,
    v: Potential,
    mode: GridMode,
    spectrum: Option<SpectrumSpec>,
}

impl Evaluator {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let ctx = cfg.fermi_context().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let v = cfg.build_potential().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let spectrum = match cfg.potential.model {
            super::config::PotentialModel::Harmonic { omega, .. } if ctx.d == 1 => {
                SpectrumSpec::harmonic_1d(&ctx, omega).ok()
            }
            _ => None,
        };
        Ok(Self { ctx, v, mode: cfg.grid.mode, spectrum })
    }

    fn points(&self, coords: &[f64]) -> Result<(PairPoint, SymmetricPoint)> {
        let d = self.ctx.d;
        match self.mode {
            GridMode::PairPoints => {
                let p = PairPoint::new(coords[..d].to_vec(), coords[d..].to_vec())?;
                let q = to_symmetric(&p)?;
                Ok((p, q))
            }
            GridMode::SymmetricPoints => {
                let q = SymmetricPoint::new(coords[..d].to_vec(), coords[d..].to_vec())?;
                Ok((to_pair(&q)?, q))
            }
            GridMode::Diagonal => {
                let r = coords.to_vec();
                Ok((PairPoint::new(r.clone(), r.clone())?, SymmetricPoint::new(r, vec![0.0; d])?))
            }
        }
    }

    pub fn eval(&self, method: Method, coords: &[f64]) -> Result<[Option<f64>; 4]> {
        let (p, q) = self.points(coords)?;
        let diagonal = self.mode == GridMode::Diagonal;
        let b = match method {
            Method::Kodm if diagonal => kodm_diagonal_terms(&self.ctx, &self.v, &p.r)?,
            Method::Kodm => kodm_terms(&self.ctx, &self.v, &p)?,
            Method::Gvodm if diagonal => gvodm_diagonal_terms(&self.ctx, &self.v, &q.center)?,
            Method::Gvodm => gvodm_terms(&self.ctx, &self.v, &q)?,
            Method::WkSymmetric => symmetric_wk_odm(&self.ctx, &self.v, &q)?,
            Method::LaplaceRoute => laplace_route_odm(&self.ctx, &self.v, &p)?,
            Method::Exact => {
                let spec = self
                    .spectrum
                    .as_ref()
                    .ok_or_else(|| Error::ModelUnsupported("exact needs a 1D harmonic oscillator".into()))?;
                let total = exact_odm(spec, &self.ctx, p.r[0], p.r_prime[0])?;
                return Ok([None, None, None, Some(total)]);
            }
        };
        Ok([Some(b.order0), Some(b.order1), Some(b.order2), Some(b.total)])
    }
}

/// Evaluates every grid point in order. Forbidden points become empty rows
/// when `skip_forbidden` is set; any other error aborts.
pub fn evaluate(cfg: &RunConfig, method: Method, skip_forbidden: bool) -> Result<Vec<Row>> {
    let ev = Evaluator::new(cfg)?;
    grid_points(cfg)
        .into_iter()
        .map(|coords| match ev.eval(method, &coords) {
            Ok(v) => Ok(Row { coords, values: Some(v) }),
            Err(Error::ForbiddenRegion { .. }) if skip_forbidden => Ok(Row { coords, values: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_else(|| "null".into())
}

fn json_num(x: Option<f64>) -> Value {
    x.and_then(serde_json::Number::from_f64).map(Value::Number).unwrap_or(Value::Null)
}

/// A table ready to be written: column names and rows of optional cells.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn from_rows(names: Vec<String>, rows: &[Row], value_columns: &[String]) -> Self {
        let columns = names.into_iter().chain(value_columns.iter().cloned()).collect();
        let rows = rows
            .iter()
            .map(|r| {
                let mut cells: Vec<Option<f64>> = r.coords.iter().map(|x| Some(*x)).collect();
                match &r.values {
                    Some(v) => cells.extend(v),
                    None => cells.extend(std::iter::repeat_n(None, value_columns.len())),
                }
                cells
            })
            .collect();
        Self { columns, rows }
    }

    pub fn write(
        &self,
        out: &mut dyn Write,
        format: Format,
        meta: Value,
        stamp: Option<String>,
    ) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                if let Some(t) = stamp {
                    writeln!(out, "# generated {t}")?;
                }
                writeln!(out, "{}", self.columns.join(","))?;
                for r in &self.rows {
                    let line: Vec<String> = r.iter().map(|c| cell(*c)).collect();
                    writeln!(out, "{}", line.join(","))?;
                }
            }
            Format::Json => {
                let mut meta = meta;
                if let (Some(t), Some(m)) = (stamp, meta.as_object_mut()) {
                    m.insert("generated".into(), Value::String(t));
                }
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: Map<String, Value> =
                            self.columns.iter().cloned().zip(r.iter().map(|c| json_num(*c))).collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &json!({ "meta": meta, "rows": rows }))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Difference statistics of one value column over all rows where both
/// methods produced a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnStats {
    pub max_abs: f64,
    pub l2: f64,
    pub max_relative: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSummary {
    pub methods: [String; 2],
    pub columns: Map<String, Value>,
    pub max_relative: f64,
}

/// Rows of `a - b` per value column, and the summary.
pub fn difference(a: &[Row], b: &[Row], methods: [Method; 2]) -> (Vec<Row>, CompareSummary) {
    let mut acc = [(0.0f64, 0.0f64, 0.0f64, 0usize); 4];
    let rows = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            let values = match (&x.values, &y.values) {
                (Some(u), Some(v)) => {
                    let mut d = [None; 4];
                    for k in 0..4 {
                        if let (Some(p), Some(q)) = (u[k], v[k]) {
                            let diff = p - q;
                            let scale = p.abs().max(q.abs());
                            let rel = if scale == 0.0 { 0.0 } else { diff.abs() / scale };
                            let s = &mut acc[k];
                            s.0 = s.0.max(diff.abs());
                            s.1 += diff * diff;
                            s.2 = s.2.max(rel);
                            s.3 += 1;
                            d[k] = Some(diff);
                        }
                    }
                    Some(d)
                }
                _ => None,
            };
            Row { coords: x.coords.clone(), values }
        })
        .collect();
    let mut columns = Map::new();
    let mut worst = 0.0f64;
    for (k, name) in VALUE_COLUMNS.iter().enumerate() {
        let (max_abs, sq, rel, points) = acc[k];
        if points == 0 {
            continue;
        }
        worst = worst.max(rel);
        let stats = ColumnStats { max_abs, l2: sq.sqrt(), max_relative: rel, points };
        columns.insert((*name).into(), serde_json::to_value(stats).unwrap());
    }
    let summary = CompareSummary { methods: methods.map(|m| m.name().to_string()), columns, max_relative: worst };
    (rows, summary)
}
