//! Per-point tensor dump for `finsler report`.

use anyhow::{Context, Result};
use finsler_core::ad::{JVec, PiTensor};
use finsler_core::config::Config;
use finsler_core::connection::{ConnectionCoefficients, CurvatureKind};
use finsler_core::finsler::{ChartPoint, FinslerStructure, LocalGeometry};
use finsler_core::tripathi::{Tripathi, TripathiParams};
use finsler_core::verify::{points_for, RunOptions};
use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
pub struct TensorReport {
    pub metric: String,
    pub params: String,
    pub dimension: usize,
    pub points: Vec<PointTensors>,
}

#[derive(Serialize)]
pub struct PointTensors {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    /// `g_ij`
    pub g: Value,
    /// `C_ijk`
    pub cartan_tensor: Value,
    /// `Gⁱ`
    pub spray: Value,
    /// `Nⁱ_j`
    pub barthel: Value,
    /// `Γ*ⁱ_jk`
    pub cartan_horizontal: Value,
    pub generalized: ConnectionTensors,
}

/// Coefficients, torsions and curvatures of the generalized connection,
/// each indexed `[i][j][k]...` with the upper index first.
#[derive(Serialize)]
pub struct ConnectionTensors {
    pub nonlinear: Value,
    pub horizontal: Value,
    pub vertical: Value,
    pub spray: Value,
    pub torsion: Torsions,
    pub curvature: Curvatures,
}

#[derive(Serialize)]
pub struct Torsions {
    pub h: Value,
    pub hv: Value,
    pub vh_contracted: Value,
    pub vhv_contracted: Value,
    pub v_contracted: Value,
}

#[derive(Serialize)]
pub struct Curvatures {
    pub h: Value,
    pub hv: Value,
    pub v: Value,
}

/// Nested arrays with the layout of the tensor's slots.
fn nested(t: &PiTensor) -> Value {
    fn build(vals: &[f64], n: usize, rank: usize) -> Value {
        if rank == 0 {
            return Value::from(vals[0]);
        }
        let step = vals.len() / n;
        Value::Array(
            (0..n)
                .map(|i| build(&vals[i * step..(i + 1) * step], n, rank - 1))
                .collect(),
        )
    }
    build(&t.values(), t.dim(), t.rank())
}

fn vector(v: &JVec) -> Value {
    Value::from(v.values())
}

pub fn report(
    cfg: &Config,
    metric: Option<&str>,
    params: Option<&str>,
    opts: &RunOptions,
) -> Result<TensorReport> {
    let f = match metric {
        Some(name) => cfg.metric(name)?,
        None => cfg
            .structures()?
            .into_iter()
            .next()
            .context("configuration has no metric")?,
    };
    let np = match params {
        Some(name) => cfg.param(name)?,
        None => cfg
            .resolved_params()?
            .into_iter()
            .next()
            .context("configuration has no parameter entry")?,
    };
    let points = points_for(cfg, &f, opts)?;
    let rows = points
        .iter()
        .map(|p| point_tensors(&f, &np.params, p).with_context(|| format!("at {p}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(TensorReport {
        metric: f.name.clone(),
        params: np.name,
        dimension: cfg.dimension,
        points: rows,
    })
}

fn point_tensors(
    f: &FinslerStructure,
    params: &TripathiParams,
    p: &ChartPoint,
) -> Result<PointTensors> {
    // curvatures of the generalized connection need four derivatives of L
    let order = 4 + usize::from(params.phi.needs_curvature());
    let geo = LocalGeometry::new(f, p, order)?;
    let tr = Tripathi::new(&geo, params)?;
    let built = tr.build();
    Ok(PointTensors {
        x: p.x.clone(),
        y: p.y.clone(),
        l: geo.l.value(),
        g: nested(&geo.g),
        cartan_tensor: nested(&geo.c),
        spray: vector(&geo.spray),
        barthel: nested(&geo.barthel),
        cartan_horizontal: nested(&geo.gamma),
        generalized: connection_tensors(&built, &tr.spray(), &geo.eta()),
    })
}

fn connection_tensors(
    conn: &ConnectionCoefficients,
    spray: &JVec,
    eta: &JVec,
) -> ConnectionTensors {
    let t = conn.torsions(eta);
    ConnectionTensors {
        nonlinear: nested(&conn.nl),
        horizontal: nested(&conn.h),
        vertical: nested(&conn.v),
        spray: vector(spray),
        torsion: Torsions {
            h: nested(&t.q),
            hv: nested(&t.tt),
            vh_contracted: nested(&t.r_hat),
            vhv_contracted: nested(&t.p_hat),
            v_contracted: nested(&t.s_hat),
        },
        curvature: Curvatures {
            h: nested(&conn.curvature(CurvatureKind::H).comps),
            hv: nested(&conn.curvature(CurvatureKind::Hv).comps),
            v: nested(&conn.curvature(CurvatureKind::V).comps),
        },
    }
}
