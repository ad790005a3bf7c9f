//! The P¹- and C-processes and the four connections they generate.

use serde::Serialize;

use crate::ad::{JVec, PiTensor};
use crate::connection::{ConnectionCoefficients, Direction};
use crate::finsler::LocalGeometry;

/// Add the (v)hv-torsion to the horizontal part:
/// `H'ⁱ_jk = Hⁱ_jk + P̂(e_k, e_j)ⁱ`. `N` and `V` are unchanged.
pub fn p1_process(conn: &ConnectionCoefficients, eta: &JVec) -> ConnectionCoefficients {
    let n = conn.dim();
    let p_hat = conn.torsions(eta).p_hat;
    let h = PiTensor::from_fn(n, 1, 2, |ix| {
        conn.h.get(ix) + p_hat.get(&[ix[0], ix[2], ix[1]])
    });
    ConnectionCoefficients::new(conn.nl.clone(), h, conn.v.clone())
}

/// The (h)hv-torsion `T(e_j, e_k)ⁱ = 𝕋(∂y^j, δ̄_k)ⁱ` of a connection.
pub fn hv_torsion(conn: &ConnectionCoefficients) -> PiTensor {
    let n = conn.dim();
    let cols: Vec<Vec<JVec>> = (0..n)
        .map(|j| {
            let v = conn.frame(Direction::Vertical(j));
            (0..n)
                .map(|k| conn.torsion_op(&v, &conn.frame(Direction::Horizontal(k))))
                .collect()
        })
        .collect();
    PiTensor::from_pairs(&cols)
}

/// Subtract the (h)hv-torsion from the vertical part: `V' = V − T`.
///
/// The torsion comes from the operator, so the result is one jet order
/// below the input; composing another process afterwards needs one more.
pub fn c_process(conn: &ConnectionCoefficients) -> ConnectionCoefficients {
    let v = &conn.v - &hv_torsion(conn);
    ConnectionCoefficients::new(conn.nl.clone(), conn.h.clone(), v)
}

/// A connection together with the three obtained from it by the processes.
#[derive(Clone, Debug)]
pub struct ConnectionFamily {
    /// The starting connection.
    pub gc: ConnectionCoefficients,
    /// `p1(gc)`
    pub gh: ConnectionCoefficients,
    /// `c(gc)`
    pub gr: ConnectionCoefficients,
    /// `c(p1(gc))`
    pub gb: ConnectionCoefficients,
    /// `p1(c(gc))`, which should agree with `gb`.
    pub gb_alt: ConnectionCoefficients,
}

impl ConnectionFamily {
    pub fn derive(gc: ConnectionCoefficients, eta: &JVec) -> ConnectionFamily {
        let gh = p1_process(&gc, eta);
        let gr = c_process(&gc);
        let gb = c_process(&gh);
        let gb_alt = p1_process(&gr, eta);
        ConnectionFamily {
            gc,
            gh,
            gr,
            gb,
            gb_alt,
        }
    }

    /// Cartan, Hashiguchi, Chern–Rund and Berwald connections built directly.
    pub fn classical(geo: &LocalGeometry) -> ConnectionFamily {
        let zero = geo.t.map(|c| c.zero_like());
        let (nl, gamma, berwald) = (&geo.barthel, &geo.gamma, geo.berwald());
        let conn = |h: &PiTensor, v: &PiTensor| {
            ConnectionCoefficients::new(nl.clone(), h.clone(), v.clone())
        };
        ConnectionFamily {
            gc: conn(gamma, &geo.t),
            gh: conn(&berwald, &geo.t),
            gr: conn(gamma, &zero),
            gb: conn(&berwald, &zero),
            gb_alt: conn(&berwald, &zero),
        }
    }

    fn members(&self) -> [(&'static str, &ConnectionCoefficients); 4] {
        [
            ("gc", &self.gc),
            ("gh", &self.gh),
            ("gr", &self.gr),
            ("gb", &self.gb),
        ]
    }
}

/// One arrow of the process diagram with its largest coefficient mismatch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Arrow {
    pub label: String,
    pub residual: f64,
}

/// Residuals of every arrow: the process commutation on the top row, and,
/// when `classical` is given, the column-wise agreement with it.
pub fn diagram_residuals(
    family: &ConnectionFamily,
    classical: Option<&ConnectionFamily>,
) -> Vec<Arrow> {
    let mut out = vec![Arrow {
        label: "c∘p1 = p1∘c".into(),
        residual: family.gb.max_abs_diff(&family.gb_alt),
    }];
    out.push(Arrow {
        label: "p1 keeps N and V".into(),
        residual: family
            .gh
            .nl
            .max_abs_diff(&family.gc.nl)
            .max(family.gh.v.max_abs_diff(&family.gc.v)),
    });
    out.push(Arrow {
        label: "c keeps N and H, empties V".into(),
        residual: family
            .gr
            .nl
            .max_abs_diff(&family.gc.nl)
            .max(family.gr.h.max_abs_diff(&family.gc.h))
            .max(family.gr.v.max_abs()),
    });
    if let Some(cl) = classical {
        for ((name, ours), (_, theirs)) in family.members().into_iter().zip(cl.members()) {
            out.push(Arrow {
                label: format!("{name} under VC"),
                residual: ours.max_abs_diff(theirs),
            });
        }
    }
    out
}
