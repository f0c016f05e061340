//! Closed-form Dirichlet eigenvalues of disks, annuli and half-annuli.

pub mod bessel;

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_j, bessel_y, wronskian_defect};

use crate::error::{Error, Result};
use crate::geometry::star::gauss_legendre;

/// Target function whose smallest positive root is sought.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// J_order(ω).
    JZero,
    /// J_order(ω r_in) Y_order(ω r_out) − J_order(ω r_out) Y_order(ω r_in).
    CrossProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselRootQuery {
    pub order: u32,
    pub kind: RootKind,
    /// (r_in, r_out), cross-product queries only.
    pub radii: Option<(f64, f64)>,
}

/// Outcome of a root search, with the scan diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselRoot {
    pub omega: f64,
    /// Final bisection bracket.
    pub bracket: (f64, f64),
    /// The scan interval containing the first sign change.
    pub scan_bracket: (f64, f64),
    pub scan_steps: usize,
    /// Largest relative Wronskian defect seen at the bracket ends.
    pub wronskian_defect: f64,
}

const SCAN_RATIO: f64 = 1.05;
const MAX_SCAN_STEPS: usize = 4000;

impl BesselRootQuery {
    pub fn j_zero(order: u32) -> Self {
        Self {
            order,
            kind: RootKind::JZero,
            radii: None,
        }
    }

    pub fn cross_product(order: u32, r_in: f64, r_out: f64) -> Self {
        Self {
            order,
            kind: RootKind::CrossProduct,
            radii: Some((r_in, r_out)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.order > 1 {
            return Err(Error::Precondition(format!("unsupported order {}", self.order)));
        }
        if let RootKind::CrossProduct = self.kind {
            match self.radii {
                Some((a, b)) if a > 0.0 && b > a && b.is_finite() => {}
                _ => {
                    return Err(Error::Precondition(format!(
                        "cross-product query needs 0 < r_in < r_out, got {:?}",
                        self.radii
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        let n = self.order;
        match (self.kind, self.radii) {
            (RootKind::JZero, _) => bessel_j(n, omega),
            (RootKind::CrossProduct, Some((a, b))) => Ok(bessel_j(n, omega * a)? * bessel_y(n, omega * b)?
                - bessel_j(n, omega * b)? * bessel_y(n, omega * a)?),
            _ => Err(Error::Precondition("cross-product query without radii".into())),
        }
    }

    fn scale(&self) -> f64 {
        self.radii.map_or(1.0, |(_, b)| b)
    }

    /// Smallest positive root: geometric scan from ω = 10⁻³/r_out with ratio
    /// 1.05 to the first sign change, then bisection to 10⁻¹² relative.
    pub fn smallest_root(&self) -> Result<BesselRoot> {
        self.validate()?;
        let mut lo = 1e-3 / self.scale();
        let mut f_lo = self.eval(lo)?;
        let mut steps = 0;
        let (mut a, mut b) = loop {
            if steps >= MAX_SCAN_STEPS {
                return Err(Error::Bracketing(format!(
                    "no sign change of {:?} found on [{}, {}] after {} scan steps",
                    self,
                    1e-3 / self.scale(),
                    lo,
                    steps
                )));
            }
            let hi = lo * SCAN_RATIO;
            let f_hi = self.eval(hi)?;
            steps += 1;
            if f_hi == 0.0 {
                break (hi, hi);
            }
            if (f_lo > 0.0) != (f_hi > 0.0) {
                break (lo, hi);
            }
            lo = hi;
            f_lo = f_hi;
        };
        let scan_bracket = (a, b);
        let mut fa = self.eval(a)?;
        while b - a > 1e-12 * a {
            let m = 0.5 * (a + b);
            let fm = self.eval(m)?;
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if (fm > 0.0) == (fa > 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let omega = 0.5 * (a + b);
        let r = self.radii.map_or((1.0, 1.0), |r| r);
        let defect = [omega * r.0, omega * r.1]
            .iter()
            .map(|&x| wronskian_defect(x))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if defect > 1e-9 {
            log::warn!("Bessel Wronskian defect {defect:e} near ω = {omega}");
        }
        Ok(BesselRoot {
            omega,
            bracket: (a, b),
            scan_bracket,
            scan_steps: steps,
            wronskian_defect: defect,
        })
    }
}

/// First positive zero j₀,₁ of J₀.
pub fn j01() -> f64 {
    BesselRootQuery::j_zero(0)
        .smallest_root()
        .expect("J0 has a zero near 2.4")
        .omega
}

/// λ₁ of the disk of radius R: (j₀,₁/R)².
pub fn disk_lambda1(radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::Precondition(format!("radius must be positive, got {radius}")));
    }
    Ok((j01() / radius).powi(2))
}

/// λ₁ of the annulus r_in < |x| < r_out.
pub fn annulus_lambda1(r_in: f64, r_out: f64) -> Result<f64> {
    Ok(BesselRootQuery::cross_product(0, r_in, r_out).smallest_root()?.omega.powi(2))
}

/// λ₁ of the half-annulus, equal to λ₂ of the full annulus.
pub fn half_annulus_lambda1(r_in: f64, r_out: f64) -> Result<f64> {
    Ok(BesselRootQuery::cross_product(1, r_in, r_out).smallest_root()?.omega.powi(2))
}

/// Ring width h for which the ring B̄(1+h) minus B(1) and the half-ring
/// K⁺ (upper half of B̄(r₀) minus B(1)) have equal perimeter.
pub fn ring_admissible_h(r0: f64) -> Result<f64> {
    if !(r0 > 1.0) {
        return Err(Error::Precondition(format!("r0 must exceed 1, got {r0}")));
    }
    Ok((r0 - 3.0) / 2.0 + (r0 - 1.0) / PI)
}

/// Perimeter of the half-ring between radii r₁ and r₀: π(r₀+r₁) + 2(r₀−r₁).
pub fn half_ring_perimeter(r1: f64, r0: f64) -> f64 {
    PI * (r0 + r1) + 2.0 * (r0 - r1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HpwOutcome {
    /// L₀² − L₁² = 4π·area: the concentric ring value is the maximum.
    Met { lambda1: f64 },
    ConditionNotMet { defect: f64 },
}

/// Checks L₀² − L₁² = 4π·area and returns the ring eigenvalue with radii
/// L₁/2π and L₀/2π when it holds.
pub fn hpw_bound(l0: f64, l1: f64, area: f64) -> Result<HpwOutcome> {
    if !(l0 > l1 && l1 > 0.0) {
        return Err(Error::Precondition(format!("need L0 > L1 > 0, got {l0} and {l1}")));
    }
    let defect = l0 * l0 - l1 * l1 - 4.0 * PI * area;
    if defect.abs() <= 1e-9 * l0 * l0 {
        Ok(HpwOutcome::Met {
            lambda1: annulus_lambda1(l1 / (2.0 * PI), l0 / (2.0 * PI))?,
        })
    } else {
        Ok(HpwOutcome::ConditionNotMet { defect })
    }
}

/// First radial eigenfunction of the annulus r_in < r < r_out, normalized
/// to unit L² norm over the annulus and positive inside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusMode {
    pub r_in: f64,
    pub r_out: f64,
    pub omega: f64,
    scale: f64,
}

impl AnnulusMode {
    pub fn new(r_in: f64, r_out: f64) -> Result<Self> {
        let omega = BesselRootQuery::cross_product(0, r_in, r_out).smallest_root()?.omega;
        let mut m = Self {
            r_in,
            r_out,
            omega,
            scale: 1.0,
        };
        let norm2 = 2.0 * PI * gauss_legendre(r_in, r_out, 64, |r| m.raw(r).powi(2) * r);
        let mid = m.raw(0.5 * (r_in + r_out));
        m.scale = mid.signum() / norm2.sqrt();
        Ok(m)
    }

    fn raw(&self, r: f64) -> f64 {
        let w = self.omega;
        let ya = bessel_y(0, w * self.r_in).unwrap();
        let ja = bessel_j(0, w * self.r_in).unwrap();
        bessel_j(0, w * r).unwrap() * ya - bessel_y(0, w * r).unwrap() * ja
    }

    pub fn value(&self, r: f64) -> f64 {
        self.scale * self.raw(r)
    }

    /// du/dr.
    pub fn derivative(&self, r: f64) -> f64 {
        let w = self.omega;
        let ya = bessel_y(0, w * self.r_in).unwrap();
        let ja = bessel_j(0, w * self.r_in).unwrap();
        // J₀′ = −J₁, Y₀′ = −Y₁.
        self.scale * w * (-bessel_j(1, w * r).unwrap() * ya + bessel_y(1, w * r).unwrap() * ja)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusTableRow {
    pub r_in: f64,
    pub r_out: f64,
    pub lambda1_annulus: f64,
    pub lambda1_half: f64,
}

pub fn annulus_table(pairs: &[(f64, f64)]) -> Result<Vec<AnnulusTableRow>> {
    pairs
        .iter()
        .map(|&(a, b)| {
            Ok(AnnulusTableRow {
                r_in: a,
                r_out: b,
                lambda1_annulus: annulus_lambda1(a, b)?,
                lambda1_half: half_annulus_lambda1(a, b)?,
            })
        })
        .collect()
}

/// CSV with header `r_in,r_out,lambda1_annulus,lambda1_half`.
pub fn write_annulus_table<W: Write>(rows: &[AnnulusTableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
