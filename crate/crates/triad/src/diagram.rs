//! Operating diagrams: scans of a two-parameter plane.
//!
//! Each grid cell re-solves the equilibrium problem at its parameter values
//! and records a signature string listing the existing equilibria with their
//! analytic stability letters, e.g. `E00:U,E01:S,E10k1:S`. Labels are sorted
//! canonically, so identical scans produce bit-identical signatures. Region
//! boundaries are reported as midpoints of edges between cells whose
//! signatures differ.

use serde::{Deserialize, Serialize};

use crate::equilibria::{equilibria, multiplicity};
use crate::error::{Error, Result};
use crate::model::{Hydrolysis, HydrolysisMode, ModelParams};
use crate::scalar::Scalar;
use crate::stability::classify;

/// Operating parameter selectable as a scan axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamAxis {
    #[serde(rename = "D")]
    Dilution,
    #[serde(rename = "S1in")]
    S1In,
    #[serde(rename = "S2in")]
    S2In,
    #[serde(rename = "X0in")]
    X0In,
    #[serde(rename = "a1")]
    A1,
    #[serde(rename = "a2")]
    A2,
    #[serde(rename = "alpha0")]
    Alpha0,
    #[serde(rename = "alpha1")]
    Alpha1,
    #[serde(rename = "alpha2")]
    Alpha2,
    #[serde(rename = "k_hyd")]
    KHyd,
}

impl ParamAxis {
    pub fn name(self) -> &'static str {
        match self {
            ParamAxis::Dilution => "D",
            ParamAxis::S1In => "S1in",
            ParamAxis::S2In => "S2in",
            ParamAxis::X0In => "X0in",
            ParamAxis::A1 => "a1",
            ParamAxis::A2 => "a2",
            ParamAxis::Alpha0 => "alpha0",
            ParamAxis::Alpha1 => "alpha1",
            ParamAxis::Alpha2 => "alpha2",
            ParamAxis::KHyd => "k_hyd",
        }
    }

    /// Returns a copy of `p` with this parameter set to `value`, revalidated.
    pub fn apply<T: Scalar>(self, p: &ModelParams<T>, value: T) -> Result<ModelParams<T>> {
        let mut q = p.clone();
        match self {
            ParamAxis::Dilution => q.d = value,
            ParamAxis::S1In => q.s1_in = value,
            ParamAxis::S2In => q.s2_in = value,
            ParamAxis::X0In => q.x0_in = value,
            ParamAxis::A1 => q.a1 = value,
            ParamAxis::A2 => q.a2 = value,
            ParamAxis::Alpha0 => q.alpha0 = value,
            ParamAxis::Alpha1 => q.alpha1 = value,
            ParamAxis::Alpha2 => q.alpha2 = value,
            ParamAxis::KHyd => match &mut q.hydrolysis {
                Hydrolysis::FirstOrder { k_hyd } => *k_hyd = value,
                Hydrolysis::BiomassDependent { .. } => {
                    return Err(Error::WrongHydrolysis {
                        required: "first_order",
                    })
                }
            },
        }
        q.validated()
    }
}

/// Scan request: two distinct axes, their ranges and resolutions, and the
/// base parameter set.
#[derive(Debug, Clone)]
pub struct ScanSpec<T> {
    pub axis_x: ParamAxis,
    pub axis_y: ParamAxis,
    pub x_range: (T, T),
    pub y_range: (T, T),
    pub nx: usize,
    pub ny: usize,
    pub base: ModelParams<T>,
}

impl<T: Scalar> ScanSpec<T> {
    fn validate(&self) -> Result<()> {
        if self.axis_x == self.axis_y {
            return Err(Error::InvalidParameter(
                "scan axes must be distinct".to_owned(),
            ));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidParameter(
                "scan resolution must be at least 1 per axis".to_owned(),
            ));
        }
        for (name, (lo, hi), n) in [("x", self.x_range, self.nx), ("y", self.y_range, self.ny)] {
            let increasing = hi > lo;
            if n > 1 && !increasing {
                return Err(Error::InvalidParameter(format!(
                    "{name} range must have positive length"
                )));
            }
        }
        self.base.validate()
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramCell<T> {
    pub x: T,
    pub y: T,
    /// Comma-joined `label:verdict` pairs of existing equilibria, or
    /// `"invalid"` for parameter combinations that fail validation.
    pub signature: String,
    /// Hydrolysate-balance root count, biomass-dependent variant only.
    pub n_value: Option<u8>,
    pub valid: bool,
}

/// Row-major grid of cells (`y` outer, `x` inner).
#[derive(Debug, Clone, Serialize)]
pub struct DiagramGrid<T> {
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<DiagramCell<T>>,
}

impl<T: Scalar> DiagramGrid<T> {
    pub fn cell(&self, ix: usize, iy: usize) -> &DiagramCell<T> {
        &self.cells[iy * self.nx + ix]
    }

    pub fn valid_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.valid).count()
    }
}

fn axis_value<T: Scalar>(range: (T, T), n: usize, i: usize) -> T {
    if n <= 1 {
        range.0
    } else {
        let step = (range.1 - range.0) / T::from_usize(n - 1).expect("grid size fits scalar");
        range.0 + step * T::from_usize(i).expect("grid index fits scalar")
    }
}

/// Signature of one parameter set: existing equilibria with analytic
/// verdict letters, canonically ordered.
pub fn signature_at<T: Scalar>(p: &ModelParams<T>) -> Result<(String, Option<u8>)> {
    let records = equilibria(p)?;
    let mut parts = Vec::new();
    for rec in records.iter().filter(|r| r.exists) {
        let verdict = classify(p, rec)?;
        parts.push(format!("{}:{}", rec.label, verdict.analytic.letter()));
    }
    let n_value = match p.mode() {
        HydrolysisMode::BiomassDependent => Some(multiplicity(p)?.n as u8),
        HydrolysisMode::FirstOrder => None,
    };
    Ok((parts.join(","), n_value))
}

/// Evaluates the scan. Cells whose parameters fail validation are flagged
/// invalid rather than aborting the grid.
pub fn scan<T: Scalar>(spec: &ScanSpec<T>) -> Result<DiagramGrid<T>> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.nx * spec.ny);
    for iy in 0..spec.ny {
        let y = axis_value(spec.y_range, spec.ny, iy);
        for ix in 0..spec.nx {
            let x = axis_value(spec.x_range, spec.nx, ix);
            let cell = match spec
                .axis_x
                .apply(&spec.base, x)
                .and_then(|p| spec.axis_y.apply(&p, y))
                .and_then(|p| signature_at(&p))
            {
                Ok((signature, n_value)) => DiagramCell {
                    x,
                    y,
                    signature,
                    n_value,
                    valid: true,
                },
                Err(err) => {
                    log::debug!("invalid cell at ({x}, {y}): {err}");
                    DiagramCell {
                        x,
                        y,
                        signature: "invalid".to_owned(),
                        n_value: None,
                        valid: false,
                    }
                }
            };
            cells.push(cell);
        }
    }
    Ok(DiagramGrid {
        nx: spec.nx,
        ny: spec.ny,
        cells,
    })
}

/// Points along the boundary between two signature regions.
#[derive(Debug, Clone, Serialize)]
pub struct Boundary<T> {
    pub sig_a: String,
    pub sig_b: String,
    /// Midpoints of grid edges separating the two signatures, in scan order.
    pub points: Vec<(T, T)>,
}

type BoundaryGroup<T> = ((String, String), Vec<(T, T)>);

/// Collects signature-change edges, grouped per unordered signature pair.
pub fn extract_boundaries<T: Scalar>(grid: &DiagramGrid<T>) -> Vec<Boundary<T>> {
    let half = crate::scalar::lit::<T>(0.5);
    let mut groups: Vec<BoundaryGroup<T>> = Vec::new();
    let mut push = |a: &DiagramCell<T>, b: &DiagramCell<T>, point: (T, T)| {
        if !a.valid || !b.valid || a.signature == b.signature {
            return;
        }
        let key = if a.signature <= b.signature {
            (a.signature.clone(), b.signature.clone())
        } else {
            (b.signature.clone(), a.signature.clone())
        };
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push(point),
            None => groups.push((key, vec![point])),
        }
    };

    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let c = grid.cell(ix, iy);
            if ix + 1 < grid.nx {
                let r = grid.cell(ix + 1, iy);
                push(c, r, (half * (c.x + r.x), c.y));
            }
            if iy + 1 < grid.ny {
                let d = grid.cell(ix, iy + 1);
                push(c, d, (c.x, half * (c.y + d.y)));
            }
        }
    }

    groups
        .into_iter()
        .map(|((sig_a, sig_b), points)| Boundary {
            sig_a,
            sig_b,
            points,
        })
        .collect()
}
