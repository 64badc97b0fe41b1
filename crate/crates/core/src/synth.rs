//! Analytic test fields.
//!
//! Distances are measured in samples from the centre `(rows/2, cols/2)`,
//! so the apex of a cone or pyramid sits exactly on a grid point.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure, Error, Result};
use crate::grid::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// `slope · max(0, r0 − |x − c|₂)`: developable away from apex and rim.
    Cone,
    /// Same with the `L∞` distance.
    PyramidPeak,
    /// Flat disc of radius `r0` and value `height`, with a linear rim of
    /// width `edge`.
    Plateau,
    /// Ridges of value `height`, `width` samples wide and `gap` apart,
    /// running along axis 1.
    Stripes,
    /// `levels × levels` checker of constant blocks with values in
    /// `{0, height/(levels−1), …, height}`.
    Steps,
}

impl SynthKind {
    pub const ALL: [SynthKind; 5] = [
        SynthKind::Cone,
        SynthKind::PyramidPeak,
        SynthKind::Plateau,
        SynthKind::Stripes,
        SynthKind::Steps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Cone => "cone",
            SynthKind::PyramidPeak => "pyramid",
            SynthKind::Plateau => "plateau",
            SynthKind::Stripes => "stripes",
            SynthKind::Steps => "steps",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SynthKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown field kind {s:?}")))
    }
}

/// Shape parameters; each kind reads the subset it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub r0: f64,
    pub slope: f64,
    pub height: f64,
    pub edge: f64,
    pub width: usize,
    pub gap: usize,
    pub levels: usize,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            r0: 16.0,
            slope: 0.02,
            height: 1.0,
            edge: 2.0,
            width: 2,
            gap: 3,
            levels: 4,
        }
    }
}

/// Evaluates a test field on a `rows × cols` grid with spacing `h`.
pub fn synth(
    kind: SynthKind,
    rows: usize,
    cols: usize,
    h: f64,
    geom: &Geometry,
) -> Result<ScalarField> {
    ensure(rows >= 8 && cols >= 8, || {
        format!("synthetic fields need at least 8×8, got {rows}×{cols}")
    })?;
    ensure(h > 0.0 && h.is_finite(), || {
        format!("h must be positive, got {h}")
    })?;
    let (ci, cj) = ((rows / 2) as f64, (cols / 2) as f64);
    let field = match kind {
        SynthKind::Cone | SynthKind::PyramidPeak => {
            ensure(geom.r0 > 0.0 && geom.r0.is_finite(), || {
                format!("r0 must be positive, got {}", geom.r0)
            })?;
            ensure(geom.slope.is_finite(), || "slope must be finite".into())?;
            let linf = kind == SynthKind::PyramidPeak;
            ScalarField::from_fn(rows, cols, h, |i, j| {
                let (di, dj) = ((i as f64 - ci).abs(), (j as f64 - cj).abs());
                let d = if linf { di.max(dj) } else { di.hypot(dj) };
                geom.slope * (geom.r0 - d).max(0.0)
            })
        }
        SynthKind::Plateau => {
            ensure(geom.r0 > 0.0 && geom.r0.is_finite(), || {
                format!("r0 must be positive, got {}", geom.r0)
            })?;
            ensure(geom.edge >= 0.0 && geom.edge.is_finite(), || {
                "edge must be ≥ 0".into()
            })?;
            ScalarField::from_fn(rows, cols, h, |i, j| {
                let d = (i as f64 - ci).hypot(j as f64 - cj);
                let t = if geom.edge == 0.0 {
                    if d <= geom.r0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    ((geom.r0 - d) / geom.edge + 0.5).clamp(0.0, 1.0)
                };
                geom.height * t
            })
        }
        SynthKind::Stripes => {
            ensure(geom.width >= 1 && geom.gap >= 1, || {
                "stripe width and gap must be ≥ 1".into()
            })?;
            let period = geom.width + geom.gap;
            ScalarField::from_fn(rows, cols, h, |_, j| {
                if j % period < geom.width {
                    geom.height
                } else {
                    0.0
                }
            })
        }
        SynthKind::Steps => {
            ensure(geom.levels >= 2, || "steps need at least 2 levels".into())?;
            let l = geom.levels;
            ScalarField::from_fn(rows, cols, h, |i, j| {
                let (bi, bj) = (i * l / rows, j * l / cols);
                geom.height * ((bi + bj) % l) as f64 / (l - 1) as f64
            })
        }
    };
    Ok(field)
}
