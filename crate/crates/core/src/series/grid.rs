use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polar sample of the closed disk `|z| <= r_max < 1`.
///
/// Points are `r_values[i] · exp(2πi j / angles_per_radius)`. The origin is
/// never a grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct DiskGrid {
    r_values: Vec<f64>,
    angles_per_radius: u32,
    r_max: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    r_values: Vec<f64>,
    angles_per_radius: u32,
    r_max: f64,
}

impl TryFrom<RawGrid> for DiskGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        DiskGrid::new(raw.r_values, raw.angles_per_radius, raw.r_max)
    }
}

impl From<DiskGrid> for RawGrid {
    fn from(g: DiskGrid) -> Self {
        RawGrid {
            r_values: g.r_values,
            angles_per_radius: g.angles_per_radius,
            r_max: g.r_max,
        }
    }
}

impl Default for DiskGrid {
    /// 64 radii uniform on `(0, 0.995]`, 256 angles.
    fn default() -> Self {
        DiskGrid::uniform(64, 256, 0.995).expect("default grid is valid")
    }
}

impl DiskGrid {
    pub fn new(r_values: Vec<f64>, angles_per_radius: u32, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::InvalidParams(format!("r_max must lie in (0, 1), got {r_max}")));
        }
        if angles_per_radius == 0 {
            return Err(Error::InvalidParams("angles_per_radius must be positive".into()));
        }
        if r_values.is_empty() {
            return Err(Error::InvalidParams("grid needs at least one radius".into()));
        }
        if r_values.iter().any(|&r| !(r > 0.0 && r <= r_max)) {
            return Err(Error::InvalidParams(format!("radii must lie in (0, {r_max}]")));
        }
        if r_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("radii must be strictly ascending".into()));
        }
        Ok(DiskGrid {
            r_values,
            angles_per_radius,
            r_max,
        })
    }

    /// `radii` equispaced radii `r_max·(i+1)/radii`.
    pub fn uniform(radii: u32, angles_per_radius: u32, r_max: f64) -> Result<Self> {
        if radii == 0 {
            return Err(Error::InvalidParams("grid needs at least one radius".into()));
        }
        let r_values = (1..=radii)
            .map(|i| r_max * f64::from(i) / f64::from(radii))
            .collect();
        DiskGrid::new(r_values, angles_per_radius, r_max)
    }

    /// Parses the `RxA` shorthand, e.g. `64x256`.
    pub fn from_spec(spec: &str, r_max: f64) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("grid spec must look like 64x256, got '{spec}'"));
        let (r, a) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
        let radii = r.trim().parse().map_err(|_| bad())?;
        let angles = a.trim().parse().map_err(|_| bad())?;
        DiskGrid::uniform(radii, angles, r_max)
    }

    pub fn r_values(&self) -> &[f64] {
        &self.r_values
    }

    pub fn angles_per_radius(&self) -> u32 {
        self.angles_per_radius
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.r_values.len() * self.angles_per_radius as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, radius_index: usize, angle_index: u32) -> Complex64 {
        let theta = std::f64::consts::TAU * f64::from(angle_index) / f64::from(self.angles_per_radius);
        Complex64::from_polar(self.r_values[radius_index], theta)
    }

    /// Points on one circle, in angle-index order.
    pub fn circle(&self, radius_index: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.angles_per_radius).map(move |j| self.point(radius_index, j))
    }
}
