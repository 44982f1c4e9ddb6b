//! Equiangular latitude-longitude grids for exporting fields as plot data.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimate::write_text;
use crate::sphere::{PointSet, Ring};

/// `n_lat` latitudes from -90° to 90° inclusive, `n_lon` longitudes from
/// 0° in steps of `360°/n_lon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatLonGrid {
    n_lat: usize,
    n_lon: usize,
}

impl Default for LatLonGrid {
    /// One-degree grid, 181 × 360.
    fn default() -> Self {
        LatLonGrid { n_lat: 181, n_lon: 360 }
    }
}

impl LatLonGrid {
    pub fn new(n_lat: usize, n_lon: usize) -> Result<Self> {
        if n_lat < 2 || n_lon < 1 {
            return Err(Error::validation(format!(
                "grid needs at least 2 latitudes and 1 longitude, got {n_lat}x{n_lon}"
            )));
        }
        Ok(LatLonGrid { n_lat, n_lon })
    }

    /// Parses `<n_lat>x<n_lon>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (a, b) = spec
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::validation(format!("grid {spec:?} is not of the form 181x360")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::validation(format!("grid {spec:?} is not of the form 181x360")))
        };
        Self::new(parse(a)?, parse(b)?)
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn len(&self) -> usize {
        self.n_lat * self.n_lon
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn latitude_deg(&self, i: usize) -> f64 {
        -90.0 + 180.0 * i as f64 / (self.n_lat - 1) as f64
    }

    pub fn longitude_deg(&self, k: usize) -> f64 {
        360.0 * k as f64 / self.n_lon as f64
    }

    /// Grid points, latitude-major, as rings.
    pub fn points(&self) -> PointSet {
        let rings = (0..self.n_lat)
            .map(|i| Ring {
                z: self.latitude_deg(i).to_radians().sin(),
                phi0: 0.0,
                count: self.n_lon,
            })
            .collect();
        PointSet::from_rings(rings)
    }

    /// Writes `# <header>` then `lat,lon,truth,approx,error` rows with
    /// `error = truth - approx`.
    pub fn write_csv(&self, path: impl AsRef<Path>, header: &str, truth: &[f64], approx: &[f64]) -> Result<()> {
        for v in [truth, approx] {
            if v.len() != self.len() {
                return Err(Error::Shape {
                    expected: self.len(),
                    got: v.len(),
                });
            }
        }
        let mut out = String::with_capacity(self.len() * 64 + header.len() + 64);
        out.push_str(&format!("# {header}\nlat,lon,truth,approx,error\n"));
        for i in 0..self.n_lat {
            let lat = self.latitude_deg(i);
            for k in 0..self.n_lon {
                let idx = i * self.n_lon + k;
                let (t, a) = (truth[idx], approx[idx]);
                out.push_str(&format!(
                    "{lat},{},{t:.10e},{a:.10e},{:.10e}\n",
                    self.longitude_deg(k),
                    t - a
                ));
            }
        }
        write_text(path.as_ref(), &out)
    }

    /// Writes `# <header>` then `lat,lon,<column>` rows.
    pub fn write_values_csv(&self, path: impl AsRef<Path>, header: &str, column: &str, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                got: values.len(),
            });
        }
        let mut out = String::with_capacity(self.len() * 32 + header.len() + 32);
        out.push_str(&format!("# {header}\nlat,lon,{column}\n"));
        for i in 0..self.n_lat {
            let lat = self.latitude_deg(i);
            for k in 0..self.n_lon {
                out.push_str(&format!("{lat},{},{:.10e}\n", self.longitude_deg(k), values[i * self.n_lon + k]));
            }
        }
        write_text(path.as_ref(), &out)
    }
}
