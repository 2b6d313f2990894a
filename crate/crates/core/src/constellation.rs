//! Power-level codebooks and their decoding regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gray;

/// Ordered transmit power levels, optionally with interval decoding regions
/// on the energy-statistic axis.
///
/// Region `k` (zero-based) is `(c_{k-1}, c_k]` with `c_{-1} = 0` and
/// `c_{L-1} = +inf`, so a statistic sitting exactly on a boundary belongs to
/// the lower region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    levels: Vec<f64>,
    sigma2_design: f64,
    boundaries: Option<Vec<f64>>,
}

impl Constellation {
    /// Levels with decoding boundaries `c_1..c_{L-1}`.
    pub fn new(levels: Vec<f64>, sigma2_design: f64, boundaries: Vec<f64>) -> Result<Self> {
        let c = Constellation {
            levels,
            sigma2_design,
            boundaries: Some(boundaries),
        };
        c.validate()?;
        Ok(c)
    }

    /// Levels only; decoded by a likelihood receiver rather than regions.
    pub fn levels_only(levels: Vec<f64>, sigma2_design: f64) -> Result<Self> {
        let c = Constellation {
            levels,
            sigma2_design,
            boundaries: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConstellation(m));
        if self.levels.is_empty() {
            return bad("no levels".into());
        }
        if !(self.sigma2_design.is_finite() && self.sigma2_design >= 0.0) {
            return bad(format!("design noise power {} is invalid", self.sigma2_design));
        }
        if self.levels.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return bad("levels must be finite and nonnegative".into());
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return bad("levels must be strictly increasing".into());
        }
        if let Some(c) = &self.boundaries {
            if c.len() + 1 != self.levels.len() {
                return bad(format!("{} levels need {} boundaries, got {}", self.levels.len(), self.levels.len() - 1, c.len()));
            }
            if c.iter().any(|x| !x.is_finite()) || c.windows(2).any(|w| w[0] >= w[1]) {
                return bad("boundaries must be finite and strictly increasing".into());
            }
            for (k, &p) in self.levels.iter().enumerate() {
                let r = p + self.sigma2_design;
                let lower_ok = k == 0 || c[k - 1] < r;
                let upper_ok = k + 1 == self.levels.len() || r <= c[k];
                if !(lower_ok && upper_ok) {
                    return bad(format!("receiver point {r} of level {k} lies outside its region"));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn sigma2_design(&self) -> f64 {
        self.sigma2_design
    }

    pub fn has_regions(&self) -> bool {
        self.boundaries.is_some()
    }

    pub fn boundaries(&self) -> Result<&[f64]> {
        self.boundaries.as_deref().ok_or(Error::NoRegions)
    }

    pub fn mean_power(&self) -> f64 {
        self.levels.iter().sum::<f64>() / self.levels.len() as f64
    }

    /// `r(p_k) = p_k + sigma2` for the given noise power.
    pub fn receiver_point(&self, k: usize, sigma2: f64) -> f64 {
        self.levels[k] + sigma2
    }

    /// Left and right distances from `r(p_k)` to the region edges, measured
    /// with noise power `sigma2`. Outer sides are infinite; a negative value
    /// means `r(p_k)` falls outside its own region.
    pub fn deviations(&self, sigma2: f64) -> Result<Vec<(f64, f64)>> {
        let c = self.boundaries()?;
        let last = self.levels.len() - 1;
        Ok((0..self.levels.len())
            .map(|k| {
                let r = self.levels[k] + sigma2;
                let left = if k == 0 { f64::INFINITY } else { r - c[k - 1] };
                let right = if k == last { f64::INFINITY } else { c[k] - r };
                (left, right)
            })
            .collect())
    }

    /// Number of label bits, `ceil(log2 L)`.
    pub fn bits_per_symbol(&self) -> u32 {
        gray::bits_for(self.levels.len())
    }

    /// BRGC label of level `k`.
    pub fn label(&self, k: usize) -> u64 {
        gray::gray_encode(k as u64)
    }
}
