use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// `φ(z) = a · exp(-1/(1 - t))`, `t = |z - c|²/R²`, supported on the closed
/// disk `B(c, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub center: C64,
    pub radius: f64,
    pub amplitude: f64,
}

impl BumpFunction {
    pub fn new(center: C64, radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("bump radius must be positive, got {radius}")));
        }
        if !amplitude.is_finite() {
            return Err(Error::InvalidArgument("bump amplitude must be finite".into()));
        }
        Ok(Self { center, radius, amplitude })
    }

    pub fn unit(center: C64, radius: f64) -> Result<Self> {
        Self::new(center, radius, 1.0)
    }

    fn t(&self, z: C64) -> f64 {
        (z - self.center).norm_sqr() / (self.radius * self.radius)
    }

    pub fn eval(&self, z: C64) -> f64 {
        let t = self.t(z);
        if t < 1.0 {
            self.amplitude * (-1.0 / (1.0 - t)).exp()
        } else {
            0.0
        }
    }

    /// Closed-form Laplacian. With `f(t) = exp(-1/s)`, `s = 1 - t`:
    /// `Δφ = a (4/R²) (t f'' + f')`, `f' = -f/s²`, `f'' = f (1 - 2s)/s⁴`.
    pub fn laplacian(&self, z: C64) -> f64 {
        let t = self.t(z);
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let f = (-1.0 / s).exp();
        if f == 0.0 {
            return 0.0;
        }
        let s2 = s * s;
        self.amplitude * 4.0 / (self.radius * self.radius) * f * (t * (1.0 - 2.0 * s) / (s2 * s2) - 1.0 / s2)
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitude.abs() * (-1.0f64).exp()
    }

    /// Whether the closed support disk intersects the closed disk `B(c, r)`.
    pub fn support_meets_disk(&self, c: C64, r: f64) -> bool {
        (self.center - c).norm() <= self.radius + r
    }
}
