use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// A rectangle and a spacing; cells are `h × h` squares starting at
/// `(x_min, y_min)`, enough of them to cover the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, h: f64) -> Result<Self> {
        let spec = Self { x_min, x_max, y_min, y_max, h };
        spec.validate()?;
        Ok(spec)
    }

    /// Square `[-w, w]²`.
    pub fn square(half_width: f64, h: f64) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, h)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min
            && self.h > 0.0
            && self.h.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("degenerate grid {self:?}")))
        }
    }

    pub fn nx(&self) -> usize {
        (((self.x_max - self.x_min) / self.h) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn ny(&self) -> usize {
        (((self.y_max - self.y_min) / self.h) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn cell_center(&self, i: usize, j: usize) -> C64 {
        C64::new(self.x_min + (i as f64 + 0.5) * self.h, self.y_min + (j as f64 + 0.5) * self.h)
    }

    /// Whether the closed disk `B(c, r)` lies inside the covered rectangle.
    pub fn contains_disk(&self, c: C64, r: f64) -> bool {
        let x_hi = self.x_min + self.nx() as f64 * self.h;
        let y_hi = self.y_min + self.ny() as f64 * self.h;
        c.re - r >= self.x_min && c.re + r <= x_hi && c.im - r >= self.y_min && c.im + r <= y_hi
    }

    /// A bounding box inflated by `margin` on every side.
    pub fn inflated(bbox: (f64, f64, f64, f64), margin: f64, h: f64) -> Result<Self> {
        Self::new(bbox.0 - margin, bbox.1 + margin, bbox.2 - margin, bbox.3 + margin, h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

/// Scalar samples or cell masses on a grid, row-major with `x` fastest.
/// Cells whose value is undefined (a `-inf` potential in the stencil) are
/// flagged in `mask` and hold `0.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl GridField {
    pub fn zeros(spec: GridSpec) -> Self {
        let (nx, ny) = (spec.nx(), spec.ny());
        Self { spec, nx, ny, values: vec![0.0; nx * ny], mask: vec![false; nx * ny] }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let k = self.index(i, j);
        (!self.mask[k]).then(|| self.values[k])
    }

    pub fn cell_center(&self, i: usize, j: usize) -> C64 {
        self.spec.cell_center(i, j)
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Iterates `(center, value)` over unmasked cells.
    pub fn cells(&self) -> impl Iterator<Item = (C64, f64)> + '_ {
        (0..self.ny)
            .flat_map(move |j| (0..self.nx).filter_map(move |i| self.get(i, j).map(|v| (self.cell_center(i, j), v))))
    }

    pub fn header(&self) -> GridHeader {
        GridHeader {
            x_min: self.spec.x_min,
            x_max: self.spec.x_min + self.nx as f64 * self.spec.h,
            y_min: self.spec.y_min,
            y_max: self.spec.y_min + self.ny as f64 * self.spec.h,
            h: self.spec.h,
            nx: self.nx,
            ny: self.ny,
        }
    }

    /// `x,y,value` rows in shortest round-trip decimal; masked cells carry
    /// the literal `masked`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,value")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let z = self.cell_center(i, j);
                match self.get(i, j) {
                    Some(v) => writeln!(out, "{},{},{}", z.re, z.im, v)?,
                    None => writeln!(out, "{},{},masked", z.re, z.im)?,
                }
            }
        }
        Ok(())
    }

    pub fn write_header_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, &self.header()).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read(header: &GridHeader, csv: impl BufRead) -> Result<Self> {
        let spec = GridSpec::new(header.x_min, header.x_max, header.y_min, header.y_max, header.h)?;
        let mut field = GridField::zeros(spec);
        if (field.nx, field.ny) != (header.nx, header.ny) {
            return Err(Error::Format("header dimensions do not match bounds".into()));
        }
        let mut lines = csv.lines();
        match lines.next() {
            Some(Ok(l)) if l.trim() == "x,y,value" => {}
            _ => return Err(Error::Format("missing x,y,value header".into())),
        }
        let mut k = 0;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if k >= field.values.len() {
                return Err(Error::Format("too many rows".into()));
            }
            let value = line.rsplit(',').next().unwrap_or("");
            if value == "masked" {
                field.mask[k] = true;
            } else {
                field.values[k] = value.parse().map_err(|_| Error::Format(format!("bad value {value:?}")))?;
            }
            k += 1;
        }
        if k != field.values.len() {
            return Err(Error::Format(format!("expected {} rows, got {k}", field.values.len())));
        }
        Ok(field)
    }
}
