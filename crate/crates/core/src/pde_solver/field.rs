//! Grid-sampled scalar fields and their line-oriented text format.
//!
//! ```text
//! geometry=rect
//! x_min=-1
//! x_max=1
//! y_min=-1
//! y_max=1
//! nx=5
//! ny=5
//! metadata=bubble:4
//! 1.2345678901234567e0
//! ...
//! ```
//!
//! Radial fields use `geometry=radial` with `r_min=`, `r_max=` and `n=`.
//! Values follow one per line in row-major order (`x` fastest).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::green_disk::Density;
use crate::scalar::{Point, Real};

/// Uniform tensor grid on a rectangle, boundary nodes included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectGrid<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
    pub nx: usize,
    pub ny: usize,
}

impl<T: Real> RectGrid<T> {
    pub fn new(x_min: T, x_max: T, y_min: T, y_max: T, nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 || !(x_max > x_min) || !(y_max > y_min) {
            return Err(Error::InvalidParameter("rect grid needs nx, ny ≥ 3 and positive extent".into()));
        }
        Ok(Self { x_min, x_max, y_min, y_max, nx, ny })
    }

    /// Square `[-a, a]²` with `n` nodes per side.
    pub fn centered_square(half_width: T, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    pub fn hx(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.nx - 1)
    }

    pub fn hy(&self) -> T {
        (self.y_max - self.y_min) / T::from_usize_lossy(self.ny - 1)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize, j: usize) -> Point<T> {
        Point::new(
            self.x_min + self.hx() * T::from_usize_lossy(i),
            self.y_min + self.hy() * T::from_usize_lossy(j),
        )
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx - 1 || j == self.ny - 1
    }
}

/// Uniform radial grid `r_min = r_0 < … < r_{n-1} = r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    pub r_min: T,
    pub r_max: T,
    pub n: usize,
}

impl<T: Real> RadialGrid<T> {
    pub const MIN_NODES: usize = 64;

    /// Disk grid starting at the origin.
    pub fn new(r_max: T, n: usize) -> Result<Self> {
        Self::annulus(T::zero(), r_max, n)
    }

    pub fn annulus(r_min: T, r_max: T, n: usize) -> Result<Self> {
        if n < Self::MIN_NODES {
            return Err(Error::InvalidParameter(format!("radial grid needs at least {} nodes", Self::MIN_NODES)));
        }
        if !(r_min >= T::zero() && r_max > r_min) {
            return Err(Error::InvalidParameter("radial grid needs 0 ≤ r_min < r_max".into()));
        }
        Ok(Self { r_min, r_max, n })
    }

    pub fn step(&self) -> T {
        (self.r_max - self.r_min) / T::from_usize_lossy(self.n - 1)
    }

    pub fn node(&self, k: usize) -> T {
        if k == self.n - 1 {
            self.r_max
        } else {
            self.r_min + self.step() * T::from_usize_lossy(k)
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n).map(|k| self.node(k)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry<T> {
    Radial(RadialGrid<T>),
    Rect(RectGrid<T>),
}

impl<T: Real> Geometry<T> {
    pub fn len(&self) -> usize {
        match self {
            Self::Radial(g) => g.n,
            Self::Rect(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Scalar values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField<T> {
    geometry: Geometry<T>,
    values: Vec<T>,
    metadata: String,
}

impl<T: Real> SampledField<T> {
    pub fn new(geometry: Geometry<T>, values: Vec<T>, metadata: impl Into<String>) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::Input(format!("{} values for a geometry of {} nodes", values.len(), geometry.len())));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite value at node {k}")));
        }
        let metadata = metadata.into().replace('\n', " ");
        Ok(Self { geometry, values, metadata })
    }

    /// Samples `f` at every node of a rectangle.
    pub fn from_fn_rect(grid: RectGrid<T>, f: impl Fn(Point<T>) -> T, metadata: impl Into<String>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                values.push(f(grid.point(i, j)));
            }
        }
        Self::new(Geometry::Rect(grid), values, metadata)
    }

    pub fn geometry(&self) -> &Geometry<T> {
        &self.geometry
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }

    /// Node coordinates paired with values. Radial nodes are placed on the
    /// positive real axis.
    pub fn nodes(&self) -> Vec<(Point<T>, T)> {
        match &self.geometry {
            Geometry::Radial(g) => (0..g.n).map(|k| (Point::new(g.node(k), T::zero()), self.values[k])).collect(),
            Geometry::Rect(g) => {
                let mut out = Vec::with_capacity(g.len());
                for j in 0..g.ny {
                    for i in 0..g.nx {
                        out.push((g.point(i, j), self.values[j * g.nx + i]));
                    }
                }
                out
            }
        }
    }

    /// Linear (radial) or bilinear (rect) interpolation; `None` outside.
    pub fn value_at(&self, p: Point<T>) -> Option<T> {
        match &self.geometry {
            Geometry::Radial(g) => {
                let r = p.norm();
                if r < g.r_min || r > g.r_max {
                    return None;
                }
                let s = (r - g.r_min) / g.step();
                let k = s.floor().to_usize()?.min(g.n - 2);
                let t = s - T::from_usize_lossy(k);
                Some(self.values[k] * (T::one() - t) + self.values[k + 1] * t)
            }
            Geometry::Rect(g) => {
                if p.re < g.x_min || p.re > g.x_max || p.im < g.y_min || p.im > g.y_max {
                    return None;
                }
                let sx = (p.re - g.x_min) / g.hx();
                let sy = (p.im - g.y_min) / g.hy();
                let i = sx.floor().to_usize()?.min(g.nx - 2);
                let j = sy.floor().to_usize()?.min(g.ny - 2);
                let tx = sx - T::from_usize_lossy(i);
                let ty = sy - T::from_usize_lossy(j);
                let v = |a: usize, b: usize| self.values[b * g.nx + a];
                let one = T::one();
                Some(
                    v(i, j) * (one - tx) * (one - ty)
                        + v(i + 1, j) * tx * (one - ty)
                        + v(i, j + 1) * (one - tx) * ty
                        + v(i + 1, j + 1) * tx * ty,
                )
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match &self.geometry {
            Geometry::Radial(g) => {
                let _ = writeln!(s, "geometry=radial");
                let _ = writeln!(s, "r_min={:.16e}", g.r_min);
                let _ = writeln!(s, "r_max={:.16e}", g.r_max);
                let _ = writeln!(s, "n={}", g.n);
            }
            Geometry::Rect(g) => {
                let _ = writeln!(s, "geometry=rect");
                let _ = writeln!(s, "x_min={:.16e}", g.x_min);
                let _ = writeln!(s, "x_max={:.16e}", g.x_max);
                let _ = writeln!(s, "y_min={:.16e}", g.y_min);
                let _ = writeln!(s, "y_max={:.16e}", g.y_max);
                let _ = writeln!(s, "nx={}", g.nx);
                let _ = writeln!(s, "ny={}", g.ny);
            }
        }
        let _ = writeln!(s, "metadata={}", self.metadata);
        for v in &self.values {
            let _ = writeln!(s, "{v:.16e}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut header = std::collections::HashMap::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((k, v)) = line.split_once('=') {
                if !values.is_empty() {
                    return Err(Error::Parse(format!("header line {} after values", lineno + 1)));
                }
                header.insert(k.trim().to_string(), v.trim().to_string());
            } else {
                let v: f64 = line.parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
                values.push(T::lit(v));
            }
        }
        let get = |k: &str| -> Result<&String> {
            header.get(k).ok_or_else(|| Error::Parse(format!("missing header `{k}`")))
        };
        let num = |k: &str| -> Result<T> {
            get(k)?.parse::<f64>().map(T::lit).map_err(|e| Error::Parse(format!("header `{k}`: {e}")))
        };
        let count = |k: &str| -> Result<usize> {
            get(k)?.parse::<usize>().map_err(|e| Error::Parse(format!("header `{k}`: {e}")))
        };
        let geometry = match get("geometry")?.as_str() {
            "radial" => {
                let r_min = if header.contains_key("r_min") { num("r_min")? } else { T::zero() };
                Geometry::Radial(RadialGrid::annulus(r_min, num("r_max")?, count("n")?)?)
            }
            "rect" => Geometry::Rect(RectGrid::new(
                num("x_min")?,
                num("x_max")?,
                num("y_min")?,
                num("y_max")?,
                count("nx")?,
                count("ny")?,
            )?),
            other => return Err(Error::Parse(format!("unknown geometry `{other}`"))),
        };
        let metadata = header.get("metadata").cloned().unwrap_or_default();
        Self::new(geometry, values, metadata)
    }
}

/// Interpolated field values, zero outside the grid.
impl<T: Real> Density<T> for SampledField<T> {
    fn eval(&self, y: Point<T>) -> T {
        self.value_at(y).unwrap_or_else(T::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bilinear_reproduces_bilinear_functions() {
        let g = RectGrid::new(0.0, 1.0, -1.0, 1.0, 5, 9).unwrap();
        let f = SampledField::from_fn_rect(g, |p| 1.0 + 2.0 * p.re - p.im + 0.5 * p.re * p.im, "").unwrap();
        let p: Point<f64> = Point::new(0.37, -0.41);
        let exact = 1.0 + 2.0 * p.re - p.im + 0.5 * p.re * p.im;
        assert!((f.value_at(p).unwrap() - exact).abs() < 1e-14);
        assert!(f.value_at(Point::new(1.5, 0.0)).is_none());
    }

    #[test]
    fn rejects_bad_input() {
        let g = RectGrid::new(0.0, 1.0, 0.0, 1.0, 3, 3).unwrap();
        assert!(SampledField::new(Geometry::Rect(g), vec![0.0; 8], "").is_err());
        assert!(SampledField::new(Geometry::Rect(g), vec![f64::NAN; 9], "").is_err());
        assert!(RadialGrid::<f64>::new(1.0, 10).is_err());
        assert!(SampledField::<f64>::from_text("geometry=hex\n").is_err());
    }

    proptest! {
        #[test]
        fn text_format_round_trips(vals in proptest::collection::vec(-1e6f64..1e6, 64), r in 0.1f64..10.0) {
            let g = RadialGrid::new(r, 64).unwrap();
            let f = SampledField::new(Geometry::Radial(g), vals, "test:1").unwrap();
            let back = SampledField::<f64>::from_text(&f.to_text()).unwrap();
            prop_assert_eq!(back, f);
        }

        #[test]
        fn rect_text_round_trips(vals in proptest::collection::vec(-1e3f64..1e3, 12)) {
            let g = RectGrid::new(-0.5, 0.25, 0.0, 1.0 / 3.0, 4, 3).unwrap();
            let f = SampledField::new(Geometry::Rect(g), vals, "rect").unwrap();
            let back = SampledField::<f64>::from_text(&f.to_text()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
