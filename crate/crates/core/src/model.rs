//! Model parameters, normalization, and pointwise evaluation of the map.

use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn checked(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParam { name, value })
    }
}

/// Parameters of the raw two-species competition system with immigration,
/// before normalization:
///
/// ```text
/// x' = b1 x / (1 + c11 x + c12 y) + H1
/// y' = b2 y / (1 + c21 x + c22 y) + H2
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    pub b1: f64,
    pub b2: f64,
    pub c11: f64,
    pub c12: f64,
    pub c21: f64,
    pub c22: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
}

impl RawParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        b1: f64,
        b2: f64,
        c11: f64,
        c12: f64,
        c21: f64,
        c22: f64,
        h1: f64,
        h2: f64,
    ) -> Result<Self> {
        Ok(Self {
            b1: checked("b1", b1)?,
            b2: checked("b2", b2)?,
            c11: checked("c11", c11)?,
            c12: checked("c12", c12)?,
            c21: checked("c21", c21)?,
            c22: checked("c22", c22)?,
            h1: checked("H1", h1)?,
            h2: checked("H2", h2)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(
            self.b1, self.b2, self.c11, self.c12, self.c21, self.c22, self.h1, self.h2,
        )
        .map(|_| ())
    }
}

/// Parameters of the normalized system
///
/// ```text
/// x' = b1 x / (1 + x + c1 y) + h1
/// y' = b2 y / (1 + y + c2 x) + h2
/// ```
///
/// All six fields are strictly positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub h1: f64,
    pub h2: f64,
}

impl ModelParams {
    pub fn new(b1: f64, b2: f64, c1: f64, c2: f64, h1: f64, h2: f64) -> Result<Self> {
        Ok(Self {
            b1: checked("b1", b1)?,
            b2: checked("b2", b2)?,
            c1: checked("c1", c1)?,
            c2: checked("c2", c2)?,
            h1: checked("h1", h1)?,
            h2: checked("h2", h2)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.b1, self.b2, self.c1, self.c2, self.h1, self.h2).map(|_| ())
    }

    pub fn get(&self, name: ParamName) -> f64 {
        match name {
            ParamName::B1 => self.b1,
            ParamName::B2 => self.b2,
            ParamName::C1 => self.c1,
            ParamName::C2 => self.c2,
            ParamName::H1 => self.h1,
            ParamName::H2 => self.h2,
        }
    }

    /// Copy of `self` with one named parameter replaced.
    pub fn with(&self, name: ParamName, value: f64) -> Result<Self> {
        let mut p = *self;
        match name {
            ParamName::B1 => p.b1 = value,
            ParamName::B2 => p.b2 = value,
            ParamName::C1 => p.c1 = value,
            ParamName::C2 => p.c2 = value,
            ParamName::H1 => p.h1 = value,
            ParamName::H2 => p.h2 = value,
        }
        p.validate()?;
        Ok(p)
    }
}

/// One of the six normalized parameters, addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamName {
    B1,
    B2,
    C1,
    C2,
    H1,
    H2,
}

impl ParamName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParamName::B1 => "b1",
            ParamName::B2 => "b2",
            ParamName::C1 => "c1",
            ParamName::C2 => "c2",
            ParamName::H1 => "h1",
            ParamName::H2 => "h2",
        }
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b1" => Ok(ParamName::B1),
            "b2" => Ok(ParamName::B2),
            "c1" => Ok(ParamName::C1),
            "c2" => Ok(ParamName::C2),
            "h1" => Ok(ParamName::H1),
            "h2" => Ok(ParamName::H2),
            _ => Err(Error::InvalidArgument("unknown parameter name")),
        }
    }
}

/// A point of the plane. Coordinates are finite; membership in the
/// nonnegative quadrant is enforced per-operation, not by the type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::NonFiniteCoordinate { value: x });
        }
        if !y.is_finite() {
            return Err(Error::NonFiniteCoordinate { value: y });
        }
        Ok(Self { x, y })
    }

    pub fn in_quadrant(&self) -> bool {
        self.x >= 0.0 && self.y >= 0.0
    }

    /// South-east order: `self` precedes `other` when x is no larger and
    /// y is no smaller.
    pub fn le_se(&self, other: &Point) -> bool {
        self.x <= other.x && self.y >= other.y
    }

    /// Sup-norm distance.
    pub fn dist_inf(&self, other: &Point) -> f64 {
        let dx = (self.x - other.x).abs();
        let dy = (self.y - other.y).abs();
        dx.max(dy)
    }
}

/// Jacobian of the map at a point, row-major:
/// `a = df/dx`, `b = df/dy`, `c = dg/dx`, `d = dg/dy`.
///
/// At any interior point of the quadrant the sign configuration is
/// `(+, -, -, +)` and the determinant is positive, which makes the map
/// strongly competitive there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Jacobian2 {
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }
}

/// Axis-aligned rectangle, used for the trapping box and basin bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && y_lo.is_finite() && y_hi.is_finite()) {
            return Err(Error::InvalidArgument("rectangle bounds must be finite"));
        }
        if x_lo >= x_hi || y_lo >= y_hi {
            return Err(Error::InvalidArgument(
                "rectangle bounds must satisfy x_lo < x_hi and y_lo < y_hi",
            ));
        }
        Ok(Self { x_lo, x_hi, y_lo, y_hi })
    }

    pub fn contains(&self, pt: &Point) -> bool {
        self.x_lo <= pt.x && pt.x <= self.x_hi && self.y_lo <= pt.y && pt.y <= self.y_hi
    }
}

/// Normalize raw parameters by the change of variables
/// `(x, y) -> (c11 x, c22 y)`, which conjugates the raw system to the
/// normalized one with
/// `c1 = c12/c22`, `c2 = c21/c11`, `h1 = c11 H1`, `h2 = c22 H2`.
pub fn normalize(raw: &RawParams) -> Result<ModelParams> {
    raw.validate()?;
    ModelParams::new(
        raw.b1,
        raw.b2,
        raw.c12 / raw.c22,
        raw.c21 / raw.c11,
        raw.c11 * raw.h1,
        raw.c22 * raw.h2,
    )
}

#[inline]
pub(crate) fn map_components(p: &ModelParams, x: f64, y: f64) -> (f64, f64) {
    (
        p.b1 * x / (1.0 + x + p.c1 * y) + p.h1,
        p.b2 * y / (1.0 + y + p.c2 * x) + p.h2,
    )
}

#[inline]
pub(crate) fn step_raw(p: &ModelParams, pt: Point) -> Point {
    let (x, y) = map_components(p, pt.x, pt.y);
    Point { x, y }
}

/// Jacobian entries at an arbitrary real point, without domain checks.
/// Returns `None` when a denominator vanishes.
pub(crate) fn jacobian_raw(p: &ModelParams, x: f64, y: f64) -> Option<Jacobian2> {
    let u = 1.0 + x + p.c1 * y;
    let v = 1.0 + y + p.c2 * x;
    if u == 0.0 || v == 0.0 {
        return None;
    }
    let u2 = u * u;
    let v2 = v * v;
    Some(Jacobian2 {
        a: p.b1 * (1.0 + p.c1 * y) / u2,
        b: -p.b1 * p.c1 * x / u2,
        c: -p.b2 * p.c2 * y / v2,
        d: p.b2 * (1.0 + p.c2 * x) / v2,
    })
}

fn require_quadrant(pt: Point) -> Result<Point> {
    if !pt.x.is_finite() || !pt.y.is_finite() {
        return Err(Error::NonFiniteCoordinate {
            value: if pt.x.is_finite() { pt.y } else { pt.x },
        });
    }
    if !pt.in_quadrant() {
        return Err(Error::OutsideDomain { x: pt.x, y: pt.y });
    }
    Ok(pt)
}

/// One application of the map. The image of any quadrant point lies in
/// the trapping box.
pub fn step(p: &ModelParams, pt: Point) -> Result<Point> {
    let pt = require_quadrant(pt)?;
    Ok(step_raw(p, pt))
}

/// Closed-form Jacobian of the map at a quadrant point.
pub fn jacobian(p: &ModelParams, pt: Point) -> Result<Jacobian2> {
    let pt = require_quadrant(pt)?;
    // Denominators are >= 1 on the quadrant.
    Ok(jacobian_raw(p, pt.x, pt.y).expect("quadrant denominators are positive"))
}

/// The compact rectangle `[h1, h1+b1] x [h2, h2+b2]` that absorbs every
/// orbit after one step.
pub fn trapping_box(p: &ModelParams) -> Rect {
    Rect {
        x_lo: p.h1,
        x_hi: p.h1 + p.b1,
        y_lo: p.h2,
        y_hi: p.h2 + p.b2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> ModelParams {
        ModelParams::new(3.0, 3.0, 1.0, 1.0, 0.5, 0.5).unwrap()
    }

    #[test]
    fn normalize_identity_scaling() {
        let raw = RawParams::new(5.0, 5.0, 1.0, 1.0, 1.0, 1.0, 2.0, 3.0).unwrap();
        let p = normalize(&raw).unwrap();
        assert_eq!(p.c1, 1.0);
        assert_eq!(p.c2, 1.0);
        assert_eq!(p.h1, 2.0);
        assert_eq!(p.h2, 3.0);
    }

    #[test]
    fn normalize_general_scaling() {
        let raw = RawParams::new(3.0, 3.0, 2.0, 8.0, 6.0, 4.0, 1.0, 0.5).unwrap();
        let p = normalize(&raw).unwrap();
        assert_eq!(p.c1, 2.0);
        assert_eq!(p.c2, 3.0);
        assert_eq!(p.h1, 2.0);
        assert_eq!(p.h2, 2.0);
    }

    #[test]
    fn normalize_rejects_nonpositive_immigration() {
        let err = RawParams::new(5.0, 5.0, 1.0, 1.0, 1.0, 1.0, 0.0, 3.0).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidParam { name: "H1", value: 0.0 }
        );
    }

    #[test]
    fn step_at_origin_is_immigration_vector() {
        let img = step(&p1(), Point { x: 0.0, y: 0.0 }).unwrap();
        assert_eq!(img, Point { x: 0.5, y: 0.5 });
    }

    #[test]
    fn step_at_unit_point() {
        let img = step(&p1(), Point { x: 1.0, y: 1.0 }).unwrap();
        assert_eq!(img, Point { x: 1.5, y: 1.5 });
    }

    #[test]
    fn diagonal_fixed_point_is_fixed() {
        // On the diagonal the fixed-point equation reduces to
        // 2x^2 - 3x - 0.5 = 0 for these parameters.
        let xbar = (3.0 + 13f64.sqrt()) / 4.0;
        let img = step(&p1(), Point { x: xbar, y: xbar }).unwrap();
        assert!((img.x - xbar).abs() <= 1e-12);
        assert!((img.y - xbar).abs() <= 1e-12);
    }

    #[test]
    fn step_rejects_negative_start() {
        let err = step(&p1(), Point { x: -1.0, y: 0.0 }).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain { .. }));
    }

    #[test]
    fn jacobian_at_origin_is_diagonal() {
        let j = jacobian(&p1(), Point { x: 0.0, y: 0.0 }).unwrap();
        assert_eq!(j.a, 3.0);
        assert_eq!(j.b, 0.0);
        assert_eq!(j.c, 0.0);
        assert_eq!(j.d, 3.0);
    }

    #[test]
    fn jacobian_determinant_closed_form() {
        // det = b1 b2 (c2 x + c1 y + 1) / ((c2 x + y + 1)^2 (x + c1 y + 1)^2)
        let j = jacobian(&p1(), Point { x: 1.0, y: 1.0 }).unwrap();
        assert!((j.det() - 1.0 / 3.0).abs() <= 1e-15);
    }

    #[test]
    fn trapping_box_bounds() {
        let b = trapping_box(&p1());
        assert_eq!(b, Rect { x_lo: 0.5, x_hi: 3.5, y_lo: 0.5, y_hi: 3.5 });
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(trapping_box(&p), Rect { x_lo: 1.0, x_hi: 2.0, y_lo: 1.0, y_hi: 2.0 });
    }
}
