//! Critical curves of the map: explicit branches, implicit residuals,
//! slopes, and elimination of the two conics to a single shifted quartic.
//!
//! The critical sets are
//!
//! ```text
//! C1 = { x = f(x, y) } :  x^2 + c1 x y + (1 - b1 - h1) x - c1 h1 y - h1 = 0
//! C2 = { y = g(x, y) } :  y^2 + c2 x y + (1 - b2 - h2) y - c2 h2 x - h2 = 0
//! ```
//!
//! Both are hyperbolas whose branches are graphs of decreasing functions.
//! Their intersections are exactly the fixed points of the map. C1 has a
//! vertical asymptote at `x = h1`; C2 has a horizontal asymptote `y = h2`.

use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::model::{jacobian, ModelParams, Point};
use crate::poly;

/// Identifier of an explicit critical-curve branch.
///
/// `C1` excludes the abscissa `x = h1`; the two `C2` branches are the two
/// solutions of the quadratic in `y` and exist wherever its discriminant
/// is nonnegative (everywhere on `x >= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveBranch {
    C1,
    C2Plus,
    C2Minus,
}

impl CurveBranch {
    pub fn eval(&self, p: &ModelParams, x: f64) -> Result<f64> {
        match self {
            CurveBranch::C1 => y1(p, x),
            CurveBranch::C2Plus => y2_branches(p, x).map(|(plus, _)| plus),
            CurveBranch::C2Minus => y2_branches(p, x).map(|(_, minus)| minus),
        }
    }

    /// Abscissa excluded from the branch domain, if any.
    pub fn excluded_abscissa(&self, p: &ModelParams) -> Option<f64> {
        match self {
            CurveBranch::C1 => Some(p.h1),
            _ => None,
        }
    }
}

/// Pair of critical-curve slopes at a point, from the Jacobian:
/// `s1 = (1 - a)/b` for C1 and `s2 = c/(1 - d)` for C2.
///
/// At any equilibrium in the open quadrant both slopes are negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopePair {
    pub s1: f64,
    pub s2: f64,
}

/// Explicit branch of C1:
/// `y1(x) = (x^2 + (1 - b1 - h1) x - h1) / (c1 (h1 - x))`, for `x != h1`.
///
/// Note the cleared-denominator curve contains spurious points where
/// `1 + x + c1 y = 0`; those never lie in the nonnegative quadrant.
pub fn y1(p: &ModelParams, x: f64) -> Result<f64> {
    let den = p.c1 * (p.h1 - x);
    if den == 0.0 {
        return Err(Error::PoleAt { x });
    }
    Ok((x * x + (1.0 - p.b1 - p.h1) * x - p.h1) / den)
}

/// The two explicit branches of C2 at the abscissa `x`, returned as
/// `(y2_plus, y2_minus)`:
///
/// ```text
/// y2±(x) = ( -1 + b2 + h2 - c2 x ± sqrt(D(x)) ) / 2,
/// D(x) = (-b2 - h2 + c2 x + 1)^2 + 4 (c2 x h2 + h2)
/// ```
///
/// For every x the value `y = h2` lies strictly between the two branches,
/// so `y2_plus` carries all quadrant points of C2.
pub fn y2_branches(p: &ModelParams, x: f64) -> Result<(f64, f64)> {
    let half_b = p.c2 * x + 1.0 - p.b2 - p.h2;
    let disc = half_b * half_b + 4.0 * (p.c2 * x * p.h2 + p.h2);
    if disc < 0.0 {
        return Err(Error::NoRealBranch { x, discriminant: disc });
    }
    let s = sqrt(disc);
    Ok(((-half_b + s) / 2.0, (-half_b - s) / 2.0))
}

/// Residuals of the two implicit conic equations at a point; each is zero
/// exactly on the corresponding cleared-denominator critical set.
pub fn implicit_residuals(p: &ModelParams, pt: Point) -> (f64, f64) {
    let (x, y) = (pt.x, pt.y);
    let r1 = x * x + p.c1 * x * y + (1.0 - p.b1 - p.h1) * x - p.c1 * p.h1 * y - p.h1;
    let r2 = y * y + p.c2 * x * y + (1.0 - p.b2 - p.h2) * y - p.c2 * p.h2 * x - p.h2;
    (r1, r2)
}

pub(crate) fn slopes_from_jacobian(j: &crate::model::Jacobian2) -> Result<SlopePair> {
    if j.b == 0.0 {
        return Err(Error::DegenerateSlope {
            reason: "f_y vanishes (only possible at x = 0)",
        });
    }
    if j.d >= 1.0 {
        return Err(Error::DegenerateSlope {
            reason: "g_y >= 1 (cannot occur at an equilibrium)",
        });
    }
    Ok(SlopePair {
        s1: (1.0 - j.a) / j.b,
        s2: j.c / (1.0 - j.d),
    })
}

/// Critical-curve slopes at a quadrant point. Where the point lies on C1
/// (resp. C2), `s1` (resp. `s2`) is the derivative of the corresponding
/// explicit branch.
pub fn slopes_at(p: &ModelParams, pt: Point) -> Result<SlopePair> {
    let j = jacobian(p, pt)?;
    slopes_from_jacobian(&j)
}

/// The polynomial obtained by eliminating `y` between the two conics and
/// recentering at the asymptote, `X = x - h1`.
///
/// Coefficients are ascending in `X`; the leading term is exactly
/// `(1 - c1 c2) X^4` and the constant term is `b1^2 h1^2`. When
/// `c1 c2 = 1` the degree drops to at most three with leading cubic
/// coefficient `1 - b1 - c1 + b2 c1`. Real roots `X` shifted back by `h1`
/// are exactly the abscissae of the curve intersections off the asymptote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftedQuartic {
    /// Ascending coefficients `q0..q4` of the polynomial in `X`.
    pub coeffs: [f64; 5],
    /// Degree after discarding negligible leading coefficients.
    pub effective_degree: usize,
}

/// Two roots closer than this (relative) separation are treated as one
/// cluster; cluster size feeds contact-order estimation.
pub const ROOT_CLUSTER_TOL: f64 = 1e-6;

impl ShiftedQuartic {
    pub fn eval(&self, x: f64) -> f64 {
        poly::eval(&self.coeffs, x)
    }

    /// All complex roots of the effective-degree polynomial.
    pub fn roots(&self) -> Vec<Complex64> {
        poly::roots(&self.coeffs[..=self.effective_degree])
    }

    /// Roots grouped into clusters of nearby values; each cluster is a
    /// centroid plus a multiplicity.
    pub fn root_clusters(&self) -> Vec<(Complex64, usize)> {
        let roots = self.roots();
        let mut used = [false; 4];
        let mut clusters = Vec::new();
        for i in 0..roots.len() {
            if used[i] {
                continue;
            }
            let mut members = alloc::vec![roots[i]];
            used[i] = true;
            // Grow the cluster until no further root is close to any member.
            let mut grew = true;
            while grew {
                grew = false;
                for (j, r) in roots.iter().enumerate() {
                    if used[j] {
                        continue;
                    }
                    let close = members.iter().any(|m| {
                        crate::math::cabs(*m - *r) < ROOT_CLUSTER_TOL * (1.0 + crate::math::cabs(*m))
                    });
                    if close {
                        members.push(*r);
                        used[j] = true;
                        grew = true;
                    }
                }
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for m in &members {
                sum += m;
            }
            clusters.push((sum / members.len() as f64, members.len()));
        }
        clusters
    }
}

/// Eliminate `y` between the two conics: substitute the explicit C1
/// branch into the C2 polynomial, clear the squared denominator
/// `(c1 (h1 - x))^2`, and recenter with `X = x - h1`.
pub fn shifted_quartic(p: &ModelParams) -> ShiftedQuartic {
    // C1 numerator N(x) = x^2 + (1 - b1 - h1) x - h1 over D(x) = c1 (h1 - x).
    let n = [-p.h1, 1.0 - p.b1 - p.h1, 1.0];
    let d = [p.c1 * p.h1, -p.c1];
    // C2(y) = y^2 + A(x) y - E(x), A = c2 x + (1 - b2 - h2), E = c2 h2 x + h2.
    let a = [1.0 - p.b2 - p.h2, p.c2];
    let e = [p.h2, p.c2 * p.h2];

    // Q = N^2 + A N D - E D^2, a quartic in x with leading coefficient
    // exactly 1 - c1 c2 and Q(h1) = b1^2 h1^2.
    let mut q = poly::mul(&n, &n);
    let nd = poly::mul(&n, &d);
    poly::add_scaled(&mut q, 1.0, &poly::mul(&a, &nd));
    let dd = poly::mul(&d, &d);
    poly::add_scaled(&mut q, -1.0, &poly::mul(&e, &dd));
    q.resize(5, 0.0);
    poly::taylor_shift(&mut q, p.h1);

    let coeffs = [q[0], q[1], q[2], q[3], q[4]];
    let max_abs = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut effective_degree = 0;
    for (k, c) in coeffs.iter().enumerate() {
        if c.abs() > 1e-13 * max_abs {
            effective_degree = k;
        }
    }
    ShiftedQuartic { coeffs, effective_degree }
}
