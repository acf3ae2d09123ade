//! Equilibrium finding, stability classification by eigenvalues and by the
//! slope criterion, contact orders, uniqueness conditions, and the
//! monotone-envelope (M&m) system.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::curves::{shifted_quartic, slopes_from_jacobian, y1, y2_branches, SlopePair};
use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::model::{jacobian_raw, trapping_box, Jacobian2, ModelParams, Point};

/// Hyperbolicity tolerance on `lambda1 - 1`.
pub const DEFAULT_HYPERBOLICITY_TOL: f64 = 1e-6;
/// Tangency tolerance on the slope difference, scaled by `1 + |s1| + |s2|`.
pub const DEFAULT_SLOPE_TOL: f64 = 1e-6;
/// Residual target for Newton refinement of fixed points.
pub const NEWTON_RESIDUAL_TARGET: f64 = 1e-10;

/// Eigenvalues of a 2x2 Jacobian with `lambda1` the one of larger modulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda1: f64,
    pub lambda2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StabilityLabel {
    LocallyAsymptoticallyStable,
    Saddle,
    Nonhyperbolic,
}

impl StabilityLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityLabel::LocallyAsymptoticallyStable => "LAS",
            StabilityLabel::Saddle => "Saddle",
            StabilityLabel::Nonhyperbolic => "Nonhyperbolic",
        }
    }
}

/// Stability verdict with a signed hyperbolicity margin. The eigenvalue
/// route stores `lambda1 - 1`; the slope route stores the
/// orientation-corrected slope difference, which has the same sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: StabilityLabel,
    pub margin: f64,
}

/// Sign of the off-diagonal Jacobian entry `b = f_y` at the point under
/// classification. At equilibria of this map `b < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    NonnegativeQuadrant,
    Other,
}

/// A fixed point of the map together with its local data.
///
/// `eig`, `slopes`, and `class` are always present for equilibria in the
/// nonnegative quadrant; outside it they are filled only where the
/// formulas remain meaningful.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub point: Point,
    pub jac: Jacobian2,
    pub eig: Option<EigenPair>,
    pub slopes: Option<SlopePair>,
    pub class: Option<Classification>,
    pub contact_order: u8,
    pub region: Region,
    pub residual: f64,
}

/// Global-behavior prediction determined by the number of equilibria in
/// the nonnegative quadrant. Indices refer to positions in the south-east
/// ordered `nonneg` list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GlobalBehavior {
    UniqueGas { index: usize },
    FoldPair { attractor: usize, nonhyperbolic: usize },
    Bistable { low: usize, saddle: usize, high: usize },
}

impl GlobalBehavior {
    pub fn kind_str(&self) -> &'static str {
        match self {
            GlobalBehavior::UniqueGas { .. } => "UniqueGAS",
            GlobalBehavior::FoldPair { .. } => "FoldPair",
            GlobalBehavior::Bistable { .. } => "Bistable",
        }
    }
}

/// All real equilibria of the map plus the south-east ordered sublist of
/// those in the nonnegative quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    /// Every validated intersection of the critical curves, sorted by x.
    pub all: Vec<Equilibrium>,
    /// Indices into `all` of the quadrant equilibria, south-east ordered
    /// (x strictly increasing, y strictly decreasing).
    pub nonneg: Vec<usize>,
    pub prediction: GlobalBehavior,
}

impl EquilibriumSet {
    pub fn nonneg_count(&self) -> usize {
        self.nonneg.len()
    }

    pub fn nonneg_eq(&self, k: usize) -> &Equilibrium {
        &self.all[self.nonneg[k]]
    }

    pub fn nonneg_iter(&self) -> impl Iterator<Item = &Equilibrium> {
        self.nonneg.iter().map(|&i| &self.all[i])
    }
}

/// Sufficient conditions for a unique quadrant equilibrium:
/// (a) `1 - b1 + h1 + c1 h2 >= 0` and `1 - b2 + h2 + c2 h1 >= 0`;
/// (b) `c1 c2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub cond_a: bool,
    pub cond_b: bool,
    pub guaranteed: bool,
}

/// Candidate solution of the four-equation monotone-envelope system
///
/// ```text
/// m    = b1 m    / (1 + m    + c1 Mbar) + h1
/// M    = b1 M    / (1 + M    + c1 mbar) + h1
/// mbar = b2 mbar / (1 + mbar + c2 M)    + h2
/// Mbar = b2 Mbar / (1 + Mbar + c2 m)    + h2
/// ```
///
/// together with its residual and the residual of the algebraic identity
/// that forces `m = M`, `mbar = Mbar` under uniqueness condition (a).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmWitness {
    pub m: f64,
    pub cap_m: f64,
    pub mbar: f64,
    pub cap_mbar: f64,
    pub system_residual: f64,
    pub identity_residual: f64,
}

impl MmWitness {
    pub fn new(m: f64, cap_m: f64, mbar: f64, cap_mbar: f64) -> Self {
        Self { m, cap_m, mbar, cap_mbar, system_residual: f64::NAN, identity_residual: f64::NAN }
    }
}

/// Eigenvalues of a 2x2 Jacobian whenever they are real, the larger
/// modulus first.
pub(crate) fn eigen_of(j: &Jacobian2) -> Option<EigenPair> {
    let half_diff = (j.a - j.d) / 2.0;
    let disc = half_diff * half_diff + j.b * j.c;
    if disc < 0.0 {
        return None;
    }
    let s = sqrt(disc);
    let mid = (j.a + j.d) / 2.0;
    let (l1, l2) = (mid + s, mid - s);
    if l1.abs() >= l2.abs() {
        Some(EigenPair { lambda1: l1, lambda2: l2 })
    } else {
        Some(EigenPair { lambda1: l2, lambda2: l1 })
    }
}

/// Classify a fixed point by the eigenvalues of its Jacobian.
///
/// Requires the hypotheses `0 < a < 1`, `0 < d < 1`, `b c > 0`, and
/// `1 + (a+d) + ad - bc > 0`, which hold at every quadrant equilibrium of
/// the map. Under them the eigenvalues are real and distinct, the larger
/// one is positive, and the smaller lies in (-1, 1).
pub fn classify_by_eigen(jac: &Jacobian2) -> Result<(EigenPair, Classification)> {
    classify_by_eigen_with_tol(jac, DEFAULT_HYPERBOLICITY_TOL)
}

pub fn classify_by_eigen_with_tol(
    jac: &Jacobian2,
    tol_h: f64,
) -> Result<(EigenPair, Classification)> {
    let Jacobian2 { a, b, c, d } = *jac;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::HypothesisViolation { inequality: "0 < a < 1", value: a });
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::HypothesisViolation { inequality: "0 < d < 1", value: d });
    }
    if !(b * c > 0.0) {
        return Err(Error::HypothesisViolation { inequality: "b c > 0", value: b * c });
    }
    let p_neg1 = 1.0 + (a + d) + (a * d - b * c);
    if !(p_neg1 > 0.0) {
        return Err(Error::HypothesisViolation {
            inequality: "1 + (a+d) + ad - bc > 0",
            value: p_neg1,
        });
    }
    let eig = eigen_of(jac).expect("bc > 0 makes the discriminant positive");
    let margin = eig.lambda1 - 1.0;
    let label = if margin.abs() <= tol_h {
        StabilityLabel::Nonhyperbolic
    } else if margin < 0.0 {
        StabilityLabel::LocallyAsymptoticallyStable
    } else {
        StabilityLabel::Saddle
    };
    Ok((eig, Classification { label, margin }))
}

/// Classify a fixed point by the slopes of the critical curves.
///
/// For `b < 0` (the only case at equilibria of this map) the sign of
/// `s1 - s2` equals the sign of `lambda1 - 1`: negative means locally
/// asymptotically stable, positive means saddle. For `b > 0` the labels
/// swap. A slope difference within tolerance is a tangency, hence
/// nonhyperbolic.
pub fn classify_by_slopes(slopes: &SlopePair, b_sign: BranchSign) -> Classification {
    classify_by_slopes_with_tol(slopes, b_sign, DEFAULT_SLOPE_TOL)
}

pub fn classify_by_slopes_with_tol(
    slopes: &SlopePair,
    b_sign: BranchSign,
    tol_s: f64,
) -> Classification {
    let diff = slopes.s1 - slopes.s2;
    let scale = 1.0 + slopes.s1.abs() + slopes.s2.abs();
    let margin = match b_sign {
        BranchSign::Negative => diff,
        BranchSign::Positive => -diff,
    };
    let label = if diff.abs() <= tol_s * scale {
        StabilityLabel::Nonhyperbolic
    } else if margin < 0.0 {
        StabilityLabel::LocallyAsymptoticallyStable
    } else {
        StabilityLabel::Saddle
    };
    Classification { label, margin }
}

/// Defects of the rational fixed-point equations at an arbitrary point.
/// `None` when a denominator vanishes.
pub(crate) fn fixed_point_defects(p: &ModelParams, x: f64, y: f64) -> Option<(f64, f64)> {
    let u = 1.0 + x + p.c1 * y;
    let v = 1.0 + y + p.c2 * x;
    if u == 0.0 || v == 0.0 {
        return None;
    }
    Some((p.b1 * x / u + p.h1 - x, p.b2 * y / v + p.h2 - y))
}

fn defect_norm(p: &ModelParams, x: f64, y: f64) -> Option<f64> {
    fixed_point_defects(p, x, y).map(|(ex, ey)| ex.abs().max(ey.abs()))
}

/// Damped 2-D Newton on the rational fixed-point equations. Returns the
/// refined point and its residual, or the best residual reached on stall.
fn newton_polish(
    p: &ModelParams,
    mut x: f64,
    mut y: f64,
    max_iter: usize,
) -> core::result::Result<(Point, f64), f64> {
    let mut res = defect_norm(p, x, y).ok_or(f64::INFINITY)?;
    for _ in 0..max_iter {
        if res <= NEWTON_RESIDUAL_TARGET {
            return Ok((Point { x, y }, res));
        }
        let (ex, ey) = fixed_point_defects(p, x, y).ok_or(res)?;
        let j = jacobian_raw(p, x, y).ok_or(res)?;
        // Solve (J - I) delta = -(ex, ey).
        let (ja, jb, jc, jd) = (j.a - 1.0, j.b, j.c, j.d - 1.0);
        let det = ja * jd - jb * jc;
        if det.abs() < 1e-300 {
            return Err(res);
        }
        let dx = (-ex * jd + ey * jb) / det;
        let dy = (-ey * ja + ex * jc) / det;
        let mut t = 1.0;
        let mut advanced = false;
        for _ in 0..30 {
            let (nx, ny) = (x + t * dx, y + t * dy);
            if let Some(nres) = defect_norm(p, nx, ny) {
                if nres < res {
                    x = nx;
                    y = ny;
                    res = nres;
                    advanced = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !advanced {
            return Err(res);
        }
    }
    if res <= NEWTON_RESIDUAL_TARGET {
        Ok((Point { x, y }, res))
    } else {
        Err(res)
    }
}

/// Seeds within this imaginary part (relative) of the real axis are
/// treated as real roots; a conjugate pair this close to the axis is a
/// tangency resolved below parameter precision.
const NEAR_REAL_TOL: f64 = 1e-8;

struct Candidate {
    point: Point,
    residual: f64,
    multiplicity: usize,
}

/// Find every equilibrium of the map.
///
/// The abscissae come from the roots of the elimination quartic (companion
/// matrix eigenvalues), are paired with the explicit C1 branch, refined by
/// damped 2-D Newton on the rational fixed-point equations to residual
/// 1e-10, deduplicated by the root-cluster tolerance, and validated. The
/// quadrant sublist is south-east ordered and fully annotated; the
/// prediction follows from its size alone.
pub fn find_equilibria(p: &ModelParams) -> Result<EquilibriumSet> {
    p.validate()?;
    let quartic = shifted_quartic(p);
    let mut cands: Vec<Candidate> = Vec::new();
    for (z, mult) in quartic.root_clusters() {
        if z.im.abs() > NEAR_REAL_TOL * (1.0 + z.re.abs()) {
            continue;
        }
        let x0 = z.re + p.h1;
        let y0 = match y1(p, x0) {
            Ok(v) if v.is_finite() => v,
            _ => continue,
        };
        let (point, residual) = match newton_polish(p, x0, y0, 100) {
            Ok(ok) => ok,
            Err(best) => {
                return Err(Error::SolverStalled { seed_x: x0, seed_y: y0, residual: best })
            }
        };
        // A refined point that left its seed cluster marks a spurious
        // (complex-pair) seed, not a real equilibrium.
        if (point.x - x0).abs() > 1e-3 * (1.0 + x0.abs()) {
            continue;
        }
        let scale = 1.0 + point.x.abs().max(point.y.abs());
        match cands
            .iter_mut()
            .find(|c| c.point.dist_inf(&point) < crate::curves::ROOT_CLUSTER_TOL * scale)
        {
            Some(existing) => {
                existing.multiplicity += mult;
                if residual < existing.residual {
                    existing.point = point;
                    existing.residual = residual;
                }
            }
            None => cands.push(Candidate { point, residual, multiplicity: mult }),
        }
    }
    cands.sort_by(|a, b| a.point.x.partial_cmp(&b.point.x).unwrap());

    let mut all = Vec::with_capacity(cands.len());
    for c in &cands {
        if c.multiplicity > 3 {
            return Err(Error::InvalidArgument("curve contact of order above three"));
        }
        let jac = jacobian_raw(p, c.point.x, c.point.y)
            .ok_or(Error::InvalidArgument("equilibrium on an excluded line"))?;
        let region = if c.point.in_quadrant() {
            Region::NonnegativeQuadrant
        } else {
            Region::Other
        };
        let (eig, slopes, class) = match region {
            Region::NonnegativeQuadrant => {
                let (eig, class) = classify_by_eigen(&jac)?;
                let slopes = slopes_from_jacobian(&jac)?;
                // Tangency evidence must agree: a multiple root cannot be a
                // clearly transversal crossing.
                if c.multiplicity >= 2 {
                    let diff = (slopes.s1 - slopes.s2).abs();
                    if diff > 1e-3 * (1.0 + slopes.s1.abs() + slopes.s2.abs()) {
                        return Err(Error::ContactOrderConflict {
                            cluster: c.multiplicity as u8,
                            finite_difference: 1,
                        });
                    }
                }
                (Some(eig), Some(slopes), Some(class))
            }
            Region::Other => (
                eigen_of(&jac),
                slopes_from_jacobian(&jac).ok(),
                classify_by_eigen(&jac).ok().map(|(_, cls)| cls),
            ),
        };
        all.push(Equilibrium {
            point: c.point,
            jac,
            eig,
            slopes,
            class,
            contact_order: c.multiplicity as u8,
            region,
            residual: c.residual,
        });
    }

    let nonneg: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(_, e)| e.region == Region::NonnegativeQuadrant)
        .map(|(i, _)| i)
        .collect();
    if nonneg.is_empty() || nonneg.len() > 3 {
        return Err(Error::InvalidArgument(
            "quadrant equilibrium count outside 1..=3",
        ));
    }
    // `all` is x-sorted, so `nonneg` is too; the south-east total order
    // additionally needs strictly decreasing y.
    for w in nonneg.windows(2) {
        let (lo, hi) = (&all[w[0]].point, &all[w[1]].point);
        if !(lo.x < hi.x && lo.y > hi.y) {
            return Err(Error::InvalidArgument(
                "quadrant equilibria are not south-east ordered",
            ));
        }
    }

    let prediction = match nonneg.len() {
        1 => GlobalBehavior::UniqueGas { index: 0 },
        2 => {
            let m0 = all[nonneg[0]].class.as_ref().map(|c| c.margin.abs()).unwrap_or(f64::MAX);
            let m1 = all[nonneg[1]].class.as_ref().map(|c| c.margin.abs()).unwrap_or(f64::MAX);
            let (nh, at) = if m0 <= m1 { (0, 1) } else { (1, 0) };
            GlobalBehavior::FoldPair { attractor: at, nonhyperbolic: nh }
        }
        _ => GlobalBehavior::Bistable { low: 0, saddle: 1, high: 2 },
    };

    Ok(EquilibriumSet { all, nonneg, prediction })
}

/// Contact order of the critical curves at an equilibrium: the
/// multiplicity of the matching elimination-quartic root, cross-checked
/// against the order of vanishing of the branch difference estimated by
/// finite differences. The two estimates agree for curves of this family;
/// a disagreement is reported as a diagnostic error.
pub fn contact_order(p: &ModelParams, eq: &Equilibrium) -> Result<u8> {
    let pt = eq.point;
    let res = defect_norm(p, pt.x, pt.y)
        .ok_or(Error::InvalidArgument("point on an excluded line"))?;
    if res > 1e-8 * (1.0 + pt.x.abs() + pt.y.abs()) {
        return Err(Error::InvalidArgument("point is not a validated equilibrium"));
    }

    let quartic = shifted_quartic(p);
    let shifted_x = pt.x - p.h1;
    let cluster = quartic
        .root_clusters()
        .into_iter()
        .min_by(|(za, _), (zb, _)| {
            (za.re - shifted_x)
                .abs()
                .partial_cmp(&(zb.re - shifted_x).abs())
                .unwrap()
        })
        .ok_or(Error::InvalidArgument("no elimination roots"))?;
    if (cluster.0.re - shifted_x).abs() > 1e-4 * (1.0 + shifted_x.abs()) {
        return Err(Error::InvalidArgument(
            "equilibrium does not match an elimination root",
        ));
    }
    let k_alg = cluster.1.min(3) as u8;

    // Order of vanishing of y1 - y2 at the abscissa, by centered finite
    // differences on the explicit branches (the branch nearer to the
    // equilibrium ordinate carries it).
    let (plus, minus) = y2_branches(p, pt.x)?;
    let use_plus = (plus - pt.y).abs() <= (minus - pt.y).abs();
    let branch = |x: f64| -> Result<f64> {
        let (pl, mi) = y2_branches(p, x)?;
        Ok(if use_plus { pl } else { mi })
    };
    let h = 1e-4 * (1.0 + pt.x.abs());
    let (x_m, x_0, x_p) = (pt.x - h, pt.x, pt.x + h);
    let (a_m, a_0, a_p) = (y1(p, x_m)?, y1(p, x_0)?, y1(p, x_p)?);
    let (b_m, b_0, b_p) = (branch(x_m)?, branch(x_0)?, branch(x_p)?);
    let (phi_m, phi_0, phi_p) = (a_m - b_m, a_0 - b_0, a_p - b_p);
    let d1 = (phi_p - phi_m) / (2.0 * h);
    let d2 = (phi_p - 2.0 * phi_0 + phi_m) / (h * h);
    let s1 = (a_p - a_m) / (2.0 * h);
    let s2 = (b_p - b_m) / (2.0 * h);
    let k1 = (a_p - 2.0 * a_0 + a_m) / (h * h);
    let k2 = (b_p - 2.0 * b_0 + b_m) / (h * h);
    let tau1 = 1e-4 * (1.0 + s1.abs() + s2.abs());
    let tau2 = 1e-4 * (1.0 + k1.abs() + k2.abs());
    let k_fd = if d1.abs() > tau1 {
        1
    } else if d2.abs() > tau2 {
        2
    } else {
        3
    };

    if k_alg == k_fd {
        Ok(k_alg)
    } else {
        Err(Error::ContactOrderConflict { cluster: k_alg, finite_difference: k_fd })
    }
}

/// Evaluate the two sufficient conditions for a unique quadrant
/// equilibrium. They are sufficient, not necessary.
pub fn uniqueness_sufficient(p: &ModelParams) -> UniquenessReport {
    let cond_a = 1.0 - p.b1 + p.h1 + p.c1 * p.h2 >= 0.0
        && 1.0 - p.b2 + p.h2 + p.c2 * p.h1 >= 0.0;
    let cond_b = p.c1 * p.c2 <= 1.0;
    UniquenessReport { cond_a, cond_b, guaranteed: cond_a || cond_b }
}

/// Fill in the residuals of a monotone-envelope witness: the sup defect of
/// the four coupled equations and the defect of the algebraic identity
///
/// ```text
/// c2 (M - m)    [ (m - h1)    + (M - h1)    + (1 - b1 + h1 + c1 h2) ]
/// + c1 (Mbar - mbar) [ (mbar - h2) + (Mbar - h2) + (1 - b2 + h2 + c2 h1) ] = 0
/// ```
///
/// which is an exact consequence of the system, so the identity residual
/// is tiny at every numerical solution.
pub fn mm_check(p: &ModelParams, w: &MmWitness) -> MmWitness {
    let e1 = w.m - (p.b1 * w.m / (1.0 + w.m + p.c1 * w.cap_mbar) + p.h1);
    let e2 = w.cap_m - (p.b1 * w.cap_m / (1.0 + w.cap_m + p.c1 * w.mbar) + p.h1);
    let e3 = w.mbar - (p.b2 * w.mbar / (1.0 + w.mbar + p.c2 * w.cap_m) + p.h2);
    let e4 = w.cap_mbar - (p.b2 * w.cap_mbar / (1.0 + w.cap_mbar + p.c2 * w.m) + p.h2);
    let system_residual = e1.abs().max(e2.abs()).max(e3.abs()).max(e4.abs());
    let identity = p.c2
        * (w.cap_m - w.m)
        * ((w.m - p.h1) + (w.cap_m - p.h1) + (1.0 - p.b1 + p.h1 + p.c1 * p.h2))
        + p.c1
            * (w.cap_mbar - w.mbar)
            * ((w.mbar - p.h2) + (w.cap_mbar - p.h2) + (1.0 - p.b2 + p.h2 + p.c2 * p.h1));
    MmWitness { system_residual, identity_residual: identity.abs(), ..*w }
}

fn mm_defects(p: &ModelParams, w: &[f64; 4]) -> Option<[f64; 4]> {
    let [m, cap_m, mbar, cap_mbar] = *w;
    let u1 = 1.0 + m + p.c1 * cap_mbar;
    let u2 = 1.0 + cap_m + p.c1 * mbar;
    let u3 = 1.0 + mbar + p.c2 * cap_m;
    let u4 = 1.0 + cap_mbar + p.c2 * m;
    if u1 == 0.0 || u2 == 0.0 || u3 == 0.0 || u4 == 0.0 {
        return None;
    }
    Some([
        m - (p.b1 * m / u1 + p.h1),
        cap_m - (p.b1 * cap_m / u2 + p.h1),
        mbar - (p.b2 * mbar / u3 + p.h2),
        cap_mbar - (p.b2 * cap_mbar / u4 + p.h2),
    ])
}

fn mm_norm(d: &[f64; 4]) -> f64 {
    d.iter().fold(0.0f64, |m, e| m.max(e.abs()))
}

/// Solve a 4x4 linear system by Gaussian elimination with partial
/// pivoting. Returns `None` on a (numerically) singular matrix.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for k in col..4 {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let mut s = b[r];
        for k in r + 1..4 {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

fn mm_newton(p: &ModelParams, mut w: [f64; 4]) -> Option<[f64; 4]> {
    let mut res = mm_norm(&mm_defects(p, &w)?);
    for _ in 0..60 {
        if res <= 1e-12 {
            return Some(w);
        }
        let d = mm_defects(p, &w)?;
        let [m, cap_m, mbar, cap_mbar] = w;
        let u1 = 1.0 + m + p.c1 * cap_mbar;
        let u2 = 1.0 + cap_m + p.c1 * mbar;
        let u3 = 1.0 + mbar + p.c2 * cap_m;
        let u4 = 1.0 + cap_mbar + p.c2 * m;
        let jac = [
            [
                1.0 - p.b1 * (1.0 + p.c1 * cap_mbar) / (u1 * u1),
                0.0,
                0.0,
                p.b1 * m * p.c1 / (u1 * u1),
            ],
            [
                0.0,
                1.0 - p.b1 * (1.0 + p.c1 * mbar) / (u2 * u2),
                p.b1 * cap_m * p.c1 / (u2 * u2),
                0.0,
            ],
            [
                0.0,
                p.b2 * mbar * p.c2 / (u3 * u3),
                1.0 - p.b2 * (1.0 + p.c2 * cap_m) / (u3 * u3),
                0.0,
            ],
            [
                p.b2 * cap_mbar * p.c2 / (u4 * u4),
                0.0,
                0.0,
                1.0 - p.b2 * (1.0 + p.c2 * m) / (u4 * u4),
            ],
        ];
        let rhs = [-d[0], -d[1], -d[2], -d[3]];
        let delta = solve4(jac, rhs)?;
        let mut t = 1.0;
        let mut advanced = false;
        for _ in 0..30 {
            let trial = [
                w[0] + t * delta[0],
                w[1] + t * delta[1],
                w[2] + t * delta[2],
                w[3] + t * delta[3],
            ];
            if let Some(dt) = mm_defects(p, &trial) {
                let nres = mm_norm(&dt);
                if nres < res {
                    w = trial;
                    res = nres;
                    advanced = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !advanced {
            return None;
        }
    }
    (res <= 1e-12).then_some(w)
}

/// Multi-start damped-Newton search for a genuinely asymmetric solution of
/// the monotone-envelope system (`M - m >= 1e-6`) over the trapping box.
/// Absence of a witness is a value, not an error: under uniqueness
/// condition (a) no asymmetric solution exists.
pub fn mm_search_asymmetric(p: &ModelParams) -> Option<MmWitness> {
    const MIN_GAP: f64 = 1e-6;
    let rect = trapping_box(p);
    let ts = [0.02, 0.25, 0.5, 0.75, 0.98];
    for &tm in &ts {
        for &t_cap_m in &ts {
            if t_cap_m <= tm {
                continue;
            }
            for &tmb in &ts {
                for &t_cap_mb in &ts {
                    let seed = [
                        rect.x_lo + p.b1 * tm,
                        rect.x_lo + p.b1 * t_cap_m,
                        rect.y_lo + p.b2 * tmb,
                        rect.y_lo + p.b2 * t_cap_mb,
                    ];
                    let Some(mut w) = mm_newton(p, seed) else { continue };
                    if w[0] > w[1] {
                        w.swap(0, 1);
                        w.swap(2, 3);
                    }
                    if w[1] - w[0] < MIN_GAP || w[2] > w[3] {
                        continue;
                    }
                    if w.iter().any(|&v| v < 0.0) {
                        continue;
                    }
                    let filled = mm_check(p, &MmWitness::new(w[0], w[1], w[2], w[3]));
                    if filled.system_residual <= 1e-10 {
                        return Some(filled);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn p1() -> ModelParams {
        ModelParams::new(3.0, 3.0, 1.0, 1.0, 0.5, 0.5).unwrap()
    }

    #[test]
    fn eigen_classification_of_symmetric_matrices() {
        // Symmetric 2x2 with equal diagonal: eigenvalues are a -+ b.
        let j = Jacobian2 { a: 0.42963, b: -0.26761, c: -0.26761, d: 0.42963 };
        let (eig, class) = classify_by_eigen(&j).unwrap();
        assert!((eig.lambda1 - 0.69724).abs() <= 1e-12);
        assert!((eig.lambda2 - 0.16202).abs() <= 1e-12);
        assert_eq!(class.label, StabilityLabel::LocallyAsymptoticallyStable);

        let j = Jacobian2 { a: 0.5, b: -0.6, c: -0.6, d: 0.5 };
        let (eig, class) = classify_by_eigen(&j).unwrap();
        assert!((eig.lambda1 - 1.1).abs() <= 1e-12);
        assert!((eig.lambda2 + 0.1).abs() <= 1e-12);
        assert_eq!(class.label, StabilityLabel::Saddle);

        let j = Jacobian2 { a: 0.5, b: -0.5, c: -0.5, d: 0.5 };
        let (eig, class) = classify_by_eigen(&j).unwrap();
        assert!((eig.lambda1 - 1.0).abs() <= 1e-12);
        assert_eq!(class.label, StabilityLabel::Nonhyperbolic);
    }

    #[test]
    fn eigen_hypothesis_violations_are_named() {
        let j = Jacobian2 { a: 1.5, b: -0.1, c: -0.1, d: 0.5 };
        assert_eq!(
            classify_by_eigen(&j).unwrap_err(),
            Error::HypothesisViolation { inequality: "0 < a < 1", value: 1.5 }
        );
        let j = Jacobian2 { a: 0.5, b: 0.1, c: -0.1, d: 0.5 };
        assert!(matches!(
            classify_by_eigen(&j).unwrap_err(),
            Error::HypothesisViolation { inequality: "b c > 0", .. }
        ));
    }

    #[test]
    fn slope_classification_orientation() {
        let s = SlopePair { s1: -2.13148, s2: -0.46917 };
        let class = classify_by_slopes(&s, BranchSign::Negative);
        assert_eq!(class.label, StabilityLabel::LocallyAsymptoticallyStable);
        // With b > 0 the labels swap.
        let class = classify_by_slopes(&s, BranchSign::Positive);
        assert_eq!(class.label, StabilityLabel::Saddle);
        // Equal slopes mean tangency.
        let s = SlopePair { s1: -1.0, s2: -1.0 };
        let class = classify_by_slopes(&s, BranchSign::Negative);
        assert_eq!(class.label, StabilityLabel::Nonhyperbolic);
    }

    #[test]
    fn p1_has_unique_diagonal_equilibrium() {
        let set = find_equilibria(&p1()).unwrap();
        assert_eq!(set.nonneg_count(), 1);
        let e = set.nonneg_eq(0);
        let xbar = (3.0 + 13f64.sqrt()) / 4.0;
        assert!((e.point.x - xbar).abs() <= 1e-10);
        assert!((e.point.y - xbar).abs() <= 1e-10);
        assert!(e.residual <= 1e-10);
        assert_eq!(e.contact_order, 1);
        assert!(matches!(set.prediction, GlobalBehavior::UniqueGas { index: 0 }));
        assert_eq!(
            e.class.as_ref().unwrap().label,
            StabilityLabel::LocallyAsymptoticallyStable
        );
        // The region below the immigration corner holds another fixed point.
        assert!(set
            .all
            .iter()
            .any(|e| e.point.x < 0.5 && e.point.y < 0.5));
        assert!(set.all.len() >= 2);
    }

    #[test]
    fn slope_and_eigen_routes_agree_at_p1() {
        let set = find_equilibria(&p1()).unwrap();
        let e = set.nonneg_eq(0);
        let by_eigen = e.class.as_ref().unwrap();
        let by_slopes = classify_by_slopes(e.slopes.as_ref().unwrap(), BranchSign::Negative);
        assert_eq!(by_eigen.label, by_slopes.label);
        // Cross-identity between the two routes.
        let eig = e.eig.as_ref().unwrap();
        let s = e.slopes.as_ref().unwrap();
        let lhs = (s.s1 - s.s2) * e.jac.b * (1.0 - e.jac.d);
        let rhs = (1.0 - eig.lambda1) * (1.0 - eig.lambda2);
        assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs() + rhs.abs()));
    }

    #[test]
    fn contact_order_of_transversal_crossing() {
        let set = find_equilibria(&p1()).unwrap();
        let e = set.nonneg_eq(0);
        assert_eq!(contact_order(&p1(), e).unwrap(), 1);
        // Order one means the slope classification is hyperbolic.
        let class = classify_by_slopes(e.slopes.as_ref().unwrap(), BranchSign::Negative);
        assert_ne!(class.label, StabilityLabel::Nonhyperbolic);
    }

    #[test]
    fn uniqueness_condition_rows() {
        let r = uniqueness_sufficient(&p1());
        assert!(!r.cond_a && r.cond_b && r.guaranteed);

        let p = ModelParams::new(1.5, 1.5, 2.0, 2.0, 1.0, 1.0).unwrap();
        let r = uniqueness_sufficient(&p);
        assert!(r.cond_a && !r.cond_b && r.guaranteed);

        let p = ModelParams::new(6.0, 6.0, 3.0, 3.0, 0.01, 0.01).unwrap();
        let r = uniqueness_sufficient(&p);
        assert!(!r.cond_a && !r.cond_b && !r.guaranteed);
    }

    #[test]
    fn mm_diagonal_witness_solves_the_system() {
        let p = p1();
        let set = find_equilibria(&p).unwrap();
        let e = set.nonneg_eq(0).point;
        let w = mm_check(&p, &MmWitness::new(e.x, e.x, e.y, e.y));
        assert!(w.system_residual <= 1e-10);
        assert!(w.identity_residual <= 1e-12);
        // A perturbed witness does not.
        let w = mm_check(&p, &MmWitness::new(e.x + 0.1, e.x - 0.1, e.y, e.y));
        assert!(w.system_residual > 1e-3);
    }

    #[test]
    fn mm_search_returns_none_in_unique_regimes() {
        // Uniqueness condition (a) holds here.
        let p = ModelParams::new(1.5, 1.5, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert!(mm_search_asymmetric(&p).is_none());
        // And P1 is a unique-equilibrium instance by condition (b).
        assert!(mm_search_asymmetric(&p1()).is_none());
    }
}
