//! Orbit iteration with convergence diagnostics, envelope certificates of
//! global stability, basin grids, separatrix tracing, and fold location.
//!
//! Every orbit of the map converges to an equilibrium: one step lands in
//! the trapping box, the map is strongly competitive there, and orbits are
//! eventually coordinate-wise monotone. The corner orbits of the trapping
//! box squeeze every other orbit in the south-east order, which is what
//! the envelope certificate exploits.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::equilibria::{find_equilibria, EquilibriumSet, GlobalBehavior};
use crate::error::{Error, Result};
use crate::math::cabs;
use crate::model::{step_raw, trapping_box, ModelParams, ParamName, Point, Rect};

/// Successive differences must stay below tolerance for this many steps
/// before an orbit is declared convergent.
pub const CAUCHY_WINDOW: usize = 10;

/// An orbit with convergence metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<Point>,
    /// Final point when the Cauchy-tail criterion fired.
    pub limit: Option<Point>,
    /// Largest successive difference over the trailing window.
    pub cauchy_tail: f64,
    /// First index after which both coordinates are (weakly) monotone.
    pub monotone_onset: Option<usize>,
}

/// Corner orbits of the trapping box. The lower sequence starts at the
/// south-east least corner `(h1, h2+b2)`, the upper at `(h1+b1, h2)`;
/// they are monotone in the south-east order and sandwich every orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lower_seq: Vec<Point>,
    pub upper_seq: Vec<Point>,
}

/// Sampled graph of the increasing function separating the two basins in
/// the three-equilibria regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separatrix {
    /// `(x, y*)` pairs, x strictly increasing.
    pub samples: Vec<(f64, f64)>,
    /// Abscissae where no bisection bracket existed.
    pub skipped: Vec<f64>,
    /// Largest final bisection bracket over all samples.
    pub bracket_width: f64,
}

/// Label of one basin-grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellLabel {
    /// Index into the south-east ordered quadrant equilibria.
    Attractor(usize),
    /// Orbit did not converge within budget.
    Unresolved,
}

/// Grid of orbit destinations over a rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub bounds: Rect,
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `labels[j * nx + i]` for the point `(x_i, y_j)`.
    pub labels: Vec<CellLabel>,
    /// The equilibria the labels refer to, south-east ordered.
    pub attractors: Vec<Point>,
}

impl BasinGrid {
    pub fn x_at(&self, i: usize) -> f64 {
        lerp(self.bounds.x_lo, self.bounds.x_hi, i, self.nx)
    }

    pub fn y_at(&self, j: usize) -> f64 {
        lerp(self.bounds.y_lo, self.bounds.y_hi, j, self.ny)
    }

    pub fn label(&self, i: usize, j: usize) -> CellLabel {
        self.labels[j * self.nx + i]
    }
}

fn lerp(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if n <= 1 {
        return lo;
    }
    lo + (hi - lo) * (k as f64) / ((n - 1) as f64)
}

/// Iterate the map from `start` until successive points differ by at most
/// `tol` (sup norm) for a full confirmation window, or `max_n` steps.
/// Non-convergence within budget is reported by an absent limit, not an
/// error.
pub fn iterate(p: &ModelParams, start: Point, max_n: usize, tol: f64) -> Result<Trajectory> {
    p.validate()?;
    if max_n == 0 {
        return Err(Error::InvalidArgument("max_n must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive"));
    }
    let start = crate::model::step(p, start).map(|_| start)?;

    let mut points = Vec::with_capacity(max_n.min(1 << 16) + 1);
    points.push(start);
    let mut prev = start;
    let mut streak = 0usize;
    let mut converged = false;
    for _ in 0..max_n {
        let next = step_raw(p, prev);
        points.push(next);
        if next.dist_inf(&prev) <= tol {
            streak += 1;
            if streak >= CAUCHY_WINDOW {
                converged = true;
                prev = next;
                break;
            }
        } else {
            streak = 0;
        }
        prev = next;
    }
    let tail_len = CAUCHY_WINDOW.min(points.len() - 1);
    let cauchy_tail = points
        .windows(2)
        .rev()
        .take(tail_len)
        .map(|w| w[1].dist_inf(&w[0]))
        .fold(0.0f64, f64::max);
    Ok(Trajectory {
        limit: converged.then_some(prev),
        monotone_onset: monotone_onset(&points),
        cauchy_tail,
        points,
    })
}

/// First index after which both coordinate sequences are weakly monotone.
/// Differences below the local floating-point quantum count as flat.
fn monotone_onset(points: &[Point]) -> Option<usize> {
    if points.len() < 2 {
        return None;
    }
    let mut onset = 0usize;
    let mut dir_x = 0i8;
    let mut dir_y = 0i8;
    for i in (0..points.len() - 1).rev() {
        let (a, b) = (points[i], points[i + 1]);
        let qx = 1e-14 * (1.0 + a.x.abs());
        let qy = 1e-14 * (1.0 + a.y.abs());
        let sx = signum_with_quantum(b.x - a.x, qx);
        let sy = signum_with_quantum(b.y - a.y, qy);
        let clash_x = sx != 0 && dir_x != 0 && sx != dir_x;
        let clash_y = sy != 0 && dir_y != 0 && sy != dir_y;
        if clash_x || clash_y {
            onset = i + 1;
            break;
        }
        if sx != 0 {
            dir_x = sx;
        }
        if sy != 0 {
            dir_y = sy;
        }
    }
    Some(onset)
}

fn signum_with_quantum(d: f64, q: f64) -> i8 {
    if d > q {
        1
    } else if d < -q {
        -1
    } else {
        0
    }
}

/// Orbit limit without storing the trajectory; `None` when the Cauchy
/// window never fires within `max_n` steps.
pub(crate) fn orbit_limit(p: &ModelParams, start: Point, tol: f64, max_n: usize) -> Option<Point> {
    let mut prev = start;
    let mut streak = 0usize;
    for _ in 0..max_n {
        let next = step_raw(p, prev);
        if next.dist_inf(&prev) <= tol {
            streak += 1;
            if streak >= CAUCHY_WINDOW {
                return Some(next);
            }
        } else {
            streak = 0;
        }
        prev = next;
    }
    None
}

/// The first `n` points of the two corner orbits of the trapping box,
/// starting at the corners themselves.
pub fn envelope(p: &ModelParams, n: usize) -> Result<Envelope> {
    p.validate()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1"));
    }
    let rect = trapping_box(p);
    let mut lower_seq = Vec::with_capacity(n);
    let mut upper_seq = Vec::with_capacity(n);
    let mut lo = Point { x: rect.x_lo, y: rect.y_hi };
    let mut hi = Point { x: rect.x_hi, y: rect.y_lo };
    lower_seq.push(lo);
    upper_seq.push(hi);
    for _ in 1..n {
        lo = step_raw(p, lo);
        hi = step_raw(p, hi);
        lower_seq.push(lo);
        upper_seq.push(hi);
    }
    Ok(Envelope { lower_seq, upper_seq })
}

/// Numerical certificate of global asymptotic stability: true exactly
/// when the two corner orbits of the trapping box close to within `tol`
/// (sup norm) before `max_n` steps. Since they sandwich every orbit, a
/// closed envelope certifies global attraction of the unique equilibrium.
pub fn gas_certificate(p: &ModelParams, tol: f64, max_n: usize) -> bool {
    let rect = trapping_box(p);
    let mut lo = Point { x: rect.x_lo, y: rect.y_hi };
    let mut hi = Point { x: rect.x_hi, y: rect.y_lo };
    for _ in 0..max_n {
        if lo.dist_inf(&hi) <= tol {
            return true;
        }
        lo = step_raw(p, lo);
        hi = step_raw(p, hi);
    }
    lo.dist_inf(&hi) <= tol
}

const BASIN_TOL: f64 = 1e-9;
const BASIN_MAX_N: usize = 100_000;
/// An orbit limit matches an equilibrium within this absolute tolerance.
const MATCH_TOL: f64 = 1e-6;

fn match_attractor(limit: &Point, attractors: &[Point]) -> Option<usize> {
    let mut best = None;
    let mut best_d = f64::INFINITY;
    for (k, a) in attractors.iter().enumerate() {
        let d = limit.dist_inf(a);
        if d < best_d {
            best_d = d;
            best = Some(k);
        }
    }
    best.filter(|_| best_d <= MATCH_TOL)
}

/// Label every grid point of `bounds` by the equilibrium its orbit
/// converges to. Cells whose orbit exhausts the budget stay `Unresolved`
/// rather than being guessed.
pub fn basin_grid(p: &ModelParams, bounds: Rect, nx: usize, ny: usize) -> Result<BasinGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2x2"));
    }
    if bounds.x_lo < 0.0 || bounds.y_lo < 0.0 {
        return Err(Error::InvalidArgument(
            "basin bounds must lie in the nonnegative quadrant",
        ));
    }
    let eqs = find_equilibria(p)?;
    let attractors: Vec<Point> = eqs.nonneg_iter().map(|e| e.point).collect();
    let mut labels = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let y = lerp(bounds.y_lo, bounds.y_hi, j, ny);
        for i in 0..nx {
            let x = lerp(bounds.x_lo, bounds.x_hi, i, nx);
            let label = orbit_limit(p, Point { x, y }, BASIN_TOL, BASIN_MAX_N)
                .and_then(|lim| match_attractor(&lim, &attractors))
                .map_or(CellLabel::Unresolved, CellLabel::Attractor);
            labels.push(label);
        }
    }
    Ok(BasinGrid { bounds, nx, ny, labels, attractors })
}

const SEPARATRIX_BRACKET: f64 = 1e-8;

enum Side {
    /// Converges to the south-east least attractor (high y).
    Upper,
    /// Converges to the south-east greatest attractor (low y).
    Lower,
    Saddle,
    Unknown,
}

/// Trace the separatrix of the two basins in the bistable regime by
/// bisecting orbit destinations in `y` at `nx` abscissae spanning the
/// attractors, padded to the trapping box. The saddle abscissa is always
/// included as a sample.
pub fn separatrix(p: &ModelParams, eqs: &EquilibriumSet, nx: usize) -> Result<Separatrix> {
    let GlobalBehavior::Bistable { low, saddle, high } = eqs.prediction else {
        return Err(Error::WrongRegime { expected: "Bistable", count: eqs.nonneg_count() });
    };
    if nx < 2 {
        return Err(Error::InvalidArgument("nx must be at least 2"));
    }
    let e1 = eqs.nonneg_eq(low).point;
    let e2 = eqs.nonneg_eq(saddle).point;
    let e3 = eqs.nonneg_eq(high).point;
    let rect = trapping_box(p);
    let pad = 0.25 * (e3.x - e1.x);
    let x_lo = (e1.x - pad).max(rect.x_lo);
    let x_hi = (e3.x + pad).min(rect.x_hi);
    // Orbits from above the separatrix fall to the high-y attractor; a cap
    // above the box covers every relevant start.
    let y_cap = rect.y_hi + (rect.y_hi - rect.y_lo);

    let classify = |x: f64, y: f64| -> Side {
        match orbit_limit(p, Point { x, y }, BASIN_TOL, BASIN_MAX_N) {
            None => Side::Unknown,
            Some(lim) => {
                if lim.dist_inf(&e1) <= MATCH_TOL {
                    Side::Upper
                } else if lim.dist_inf(&e3) <= MATCH_TOL {
                    Side::Lower
                } else if lim.dist_inf(&e2) <= MATCH_TOL {
                    Side::Saddle
                } else {
                    Side::Unknown
                }
            }
        }
    };

    let mut xs: Vec<f64> = (0..nx).map(|k| lerp(x_lo, x_hi, k, nx)).collect();
    // Replace the nearest abscissa by the saddle's so the sample set passes
    // through it exactly.
    let nearest = (0..nx)
        .min_by(|&a, &b| {
            (xs[a] - e2.x)
                .abs()
                .partial_cmp(&(xs[b] - e2.x).abs())
                .unwrap()
        })
        .unwrap();
    xs[nearest] = e2.x;

    let mut samples = Vec::with_capacity(nx);
    let mut skipped = Vec::new();
    let mut width = 0.0f64;
    for &x in &xs {
        let mut lo_y = 0.0;
        let mut hi_y = y_cap;
        match classify(x, lo_y) {
            Side::Lower => {}
            Side::Saddle => {
                samples.push((x, lo_y));
                continue;
            }
            _ => {
                skipped.push(x);
                continue;
            }
        }
        match classify(x, hi_y) {
            Side::Upper => {}
            Side::Saddle => {
                samples.push((x, hi_y));
                continue;
            }
            _ => {
                skipped.push(x);
                continue;
            }
        }
        let mut hit_saddle = false;
        while hi_y - lo_y > SEPARATRIX_BRACKET {
            let mid = 0.5 * (lo_y + hi_y);
            match classify(x, mid) {
                Side::Lower => lo_y = mid,
                Side::Upper => hi_y = mid,
                Side::Saddle => {
                    // On the stable manifold to within orbit tolerance.
                    samples.push((x, mid));
                    hit_saddle = true;
                    break;
                }
                Side::Unknown => {
                    skipped.push(x);
                    hit_saddle = true;
                    break;
                }
            }
        }
        if !hit_saddle {
            width = width.max(hi_y - lo_y);
            samples.push((x, 0.5 * (lo_y + hi_y)));
        }
    }
    Ok(Separatrix { samples, skipped, bracket_width: width.max(SEPARATRIX_BRACKET) })
}

/// Locate the fold between the one- and three-equilibria regimes by
/// bisection on one named parameter. The returned parameters carry a
/// merged (order-two) equilibrium: the merging quartic-root pair is driven
/// within 1e-8 of coincidence, or as close as the parameter's floating
/// resolution allows.
pub fn fold_search(
    p_base: &ModelParams,
    param: ParamName,
    lo: f64,
    hi: f64,
) -> Result<Option<ModelParams>> {
    let count_at = |theta: f64| -> Result<usize> {
        Ok(find_equilibria(&p_base.with(param, theta)?)?.nonneg_count())
    };
    let n_lo = count_at(lo)?;
    let n_hi = count_at(hi)?;
    if n_lo == n_hi {
        return Err(Error::BadBracket { lo_count: n_lo, hi_count: n_hi });
    }
    if n_lo == 2 {
        return Ok(Some(p_base.with(param, lo)?));
    }
    if n_hi == 2 {
        return Ok(Some(p_base.with(param, hi)?));
    }
    // Orient the bracket: `many` on the three-equilibria side.
    let (mut many, mut few) = if n_lo > n_hi { (lo, hi) } else { (hi, lo) };

    // Separation of the two merging equilibria, measured on the real side
    // from the raw quartic roots: the closest pair of near-real roots.
    let pair_gap = |theta: f64| -> Result<Option<f64>> {
        let p = p_base.with(param, theta)?;
        let roots = crate::curves::shifted_quartic(&p).roots();
        let mut best: Option<f64> = None;
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let gap = cabs(roots[i] - roots[j]);
                if best.map_or(true, |b| gap < b) {
                    best = Some(gap);
                }
            }
        }
        Ok(best)
    };

    let mut best_fold: Option<ModelParams> = None;
    for _ in 0..200 {
        let mid = 0.5 * (many + few);
        if mid == many || mid == few {
            break;
        }
        let count = count_at(mid)?;
        match count {
            2 => {
                // Inside the merge window; this is a fold instance.
                best_fold = Some(p_base.with(param, mid)?);
                // Keep tightening from the many side toward the window to
                // shrink the root gap further.
                let gap = pair_gap(mid)?.unwrap_or(f64::INFINITY);
                if gap <= 1e-8 * (1.0 + mid.abs()) {
                    break;
                }
                few = mid;
            }
            c if c >= 3 => many = mid,
            _ => few = mid,
        }
    }
    if best_fold.is_none() {
        // Bracket exhausted without observing the two-equilibria window;
        // report the closest three-side parameters if they merged to
        // within tolerance, otherwise absence.
        let p_many = p_base.with(param, many)?;
        if find_equilibria(&p_many)?.nonneg_count() == 2 {
            best_fold = Some(p_many);
        }
    }
    Ok(best_fold)
}
