//! Dense polynomial helpers and companion-matrix root finding for real
//! polynomials of degree at most four.
//!
//! Roots come from the eigenvalues of the power-of-two-balanced companion
//! matrix of the monic polynomial, computed by a complex single-shift QR
//! iteration with Wilkinson shifts, then sharpened by a few complex Newton
//! steps on the original coefficients. Closed-form cubic/quartic solutions
//! are avoided for conditioning reasons.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{cabs, sqrt};

type C = Complex64;

/// Convolution product of two coefficient slices (ascending powers).
pub(crate) fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `a += s * b`, extending `a` as needed.
pub(crate) fn add_scaled(a: &mut Vec<f64>, s: f64, b: &[f64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0.0);
    }
    for (ai, &bi) in a.iter_mut().zip(b.iter()) {
        *ai += s * bi;
    }
}

/// In-place Taylor shift: rewrites the coefficients of p(x) into those of
/// p(X + h) by the Ruffini-Horner scheme.
pub(crate) fn taylor_shift(coeffs: &mut [f64], h: f64) {
    let n = coeffs.len().saturating_sub(1);
    for k in 0..n {
        for j in (k..n).rev() {
            coeffs[j] += h * coeffs[j + 1];
        }
    }
}

pub(crate) fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_c(coeffs: &[f64], z: C) -> C {
    coeffs
        .iter()
        .rev()
        .fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn deriv_eval_c(coeffs: &[f64], z: C) -> C {
    let mut acc = C::new(0.0, 0.0);
    for k in (1..coeffs.len()).rev() {
        acc = acc * z + coeffs[k] * k as f64;
    }
    acc
}

/// floor(log2(|x|)) for normal x.
fn exponent_of(x: f64) -> i32 {
    ((x.abs().to_bits() >> 52) & 0x7ff) as i32 - 1023
}

/// 2^e as f64 for exponents inside the normal range.
fn pow2(e: i32) -> f64 {
    let e = e.clamp(-1022, 1023);
    f64::from_bits(((e + 1023) as u64) << 52)
}

fn csqrt(z: C) -> C {
    let r = cabs(z);
    if r == 0.0 {
        return C::new(0.0, 0.0);
    }
    let w = sqrt((r + z.re.abs()) / 2.0);
    if z.re >= 0.0 {
        C::new(w, z.im / (2.0 * w))
    } else {
        let im = if z.im >= 0.0 { w } else { -w };
        C::new(z.im.abs() / (2.0 * w), im)
    }
}

/// Eigenvalues of the complex 2x2 matrix [[a, b], [c, d]].
fn eig2(a: C, b: C, c: C, d: C) -> (C, C) {
    let half_tr = (a + d) * 0.5;
    let s = csqrt((a - d) * (a - d) * 0.25 + b * c);
    (half_tr + s, half_tr - s)
}

/// One shifted QR sweep on the active window `lo..hi` of a complex upper
/// Hessenberg matrix.
fn qr_step(h: &mut [[C; 4]; 4], lo: usize, hi: usize, mu: C) {
    for i in lo..hi {
        h[i][i] -= mu;
    }
    // Forward Givens sweep annihilating the subdiagonal (H := Q^H H = R).
    let mut rots = [(C::new(1.0, 0.0), C::new(0.0, 0.0)); 3];
    for i in lo..hi - 1 {
        let f = h[i][i];
        let g = h[i + 1][i];
        let d = sqrt(f.norm_sqr() + g.norm_sqr());
        let (cf, cg) = if d == 0.0 {
            (C::new(1.0, 0.0), C::new(0.0, 0.0))
        } else {
            (f.conj() / d, g.conj() / d)
        };
        rots[i - lo] = (cf, cg);
        for j in i..hi {
            let x = h[i][j];
            let y = h[i + 1][j];
            h[i][j] = cf * x + cg * y;
            h[i + 1][j] = -cg.conj() * x + cf.conj() * y;
        }
        h[i + 1][i] = C::new(0.0, 0.0);
    }
    // Trailing sweep (H := R Q), restoring Hessenberg form.
    for i in lo..hi - 1 {
        let (cf, cg) = rots[i - lo];
        for r in lo..hi {
            let x = h[r][i];
            let y = h[r][i + 1];
            h[r][i] = x * cf.conj() + y * cg.conj();
            h[r][i + 1] = -x * cg + y * cf;
        }
    }
    for i in lo..hi {
        h[i][i] += mu;
    }
}

fn hessenberg_eigenvalues(mut h: [[C; 4]; 4], n: usize) -> Vec<C> {
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut stall = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        if hi == 1 {
            out.push(h[0][0]);
            break;
        }
        let local = cabs(h[hi - 1][hi - 1]) + cabs(h[hi - 2][hi - 2]);
        let scale = if local == 0.0 { 1.0 } else { local };
        if cabs(h[hi - 1][hi - 2]) <= f64::EPSILON * scale {
            out.push(h[hi - 1][hi - 1]);
            hi -= 1;
            stall = 0;
            continue;
        }
        // Start of the active window: first negligible subdiagonal above.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = cabs(h[lo - 1][lo - 1]) + cabs(h[lo][lo]);
            let s = if s == 0.0 { 1.0 } else { s };
            if cabs(h[lo][lo - 1]) <= f64::EPSILON * s {
                h[lo][lo - 1] = C::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if hi - lo == 2 {
            let (z1, z2) = eig2(h[lo][lo], h[lo][lo + 1], h[lo + 1][lo], h[lo + 1][lo + 1]);
            out.push(z2);
            out.push(z1);
            hi -= 2;
            stall = 0;
            continue;
        }
        let m = hi - 1;
        let (z1, z2) = eig2(h[m - 1][m - 1], h[m - 1][m], h[m][m - 1], h[m][m]);
        let t = h[m][m];
        let mut mu = if cabs(z1 - t) <= cabs(z2 - t) { z1 } else { z2 };
        stall += 1;
        total += 1;
        if stall % 12 == 0 {
            // Exceptional shift to break symmetric stalls.
            mu += C::new(cabs(h[m][m - 1]), 0.0);
        }
        if total > 200 {
            // Give up gracefully; callers polish and validate anyway.
            for i in (0..hi).rev() {
                out.push(h[i][i]);
            }
            break;
        }
        qr_step(&mut h, lo, hi, mu);
    }
    out
}

/// All complex roots of a real polynomial given by ascending coefficients
/// with a nonzero leading entry. Degree must be at most four.
pub(crate) fn roots(coeffs: &[f64]) -> Vec<C> {
    let mut top = coeffs.len();
    while top > 0 && coeffs[top - 1] == 0.0 {
        top -= 1;
    }
    let coeffs = &coeffs[..top];
    let n = coeffs.len().saturating_sub(1);
    let mut rts = match n {
        0 => Vec::new(),
        1 => vec![C::new(-coeffs[0] / coeffs[1], 0.0)],
        2 => {
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let q = -0.5 * (b + sign_of(b) * sqrt(disc));
                if q == 0.0 {
                    vec![C::new(0.0, 0.0), C::new(-b / a, 0.0)]
                } else {
                    vec![C::new(q / a, 0.0), C::new(c / q, 0.0)]
                }
            } else {
                let re = -b / (2.0 * a);
                let im = sqrt(-disc) / (2.0 * a).abs();
                vec![C::new(re, im), C::new(re, -im)]
            }
        }
        _ => companion_eigenvalues(coeffs, n),
    };
    // Newton sharpening on the original coefficients.
    for z in rts.iter_mut() {
        for _ in 0..3 {
            let p = eval_c(coeffs, *z);
            let dp = deriv_eval_c(coeffs, *z);
            if cabs(dp) <= f64::MIN_POSITIVE {
                break;
            }
            let delta = p / dp;
            if !delta.re.is_finite() || !delta.im.is_finite() {
                break;
            }
            *z -= delta;
        }
    }
    rts.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(core::cmp::Ordering::Equal))
    });
    rts
}

fn sign_of(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn companion_eigenvalues(coeffs: &[f64], n: usize) -> Vec<C> {
    // Monic form.
    let lead = coeffs[n];
    let mut monic = [0.0; 4];
    for k in 0..n {
        monic[k] = coeffs[k] / lead;
    }
    // Power-of-two substitution x = s t keeps companion entries near unity
    // without rounding error.
    let mut s_exp = 0i32;
    for (k, &m) in monic.iter().enumerate().take(n) {
        if m != 0.0 {
            let e = exponent_of(m);
            let d = (n - k) as i32;
            s_exp = s_exp.max((e + d - 1).div_euclid(d));
        }
    }
    let s = pow2(s_exp);
    let mut scaled = [0.0; 4];
    for k in 0..n {
        scaled[k] = monic[k] * pow2(-s_exp * (n - k) as i32);
    }
    let zero = C::new(0.0, 0.0);
    let mut h = [[zero; 4]; 4];
    for i in 1..n {
        h[i][i - 1] = C::new(1.0, 0.0);
    }
    for i in 0..n {
        h[i][n - 1] = C::new(-scaled[i], 0.0);
    }
    hessenberg_eigenvalues(h, n)
        .into_iter()
        .map(|z| z * s)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn from_roots(rts: &[C]) -> Vec<f64> {
        let mut acc = vec![C::new(1.0, 0.0)];
        for &r in rts {
            let mut next = vec![C::new(0.0, 0.0); acc.len() + 1];
            for (k, &a) in acc.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            acc = next;
        }
        acc.iter().map(|z| z.re).collect()
    }

    fn assert_roots_match(expected: &mut Vec<C>, got: &mut Vec<C>, tol: f64) {
        assert_eq!(expected.len(), got.len());
        for e in expected.iter() {
            let (k, _) = got
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| cabs(**a - *e).partial_cmp(&cabs(**b - *e)).unwrap())
                .unwrap();
            assert!(
                cabs(got[k] - *e) <= tol,
                "root {e} missing, nearest {}",
                got[k]
            );
            got.remove(k);
        }
    }

    #[test]
    fn quartic_with_known_real_roots() {
        let mut expected = vec![
            C::new(-3.0, 0.0),
            C::new(-0.25, 0.0),
            C::new(1.5, 0.0),
            C::new(7.0, 0.0),
        ];
        let coeffs = from_roots(&expected);
        let mut got = roots(&coeffs);
        assert_roots_match(&mut expected, &mut got, 1e-10);
    }

    #[test]
    fn quartic_with_complex_pair() {
        let mut expected = vec![
            C::new(2.0, 5.0),
            C::new(2.0, -5.0),
            C::new(-1.0, 0.0),
            C::new(4.0, 0.0),
        ];
        let coeffs = from_roots(&expected);
        let mut got = roots(&coeffs);
        assert_roots_match(&mut expected, &mut got, 1e-9);
    }

    #[test]
    fn double_root_recovered() {
        let mut expected = vec![
            C::new(2.0, 0.0),
            C::new(2.0, 0.0),
            C::new(-1.0, 0.0),
            C::new(0.5, 0.0),
        ];
        let coeffs = from_roots(&expected);
        let mut got = roots(&coeffs);
        assert_roots_match(&mut expected, &mut got, 1e-6);
    }

    #[test]
    fn wide_magnitude_spread() {
        let mut expected = vec![
            C::new(1e-4, 0.0),
            C::new(-2e-3, 0.0),
            C::new(150.0, 0.0),
            C::new(-9000.0, 0.0),
        ];
        let coeffs = from_roots(&expected);
        let mut got = roots(&coeffs);
        for e in expected.iter() {
            let best = got
                .iter()
                .map(|z| cabs(*z - *e))
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 1e-8 * (1.0 + cabs(*e)), "root {e} off by {best}");
        }
        assert_roots_match(&mut expected, &mut got, 1e-1);
    }

    #[test]
    fn cubic_and_lower_degrees() {
        let mut expected = vec![C::new(-2.0, 0.0), C::new(0.5, 0.0), C::new(3.0, 0.0)];
        let coeffs = from_roots(&expected);
        let mut got = roots(&coeffs);
        assert_roots_match(&mut expected, &mut got, 1e-10);

        assert_eq!(roots(&[6.0, -2.0]), vec![C::new(3.0, 0.0)]);
        let quad = roots(&[-6.0, 1.0, 1.0]);
        assert!(quad.iter().any(|z| cabs(*z - C::new(2.0, 0.0)) < 1e-12));
        assert!(quad.iter().any(|z| cabs(*z - C::new(-3.0, 0.0)) < 1e-12));
    }

    #[test]
    fn taylor_shift_matches_expansion() {
        // (x+1)^2 from x^2
        let mut c = [0.0, 0.0, 1.0];
        taylor_shift(&mut c, 1.0);
        assert_eq!(c, [1.0, 2.0, 1.0]);

        let mut p = [2.0, -3.0, 0.5, 4.0, -1.0];
        let h = 0.37;
        let shifted = {
            let mut q = p;
            taylor_shift(&mut q, h);
            q
        };
        for t in [-2.0, -0.3, 0.0, 1.7] {
            let direct = eval(&p, t + h);
            let via = eval(&shifted, t);
            assert!((direct - via).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
        taylor_shift(&mut p, 0.0);
        assert_eq!(p, [2.0, -3.0, 0.5, 4.0, -1.0]);
    }
}
