//! Real roots of the cubic and quadratic polynomials arising in the coupling solve.

use crate::error::{Error, Result};

/// `R1(x) = a3 x^3 + a2 x^2 + a1 x + a0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl CubicCoeffs {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }

    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a3 * x + 2.0 * self.a2) * x + self.a1
    }

    /// Magnitude of the largest term at `x`, used to judge residuals.
    pub fn term_scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        (self.a3 * ax * ax * ax).abs().max((self.a2 * ax * ax).abs()).max((self.a1 * ax).abs()).max(self.a0.abs())
    }
}

/// `R2(x) = b2 x^2 + b1 x + b0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeffs {
    pub b2: f64,
    pub b1: f64,
    pub b0: f64,
}

impl QuadCoeffs {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.b2 * x + self.b1) * x + self.b0
    }
}

/// Real roots of a cubic, ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicRoots {
    One(f64),
    /// Three real roots counted with multiplicity.
    Three([f64; 3]),
}

impl CubicRoots {
    pub fn as_slice(&self) -> &[f64] {
        match self {
            CubicRoots::One(x) => std::slice::from_ref(x),
            CubicRoots::Three(r) => r,
        }
    }
}

/// Relative tolerance on the cubic discriminant below which a root pair is
/// still classified as real.
const DISCRIMINANT_TOL: f64 = 1e-12;

/// Closed-form (trigonometric / Cardano) roots followed by Newton polishing.
pub fn cubic_real_roots(c: &CubicCoeffs) -> Result<CubicRoots> {
    if c.a3 == 0.0 || !c.a3.is_finite() {
        return Err(Error::DegeneratePolynomial("cubic leading coefficient is zero"));
    }
    let b = c.a2 / c.a3;
    let cc = c.a1 / c.a3;
    let d = c.a0 / c.a3;
    // x = t - b/3 gives t^3 + p t + q = 0
    let shift = b / 3.0;
    let p = cc - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * cc / 3.0 + d;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    let scale = 4.0 * (p * p * p).abs() + 27.0 * q * q;

    let roots = if disc >= -DISCRIMINANT_TOL * scale && p < 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
        let mut r = [0, 1, 2].map(|k| m * (theta - two_pi_3 * k as f64).cos() - shift);
        for x in &mut r {
            *x = polish(c, *x);
        }
        r.sort_by(|a, b| a.total_cmp(b));
        CubicRoots::Three(r)
    } else if scale == 0.0 {
        let x = polish(c, -shift);
        CubicRoots::Three([x; 3])
    } else {
        // single real root from Cardano's formula
        let s = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let u = (-q / 2.0 + if q <= 0.0 { s } else { -s }).cbrt();
        let t = if u != 0.0 { u - p / (3.0 * u) } else { 0.0 };
        CubicRoots::One(polish(c, t - shift))
    };
    Ok(roots)
}

/// Newton steps on the original polynomial, kept only while they reduce the residual.
fn polish(c: &CubicCoeffs, mut x: f64) -> f64 {
    let mut r = c.eval(x).abs();
    for _ in 0..3 {
        let d = c.derivative(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - c.eval(x) / d;
        let rn = c.eval(next).abs();
        if !(rn < r) {
            break;
        }
        x = next;
        r = rn;
    }
    x
}

/// Real roots `(smaller, larger)` of a quadratic without cancellation: the
/// root of larger magnitude is computed first and the other follows from
/// Vieta's product.
pub fn quadratic_roots(c: &QuadCoeffs) -> Result<(f64, f64)> {
    if c.b2 == 0.0 {
        return Err(Error::DegeneratePolynomial("quadratic leading coefficient is zero"));
    }
    let disc = c.b1 * c.b1 - 4.0 * c.b2 * c.b0;
    if disc < 0.0 {
        return Err(Error::NoRealSolution("negative discriminant of R2"));
    }
    let sq = disc.sqrt();
    let qv = -0.5 * (c.b1 + c.b1.signum() * sq);
    let (r1, r2) = if qv == 0.0 { (0.0, 0.0) } else { (qv / c.b2, c.b0 / qv) };
    Ok(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factored_cubic() {
        let r = cubic_real_roots(&CubicCoeffs { a3: 1.0, a2: -6.0, a1: 11.0, a0: -6.0 }).unwrap();
        match r {
            CubicRoots::Three(r) => {
                for (x, e) in r.iter().zip([1.0, 2.0, 3.0]) {
                    assert!((x - e).abs() < 1e-14, "{r:?}");
                }
            }
            _ => panic!("expected three roots, got {r:?}"),
        }
    }

    #[test]
    fn single_real_root() {
        let r = cubic_real_roots(&CubicCoeffs { a3: 1.0, a2: 0.0, a1: 1.0, a0: 0.0 }).unwrap();
        assert_eq!(r, CubicRoots::One(0.0));
    }

    #[test]
    fn triple_and_double_roots() {
        // (x-2)^3
        let r = cubic_real_roots(&CubicCoeffs { a3: 1.0, a2: -6.0, a1: 12.0, a0: -8.0 }).unwrap();
        assert!(r.as_slice().len() == 3 && r.as_slice().iter().all(|x| (x - 2.0).abs() < 1e-5), "{r:?}");
        // (x-1)^2 (x+2)
        let r = cubic_real_roots(&CubicCoeffs { a3: 1.0, a2: 0.0, a1: -3.0, a0: 2.0 }).unwrap();
        let s = r.as_slice();
        assert_eq!(s.len(), 3);
        assert!((s[0] + 2.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-7 && (s[2] - 1.0).abs() < 1e-7, "{s:?}");
    }

    #[test]
    fn degenerate_cubic() {
        assert!(matches!(
            cubic_real_roots(&CubicCoeffs { a3: 0.0, a2: 1.0, a1: 0.0, a0: -1.0 }),
            Err(Error::DegeneratePolynomial(_))
        ));
    }

    #[test]
    fn quadratic_examples() {
        assert_eq!(quadratic_roots(&QuadCoeffs { b2: 1.0, b1: -3.0, b0: 2.0 }).unwrap(), (1.0, 2.0));
        assert_eq!(quadratic_roots(&QuadCoeffs { b2: 1.0, b1: -2.0, b0: 1.0 }).unwrap(), (1.0, 1.0));
        assert!(matches!(quadratic_roots(&QuadCoeffs { b2: 1.0, b1: 0.0, b0: 1.0 }), Err(Error::NoRealSolution(_))));
        assert!(matches!(
            quadratic_roots(&QuadCoeffs { b2: 0.0, b1: 1.0, b0: 1.0 }),
            Err(Error::DegeneratePolynomial(_))
        ));
        // opens downward
        assert_eq!(quadratic_roots(&QuadCoeffs { b2: -1.0, b1: 3.0, b0: -2.0 }).unwrap(), (1.0, 2.0));
    }

    #[test]
    fn ill_conditioned_quadratic_keeps_vieta_product() {
        let c = QuadCoeffs { b2: 1e-3, b1: 1e8, b0: 3e-4 };
        let (a, b) = quadratic_roots(&c).unwrap();
        let prod = a * b;
        assert!((prod - c.b0 / c.b2).abs() <= 1e-12 * (c.b0 / c.b2).abs(), "{prod}");
        // the small root is accurate, not swamped by cancellation
        assert!((b - (-3e-12)).abs() < 1e-24, "{b}");
    }

    /// Roots of a monic cubic via the eigenvalues of its companion matrix.
    fn companion_real_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
        let m = nalgebra::Matrix3::new(0.0, 0.0, -d, 1.0, 0.0, -c, 0.0, 1.0, -b);
        let eig = m.complex_eigenvalues();
        let mut r: Vec<f64> = eig.iter().filter(|z| z.im.abs() < 1e-7 * (1.0 + z.re.abs())).map(|z| z.re).collect();
        r.sort_by(|a, b| a.total_cmp(b));
        r
    }

    proptest! {
        #[test]
        fn random_monic_cubics_match_companion(r1 in -10.0f64..10.0, r2 in -10.0f64..10.0, r3 in -10.0f64..10.0) {
            // well-separated three-root case built from its factors
            let mut rs = [r1, r2, r3];
            rs.sort_by(|a, b| a.total_cmp(b));
            prop_assume!(rs[1] - rs[0] > 1e-2 && rs[2] - rs[1] > 1e-2);
            let b = -(rs[0] + rs[1] + rs[2]);
            let c = rs[0] * rs[1] + rs[0] * rs[2] + rs[1] * rs[2];
            let d = -rs[0] * rs[1] * rs[2];
            let coeffs = CubicCoeffs { a3: 1.0, a2: b, a1: c, a0: d };
            let got = cubic_real_roots(&coeffs).unwrap();
            let oracle = companion_real_roots(b, c, d);
            prop_assert_eq!(got.as_slice().len(), oracle.len());
            let scale = 1.0 + b.abs().max(c.abs().sqrt()).max(d.abs().cbrt());
            for (x, y) in got.as_slice().iter().zip(&oracle) {
                prop_assert!((x - y).abs() <= 1e-9 * scale, "{:?} vs {:?}", got, oracle);
                prop_assert!(coeffs.eval(*x).abs() <= 1e-10 * coeffs.term_scale(*x).max(1.0));
            }
        }

        #[test]
        fn random_cubics_any_root_count(b in -10.0f64..10.0, c in -10.0f64..10.0, d in -10.0f64..10.0) {
            let coeffs = CubicCoeffs { a3: 1.0, a2: b, a1: c, a0: d };
            let got = cubic_real_roots(&coeffs).unwrap();
            let oracle = companion_real_roots(b, c, d);
            // count can differ only for near-multiple roots
            if got.as_slice().len() == oracle.len() {
                let scale = 1.0 + b.abs().max(c.abs().sqrt()).max(d.abs().cbrt());
                for (x, y) in got.as_slice().iter().zip(&oracle) {
                    prop_assert!((x - y).abs() <= 1e-6 * scale, "{:?} vs {:?}", got, oracle);
                }
            }
            for x in got.as_slice() {
                prop_assert!(coeffs.eval(*x).abs() <= 1e-10 * coeffs.term_scale(*x).max(1.0));
            }
        }

        #[test]
        fn quadratic_vieta(b2 in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3], b1 in -1e6f64..1e6, b0 in -1e3f64..1e3) {
            let c = QuadCoeffs { b2, b1, b0 };
            prop_assume!(b1 * b1 - 4.0 * b2 * b0 >= 0.0);
            let (lo, hi) = quadratic_roots(&c).unwrap();
            prop_assert!(lo <= hi);
            let prod = b0 / b2;
            prop_assert!((lo * hi - prod).abs() <= 1e-12 * prod.abs().max(1e-300) * 4.0 + 1e-300);
        }
    }
}
