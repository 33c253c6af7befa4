//! Double-double arithmetic and a Jacobi eigenvalue solver built on it.
//!
//! Penalty gaps in the steep gadget families reach 1e9..1e12 while the
//! optimizer must resolve spectral errors to 1e-5 * epsilon. A dense f64
//! eigensolver is backward stable only to ~||H|| * eps, which is orders of
//! magnitude too coarse there. Eigenvalues of small matrices are therefore
//! computed in ~31-digit double-double precision; the low-lying spectrum is
//! then limited only by the accuracy of the matrix entries themselves.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Newton-refined square root; requires a non-negative argument.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let y = self.hi.sqrt();
        let yd = Dd::from_f64(y);
        // y + (x - y^2) / (2y)
        let r = self - yd * yd;
        let corr = r.hi / (2.0 * y);
        let (hi, lo) = quick_two_sum(y, corr);
        Dd { hi, lo }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations in
/// double-double precision, ascending. Input entries are f64; only the
/// solver's own rounding is pushed below their representation error.
pub fn symmetric_eigenvalues_dd(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[(0, 0)]];
    }

    let mut a: Vec<Dd> = (0..n * n)
        .map(|k| Dd::from_f64(0.5 * (m[(k / n, k % n)] + m[(k % n, k / n)])))
        .collect();
    let idx = |i: usize, j: usize| i * n + j;

    let fro: f64 = a.iter().map(|d| d.hi * d.hi).sum::<f64>().sqrt();
    if fro == 0.0 {
        return vec![0.0; n];
    }
    let tol = 1e-31 * fro;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[idx(i, j)].hi.abs();
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq.hi.abs() <= tol / (n * n) as f64 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                // rotation angle from tau = (aqq - app) / (2 apq)
                let tau = (aqq - app) / (apq * Dd::from_f64(2.0));
                let t = {
                    let denom = tau.abs() + (Dd::ONE + tau * tau).sqrt();
                    let t = Dd::ONE / denom;
                    if tau.hi < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = Dd::ONE / (Dd::ONE + t * t).sqrt();
                let s = t * c;

                // update diagonal and zero the pivot
                let tapq = t * apq;
                a[idx(p, p)] = app - tapq;
                a[idx(q, q)] = aqq + tapq;
                a[idx(p, q)] = Dd::ZERO;
                a[idx(q, p)] = Dd::ZERO;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[idx(k, p)] = new_kp;
                    a[idx(p, k)] = new_kp;
                    a[idx(k, q)] = new_kq;
                    a[idx(q, k)] = new_kq;
                }
            }
        }
    }

    let mut ev: Vec<f64> = (0..n).map(|i| a[idx(i, i)].to_f64()).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev
}

/// Eigenvalues of a complex Hermitian matrix via the real symmetric embedding
/// [[Re, -Im], [Im, Re]], whose spectrum is that of the input, doubled.
pub fn hermitian_eigenvalues_dd(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n = m.nrows();
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let h = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            big[(i, j)] = h.re;
            big[(i + n, j + n)] = h.re;
            big[(i + n, j)] = h.im;
            big[(i, j + n)] = -h.im;
        }
    }
    let doubled = symmetric_eigenvalues_dd(&big);
    doubled.into_iter().step_by(2).collect()
}
