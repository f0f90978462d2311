//! Double-double arithmetic (~106-bit significand) and a Hermitian Jacobi
//! solver over it. Used to re-evaluate borderline instances at twice the
//! working precision.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::matrix::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319_046_813_846_299_6e-17 };

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let y = Dd::from_f64(self.hi.sqrt());
        y + (self - y * y) / (y + y)
    }

    pub fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = (self - LN2 * Dd::from_f64(k)).ldexp(-10);
        // expm1(r), then (1 + s)^2 − 1 = s (s + 2) keeps the relative error of s
        let mut term = r;
        let mut s = r;
        for n in 2..=14 {
            term = term * r / Dd::from_f64(n as f64);
            s = s + term;
        }
        for _ in 0..10 {
            s = s * (s + Dd::from_f64(2.0));
        }
        (s + Dd::ONE).ldexp(k as i32)
    }

    /// Natural log of a positive value, by Newton steps on `exp`.
    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of non-positive double-double");
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// `self^t` for `self ≥ 0`, with `0^0 = 1`.
    pub fn powf(self, t: f64) -> Self {
        if t == 0.0 {
            return Dd::ONE;
        }
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        if t == 1.0 {
            return self;
        }
        (self.ln() * Dd::from_f64(t)).exp()
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * y.lo + self.lo * y.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from_f64(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn from_c64(z: C64) -> Self {
        Self { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    pub fn real(x: Dd) -> Self {
        Self { re: x, im: Dd::ZERO }
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re * self.re + self.im * self.im
    }

    pub fn scale(self, s: Dd) -> Self {
        Self { re: self.re * s, im: self.im * s }
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, y: Cdd) -> Cdd {
        Cdd { re: self.re + y.re, im: self.im + y.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, y: Cdd) -> Cdd {
        Cdd { re: self.re - y.re, im: self.im - y.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, y: Cdd) -> Cdd {
        Cdd { re: self.re * y.re - self.im * y.im, im: self.re * y.im + self.im * y.re }
    }
}

/// Square double-double complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DdMatrix {
    n: usize,
    data: Vec<Cdd>,
}

impl DdMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Cdd::ZERO; n * n] }
    }

    pub fn from_complex(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        Self { n: m.rows(), data: m.data().iter().map(|&z| Cdd::from_c64(z)).collect() }
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::new(self.n, self.n, self.data.iter().map(|z| z.to_c64()).collect()).expect("finite entries")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Cdd {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, z: Cdd) {
        self.data[i * self.n + j] = z;
    }

    pub fn matmul(&self, o: &DdMatrix) -> DdMatrix {
        let n = self.n;
        let mut out = DdMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Cdd::ZERO;
                for k in 0..n {
                    s = s + self.get(i, k) * o.get(k, j);
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn adjoint(&self) -> DdMatrix {
        let n = self.n;
        let mut out = DdMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn sub(&self, o: &DdMatrix) -> DdMatrix {
        DdMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect() }
    }

    pub fn hadamard(&self, o: &DdMatrix) -> DdMatrix {
        DdMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| *a * *b).collect() }
    }

    pub fn hermitian_part(&self) -> DdMatrix {
        let n = self.n;
        let half = Dd::from_f64(0.5);
        let mut out = DdMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, (self.get(i, j) + self.get(j, i).conj()).scale(half));
            }
        }
        out
    }

    fn frobenius(&self) -> Dd {
        self.data.iter().fold(Dd::ZERO, |s, z| s + z.norm_sqr()).sqrt()
    }

    /// Gram–Schmidt on the columns, twice, in double-double.
    pub fn orthonormalize_columns(&self) -> DdMatrix {
        let n = self.n;
        let mut cols: Vec<Vec<Cdd>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v: Vec<Cdd> = (0..n).map(|i| self.get(i, j)).collect();
            for _ in 0..2 {
                for c in &cols {
                    let proj = c.iter().zip(&v).fold(Cdd::ZERO, |s, (a, b)| s + a.conj() * *b);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi = *vi - proj * *ci;
                    }
                }
            }
            let nrm = v.iter().fold(Dd::ZERO, |s, z| s + z.norm_sqr()).sqrt();
            let inv = Dd::ONE / nrm;
            cols.push(v.into_iter().map(|z| z.scale(inv)).collect());
        }
        let mut out = DdMatrix::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            for (i, &z) in c.iter().enumerate() {
                out.set(i, j, z);
            }
        }
        out
    }

    /// `Q diag(values) Q^*`
    pub fn synthesize(q: &DdMatrix, values: &[Dd]) -> DdMatrix {
        let n = q.n;
        let mut out = DdMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Cdd::ZERO;
                for (k, &v) in values.iter().enumerate() {
                    s = s + (q.get(i, k) * q.get(j, k).conj()).scale(v);
                }
                out.set(i, j, s);
            }
        }
        out
    }
}

/// Eigenpairs of a Hermitian double-double matrix, starting from an
/// approximate (double precision) eigenframe. Eigenvalues are returned in
/// descending order.
pub fn dd_eig_hermitian(a: &DdMatrix, start: &ComplexMatrix) -> (Vec<Dd>, DdMatrix) {
    let n = a.dim();
    let mut q = DdMatrix::from_complex(start).orthonormalize_columns();
    let mut b = q.adjoint().matmul(a).matmul(&q).hermitian_part();
    let target = b.frobenius() * Dd::from_f64(1e-30);

    for _ in 0..30 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(Dd::ZERO, |s, (i, j)| s + b.get(i, j).norm_sqr())
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                dd_rotate(&mut b, &mut q, p, r);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b.get(j, j).re.partial_cmp(&b.get(i, i).re).expect("finite"));
    let vals = order.iter().map(|&i| b.get(i, i).re).collect();
    let mut qs = DdMatrix::zeros(n);
    for (jn, &jo) in order.iter().enumerate() {
        for i in 0..n {
            qs.set(i, jn, q.get(i, jo));
        }
    }
    (vals, qs)
}

fn dd_rotate(a: &mut DdMatrix, v: &mut DdMatrix, p: usize, q: usize) {
    let n = a.dim();
    let apq = a.get(p, q);
    let r = apq.norm_sqr().sqrt();
    if r.hi == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let theta = (aqq - app) / (r + r);
    let one = Dd::ONE;
    let t = if theta.hi == 0.0 {
        one
    } else {
        let t = one / (theta.abs() + (theta * theta + one).sqrt());
        if theta.hi < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = one / (t * t + one).sqrt();
    let s = t * c;
    let inv_r = one / r;
    let phase = Cdd { re: apq.re * inv_r, im: -(apq.im * inv_r) };
    let gpp = Cdd::real(c);
    let gpq = Cdd::real(s);
    let gqp = phase.scale(-s);
    let gqq = phase.scale(c);
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * gpp + akq * gqp);
        a.set(k, q, akp * gpq + akq * gqq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, gpp.conj() * apk + gqp.conj() * aqk);
        a.set(q, k, gpq.conj() * apk + gqq.conj() * aqk);
    }
    a.set(p, q, Cdd::ZERO);
    a.set(q, p, Cdd::ZERO);
    a.set(p, p, Cdd::real(app - t * r));
    a.set(q, q, Cdd::real(aqq + t * r));
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * gpp + vkq * gqp);
        v.set(k, q, vkp * gpq + vkq * gqq);
    }
}
