//! Minimal complex arithmetic over any [`Real`], enough for 4x4 gate
//! algebra and Kraus contractions.

use std::ops::{Add, Mul, Neg, Sub};

use super::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Complex<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Complex<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn real(re: T) -> Self {
        let im = re.zero_like();
        Self { re, im }
    }

    pub fn zero_like(x: &T) -> Self {
        Self { re: x.zero_like(), im: x.zero_like() }
    }

    pub fn one_like(x: &T) -> Self {
        Self { re: x.one_like(), im: x.zero_like() }
    }

    /// `e^{iθ}`
    pub fn cis(theta: &T) -> Self {
        Self { re: theta.cos(), im: theta.sin() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> T {
        let mut n = self.re.clone() * &self.re;
        n.add_mul(&self.im, &self.im);
        n
    }

    pub fn abs(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { re: self.re.clone() * s, im: self.im.clone() * s }
    }

    pub fn div(&self, other: &Self) -> Self {
        let d = other.norm_sqr();
        let n = self.clone() * other.conj();
        Self { re: n.re / &d, im: n.im / &d }
    }

    /// `self += a * b`
    pub fn add_mul(&mut self, a: &Self, b: &Self) {
        self.re.add_mul(&a.re, &b.re);
        self.re.sub_mul(&a.im, &b.im);
        self.im.add_mul(&a.re, &b.im);
        self.im.add_mul(&a.im, &b.re);
    }
}

impl<T: Real> Add for Complex<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<T: Real> Sub for Complex<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<T: Real> Neg for Complex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

impl<T: Real> Mul for Complex<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut re = self.re.clone() * &o.re;
        re.sub_mul(&self.im, &o.im);
        let mut im = self.re * &o.im;
        im.add_mul(&self.im, &o.re);
        Self { re, im }
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn from_vec(n: usize, data: Vec<Complex<T>>) -> Option<Self> {
        (n > 0 && data.len() == n * n).then_some(Self { n, data })
    }

    pub fn zeros_like(x: &T, n: usize) -> Self {
        Self { n, data: vec![Complex::zero_like(x); n * n] }
    }

    pub fn identity_like(x: &T, n: usize) -> Self {
        let mut m = Self::zeros_like(x, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::one_like(x);
        }
        m
    }

    /// Real matrix embedded with zero imaginary part.
    pub fn from_real(n: usize, entries: &[T]) -> Self {
        Self { n, data: entries.iter().cloned().map(Complex::real).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<T> {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros_like(&self.data[0].re, n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                for j in 0..n {
                    out.data[i * n + j].add_mul(a, &o.data[k * n + j]);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::zero_like(&self.data[0].re);
        for i in 0..self.n {
            t = t + self.data[i * self.n + i].clone();
        }
        t
    }

    pub fn kron(&self, o: &Self) -> Self {
        let (n, m) = (self.n, o.n);
        let mut out = Self::zeros_like(&self.data[0].re, n * m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..m {
                    for l in 0..m {
                        out.data[(i * m + k) * n * m + j * m + l] =
                            self.data[i * n + j].clone() * o.data[k * m + l].clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Self { n: self.n, data }
    }

    pub fn scale(&self, s: &Complex<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    /// Largest entry modulus of `self - o`.
    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut best = self.data[0].re.zero_like();
        for (a, b) in self.data.iter().zip(&o.data) {
            best = best.max_of((a.clone() - b.clone()).abs());
        }
        best
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Complex<T> {
        let n = self.n;
        let mut a = self.data.clone();
        let x = self.data[0].re.clone();
        let mut det = Complex::one_like(&x);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm_sqr();
            for r in (col + 1)..n {
                let v = a[r * n + col].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best.is_zero() {
                return Complex::zero_like(&x);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for r in (col + 1)..n {
                let f = a[r * n + col].div(&p);
                for j in col..n {
                    let v = a[col * n + j].clone();
                    a[r * n + j] = a[r * n + j].clone() - f.clone() * v;
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_and_division() {
        let a = Complex::new(1.0, 2.0);
        let b = Complex::new(3.0, -1.0);
        let p = a.clone() * b.clone();
        assert_eq!(p, Complex::new(5.0, 5.0));
        let q = p.div(&b);
        assert!((q.re - 1.0).abs() < 1e-15 && (q.im - 2.0).abs() < 1e-15);
    }

    #[test]
    fn determinant_of_kron() {
        let z = 0.0f64;
        let a = CMatrix::from_vec(2, vec![Complex::new(2.0, 0.0), Complex::new(0.0, 1.0), Complex::real(z), Complex::new(1.0, 0.0)]).unwrap();
        let b = CMatrix::identity_like(&z, 2);
        let d = a.kron(&b).det();
        // det(A ⊗ I2) = det(A)^2 = 4
        assert!((d.re - 4.0).abs() < 1e-14 && d.im.abs() < 1e-14);
    }
}
