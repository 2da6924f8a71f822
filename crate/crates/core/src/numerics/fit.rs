use super::real::Real;
use crate::error::{Error, Result};

/// Ordinary least-squares line.
#[derive(Clone, Debug)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual.
    pub rms_residual: T,
}

pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!("{} xs against {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 2 || xs.iter().all(|x| *x == xs[0]) {
        return Err(Error::DegenerateFit("need at least two distinct abscissae".into()));
    }
    let n = xs[0].from_f64_like(xs.len() as f64);
    let mut mx = xs[0].zero_like();
    let mut my = xs[0].zero_like();
    for (x, y) in xs.iter().zip(ys) {
        mx += x;
        my += y;
    }
    mx /= &n;
    my /= &n;
    let mut sxx = mx.zero_like();
    let mut sxy = mx.zero_like();
    for (x, y) in xs.iter().zip(ys) {
        let dx = x.clone() - &mx;
        let dy = y.clone() - &my;
        sxx.add_mul(&dx, &dx);
        sxy.add_mul(&dx, &dy);
    }
    let slope = sxy / &sxx;
    let intercept = my - slope.clone() * &mx;
    let mut ss = mx.zero_like();
    for (x, y) in xs.iter().zip(ys) {
        let mut r = y.clone() - &intercept;
        r.sub_mul(&slope, x);
        ss.add_mul(&r, &r);
    }
    Ok(LinearFit { slope, intercept, rms_residual: (ss / n).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points() {
        let f = linear_fit(&[0.0, 1.0], &[1.0, 2.0]).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-15);
        assert!((f.intercept - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_data() {
        let f = linear_fit(&[0.0, 1.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn degenerate_abscissae() {
        assert!(matches!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]), Err(Error::DegenerateFit(_))));
        assert!(linear_fit(&[1.0], &[0.0]).is_err());
    }
}
