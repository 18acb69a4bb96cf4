//! Central finite differences for matrix-valued functions of N coordinates.

use nalgebra::SMatrix;

use crate::error::Result;

/// How partial derivatives of a field are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Closed-form jets when the field provides them, finite differences otherwise.
    Auto,
    /// Always central finite differences.
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivativeConfig {
    pub mode: DerivativeMode,
    /// Combine steps h and h/2 to cancel the leading truncation term.
    pub richardson: bool,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        Self {
            mode: DerivativeMode::Auto,
            richardson: true,
        }
    }
}

impl DerivativeConfig {
    pub fn finite_difference() -> Self {
        Self {
            mode: DerivativeMode::FiniteDifference,
            richardson: false,
        }
    }
}

/// Step for a first derivative: `max(|x|, 1) * eps^(1/3)`, or `eps^(1/5)` under Richardson.
pub fn first_step(x: f64, richardson: bool) -> f64 {
    let p = if richardson { 0.2 } else { 1.0 / 3.0 };
    x.abs().max(1.0) * f64::EPSILON.powf(p)
}

/// Step for a second derivative: `max(|x|, 1) * eps^(1/4)`, or `eps^(1/6)` under Richardson.
pub fn second_step(x: f64, richardson: bool) -> f64 {
    let p = if richardson { 1.0 / 6.0 } else { 0.25 };
    x.abs().max(1.0) * f64::EPSILON.powf(p)
}

fn shifted<const N: usize>(x: &[f64; N], k: usize, h: f64) -> [f64; N] {
    let mut y = *x;
    y[k] += h;
    y
}

fn shifted2<const N: usize>(x: &[f64; N], k: usize, hk: f64, l: usize, hl: f64) -> [f64; N] {
    let mut y = *x;
    y[k] += hk;
    y[l] += hl;
    y
}

fn central<const N: usize, const R: usize, F>(f: &F, x: &[f64; N], k: usize, h: f64) -> Result<SMatrix<f64, R, R>>
where
    F: Fn(&[f64; N]) -> Result<SMatrix<f64, R, R>> + ?Sized,
{
    let p = f(&shifted(x, k, h))?;
    let m = f(&shifted(x, k, -h))?;
    Ok((p - m) / (2.0 * h))
}

/// `out[k] = d f / d x^k`.
pub fn first_derivatives<const N: usize, const R: usize, F>(
    f: &F,
    x: &[f64; N],
    richardson: bool,
) -> Result<[SMatrix<f64, R, R>; N]>
where
    F: Fn(&[f64; N]) -> Result<SMatrix<f64, R, R>> + ?Sized,
{
    let mut out = [SMatrix::<f64, R, R>::zeros(); N];
    for k in 0..N {
        let h = first_step(x[k], richardson);
        out[k] = if richardson {
            let coarse = central(f, x, k, h)?;
            let fine = central(f, x, k, 0.5 * h)?;
            (fine * 4.0 - coarse) / 3.0
        } else {
            central(f, x, k, h)?
        };
    }
    Ok(out)
}

fn second_at<const N: usize, const R: usize, F>(
    f: &F,
    x: &[f64; N],
    center: &SMatrix<f64, R, R>,
    k: usize,
    l: usize,
    hk: f64,
    hl: f64,
) -> Result<SMatrix<f64, R, R>>
where
    F: Fn(&[f64; N]) -> Result<SMatrix<f64, R, R>> + ?Sized,
{
    if k == l {
        let p = f(&shifted(x, k, hk))?;
        let m = f(&shifted(x, k, -hk))?;
        Ok((p + m - center * 2.0) / (hk * hk))
    } else {
        let pp = f(&shifted2(x, k, hk, l, hl))?;
        let pm = f(&shifted2(x, k, hk, l, -hl))?;
        let mp = f(&shifted2(x, k, -hk, l, hl))?;
        let mm = f(&shifted2(x, k, -hk, l, -hl))?;
        Ok((pp - pm - mp + mm) / (4.0 * hk * hl))
    }
}

/// `out[k][l] = d^2 f / d x^k d x^l`.
pub fn second_derivatives<const N: usize, const R: usize, F>(
    f: &F,
    x: &[f64; N],
    richardson: bool,
) -> Result<[[SMatrix<f64, R, R>; N]; N]>
where
    F: Fn(&[f64; N]) -> Result<SMatrix<f64, R, R>> + ?Sized,
{
    let center = f(x)?;
    let mut out = [[SMatrix::<f64, R, R>::zeros(); N]; N];
    for k in 0..N {
        for l in k..N {
            let hk = second_step(x[k], richardson);
            let hl = second_step(x[l], richardson);
            let d = if richardson {
                let coarse = second_at(f, x, &center, k, l, hk, hl)?;
                let fine = second_at(f, x, &center, k, l, 0.5 * hk, 0.5 * hl)?;
                (fine * 4.0 - coarse) / 3.0
            } else {
                second_at(f, x, &center, k, l, hk, hl)?
            };
            out[k][l] = d;
            out[l][k] = d;
        }
    }
    Ok(out)
}

/// Scalar version of a central first derivative.
pub fn scalar_derivative<F>(f: &F, x: f64, richardson: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let h = first_step(x, richardson);
    let c = |h: f64| -> Result<f64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    if richardson {
        Ok((4.0 * c(0.5 * h)? - c(h)?) / 3.0)
    } else {
        c(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    fn f(x: &[f64; 2]) -> Result<Matrix2<f64>> {
        Ok(Matrix2::new(x[0].sin() * x[1], x[0] * x[0], x[0] * x[0], x[1].exp()))
    }

    #[test]
    fn first_derivatives_match_closed_form() {
        let x = [0.7, -1.3];
        for rich in [false, true] {
            let d = first_derivatives(&f, &x, rich).unwrap();
            let tol = if rich { 1e-11 } else { 1e-9 };
            assert!((d[0][(0, 0)] - 0.7f64.cos() * -1.3).abs() < tol);
            assert!((d[1][(0, 0)] - 0.7f64.sin()).abs() < tol);
            assert!((d[0][(0, 1)] - 1.4).abs() < tol);
            assert!((d[1][(1, 1)] - (-1.3f64).exp()).abs() < tol);
        }
    }

    #[test]
    fn second_derivatives_match_closed_form() {
        let x = [0.7, -1.3];
        for rich in [false, true] {
            let d = second_derivatives(&f, &x, rich).unwrap();
            let tol = if rich { 1e-9 } else { 1e-6 };
            assert!((d[0][0][(0, 0)] + 0.7f64.sin() * -1.3).abs() < tol);
            assert!((d[0][1][(0, 0)] - 0.7f64.cos()).abs() < tol);
            assert!((d[0][0][(0, 1)] - 2.0).abs() < tol);
            assert!((d[1][1][(1, 1)] - (-1.3f64).exp()).abs() < tol);
        }
    }
}
