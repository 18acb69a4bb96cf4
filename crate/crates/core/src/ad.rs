//! Forward-mode derivative helpers on top of `num-dual`.

use nalgebra::{Const, SMatrix};
use num_dual::{Derivative, Dual2SVec64, DualNum, DualSVec64};

use crate::error::Result;

/// Scalar type accepted by the generic closed-form metrics.
pub trait Real: DualNum<Primitive = f64> + Copy + Send + Sync {}
impl<T: DualNum<Primitive = f64> + Copy + Send + Sync> Real for T {}

#[inline]
pub fn cst<D: Real>(x: f64) -> D {
    D::from(x)
}

/// Value and first/second partial derivatives of a matrix-valued function.
#[derive(Clone, Debug)]
pub struct MatJet<const N: usize> {
    pub value: SMatrix<f64, N, N>,
    pub d1: [SMatrix<f64, N, N>; N],
    pub d2: Option<[[SMatrix<f64, N, N>; N]; N]>,
}

/// Second-order jet of `f` at `x` by forward-mode hyper-dual evaluation.
pub fn mat_jet2<const N: usize, F>(f: F, x: [f64; N]) -> Result<MatJet<N>>
where
    F: Fn([Dual2SVec64<N>; N]) -> Result<[[Dual2SVec64<N>; N]; N]>,
{
    let args: [Dual2SVec64<N>; N] = std::array::from_fn(|i| Dual2SVec64::from_re(x[i]).derivative(i));
    let out = f(args)?;
    let mut value = SMatrix::<f64, N, N>::zeros();
    let mut d1 = [SMatrix::<f64, N, N>::zeros(); N];
    let mut d2 = [[SMatrix::<f64, N, N>::zeros(); N]; N];
    for a in 0..N {
        for b in 0..N {
            let e = out[a][b];
            value[(a, b)] = e.re;
            let g = e.v1.unwrap_generic(Const::<1>, Const::<N>);
            let h = e.v2.unwrap_generic(Const::<N>, Const::<N>);
            for k in 0..N {
                d1[k][(a, b)] = g[k];
                for l in 0..N {
                    d2[k][l][(a, b)] = h[(k, l)];
                }
            }
        }
    }
    Ok(MatJet {
        value,
        d1,
        d2: Some(d2),
    })
}

/// First-order jet of `f` at `x` by forward-mode dual evaluation.
pub fn mat_jet1<const N: usize, F>(f: F, x: [f64; N]) -> Result<MatJet<N>>
where
    F: Fn([DualSVec64<N>; N]) -> Result<[[DualSVec64<N>; N]; N]>,
{
    let args: [DualSVec64<N>; N] = std::array::from_fn(|i| seed1(x[i], i));
    let out = f(args)?;
    let mut value = SMatrix::<f64, N, N>::zeros();
    let mut d1 = [SMatrix::<f64, N, N>::zeros(); N];
    for a in 0..N {
        for b in 0..N {
            let e = out[a][b];
            value[(a, b)] = e.re;
            let g = e.eps.unwrap_generic(Const::<N>, Const::<1>);
            for k in 0..N {
                d1[k][(a, b)] = g[k];
            }
        }
    }
    Ok(MatJet { value, d1, d2: None })
}

/// Value and Jacobian `J[(i, k)] = d out_i / d x_k` of a vector map.
pub fn vec_jacobian<const N: usize, const M: usize, F>(
    f: F,
    x: [f64; N],
) -> Result<([f64; M], SMatrix<f64, M, N>)>
where
    F: Fn([DualSVec64<N>; N]) -> Result<[DualSVec64<N>; M]>,
{
    let args: [DualSVec64<N>; N] = std::array::from_fn(|i| seed1(x[i], i));
    let out = f(args)?;
    let mut value = [0.0; M];
    let mut jac = SMatrix::<f64, M, N>::zeros();
    for i in 0..M {
        value[i] = out[i].re;
        let g = out[i].eps.unwrap_generic(Const::<N>, Const::<1>);
        for k in 0..N {
            jac[(i, k)] = g[k];
        }
    }
    Ok((value, jac))
}

fn seed1<const N: usize>(x: f64, i: usize) -> DualSVec64<N> {
    let mut d = DualSVec64::<N>::from_re(x);
    d.eps = Derivative::derivative_generic(Const::<N>, Const::<1>, i);
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_of_product_matches_hand_derivatives() {
        let jet = mat_jet2(
            |x: [Dual2SVec64<2>; 2]| {
                let z = Dual2SVec64::<2>::from_re(0.0);
                Ok([[x[0] * x[1] * x[1], z], [z, x[0].sin()]])
            },
            [0.3, 2.0],
        )
        .unwrap();
        assert!((jet.value[(0, 0)] - 1.2).abs() < 1e-15);
        assert!((jet.d1[0][(0, 0)] - 4.0).abs() < 1e-15);
        assert!((jet.d1[1][(0, 0)] - 1.2).abs() < 1e-15);
        let d2 = jet.d2.unwrap();
        assert!((d2[0][1][(0, 0)] - 4.0).abs() < 1e-15);
        assert!((d2[1][1][(0, 0)] - 0.6).abs() < 1e-15);
        assert!((d2[0][0][(1, 1)] + 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn jacobian_of_polar_map() {
        let (v, j) = vec_jacobian(
            |x: [DualSVec64<2>; 2]| Ok([x[0] * x[1].cos(), x[0] * x[1].sin()]),
            [2.0, 0.5],
        )
        .unwrap();
        assert!((v[0] - 2.0 * 0.5f64.cos()).abs() < 1e-15);
        assert!((j[(0, 1)] + 2.0 * 0.5f64.sin()).abs() < 1e-15);
        assert!((j[(1, 0)] - 0.5f64.sin()).abs() < 1e-15);
    }
}
