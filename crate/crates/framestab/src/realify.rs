//! Isometric isomorphisms between complex/Hermitian matrix spaces and real
//! coordinate spaces, used to turn trace inner products into real dot products.
//!
//! `tau` maps Hermitian k x k matrices onto R^{k^2}, `mu` maps complex p x q
//! matrices onto R^{2pq}, and `jmap` realifies a complex matrix as the block
//! matrix `[[Re X, -Im X], [Im X, Re X]]`. All three preserve the real trace
//! inner product (`jmap` up to the constant 2).

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::tol;
use crate::types::{is_hermitian, C64, CMat, RMat, RVec};

/// Real coordinate vector produced by `tau` or `mu`.
pub type RealVector = DVector<f64>;

/// `tau(X) = [diag X; sqrt2 * upper(Re X); sqrt2 * upper(Im X)]` with the
/// upper triangle enumerated (1,2), (1,3), (2,3), ..., (k-1,k).
pub fn tau(x: &CMat) -> Result<RealVector> {
    let k = x.nrows();
    if x.ncols() != k {
        return Err(Error::ShapeMismatch(format!(
            "tau expects a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    if !is_hermitian(x, tol::HERMITIAN_LOAD_REL) {
        return Err(Error::NotHermitian);
    }
    let mut out = RVec::zeros(k * k);
    for i in 0..k {
        out[i] = x[(i, i)].re;
    }
    let s = std::f64::consts::SQRT_2;
    let mut idx = k;
    let pairs = k * (k - 1) / 2;
    for j in 1..k {
        for i in 0..j {
            out[idx] = s * x[(i, j)].re;
            out[idx + pairs] = s * x[(i, j)].im;
            idx += 1;
        }
    }
    Ok(out)
}

/// Inverse of `tau`; the length must be a perfect square.
pub fn tau_inv(v: &RealVector) -> Result<CMat> {
    let k2 = v.len();
    let k = (k2 as f64).sqrt().round() as usize;
    if k * k != k2 || k == 0 {
        return Err(Error::ShapeMismatch(format!(
            "tau_inv expects a square length, got {k2}"
        )));
    }
    let mut x = CMat::zeros(k, k);
    for i in 0..k {
        x[(i, i)] = C64::new(v[i], 0.0);
    }
    let s = std::f64::consts::SQRT_2;
    let pairs = k * (k - 1) / 2;
    let mut idx = k;
    for j in 1..k {
        for i in 0..j {
            let re = v[idx] / s;
            let im = v[idx + pairs] / s;
            x[(i, j)] = C64::new(re, im);
            x[(j, i)] = C64::new(re, -im);
            idx += 1;
        }
    }
    Ok(x)
}

/// `mu(X) = vec([Re X; Im X])`, column-major: each column contributes its
/// real part followed by its imaginary part.
pub fn mu(x: &CMat) -> RealVector {
    let (p, q) = x.shape();
    let mut out = RVec::zeros(2 * p * q);
    for j in 0..q {
        for i in 0..p {
            out[2 * p * j + i] = x[(i, j)].re;
            out[2 * p * j + p + i] = x[(i, j)].im;
        }
    }
    out
}

/// Inverse of `mu` for a `p x q` target shape.
pub fn mu_inv(v: &RealVector, p: usize, q: usize) -> Result<CMat> {
    if v.len() != 2 * p * q {
        return Err(Error::ShapeMismatch(format!(
            "mu_inv expects length {}, got {}",
            2 * p * q,
            v.len()
        )));
    }
    Ok(CMat::from_fn(p, q, |i, j| {
        C64::new(v[2 * p * j + i], v[2 * p * j + p + i])
    }))
}

/// `l(X) = [Re X; Im X]`, the isometric real stacking.
pub fn stack_reim(x: &CMat) -> RMat {
    let (p, q) = x.shape();
    RMat::from_fn(2 * p, q, |i, j| {
        if i < p {
            x[(i, j)].re
        } else {
            x[(i - p, j)].im
        }
    })
}

/// The realification homomorphism as a plain block matrix.
pub fn j_block(x: &CMat) -> RMat {
    let (p, q) = x.shape();
    let mut out = RMat::zeros(2 * p, 2 * q);
    for i in 0..p {
        for j in 0..q {
            let c = x[(i, j)];
            out[(i, j)] = c.re;
            out[(i, j + q)] = -c.im;
            out[(i + p, j)] = c.im;
            out[(i + p, j + q)] = c.re;
        }
    }
    out
}

/// The symplectic form `J = [[0, -I], [I, 0]]` on R^{2n}.
pub fn symplectic(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// A realified complex operator, either `j(X)` itself or its Kronecker lift
/// `I_k (x) j(X)` acting on `mu`-coordinates of `n x k` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealifiedOperator {
    matrix: RMat,
}

impl RealifiedOperator {
    /// `j(X)`, the 2m x 2n real block form of a complex `m x n` matrix.
    pub fn from_complex(x: &CMat) -> Self {
        Self { matrix: j_block(x) }
    }

    /// `I_k (x) j(X)`; symmetric whenever `X` is Hermitian.
    pub fn lifted(x: &CMat, k: usize) -> Self {
        let j = j_block(x);
        Self {
            matrix: RMat::identity(k, k).kronecker(&j),
        }
    }

    pub fn matrix(&self) -> &RMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> RMat {
        self.matrix
    }
}

/// `jmap(X)` per the realified-operator contract.
pub fn jmap(x: &CMat) -> RealifiedOperator {
    RealifiedOperator::from_complex(x)
}
