//! Fixed-size 4×4 complex matrices and a cyclic Jacobi eigensolver for the
//! Hermitian case.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{Cplx, Real};

pub type Mat4<T> = [[Cplx<T>; 4]; 4];

pub fn zeros<T: Real>() -> Mat4<T> {
    [[Complex::zero(); 4]; 4]
}

pub fn identity<T: Real>() -> Mat4<T> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex::one();
    }
    m
}

pub fn mul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut c = zeros();
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                c[i][j] = c[i][j] + aik * b[k][j];
            }
        }
    }
    c
}

pub fn adjoint<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let mut c = zeros();
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

pub fn transpose<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let mut c = zeros();
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[j][i];
        }
    }
    c
}

pub fn conj<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    a.map(|row| row.map(|z| z.conj()))
}

pub fn trace<T: Real>(a: &Mat4<T>) -> Cplx<T> {
    (0..4).fold(Complex::zero(), |acc, i| acc + a[i][i])
}

/// Largest elementwise modulus of `a − a†`.
pub fn hermiticity_defect<T: Real>(a: &Mat4<T>) -> T {
    let mut d = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    d
}

/// `V diag(d) V†`.
pub fn from_eigen<T: Real>(values: &[T; 4], vectors: &Mat4<T>) -> Mat4<T> {
    let mut c = zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = Complex::zero();
            for (k, &dk) in values.iter().enumerate() {
                s = s + vectors[i][k] * vectors[j][k].conj() * dk;
            }
            c[i][j] = s;
        }
    }
    c
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: [T; 4],
    /// Eigenvectors stored as columns, matching `values`.
    pub vectors: Mat4<T>,
}

/// Cyclic complex Jacobi. Only the Hermitian part of `a` is used.
pub fn hermitian_eigen<T: Real>(a: &Mat4<T>) -> HermitianEigen<T> {
    let mut m = zeros();
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = (a[i][j] + a[j][i].conj()).scale(T::half());
        }
    }
    let mut v = identity();
    let scale = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| m[i][j].norm_sqr())
        .sum::<T>()
        .sqrt();
    let tiny = T::epsilon() * T::epsilon() * scale * scale;

    for _sweep in 0..64 {
        let off: T = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j].norm_sqr())
            .sum();
        if off <= tiny || off == T::zero() {
            break;
        }
        for p in 0..3 {
            for q in p + 1..4 {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut values = [T::zero(); 4];
    for (i, val) in values.iter_mut().enumerate() {
        *val = m[i][i].re;
    }
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_vals = order.map(|k| values[k]);
    let mut sorted_vecs = zeros();
    for (col, &k) in order.iter().enumerate() {
        for row in 0..4 {
            sorted_vecs[row][col] = v[row][k];
        }
    }
    HermitianEigen {
        values: sorted_vals,
        vectors: sorted_vecs,
    }
}

/// Annihilates `m[p][q]` with `G = D R` where `D` removes the phase of the
/// pivot and `R` is the real Jacobi rotation; `m ← G† m G`, `v ← v G`.
fn rotate<T: Real>(m: &mut Mat4<T>, v: &mut Mat4<T>, p: usize, q: usize) {
    let apq = m[p][q];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let e = apq.unscale(r); // e^{iφ}
    let app = m[p][p].re;
    let aqq = m[q][q].re;
    let tau = (aqq - app) / (T::two() * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // D = diag(1, ē) on (p, q), R = [[c, s], [−s, c]].
    let ebar = e.conj();
    let gpp = Complex::new(c, T::zero());
    let gqp = ebar.scale(-s);
    let gpq = Complex::new(s, T::zero());
    let gqq = ebar.scale(c);

    // m ← m G (columns p, q)
    for row in m.iter_mut() {
        let (xp, xq) = (row[p], row[q]);
        row[p] = xp * gpp + xq * gqp;
        row[q] = xp * gpq + xq * gqq;
    }
    // m ← G† m (rows p, q)
    for col in 0..4 {
        let (xp, xq) = (m[p][col], m[q][col]);
        m[p][col] = gpp.conj() * xp + gqp.conj() * xq;
        m[q][col] = gpq.conj() * xp + gqq.conj() * xq;
    }
    m[p][q] = Complex::zero();
    m[q][p] = Complex::zero();
    m[p][p].im = T::zero();
    m[q][q].im = T::zero();
    for row in v.iter_mut() {
        let (xp, xq) = (row[p], row[q]);
        row[p] = xp * gpp + xq * gqp;
        row[q] = xp * gpq + xq * gqq;
    }
}
