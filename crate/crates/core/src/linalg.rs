//! Fixed-size 4×4 linear algebra on plain arrays.

use crate::scalar::Real;

pub type Vec4<T> = [T; 4];
pub type Mat4<T> = [[T; 4]; 4];

pub fn zeros<T: Real>() -> Mat4<T> {
    [[T::zero(); 4]; 4]
}

pub fn identity<T: Real>() -> Mat4<T> {
    let mut m = zeros();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

/// The standard complex structure `J0`: `J0 ∂1 = ∂2`, `J0 ∂3 = ∂4`.
///
/// Stored by columns, so `J0 · v` multiplies `(x1 + i x2, x3 + i x4)` by `i`.
pub fn complex_structure<T: Real>() -> Mat4<T> {
    let (o, z) = (T::one(), T::zero());
    [[z, -o, z, z], [o, z, z, z], [z, z, z, -o], [z, z, o, z]]
}

/// Matrix of `ω0 = dx¹∧dx² + dx³∧dx⁴`, i.e. `Ω_{jk} = ω0(∂j, ∂k)`.
pub fn standard_symplectic<T: Real>() -> Mat4<T> {
    transpose(&complex_structure())
}

pub fn transpose<T: Real>(a: &Mat4<T>) -> Mat4<T> {
    let mut t = zeros();
    for i in 0..4 {
        for j in 0..4 {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn matmul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut c = zeros();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = T::zero();
            for k in 0..4 {
                s = s + a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn matvec<T: Real>(a: &Mat4<T>, v: &Vec4<T>) -> Vec4<T> {
    let mut out = [T::zero(); 4];
    for i in 0..4 {
        out[i] = (0..4).fold(T::zero(), |s, k| s + a[i][k] * v[k]);
    }
    out
}

pub fn add<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = c[i][j] + b[i][j];
        }
    }
    c
}

pub fn sub<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = c[i][j] - b[i][j];
        }
    }
    c
}

pub fn scale<T: Real>(a: &Mat4<T>, s: T) -> Mat4<T> {
    let mut c = *a;
    for row in c.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * s;
        }
    }
    c
}

/// `a·(1−t) + b·t`.
pub fn lerp<T: Real>(a: &Mat4<T>, b: &Mat4<T>, t: T) -> Mat4<T> {
    add(&scale(a, T::one() - t), &scale(b, t))
}

pub fn max_abs<T: Real>(a: &Mat4<T>) -> T {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()))
}

pub fn frobenius<T: Real>(a: &Mat4<T>) -> T {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |s, v| s + *v * *v)
        .sqrt()
}

/// Euclidean norm of a 2-form given by its antisymmetric matrix:
/// `sqrt(Σ_{i<j} α_ij²)`.
pub fn two_form_norm<T: Real>(a: &Mat4<T>) -> T {
    let mut s = T::zero();
    for i in 0..4 {
        for j in (i + 1)..4 {
            s = s + a[i][j] * a[i][j];
        }
    }
    s.sqrt()
}

pub fn is_finite<T: Real>(a: &Mat4<T>) -> bool {
    a.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
}

pub fn dot<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    (0..4).fold(T::zero(), |s, i| s + a[i] * b[i])
}

pub fn norm<T: Real>(v: &Vec4<T>) -> T {
    dot(v, v).sqrt()
}

pub fn vsub<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> Vec4<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn vadd<T: Real>(a: &Vec4<T>, b: &Vec4<T>) -> Vec4<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn vscale<T: Real>(a: &Vec4<T>, s: T) -> Vec4<T> {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

/// Cholesky factorisation; `None` unless the matrix is symmetric positive definite.
pub fn cholesky<T: Real>(a: &Mat4<T>) -> Option<Mat4<T>> {
    let mut l = zeros();
    for i in 0..4 {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s = s - l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// LU decomposition with partial pivoting, returning the factors in place and
/// the permutation; `None` when a pivot vanishes.
fn lu<T: Real>(a: &Mat4<T>) -> Option<(Mat4<T>, [usize; 4], T)> {
    let mut m = *a;
    let mut perm = [0, 1, 2, 3];
    let mut sign = T::one();
    let scale = max_abs(a);
    if scale == T::zero() || !scale.is_finite() {
        return None;
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() <= scale * T::epsilon() * T::lit(16.0) {
            return None;
        }
        if pivot != col {
            m.swap(pivot, col);
            perm.swap(pivot, col);
            sign = -sign;
        }
        for row in (col + 1)..4 {
            let f = m[row][col] / m[col][col];
            m[row][col] = f;
            for k in (col + 1)..4 {
                m[row][k] = m[row][k] - f * m[col][k];
            }
        }
    }
    Some((m, perm, sign))
}

fn lu_solve<T: Real>(lu: &Mat4<T>, perm: &[usize; 4], b: &Vec4<T>) -> Vec4<T> {
    let mut y = [T::zero(); 4];
    for i in 0..4 {
        let mut s = b[perm[i]];
        for k in 0..i {
            s = s - lu[i][k] * y[k];
        }
        y[i] = s;
    }
    let mut x = [T::zero(); 4];
    for i in (0..4).rev() {
        let mut s = y[i];
        for k in (i + 1)..4 {
            s = s - lu[i][k] * x[k];
        }
        x[i] = s / lu[i][i];
    }
    x
}

/// Solves `a·x = b`.
pub fn solve<T: Real>(a: &Mat4<T>, b: &Vec4<T>) -> Option<Vec4<T>> {
    let (f, perm, _) = lu(a)?;
    Some(lu_solve(&f, &perm, b))
}

pub fn inverse<T: Real>(a: &Mat4<T>) -> Option<Mat4<T>> {
    let (f, perm, _) = lu(a)?;
    let mut inv = zeros();
    for j in 0..4 {
        let mut e = [T::zero(); 4];
        e[j] = T::one();
        let col = lu_solve(&f, &perm, &e);
        for i in 0..4 {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

pub fn determinant<T: Real>(a: &Mat4<T>) -> T {
    match lu(a) {
        Some((f, _, sign)) => (0..4).fold(sign, |d, i| d * f[i][i]),
        None => T::zero(),
    }
}

/// Pfaffian of an antisymmetric 4×4 matrix: `a01·a23 − a02·a13 + a03·a12`.
pub fn pfaffian<T: Real>(a: &Mat4<T>) -> T {
    a[0][1] * a[2][3] - a[0][2] * a[1][3] + a[0][3] * a[1][2]
}

/// Real 4×4 matrix of the block rotation `diag(e^{iα}, e^{iβ})` on `ℂ²`.
pub fn unitary_diagonal<T: Real>(alpha: T, beta: T) -> Mat4<T> {
    let mut m = zeros();
    for (block, ang) in [(0usize, alpha), (2usize, beta)] {
        let (s, c) = ang.sin_cos();
        m[block][block] = c;
        m[block][block + 1] = -s;
        m[block + 1][block] = s;
        m[block + 1][block + 1] = c;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        let j = complex_structure::<f64>();
        assert_eq!(matmul(&j, &j), scale(&identity(), -1.0));
        let w = standard_symplectic::<f64>();
        assert_eq!(w[0][1], 1.0);
        assert_eq!(w[2][3], 1.0);
        assert_eq!(pfaffian(&w), 1.0);
    }

    #[test]
    fn inverse_and_solve_agree() {
        let a = [
            [4.0, 1.0, 0.5, 0.0],
            [1.0, 3.0, 0.0, 0.2],
            [0.5, 0.0, 2.0, 0.1],
            [0.0, 0.2, 0.1, 1.0],
        ];
        let inv = inverse(&a).unwrap();
        let p = matmul(&a, &inv);
        assert!(max_abs(&sub(&p, &identity())) < 1e-14);
        let x: [f64; 4] = solve(&a, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let back = matvec(&a, &x);
        assert!((back[3] - 4.0).abs() < 1e-14);
        assert!(cholesky(&a).is_some());
        assert!(cholesky(&scale(&a, -1.0)).is_none());
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut a = identity::<f64>();
        a[3][3] = 0.0;
        assert!(inverse(&a).is_none());
        assert_eq!(determinant(&a), 0.0);
    }

    #[test]
    fn determinant_of_rotation_is_one() {
        let r = unitary_diagonal(0.3f64, 1.1);
        assert!((determinant(&r) - 1.0).abs() < 1e-14);
    }
}
