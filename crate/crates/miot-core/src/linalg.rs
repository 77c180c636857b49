//! Fixed-size complex linear algebra for the five-mode model.
//!
//! Everything here is specialized to 5x5: direct LU elimination with partial
//! pivoting, matrix-vector products and a handful of norms. The dimension is
//! tiny and fixed, so no external solver is used.

use crate::error::Error;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex64;

pub const DIM: usize = 5;

pub type Mat5 = [[C64; DIM]; DIM];
pub type Vec5 = [C64; DIM];

pub const ZERO_MAT: Mat5 = [[C64::new(0.0, 0.0); DIM]; DIM];
pub const ZERO_VEC: Vec5 = [C64::new(0.0, 0.0); DIM];

#[inline]
pub fn matvec(m: &Mat5, x: &Vec5) -> Vec5 {
    let mut y = ZERO_VEC;
    for i in 0..DIM {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..DIM {
            acc += m[i][j] * x[j];
        }
        y[i] = acc;
    }
    y
}

/// Frobenius norm.
pub fn mat_norm(m: &Mat5) -> f64 {
    let mut s = 0.0;
    for row in m {
        for e in row {
            s += e.norm_sqr();
        }
    }
    s.sqrt()
}

pub fn vec_norm(x: &Vec5) -> f64 {
    x.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum row sum of absolute values; Gershgorin bound on the spectral
/// radius.
pub fn gershgorin_radius(m: &Mat5) -> f64 {
    let mut r: f64 = 0.0;
    for row in m {
        let s: f64 = row.iter().map(|e| e.norm()).sum();
        r = r.max(s);
    }
    r
}

/// Solve `m x = b` by LU elimination with partial pivoting, followed by one
/// step of iterative refinement.
pub fn solve(m: &Mat5, b: &Vec5) -> Result<Vec5, Error> {
    let x = lu_solve(m, b)?;
    // Refinement: r = b - m x, x += m^{-1} r.
    let mx = matvec(m, &x);
    let mut r = ZERO_VEC;
    for i in 0..DIM {
        r[i] = b[i] - mx[i];
    }
    let dx = lu_solve(m, &r)?;
    let mut out = x;
    for i in 0..DIM {
        out[i] += dx[i];
    }
    Ok(out)
}

fn lu_solve(m: &Mat5, b: &Vec5) -> Result<Vec5, Error> {
    let mut a = *m;
    let mut x = *b;
    let scale = mat_norm(m);
    for col in 0..DIM {
        // Partial pivot on the largest remaining magnitude in this column.
        let mut piv = col;
        let mut best = a[col][col].norm();
        for row in col + 1..DIM {
            let v = a[row][col].norm();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best <= scale * 1e-300 || best == 0.0 {
            return Err(Error::SingularSystem);
        }
        if piv != col {
            a.swap(piv, col);
            x.swap(piv, col);
        }
        let inv = C64::new(1.0, 0.0) / a[col][col];
        for row in col + 1..DIM {
            let f = a[row][col] * inv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for k in col..DIM {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = x[col];
            x[row] -= f * t;
        }
    }
    for col in (0..DIM).rev() {
        let mut acc = x[col];
        for k in col + 1..DIM {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}
