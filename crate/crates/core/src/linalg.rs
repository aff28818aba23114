//! Fixed-size real vectors and matrices used by the polygon models, plus a
//! small dense Gaussian-elimination solver for the 9×9 facet systems.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A point or functional in ℝ³ (GPT coordinates, dimensionless).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn scale(&self, k: f64) -> Vec3 {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Vec3) -> f64 {
        (0..3)
            .map(|i| (self.0[i] - other.0[i]).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Outer product `self · otherᵀ`.
    pub fn outer(&self, other: &Vec3) -> Mat3 {
        let mut m = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                m[3 * r + c] = self.0[r] * other.0[c];
            }
        }
        Mat3(m)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

/// Row-major 3×3 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3(pub [f64; 9]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    pub const ZERO: Mat3 = Mat3([0.0; 9]);

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        let mut m = [0.0; 9];
        for (r, row) in rows.iter().enumerate() {
            m[3 * r..3 * r + 3].copy_from_slice(row);
        }
        Mat3(m)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[3 * row + col]
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]])
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let m = &self.0;
        let v = &v.0;
        Vec3([
            m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
            m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
            m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
        ])
    }

    /// Bilinear form `aᵀ · self · b`.
    pub fn bilinear(&self, a: &Vec3, b: &Vec3) -> f64 {
        a.dot(&self.mul_vec(b))
    }

    /// Frobenius pairing `Tr[selfᵀ · other]`.
    pub fn frobenius(&self, other: &Mat3) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: f64) -> Mat3 {
        Mat3(self.0.map(|v| v * k))
    }

    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Smallest eigenvalue of the symmetric part, by the closed-form
    /// trigonometric solution of the characteristic cubic.
    pub fn min_symmetric_eigenvalue(&self) -> f64 {
        let s = (*self + self.transpose()).scale(0.5);
        let a = |r, c| s.get(r, c);
        let p1 = a(0, 1).powi(2) + a(0, 2).powi(2) + a(1, 2).powi(2);
        if p1 == 0.0 {
            return a(0, 0).min(a(1, 1)).min(a(2, 2));
        }
        let q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
        let p2 = (a(0, 0) - q).powi(2) + (a(1, 1) - q).powi(2) + (a(2, 2) - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = (s - Mat3::IDENTITY.scale(q)).scale(1.0 / p);
        let r = (b.det() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6])
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.0[3 * r + c]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.0[3 * r + c]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        let mut m = self.0;
        m.iter_mut().zip(o.0.iter()).for_each(|(a, b)| *a += b);
        Mat3(m)
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        let mut m = self.0;
        m.iter_mut().zip(o.0.iter()).for_each(|(a, b)| *a -= b);
        Mat3(m)
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        let mut m = [0.0; 9];
        for r in 0..3 {
            for c in 0..3 {
                m[3 * r + c] = (0..3).map(|k| self.0[3 * r + k] * o.0[3 * k + c]).sum();
            }
        }
        Mat3(m)
    }
}

/// Solves the square system `a · x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `rel_tol` times the
/// largest absolute entry of `a`.
pub fn solve<const N: usize>(a: &[[f64; N]; N], b: &[f64; N], rel_tol: f64) -> Option<[f64; N]> {
    let mut m = *a;
    let mut rhs = *b;
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let threshold = rel_tol * scale;

    for col in 0..N {
        let (pivot_row, pivot_abs) = (col..N)
            .map(|r| (r, m[r][col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= threshold {
            return None;
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = m[col][col];
        for r in col + 1..N {
            let factor = m[r][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..N {
                m[r][c] -= factor * m[col][c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }

    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|c| m[row][c] * x[c]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}

/// Numerical rank of a set of row vectors (full pivoting, relative threshold).
pub fn rank<const N: usize>(rows: &[[f64; N]], rel_tol: f64) -> usize {
    let mut m: Vec<[f64; N]> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let threshold = rel_tol * scale;
    let mut rank = 0;
    let mut used_cols = [false; N];
    while rank < m.len() {
        let mut best = (0, 0, 0.0);
        for (r, row) in m.iter().enumerate().skip(rank) {
            for (c, v) in row.iter().enumerate() {
                if !used_cols[c] && v.abs() > best.2 {
                    best = (r, c, v.abs());
                }
            }
        }
        if best.2 <= threshold {
            break;
        }
        let (pr, pc, _) = best;
        m.swap(rank, pr);
        used_cols[pc] = true;
        let pivot_row = m[rank];
        for row in m.iter_mut().skip(rank + 1) {
            let factor = row[pc] / pivot_row[pc];
            for c in 0..N {
                row[c] -= factor * pivot_row[c];
            }
        }
        rank += 1;
    }
    rank
}
