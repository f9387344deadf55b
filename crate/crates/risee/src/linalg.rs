//! Thin complex linear-algebra helpers shared by the solvers.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative threshold on singular values for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Singular values of `a`, descending.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let svd = a.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Moore-Penrose pseudo-inverse via SVD, zeroing singular values below
/// `RANK_TOL` times the largest.
pub fn pseudo_inverse(a: &CMatrix) -> CMatrix {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = RANK_TOL * smax.max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps).expect("SVD computed with U and V")
}

/// Numerical rank: number of singular values above `RANK_TOL * sigma_max`.
pub fn numerical_rank(a: &CMatrix) -> usize {
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_svd_pinv_roundtrip() {
        let a = CMatrix::from_row_slice(
            2,
            3,
            &[
                C64::new(1.0, 0.5),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
                C64::new(-0.3, 0.7),
                C64::new(1.5, 0.2),
                C64::new(0.0, 0.4),
            ],
        );
        let pinv = pseudo_inverse(&a);
        // full row rank: A * A^+ = I_2
        let prod = &a * &pinv;
        let eye = CMatrix::identity(2, 2);
        assert!((prod - eye).norm() < 1e-10);
        assert_eq!(numerical_rank(&a), 2);
    }
}
