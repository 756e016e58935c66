//! Dense complex linear algebra and root finding used by the solvers.
//!
//! Three primitives: Hermitian eigendecomposition (for the beamformer power
//! search), a symmetric positive-definite solve (for the selection update),
//! and monotone bisection (for the power multiplier). Everything here is
//! small and dense: matrices stay at antenna count, n in the tens.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; `eigenvectors` holds the matching
/// eigenvectors as columns and is unitary to 1e-10.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

/// Bracket and stopping rule for [`bisect_monotone`].
#[derive(Debug, Clone, Copy)]
pub struct BisectionSpec {
    pub lower: f64,
    pub upper: f64,
    pub tolerance: f64,
    pub max_iters: usize,
}

/// Outcome of a bisection run. `converged` is false only when `max_iters`
/// ran out before either stopping tolerance was met.
#[derive(Debug, Clone, Copy)]
pub struct BisectionResult {
    pub root: f64,
    pub converged: bool,
    pub iters: usize,
}

fn frobenius(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as (A + Aᴴ)/2 before factoring, so callers may
/// pass matrices that are Hermitian only up to rounding. Negative
/// eigenvalues within 1e-10·‖A‖ of zero are clamped to 0 so that PSD
/// inputs stay PSD downstream; genuinely negative spectra are preserved.
pub fn hermitian_eig(a: &DMatrix<Complex64>) -> Result<HermitianEig> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "hermitian_eig",
            expected: format!("{n}x{n}"),
            got: format!("{}x{}", a.nrows(), a.ncols()),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite {
            context: "hermitian_eig",
        });
    }
    let sym = (a + a.adjoint()).scale(0.5);
    let scale = frobenius(&sym);

    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 100_000)
        .ok_or(Error::EigFailed { n })?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let clamp_floor = -1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut eigenvalues = DVector::zeros(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut lam = eig.eigenvalues[src];
        if lam < 0.0 && lam >= clamp_floor {
            lam = 0.0;
        }
        eigenvalues[dst] = lam;
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Solves Q x = rhs for symmetric positive definite Q via Cholesky.
///
/// `context` names the caller that assembled Q; it is carried into the
/// error when the factorization detects an indefinite matrix.
pub fn solve_spd(
    q: &DMatrix<f64>,
    rhs: &DVector<f64>,
    context: &'static str,
) -> Result<DVector<f64>> {
    let n = q.nrows();
    if q.ncols() != n || rhs.len() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_spd",
            expected: format!("{n}x{n} with rhs {n}"),
            got: format!("{}x{} with rhs {}", q.nrows(), q.ncols(), rhs.len()),
        });
    }
    if q.iter().chain(rhs.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { context: "solve_spd" });
    }
    let sym = (q + q.transpose()).scale(0.5);
    let chol = nalgebra::Cholesky::new(sym).ok_or(Error::NotPositiveDefinite { context })?;
    Ok(chol.solve(rhs))
}

/// Bisection for a root of a continuous nonincreasing function.
///
/// Requires f(lower) >= 0 >= f(upper). Stops when the bracket width or
/// |f(mid)| drops below `tolerance`, whichever happens first.
pub fn bisect_monotone<F: FnMut(f64) -> f64>(
    mut f: F,
    spec: &BisectionSpec,
) -> Result<BisectionResult> {
    let (mut lo, mut hi) = (spec.lower, spec.upper);
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidConfig {
            reason: format!("bisection interval [{lo}, {hi}] is not a finite ordered pair"),
        });
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::BracketViolation {
            lower: lo,
            upper: hi,
            f_lower: f_lo,
            f_upper: f_hi,
        });
    }

    let mut mid = 0.5 * (lo + hi);
    for iter in 0..spec.max_iters {
        mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval has collapsed to adjacent floats.
            return Ok(BisectionResult {
                root: mid,
                converged: true,
                iters: iter,
            });
        }
        let fm = f(mid);
        if fm.abs() <= spec.tolerance {
            return Ok(BisectionResult {
                root: mid,
                converged: true,
                iters: iter + 1,
            });
        }
        if fm >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= spec.tolerance {
            return Ok(BisectionResult {
                root: 0.5 * (lo + hi),
                converged: true,
                iters: iter + 1,
            });
        }
    }
    Ok(BisectionResult {
        root: mid,
        converged: false,
        iters: spec.max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let raw = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&raw + raw.adjoint()).scale(0.5)
    }

    #[test]
    fn identity_eigenvalues_are_ones() {
        let a = DMatrix::<Complex64>::identity(3, 3);
        let eig = hermitian_eig(&a).unwrap();
        for i in 0..3 {
            assert!((eig.eigenvalues[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_eigenvalues_sorted_ascending() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(5.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let eig = hermitian_eig(&a).unwrap();
        assert!((eig.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 5.0).abs() < 1e-12);
        // Eigenvectors are the identity columns up to permutation and phase.
        for c in 0..2 {
            let col = eig.eigenvectors.column(c);
            let mags: Vec<f64> = col.iter().map(|z| z.norm()).collect();
            assert!(mags.iter().any(|&m| (m - 1.0).abs() < 1e-12));
            assert!(mags.iter().any(|&m| m < 1e-12));
        }
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 4, 6, 16, 64] {
            let a = random_hermitian(n, &mut rng);
            let norm = frobenius(&a);
            let eig = hermitian_eig(&a).unwrap();
            let lam = DMatrix::from_diagonal(&eig.eigenvalues.map(|x| Complex64::new(x, 0.0)));
            let recon = &eig.eigenvectors * lam * eig.eigenvectors.adjoint();
            let err = (&recon - &a).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err <= 1e-10 * norm, "n={n}: reconstruction error {err}");
            let gram = eig.eigenvectors.adjoint() * &eig.eigenvectors;
            let id_err = (&gram - DMatrix::<Complex64>::identity(n, n))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(id_err <= 1e-10, "n={n}: unitarity error {id_err}");
        }
    }

    #[test]
    fn psd_eigenvalues_clamped_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let b = DMatrix::from_fn(5, 2, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            // Rank-2 PSD matrix: three exact zero eigenvalues up to rounding.
            let a = &b * b.adjoint();
            let eig = hermitian_eig(&a).unwrap();
            assert!(eig.eigenvalues.iter().all(|&l| l >= 0.0));
        }
    }

    #[test]
    fn eig_rejects_non_square_and_non_finite() {
        let rect = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&rect),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut bad = DMatrix::<Complex64>::identity(2, 2);
        bad[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(hermitian_eig(&bad), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn solve_spd_identity_and_diagonal() {
        let q = DMatrix::<f64>::identity(3, 3);
        let rhs = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let x = solve_spd(&q, &rhs, "test").unwrap();
        assert!((&x - &rhs).amax() < 1e-14);

        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        let rhs = DVector::from_vec(vec![2.0, 8.0]);
        let x = solve_spd(&q, &rhs, "test").unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn solve_spd_random_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = DMatrix::from_fn(8, 8, |_, _| rng.gen_range(-1.0..1.0));
            let q = a.transpose() * &a + DMatrix::identity(8, 8);
            let rhs = DVector::from_fn(8, |_, _| rng.gen_range(-1.0..1.0));
            let x = solve_spd(&q, &rhs, "test").unwrap();
            let resid = (&q * &x - &rhs).norm() / rhs.norm();
            assert!(resid <= 1e-9, "residual {resid}");
        }
    }

    #[test]
    fn solve_spd_rejects_indefinite() {
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        let rhs = DVector::from_vec(vec![1.0, 1.0]);
        match solve_spd(&q, &rhs, "selection-update") {
            Err(Error::NotPositiveDefinite { context }) => assert_eq!(context, "selection-update"),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn bisect_analytic_roots() {
        let spec = BisectionSpec {
            lower: 0.0,
            upper: 10.0,
            tolerance: 1e-12,
            max_iters: 200,
        };
        let r = bisect_monotone(|l| 4.0 / ((1.0 + l) * (1.0 + l)) - 1.0, &spec).unwrap();
        assert!(r.converged);
        assert!((r.root - 1.0).abs() < 1e-9);

        let spec = BisectionSpec {
            lower: 0.0,
            upper: 2.0,
            tolerance: 1e-12,
            max_iters: 200,
        };
        let r = bisect_monotone(|l| 1.0 - l, &spec).unwrap();
        assert!((r.root - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_power_equation_root_substitutes_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..20 {
            let m = 6;
            let b = DMatrix::from_fn(m, m, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let a_mat = &b * b.adjoint();
            let a_vec = DVector::from_fn(m, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let p = 0.5;
            let eig = hermitian_eig(&a_mat).unwrap();
            let proj = eig.eigenvectors.adjoint() * &a_vec;
            let power = |l: f64| -> f64 {
                (0..m)
                    .map(|i| proj[i].norm_sqr() / (eig.eigenvalues[i] + l).powi(2))
                    .sum()
            };
            let upper = (a_vec.iter().map(|z| z.norm_sqr()).sum::<f64>() / p).sqrt();
            let spec = BisectionSpec {
                lower: 0.0,
                upper,
                tolerance: 1e-14,
                max_iters: 300,
            };
            if power(0.0) <= p {
                continue; // Constraint inactive; no root in the open interval.
            }
            let r = bisect_monotone(|l| power(l) - p, &spec).unwrap();
            let w = {
                let shifted = &a_mat + DMatrix::<Complex64>::identity(m, m).scale(r.root);
                shifted.lu().solve(&a_vec).unwrap()
            };
            let achieved: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            assert!((achieved - p).abs() <= 1e-8, "power {achieved} vs {p}");
        }
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        let spec = BisectionSpec {
            lower: 0.0,
            upper: 1.0,
            tolerance: 1e-10,
            max_iters: 50,
        };
        assert!(matches!(
            bisect_monotone(|l| l + 1.0, &spec),
            Err(Error::BracketViolation { .. })
        ));
    }

    #[test]
    fn bisect_flags_iteration_exhaustion() {
        let spec = BisectionSpec {
            lower: 0.0,
            upper: 1e6,
            tolerance: 1e-30,
            max_iters: 3,
        };
        let r = bisect_monotone(|l| 1.0 - l, &spec).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iters, 3);
    }
}
