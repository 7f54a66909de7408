// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra: Iwasawa and modified Cartan factorizations,
//! eigendecompositions and a few scalar helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Complex diagonal matrix.
pub fn diag_c(d: &[C64]) -> CMat {
    CMat::from_diagonal(&DVector::from_column_slice(d))
}

/// Real diagonal matrix embedded in the complex matrices.
pub fn diag_r(d: &[f64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            C64::new(d[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Complexifies a real matrix.
pub fn to_complex(m: &RMat) -> CMat {
    m.map(|v| C64::new(v, 0.0))
}

/// Diagonal of phases `e^{i a_j}`.
pub fn phase_diag(angles: &[f64]) -> CMat {
    let d: Vec<C64> = angles.iter().map(|&a| C64::from_polar(1.0, a)).collect();
    diag_c(&d)
}

/// `Im tr(XY)`, the invariant pairing on gl(n, C) viewed as a real Lie algebra.
pub fn pairing_im_trace(x: &CMat, y: &CMat) -> f64 {
    assert_eq!(x.ncols(), y.nrows());
    let mut s = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            s += (x[(i, j)] * y[(j, i)]).im;
        }
    }
    s
}

/// Frobenius norm of `U^dagger U - 1`.
pub fn unitary_deviation(u: &CMat) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMat::identity(n, n)).norm()
}

fn check_square(m: &CMat, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{what} has non-finite entries"
        )));
    }
    Ok(m.nrows())
}

/// Unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(CMat);

impl Unitary {
    /// Validates unitarity within `tol.unitarity * n`.
    pub fn new(m: CMat, tol: &ToleranceConfig) -> Result<Self> {
        let n = check_square(&m, "unitary")?;
        let dev = unitary_deviation(&m);
        if dev > tol.unitarity_for(n) {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix known to be unitary by construction.
    pub fn from_trusted(m: CMat) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(CMat::identity(n, n))
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn inverse(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }
}

/// Upper triangular matrix with positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BElement(CMat);

impl BElement {
    /// Validates the triangular shape and the sign of the diagonal.
    pub fn new(m: CMat) -> Result<Self> {
        let n = check_square(&m, "B element")?;
        let scale = m.norm().max(1.0);
        for i in 0..n {
            let d = m[(i, i)];
            if d.re <= 0.0 || d.im.abs() > 1e-12 * scale {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry {i} of a B element is not positive"
                )));
            }
            for j in 0..i {
                if m[(i, j)].norm() > 1e-12 * scale {
                    return Err(Error::InvalidInput(
                        "B element is not upper triangular".into(),
                    ));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_trusted(m: CMat) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    /// Inverse computed by triangular back substitution.
    pub fn inverse(&self) -> BElement {
        BElement(upper_triangular_inverse(&self.0))
    }
}

/// Inverse of an invertible upper triangular matrix.
pub fn upper_triangular_inverse(r: &CMat) -> CMat {
    let n = r.nrows();
    let mut inv = CMat::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = C64::new(1.0, 0.0) / r[(j, j)];
        for i in (0..j).rev() {
            let mut s = C64::new(0.0, 0.0);
            for k in i + 1..=j {
                s += r[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / r[(i, i)];
        }
    }
    inv
}

fn check_pivots(r: &CMat, tol: &ToleranceConfig) -> Result<()> {
    let n = r.nrows();
    let dmax = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    let dmin = (0..n)
        .map(|i| r[(i, i)].norm())
        .fold(f64::INFINITY, f64::min);
    if dmax == 0.0 || dmin <= tol.singular * dmax {
        return Err(Error::SingularInput(format!(
            "pivot ratio {:e}",
            if dmax == 0.0 { 0.0 } else { dmin / dmax }
        )));
    }
    Ok(())
}

/// QR factorization `K = Q R` with `R` having a positive diagonal.
fn qr_positive(k: &CMat, tol: &ToleranceConfig) -> Result<(CMat, CMat)> {
    let qr = k.clone().qr();
    let (mut q, mut r) = qr.unpack();
    check_pivots(&r, tol)?;
    for i in 0..r.nrows() {
        let d = r[(i, i)];
        let ph = d / d.norm();
        for c in 0..q.nrows() {
            q[(c, i)] *= ph;
        }
        for c in 0..r.ncols() {
            r[(i, c)] *= ph.conj();
        }
        r[(i, i)] = C64::new(r[(i, i)].re, 0.0);
    }
    Ok((q, r))
}

/// Left Iwasawa factorization `K = b_L g_R^{-1}`; returns `(b_L, g_R)`.
pub fn iwasawa_left(k: &CMat, tol: &ToleranceConfig) -> Result<(BElement, Unitary)> {
    let n = check_square(k, "K")?;
    // RQ from QR of the flipped transpose: K^T P = Q1 R1 gives
    // K = (P R1^T P)(P Q1^T) with P the exchange matrix.
    let flipped = CMat::from_fn(n, n, |i, j| k[(n - 1 - j, i)]);
    let qr = flipped.qr();
    let (q1, r1) = qr.unpack();
    let mut r = CMat::from_fn(n, n, |i, j| r1[(n - 1 - j, n - 1 - i)]);
    let mut q = CMat::from_fn(n, n, |i, j| q1[(j, n - 1 - i)]);
    check_pivots(&r, tol)?;
    for i in 0..n {
        let d = r[(i, i)];
        let ph = d / d.norm();
        for c in 0..n {
            r[(c, i)] *= ph.conj();
            q[(i, c)] *= ph;
        }
        r[(i, i)] = C64::new(r[(i, i)].re, 0.0);
    }
    Ok((BElement(r), Unitary(q.adjoint())))
}

/// Right Iwasawa factorization `K = g_L b_R^{-1}`; returns `(g_L, b_R)`.
pub fn iwasawa_right(k: &CMat, tol: &ToleranceConfig) -> Result<(Unitary, BElement)> {
    check_square(k, "K")?;
    let (q, r) = qr_positive(k, tol)?;
    Ok((Unitary(q), BElement(upper_triangular_inverse(&r))))
}

/// Modified Cartan data `K = k_L ▷ (e^{-p̂} k_R^{-1})` with `p̂` non-increasing.
#[derive(Debug, Clone)]
pub struct CartanDecomposition {
    pub k_l: Unitary,
    pub p_hat: Vec<f64>,
    pub k_r: Unitary,
    /// Left and right singular vectors: `K = eta_l e^{-p̂} eta_r^{-1}`.
    pub eta_l: Unitary,
    pub eta_r: Unitary,
}

/// Singular values, descending, by one-sided Jacobi rotations on the columns.
/// For `G = F D` with `D` diagonal they carry relative accuracy governed by
/// the condition of `F` alone.
pub fn jacobi_singular_values(g: &CMat) -> Vec<f64> {
    let n = g.ncols();
    let mut a = g.clone();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g_abs = gamma.norm();
                if g_abs <= f64::EPSILON * (alpha * beta).sqrt() || g_abs == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g_abs).conj();
                let zeta = (beta - alpha) / (2.0 * g_abs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for i in 0..a.nrows() {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)] * phase;
                    a[(i, p)] = ap * c - aq * sn;
                    a[(i, q)] = ap * sn + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Singular value decomposition ordered so that `p̂ = -ln σ` is non-increasing.
pub fn svd_ordered(k: &CMat, tol: &ToleranceConfig) -> Result<(CMat, Vec<f64>, CMat)> {
    let n = check_square(k, "K")?;
    let svd = k.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v requested").adjoint();
    let s = svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 || s.iter().any(|&x| x <= tol.singular * smax) {
        return Err(Error::SingularInput("vanishing singular value".into()));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| s[a].partial_cmp(&s[b]).unwrap());
    let mut eu = CMat::zeros(n, n);
    let mut ev = CMat::zeros(n, n);
    let mut sig = Vec::with_capacity(n);
    for (c, &i) in idx.iter().enumerate() {
        eu.set_column(c, &u.column(i));
        ev.set_column(c, &v.column(i));
        sig.push(s[i]);
    }
    for c in 0..n {
        let col = eu.column(c);
        let cmax = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let last = (0..n)
            .rev()
            .find(|&i| col[i].norm() > 1e-10 * cmax)
            .unwrap_or(n - 1);
        let ph = col[last] / col[last].norm();
        for r in 0..n {
            eu[(r, c)] *= ph.conj();
            ev[(r, c)] *= ph.conj();
        }
    }
    Ok((eu, sig, ev))
}

/// Modified Cartan decomposition.
///
/// Fails with `DegenerateSpectrum` when two entries of `p̂` are closer than
/// `tol.degeneracy`.
pub fn cartan_modified(k: &CMat, tol: &ToleranceConfig) -> Result<CartanDecomposition> {
    let n = k.nrows();
    let (eta_l, sig, eta_r) = svd_ordered(k, tol)?;
    let p_hat: Vec<f64> = sig.iter().map(|s| -s.ln()).collect();
    for w in p_hat.windows(2) {
        if w[0] - w[1] < tol.degeneracy {
            return Err(Error::DegenerateSpectrum(format!(
                "singular values of K coincide (gap {:e})",
                w[0] - w[1]
            )));
        }
    }
    let scaled = &eta_l * diag_r(&sig);
    let (_, xi_r) = iwasawa_left(&scaled, tol)?;
    let k_r = xi_r.matrix() * &eta_r;
    debug_assert_eq!(k_r.nrows(), n);
    Ok(CartanDecomposition {
        k_l: Unitary(eta_l.clone()),
        p_hat,
        k_r: Unitary(k_r),
        eta_l: Unitary(eta_l),
        eta_r: Unitary(eta_r),
    })
}

/// Eigendecomposition `g = u diag(e^{i α}) u^dagger` of a unitary matrix with
/// angles in `[0, 2π)` sorted in descending order.
pub fn unitary_eig(g: &CMat, tol: &ToleranceConfig) -> Result<(Vec<f64>, Unitary)> {
    let n = check_square(g, "g")?;
    let dev = unitary_deviation(g);
    if dev > tol.unitarity_for(n) {
        return Err(Error::NotUnitary(dev));
    }
    let (q, t) = g.clone().schur().unpack();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut ang: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let a = t[(i, i)].arg().rem_euclid(two_pi);
            (if a >= two_pi { 0.0 } else { a }, i)
        })
        .collect();
    ang.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut u = CMat::zeros(n, n);
    for (c, &(_, i)) in ang.iter().enumerate() {
        u.set_column(c, &q.column(i));
    }
    Ok((ang.into_iter().map(|a| a.0).collect(), Unitary(u)))
}

/// Eigenvalues of a matrix known to be diagonalizable with real spectrum,
/// sorted in descending order. Imaginary parts are discarded.
pub fn real_spectrum(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = complex_spectrum(m).iter().map(|z| z.re).collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Diagonal similarity `D^{-1} M D` with powers of two equalizing row and
/// column norms (Parlett-Reinsch balancing).
pub fn balance(m: &CMat) -> CMat {
    let n = m.nrows();
    let mut a = m.clone();
    loop {
        let mut done = true;
        for i in 0..n {
            let c: f64 = (0..n).filter(|&j| j != i).map(|j| a[(j, i)].norm()).sum();
            let r: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / 2.0 {
                cc *= 2.0;
                rr /= 2.0;
                f *= 2.0;
            }
            while cc >= rr * 2.0 {
                cc /= 2.0;
                rr *= 2.0;
                f /= 2.0;
            }
            if (cc + rr) < 0.95 * (c + r) {
                done = false;
                for j in 0..n {
                    a[(j, i)] *= f;
                    a[(i, j)] /= f;
                }
            }
        }
        if done {
            return a;
        }
    }
}

/// Complex eigenvalues of a general matrix, computed after balancing.
pub fn complex_spectrum(m: &CMat) -> Vec<C64> {
    balance(m)
        .schur()
        .eigenvalues()
        .expect("complex schur")
        .iter()
        .cloned()
        .collect()
}

/// `f(H)` for Hermitian `H` through its eigendecomposition.
pub fn herm_apply<F: Fn(f64) -> C64>(h: &CMat, f: F) -> CMat {
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let d: Vec<C64> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    &eig.eigenvectors * diag_c(&d) * eig.eigenvectors.adjoint()
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn herm_spectrum(h: &CMat) -> Vec<f64> {
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Matrix exponential of a general square matrix (scaling and squaring).
pub fn expm(m: &CMat) -> CMat {
    m.clone().exp()
}

/// Integer power `m^k`; negative `k` uses the inverse.
pub fn int_pow(m: &CMat, k: i32) -> Result<CMat> {
    let n = m.nrows();
    let base = if k < 0 {
        m.clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularInput("matrix power of a singular matrix".into()))?
    } else {
        m.clone()
    };
    let mut e = k.unsigned_abs();
    let mut acc = CMat::identity(n, n);
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    Ok(acc)
}

/// `sinh(u) / sinh(v)` without overflow for large arguments.
pub fn sinh_ratio(u: f64, v: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let s = u.signum() * v.signum();
    s * (u.abs() - v.abs()).exp() * ((-2.0 * u.abs()).exp_m1() / (-2.0 * v.abs()).exp_m1())
}

/// Square root of a quantity that is non-negative up to rounding.
pub fn sqrt_radicand(r: f64, slack: f64) -> Result<f64> {
    if r >= 0.0 {
        Ok(r.sqrt())
    } else if r >= -slack {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand(r))
    }
}

/// `sqrt(sinh(y) / y)` with value 1 at the origin.
pub fn j_fn(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        (1.0 + y * y / 6.0 + y.powi(4) / 120.0).sqrt()
    } else {
        (y.sinh() / y).sqrt()
    }
}

/// Largest absolute entry difference.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_mat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        CMat::from_fn(n, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn is_b(b: &CMat) -> bool {
        BElement::new(b.clone()).is_ok()
    }

    #[test]
    fn jacobi_matches_svd_on_generic_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 1..6 {
            let g = rand_mat(&mut rng, n);
            let mut svd: Vec<f64> = g.clone().singular_values().iter().cloned().collect();
            svd.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let jac = jacobi_singular_values(&g);
            for (a, b) in svd.iter().zip(&jac) {
                assert!((a - b).abs() < 1e-13 * svd[0]);
            }
        }
    }

    #[test]
    fn jacobi_is_relatively_accurate_on_column_scaled_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let u = rand_mat(&mut rng, 5).qr().q();
        let d = [1e-9, 3.0, 1e-14, 2e-3, 1e6];
        let g = &u * diag_r(&d);
        let mut want = d.to_vec();
        want.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (a, b) in jacobi_singular_values(&g).iter().zip(&want) {
            assert!((a - b).abs() < 1e-13 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn pairing_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = rand_mat(&mut rng, 3);
        let y = rand_mat(&mut rng, 3);
        assert!((pairing_im_trace(&x, &y) - (&x * &y).trace().im).abs() < 1e-14);
        assert!((pairing_im_trace(&x, &y) - pairing_im_trace(&y, &x)).abs() < 1e-14);
    }

    #[test]
    fn iwasawa_reconstructs() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            let k = rand_mat(&mut rng, n);
            let (b, g) = iwasawa_left(&k, &tol).unwrap();
            assert!(is_b(b.matrix()));
            assert!(unitary_deviation(g.matrix()) < 1e-13);
            let rec = b.matrix() * g.matrix().adjoint();
            assert!((rec - &k).norm() < 1e-13 * k.norm());
            let (gl, br) = iwasawa_right(&k, &tol).unwrap();
            assert!(is_b(br.matrix()));
            let rec = gl.matrix() * br.inverse().matrix();
            assert!((rec - &k).norm() < 1e-13 * k.norm());
        }
    }

    #[test]
    fn iwasawa_of_identity_and_diagonal() {
        let tol = ToleranceConfig::default();
        let (b, g) = iwasawa_left(&CMat::identity(3, 3), &tol).unwrap();
        assert!((b.matrix() - CMat::identity(3, 3)).norm() < 1e-15);
        assert!((g.matrix() - CMat::identity(3, 3)).norm() < 1e-15);
        let k = diag_c(&[C64::new(2.0, 0.0), C64::new(0.0, 3.0)]);
        let (b, g) = iwasawa_left(&k, &tol).unwrap();
        assert!((b.matrix() - diag_r(&[2.0, 3.0])).norm() < 1e-14);
        assert!((g.matrix() - diag_c(&[C64::new(1.0, 0.0), C64::new(0.0, -1.0)])).norm() < 1e-14);
    }

    #[test]
    fn iwasawa_rejects_singular() {
        let tol = ToleranceConfig::default();
        let k = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(4.0, 0.0),
            ],
        );
        assert!(matches!(
            iwasawa_left(&k, &tol),
            Err(Error::SingularInput(_))
        ));
        assert!(matches!(
            iwasawa_right(&k, &tol),
            Err(Error::SingularInput(_))
        ));
    }

    #[test]
    fn left_factor_equals_right_factor_of_inverse() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let k = rand_mat(&mut rng, 4);
        let (bl, _) = iwasawa_left(&k, &tol).unwrap();
        let (_, br) = iwasawa_right(&k.clone().try_inverse().unwrap(), &tol).unwrap();
        assert!((bl.matrix() - br.matrix()).norm() < 1e-12 * bl.matrix().norm());
    }

    #[test]
    fn cartan_reconstructs_through_quasi_adjoint_formula() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=5 {
            let k = rand_mat(&mut rng, n);
            let c = cartan_modified(&k, &tol).unwrap();
            for w in c.p_hat.windows(2) {
                assert!(w[0] >= w[1]);
            }
            let e = diag_r(&c.p_hat.iter().map(|p| (-p).exp()).collect::<Vec<_>>());
            let inner = &e * c.k_r.matrix().adjoint();
            let (bl, _) = iwasawa_left(&inner, &tol).unwrap();
            let (_, gam) = iwasawa_left(&(c.k_l.matrix() * bl.matrix()), &tol).unwrap();
            let rec = c.k_l.matrix() * inner * gam.matrix();
            assert!((rec - &k).norm() < 1e-12 * k.norm());
            let svd_rec = c.eta_l.matrix() * &e * c.eta_r.matrix().adjoint();
            assert!((svd_rec - &k).norm() < 1e-12 * k.norm());
        }
    }

    #[test]
    fn unitary_eig_sorted_and_reconstructs() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = rand_mat(&mut rng, 4);
        let g = herm_apply(&(&h + h.adjoint()), |l| C64::from_polar(1.0, l));
        let (ang, u) = unitary_eig(&g, &tol).unwrap();
        for w in ang.windows(2) {
            assert!(w[0] >= w[1]);
        }
        let rec = u.matrix() * phase_diag(&ang) * u.matrix().adjoint();
        assert!((rec - &g).norm() < 1e-12);
        let g = diag_c(&[I, -I]);
        let (ang, u) = unitary_eig(&g, &tol).unwrap();
        assert!((ang[0] - 1.5 * std::f64::consts::PI).abs() < 1e-14);
        assert!((ang[1] - 0.5 * std::f64::consts::PI).abs() < 1e-14);
        assert!(u
            .matrix()
            .iter()
            .all(|z| z.norm() < 1e-14 || (z.norm() - 1.0).abs() < 1e-14));
        assert!(matches!(
            unitary_eig(&CMat::identity(2, 2).scale(2.0), &tol),
            Err(Error::NotUnitary(_))
        ));
    }

    #[test]
    fn sinh_ratio_is_stable() {
        assert!((sinh_ratio(0.3, 0.7) - 0.3f64.sinh() / 0.7f64.sinh()).abs() < 1e-15);
        assert!((sinh_ratio(-0.3, 0.7) + 0.3f64.sinh() / 0.7f64.sinh()).abs() < 1e-15);
        assert!((sinh_ratio(800.0, 801.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(sinh_ratio(0.0, 1.0), 0.0);
    }

    #[test]
    fn int_pow_matches_repeated_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = rand_mat(&mut rng, 3) + CMat::identity(3, 3).scale(3.0);
        let p3 = int_pow(&m, 3).unwrap();
        assert!((p3 - &m * &m * &m).norm() < 1e-12);
        let pm2 = int_pow(&m, -2).unwrap();
        assert!((pm2 * &m * &m - CMat::identity(3, 3)).norm() < 1e-12);
    }
}
