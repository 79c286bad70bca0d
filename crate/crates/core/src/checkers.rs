//! One checker per trace inequality. Each evaluates both sides on a concrete
//! instance and returns an [`InequalityReport`].
//!
//! Verdicts use a mixed absolute/relative band
//! `tol = 1e-9 * max(|lhs|, |rhs|, 1)`. A checker whose hypothesis does not
//! hold on the realized spectrum reports [`Verdict::Degenerate`] rather than
//! a failure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::{fractional_power, matrix_function, power_of, spectrum_values, ScalarFunction};
use crate::error::{Error, Result};
use crate::matrix::{product, ComplexMatrix, HermitianMatrix, PsdMatrix};

pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Weights must sum to one within this band.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Outcome of evaluating `lhs <= rhs` on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: ComplexValue,
    pub rhs: ComplexValue,
    /// `Re(rhs) - Re(lhs)`.
    pub slack: f64,
    /// `max(|Im lhs|, |Im rhs|)`.
    pub imag_residual: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: Complex64, rhs: Complex64) -> Self {
        Self::with_rel_tol(name, lhs, rhs, DEFAULT_REL_TOL)
    }

    pub fn with_rel_tol(name: impl Into<String>, lhs: Complex64, rhs: Complex64, rel_tol: f64) -> Self {
        let mut r = Self {
            name: name.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            slack: rhs.re - lhs.re,
            imag_residual: lhs.im.abs().max(rhs.im.abs()),
            tol: 0.0,
            verdict: Verdict::Pass,
        };
        r.rejudge(rel_tol);
        r
    }

    /// Recomputes `tol` and the verdict for a new relative factor. A
    /// degenerate verdict stays degenerate.
    pub fn rejudge(&mut self, rel_tol: f64) {
        self.tol = rel_tol * self.scale();
        if self.verdict != Verdict::Degenerate {
            self.verdict = if self.slack >= -self.tol && self.imag_residual <= self.tol {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
        }
    }

    pub fn degenerate(mut self) -> Self {
        self.verdict = Verdict::Degenerate;
        self
    }

    /// `max(|lhs|, |rhs|, 1)`.
    pub fn scale(&self) -> f64 {
        let l = Complex64::from(self.lhs).norm();
        let r = Complex64::from(self.rhs).norm();
        l.max(r).max(1.0)
    }

    pub fn relative_slack(&self) -> f64 {
        self.slack / self.scale()
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Positive weights `p_1..p_m` summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("need at least one weight".into()));
        }
        if let Some(p) = weights.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {p} is not positive")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m >= 1);
        Self(vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// `(p_{k+1}, .., p_m, p_1, .., p_k)`.
    pub fn rotated(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        let len = v.len();
        v.rotate_left(k % len);
        Self(v)
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

fn tr_product(factors: &[&ComplexMatrix]) -> Result<Complex64> {
    Ok(product(factors.iter().copied())?.trace())
}

/// `Tr[T^{p_1} A T^{p_2} A ... T^{p_m} A]`.
pub fn trace_chain(t: &PsdMatrix, a: &HermitianMatrix, w: &WeightVector) -> Result<Complex64> {
    check_same_dim(t.dim(), a.dim())?;
    let mut acc: Option<ComplexMatrix> = None;
    for &p in w.as_slice() {
        let tp = fractional_power(t, p)?;
        let step = tp.matrix().matmul(a.matrix())?;
        acc = Some(match acc {
            None => step,
            Some(m) => m.matmul(&step)?,
        });
    }
    Ok(acc.expect("non-empty weights").trace())
}

/// The chain expanded in the eigenbasis of `T`:
/// `sum over (i_1..i_m) of lambda_{i_1}^{p_1} .. lambda_{i_m}^{p_m}
///  <psi_{i_1}|A|psi_{i_2}> .. <psi_{i_m}|A|psi_{i_1}>`.
///
/// Costs `n^m` terms; intended for the 2x2 case.
pub fn trace_chain_spectral_sum(t: &PsdMatrix, a: &HermitianMatrix, w: &WeightVector) -> Result<Complex64> {
    check_same_dim(t.dim(), a.dim())?;
    let n = t.dim();
    let m = w.len();
    let d = t.decomposition();
    let lambdas: Vec<f64> = d.eigenvalues().iter().map(|l| l.max(0.0)).collect();
    let elements = basis_elements(a.matrix(), d.eigenvectors())?;
    let total = n
        .checked_pow(m as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::InvalidParameter(format!("{n}^{m} index tuples is too many")))?;

    let mut sum = Complex64::new(0.0, 0.0);
    let mut idx = vec![0usize; m];
    for code in 0..total {
        let mut c = code;
        for slot in idx.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let mut weight = 1.0;
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..m {
            weight *= power_of(lambdas[idx[j]], w.as_slice()[j]);
            prod *= elements[idx[j]][idx[(j + 1) % m]];
        }
        sum += prod * weight;
    }
    Ok(sum)
}

/// `<psi_i|A|psi_j>` for the columns of `basis`.
pub fn basis_elements(a: &ComplexMatrix, basis: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    let au = a.matmul(basis)?;
    let n = a.dim();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|r| basis[(r, i)].conj() * au[(r, j)]).sum())
                .collect()
        })
        .collect())
}

struct FgTerms {
    fa: HermitianMatrix,
    ga: HermitianMatrix,
}

fn fg_terms(f: &ScalarFunction, g: &ScalarFunction, a: &HermitianMatrix) -> Result<(FgTerms, Vec<f64>, Vec<f64>)> {
    let d = a.eig()?;
    let fa = matrix_function(&d, f)?;
    let ga = matrix_function(&d, g)?;
    let fv = spectrum_values(&d, f)?;
    let gv = spectrum_values(&d, g)?;
    Ok((FgTerms { fa, ga }, fv, gv))
}

/// `Tr[f(A) L g(A) L]`.
fn mixed_term(t: &FgTerms, l: &ComplexMatrix) -> Result<Complex64> {
    tr_product(&[t.fa.matrix(), l, t.ga.matrix(), l])
}

/// `1/2 Tr[(f(A)L)^2 + (g(A)L)^2]`.
fn squared_products(t: &FgTerms, l: &ComplexMatrix) -> Result<Complex64> {
    let f2 = tr_product(&[t.fa.matrix(), l, t.fa.matrix(), l])?;
    let g2 = tr_product(&[t.ga.matrix(), l, t.ga.matrix(), l])?;
    Ok((f2 + g2) * 0.5)
}

/// `1/2 Tr[f(A)^2 L^2 + g(A)^2 L^2]`.
fn squared_functions(t: &FgTerms, l: &ComplexMatrix) -> Result<Complex64> {
    let f2 = tr_product(&[t.fa.matrix(), t.fa.matrix(), l, l])?;
    let g2 = tr_product(&[t.ga.matrix(), t.ga.matrix(), l, l])?;
    Ok((f2 + g2) * 0.5)
}

/// `Tr[f(A)Lg(A)L] <= 1/2 Tr[(f(A)L)^2 + (g(A)L)^2]` for PSD `L`.
pub fn check_p1(f: &ScalarFunction, g: &ScalarFunction, l: &PsdMatrix, a: &HermitianMatrix) -> Result<InequalityReport> {
    check_same_dim(l.dim(), a.dim())?;
    let (terms, _, _) = fg_terms(f, g, a)?;
    let lm = l.matrix();
    Ok(InequalityReport::new(
        "p1",
        mixed_term(&terms, lm)?,
        squared_products(&terms, lm)?,
    ))
}

/// `Tr[f(A)Lg(A)L] <= 1/2 Tr[f(A)^2 L^2 + g(A)^2 L^2]` for Hermitian `L`.
pub fn check_p2(
    f: &ScalarFunction,
    g: &ScalarFunction,
    l: &HermitianMatrix,
    a: &HermitianMatrix,
) -> Result<InequalityReport> {
    check_same_dim(l.dim(), a.dim())?;
    let (terms, _, _) = fg_terms(f, g, a)?;
    let lm = l.matrix();
    Ok(InequalityReport::new(
        "p2",
        mixed_term(&terms, lm)?,
        squared_functions(&terms, lm)?,
    ))
}

/// The right-hand side of [`check_p1`] never exceeds that of [`check_p2`]
/// (`Tr[XYXY] <= Tr[X^2 Y^2]` for Hermitian `X`, `Y`).
pub fn check_rhs_order(
    f: &ScalarFunction,
    g: &ScalarFunction,
    l: &HermitianMatrix,
    a: &HermitianMatrix,
) -> Result<InequalityReport> {
    check_same_dim(l.dim(), a.dim())?;
    let (terms, _, _) = fg_terms(f, g, a)?;
    let lm = l.matrix();
    Ok(InequalityReport::new(
        "rhs_order",
        squared_products(&terms, lm)?,
        squared_functions(&terms, lm)?,
    ))
}

/// `f >= g` or `f <= g` at every eigenvalue.
fn uniformly_ordered(fv: &[f64], gv: &[f64]) -> bool {
    fv.iter().zip(gv).all(|(f, g)| f <= g) || fv.iter().zip(gv).all(|(f, g)| f >= g)
}

/// With `f`, `g` uniformly ordered on the spectrum of `A`, `L` only Hermitian:
/// `Tr[f(A)Lg(A)L] <= 1/2 Tr[(f(A)L)^2 + (g(A)L)^2]`.
///
/// Reports [`Verdict::Degenerate`] if the ordering fails on the eigenvalues.
pub fn check_ordered_fg(
    f: &ScalarFunction,
    g: &ScalarFunction,
    l: &HermitianMatrix,
    a: &HermitianMatrix,
) -> Result<InequalityReport> {
    check_same_dim(l.dim(), a.dim())?;
    let (terms, fv, gv) = fg_terms(f, g, a)?;
    let lm = l.matrix();
    let report = InequalityReport::new("ordered_fg", mixed_term(&terms, lm)?, squared_products(&terms, lm)?);
    Ok(if uniformly_ordered(&fv, &gv) {
        report
    } else {
        report.degenerate()
    })
}

/// `Tr[M^p]` for PSD `M`: repeated multiplication when `p` is a whole
/// number, spectral power otherwise.
fn trace_power(m: &ComplexMatrix, p: f64) -> Result<Complex64> {
    if p.fract() == 0.0 && (0.0..=64.0).contains(&p) {
        return Ok(m.powi(p as u32).trace());
    }
    let psd = PsdMatrix::new(HermitianMatrix::from_hermitian_part(m))?;
    Ok(fractional_power(&psd, p)?.matrix().trace())
}

/// Araki: `Tr[(Y^{r/2} X^r Y^{r/2})^p] <= Tr[(Y^{1/2} X Y^{1/2})^{rp}]`
/// for PSD `X`, `Y`, `0 <= r <= 1`, `p > 0`.
pub fn check_araki(x: &PsdMatrix, y: &PsdMatrix, r: f64, p: f64) -> Result<InequalityReport> {
    check_same_dim(x.dim(), y.dim())?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("Araki exponent r = {r} outside [0, 1]")));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(Error::InvalidParameter(format!("Araki exponent p = {p} must be positive")));
    }
    let yr2 = fractional_power(y, r / 2.0)?;
    let xr = fractional_power(x, r)?;
    let inner = product([yr2.matrix(), xr.matrix(), yr2.matrix()])?;
    let lhs = trace_power(&inner, p)?;

    let yh = fractional_power(y, 0.5)?;
    let outer = product([yh.matrix(), x.matrix(), yh.matrix()])?;
    let rhs = trace_power(&outer, r * p)?;
    Ok(InequalityReport::new("araki", lhs, rhs))
}

/// `Tr[(T^{1/m} A)^m] <= Tr[T A^m]` for PSD `T`, `A`.
pub fn check_power_chain_m(t: &PsdMatrix, a: &PsdMatrix, m: u32) -> Result<InequalityReport> {
    check_same_dim(t.dim(), a.dim())?;
    if m == 0 {
        return Err(Error::InvalidParameter("chain length m must be >= 1".into()));
    }
    let lhs = power_chain_lower(t, a.hermitian(), m)?;
    let rhs = power_chain_upper(t, a.hermitian(), m)?;
    Ok(InequalityReport::new("power_chain_m", lhs, rhs))
}

/// `Tr[(T^{1/m} A)^m]`.
pub fn power_chain_lower(t: &PsdMatrix, a: &HermitianMatrix, m: u32) -> Result<Complex64> {
    check_same_dim(t.dim(), a.dim())?;
    let root = fractional_power(t, 1.0 / m as f64)?;
    Ok(root.matrix().matmul(a.matrix())?.powi(m).trace())
}

/// `Tr[T A^m]`.
pub fn power_chain_upper(t: &PsdMatrix, a: &HermitianMatrix, m: u32) -> Result<Complex64> {
    check_same_dim(t.dim(), a.dim())?;
    Ok(t.matrix().matmul(&a.matrix().powi(m))?.trace())
}

/// `Tr[(T^{1/2}A)^2] <= Tr[T^alpha A T^{1-alpha} A] <= Tr[T A^2]`, returned as
/// `(lower, upper)`.
pub fn check_alpha_interp(t: &PsdMatrix, a: &HermitianMatrix, alpha: f64) -> Result<(InequalityReport, InequalityReport)> {
    check_same_dim(t.dim(), a.dim())?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    let am = a.matrix();
    let th = fractional_power(t, 0.5)?;
    let ta = fractional_power(t, alpha)?;
    let tb = fractional_power(t, 1.0 - alpha)?;
    let low = tr_product(&[th.matrix(), am, th.matrix(), am])?;
    let mid = tr_product(&[ta.matrix(), am, tb.matrix(), am])?;
    let high = tr_product(&[t.matrix(), am, am])?;
    Ok((
        InequalityReport::new("alpha_interp.lower", low, mid),
        InequalityReport::new("alpha_interp.upper", mid, high),
    ))
}

/// Pairwise `(f(a)-f(b))(g(a)-g(b))` has the sign `sign` for all eigenvalue pairs.
fn alignment_holds(fv: &[f64], gv: &[f64], sign: f64) -> bool {
    let scale = fv.iter().chain(gv).fold(1.0f64, |s, v| s.max(v.abs()));
    let band = 1e-12 * scale * scale;
    for i in 0..fv.len() {
        for j in i + 1..fv.len() {
            if sign * (fv[i] - fv[j]) * (gv[i] - gv[j]) < -band {
                return false;
            }
        }
    }
    true
}

/// Bourin/Fujii: with `(f, g)` aligned on the spectrum of `A`,
/// `Tr[f(A)Xg(A)X] <= Tr[f(A)g(A)X^2]`; with `(f, g)` anti-aligned, the
/// reverse. The report always orients the pair so that `slack >= 0` is the
/// claim.
pub fn check_bourin_fujii(
    f: &ScalarFunction,
    g: &ScalarFunction,
    a: &HermitianMatrix,
    x: &HermitianMatrix,
    aligned: bool,
) -> Result<InequalityReport> {
    check_same_dim(a.dim(), x.dim())?;
    let (terms, fv, gv) = fg_terms(f, g, a)?;
    let xm = x.matrix();
    let mixed = mixed_term(&terms, xm)?;
    let fg = terms.fa.matrix().matmul(terms.ga.matrix())?;
    let together = tr_product(&[&fg, xm, xm])?;
    let (lhs, rhs, sign) = if aligned {
        (mixed, together, 1.0)
    } else {
        (together, mixed, -1.0)
    };
    let report = InequalityReport::new("bourin_fujii", lhs, rhs);
    Ok(if alignment_holds(&fv, &gv, sign) {
        report
    } else {
        report.degenerate()
    })
}

/// Whether `(f, g)` is aligned (`Some(true)`), anti-aligned (`Some(false)`) or
/// neither on the spectrum of `A`.
pub fn alignment(f: &ScalarFunction, g: &ScalarFunction, a: &HermitianMatrix) -> Result<Option<bool>> {
    let d = a.eig()?;
    let fv = spectrum_values(&d, f)?;
    let gv = spectrum_values(&d, g)?;
    Ok(if alignment_holds(&fv, &gv, 1.0) {
        Some(true)
    } else if alignment_holds(&fv, &gv, -1.0) {
        Some(false)
    } else {
        None
    })
}

/// The two-sided bound for 2x2 PSD `T`, `A`:
/// `Tr[(T^{1/m}A)^m] <= Tr[T^{p_1}A..T^{p_m}A] <= Tr[T A^m]`, as
/// `(lower, upper)`. Any imaginary part in the chain above tolerance fails
/// the report, since the chain is real for 2x2 PSD inputs.
pub fn check_thm_2x2(t: &PsdMatrix, a: &PsdMatrix, w: &WeightVector) -> Result<(InequalityReport, InequalityReport)> {
    for d in [t.dim(), a.dim()] {
        if d != 2 {
            return Err(Error::DimensionViolation { expected: 2, found: d });
        }
    }
    let m = w.len() as u32;
    let chain = trace_chain(t, a.hermitian(), w)?;
    let low = power_chain_lower(t, a.hermitian(), m)?;
    let high = power_chain_upper(t, a.hermitian(), m)?;
    Ok((
        InequalityReport::new("thm_2x2.lower", low, chain),
        InequalityReport::new("thm_2x2.upper", chain, high),
    ))
}

/// Weighted AM-GM: returns `(prod a_i^{p_i}, sum p_i a_i)`.
pub fn amgm_weighted(a: &[f64], p: &WeightVector) -> Result<(f64, f64)> {
    if a.len() != p.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: p.len(),
        });
    }
    if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveInput { index, value });
    }
    let log_geo: f64 = a.iter().zip(p.as_slice()).map(|(x, w)| w * x.ln()).sum();
    let arith = a.iter().zip(p.as_slice()).map(|(x, w)| w * x).sum();
    Ok((log_geo.exp(), arith))
}
