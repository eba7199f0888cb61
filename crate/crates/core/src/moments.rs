//! Expectation values, uncertainty relations, variance matrices and
//! Ehrenfest checks.
//!
//! Slice states use the induced inner product `(phi, psi)_t = int dx phi^* * psi`;
//! full symbols use the trace product `int dt dx phi^* * psi`.

use std::io::Write;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Potential, Trajectory};
use crate::fieldgrid::{sample_field, Field2D, GridSpec};
use crate::operators::{apply, commutator_apply, m_matrix, OpKind, Ordering, SymbolOperator, SymbolSpace};
use crate::star::{star_integral, StarKernel};
use crate::symbols::SliceSymbol;
use crate::{Error, Result};

/// Allowed deviation of `(psi, psi)` from 1.
pub const NORM_TOL: f64 = 1e-6;
/// Imaginary residue tolerated in expectations of hermitian operators.
pub const REALITY_TOL: f64 = 1e-8;
/// Bound violations below this are roundoff.
pub const BOUND_TOL: f64 = 1e-8;

/// States with an inner product on which operators act.
pub trait StateSpace: SymbolSpace {
    fn inner_product(&self, other: &Self) -> Result<Complex64>;
}

impl StateSpace for SliceSymbol {
    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        self.inner(other)
    }
}

impl StateSpace for Field2D {
    fn inner_product(&self, other: &Self) -> Result<Complex64> {
        star_integral(&StarKernel::voros(self.spec.theta), &self.conj(), other)
    }
}

fn check_norm<S: StateSpace>(psi: &S) -> Result<()> {
    let n = psi.inner_product(psi)?.re;
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!("state is not normalized: (psi, psi) = {n:.9}")));
    }
    Ok(())
}

/// `<O> = (psi, O psi)` for a normalized state.
pub fn expectation<S: StateSpace>(op: &SymbolOperator, psi: &S) -> Result<Complex64> {
    check_norm(psi)?;
    psi.inner_product(&apply(op, psi)?)
}

fn pair(a: &SymbolOperator, b: &SymbolOperator) -> SymbolOperator {
    SymbolOperator::new(OpKind::Product(vec![a.kind.clone(), b.kind.clone()]), a.theta)
}

/// `<O^2> - <O>^2`, checked for reality and sign.
pub fn variance<S: StateSpace>(op: &SymbolOperator, psi: &S) -> Result<f64> {
    let mean = expectation(op, psi)?;
    let sq = expectation(&pair(op, op), psi)?;
    let v = sq - mean * mean;
    if v.re < -1e-10 {
        return Err(Error::Numerical(format!("negative variance {:.3e} for {:?}", v.re, op.kind)));
    }
    Ok(v.re.max(0.0))
}

/// `Delta A Delta B`.
pub fn uncertainty_product<S: StateSpace>(a: &SymbolOperator, b: &SymbolOperator, psi: &S) -> Result<f64> {
    Ok((variance(a, psi)? * variance(b, psi)?).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobertsonRecord {
    /// `Delta A Delta B`.
    pub lhs: f64,
    /// `|<[A, B]>| / 2`.
    pub robertson_rhs: f64,
    /// `sqrt(|<[A, B]>/2|^2 + (<{A, B}>/2 - <A><B>)^2)`.
    pub schrodinger_rhs: f64,
    pub holds: bool,
}

/// Robertson and Schrödinger bounds for the pair `(A, B)`.
pub fn robertson_schrodinger_check<S: StateSpace>(a: &SymbolOperator, b: &SymbolOperator, psi: &S) -> Result<RobertsonRecord> {
    let lhs = uncertainty_product(a, b, psi)?;
    let comm = psi.inner_product(&commutator_apply(a, b, psi)?)?;
    let ab = expectation(&pair(a, b), psi)?;
    let ba = expectation(&pair(b, a), psi)?;
    let cov = (ab + ba) / 2.0 - expectation(a, psi)? * expectation(b, psi)?;
    let robertson_rhs = comm.norm() / 2.0;
    let schrodinger_rhs = ((comm / 2.0).norm_sqr() + cov.re * cov.re).sqrt();
    let holds = lhs >= robertson_rhs - BOUND_TOL && lhs >= schrodinger_rhs - BOUND_TOL;
    Ok(RobertsonRecord { lhs, robertson_rhs, schrodinger_rhs, holds })
}

// ------------------------------------------------------------ variance matrix

/// Symmetric 4x4 matrix of second moments with its ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceMatrix {
    pub entries: Matrix4<f64>,
    pub ordering: Ordering,
    pub theta: f64,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    ordering: Ordering,
    labels: [String; 4],
    theta: f64,
    entries: [[f64; 4]; 4],
}

fn rows(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    out
}

fn to_json(m: &Matrix4<f64>, ordering: Ordering, theta: f64) -> String {
    let labels = ordering.labels().map(String::from);
    serde_json::to_string_pretty(&MatrixJson { ordering, labels, theta, entries: rows(m) }).expect("plain data serializes")
}

fn from_json(s: &str) -> Result<(Matrix4<f64>, Ordering, f64)> {
    let j: MatrixJson = serde_json::from_str(s)?;
    Ok((Matrix4::from_fn(|i, k| j.entries[i][k]), j.ordering, j.theta))
}

impl VarianceMatrix {
    pub fn new(entries: Matrix4<f64>, ordering: Ordering, theta: f64) -> Result<Self> {
        let asym = (entries - entries.transpose()).abs().max();
        if asym > 1e-12 * entries.abs().max().max(1.0) {
            return Err(Error::InvalidArgument(format!("variance matrix is not symmetric (asymmetry {asym:.3e})")));
        }
        if (0..4).any(|i| entries[(i, i)] < 0.0) {
            return Err(Error::InvalidArgument("variance matrix has a negative diagonal entry".into()));
        }
        Ok(Self { entries, ordering, theta })
    }

    pub fn det(&self) -> f64 {
        self.entries.determinant()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.entries.cholesky().is_some()
    }

    /// Same matrix in canonical `(X, T, P_x, P_t)` order.
    pub fn to_canonical(&self) -> Self {
        if self.ordering == Ordering::Canonical {
            return *self;
        }
        let p = self.ordering.permutation();
        let entries = Matrix4::from_fn(|i, j| self.entries[(p[i], p[j])]);
        Self { entries, ordering: Ordering::Canonical, theta: self.theta }
    }

    /// `V^0 = M V M^T` in canonical order.
    pub fn to_commuting(&self) -> Self {
        let v = self.to_canonical();
        let m = m_matrix(self.theta, Ordering::Canonical);
        Self { entries: m * v.entries * m.transpose(), ordering: Ordering::Canonical, theta: 0.0 }
    }

    pub fn to_json(&self) -> String {
        to_json(&self.entries, self.ordering, self.theta)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let (m, o, th) = from_json(s)?;
        Self::new(m, o, th)
    }
}

/// `Omega_{mu nu} = (1/2i)[Z_mu, Z_nu]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticForm {
    pub entries: Matrix4<f64>,
    pub ordering: Ordering,
    pub theta: f64,
}

impl SymplecticForm {
    /// The form of `(X, T, P_x, P_t)` with `[X, T] = -i theta`, `[X, P_x] = [T, P_t] = i`.
    pub fn canonical(theta: f64) -> Self {
        let mut w = Matrix4::zeros();
        w[(0, 1)] = -theta / 2.0;
        w[(0, 2)] = 0.5;
        w[(1, 3)] = 0.5;
        let entries = w - w.transpose();
        Self { entries, ordering: Ordering::Canonical, theta }
    }

    pub fn is_invertible(&self) -> bool {
        self.entries.determinant().abs() > 1e-14
    }

    pub fn to_json(&self) -> String {
        to_json(&self.entries, self.ordering, self.theta)
    }
}

/// Symplectic eigenvalues `nu_1 >= nu_2`: the moduli of the eigenvalues of
/// `2i (2 Omega) V`, each doubly degenerate.
pub fn symplectic_eigenvalues(v: &VarianceMatrix, omega: &SymplecticForm) -> Result<[f64; 2]> {
    if !v.is_positive_definite() {
        return Err(Error::InvalidArgument("variance matrix must be positive definite".into()));
    }
    if !omega.is_invertible() {
        return Err(Error::InvalidArgument("symplectic form is singular".into()));
    }
    if v.ordering != omega.ordering {
        return Err(Error::InvalidArgument("variance matrix and form use different orderings".into()));
    }
    let a = omega.entries * 2.0 * v.entries;
    let mut nu: Vec<f64> = a.complex_eigenvalues().iter().map(|z| 2.0 * z.norm()).collect();
    nu.sort_by(|x, y| y.total_cmp(x));
    Ok([nu[0], nu[2]])
}

/// Coherent-state variance matrix as printed in the reference construction.
pub fn printed_coherent_matrix(theta: f64) -> VarianceMatrix {
    let h = theta / 2.0;
    let q = 1.0 / theta;
    #[rustfmt::skip]
    let m = Matrix4::new(
        h, 0.0, 0.0, -0.5,
        0.0, h, 0.5, 0.0,
        0.0, 0.5, q, 0.0,
        -0.5, 0.0, 0.0, q,
    );
    VarianceMatrix { entries: m, ordering: Ordering::Canonical, theta }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentVariance {
    pub analytic: VarianceMatrix,
    pub numeric: VarianceMatrix,
    /// `(1/2i) <[Z_mu, Z_nu]>` measured on the same state.
    pub numeric_form: SymplecticForm,
    pub max_deviation: f64,
}

impl CoherentVariance {
    pub fn agrees(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }

    /// Error carrying both matrices when they differ by more than `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.agrees(tol) {
            return Ok(());
        }
        Err(Error::Numerical(format!(
            "coherent variance matrix mismatch (max deviation {:.3e}); analytic {:?}, numeric {:?}",
            self.max_deviation,
            rows(&self.analytic.entries),
            rows(&self.numeric.entries)
        )))
    }
}

/// Normalized coherent-state symbol `e^{-(t^2 + x^2)/(2 theta)}` on a grid fitted to `theta`.
pub fn coherent_symbol(theta: f64) -> Result<Field2D> {
    if !(theta > 0.0) {
        return Err(Error::InvalidArgument(format!("coherent state needs theta > 0, got {theta}")));
    }
    let half = 9.0 * theta.sqrt();
    let spec = GridSpec::centered(128, 128, half, half, theta)?;
    let psi = sample_field(|t, x| Complex64::new((-(t * t + x * x) / (2.0 * theta)).exp(), 0.0), spec)?;
    let n = psi.inner_product(&psi)?.re;
    Ok(psi.scale(Complex64::new(1.0 / n.sqrt(), 0.0)))
}

fn canonical_ops(theta: f64) -> [SymbolOperator; 4] {
    [OpKind::XL, OpKind::TL, OpKind::Px, OpKind::Pt].map(|k| SymbolOperator::new(k, theta))
}

/// Symmetrized covariances of `(X, T, P_x, P_t)` and the measured commutator form.
pub fn variance_matrix<S: StateSpace + Sync + Send>(psi: &S, theta: f64) -> Result<(VarianceMatrix, SymplecticForm)> {
    check_norm(psi)?;
    let ops = canonical_ops(theta);
    let images: Vec<S> = ops.iter().map(|o| apply(o, psi)).collect::<Result<_>>()?;
    let means: Vec<Complex64> = images.iter().map(|a| psi.inner_product(a)).collect::<Result<_>>()?;
    let idx: Vec<(usize, usize)> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect();
    // <A_i A_j> = (A_i psi, A_j psi) for hermitian A_i
    let second: Vec<Complex64> = idx
        .par_iter()
        .map(|&(i, j)| images[i].inner_product(&images[j]))
        .collect::<Result<_>>()?;
    let mut v = Matrix4::zeros();
    let mut w = Matrix4::zeros();
    for (n, &(i, j)) in idx.iter().enumerate() {
        let ij = second[n];
        let ji = second[j * 4 + i];
        v[(i, j)] = ((ij + ji) / 2.0 - means[i] * means[j]).re;
        w[(i, j)] = ((ij - ji) / Complex64::new(0.0, 2.0)).re;
    }
    let v = (v + v.transpose()) / 2.0;
    Ok((
        VarianceMatrix::new(v, Ordering::Canonical, theta)?,
        SymplecticForm { entries: w, ordering: Ordering::Canonical, theta },
    ))
}

/// The printed matrix next to the one measured on the coherent-state symbol.
pub fn coherent_variance_matrix(theta: f64) -> Result<CoherentVariance> {
    let psi = coherent_symbol(theta)?;
    let (numeric, numeric_form) = variance_matrix(&psi, theta)?;
    let analytic = printed_coherent_matrix(theta);
    let max_deviation = (numeric.entries - analytic.entries).abs().max();
    Ok(CoherentVariance { analytic, numeric, numeric_form, max_deviation })
}

/// Symmetric eigenvalues, for reporting.
pub fn ordinary_spectrum(v: &VarianceMatrix) -> [f64; 4] {
    let e = SymmetricEigen::new(v.entries).eigenvalues;
    let mut out = [e[0], e[1], e[2], e[3]];
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

// ---------------------------------------------------------------- Ehrenfest

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhrenfestSeries {
    pub t: Vec<f64>,
    /// `|d_t <O> - i <[H, O]> - <d_t O>|`.
    pub residual: Vec<f64>,
    /// For `O = P_x`: `|d_t <P_x> + <V'(x)> + (theta/2) <V''(x)(d_x - i d_t)>|`.
    pub force_law_residual: Option<Vec<f64>>,
}

impl EhrenfestSeries {
    pub fn max(&self) -> f64 {
        self.residual.iter().copied().fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, r) in self.t.iter().zip(&self.residual) {
            writeln!(w, "{t:.10e},{r:.10e}")?;
        }
        Ok(())
    }
}

fn poly_values(p: &Potential, xs: &[f64]) -> Option<Vec<Complex64>> {
    let c = p.polynomial()?;
    Some(
        xs.iter()
            .map(|&x| Complex64::new(c.iter().rev().fold(0.0, |acc, a| acc * x + a), 0.0))
            .collect(),
    )
}

/// Residuals of `d_t <O> = i <[H, O]> + <d_t O>` along a trajectory, with
/// `d_t <O>` from fourth-order central differences over stored slices.
pub fn ehrenfest_residual(traj: &Trajectory, op: &SymbolOperator, m: f64) -> Result<EhrenfestSeries> {
    let slices = &traj.slices;
    if slices.len() < 5 {
        return Err(Error::InvalidArgument(format!("{} stored slices; central differences need at least 5", slices.len())));
    }
    let h = slices[1].t - slices[0].t;
    if slices.windows(2).any(|w| ((w[1].t - w[0].t) - h).abs() > 1e-9 * h.abs().max(1.0)) {
        return Err(Error::InvalidArgument("stored slices must be uniformly spaced (drop the final partial block)".into()));
    }
    let theta = op.theta;
    let ham = SymbolOperator::new(OpKind::Hamiltonian { m, potential: traj.potential.clone() }, theta);
    let explicit = op.explicit_time_derivative()?;
    let is_px = matches!(op.kind, OpKind::Px);
    let xs = traj.spec.x_nodes();
    let force = if is_px {
        match (traj.potential.derivative(), traj.potential.derivative().and_then(|d| d.derivative())) {
            (Some(d1), Some(d2)) => Some((poly_values(&d1, &xs).unwrap_or_default(), poly_values(&d2, &xs).unwrap_or_default())),
            _ => None,
        }
    } else {
        None
    };
    let means: Vec<Complex64> = slices.par_iter().map(|s| expectation(op, &s.symbol)).collect::<Result<_>>()?;
    let interior: Vec<usize> = (2..slices.len() - 2).collect();
    let rows: Vec<(f64, f64, Option<f64>)> = interior
        .par_iter()
        .map(|&i| {
            let psi = &slices[i].symbol;
            let d = (-means[i + 2] + means[i + 1] * 8.0 - means[i - 1] * 8.0 + means[i - 2]) / (12.0 * h);
            let comm = psi.inner(&commutator_apply(&ham, op, psi)?)? * Complex64::new(0.0, 1.0);
            let dt_op = match &explicit {
                Some(o) => psi.inner(&apply(o, psi)?)?,
                None => Complex64::new(0.0, 0.0),
            };
            let r = (d - comm - dt_op).norm();
            let f = match &force {
                Some((v1, v2)) => {
                    let a = psi.inner(&psi.mul_fn(v1))?;
                    let dpsi = psi.d_x().sub(&psi.d_t().scale(Complex64::new(0.0, 1.0)));
                    let b = psi.inner(&dpsi.mul_fn(v2))?;
                    Some((d + a + b * (theta / 2.0)).norm())
                }
                None => None,
            };
            Ok((slices[i].t, r, f))
        })
        .collect::<Result<_>>()?;
    let force_law_residual = if force.is_some() { Some(rows.iter().map(|r| r.2.unwrap_or(f64::NAN)).collect()) } else { None };
    Ok(EhrenfestSeries {
        t: rows.iter().map(|r| r.0).collect(),
        residual: rows.iter().map(|r| r.1).collect(),
        force_law_residual,
    })
}
