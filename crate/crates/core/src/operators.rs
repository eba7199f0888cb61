//! Deformed coordinate and momentum operators acting on symbols.
//!
//! Left multiplication by `x` and `t` in the Voros algebra is represented by
//!
//! ```text
//! X_L = x + (theta/2)(d_x - i d_t)      T_L = t + (theta/2)(d_t + i d_x)
//! X_R = x + (theta/2)(d_x + i d_t)      T_R = t + (theta/2)(d_t - i d_x)
//! ```
//!
//! so that `[X_L, T_L] = -i theta`. Momenta keep their commutative form and the
//! commuting coordinates are `X_c = X_L - (theta/2) P_t`, `T_c = T_L + (theta/2) P_x`.
//! Every operator acts on any [`SymbolSpace`]: full [`Field2D`] symbols or
//! energy-tagged [`SliceSymbol`]s.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::Potential;
use crate::fieldgrid::{Axis, Field2D};
use crate::star::{star, StarKernel};
use crate::symbols::SliceSymbol;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(a: f64) -> Complex64 {
    Complex64::new(a, 0.0)
}

/// Linear structure and the elementary multiplications/derivatives an operator needs.
pub trait SymbolSpace: Sized + Clone {
    fn theta(&self) -> f64;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, a: Complex64) -> Self;
    fn mul_x(&self) -> Self;
    fn mul_t(&self) -> Self;
    fn d_x(&self) -> Self;
    fn d_t(&self) -> Self;
    fn norm_max(&self) -> f64;
    /// `(e^{(theta/4) laplacian} V) * psi` for potentials given by samples.
    fn sampled_potential_star(&self, v: &Potential) -> Result<Self>;

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.times(re(-1.0)))
    }
}

impl SymbolSpace for Field2D {
    fn theta(&self) -> f64 {
        self.spec.theta
    }
    fn plus(&self, other: &Self) -> Self {
        Field2D::add(self, other)
    }
    fn times(&self, a: Complex64) -> Self {
        self.scale(a)
    }
    fn mul_x(&self) -> Self {
        self.map_nodes(|_, x, v| v * x)
    }
    fn mul_t(&self) -> Self {
        self.map_nodes(|t, _, v| v * t)
    }
    fn d_x(&self) -> Self {
        self.deriv(Axis::X, 1)
    }
    fn d_t(&self) -> Self {
        self.deriv(Axis::T, 1)
    }
    fn norm_max(&self) -> f64 {
        self.max_norm()
    }
    fn sampled_potential_star(&self, v: &Potential) -> Result<Self> {
        let theta = self.spec.theta;
        let raw = crate::fieldgrid::sample_field(|t, x| re(v.value(x, t)), self.spec)?;
        let smooth = raw.fourier_multiply(|k_t, k_x, _, _| re((-theta * (k_t * k_t + k_x * k_x) / 4.0).exp()));
        star(&StarKernel::voros(theta), &smooth, self)
    }
}

impl SymbolSpace for SliceSymbol {
    fn theta(&self) -> f64 {
        SliceSymbol::theta(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn times(&self, a: Complex64) -> Self {
        self.scale(a)
    }
    fn mul_x(&self) -> Self {
        SliceSymbol::mul_x(self)
    }
    fn mul_t(&self) -> Self {
        SliceSymbol::mul_t(self)
    }
    fn d_x(&self) -> Self {
        SliceSymbol::d_x(self)
    }
    fn d_t(&self) -> Self {
        SliceSymbol::d_t(self)
    }
    fn norm_max(&self) -> f64 {
        self.max_norm()
    }
    fn sampled_potential_star(&self, v: &Potential) -> Result<Self> {
        if v.is_time_dependent() && self.theta() > 0.0 {
            return Err(Error::Unsupported(
                "time-dependent potentials on slices need theta = 0; use full Field2D symbols".into(),
            ));
        }
        let theta = self.theta();
        let xs = self.spec.x_nodes();
        let raw: Vec<Complex64> = xs.iter().map(|&x| re(v.value(x, self.t))).collect();
        let field = SliceSymbol::static_field(self.spec, self.t, raw);
        let smooth = field.fourier_multiply(|_, k| re((-theta * k * k / 4.0).exp()));
        smooth.star(self)
    }
}

/// Operator kinds. Composite kinds apply right to left (`Product([A, B]) psi = A(B psi)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum OpKind {
    Identity,
    XL,
    XR,
    TL,
    TR,
    Px,
    Pt,
    Xc,
    Tc,
    /// `G = m X_L - P_x T_L - (theta/2) P_x^2`.
    GalileanBoost { m: f64 },
    /// `G = m X_L - P_x T_c`.
    GalileanBoostCommuting { m: f64 },
    /// `H = P_x^2 / 2m + V(X_L, T_L)`.
    Hamiltonian { m: f64, potential: Potential },
    Sum(Vec<OpKind>),
    Product(Vec<OpKind>),
    Scaled { re: f64, im: f64, op: Box<OpKind> },
}

/// An operator descriptor; serializes to `{kind, theta, params}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolOperator {
    #[serde(flatten)]
    pub kind: OpKind,
    pub theta: f64,
}

impl SymbolOperator {
    pub fn new(kind: OpKind, theta: f64) -> Self {
        Self { kind, theta }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::new(OpKind::Product(vec![self.kind.clone(), other.kind.clone()]), self.theta)
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::new(OpKind::Sum(vec![self.kind.clone(), other.kind.clone()]), self.theta)
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self::new(OpKind::Scaled { re: a.re, im: a.im, op: Box::new(self.kind.clone()) }, self.theta)
    }

    /// Explicit time derivative `d_t O` (as an operator), `None` when it vanishes.
    pub fn explicit_time_derivative(&self) -> Result<Option<SymbolOperator>> {
        let d = |k: OpKind| Ok(Some(Self::new(k, self.theta)));
        match &self.kind {
            OpKind::TL | OpKind::TR | OpKind::Tc => d(OpKind::Identity),
            OpKind::GalileanBoost { .. } | OpKind::GalileanBoostCommuting { .. } => {
                d(OpKind::Scaled { re: -1.0, im: 0.0, op: Box::new(OpKind::Px) })
            }
            OpKind::Hamiltonian { potential, .. } if potential.is_time_dependent() => {
                Err(Error::Unsupported("explicit time derivative of a time-dependent Hamiltonian".into()))
            }
            OpKind::Sum(_) | OpKind::Product(_) | OpKind::Scaled { .. } => {
                Err(Error::Unsupported("explicit time derivative of composite operators".into()))
            }
            _ => Ok(None),
        }
    }
}

/// `op psi`.
pub fn apply<S: SymbolSpace>(op: &SymbolOperator, psi: &S) -> Result<S> {
    if op.theta != psi.theta() {
        return Err(Error::SpecMismatch(format!("operator theta {} vs symbol theta {}", op.theta, psi.theta())));
    }
    apply_kind(&op.kind, op.theta, psi)
}

fn apply_kind<S: SymbolSpace>(kind: &OpKind, theta: f64, psi: &S) -> Result<S> {
    let h = theta / 2.0;
    Ok(match kind {
        OpKind::Identity => psi.clone(),
        OpKind::XL => psi.mul_x().plus(&psi.d_x().minus(&psi.d_t().times(I)).times(re(h))),
        OpKind::XR => psi.mul_x().plus(&psi.d_x().plus(&psi.d_t().times(I)).times(re(h))),
        OpKind::TL => psi.mul_t().plus(&psi.d_t().plus(&psi.d_x().times(I)).times(re(h))),
        OpKind::TR => psi.mul_t().plus(&psi.d_t().minus(&psi.d_x().times(I)).times(re(h))),
        OpKind::Px => psi.d_x().times(-I),
        OpKind::Pt => psi.d_t().times(-I),
        OpKind::Xc => psi.mul_x().plus(&psi.d_x().times(re(h))),
        OpKind::Tc => psi.mul_t().plus(&psi.d_t().times(re(h))),
        OpKind::GalileanBoost { m } => {
            let x = apply_kind(&OpKind::XL, theta, psi)?.times(re(*m));
            let pt = apply_kind(&OpKind::Px, theta, &apply_kind(&OpKind::TL, theta, psi)?)?;
            let p2 = psi.d_x().d_x().times(re(-1.0));
            x.minus(&pt).minus(&p2.times(re(h)))
        }
        OpKind::GalileanBoostCommuting { m } => {
            let x = apply_kind(&OpKind::XL, theta, psi)?.times(re(*m));
            let pt = apply_kind(&OpKind::Px, theta, &apply_kind(&OpKind::Tc, theta, psi)?)?;
            x.minus(&pt)
        }
        OpKind::Hamiltonian { m, potential } => {
            if !(*m > 0.0) {
                return Err(Error::InvalidArgument(format!("mass must be positive, got {m}")));
            }
            let kinetic = psi.d_x().d_x().times(re(-0.5 / m));
            kinetic.plus(&potential_action(potential, theta, psi)?)
        }
        OpKind::Sum(ops) => {
            let mut it = ops.iter();
            let first = it.next().ok_or_else(|| Error::InvalidArgument("empty operator sum".into()))?;
            let mut acc = apply_kind(first, theta, psi)?;
            for k in it {
                acc = acc.plus(&apply_kind(k, theta, psi)?);
            }
            acc
        }
        OpKind::Product(ops) => {
            let mut acc = psi.clone();
            for k in ops.iter().rev() {
                acc = apply_kind(k, theta, &acc)?;
            }
            acc
        }
        OpKind::Scaled { re: a, im: b, op } => apply_kind(op, theta, psi)?.times(Complex64::new(*a, *b)),
    })
}

/// `V(X_L, T_L) psi`: polynomial potentials by composition, sampled ones through their symbol.
pub fn potential_action<S: SymbolSpace>(v: &Potential, theta: f64, psi: &S) -> Result<S> {
    match v.polynomial() {
        Some(coeffs) => {
            // Horner in X_L
            let mut acc = psi.times(re(0.0));
            for &c in coeffs.iter().rev() {
                acc = apply_kind(&OpKind::XL, theta, &acc)?.plus(&psi.times(re(c)));
            }
            Ok(acc)
        }
        None => psi.sampled_potential_star(v),
    }
}

/// `(A B - B A) psi`.
pub fn commutator_apply<S: SymbolSpace>(a: &SymbolOperator, b: &SymbolOperator, psi: &S) -> Result<S> {
    let ab = apply(a, &apply(b, psi)?)?;
    let ba = apply(b, &apply(a, psi)?)?;
    Ok(ab.minus(&ba))
}

/// Phase-space orderings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    /// `(X, T, P_x, P_t)`.
    Canonical,
    /// `(T, X, P_t, P_x)`.
    TimeFirst,
}

impl Ordering {
    /// Index map from this ordering into canonical slots.
    pub fn permutation(&self) -> [usize; 4] {
        match self {
            Ordering::Canonical => [0, 1, 2, 3],
            Ordering::TimeFirst => [1, 0, 3, 2],
        }
    }

    pub fn labels(&self) -> [&'static str; 4] {
        match self {
            Ordering::Canonical => ["X", "T", "P_x", "P_t"],
            Ordering::TimeFirst => ["T", "X", "P_t", "P_x"],
        }
    }
}

/// Ordered quadruple of phase-space values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceVector {
    pub values: [f64; 4],
    pub ordering: Ordering,
}

impl PhaseSpaceVector {
    pub fn to_canonical(&self) -> [f64; 4] {
        let p = self.ordering.permutation();
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = self.values[p[i]];
        }
        out
    }
}

/// `M` with `Z^c = M Z` in the requested ordering.
pub fn m_matrix(theta: f64, ordering: Ordering) -> Matrix4<f64> {
    let h = theta / 2.0;
    // time-first rows: T_c = T + h P_x, X_c = X - h P_t
    let tf = Matrix4::new(
        1.0, 0.0, 0.0, h, //
        0.0, 1.0, -h, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    );
    match ordering {
        Ordering::TimeFirst => tf,
        Ordering::Canonical => {
            let p = perm_matrix(Ordering::TimeFirst.permutation());
            p * tf * p.transpose()
        }
    }
}

fn perm_matrix(p: [usize; 4]) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for (i, &j) in p.iter().enumerate() {
        m[(i, j)] = 1.0;
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MTransform {
    pub matrix: Matrix4<f64>,
    pub ordering: Ordering,
    /// Permutation applied to the time-first `M` to reach `ordering`.
    pub permutation: [usize; 4],
    pub det_m: f64,
}

/// `M V M^T` for a 4x4 matrix in the declared ordering.
pub fn m_transform_matrix(v: &Matrix4<f64>, ordering: Option<Ordering>, theta: f64) -> Result<MTransform> {
    let ordering = ordering.ok_or_else(|| Error::InvalidArgument("ordering metadata required for M".into()))?;
    let m = m_matrix(theta, ordering);
    Ok(MTransform {
        matrix: m * v * m.transpose(),
        ordering,
        permutation: ordering.permutation(),
        det_m: m.determinant(),
    })
}

/// `M z` for a phase-space vector.
pub fn m_transform_vector(v: &PhaseSpaceVector, theta: f64) -> PhaseSpaceVector {
    let m = m_matrix(theta, v.ordering);
    let z = m * nalgebra::Vector4::from(v.values);
    PhaseSpaceVector { values: [z[0], z[1], z[2], z[3]], ordering: v.ordering }
}

/// Boosted plane wave `e^{-imv(x+vt)} e^{-i(Et-p(x+vt))} e^{iv(pt + theta p^2/2)}` as a function.
pub fn boost_plane_wave(e: f64, p: f64, v: f64, m: f64, theta: f64) -> impl Fn(f64, f64) -> Complex64 + Sync + Copy {
    move |t, x| {
        let phase = -m * v * (x + v * t) - (e * t - p * (x + v * t)) + v * (p * t + theta * p * p / 2.0);
        Complex64::new(0.0, phase).exp()
    }
}

/// First-order boost `psi - i v G psi` with the neglected second-order size.
#[derive(Debug, Clone)]
pub struct Boosted<S> {
    pub psi: S,
    /// `v^2 ||G^2 psi|| / 2`, the leading neglected term.
    pub error_estimate: f64,
}

/// Largest `|v| ||G psi|| / ||psi||` accepted by [`boost_transform`].
pub const BOOST_EXPANSION_LIMIT: f64 = 0.1;

pub fn boost_transform<S: SymbolSpace>(psi: &S, v: f64, m: f64) -> Result<Boosted<S>> {
    let g = SymbolOperator::new(OpKind::GalileanBoost { m }, psi.theta());
    let gpsi = apply(&g, psi)?;
    let n = psi.norm_max();
    let ratio = if n > 0.0 { v.abs() * gpsi.norm_max() / n } else { 0.0 };
    if ratio > BOOST_EXPANSION_LIMIT {
        let bound = BOOST_EXPANSION_LIMIT * n / gpsi.norm_max();
        return Err(Error::InvalidArgument(format!(
            "boost v = {v} too large for the first-order expansion (|v| ||G psi||/||psi|| = {ratio:.3}); need |v| <= {bound:.3e}"
        )));
    }
    let g2 = apply(&g, &gpsi)?;
    Ok(Boosted {
        psi: psi.minus(&gpsi.times(Complex64::new(0.0, v))),
        error_estimate: 0.5 * v * v * g2.norm_max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldgrid::{sample_field, GridSpec};
    use crate::symbols::SliceSymbol;
    use proptest::prelude::*;

    fn c(a: f64, b: f64) -> Complex64 {
        Complex64::new(a, b)
    }

    fn grid(theta: f64) -> GridSpec {
        GridSpec::centered(256, 256, 9.0, 9.0, theta).unwrap()
    }

    fn gauss(s: GridSpec, t0: f64, x0: f64, kt: f64, kx: f64) -> Field2D {
        sample_field(|t, x| c(-((t - t0).powi(2) + (x - x0).powi(2)) / 2.0, kt * t + kx * x).exp(), s).unwrap()
    }

    fn op(kind: OpKind, theta: f64) -> SymbolOperator {
        SymbolOperator::new(kind, theta)
    }

    #[test]
    fn commutative_limit_is_multiplication() {
        let s = GridSpec::centered(64, 64, 6.0, 6.0, 0.0).unwrap();
        let psi = gauss(s, 0.2, -0.3, 0.5, 1.0);
        let xl = apply(&op(OpKind::XL, 0.0), &psi).unwrap();
        assert_eq!(xl, psi.mul_x());
        let tl = apply(&op(OpKind::TL, 0.0), &psi).unwrap();
        assert_eq!(tl, psi.mul_t());
    }

    #[test]
    fn plane_wave_examples() {
        let theta = 0.2;
        let s = GridSpec::centered(64, 64, std::f64::consts::PI, std::f64::consts::PI, theta).unwrap();
        let wave = sample_field(|t, x| c(0.0, -(1.0 * t - 2.0 * x)).exp(), s).unwrap();
        let px = apply(&op(OpKind::Px, theta), &wave).unwrap();
        assert!(px.sub(&wave.scale(c(2.0, 0.0))).max_norm() < 1e-12);
        let pt = apply(&op(OpKind::Pt, theta), &wave).unwrap();
        assert!(pt.sub(&wave.scale(c(-1.0, 0.0))).max_norm() < 1e-12);

        let w = sample_field(|t, _| c(0.0, -t).exp(), s).unwrap();
        let xl = apply(&op(OpKind::XL, theta), &w).unwrap();
        let want = w.map_nodes(|_, x, v| v * (x - 0.1));
        assert!(xl.sub(&want).max_norm() < 1e-12);
    }

    #[test]
    fn commutators_on_gaussians() {
        let theta = 0.2;
        let s = grid(theta);
        let psi = gauss(s, 0.3, -0.2, 0.4, 0.7);
        let r = commutator_apply(&op(OpKind::Tc, theta), &op(OpKind::Xc, theta), &psi).unwrap();
        assert!(r.max_norm() < 1e-9);
        let r = commutator_apply(&op(OpKind::XL, theta), &op(OpKind::TL, theta), &psi).unwrap();
        assert!(r.sub(&psi.scale(c(0.0, -theta))).max_norm() < 1e-9);
        let r = commutator_apply(&op(OpKind::XR, theta), &op(OpKind::TR, theta), &psi).unwrap();
        assert!(r.sub(&psi.scale(c(0.0, theta))).max_norm() < 1e-9);
        let r = commutator_apply(&op(OpKind::XL, theta), &op(OpKind::TR, theta), &psi).unwrap();
        assert!(r.max_norm() < 1e-9);
    }

    #[test]
    fn galilean_algebra() {
        let (theta, m) = (0.2, 1.3);
        let s = grid(theta);
        let psi = gauss(s, 0.1, 0.2, -0.3, 0.6);
        let g = op(OpKind::GalileanBoost { m }, theta);
        let h = op(OpKind::Hamiltonian { m, potential: Potential::None }, theta);
        let px = apply(&op(OpKind::Px, theta), &psi).unwrap();
        let r = commutator_apply(&g, &h, &psi).unwrap();
        assert!(r.sub(&px.scale(c(0.0, 1.0))).max_norm() < 1e-9);
        let r = commutator_apply(&g, &op(OpKind::Px, theta), &psi).unwrap();
        assert!(r.sub(&psi.scale(c(0.0, m))).max_norm() < 1e-9);
        let r = commutator_apply(&g, &op(OpKind::Pt, theta), &psi).unwrap();
        assert!(r.add(&px.scale(c(0.0, 1.0))).max_norm() < 1e-9);
    }

    #[test]
    fn boost_forms_agree() {
        let (theta, m) = (0.3, 0.8);
        let s = grid(theta);
        let psi = gauss(s, -0.2, 0.4, 0.2, -0.5);
        let a = apply(&op(OpKind::GalileanBoost { m }, theta), &psi).unwrap();
        let b = apply(&op(OpKind::GalileanBoostCommuting { m }, theta), &psi).unwrap();
        assert!(a.sub(&b).max_norm() < 1e-9);
    }

    #[test]
    fn momentum_from_left_right_difference() {
        let theta = 0.2;
        let s = grid(theta);
        let psi = gauss(s, 0.0, 0.5, 1.0, -0.4);
        let tl = apply(&op(OpKind::TL, theta), &psi).unwrap();
        let tr = apply(&op(OpKind::TR, theta), &psi).unwrap();
        let p = apply(&op(OpKind::Px, theta), &psi).unwrap();
        assert!(tl.sub(&tr).scale(c(-1.0 / theta, 0.0)).sub(&p).max_norm() < 1e-9);
    }

    #[test]
    fn first_order_convergence_in_theta() {
        let errs: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&theta| {
                let s = GridSpec::centered(256, 256, 6.0, 6.0, theta).unwrap();
                let psi = gauss(s, 0.0, 0.0, 0.5, 0.5);
                apply(&op(OpKind::XL, theta), &psi).unwrap().sub(&psi.mul_x()).max_norm()
            })
            .collect();
        for w in errs.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn slice_self_adjointness() {
        let theta = 0.2;
        let t = 0.3;
        let s = GridSpec::for_slice(256, (-10.0, 10.0), theta, t).unwrap();
        let g = |x0: f64, k: f64| s.x_nodes().iter().map(|&x| c(-(x - x0).powi(2) / 2.0, k * x).exp()).collect::<Vec<_>>();
        let phi = SliceSymbol::stationary(s, t, 0.7, g(0.3, 0.5));
        let psi = SliceSymbol::stationary(s, t, 1.1, g(-0.2, -0.4));
        let check = |kind: OpKind, phi: &SliceSymbol| {
            let o = op(kind.clone(), theta);
            let lhs = phi.inner(&apply(&o, &psi).unwrap()).unwrap();
            let rhs = apply(&o, phi).unwrap().inner(&psi).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "{kind:?}: {lhs} vs {rhs}");
        };
        for kind in [OpKind::XL, OpKind::TL, OpKind::Px] {
            check(kind, &phi);
        }
        // P_t enters X_c and T_c, and (phi, psi)_t oscillates unless the tags agree
        let same = SliceSymbol::stationary(s, t, 1.1, g(0.3, 0.5));
        for kind in [OpKind::Xc, OpKind::Tc, OpKind::Pt] {
            check(kind, &same);
        }
    }

    #[test]
    fn sampled_potential_matches_polynomial_on_slices() {
        // a decaying Gaussian potential, compared through the exact similarity
        // V(X_L) = S V(x - theta E/2) S^-1 on an energy-tagged slice
        let theta = 0.1;
        let t = 0.0;
        let e = 0.8;
        let s = GridSpec::for_slice(256, (-10.0, 10.0), theta, t).unwrap();
        let v = Potential::Samples {
            x_min: -10.0,
            dx: 20.0 / 4096.0,
            values: (0..=4096).map(|i| (-(-10.0 + i as f64 * 20.0 / 4096.0f64).powi(2)).exp()).collect(),
        };
        let f: Vec<Complex64> = s.x_nodes().iter().map(|&x| c(-x * x / 2.0, 0.0).exp()).collect();
        let psi = SliceSymbol::stationary(s, t, e, f);
        let got = potential_action(&v, theta, &psi).unwrap().eval();

        // S^-1 e^{-x^2/2} = (1 - theta/2)^{-1/2} e^{-x^2 / (2 - theta)}
        let shifted: Vec<Complex64> = s
            .x_nodes()
            .iter()
            .map(|&x| c((-x * x / (2.0 - theta)).exp() / (1.0 - theta / 2.0).sqrt() * (-(x - theta * e / 2.0).powi(2)).exp(), 0.0))
            .collect();
        let want = SliceSymbol::static_field(s, t, shifted).fourier_multiply(|_, k| c((-theta * k * k / 4.0).exp(), 0.0)).eval();
        let err = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "err {err}");
    }

    #[test]
    fn m_matrix_properties() {
        for theta in [0.1, 1.0, 10.0] {
            assert!((m_matrix(theta, Ordering::Canonical).determinant() - 1.0).abs() < 1e-14);
            assert!((m_matrix(theta, Ordering::TimeFirst).determinant() - 1.0).abs() < 1e-14);
        }
        assert_eq!(m_matrix(0.0, Ordering::Canonical), Matrix4::identity());
        // canonical: X_c = X - (theta/2) P_t, T_c = T + (theta/2) P_x
        let m = m_matrix(0.4, Ordering::Canonical);
        assert_eq!(m[(0, 3)], -0.2);
        assert_eq!(m[(1, 2)], 0.2);
        assert!(m_transform_matrix(&Matrix4::identity(), None, 0.1).is_err());
        let v = PhaseSpaceVector { values: [1.0, 2.0, 3.0, 4.0], ordering: Ordering::TimeFirst };
        let z = m_transform_vector(&v, 0.5);
        // T_c = 1 + 0.25*4, X_c = 2 - 0.25*3
        assert_eq!(z.values, [2.0, 1.25, 3.0, 4.0]);
        assert_eq!(z.to_canonical(), [1.25, 2.0, 4.0, 3.0]);
    }

    #[test]
    fn boost_examples() {
        let theta = 0.2;
        let f = boost_plane_wave(1.0, 1.0, 0.0, 1.0, theta);
        assert!((f(0.4, -0.3) - c(0.0, -(0.4 - (-0.3))).exp()).norm() < 1e-15);
        let v = 0.3;
        let a = boost_plane_wave(1.0, 1.0, v, 1.0, theta)(0.7, 0.2);
        let b = boost_plane_wave(1.0, 1.0, v, 1.0, 0.0)(0.7, 0.2);
        assert!((a / b - c(0.0, v * 0.1).exp()).norm() < 1e-14);

        let s = grid(theta);
        let psi = gauss(s, 0.0, 0.0, 0.0, 0.0);
        let id = boost_transform(&psi, 0.0, 1.0).unwrap();
        assert_eq!(id.psi, psi);
        assert!(boost_transform(&psi, 5.0, 1.0).is_err());
        let small = boost_transform(&psi, 1e-3, 1.0).unwrap();
        assert!(small.error_estimate < 1e-5);
    }

    #[test]
    fn json_shape() {
        let o = op(OpKind::GalileanBoost { m: 2.0 }, 0.1);
        let v: serde_json::Value = serde_json::from_str(&o.to_json()).unwrap();
        assert_eq!(v["kind"], "GalileanBoost");
        assert_eq!(v["theta"], 0.1);
        assert_eq!(v["params"]["m"], 2.0);
        assert_eq!(SymbolOperator::from_json(&o.to_json()).unwrap(), o);
        let h = op(OpKind::Hamiltonian { m: 1.0, potential: Potential::Harmonic { m: 1.0, omega: 2.0 } }, 0.3);
        assert_eq!(SymbolOperator::from_json(&h.to_json()).unwrap(), h);
        let x = op(OpKind::XL, 0.0);
        assert_eq!(SymbolOperator::from_json(&x.to_json()).unwrap(), x);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn linearity(a in -2.0f64..2.0, b in -2.0f64..2.0, x0 in -1.0f64..1.0) {
            let theta = 0.2;
            let s = GridSpec::centered(128, 128, 6.0, 6.0, theta).unwrap();
            let f = gauss(s, x0, 0.0, 0.3, 0.0);
            let g = gauss(s, 0.0, x0, 0.0, -0.4);
            for kind in [OpKind::XL, OpKind::TR, OpKind::Tc, OpKind::GalileanBoost { m: 1.0 }] {
                let o = op(kind, theta);
                let lhs = apply(&o, &f.scale(c(a, 0.0)).add(&g.scale(c(0.0, b)))).unwrap();
                let rhs = apply(&o, &f).unwrap().scale(c(a, 0.0)).add(&apply(&o, &g).unwrap().scale(c(0.0, b)));
                prop_assert!(lhs.sub(&rhs).max_norm() < 1e-10 * (1.0 + rhs.max_norm()));
            }
        }
    }
}
