//! Functional pairs `(Psi, Phi)` with `J = Psi - Phi`.
//!
//! Three families of `Psi` are supported: the Dirichlet energy
//! `1/2 int |grad u|^2`, the Schrodinger energy `1/2 int (|grad u|^2 + V u^2)`
//! on a radial grid, and the anisotropic energy `sum_i 1/p_i int |d_i u|^p_i`.
//! `Phi(u) = int a(x) G*(u)` always, with `G*` the truncated primitive of
//! the configured [`Nonlinearity`].

mod nonlinearity;

use serde::{Deserialize, Serialize};

pub use nonlinearity::{Family, Nonlinearity, Truncation};

use crate::error::{Error, Result};
use crate::grid::{
    add_axis_pnorm_gradient, axis_deriv_pnorm, build_grid, face_diff, h1_inner, Field, Grid, GridKind, GridSpec,
    Stiffness, RIESZ_TOL,
};
use crate::linalg::dot;

/// A scalar function of position, sampled onto the grid at model build time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFieldSpec {
    Constant {
        value: f64,
    },
    /// `(|x| + k1) / (|x| + k2)`.
    Ratio {
        k1: f64,
        k2: f64,
    },
    /// Explicit nodal values.
    Nodal {
        values: Vec<f64>,
    },
}

impl ScalarFieldSpec {
    pub fn sample(&self, grid: &Grid) -> Result<Field> {
        let field = match self {
            ScalarFieldSpec::Constant { value } => Field::new(vec![*value; grid.len()]),
            ScalarFieldSpec::Ratio { k1, k2 } => Field::new(
                (0..grid.len())
                    .map(|k| {
                        let r = grid.node_radius(k);
                        (r + k1) / (r + k2)
                    })
                    .collect(),
            ),
            ScalarFieldSpec::Nodal { values } => {
                grid.check(values)?;
                Field::new(values.clone())
            }
        };
        if !field.is_finite() {
            return Err(Error::InvalidModel("scalar field has non-finite values".into()));
        }
        Ok(field)
    }

    /// Analytic lower and upper bounds over the whole space, where known.
    fn bounds(&self) -> Option<(f64, f64)> {
        match self {
            ScalarFieldSpec::Constant { value } => Some((*value, *value)),
            ScalarFieldSpec::Ratio { k1, k2 } if *k2 > 0.0 && *k1 >= 0.0 => {
                let at_origin = k1 / k2;
                Some((at_origin.min(1.0), at_origin.max(1.0)))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiSpec {
    Semilinear,
    SchrodingerRadial {
        potential: ScalarFieldSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_inf: Option<f64>,
    },
    Anisotropic {
        exponents: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<ScalarFieldSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub grid: GridSpec,
    pub psi: PsiSpec,
    pub nonlinearity: NonlinearitySpec,
    /// Weight of the small-amplitude quotient `2F/t^2`; stored for eigenvalue checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ScalarFieldSpec>,
    /// Weight of the large-amplitude quotient `2F/t^2`; stored for eigenvalue checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<ScalarFieldSpec>,
}

#[derive(Debug, Clone)]
pub enum PsiKind {
    Semilinear,
    SchrodingerRadial { potential: Field, v0: f64, v_inf: f64 },
    Anisotropic { exponents: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct FunctionalModel {
    grid: Grid,
    psi: PsiKind,
    nonlinearity: Nonlinearity,
    coefficient: Field,
    alpha: Option<Field>,
    eta: Option<Field>,
    riesz: Stiffness,
}

pub fn make_model(spec: &ModelSpec) -> Result<FunctionalModel> {
    let grid = build_grid(&spec.grid)?;
    let psi = match &spec.psi {
        PsiSpec::Semilinear => PsiKind::Semilinear,
        PsiSpec::SchrodingerRadial { potential, v0, v_inf } => {
            if grid.kind() != GridKind::Radial {
                return Err(Error::InvalidModel(
                    "the Schrodinger energy requires a radial grid".into(),
                ));
            }
            let field = potential.sample(&grid)?;
            let analytic = potential.bounds();
            let v0 = v0.or(analytic.map(|b| b.0)).unwrap_or_else(|| field.min());
            let v_inf = v_inf
                .or(analytic.map(|b| b.1))
                .unwrap_or_else(|| field.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            if !(v0 > 0.0 && v_inf >= v0) {
                return Err(Error::InvalidModel(format!(
                    "potential bounds must satisfy 0 < V0 <= V_inf, got V0 = {v0}, V_inf = {v_inf}"
                )));
            }
            if let Some(k) = field.iter().position(|&v| v < v0 || v > v_inf) {
                return Err(Error::InvalidModel(format!(
                    "potential value {} at node {k} lies outside [{v0}, {v_inf}]",
                    field[k]
                )));
            }
            PsiKind::SchrodingerRadial {
                potential: field,
                v0,
                v_inf,
            }
        }
        PsiSpec::Anisotropic { exponents } => {
            if grid.kind() != GridKind::Rectangle {
                return Err(Error::InvalidModel(
                    "the anisotropic energy requires a rectangle grid".into(),
                ));
            }
            if exponents.len() != grid.axes() {
                return Err(Error::InvalidModel(format!(
                    "expected {} exponents, got {}",
                    grid.axes(),
                    exponents.len()
                )));
            }
            if exponents.iter().any(|&p| !(p > 1.0) || !p.is_finite()) {
                return Err(Error::InvalidModel("every exponent must exceed 1".into()));
            }
            if exponents.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidModel(format!(
                    "exponents must be ordered p_1 <= ... <= p_N, got {exponents:?}"
                )));
            }
            PsiKind::Anisotropic {
                exponents: exponents.clone(),
            }
        }
    };
    let nonlinearity = Nonlinearity::new(spec.nonlinearity.family.clone(), spec.nonlinearity.truncation)?;
    let coefficient = match &spec.nonlinearity.coefficient {
        Some(c) => c.sample(&grid)?,
        None => Field::new(vec![1.0; grid.len()]),
    };
    let alpha = spec.alpha.as_ref().map(|s| s.sample(&grid)).transpose()?;
    let eta = spec.eta.as_ref().map(|s| s.sample(&grid)).transpose()?;
    let weight = match &psi {
        PsiKind::SchrodingerRadial { potential, .. } => Some(potential.as_slice()),
        _ => None,
    };
    let riesz = Stiffness::new(&grid, weight)?;
    Ok(FunctionalModel {
        grid,
        psi,
        nonlinearity,
        coefficient,
        alpha,
        eta,
        riesz,
    })
}

impl FunctionalModel {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn psi_kind(&self) -> &PsiKind {
        &self.psi
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn coefficient(&self) -> &Field {
        &self.coefficient
    }

    pub fn alpha(&self) -> Option<&Field> {
        self.alpha.as_ref()
    }

    pub fn eta(&self) -> Option<&Field> {
        self.eta.as_ref()
    }

    /// Weight of the natural bilinear form: `V` for the Schrodinger energy.
    pub fn form_weight(&self) -> Option<&[f64]> {
        match &self.psi {
            PsiKind::SchrodingerRadial { potential, .. } => Some(potential.as_slice()),
            _ => None,
        }
    }

    /// Degree `q` with `Psi(tu) = t^q Psi(u)`, when `Psi` is homogeneous.
    pub fn homogeneity(&self) -> Option<f64> {
        match &self.psi {
            PsiKind::Semilinear | PsiKind::SchrodingerRadial { .. } => Some(2.0),
            PsiKind::Anisotropic { exponents } => {
                let p = exponents[0];
                exponents.iter().all(|&q| q == p).then_some(p)
            }
        }
    }

    /// Whether `|u|` never decreases `Phi`, so maximizers may be taken nonnegative.
    pub fn admits_symmetrization(&self) -> bool {
        self.nonlinearity.nondecreasing_primitive() && self.coefficient.iter().all(|&a| a >= 0.0)
    }

    pub fn psi(&self, u: &[f64]) -> f64 {
        match &self.psi {
            PsiKind::Semilinear => 0.5 * self.quad_form(u, u, None),
            PsiKind::SchrodingerRadial { potential, .. } => 0.5 * self.quad_form(u, u, Some(potential)),
            PsiKind::Anisotropic { exponents } => exponents
                .iter()
                .enumerate()
                .map(|(axis, &p)| axis_deriv_pnorm(&self.grid, u, axis, p).expect("checked exponents") / p)
                .sum(),
        }
    }

    /// Directional derivative `Psi'(u) v`, evaluated face by face.
    pub fn psi_dderiv(&self, u: &[f64], v: &[f64]) -> f64 {
        match &self.psi {
            PsiKind::Semilinear => self.quad_form(u, v, None),
            PsiKind::SchrodingerRadial { potential, .. } => self.quad_form(u, v, Some(potential)),
            PsiKind::Anisotropic { exponents } => {
                let mut acc = 0.0;
                for (axis, &p) in exponents.iter().enumerate() {
                    let inv_h = 1.0 / self.grid.spacing()[axis];
                    for face in self.grid.faces(axis) {
                        let du = face_diff(face, u, inv_h);
                        let dv = face_diff(face, v, inv_h);
                        acc += face.weight * du.abs().powf(p - 1.0).copysign(du) * dv;
                    }
                }
                acc
            }
        }
    }

    /// Regularised second derivative of an anisotropic `Psi` at `u`, used as
    /// a local metric; `None` for quadratic `Psi`, whose form is its own metric.
    pub(crate) fn psi_metric(&self, u: &[f64]) -> Result<Option<Stiffness>> {
        let PsiKind::Anisotropic { exponents } = &self.psi else {
            return Ok(None);
        };
        let mut scales = Vec::with_capacity(exponents.len());
        for (axis, &p) in exponents.iter().enumerate() {
            let inv_h = 1.0 / self.grid.spacing()[axis];
            let d: Vec<f64> = self.grid.faces(axis).iter().map(|f| face_diff(f, u, inv_h)).collect();
            let top = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let eps2 = (1e-8 * top).max(1e-300).powi(2);
            scales.push(
                d.iter()
                    .map(|x| (p - 1.0) * (x * x + eps2).powf(0.5 * (p - 2.0)))
                    .collect(),
            );
        }
        Stiffness::with_face_scales(&self.grid, &scales).map(Some)
    }

    /// Euclidean representative `g` with `<g, v> = Psi'(u) v`.
    pub fn psi_grad(&self, u: &[f64]) -> Vec<f64> {
        match &self.psi {
            PsiKind::Semilinear | PsiKind::SchrodingerRadial { .. } => self.riesz.mul(u),
            PsiKind::Anisotropic { exponents } => {
                let mut g = vec![0.0; u.len()];
                for (axis, &p) in exponents.iter().enumerate() {
                    add_axis_pnorm_gradient(&self.grid, u, axis, p, 1.0 / p, &mut g);
                }
                g
            }
        }
    }

    pub fn phi(&self, u: &[f64]) -> f64 {
        let nl = &self.nonlinearity;
        self.grid
            .quad_weights()
            .iter()
            .zip(self.coefficient.iter())
            .zip(u)
            .map(|((w, a), &t)| w * a * nl.big_f(t))
            .sum()
    }

    /// `Phi` computed with the untruncated profile.
    pub fn phi_untruncated(&self, u: &[f64]) -> f64 {
        let nl = &self.nonlinearity;
        self.grid
            .quad_weights()
            .iter()
            .zip(self.coefficient.iter())
            .zip(u)
            .map(|((w, a), &t)| w * a * nl.big_f_raw(t))
            .sum()
    }

    pub fn phi_dderiv(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(&self.phi_grad(u), v)
    }

    pub fn phi_dderiv_untruncated(&self, u: &[f64], v: &[f64]) -> f64 {
        let nl = &self.nonlinearity;
        self.grid
            .quad_weights()
            .iter()
            .zip(self.coefficient.iter())
            .zip(u.iter().zip(v))
            .map(|((w, a), (&t, s))| w * a * nl.f_raw(t) * s)
            .sum()
    }

    pub fn phi_grad(&self, u: &[f64]) -> Vec<f64> {
        let nl = &self.nonlinearity;
        self.grid
            .quad_weights()
            .iter()
            .zip(self.coefficient.iter())
            .zip(u)
            .map(|((w, a), &t)| w * a * nl.f(t))
            .collect()
    }

    /// `J(u) = Psi(u) - Phi(u)`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.psi(u) - self.phi(u)
    }

    /// Riesz representative of a Euclidean gradient in the model's natural form.
    pub fn riesz(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.riesz.solve(g, RIESZ_TOL, self.riesz.default_max_iter())
    }

    /// Dual norm of a Euclidean gradient in the model's natural form.
    pub fn dual_norm(&self, g: &[f64]) -> Result<f64> {
        let d = self.riesz(g)?;
        Ok(dot(g, &d).max(0.0).sqrt())
    }

    pub fn stiffness(&self) -> &Stiffness {
        &self.riesz
    }

    pub fn check(&self, u: &[f64]) -> Result<()> {
        self.grid.check(u)
    }

    fn quad_form(&self, u: &[f64], v: &[f64], weight: Option<&Field>) -> f64 {
        h1_inner(&self.grid, u, v, weight.map(|w| w.as_slice())).expect("conforming fields")
    }
}
