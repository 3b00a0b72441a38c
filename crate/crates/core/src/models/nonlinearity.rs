//! Nonlinear source terms `f(x, t)` and their truncated primitives `F*(x, t)`.
//!
//! Each family is evaluated as `a(x) * g(t)` where `a` is a nodal coefficient
//! field (identically one unless configured) and `g` is the family profile.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `f(t) = lambda t`.
    Linear { lambda: f64 },
    /// `f(t) = |t|^(p-2) t`.
    Power { p: f64 },
    /// `f(t) = log(t + 1) (2 + cos t) t` for `t > 0`, zero otherwise.
    LogCos,
    /// Piecewise-linear `f` through `(t[i], f[i])`, held constant outside the table.
    Tabulated { t: Vec<f64>, f: Vec<f64> },
}

/// How `f` is modified for negative arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// `f*(x, t) = f(x, 0)` for `t < 0`.
    FreezeAtZero,
    /// `f*(x, t) = 0` for `t < 0`.
    #[default]
    ZeroBelow,
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    family: Family,
    truncation: Truncation,
    growth_exponent: f64,
    // cumulative integral of a tabulated profile at its knots
    table_primitive: Vec<f64>,
}

impl Nonlinearity {
    pub fn new(family: Family, truncation: Truncation) -> Result<Self> {
        let growth_exponent = match &family {
            Family::Linear { lambda } => {
                finite("lambda", *lambda)?;
                2.0
            }
            Family::Power { p } => {
                if !(*p > 1.0) || !p.is_finite() {
                    return Err(Error::InvalidModel(format!("power exponent must exceed 1, got {p}")));
                }
                *p
            }
            // F(t) ~ t^2 log t at infinity
            Family::LogCos => 2.0,
            Family::Tabulated { t, f } => {
                if t.len() < 2 || t.len() != f.len() {
                    return Err(Error::InvalidModel(
                        "tabulated nonlinearity needs at least two (t, f) pairs of equal length".into(),
                    ));
                }
                if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().chain(f).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidModel(
                        "tabulated abscissae must be finite and strictly increasing".into(),
                    ));
                }
                2.0
            }
        };
        let table_primitive = match &family {
            Family::Tabulated { t, f } => tabulated_primitive(t, f),
            _ => Vec::new(),
        };
        Ok(Self {
            family,
            truncation,
            growth_exponent,
            table_primitive,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn growth_exponent(&self) -> f64 {
        self.growth_exponent
    }

    /// Untruncated profile `g(t)`.
    pub fn f_raw(&self, t: f64) -> f64 {
        match &self.family {
            Family::Linear { lambda } => lambda * t,
            Family::Power { p } => t.abs().powf(p - 1.0).copysign(t),
            Family::LogCos => {
                if t > 0.0 {
                    logcos(t)
                } else {
                    0.0
                }
            }
            Family::Tabulated { t: ts, f } => interp_linear(ts, f, t),
        }
    }

    /// Untruncated primitive `G(t) = int_0^t g`.
    pub fn big_f_raw(&self, t: f64) -> f64 {
        match &self.family {
            Family::Linear { lambda } => 0.5 * lambda * t * t,
            Family::Power { p } => t.abs().powf(*p) / p,
            Family::LogCos => {
                if t > 0.0 {
                    logcos_table().primitive(t)
                } else {
                    0.0
                }
            }
            Family::Tabulated { t: ts, f } => {
                let at = |s: f64| tabulated_integral(ts, f, &self.table_primitive, s);
                at(t) - at(0.0)
            }
        }
    }

    /// Truncated profile `g*(t)`.
    pub fn f(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.f_raw(t)
        } else {
            match self.truncation {
                Truncation::FreezeAtZero => self.f_raw(0.0),
                Truncation::ZeroBelow => 0.0,
            }
        }
    }

    /// Truncated primitive `G*(t)`.
    pub fn big_f(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.big_f_raw(t)
        } else {
            match self.truncation {
                Truncation::FreezeAtZero => self.f_raw(0.0) * t,
                Truncation::ZeroBelow => 0.0,
            }
        }
    }

    /// True when `g*` is nonnegative on `[0, inf)`, so that `G*` is
    /// nondecreasing there and `G*(-t) <= G*(t)`.
    pub fn nondecreasing_primitive(&self) -> bool {
        match &self.family {
            Family::Linear { lambda } => *lambda >= 0.0,
            Family::Power { .. } | Family::LogCos => true,
            Family::Tabulated { t, f } => self.f_raw(0.0) >= 0.0 && t.iter().zip(f).all(|(t, f)| *t < 0.0 || *f >= 0.0),
        }
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidModel(format!("{name} must be finite")))
    }
}

fn interp_linear(ts: &[f64], fs: &[f64], t: f64) -> f64 {
    let n = ts.len();
    if t <= ts[0] {
        return fs[0];
    }
    if t >= ts[n - 1] {
        return fs[n - 1];
    }
    let k = ts.partition_point(|&x| x <= t) - 1;
    let s = (t - ts[k]) / (ts[k + 1] - ts[k]);
    fs[k] + s * (fs[k + 1] - fs[k])
}

fn tabulated_primitive(ts: &[f64], fs: &[f64]) -> Vec<f64> {
    let mut acc = vec![0.0; ts.len()];
    for k in 1..ts.len() {
        acc[k] = acc[k - 1] + 0.5 * (fs[k] + fs[k - 1]) * (ts[k] - ts[k - 1]);
    }
    acc
}

/// Exact integral of the piecewise-linear profile from `ts[0]` to `t`.
fn tabulated_integral(ts: &[f64], fs: &[f64], prim: &[f64], t: f64) -> f64 {
    let n = ts.len();
    if t <= ts[0] {
        return fs[0] * (t - ts[0]);
    }
    if t >= ts[n - 1] {
        return prim[n - 1] + fs[n - 1] * (t - ts[n - 1]);
    }
    let k = ts.partition_point(|&x| x <= t) - 1;
    let ft = interp_linear(ts, fs, t);
    prim[k] + 0.5 * (fs[k] + ft) * (t - ts[k])
}

#[inline]
fn logcos(t: f64) -> f64 {
    t.ln_1p() * (2.0 + t.cos()) * t
}

// 8-point Gauss-Legendre rule on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        s += w * (f(mid - half * x) + f(mid + half * x));
    }
    s * half
}

/// Primitive of the log-cos profile: cumulative values at the knots, plus a
/// Gauss-Legendre integral over the partial cell.
struct LogCosTable {
    step: f64,
    values: Vec<f64>,
}

const LOGCOS_STEP: f64 = 1.0 / 8.0;
const LOGCOS_TMAX: f64 = 65536.0;

fn logcos_table() -> &'static LogCosTable {
    static TABLE: OnceLock<LogCosTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let cells = (LOGCOS_TMAX / LOGCOS_STEP) as usize;
        let mut values = Vec::with_capacity(cells + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for k in 0..cells {
            let a = k as f64 * LOGCOS_STEP;
            acc += gauss_legendre(logcos, a, a + LOGCOS_STEP);
            values.push(acc);
        }
        LogCosTable {
            step: LOGCOS_STEP,
            values,
        }
    })
}

impl LogCosTable {
    fn primitive(&self, t: f64) -> f64 {
        let last = self.values.len() - 1;
        let t_end = last as f64 * self.step;
        if t >= t_end {
            // beyond the table: integrate the tail directly in unit panels
            let mut acc = self.values[last];
            let mut a = t_end;
            while a < t {
                let b = (a + 1.0).min(t);
                acc += gauss_legendre(logcos, a, b);
                a = b;
            }
            return acc;
        }
        let k = ((t / self.step) as usize).min(last - 1);
        let t0 = k as f64 * self.step;
        self.values[k] + gauss_legendre(logcos, t0, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
        let left = (m - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + m)) + f(m));
        let right = (b - m) / 6.0 * (f(m) + 4.0 * f(0.5 * (m + b)) + f(b));
        if depth == 0 || (left + right - whole).abs() < 1e-15 * whole.abs().max(1.0) {
            left + right + (left + right - whole) / 15.0
        } else {
            adaptive_simpson(f, a, m, depth - 1) + adaptive_simpson(f, m, b, depth - 1)
        }
    }

    #[test]
    fn logcos_primitive_matches_independent_quadrature() {
        let nl = Nonlinearity::new(Family::LogCos, Truncation::ZeroBelow).unwrap();
        for t in [1e-3, 0.37, 1.0, 2.5, 7.3, 19.9, 63.99, 70.5, 517.3] {
            let reference = adaptive_simpson(&logcos, 0.0, t, 40);
            assert_relative_eq!(nl.big_f(t), reference, max_relative = 1e-10);
        }
    }

    #[test]
    fn truncation_modes() {
        let tab = Family::Tabulated {
            t: vec![-1.0, 0.0, 1.0],
            f: vec![-3.0, 2.0, 4.0],
        };
        let freeze = Nonlinearity::new(tab.clone(), Truncation::FreezeAtZero).unwrap();
        let zero = Nonlinearity::new(tab, Truncation::ZeroBelow).unwrap();
        assert_eq!(freeze.f(-0.5), 2.0);
        assert_eq!(freeze.big_f(-0.5), -1.0);
        assert_eq!(zero.f(-0.5), 0.0);
        assert_eq!(zero.big_f(-0.5), 0.0);
        // int_0^0.5 (2 + 2s) ds = 1.25
        assert_relative_eq!(zero.big_f(0.5), 1.25, epsilon = 1e-15);
        assert_relative_eq!(zero.big_f(2.0), 3.0 + 4.0, epsilon = 1e-15);
    }

    #[test]
    fn primitives_are_nondecreasing_on_positive_axis() {
        let families = [
            Family::Linear { lambda: 3.0 },
            Family::Power { p: 4.0 },
            Family::Power { p: 2.5 },
            Family::LogCos,
        ];
        for fam in families {
            let nl = Nonlinearity::new(fam, Truncation::ZeroBelow).unwrap();
            assert!(nl.nondecreasing_primitive());
            let mut prev = nl.big_f(0.0);
            for k in 1..2000 {
                let v = nl.big_f(k as f64 * 0.05);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn continuous_at_zero_when_f0_vanishes() {
        for fam in [Family::Power { p: 3.0 }, Family::LogCos, Family::Linear { lambda: 2.0 }] {
            let nl = Nonlinearity::new(fam, Truncation::ZeroBelow).unwrap();
            assert!((nl.f(1e-12) - nl.f(-1e-12)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_families() {
        assert!(Nonlinearity::new(Family::Power { p: 1.0 }, Truncation::ZeroBelow).is_err());
        assert!(Nonlinearity::new(
            Family::Tabulated {
                t: vec![0.0, 0.0],
                f: vec![1.0, 1.0]
            },
            Truncation::ZeroBelow
        )
        .is_err());
    }
}
