//! Click-probability ("quality") models `q(p, p_min)`.
//!
//! Every model is non-increasing in the agent's own price `p`, non-decreasing
//! in the minimum displayed price `p_min`, and maps into `[0, 1]`. Models are
//! only defined for `p >= p_min`; evaluating below the displayed minimum is a
//! domain error.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::FD_STEP;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QualityModel {
    /// `level` when the agent shows the minimum displayed price (and, if
    /// capped, `p <= cap`); zero otherwise.
    OnlyMin {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<f64>,
        #[serde(default = "one")]
        level: f64,
    },
    /// Depends on the agent's own price only: `level` when `p <= threshold`
    /// (`p < threshold` if `strict`), zero above.
    PriceThreshold {
        threshold: f64,
        #[serde(default = "one")]
        level: f64,
        #[serde(default)]
        strict: bool,
    },
    /// Only-min model whose level on the diagonal is 1 below `floor`, follows
    /// a decreasing hyperbola from 1 at `floor` to `delta` at `cap`, and is
    /// zero above `cap`.
    PsiHyperbola { floor: f64, cap: f64, delta: f64 },
    /// `clamp(intercept - slope * p, 0, 1) * exp(-decay * (p - p_min))`.
    SmoothDecay {
        intercept: f64,
        slope: f64,
        #[serde(default)]
        decay: f64,
    },
    /// Piecewise-constant table. `values[a][b]` is `q(prices[a], prices[b])`
    /// for `b <= a`; off-sample arguments snap down to the nearest sample.
    Tabulated { prices: Vec<f64>, values: Vec<Vec<f64>> },
}

/// The hyperbola `psi` on `[floor, cap]`, with the endpoints pinned to exactly
/// 1 and `delta`.
pub fn psi(floor: f64, cap: f64, delta: f64, price: f64) -> f64 {
    if price == floor {
        return 1.0;
    }
    if price == cap {
        return delta;
    }
    let half = (1.0 + delta) / 2.0;
    (1.0 + delta) * (cap - floor) / ((1.0 - half) * price + half * cap - floor) - 1.0
}

fn psi_derivative(floor: f64, cap: f64, delta: f64, price: f64) -> f64 {
    let half = (1.0 + delta) / 2.0;
    let slope = 1.0 - half;
    let denom = slope * price + half * cap - floor;
    -(1.0 + delta) * (cap - floor) * slope / (denom * denom)
}

impl QualityModel {
    pub fn only_min(cap: Option<f64>, level: f64) -> Self {
        QualityModel::OnlyMin { cap, level }
    }

    pub fn price_threshold(threshold: f64, level: f64) -> Self {
        QualityModel::PriceThreshold { threshold, level, strict: false }
    }

    pub fn psi_hyperbola(floor: f64, cap: f64, delta: f64) -> Self {
        QualityModel::PsiHyperbola { floor, cap, delta }
    }

    pub fn smooth_decay(intercept: f64, slope: f64, decay: f64) -> Self {
        QualityModel::SmoothDecay { intercept, slope, decay }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            QualityModel::OnlyMin { .. } => "only-min",
            QualityModel::PriceThreshold { .. } => "price-threshold",
            QualityModel::PsiHyperbola { .. } => "psi-hyperbola",
            QualityModel::SmoothDecay { .. } => "smooth-decay",
            QualityModel::Tabulated { .. } => "tabulated",
        }
    }

    /// Checks parameter ranges and table shape. Monotonicity of tabulated
    /// models is checked separately by [`audit_quality`].
    pub fn validate(&self, path: &str) -> Result<()> {
        let finite = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{path}.{name}"), "must be finite"))
            }
        };
        let level_ok = |v: f64| -> Result<()> {
            finite("level", v)?;
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{path}.level"), format!("{v} not in [0, 1]")));
            }
            Ok(())
        };
        match self {
            QualityModel::OnlyMin { cap, level } => {
                level_ok(*level)?;
                if let Some(c) = cap {
                    finite("cap", *c)?;
                    if *c < 0.0 {
                        return Err(Error::invalid(format!("{path}.cap"), "must be >= 0"));
                    }
                }
            }
            QualityModel::PriceThreshold { threshold, level, .. } => {
                level_ok(*level)?;
                finite("threshold", *threshold)?;
                if *threshold < 0.0 {
                    return Err(Error::invalid(format!("{path}.threshold"), "must be >= 0"));
                }
            }
            QualityModel::PsiHyperbola { floor, cap, delta } => {
                finite("floor", *floor)?;
                finite("cap", *cap)?;
                finite("delta", *delta)?;
                if !(*floor >= 0.0 && floor < cap) {
                    return Err(Error::invalid(
                        format!("{path}.floor"),
                        format!("need 0 <= floor < cap, got floor = {floor}, cap = {cap}"),
                    ));
                }
                if !(*delta > 0.0 && *delta < 1.0) {
                    return Err(Error::invalid(format!("{path}.delta"), format!("{delta} not in (0, 1)")));
                }
            }
            QualityModel::SmoothDecay { intercept, slope, decay } => {
                finite("intercept", *intercept)?;
                finite("slope", *slope)?;
                finite("decay", *decay)?;
                if *slope < 0.0 {
                    return Err(Error::invalid(format!("{path}.slope"), "must be >= 0"));
                }
                if *decay < 0.0 {
                    return Err(Error::invalid(format!("{path}.decay"), "must be >= 0"));
                }
            }
            QualityModel::Tabulated { prices, values } => {
                if prices.is_empty() {
                    return Err(Error::invalid(format!("{path}.prices"), "must not be empty"));
                }
                for (a, w) in prices.windows(2).enumerate() {
                    if !(w[0] < w[1]) {
                        return Err(Error::invalid(
                            format!("{path}.prices[{}]", a + 1),
                            "sample prices must be strictly ascending",
                        ));
                    }
                }
                if prices[0] < 0.0 || !prices.iter().all(|p| p.is_finite()) {
                    return Err(Error::invalid(format!("{path}.prices"), "must be finite and >= 0"));
                }
                if values.len() != prices.len() {
                    return Err(Error::invalid(
                        format!("{path}.values"),
                        format!("expected {} rows, got {}", prices.len(), values.len()),
                    ));
                }
                for (a, row) in values.iter().enumerate() {
                    if row.len() != a + 1 {
                        return Err(Error::invalid(
                            format!("{path}.values[{a}]"),
                            format!("row {a} must hold {} entries (p_min <= p)", a + 1),
                        ));
                    }
                    for (b, v) in row.iter().enumerate() {
                        if !(0.0..=1.0).contains(v) {
                            return Err(Error::invalid(
                                format!("{path}.values[{a}][{b}]"),
                                format!("{v} not in [0, 1]"),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `q(price, min_price)`; errors when `price < min_price`.
    pub fn evaluate(&self, price: f64, min_price: f64) -> Result<f64> {
        if price < min_price {
            return Err(Error::QualityDomain { price, min_price });
        }
        Ok(self.eval_unchecked(price, min_price))
    }

    pub(crate) fn eval_unchecked(&self, price: f64, min_price: f64) -> f64 {
        match *self {
            QualityModel::OnlyMin { cap, level } => {
                if price == min_price && cap.map_or(true, |c| price <= c) {
                    level
                } else {
                    0.0
                }
            }
            QualityModel::PriceThreshold { threshold, level, strict } => {
                let inside = if strict { price < threshold } else { price <= threshold };
                if inside {
                    level
                } else {
                    0.0
                }
            }
            QualityModel::PsiHyperbola { floor, cap, delta } => {
                if price != min_price || price > cap {
                    0.0
                } else if price <= floor {
                    1.0
                } else {
                    psi(floor, cap, delta, price)
                }
            }
            QualityModel::SmoothDecay { intercept, slope, decay } => {
                let base = (intercept - slope * price).clamp(0.0, 1.0);
                base * (-decay * (price - min_price)).exp()
            }
            QualityModel::Tabulated { ref prices, ref values } => {
                let a = snap_down(prices, price);
                let b = snap_down(prices, min_price).min(a);
                values[a][b]
            }
        }
    }

    /// `q(p, p)`: the quality when the agent shows the minimum price.
    pub fn diagonal(&self, price: f64) -> f64 {
        self.eval_unchecked(price, price)
    }

    /// Points where the diagonal map is not differentiable.
    fn diagonal_kinks(&self) -> Vec<f64> {
        match *self {
            QualityModel::OnlyMin { cap, .. } => cap.into_iter().collect(),
            QualityModel::PriceThreshold { threshold, .. } => vec![threshold],
            QualityModel::PsiHyperbola { floor, cap, .. } => vec![floor, cap],
            QualityModel::SmoothDecay { intercept, slope, .. } => {
                if slope > 0.0 {
                    vec![intercept / slope, (intercept - 1.0) / slope]
                } else {
                    Vec::new()
                }
            }
            QualityModel::Tabulated { ref prices, .. } => prices.clone(),
        }
    }

    /// Derivative of `p -> q(p, p)`. Analytic for every parametric kind;
    /// tabulated models fall back to a central finite difference.
    pub fn diagonal_derivative(&self, price: f64) -> Result<f64> {
        if !price.is_finite() || price < 0.0 {
            return Err(Error::NotDifferentiable { price });
        }
        if let QualityModel::Tabulated { .. } = self {
            return self.diagonal_derivative_numeric(price);
        }
        if self.diagonal_kinks().iter().any(|k| (price - k).abs() < FD_STEP) {
            return Err(Error::NotDifferentiable { price });
        }
        Ok(match *self {
            QualityModel::OnlyMin { .. } | QualityModel::PriceThreshold { .. } => 0.0,
            QualityModel::PsiHyperbola { floor, cap, delta } => {
                if price > floor && price < cap {
                    psi_derivative(floor, cap, delta, price)
                } else {
                    0.0
                }
            }
            QualityModel::SmoothDecay { intercept, slope, .. } => {
                let base = intercept - slope * price;
                if base > 0.0 && base < 1.0 {
                    -slope
                } else {
                    0.0
                }
            }
            QualityModel::Tabulated { .. } => unreachable!(),
        })
    }

    /// Central finite difference of the diagonal with step [`FD_STEP`].
    pub fn diagonal_derivative_numeric(&self, price: f64) -> Result<f64> {
        if price - FD_STEP < 0.0 {
            return Err(Error::NotDifferentiable { price });
        }
        let up = self.diagonal(price + FD_STEP);
        let down = self.diagonal(price - FD_STEP);
        Ok((up - down) / (2.0 * FD_STEP))
    }
}

fn snap_down(samples: &[f64], x: f64) -> usize {
    match samples.partition_point(|s| *s <= x) {
        0 => 0,
        k => k - 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    OutOfRange,
    IncreasingInPrice,
    DecreasingInMinPrice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `(p, p_min)` of the offending evaluation.
    pub at: (f64, f64),
    pub value: f64,
    /// The neighbouring probe it was compared against, for monotonicity breaks.
    pub against: Option<((f64, f64), f64)>,
    /// Table cell `(row, column)` of `at` for tabulated models.
    pub cell: Option<(usize, usize)>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, pm) = self.at;
        match self.kind {
            ViolationKind::OutOfRange => write!(f, "q({p}, {pm}) = {} outside [0, 1]", self.value)?,
            ViolationKind::IncreasingInPrice | ViolationKind::DecreasingInMinPrice => {
                let ((p0, pm0), v0) = self.against.unwrap_or(((f64::NAN, f64::NAN), f64::NAN));
                let what = if self.kind == ViolationKind::IncreasingInPrice {
                    "increases in p"
                } else {
                    "decreases in p_min"
                };
                write!(f, "q {what}: q({p0}, {pm0}) = {v0} but q({p}, {pm}) = {}", self.value)?;
            }
        }
        if let Some((r, c)) = self.cell {
            write!(f, " at cell [{r}][{c}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// All pairs `(p, p_min)` with `p_min <= p` drawn from `prices`.
pub fn probe_grid(prices: &[f64]) -> Vec<(f64, f64)> {
    let mut probes = Vec::new();
    for &p in prices {
        for &pm in prices {
            if pm <= p {
                probes.push((p, pm));
            }
        }
    }
    probes
}

/// `probe_grid` over `points` evenly spaced samples of `[lo, hi]`.
pub fn dense_probe_grid(lo: f64, hi: f64, points: usize) -> Vec<(f64, f64)> {
    let steps = points.max(2) - 1;
    let prices: Vec<f64> = (0..=steps).map(|k| lo + (hi - lo) * k as f64 / steps as f64).collect();
    probe_grid(&prices)
}

const AUDIT_TOL: f64 = 1e-12;

/// Checks range and both monotonicity directions on the probe pairs. Probes
/// with `p < p_min` are outside the domain and skipped.
pub fn audit_quality(model: &QualityModel, probes: &[(f64, f64)]) -> AuditReport {
    let cell_of = |p: f64, pm: f64| match model {
        QualityModel::Tabulated { prices, .. } => {
            let a = snap_down(prices, p);
            Some((a, snap_down(prices, pm).min(a)))
        }
        _ => None,
    };
    let mut report = AuditReport::default();
    let mut by_min: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut by_price: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for &(p, pm) in probes {
        if p < pm {
            continue;
        }
        let v = model.eval_unchecked(p, pm);
        if !(0.0..=1.0).contains(&v) {
            report.violations.push(Violation {
                kind: ViolationKind::OutOfRange,
                at: (p, pm),
                value: v,
                against: None,
                cell: cell_of(p, pm),
            });
        }
        by_min.entry(pm.to_bits()).or_default().push((p, v));
        by_price.entry(p.to_bits()).or_default().push((pm, v));
    }
    for (pm_bits, mut row) in by_min {
        let pm = f64::from_bits(pm_bits);
        row.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in row.windows(2) {
            if w[1].1 > w[0].1 + AUDIT_TOL {
                report.violations.push(Violation {
                    kind: ViolationKind::IncreasingInPrice,
                    at: (w[1].0, pm),
                    value: w[1].1,
                    against: Some(((w[0].0, pm), w[0].1)),
                    cell: cell_of(w[1].0, pm),
                });
            }
        }
    }
    for (p_bits, mut col) in by_price {
        let p = f64::from_bits(p_bits);
        col.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in col.windows(2) {
            if w[1].1 < w[0].1 - AUDIT_TOL {
                report.violations.push(Violation {
                    kind: ViolationKind::DecreasingInMinPrice,
                    at: (p, w[1].0),
                    value: w[1].1,
                    against: Some(((p, w[0].0), w[0].1)),
                    cell: cell_of(p, w[1].0),
                });
            }
        }
    }
    report
}

/// Audits a tabulated model on its own sample grid; other kinds on `prices`.
pub fn audit_on_grid(model: &QualityModel, prices: &[f64]) -> AuditReport {
    match model {
        QualityModel::Tabulated { prices: samples, .. } => audit_quality(model, &probe_grid(samples)),
        _ => audit_quality(model, &probe_grid(prices)),
    }
}
