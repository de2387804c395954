//! Model primitives: inverse demand, production and advertising costs,
//! goodwill accumulation, and the [`ModelSpec`] bundle that ties them to
//! the discount and depreciation rates.
//!
//! Every evaluator works on a symmetric profile or on a profile with one
//! distinguished rival: the firm itself sells `own`, one rival sells
//! `rival` and the remaining `n - 2` rivals sell `others` each. That is
//! enough to take every partial derivative the solvers consume, and it
//! keeps plugin implementations small.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Inverse demand and its partials at one evaluation point.
///
/// `qi` is the firm's own output and `qj` a single rival's output.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DerivBundle {
    pub p: f64,
    pub p_a: f64,
    pub p_qi: f64,
    pub p_qj: f64,
    pub p_qiqi: f64,
    pub p_qiqj: f64,
    pub p_qjqj: f64,
    pub p_aqi: f64,
}

impl DerivBundle {
    pub fn is_finite(&self) -> bool {
        [
            self.p,
            self.p_a,
            self.p_qi,
            self.p_qj,
            self.p_qiqi,
            self.p_qiqj,
            self.p_qjqj,
            self.p_aqi,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// `p_qj + p_qiqj * q`: negative for strategic substitutes, positive for
    /// complements.
    pub fn cross_effect(&self, q: f64) -> f64 {
        self.p_qj + self.p_qiqj * q
    }

    /// `p_A + p_Aqi * q`, positive under the goodwill/output condition.
    pub fn goodwill_effect(&self, q: f64) -> f64 {
        self.p_a + self.p_aqi * q
    }
}

/// User-supplied inverse demand.
pub trait DemandModel: Send + Sync + fmt::Debug {
    /// Own price when the firm sells `own`, one rival sells `rival` and the
    /// other `n - 2` rivals sell `others` each.
    fn price(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> f64;

    /// Analytic partials at the same point; `p_qj` and friends refer to the
    /// distinguished rival.
    fn partials(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> DerivBundle;
}

#[derive(Debug, Clone)]
pub enum DemandPrimitive {
    /// `p = A - B q_i - D sum_{j != i} q_j`
    Lq {
        b: f64,
        d: f64,
    },
    /// `p = a + A - B q_i - D sum_{j != i} q_j`
    LqAffine {
        a: f64,
        b: f64,
        d: f64,
    },
    Plugin(Arc<dyn DemandModel>),
}

impl DemandPrimitive {
    pub fn family(&self) -> &'static str {
        match self {
            DemandPrimitive::Lq { .. } => "lq",
            DemandPrimitive::LqAffine { .. } => "lq_affine",
            DemandPrimitive::Plugin(_) => "plugin",
        }
    }

    fn linear_coefficients(&self) -> Option<(f64, f64, f64)> {
        match *self {
            DemandPrimitive::Lq { b, d } => Some((0.0, b, d)),
            DemandPrimitive::LqAffine { a, b, d } => Some((a, b, d)),
            DemandPrimitive::Plugin(_) => None,
        }
    }

    pub fn price(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> f64 {
        match self.linear_coefficients() {
            Some((a, b, d)) => {
                let rivals = if n >= 2 {
                    rival + (n as f64 - 2.0) * others
                } else {
                    0.0
                };
                a + goodwill - b * own - d * rivals
            }
            None => match self {
                DemandPrimitive::Plugin(m) => m.price(n, goodwill, own, rival, others),
                _ => unreachable!(),
            },
        }
    }

    pub fn partials(
        &self,
        n: usize,
        goodwill: f64,
        own: f64,
        rival: f64,
        others: f64,
    ) -> DerivBundle {
        match self {
            DemandPrimitive::Plugin(m) => m.partials(n, goodwill, own, rival, others),
            _ => {
                let (_, b, d) = self.linear_coefficients().unwrap();
                DerivBundle {
                    p: self.price(n, goodwill, own, rival, others),
                    p_a: 1.0,
                    p_qi: -b,
                    p_qj: if n >= 2 { -d } else { 0.0 },
                    ..DerivBundle::default()
                }
            }
        }
    }

    /// Partials at the symmetric profile `(A, q, ..., q)`.
    pub fn symmetric(&self, n: usize, goodwill: f64, q: f64) -> DerivBundle {
        self.partials(n, goodwill, q, q, q)
    }

    fn validate(&self) -> Result<()> {
        if let Some((a, b, d)) = self.linear_coefficients() {
            positive("B", b)?;
            nonnegative("D", d)?;
            nonnegative("a", a)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostEval {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

pub trait CostModel: Send + Sync + fmt::Debug {
    fn eval(&self, x: f64) -> CostEval;
}

#[derive(Debug, Clone)]
pub enum CostPrimitive {
    /// `slope * x`
    Linear {
        slope: f64,
    },
    /// `linear * x + quadratic / 2 * x^2`
    LinearQuadratic {
        linear: f64,
        quadratic: f64,
    },
    Plugin(Arc<dyn CostModel>),
}

impl CostPrimitive {
    /// `alpha / 2 * k^2`
    pub fn quadratic(alpha: f64) -> Self {
        CostPrimitive::LinearQuadratic {
            linear: 0.0,
            quadratic: alpha,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CostPrimitive::Linear { .. } => "linear",
            CostPrimitive::LinearQuadratic { .. } => "linear_quadratic",
            CostPrimitive::Plugin(_) => "plugin",
        }
    }

    pub fn eval(&self, x: f64) -> CostEval {
        match self {
            CostPrimitive::Linear { slope } => CostEval {
                value: slope * x,
                d1: *slope,
                d2: 0.0,
            },
            CostPrimitive::LinearQuadratic { linear, quadratic } => CostEval {
                value: linear * x + 0.5 * quadratic * x * x,
                d1: linear + quadratic * x,
                d2: *quadratic,
            },
            CostPrimitive::Plugin(m) => m.eval(x),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            CostPrimitive::Linear { slope } => nonnegative("c", slope),
            CostPrimitive::LinearQuadratic { linear, quadratic } => {
                nonnegative("gamma1", linear)?;
                nonnegative("sigma", quadratic)
            }
            CostPrimitive::Plugin(_) => Ok(()),
        }
    }
}

/// Accumulation rate and partials at `(k, K)`, where `K` is the rivals'
/// total advertising.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AccumEval {
    pub value: f64,
    pub d_own: f64,
    pub d_rivals: f64,
    pub d_own_own: f64,
    pub d_own_rivals: f64,
}

impl AccumEval {
    /// `Gamma_k + (n - 1) Gamma_K`: slope along the symmetric ray.
    pub fn ray_slope(&self, n: usize) -> f64 {
        self.d_own + (n as f64 - 1.0) * self.d_rivals
    }

    /// `Gamma_kk + (n - 1) Gamma_kK`
    pub fn ray_curvature(&self, n: usize) -> f64 {
        self.d_own_own + (n as f64 - 1.0) * self.d_own_rivals
    }
}

pub trait AccumulationModel: Send + Sync + fmt::Debug {
    fn eval(&self, own: f64, rivals: f64) -> AccumEval;
}

#[derive(Debug, Clone)]
pub enum AccumulationPrimitive {
    /// `Gamma = k + beta * K`
    LinearSpillover {
        beta: f64,
    },
    Plugin(Arc<dyn AccumulationModel>),
}

impl AccumulationPrimitive {
    pub fn family(&self) -> &'static str {
        match self {
            AccumulationPrimitive::LinearSpillover { .. } => "linear_spillover",
            AccumulationPrimitive::Plugin(_) => "plugin",
        }
    }

    pub fn eval(&self, own: f64, rivals: f64) -> AccumEval {
        match self {
            AccumulationPrimitive::LinearSpillover { beta } => AccumEval {
                value: own + beta * rivals,
                d_own: 1.0,
                d_rivals: *beta,
                d_own_own: 0.0,
                d_own_rivals: 0.0,
            },
            AccumulationPrimitive::Plugin(m) => m.eval(own, rivals),
        }
    }

    fn validate(&self) -> Result<()> {
        if let AccumulationPrimitive::LinearSpillover { beta } = *self {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    reason: format!("must lie in [0, 1), got {beta}"),
                });
            }
        }
        Ok(())
    }
}

/// Admissible box for `(A, q, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub a_max: f64,
    pub q_max: f64,
    pub k_max: f64,
}

impl Bounds {
    pub fn new(a_max: f64, q_max: f64, k_max: f64) -> Result<Self> {
        positive("a_max", a_max)?;
        positive("q_max", q_max)?;
        positive("k_max", k_max)?;
        Ok(Bounds {
            a_max,
            q_max,
            k_max,
        })
    }

    /// `A_max = 100 * scale`, `q_max = A_max`, `k_max = 2 * delta * A_max`.
    pub fn default_for(scale: f64, delta: f64) -> Self {
        let a_max = 100.0 * scale.max(1.0);
        Bounds {
            a_max,
            q_max: a_max,
            k_max: 2.0 * delta * a_max,
        }
    }
}

/// The full game primitive bundle.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub n: usize,
    pub rho: f64,
    pub delta: f64,
    pub demand: DemandPrimitive,
    pub prod_cost: CostPrimitive,
    pub ad_cost: CostPrimitive,
    pub accumulation: AccumulationPrimitive,
    pub bounds: Bounds,
}

impl ModelSpec {
    /// Validates the parameters and attaches the default box, scaled by the
    /// marginal production cost at zero output.
    pub fn new(
        n: usize,
        rho: f64,
        delta: f64,
        demand: DemandPrimitive,
        prod_cost: CostPrimitive,
        ad_cost: CostPrimitive,
        accumulation: AccumulationPrimitive,
    ) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "at least one firm is required".into(),
            });
        }
        positive("rho", rho)?;
        positive("delta", delta)?;
        demand.validate()?;
        prod_cost.validate()?;
        ad_cost.validate()?;
        accumulation.validate()?;
        let scale = prod_cost.eval(0.0).d1;
        let scale = if scale.is_finite() { scale } else { 1.0 };
        Ok(ModelSpec {
            n,
            rho,
            delta,
            demand,
            prod_cost,
            ad_cost,
            accumulation,
            bounds: Bounds::default_for(scale, delta),
        })
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub(crate) fn rivals(&self) -> f64 {
        self.n as f64 - 1.0
    }

    pub fn check_goodwill(&self, goodwill: f64) -> Result<()> {
        if !(goodwill >= 0.0) {
            return Err(Error::Domain(format!("A = {goodwill} is below 0")));
        }
        if goodwill > self.bounds.a_max {
            return Err(Error::Domain(format!(
                "A = {goodwill} exceeds A_max = {}",
                self.bounds.a_max
            )));
        }
        Ok(())
    }

    pub fn check_output(&self, q: f64) -> Result<()> {
        if !(q >= 0.0) {
            return Err(Error::Domain(format!("q = {q} is below 0")));
        }
        if q > self.bounds.q_max {
            return Err(Error::Domain(format!(
                "q = {q} exceeds q_max = {}",
                self.bounds.q_max
            )));
        }
        Ok(())
    }

    /// Accumulation on the symmetric ray `(k, (n - 1) k)`.
    pub fn accumulation_on_ray(&self, k: f64) -> AccumEval {
        self.accumulation.eval(k, self.rivals() * k)
    }

    /// True when `Gamma_K` vanishes on the admissible box.
    ///
    /// Plugins are probed on a 9 x 9 grid.
    pub fn is_spillover_free(&self) -> bool {
        match &self.accumulation {
            AccumulationPrimitive::LinearSpillover { beta } => *beta == 0.0,
            AccumulationPrimitive::Plugin(m) => {
                let k_max = self.bounds.k_max;
                let rivals_max = self.rivals().max(1.0) * k_max;
                (0..9).all(|i| {
                    (0..9).all(|j| {
                        let k = k_max * i as f64 / 8.0;
                        let big_k = rivals_max * j as f64 / 8.0;
                        m.eval(k, big_k).d_rivals.abs() <= 1e-14
                    })
                })
            }
        }
    }

    /// One-line canonical description; stable across runs.
    pub fn digest(&self) -> String {
        let demand = match &self.demand {
            DemandPrimitive::Lq { b, d } => format!("lq(B={b},D={d})"),
            DemandPrimitive::LqAffine { a, b, d } => format!("lq_affine(a={a},B={b},D={d})"),
            DemandPrimitive::Plugin(m) => format!("plugin({m:?})"),
        };
        let cost = |c: &CostPrimitive| match c {
            CostPrimitive::Linear { slope } => format!("linear(c={slope})"),
            CostPrimitive::LinearQuadratic { linear, quadratic } => {
                format!("linear_quadratic(gamma1={linear},sigma={quadratic})")
            }
            CostPrimitive::Plugin(m) => format!("plugin({m:?})"),
        };
        let accumulation = match &self.accumulation {
            AccumulationPrimitive::LinearSpillover { beta } => {
                format!("linear_spillover(beta={beta})")
            }
            AccumulationPrimitive::Plugin(m) => format!("plugin({m:?})"),
        };
        format!(
            "n={} rho={} delta={} demand={} prod_cost={} ad_cost={} accumulation={} box=[{},{},{}]",
            self.n,
            self.rho,
            self.delta,
            demand,
            cost(&self.prod_cost),
            cost(&self.ad_cost),
            accumulation,
            self.bounds.a_max,
            self.bounds.q_max,
            self.bounds.k_max
        )
    }
}

/// Demand value and partials at the symmetric profile `(A, q, ..., q)`.
///
/// Fails with a domain error when `(A, q)` leaves the admissible box.
pub fn eval_demand_bundle(spec: &ModelSpec, goodwill: f64, q: f64) -> Result<DerivBundle> {
    spec.check_goodwill(goodwill)?;
    spec.check_output(q)?;
    Ok(spec.demand.symmetric(spec.n, goodwill, q))
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {value}"),
        })
    }
}

fn nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be nonnegative and finite, got {value}"),
        })
    }
}
