//! Ready-made specifications used throughout the examples and tests.

use std::sync::Arc;

use crate::model::{
    AccumulationPrimitive, CostPrimitive, DemandModel, DemandPrimitive, DerivBundle, ModelSpec,
};

/// Duopoly with linear demand (`B = 1`, `D = 0.5`), linear production cost
/// `c = 1`, quadratic advertising cost `alpha = 1`, `delta = 0.1`,
/// `rho = 0.05` and spillover `beta = 0.5`.
pub fn lq_spillover() -> ModelSpec {
    lq_duopoly(0.5)
}

/// [`lq_spillover`] without spillover (`beta = 0`). Its open-loop steady
/// state is unstable.
pub fn lq_no_spillover() -> ModelSpec {
    lq_duopoly(0.0)
}

fn lq_duopoly(beta: f64) -> ModelSpec {
    ModelSpec::new(
        2,
        0.05,
        0.1,
        DemandPrimitive::Lq { b: 1.0, d: 0.5 },
        CostPrimitive::Linear { slope: 1.0 },
        CostPrimitive::quadratic(1.0),
        AccumulationPrimitive::LinearSpillover { beta },
    )
    .expect("preset parameters are valid")
}

/// Duopoly with demand intercept `a = 2`, advertising cost `k + 20 k^2`
/// and no spillover. Its open-loop steady state `A = 1.25` is a saddle.
pub fn affine_saddle() -> ModelSpec {
    ModelSpec::new(
        2,
        0.05,
        0.1,
        DemandPrimitive::LqAffine {
            a: 2.0,
            b: 1.0,
            d: 0.5,
        },
        CostPrimitive::Linear { slope: 1.0 },
        CostPrimitive::LinearQuadratic {
            linear: 1.0,
            quadratic: 40.0,
        },
        AccumulationPrimitive::LinearSpillover { beta: 0.0 },
    )
    .expect("preset parameters are valid")
}

/// Demand with an own/rival output interaction:
///
/// `p = a + A - b q_i - h q_i^2 - d S + e q_i S`, with `S` the rivals' total
/// output.
///
/// At a symmetric output `q` the cross effect is `-d + 2 e q`, so with
/// `d / 2 < e q < d` outputs are strategic complements while
/// `p_qj = -d + e q` stays negative. With `3 h > 2 (n - 1) e` the symmetric
/// stage condition is strictly decreasing in `q`, so the stage equilibrium
/// is unique.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionDemand {
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub d: f64,
    pub e: f64,
}

impl InteractionDemand {
    fn rivals_total(n: usize, rival: f64, others: f64) -> f64 {
        if n >= 2 {
            rival + (n as f64 - 2.0) * others
        } else {
            0.0
        }
    }
}

impl DemandModel for InteractionDemand {
    fn price(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> f64 {
        let s = Self::rivals_total(n, rival, others);
        self.a + goodwill - self.b * own - self.h * own * own - self.d * s + self.e * own * s
    }

    fn partials(&self, n: usize, goodwill: f64, own: f64, rival: f64, others: f64) -> DerivBundle {
        let s = Self::rivals_total(n, rival, others);
        let has_rival = if n >= 2 { 1.0 } else { 0.0 };
        DerivBundle {
            p: self.price(n, goodwill, own, rival, others),
            p_a: 1.0,
            p_qi: -self.b - 2.0 * self.h * own + self.e * s,
            p_qj: has_rival * (-self.d + self.e * own),
            p_qiqi: -2.0 * self.h,
            p_qiqj: has_rival * self.e,
            p_qjqj: 0.0,
            p_aqi: 0.0,
        }
    }
}

/// Wraps [`InteractionDemand`] into a spillover-free spec with linear
/// production cost `c` and advertising cost `gamma1 k + sigma / 2 k^2`.
#[allow(clippy::too_many_arguments)]
pub fn interaction_spec(
    n: usize,
    demand: InteractionDemand,
    c: f64,
    gamma1: f64,
    sigma: f64,
    delta: f64,
    rho: f64,
) -> crate::Result<ModelSpec> {
    ModelSpec::new(
        n,
        rho,
        delta,
        DemandPrimitive::Plugin(Arc::new(demand)),
        CostPrimitive::Linear { slope: c },
        CostPrimitive::LinearQuadratic {
            linear: gamma1,
            quadratic: sigma,
        },
        AccumulationPrimitive::LinearSpillover { beta: 0.0 },
    )
}
