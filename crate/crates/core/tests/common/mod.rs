//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use goodwill_game::lq::LqParams;
use goodwill_game::ModelSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Linear-family parameters with `D < B`. `affine` adds a demand intercept
/// and a linear advertising cost term; `spillover = false` pins `beta = 0`.
pub fn draw_lq(rng: &mut ChaCha8Rng, spillover: bool, affine: bool) -> LqParams {
    let b = rng.gen_range(0.5..2.0);
    let p = LqParams::new(
        rng.gen_range(2..=5),
        b,
        rng.gen_range(0.05..0.95) * b,
        if spillover {
            rng.gen_range(0.0..0.9)
        } else {
            0.0
        },
        rng.gen_range(0.5..60.0),
        rng.gen_range(0.05..0.3),
        rng.gen_range(0.01..0.1),
        rng.gen_range(0.5..2.0),
    );
    if affine {
        p.with_intercept(rng.gen_range(1.0..3.0) + p.c)
            .with_linear_ad_cost(rng.gen_range(0.0..2.0))
    } else {
        p
    }
}

/// Asymmetric stage game where firm 0 holds goodwill `a0` and the other
/// `n - 1` firms hold `a`. Returns `(q_0, q_rival)`.
///
/// Uses only price values: marginal revenue comes from central differences
/// of `price` and the two first-order conditions are solved by Newton's
/// method with a finite-difference Jacobian.
pub fn asymmetric_stage(spec: &ModelSpec, a0: f64, a: f64, guess: f64) -> (f64, f64) {
    let n = spec.n;
    let price =
        |g: f64, own: f64, rival: f64, others: f64| spec.demand.price(n, g, own, rival, others);
    let mc = |q: f64| spec.prod_cost.eval(q).d1;
    let foc = |x: f64, y: f64| {
        let h = 1e-4;
        let mr0 =
            price(a0, x, y, y) + x * (price(a0, x + h, y, y) - price(a0, x - h, y, y)) / (2.0 * h);
        let mr1 =
            price(a, y, x, y) + y * (price(a, y + h, x, y) - price(a, y - h, x, y)) / (2.0 * h);
        (mr0 - mc(x), mr1 - mc(y))
    };
    let (mut x, mut y) = (guess, guess);
    for _ in 0..50 {
        let (f0, f1) = foc(x, y);
        if f0.abs().max(f1.abs()) < 1e-13 {
            break;
        }
        let h = 1e-6;
        let (fx0, fx1) = foc(x + h, y);
        let (fy0, fy1) = foc(x, y + h);
        let (j00, j10) = ((fx0 - f0) / h, (fx1 - f1) / h);
        let (j01, j11) = ((fy0 - f0) / h, (fy1 - f1) / h);
        let det = j00 * j11 - j01 * j10;
        x -= (f0 * j11 - f1 * j01) / det;
        y -= (j00 * f1 - j10 * f0) / det;
    }
    (x, y)
}
