#![allow(dead_code)]

use std::f64::consts::PI;

use bernlat::function::{ModulusSpec, BOUNDARY_TOLERANCE};
use bernlat::FunctionSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Member {
    pub name: String,
    pub spec: FunctionSpec,
    /// Has a Lipschitz modulus with a positive constant.
    pub lipschitz: bool,
}

fn member(text: &str, modulus: ModulusSpec) -> Member {
    let lipschitz = matches!(modulus, ModulusSpec::Lipschitz { constant, .. } if constant > 0.0);
    let spec = FunctionSpec::from_expr(text, BOUNDARY_TOLERANCE)
        .and_then(|f| f.with_modulus(modulus))
        .unwrap_or_else(|e| panic!("{text}: {e}"));
    Member { name: text.to_string(), spec, lipschitz }
}

pub const RANDOM_SEED: u64 = 0x5EED_2026;

/// `a + (b - a) x + sum_j c_j sin(j pi x)` with integer `a`, `b`.
pub fn random_members(count: usize, seed: u64) -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: i64 = rng.gen_range(-3..=3);
            let b: i64 = rng.gen_range(-3..=3);
            let mut text = format!("{a} + ({})*x", b - a);
            let mut lip = (b - a).abs() as f64;
            for j in 1..=3 {
                let c = (rng.gen_range(-1.0f64..=1.0) * 1000.0).round() / 1000.0;
                text.push_str(&format!(" + ({c})*sin({j}*pi*x)"));
                lip += c.abs() * j as f64 * PI;
            }
            // Slightly inflated so that rounding in the constant never
            // undercuts the true Lipschitz constant.
            member(&text, ModulusSpec::lipschitz(lip * (1.0 + 1e-12)))
        })
        .collect()
}

/// The twelve-member test corpus.
pub fn corpus() -> Vec<Member> {
    let mut out = vec![
        member("sin(pi*x)", ModulusSpec::Lipschitz { constant: PI, cap: Some(2.0) }),
        member("x*(1-x)", ModulusSpec::lipschitz(1.0)),
        member("3-2*x", ModulusSpec::lipschitz(2.0)),
        member("min(x, 1-x)", ModulusSpec::lipschitz(1.0)),
        member("sqrt(x)*(1-x)", ModulusSpec::hoelder(2.5, 0.5)),
        member("2", ModulusSpec::lipschitz(0.0)),
    ];
    out.extend(random_members(6, RANDOM_SEED));
    out
}

pub fn sine() -> FunctionSpec {
    corpus().remove(0).spec
}
