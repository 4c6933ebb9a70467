//! Shared generators for the integration and acceptance suites. Everything
//! is driven by a seeded SplitMix64 so runs are reproducible.

#![allow(dead_code)]

use fjkkt::expr::{evaluate, fd_directional, gradient, Elementary, Expr, Point};
use fjkkt::linalg::LinFunc;
use fjkkt::rational::{rat, Rat};
use fjkkt::rng::SplitMix64;

/// Rational with numerator in `-max_num..=max_num` and denominator in
/// `1..=max_den`.
pub fn rand_rat(rng: &mut SplitMix64, max_num: i64, max_den: i64) -> Rat {
    rat(rng.range_i64(-max_num, max_num), rng.range_i64(1, max_den))
}

pub fn rand_linfunc(rng: &mut SplitMix64, dim: usize, max_num: i64, max_den: i64) -> LinFunc {
    LinFunc::new((0..dim).map(|_| rand_rat(rng, max_num, max_den)).collect())
}

pub fn rand_nonzero_linfunc(
    rng: &mut SplitMix64,
    dim: usize,
    max_num: i64,
    max_den: i64,
) -> LinFunc {
    loop {
        let f = rand_linfunc(rng, dim, max_num, max_den);
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn var_names(n: usize) -> Vec<String> {
    ["x", "y", "z", "u", "v"][..n]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Random expression over `vars` with the given depth budget. All node
/// kinds can appear; domain safety is the caller's job (rejection).
pub fn gen_expr(rng: &mut SplitMix64, vars: &[String], depth: usize) -> Expr {
    if depth == 0 {
        return match rng.index(3) {
            0 => Expr::Constant(rng.range_i64(1, 40) as f64 / 8.0),
            _ => Expr::Variable(vars[rng.index(vars.len())].clone()),
        };
    }
    let sub = |rng: &mut SplitMix64| Box::new(gen_expr(rng, vars, depth - 1));
    match rng.index(12) {
        0 | 1 => Expr::Add(sub(rng), sub(rng)),
        2 => Expr::Sub(sub(rng), sub(rng)),
        3 | 4 => Expr::Mul(sub(rng), sub(rng)),
        5 => Expr::Div(sub(rng), sub(rng)),
        6 => Expr::Negate(sub(rng)),
        7 => {
            let exponent = *[-2, -1, 2, 3].get(rng.index(4)).unwrap();
            Expr::IntPow(sub(rng), exponent)
        }
        8 => Expr::Func(Elementary::Sin, sub(rng)),
        9 => Expr::Func(Elementary::Cos, sub(rng)),
        10 => Expr::Func(Elementary::Exp, sub(rng)),
        _ => {
            let f = if rng.index(2) == 0 {
                Elementary::Log
            } else {
                Elementary::Sqrt
            };
            Expr::Func(f, sub(rng))
        }
    }
}

/// Generic points with coordinates in roughly `[0.7, 1.5]`.
pub fn gen_point(rng: &mut SplitMix64, vars: &[String]) -> Point {
    Point::new(
        vars.iter()
            .map(|v| (v.clone(), 0.7 + 0.8 * rng.next_f64())),
    )
    .unwrap()
}

/// Accept an expression only if it is well-behaved at `points`: every
/// evaluation, dual-number gradient, and +-h finite-difference evaluation
/// succeeds, with values bounded by 1e3 and derivatives by 1e4. The filter
/// never compares the two derivative routes; that is the test's job.
pub fn expr_is_tame(e: &Expr, points: &[Point], h: f64) -> bool {
    for p in points {
        let Ok(value) = evaluate(e, p) else {
            return false;
        };
        if value.abs() > 1e3 {
            return false;
        }
        let Ok(grad) = gradient(e, p) else {
            return false;
        };
        if grad.iter().any(|g| g.abs() > 1e4) {
            return false;
        }
        let n = p.dim();
        let mut direction = vec![0.0; n];
        for k in 0..n {
            direction[k] = 1.0;
            match fd_directional(e, p, &direction, h) {
                Ok(fd) if fd.abs() <= 1e4 => {}
                _ => return false,
            }
            // The shifted evaluations must stay bounded too, or cancellation
            // noise swamps the comparison.
            let Ok(plus) = p.shifted(&direction, h) else {
                return false;
            };
            let Ok(minus) = p.shifted(&direction, -h) else {
                return false;
            };
            match (evaluate(e, &plus), evaluate(e, &minus)) {
                (Ok(a), Ok(b)) if a.abs() <= 1e3 && b.abs() <= 1e3 => {}
                _ => return false,
            }
            direction[k] = 0.0;
        }
    }
    true
}

/// Corpus of tame expressions with their sample points.
pub fn build_corpus(
    seed: u64,
    count: usize,
    points_each: usize,
) -> Vec<(Expr, Vec<Point>)> {
    let mut rng = SplitMix64::new(seed);
    let mut corpus = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while corpus.len() < count {
        attempts += 1;
        assert!(
            attempts < 100_000,
            "expression generator failed to produce a tame corpus"
        );
        let nvars = 1 + rng.index(3);
        let vars = var_names(nvars);
        let depth = 2 + rng.index(3);
        let candidate = gen_expr(&mut rng, &vars, depth);
        let points: Vec<Point> = (0..points_each).map(|_| gen_point(&mut rng, &vars)).collect();
        if expr_is_tame(&candidate, &points, 1e-5) {
            corpus.push((candidate, points));
        }
    }
    corpus
}

/// Count which node kinds appear in an expression (13 kinds).
pub fn node_kinds(e: &Expr, seen: &mut [bool; 13]) {
    match e {
        Expr::Constant(_) => seen[0] = true,
        Expr::Variable(_) => seen[1] = true,
        Expr::Negate(a) => {
            seen[2] = true;
            node_kinds(a, seen);
        }
        Expr::Add(a, b) => {
            seen[3] = true;
            node_kinds(a, seen);
            node_kinds(b, seen);
        }
        Expr::Sub(a, b) => {
            seen[4] = true;
            node_kinds(a, seen);
            node_kinds(b, seen);
        }
        Expr::Mul(a, b) => {
            seen[5] = true;
            node_kinds(a, seen);
            node_kinds(b, seen);
        }
        Expr::Div(a, b) => {
            seen[6] = true;
            node_kinds(a, seen);
            node_kinds(b, seen);
        }
        Expr::IntPow(a, _) => {
            seen[7] = true;
            node_kinds(a, seen);
        }
        Expr::Func(f, a) => {
            seen[match f {
                Elementary::Sin => 8,
                Elementary::Cos => 9,
                Elementary::Exp => 10,
                Elementary::Log => 11,
                Elementary::Sqrt => 12,
            }] = true;
            node_kinds(a, seen);
        }
    }
}
