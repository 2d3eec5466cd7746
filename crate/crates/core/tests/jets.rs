use folia::{Jet2, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random expression over three variables; every node stays smooth and
/// bounded on `[-1, 1]^3`.
#[derive(Clone, Debug)]
enum Expr {
    Var(usize),
    Const(f64),
    Add(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    SqrtOnePlusSq(Box<Expr>),
    DivShifted(Box<Expr>, Box<Expr>),
}

fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expr::Var(rng.gen_range(0..3))
        } else {
            Expr::Const(rng.gen_range(-2.0..2.0))
        };
    }
    let op = rng.gen_range(0..7);
    let mut sub = || Box::new(random_expr(rng, depth - 1));
    match op {
        0 => Expr::Add(sub(), sub()),
        1 => Expr::Mul(sub(), sub()),
        2 => Expr::Sin(sub()),
        3 => Expr::Cos(sub()),
        4 => Expr::Exp(sub()),
        5 => Expr::SqrtOnePlusSq(sub()),
        _ => Expr::DivShifted(sub(), sub()),
    }
}

fn eval<S: Scalar>(e: &Expr, x: &[S]) -> S {
    match e {
        Expr::Var(i) => x[*i],
        Expr::Const(c) => S::from(*c),
        Expr::Add(a, b) => eval(a, x) + eval(b, x),
        Expr::Mul(a, b) => eval(a, x) * eval(b, x),
        Expr::Sin(a) => eval(a, x).sin(),
        Expr::Cos(a) => eval(a, x).cos(),
        Expr::Exp(a) => (eval(a, x).sin() * 0.5).exp(),
        Expr::SqrtOnePlusSq(a) => {
            let v = eval(a, x);
            (v * v + 1.0).sqrt()
        }
        Expr::DivShifted(a, b) => eval(a, x) / (eval(b, x).cos() + 2.0),
    }
}

fn f64_at(e: &Expr, p: [f64; 3]) -> f64 {
    eval::<f64>(e, &p)
}

/// Central differences with one Richardson step, `O(h⁴)` accurate.
#[test]
fn jets_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h1 = 1e-3;
    let h2 = 4e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let e = random_expr(&mut rng, 4);
        let p: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let jet = eval::<Jet2>(&e, &Jet2::seed(&p));
        let scale = 1.0 + jet.v.abs();
        assert!((jet.v - f64_at(&e, p)).abs() <= 1e-14 * scale);
        let shift = |i: usize, s: f64| {
            let mut q = p;
            q[i] += s;
            q
        };
        for i in 0..3 {
            let d1 = |h: f64| (f64_at(&e, shift(i, h)) - f64_at(&e, shift(i, -h))) / (2.0 * h);
            let fd = (4.0 * d1(h1 / 2.0) - d1(h1)) / 3.0;
            let err = (jet.g[i] - fd).abs() / (1.0 + jet.g[i].abs());
            worst = worst.max(err);
            for j in 0..3 {
                let at = |si: f64, sj: f64| {
                    let mut q = p;
                    q[i] += si;
                    q[j] += sj;
                    f64_at(&e, q)
                };
                let d2 = |h: f64| (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
                let fd2 = (4.0 * d2(h2 / 2.0) - d2(h2)) / 3.0;
                let err = (jet.h[i][j] - fd2).abs() / (1.0 + jet.h[i][j].abs());
                worst = worst.max(err);
                assert!((jet.h[i][j] - jet.h[j][i]).abs() <= 1e-14 * (1.0 + jet.h[i][j].abs()));
            }
        }
    }
    assert!(worst < 1e-6, "worst relative deviation {worst:e}");
}
