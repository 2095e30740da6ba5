// Scratch calibration probe (removed before shipping).
use stefan_core::*;

fn converge(spec: &ProblemSpec, n: usize, guess: InitialGuess) -> (Discretization, IterationReport) {
    let disc = Discretization::new(n, n, 1.0).unwrap();
    let cfg = IterationConfig::new(1e-8, 400, OperatorConfig::default(), guess).unwrap();
    let report = run_iteration(spec, &disc, &cfg, None).unwrap();
    (disc, report)
}

fn main() {
    // Criterion 8a: example iii residual decay
    let (spec3, _) = builtin_example(ExampleId::Iii, None).unwrap();
    println!("== example iii residuals ==");
    for n in [10usize, 20, 40] {
        let (disc, report) = converge(&spec3, n, InitialGuess::LinearSlope { c: 1.0 });
        let res = stefan_residual_report(&spec3, &disc, report.final_curve()).unwrap();
        let curve = report.final_curve();
        // locate the max node
        let (argmax, max) = res
            .residual_curve
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, r)| if r.abs() > acc.1 { (i, r.abs()) } else { acc });
        println!(
            "  1/{n}: conv={} iters={} max|r|={max:.5} at node {argmax}/{}; r1={:.4} r2={:.4} rM={:.4}; s1={:.5} s2={:.5}",
            report.converged,
            report.iterations(),
            disc.m(),
            res.residual_curve[1],
            res.residual_curve[2],
            res.residual_curve[disc.m()],
            curve.get(1),
            curve.get(2),
        );
    }

    // Criterion 8b: beta = 1+x Neumann
    let var = ProblemSpec::new(
        BoundaryCondition::Neumann { q: TimeFn::new(|t: f64| t.exp()) },
        Beta::variable(|x| 1.0 + x, Some("1+x".into())),
        1.0,
    )
    .unwrap();
    println!("== beta=1+x Neumann residuals ==");
    for n in [10usize, 20, 40] {
        let (disc, report) = converge(&var, n, InitialGuess::FluxIntegral);
        let res = stefan_residual_report(&var, &disc, report.final_curve()).unwrap();
        let (argmax, max) = res
            .residual_curve
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, r)| if r.abs() > acc.1 { (i, r.abs()) } else { acc });
        println!(
            "  1/{n}: conv={} iters={} max|r|={max:.5} at node {argmax}/{}",
            report.converged,
            report.iterations(),
            disc.m()
        );
    }

    // Criterion 3: fixed-point front accuracy
    println!("== front accuracy vs exact ==");
    for id in [ExampleId::I, ExampleId::Ii] {
        let (spec, _) = builtin_example(id, None).unwrap();
        let mut errs = Vec::new();
        for n in [20usize, 40] {
            let (disc, report) = converge(&spec, n, InitialGuess::LinearSlope { c: 0.5 });
            let worst: f64 = (0..=disc.m())
                .map(|k| (report.final_curve().get(k) - disc.time(k)).abs())
                .fold(0.0, f64::max);
            errs.push(worst);
            println!("  {id} 1/{n}: iters={} max|s - t|={worst:.6}", report.iterations());
        }
        println!("  {id} improvement 20->40: {:.2}x", errs[0] / errs[1]);
    }

    // Criterion 2: error bands at 1/10
    println!("== E at t=1, dxi=1/10 ==");
    for id in [ExampleId::I, ExampleId::Ii] {
        let (spec, exact) = builtin_example(id, None).unwrap();
        let exact = exact.unwrap();
        let (disc, report) = converge(&spec, 10, InitialGuess::LinearSlope { c: 1.0 });
        let field = solve_fixed_boundary(&spec, &disc, report.final_curve()).unwrap();
        let e = error_ekn(&field, report.final_curve(), &exact, disc.m(), &disc).unwrap();
        println!("  {id}: E = {e:.6e}");
    }

    // Criteria 4/5: reversal and sandwich margins at 1/20
    println!("== reversal margins (tol_rev = 5(dxi^2+dt^2) = {:.4}) ==", 5.0 * 2.0 / 400.0);
    let disc = Discretization::new(20, 20, 1.0).unwrap();
    let pairs: Vec<(f64, Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>)> = vec![
        (1.0, Box::new(|t| 0.5 * t), Box::new(|t| t)),
        (2.0, Box::new(|t| 0.5 * t), Box::new(|t| 0.8 * t)),
        (3.0, Box::new(|t| t), Box::new(|t| 1.3 * t)),
        (4.0, Box::new(|t: f64| 0.6 * t.powf(1.1)), Box::new(|t| 1.1 * t)),
        (5.0, Box::new(|t| 0.9 * t), Box::new(|t| 0.9 * t + 0.3 * t * t)),
    ];
    for id in [ExampleId::I, ExampleId::Ii] {
        let (spec, _) = builtin_example(id, None).unwrap();
        for (k, low, high) in &pairs {
            let s1 = BoundaryCurve::sample(&disc, low);
            let s2 = BoundaryCurve::sample(&disc, high);
            let r1 = apply_r(&spec, &disc, &s1).unwrap();
            let r2 = apply_r(&spec, &disc, &s2).unwrap();
            let worst: f64 = (0..=disc.m())
                .map(|n| r2.get(n) - r1.get(n)) // should be <= 0 (+tol)
                .fold(f64::MIN, f64::max);
            println!("  {id} pair {k}: max(R(s2)-R(s1)) = {worst:.5}");
        }
    }

    println!("== sandwich at s=0.5t (example ii) ==");
    let (spec2, _) = builtin_example(ExampleId::Ii, None).unwrap();
    let s = BoundaryCurve::sample(&disc, |t| 0.5 * t);
    let star = BoundaryCurve::sample(&disc, |t| t);
    let r = apply_r(&spec2, &disc, &s).unwrap();
    let p = apply_p(&OperatorConfig::default(), &r, &s).unwrap();
    let mut worst_lo = f64::MIN;
    let mut worst_hi = f64::MIN;
    for n in 0..=disc.m() {
        let lo = 0.5 * (s.get(n) - star.get(n)) - (p.get(n) - star.get(n)); // <= 0 want
        let hi = (p.get(n) - star.get(n)) - 0.5 * (r.get(n) - star.get(n)); // <= 0 want
        worst_lo = worst_lo.max(lo);
        worst_hi = worst_hi.max(hi);
    }
    println!("  lower violation {worst_lo:.6}, upper violation {worst_hi:.6}");

    // Criterion 1 preview: chained orders
    println!("== study orders ==");
    for id in [ExampleId::I, ExampleId::Ii] {
        let (spec, exact) = builtin_example(id, None).unwrap();
        let exact = exact.unwrap();
        let cfg = IterationConfig::new(
            1e-6,
            200,
            OperatorConfig::default(),
            InitialGuess::LinearSlope { c: 1.0 },
        )
        .unwrap();
        let rows =
            refinement_study(&spec, &exact, &StudyConfig::first_levels(5).unwrap(), &cfg).unwrap();
        print!("  {id}: ");
        for row in &rows {
            print!(
                "E={:.3e} p={} it={}; ",
                row.error,
                row.order.map(|p| format!("{p:.3}")).unwrap_or_else(|| "-".into()),
                row.iterations
            );
        }
        println!();
    }
}
