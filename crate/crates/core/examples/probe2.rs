// Scratch probe: residual profiles near startup (removed before shipping).
use stefan_core::*;

fn main() {
    let var = ProblemSpec::new(
        BoundaryCondition::Neumann { q: TimeFn::new(|t: f64| t.exp()) },
        Beta::variable(|x| 1.0 + x, Some("1+x".into())),
        1.0,
    )
    .unwrap();
    let (spec3, _) = builtin_example(ExampleId::Iii, None).unwrap();
    let (spec2, _) = builtin_example(ExampleId::Ii, None).unwrap();

    for (name, spec, guess) in [
        ("beta=1+x", &var, InitialGuess::FluxIntegral),
        ("example iii", &spec3, InitialGuess::LinearSlope { c: 1.0 }),
        ("example ii", &spec2, InitialGuess::LinearSlope { c: 1.0 }),
    ] {
        println!("== {name} ==");
        for n in [10usize, 20, 40, 80] {
            let disc = Discretization::new(n, n, 1.0).unwrap();
            let cfg = IterationConfig::new(1e-9, 500, OperatorConfig::default(), guess.clone())
                .unwrap();
            let report = run_iteration(spec, &disc, &cfg, None).unwrap();
            let res = stefan_residual_report(spec, &disc, report.final_curve()).unwrap();
            let rc = &res.residual_curve;
            // first six nodes
            let head: Vec<String> = rc.iter().take(6).map(|r| format!("{r:+.4}")).collect();
            // residual at fixed times 0.2, 0.5, 1.0
            let at = |t: f64| rc[disc.time_index(t)];
            // max over t >= 0.2
            let tail_max = (disc.time_index(0.2)..=disc.m())
                .map(|k| rc[k].abs())
                .fold(0.0f64, f64::max);
            println!(
                "  1/{n}: head={head:?} r(0.2)={:+.5} r(0.5)={:+.5} r(1)={:+.5} max_t>=0.2={:.5}",
                at(0.2),
                at(0.5),
                at(1.0),
                tail_max
            );
        }
    }
}
