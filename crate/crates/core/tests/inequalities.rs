use sdl_core::distortion::{bourgain_embedding, pascal_planar_embedding, realized_distortion};
use sdl_core::families::{hanoi_graph, petersen_graph, standard_graph, Family, StandardKind};
use sdl_core::inequalities::{
    decay_fit, eq6_check, eq6_from_values, eq8_check, eq8_from_values, family_sweep, format_g,
    linear_fit, sweep_row, theorem3_check, to_csv, Inequality, InequalityError, SweepOptions,
    Theorem3Inputs, TheoremConstants,
};
use sdl_core::metric::{all_pairs_distances, diameter};
use sdl_core::spectral::{lambda1_p2_exact, Convention, VariationalOptions};
use sdl_core::volume::{rho_exact, rho_lower_ballcount};

#[test]
fn hexagon_worked_example() {
    let consts = TheoremConstants::new(2, 0.5, 2.0 / 3.0, 2.0).unwrap();
    assert!((consts.c() - 36.0f64).abs() < 1e-12);
    let r = theorem3_check(
        "C6",
        Theorem3Inputs {
            p: 2.0,
            eps: 0.5,
            lambda_eq3: 2.0,
            lambda_exact: true,
            rho: 2.0 / 3.0,
            k: 2,
            delta: 3,
            distortion: 1.5,
        },
    )
    .unwrap();
    assert!(r.pass && r.hard);
    assert!((r.rhs - 9.0f64).abs() < 1e-12);
    assert_eq!(r.lhs, 2.0);
    assert!(matches!(
        TheoremConstants::new(1, 0.5, 0.0f64, 2.0),
        Err(InequalityError::DegenerateRho)
    ));
}

#[test]
fn estimated_gaps_are_soft() {
    let r = theorem3_check(
        "x",
        Theorem3Inputs {
            p: 1.5,
            eps: 0.5,
            lambda_eq3: 1e6,
            lambda_exact: false,
            rho: 0.5,
            k: 3,
            delta: 4,
            distortion: 1.0,
        },
    )
    .unwrap();
    assert!(!r.pass);
    assert!(!r.hard);
    assert!(!r.failed());
}

#[test]
fn pascal_graphs_with_lattice_embedding() {
    for n in 1..=5 {
        let g = hanoi_graph(n).unwrap();
        let d = all_pairs_distances(&g).unwrap();
        let lambda = lambda1_p2_exact::<f64>(&g, Convention::Eq3).unwrap().lambda;
        let rho = if n <= 3 {
            rho_exact(&g, &d, 2.0 / 3.0).unwrap()
        } else {
            rho_lower_ballcount(&g, &d, 2.0 / 3.0).unwrap()
        };
        let e = pascal_planar_embedding::<f64>(n, 2.0).unwrap();
        let dist = realized_distortion(&d, &e).unwrap().realized;
        let r = theorem3_check(
            &format!("hanoi({n})"),
            Theorem3Inputs {
                p: 2.0,
                eps: 2.0 / 3.0,
                lambda_eq3: lambda,
                lambda_exact: true,
                rho: rho.to_f64(),
                k: g.max_degree(),
                delta: diameter(&d),
                distortion: dist,
            },
        )
        .unwrap();
        assert!(r.pass, "level {n}: {} > {}", r.lhs, r.rhs);
    }
}

#[test]
fn never_fails_on_family_graphs() {
    for family in Family::ALL {
        for level in 1..=5 {
            let Ok(g) = family.build(level) else { continue };
            let n = g.vertex_count();
            if !(3..=400).contains(&n) {
                continue;
            }
            let d = all_pairs_distances(&g).unwrap();
            let lambda = lambda1_p2_exact::<f64>(&g, Convention::Eq3).unwrap().lambda;
            let e = bourgain_embedding::<f64>(&g, &d, 2.0, 1);
            let dist = realized_distortion(&d, &e).unwrap().realized;
            for eps in [0.5, 2.0 / 3.0] {
                let rho = if n <= 40 {
                    rho_exact(&g, &d, eps).unwrap()
                } else {
                    rho_lower_ballcount(&g, &d, eps).unwrap()
                };
                if rho.degenerate {
                    continue;
                }
                let r = theorem3_check(
                    "g",
                    Theorem3Inputs {
                        p: 2.0,
                        eps,
                        lambda_eq3: lambda,
                        lambda_exact: true,
                        rho: rho.to_f64(),
                        k: g.max_degree(),
                        delta: diameter(&d),
                        distortion: dist,
                    },
                )
                .unwrap();
                assert!(r.pass, "{family}({level}) eps {eps}");
            }
        }
    }
}

#[test]
fn diameter_bound_examples() {
    let c6 = standard_graph(StandardKind::Cycle, 6).unwrap();
    let d = all_pairs_distances(&c6).unwrap();
    let r = eq6_check::<f64>("C6", &c6, &d).unwrap();
    assert!(r.pass);
    assert!((r.rhs - 4.0 * 6f64.log2()).abs() < 1e-9);
    let r = eq6_from_values::<f64>("K2", 1, 1, 2, 2.0);
    assert!((r.rhs - 2.0).abs() < 1e-12);
    assert!(r.pass);
    assert_eq!(r.inequality, Inequality::Eq6);
}

#[test]
fn adjacency_bound_examples() {
    let c5 = standard_graph(StandardKind::Cycle, 5).unwrap();
    let d = all_pairs_distances(&c5).unwrap();
    let r = eq8_check::<f64>("C5", &c5, &d).unwrap();
    assert_eq!(r.rhs, 7.0);
    assert!(r.pass);
    let g = petersen_graph();
    let d = all_pairs_distances(&g).unwrap();
    let r = eq8_check::<f64>("petersen", &g, &d).unwrap();
    assert_eq!(r.rhs, 6.0);
    assert!(r.pass);
    for g in [
        standard_graph(StandardKind::Cycle, 4).unwrap(),
        standard_graph(StandardKind::Hypercube, 3).unwrap(),
        standard_graph(StandardKind::Cycle, 10).unwrap(),
    ] {
        let d = all_pairs_distances(&g).unwrap();
        let err = eq8_check::<f64>("bip", &g, &d).unwrap_err();
        assert!(err.to_string().contains("bipartite-degenerate"));
    }
    let path = standard_graph(StandardKind::Path, 4).unwrap();
    let d = all_pairs_distances(&path).unwrap();
    assert!(eq8_check::<f64>("path", &path, &d).is_err());
    assert!(eq8_from_values::<f64>("tiny", 1, 2, 2, 1.0).is_err());
}

#[test]
fn fits() {
    let rows: Vec<(usize, f64)> = (1..=8).map(|n| (n, 7.0 * 0.2f64.powi(n as i32))).collect();
    let fit = decay_fit(&rows).unwrap();
    assert!((fit.base - 0.2).abs() < 1e-12);
    assert!(fit.ratios.iter().all(|r| (r - 0.2).abs() < 1e-12));
    let line = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
    assert!((line.slope - 2.0f64).abs() < 1e-12 && (line.intercept - 1.0f64).abs() < 1e-12);
    assert!(decay_fit(&rows[..2]).is_err());
    assert!(decay_fit(&[(1, 1.0), (2, 0.0), (3, 1.0)]).is_err());
}

#[test]
fn pascal_row() {
    let row = sweep_row::<f64>(Family::Hanoi, 3, &SweepOptions::default()).unwrap();
    assert_eq!((row.vertices, row.delta, row.k), (27, 7, 3));
    assert_eq!(row.thm3_pass, Some(true));
    assert!(row.eq6_pass);
    assert!(row.dist_ub_lattice.is_some() && row.dist_ub_bourgain.is_some());
    let lb = row.dist_lb.unwrap();
    assert!(lb <= row.dist_ub_lattice.unwrap() && lb <= row.dist_ub_bourgain.unwrap());
    assert!((row.lambda_p2_eq3 - 2.0 * row.lambda_p2_op).abs() < 1e-12);
}

#[test]
fn two_vertex_row_skips_the_volume_check() {
    let row = sweep_row::<f64>(Family::Grigorchuk, 1, &SweepOptions::default()).unwrap();
    assert_eq!(row.thm3_pass, None);
    assert!(row.rho[0].degenerate);
    assert_eq!(row.dist_lb, None);
}

#[test]
fn grigorchuk_decay() {
    let levels: Vec<usize> = (4..=10).collect();
    let rows = family_sweep::<f64>(Family::Grigorchuk, &levels, &SweepOptions::default()).unwrap();
    let fit = decay_fit(
        &rows
            .iter()
            .map(|r| (r.n, r.lambda_p2_op))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    for r in &fit.ratios {
        assert!((0.2..=0.3).contains(r), "{r}");
    }
    assert!(rows.iter().all(|r| r.eq6_pass));
}

#[test]
fn grigorchuk_gaps_shrink_for_every_exponent() {
    let opts = SweepOptions {
        ps: vec![1.0, 1.5, 2.0, 3.0],
        variational: VariationalOptions {
            restarts: 8,
            ..VariationalOptions::default()
        },
        ..SweepOptions::default()
    };
    let levels: Vec<usize> = (2..=6).collect();
    let rows = family_sweep::<f64>(Family::Grigorchuk, &levels, &opts).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].lambda_p2_eq3 < w[0].lambda_p2_eq3);
        for (a, b) in w[0].lambda_eq3.iter().zip(&w[1].lambda_eq3) {
            assert_eq!(a.0, b.0);
            assert!(b.1 < a.1, "p={} level {}: {} vs {}", a.0, w[1].n, b.1, a.1);
        }
    }
    let csv = to_csv(&rows, &opts);
    let header = csv.lines().next().unwrap();
    assert!(header.contains("lambda_p1_eq3,lambda_p1.5_eq3,lambda_p3_eq3"));
    assert_eq!(csv.lines().count(), rows.len() + 1);
}

#[test]
fn number_format() {
    assert_eq!(format_g(0.0), "0");
    assert_eq!(format_g(1.0), "1");
    assert_eq!(format_g(0.25), "0.25");
    assert_eq!(format_g(1.0 / 3.0), "0.333333333333");
    assert_eq!(format_g(123456.0), "123456");
    assert_eq!(format_g(1e-7), "1e-07");
    assert_eq!(format_g(2.5e13), "2.5e+13");
}

#[test]
fn csv_is_deterministic() {
    let opts = SweepOptions {
        epss: vec![0.5, 2.0 / 3.0],
        ..SweepOptions::default()
    };
    let a = to_csv(
        &family_sweep::<f64>(Family::Hanoi, &[1, 2, 3, 4], &opts).unwrap(),
        &opts,
    );
    let b = to_csv(
        &family_sweep::<f64>(Family::Hanoi, &[1, 2, 3, 4], &opts).unwrap(),
        &opts,
    );
    assert_eq!(a, b);
    assert!(a.starts_with("family,n,V,delta,k,lambda_p2_op,lambda_p2_eq3,rho_eps0.5,rho_eps0.666666666667,rho_method,"));
}
