use super::*;
use crate::grid::{Family, FamilyDescriptor, relative_error, synthesize};
use crate::oracle::{OracleRequest, oracle_eval};

fn grid1(l: f64, cells: usize) -> GridSpec {
    GridSpec::new(1, l, cells).unwrap()
}

fn chi(spec: GridSpec) -> GridFunction {
    synthesize(spec, &chi_family()).unwrap()
}

fn chi_family() -> FamilyDescriptor {
    FamilyDescriptor::new(Family::BallIndicator { center: vec![0.0], radius: 1.0, height: 1.0 })
}

fn at(f: &GridFunction, x: f64) -> f64 {
    f.values()[f.spec().nearest_cell(&[x])]
}

fn all_ops() -> Vec<OperatorSpec> {
    vec![
        OperatorSpec::Maximal,
        OperatorSpec::SharpMaximal,
        OperatorSpec::FracMaximal { alpha: 0.3 },
        OperatorSpec::riesz(0.4),
        OperatorSpec::Riesz { alpha: 0.4, self_cell: SelfCell::Drop },
        OperatorSpec::HardyLower { alpha: 0.0 },
        OperatorSpec::HardyLower { alpha: 0.6 },
        OperatorSpec::HardyUpper { alpha: 0.0 },
        OperatorSpec::HardyUpper { alpha: 0.6 },
        OperatorSpec::HybridK { beta: 0.5 },
        OperatorSpec::HybridCalK { beta: 0.5 },
    ]
}

#[test]
fn json_shape() {
    let op: OperatorSpec = serde_json::from_str(r#"{"kind": "riesz", "alpha": 0.5}"#).unwrap();
    assert_eq!(op, OperatorSpec::riesz(0.5));
    let op: OperatorSpec = serde_json::from_str(r#"{"kind": "hardy_upper"}"#).unwrap();
    assert_eq!(op, OperatorSpec::HardyUpper { alpha: 0.0 });
    let s = OperatorSpec::TruncatedSingular { kernel: "hilbert1d".into(), epsilon: 0.1 };
    let back: OperatorSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
    assert!(serde_json::from_str::<OperatorSpec>(r#"{"kind": "riesz", "alpha": 0.5, "beta": 1}"#).is_err());
    assert!(serde_json::from_str::<OperatorSpec>(r#"{"kind": "maximal", "alpha": 1}"#).is_err());
    assert_eq!(serde_json::from_str::<OperatorSpec>(r#"{"kind": "maximal"}"#).unwrap(), OperatorSpec::Maximal);
}

#[test]
fn parameter_ranges() {
    let g = grid1(4.0, 64);
    assert!(OperatorSpec::riesz(0.0).validate(&g).is_err());
    assert!(OperatorSpec::riesz(1.0).validate(&g).is_err());
    assert!(OperatorSpec::HardyLower { alpha: 0.0 }.validate(&g).is_ok());
    assert!(OperatorSpec::HardyUpper { alpha: 1.0 }.validate(&g).is_err());
    assert!(OperatorSpec::HybridK { beta: 1.0 }.validate(&g).is_ok());
    assert!(OperatorSpec::HybridCalK { beta: 0.0 }.validate(&g).is_err());
    assert!(OperatorSpec::FracMaximal { alpha: 1.0 }.validate(&g).is_err());
    let eps = |e| OperatorSpec::TruncatedSingular { kernel: "hilbert1d".into(), epsilon: e };
    assert!(eps(g.spacing()).validate(&g).is_ok());
    assert!(eps(0.5 * g.spacing()).validate(&g).is_err());
    let two = GridSpec::new(2, 4.0, 16).unwrap();
    assert!(eps(1.0).validate(&two).is_err());
    let unknown = OperatorSpec::TruncatedSingular { kernel: "nope".into(), epsilon: 1.0 };
    assert!(unknown.validate(&g).is_err());
}

#[test]
fn zero_in_zero_out() {
    let spec = grid1(4.0, 128);
    let z = GridFunction::zeros(spec);
    let ladder = RadiusLadder::covering(&spec);
    let mut ops = all_ops();
    ops.push(OperatorSpec::TruncatedSingular { kernel: "hilbert1d".into(), epsilon: 0.1 });
    for op in ops {
        let out = apply(&z, &op, &ladder, &Engine::default()).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0), "{}", op.label());
    }
}

#[test]
fn averages_of_constants() {
    let spec = GridSpec::new(2, 2.0, 32).unwrap();
    let ladder = RadiusLadder::covering(&spec);
    let one = GridFunction::constant(spec, 1.0);
    assert!(maximal(&one, &ladder).unwrap().values().iter().all(|&v| v == 1.0));
    let c = GridFunction::constant(spec, -3.25);
    assert!(sharp_maximal(&c, &ladder).unwrap().values().iter().all(|&v| v == 0.0));
    let fft = maximal_with(&one, &ladder, &Engine::fft()).unwrap();
    assert!(fft.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn frac_maximal_at_zero_is_maximal() {
    let spec = grid1(4.0, 256);
    let f = GridFunction::from_fn(spec, |x| (3.0 * x[0]).sin()).unwrap();
    let ladder = RadiusLadder::covering(&spec);
    assert_eq!(frac_maximal(&f, 0.0, &ladder).unwrap(), maximal(&f, &ladder).unwrap());
}

#[test]
fn sharp_maximal_of_indicator_matches_oracle_at_origin() {
    let spec = grid1(8.0, 1024);
    let g = chi(spec);
    let ladder = RadiusLadder::covering(&spec);
    let fast = sharp_maximal(&g, &ladder).unwrap();
    let o = oracle_eval(&g, &OracleRequest::operator(OperatorSpec::SharpMaximal).with_ladder(ladder)).unwrap();
    let x = spec.nearest_cell(&[0.0]);
    assert!((fast.values()[x] - o.values()[x]).abs() <= 1e-12 * o.values()[x]);
}

#[test]
fn fast_paths_agree_with_oracle() {
    let s1 = grid1(4.0, 256);
    let s2 = GridSpec::new(2, 2.0, 16).unwrap();
    for spec in [s1, s2] {
        let f = GridFunction::from_fn(spec, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (-r2).exp() * (1.0 + x[0]).cos() - 0.2
        })
        .unwrap();
        let ladder = RadiusLadder::covering(&spec);
        for op in all_ops() {
            let want = oracle_eval(&f, &OracleRequest::operator(op.clone()).with_ladder(ladder)).unwrap();
            for engine in [Engine::direct(), Engine::fft()] {
                let got = apply(&f, &op, &ladder, &engine).unwrap();
                let err = relative_error(got.values(), want.values());
                assert!(err <= 1e-10, "{} dim {}: {err}", op.label(), spec.dim());
            }
        }
    }
}

#[test]
fn singular_agrees_with_oracle() {
    let spec = grid1(4.0, 256);
    let f = GridFunction::from_fn(spec, |x| (-(x[0] - 0.3).powi(2)).exp()).unwrap();
    for kernel in ["hilbert1d", "riesz1"] {
        let op = OperatorSpec::TruncatedSingular { kernel: kernel.into(), epsilon: 0.05 };
        let got = apply(&f, &op, &RadiusLadder::covering(&spec), &Engine::default()).unwrap();
        let want = oracle_eval(&f, &OracleRequest::operator(op)).unwrap();
        assert!(relative_error(got.values(), want.values()) <= 1e-10);
    }
    let s2 = GridSpec::new(2, 2.0, 16).unwrap();
    let g = GridFunction::from_fn(s2, |x| (x[0] - 0.1).exp() * (x[1] * x[1] + 0.3)).unwrap();
    let op = OperatorSpec::TruncatedSingular { kernel: "riesz1".into(), epsilon: 0.3 };
    let got = apply(&g, &op, &RadiusLadder::covering(&s2), &Engine::default()).unwrap();
    let want = oracle_eval(&g, &OracleRequest::operator(op)).unwrap();
    assert!(relative_error(got.values(), want.values()) <= 1e-10);
}

#[test]
fn maximal_of_indicator_at_two() {
    let spec = grid1(8.0, 4096);
    let ladder = RadiusLadder::covering(&spec);
    let m = at(&maximal(&chi(spec), &ladder).unwrap(), 2.0);
    let h = spec.spacing();
    assert!(m <= 1.0 / 3.0 + 2.0 * h, "{m}");
    assert!(m >= 1.0 / (3.0 * ladder.ratio) - 2.0 * h, "{m}");
}

#[test]
fn frac_maximal_of_indicator_at_origin() {
    let spec = grid1(8.0, 4096);
    let ladder = RadiusLadder::covering(&spec);
    let alpha = 0.5;
    let m = at(&frac_maximal(&chi(spec), alpha, &ladder).unwrap(), 0.0);
    let want = 2f64.powf(alpha);
    assert!(m <= want * (1.0 + 2.0 * spec.spacing()));
    assert!(m >= want / ladder.ratio);
}

#[test]
fn riesz_of_indicator_at_origin() {
    let spec = grid1(8.0, 4096);
    let alpha = 0.5;
    let v = at(&riesz(&chi(spec), alpha).unwrap(), 0.0);
    assert!((v - 2.0 / alpha).abs() <= spec.spacing().powf(alpha), "{v}");
    let dropped = at(&riesz_with(&chi(spec), alpha, SelfCell::Drop, &Engine::default()).unwrap(), 0.0);
    assert!(dropped < v);
}

#[test]
fn riesz_is_positive() {
    let spec = GridSpec::new(2, 2.0, 32).unwrap();
    let f = GridFunction::from_fn(spec, |x| x[0].abs() + x[1] * x[1]).unwrap();
    for engine in [Engine::direct(), Engine::fft()] {
        let v = riesz_with(&f, 1.2, SelfCell::Ball, &engine).unwrap();
        assert!(v.values().iter().all(|&v| v > 0.0));
    }
}

#[test]
fn hardy_of_indicator() {
    let spec = grid1(8.0, 4096);
    let h = spec.spacing();
    let g = chi(spec);
    let lower = hardy_lower(&g, 0.0).unwrap();
    for x in [1.0, 1.5, 3.0, -2.5, 7.0] {
        let want = 2.0 / f64::abs(x);
        assert!((at(&lower, x) - want).abs() <= 2.0 * h / x.abs(), "x={x}");
    }
    for x in [0.3, -0.7] {
        assert!((at(&lower, x) - 2.0).abs() <= 2.0 * h / x.abs());
    }
    let alpha = 0.4;
    let la = hardy_lower(&g, alpha).unwrap();
    for x in [1.5, 4.0] {
        let want = 2.0 * f64::powf(x, alpha - 1.0);
        assert!((at(&la, x) - want).abs() <= 2.0 * h, "x={x}");
    }
    let upper = hardy_upper(&g, 0.0).unwrap();
    for x in [0.1, 0.5, -0.8] {
        let want = 2.0 * (1.0 / f64::abs(x)).ln();
        assert!((at(&upper, x) - want).abs() <= 2.0 * h / x.abs(), "x={x}");
    }
    for x in [1.0, 2.0, -5.0] {
        assert_eq!(at(&upper, x), 0.0);
    }
}

#[test]
fn hybrids_at_full_order_are_hardy() {
    for spec in [grid1(4.0, 256), GridSpec::new(2, 2.0, 16).unwrap()] {
        let n = spec.dim() as f64;
        let f = GridFunction::from_fn(spec, |x| (x[0] - 0.3).sin() + 0.5).unwrap();
        let k = hybrid_k(&f, n).unwrap();
        let h = hardy_lower(&f, 0.0).unwrap();
        assert!(relative_error(k.values(), h.values()) <= 1e-12);
        let ck = hybrid_calk(&f, n).unwrap();
        let ch = hardy_upper(&f, 0.0).unwrap();
        assert!(relative_error(ck.values(), ch.values()) <= 1e-12);
    }
}

#[test]
fn hybrid_k_matches_refined_quadrature() {
    let spec = grid1(4.0, 512);
    let g = chi(spec);
    let beta = 0.5;
    let coarse = at(&hybrid_k(&g, beta).unwrap(), 2.0);
    let req = OracleRequest::operator(OperatorSpec::HybridK { beta }).refined(4, Some(chi_family()));
    let fine = at(&oracle_eval(&g, &req).unwrap(), 2.0);
    assert!((coarse - fine).abs() <= spec.spacing().sqrt(), "{coarse} vs {fine}");
}

#[test]
fn hilbert_of_indicator_at_two() {
    let spec = grid1(8.0, 4096);
    let h = spec.spacing();
    let k = builtin_kernel("hilbert1d").unwrap();
    let v = at(&truncated_singular(&chi(spec), &k, h).unwrap(), 2.0);
    assert!((v - 3f64.ln()).abs() <= 2.0 * h, "{v}");
}

#[test]
fn odd_kernel_cancels_on_even_input() {
    let spec = grid1(8.0, 1024);
    let c = spec.center(spec.nearest_cell(&[0.0]))[0];
    let f = GridFunction::from_fn(spec, |x| (-(x[0] - c).powi(2) * 4.0).exp()).unwrap();
    let k = builtin_kernel("hilbert1d").unwrap();
    let v = at(&truncated_singular(&f, &k, 0.1).unwrap(), c);
    assert!(v.abs() <= 1e-12, "{v}");
}

#[test]
fn builtin_kernels_satisfy_size_condition() {
    let k = builtin_kernel("hilbert1d").unwrap();
    assert!(k.size_ratio(&grid1(4.0, 64)) <= 1.0 + 1e-12);
    let r = builtin_kernel("riesz1").unwrap();
    for spec in [grid1(4.0, 32), GridSpec::new(2, 2.0, 8).unwrap(), GridSpec::new(3, 2.0, 4).unwrap()] {
        assert!(r.size_ratio(&spec) <= 1.0 + 1e-12);
    }
    assert!(builtin_kernel("unknown").is_err());
}

#[test]
fn user_kernel_is_pluggable() {
    fn damped(_: usize, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        let d = x[0] - y[0];
        d.signum() / (d.abs() * (1.0 + d * d))
    }
    let k = KernelSpec { id: "damped".into(), size_constant: 1.0, dim: Some(1), eval: damped };
    let spec = grid1(4.0, 64);
    assert!(k.size_ratio(&spec) <= 1.0);
    let f = chi(spec);
    let v = truncated_singular(&f, &k, 0.2).unwrap();
    assert!(v.values().iter().all(|v| v.is_finite()));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    const CELLS: usize = 32;

    fn field() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-4.0f64..4.0, CELLS)
    }

    fn func(v: Vec<f64>) -> GridFunction {
        GridFunction::new(grid1(4.0, CELLS), v).unwrap()
    }

    fn sublinear_ops() -> Vec<OperatorSpec> {
        vec![OperatorSpec::Maximal, OperatorSpec::SharpMaximal, OperatorSpec::FracMaximal { alpha: 0.4 }]
    }

    fn linear_ops() -> Vec<OperatorSpec> {
        vec![
            OperatorSpec::riesz(0.4),
            OperatorSpec::HardyLower { alpha: 0.3 },
            OperatorSpec::HardyUpper { alpha: 0.3 },
            OperatorSpec::HybridK { beta: 0.5 },
            OperatorSpec::HybridCalK { beta: 0.5 },
            OperatorSpec::TruncatedSingular { kernel: "hilbert1d".into(), epsilon: 0.25 },
        ]
    }

    fn run(op: &OperatorSpec, f: &GridFunction) -> Vec<f64> {
        apply(f, op, &RadiusLadder::covering(f.spec()), &Engine::default()).unwrap().into_values()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sublinearity(a in field(), b in field()) {
            let (f, g) = (func(a), func(b));
            let s = f.add(&g).unwrap();
            for op in sublinear_ops() {
                let (fs, ff, fg) = (run(&op, &s), run(&op, &f), run(&op, &g));
                for i in 0..CELLS {
                    prop_assert!(fs[i] <= (ff[i] + fg[i]) * (1.0 + 1e-12), "{}", op.label());
                }
            }
        }

        #[test]
        fn homogeneity(a in field(), e in -3i32..4, neg in any::<bool>()) {
            // powers of two keep every product exact
            let c = if neg { -(2f64.powi(e)) } else { 2f64.powi(e) };
            let f = func(a);
            let cf = f.scaled(c);
            for op in sublinear_ops() {
                let want: Vec<f64> = run(&op, &f).iter().map(|v| v * c.abs()).collect();
                prop_assert_eq!(run(&op, &cf), want, "{}", op.label());
            }
            for op in linear_ops() {
                let want: Vec<f64> = run(&op, &f).iter().map(|v| v * c).collect();
                prop_assert_eq!(run(&op, &cf), want, "{}", op.label());
            }
        }

        #[test]
        fn homogeneity_general_scalar(a in field(), c in -5.0f64..5.0) {
            let f = func(a);
            let cf = f.scaled(c);
            for op in linear_ops() {
                let got = run(&op, &cf);
                let want: Vec<f64> = run(&op, &f).iter().map(|v| v * c).collect();
                prop_assert!(relative_error(&got, &want) <= 1e-12 || want.iter().all(|&w| w == 0.0));
            }
        }

        #[test]
        fn monotonicity(a in proptest::collection::vec(0.0f64..2.0, CELLS), d in proptest::collection::vec(0.0f64..2.0, CELLS)) {
            let f = func(a.clone());
            let g = func(a.iter().zip(&d).map(|(x, y)| x + y).collect());
            let ops = [
                OperatorSpec::Maximal,
                OperatorSpec::FracMaximal { alpha: 0.4 },
                OperatorSpec::riesz(0.4),
                OperatorSpec::HardyLower { alpha: 0.3 },
                OperatorSpec::HardyUpper { alpha: 0.3 },
                OperatorSpec::HybridK { beta: 0.5 },
                OperatorSpec::HybridCalK { beta: 0.5 },
            ];
            for op in ops {
                let (of, og) = (run(&op, &f), run(&op, &g));
                for i in 0..CELLS {
                    prop_assert!(of[i] <= og[i], "{}", op.label());
                }
            }
        }
    }
}
