use std::sync::Arc;

use proptest::prelude::*;
use supdelta::empirical::{ecdf, empirical_copula, survival_copula};
use supdelta::rng::{replicate_rng, streams};
use supdelta::statistics::{
    berk_jones_r, copula_distance, kl_bernoulli, ks_one_sample, mmd_finite, radial_asymmetry,
    two_sample_extremes, ClassMember, FiniteFunctionClass,
};
use supdelta::{evaluate, CdfSpec, Copula, FunctionalKind, GridDomain, GridFunction, Sample, Univariate};

fn sample_strategy(max: usize) -> impl Strategy<Value = Vec<f64>> {
    // Rounded values so ties occur.
    prop::collection::vec((0u32..40).prop_map(|k| k as f64 / 40.0 + 0.0125), 1..max)
}

fn pairs(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        (0u32..30, 0u32..30).prop_map(|(a, b)| vec![a as f64 / 30.0, b as f64 / 30.0]),
        1..max,
    )
}

proptest! {
    #[test]
    fn ecdf_is_a_distribution_function(xs in sample_strategy(60)) {
        let f = ecdf(&Sample::univariate(xs).unwrap()).unwrap();
        let v = f.values();
        let l = f.left_limits().unwrap();
        prop_assert_eq!(v[0], 0.0);
        prop_assert_eq!(*v.last().unwrap(), 1.0);
        for k in 1..v.len() {
            prop_assert!(l[k] >= v[k - 1] && v[k] >= l[k]);
        }
    }

    #[test]
    fn one_sample_scan_equals_grid_evaluation(xs in sample_strategy(60)) {
        let s = Sample::univariate(xs).unwrap();
        let g = Univariate::unit_uniform();
        let fn_ = ecdf(&s).unwrap();
        let xs = fn_.domain().axis(0).to_vec();
        let gv: Vec<f64> = xs.iter().map(|&x| g.cdf(x)).collect();
        let gf = GridFunction::cadlag(Arc::clone(fn_.domain()), gv.clone(), gv).unwrap();
        let diff = fn_.zip_with(&gf, |a, b| a - b).unwrap();
        let spec: CdfSpec = g.into();
        for k in [FunctionalKind::SupNorm, FunctionalKind::Sup, FunctionalKind::Amp] {
            let scan = ks_one_sample(&s, &spec, k, 0.0).unwrap().raw;
            prop_assert!((scan - evaluate(k, &diff)).abs() < 1e-15);
        }
    }

    #[test]
    fn indicator_class_equals_two_sample_ks(xs in sample_strategy(40), ys in sample_strategy(40)) {
        let class = FiniteFunctionClass {
            members: xs.iter().chain(&ys).map(|&t| ClassMember::Indicator { t }).collect(),
            symmetric: true,
        };
        let (sx, sy) = (Sample::univariate(xs).unwrap(), Sample::univariate(ys).unwrap());
        let mmd = mmd_finite(&class.evaluate(&sx).unwrap(), &class.evaluate(&sy).unwrap(), true)
            .unwrap()
            .value;
        let ks = two_sample_extremes(&sx, &sy).unwrap().functional(FunctionalKind::SupNorm).unwrap();
        prop_assert!((mmd - ks).abs() <= 1e-12);
    }

    #[test]
    fn two_sample_ks_is_rank_invariant(xs in sample_strategy(40), ys in sample_strategy(40)) {
        let warp = |v: &[f64]| v.iter().map(|x| (3.0 * x).exp() - 7.0).collect::<Vec<_>>();
        let a = two_sample_extremes(
            &Sample::univariate(xs.clone()).unwrap(),
            &Sample::univariate(ys.clone()).unwrap(),
        ).unwrap();
        let b = two_sample_extremes(
            &Sample::univariate(warp(&xs)).unwrap(),
            &Sample::univariate(warp(&ys)).unwrap(),
        ).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn copula_statistics_are_rank_invariant(rows in pairs(40)) {
        let warped: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0].powi(3) - 2.0, (r[1] + 1.0).ln()]).collect();
        let (a, b) = (Sample::from_rows(&rows).unwrap(), Sample::from_rows(&warped).unwrap());
        let pi = Copula::Independence { dim: 2 };
        prop_assert_eq!(copula_distance(&a, &pi).unwrap(), copula_distance(&b, &pi).unwrap());
        prop_assert_eq!(radial_asymmetry(&a).unwrap(), radial_asymmetry(&b).unwrap());
    }

    #[test]
    fn empirical_copula_margins_are_near_uniform(rows in pairs(50)) {
        let s = Sample::from_rows(&rows).unwrap();
        let n = s.n() as f64;
        let grid = Arc::new(GridDomain::unit_lattice(11, 2).unwrap());
        let c = empirical_copula(&s, &grid).unwrap();
        let distinct = |j: usize| {
            let mut v = s.column(j);
            v.sort_by(f64::total_cmp);
            v.dedup();
            v.len()
        };
        for i in 0..11 {
            let u = i as f64 / 10.0;
            let last = grid.flat_index(&[i, 10]);
            let v = c.values()[last];
            // A margin is uniform up to one rank step, plus the mass of ties.
            if distinct(0) == s.n() {
                prop_assert!((v - u).abs() <= 1.0 / n + 1e-12, "C({u}, 1) = {v}");
            }
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn survival_is_an_involution(rows in pairs(40)) {
        let s = Sample::from_rows(&rows).unwrap();
        let grid = Arc::new(GridDomain::unit_lattice(9, 2).unwrap());
        let c = empirical_copula(&s, &grid).unwrap();
        let back = survival_copula(&survival_copula(&c).unwrap()).unwrap();
        for (a, b) in c.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn berk_jones_dominates_dense_evaluation(xs in prop::collection::vec(0.01f64..0.99, 1..50)) {
        let s = Sample::univariate(xs.clone()).unwrap();
        let g = Univariate::Power { theta: 2.0 };
        let r = berk_jones_r(&s, &g).unwrap();
        let sorted = s.sorted_column(0);
        let n = s.n() as f64;
        let mut dense = 0.0f64;
        let below = |x: f64| f64::from_bits(x.to_bits() - 1);
        let probes = (1..2000).map(|k| k as f64 / 2000.0).chain(xs.iter().flat_map(|&x| [x, below(x)]));
        for x in probes {
            let fx = sorted.partition_point(|&v| v <= x) as f64 / n;
            dense = dense.max(kl_bernoulli(fx, g.cdf(x)).unwrap());
        }
        prop_assert!(r >= dense - 1e-12);
        prop_assert!(r <= dense + 1e-9, "{r} vs {dense}");
    }
}

#[test]
fn glivenko_cantelli_rate() {
    // Dvoretzky-Kiefer-Wolfowitz bound at level 1e-9.
    let n = 5000;
    let bound = ((2.0f64 / 1e-9).ln() / (2.0 * n as f64)).sqrt();
    let g: CdfSpec = Univariate::standard_normal().into();
    for r in 0..50 {
        let mut rng = replicate_rng(5, streams::SELFTEST, r);
        let s = Sample::univariate(Univariate::standard_normal().draw(&mut rng, n)).unwrap();
        let d = ks_one_sample(&s, &g, FunctionalKind::SupNorm, 0.0).unwrap().raw;
        assert!(d <= bound, "replicate {r}: {d} > {bound}");
    }
}

#[test]
fn csv_samples_with_and_without_header() {
    let with = Sample::from_csv_reader("x,y\n0.1,0.2\n0.3,0.4\n".as_bytes()).unwrap();
    let without = Sample::from_csv_reader("0.1,0.2\n0.3,0.4\n".as_bytes()).unwrap();
    assert_eq!(with, without);
    assert_eq!((with.n(), with.dim()), (2, 2));
    assert!(Sample::from_csv_reader("0.1,0.2\n0.3\n".as_bytes()).is_err());
}
