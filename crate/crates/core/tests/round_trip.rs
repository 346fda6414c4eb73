//! Generated systems hand back the integral they were built from.

use dpwai_core::algebra::Fe;
use dpwai_core::darboux::{first_integral, AnalysisOptions};
use dpwai_core::generator::{build_form, default_tower, random_spec};

#[test]
fn generated_integrals_are_recovered() {
    let tower = default_tower();
    for seed in [20u64, 21, 22, 23] {
        let spec = random_spec(seed, &tower).unwrap();
        let system = build_form(&spec).unwrap();
        let a = first_integral(&system, tower.symbols(), &AnalysisOptions::default()).unwrap();
        let integral = a.integral.as_ref().unwrap_or_else(|| panic!("seed {seed}: {:?}", a.zero));
        assert!(a.is_dpwai(), "seed {seed}");
        let found: Vec<_> = integral.curves.iter().map(|c| c.monic()).collect();
        let idx: Vec<usize> = spec
            .curves
            .iter()
            .map(|c| found.iter().position(|f| f == &c.monic()).unwrap_or_else(|| panic!("seed {seed}: curve missing")))
            .collect();
        let ray: Vec<&Fe> = idx.iter().map(|&j| &integral.ray[j]).collect();
        for i in 0..ray.len() {
            for j in 0..ray.len() {
                assert_eq!(ray[i] * &spec.alpha[j], ray[j] * &spec.alpha[i], "seed {seed}");
            }
        }
    }
}
