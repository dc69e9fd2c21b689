use std::collections::BTreeMap;
use hotgate_core::geometry::LogicalVector;
use hotgate_core::presets::*;
use hotgate_core::optimizer::kernel_fidelity;

fn kernel(name: &str, order: f64) -> (hotgate_core::CouplingKernel64, usize, usize) {
    let def = find_preset(name).unwrap();
    let mut params: BTreeMap<String, f64> = def.params.iter().map(|(k,v)| (k.to_string(), *v)).collect();
    params.insert("order".into(), order);
    match build_scenario(def.scenario, &params).unwrap() {
        ScenarioModel::Kernel { kernel, n_a, n_b, .. } => (kernel, n_a, n_b),
        _ => unreachable!(),
    }
}

fn main() {
    let (k1, n_a, n_b) = kernel("appD", 257.0);
    let (k2, _, _) = kernel("appD", 513.0);
    let a = LogicalVector::trivial(n_a);
    let b = LogicalVector::trivial(n_b);
    // trivial coupling at reference geometry
    let mu = {
        let d = k2.distribution(&a, &b).unwrap();
        d.mean()
    };
    println!("appD mean mu_triv = {mu:.3}");
    for dt in [0.05, 0.1, 0.2, 0.4, 0.8, 1.5, 3.0, 5.0] {
        let f1 = kernel_fidelity(&k1, a.entries(), b.entries(), dt);
        let f2 = kernel_fidelity(&k2, a.entries(), b.entries(), dt);
        println!("dt={dt:5}: F257={f1:.10} |diff|={:.2e}", (f1-f2).abs());
    }
}
