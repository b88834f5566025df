use std::time::Instant;
use vmimo_core::config::RunConfig;
use vmimo_core::scenarios::{generate_drop, DropSpec, Scenario};
use vmimo_core::seed::SeedPath;
use vmimo_core::correlation::sigma_to_kappa;

fn main() {
    let mut cfg = RunConfig::default_for(Scenario::Manhattan);
    cfg.n_drops = 1; cfg.n_channel = 1;
    let params = cfg.sim_params().unwrap();
    let layout = cfg.layout().unwrap();
    let spec = DropSpec {
        v: 16.67,
        kappa_t: sigma_to_kappa(35.0).unwrap(),
        kappa_r: sigma_to_kappa(15.0).unwrap(),
        density: params.density,
        tx_power_w: params.tx_power_w,
        array: params.array,
        n_pilots: params.t_pilot,
        shadow_sigma_db: params.shadow_sigma_db,
        vue_antenna_height: params.vue_antenna_height,
    };
    let t0 = Instant::now();
    let drop = generate_drop(&layout, &spec, SeedPath::new(1)).unwrap();
    println!("generate_drop: {:?}  (K = {})", t0.elapsed(), drop.n_users());

    // time eigendecomposition alone for scale
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    let r0 = drop.links[0][0].r0.matrix().clone();
    let t = Instant::now();
    for _ in 0..100 { let _ = r0.clone().symmetric_eigen(); }
    println!("100 eig(32) complex: {:?}", t.elapsed());

    let n_links = drop.n_bs() * drop.n_users();
    println!("links: {}", n_links);

    // time spatial matrix construction alone
    let t = Instant::now();
    for i in 0..100 {
        let p = vmimo_core::correlation::AngularProfile::new(2.68, 14.59, 0.1, 0.2 + i as f64*0.001, 0.3, 0.0).unwrap();
        let _ = vmimo_core::correlation::spatial_matrix(&p, &params.array).unwrap();
    }
    println!("100 spatial_matrix(32) with check: {:?}", t.elapsed());

    // full curve for timing the rest
    let point = vmimo_core::sweep::SweepPoint { sigma_t_deg: 35.0, sigma_r_deg: 15.0, v: 16.67 };
    let grid: Vec<usize> = (60..=1000).step_by(20).collect();
    let t = Instant::now();
    let _ = vmimo_core::sweep::ase_curve(&layout, &point, &grid, &params, vmimo_core::receiver::Combiner::Mr, SeedPath::new(2)).unwrap();
    println!("ase_curve 1 drop 1 real: {:?}", t.elapsed());
    let mut p2 = params; p2.n_channel = 3;
    let t = Instant::now();
    let _ = vmimo_core::sweep::ase_curve(&layout, &point, &grid, &p2, vmimo_core::receiver::Combiner::Mr, SeedPath::new(2)).unwrap();
    println!("ase_curve 1 drop 3 real: {:?}", t.elapsed());
    let t = Instant::now();
    let _ = vmimo_core::sweep::ase_curve(&layout, &point, &grid, &p2, vmimo_core::receiver::Combiner::Mmse, SeedPath::new(2)).unwrap();
    println!("ase_curve MMSE 1 drop 3 real: {:?}", t.elapsed());
}
