use asl_core::moduli::ModulusSpec;
use asl_core::nmp::{certify, certificate_grid, FlowLaw, NmpConstants, QuadratureConfig};
fn main() {
    let q = QuadratureConfig::default();
    let c = NmpConstants { c_alpha: 1.0, a_flow: 1.0, margin: 1e-6 };
    println!("--- SQG log-flow, alpha = 1/2 ---");
    for (delta, gamma) in [(0.1, 0.2), (0.05, 0.1), (0.02, 0.05), (0.1, 0.05), (0.05, 0.05), (0.2, 0.2)] {
        match ModulusSpec::sqg_critical(delta, gamma) {
            Ok(om) => {
                let grid = certificate_grid(&om, 1e-6, 1e4, 60);
                match certify(&om, 0.5, FlowLaw::SqgLog, &grid, &c, &q, 1.0) {
                    Ok(rep) => println!(
                        "d={delta} g={gamma} pass={} worst={:.3e} at xi/d={:.2e} indet={}",
                        rep.pass, rep.worst_total, rep.worst_xi / delta, rep.indeterminate.len()
                    ),
                    Err(e) => println!("d={delta} g={gamma} certify error: {e}"),
                }
            }
            Err(e) => println!("d={delta} g={gamma}: {e}"),
        }
    }
    println!("--- beta-SQG quadrature flow, alpha = 1-beta ---");
    for beta in [0.6, 0.8] {
        let alpha = 1.0 - beta;
        for (delta, gamma) in [(0.05, 0.02), (0.02, 0.008), (0.01, 0.004), (0.1, 0.03)] {
            match ModulusSpec::beta_critical(alpha, delta, gamma) {
                Ok(om) => {
                    let grid = certificate_grid(&om, 1e-6, 1e4, 40);
                    let t0 = std::time::Instant::now();
                    match certify(&om, alpha, FlowLaw::Beta(beta), &grid, &c, &q, 1.0) {
                        Ok(rep) => println!(
                            "b={beta} d={delta} g={gamma} pass={} worst={:.3e} at xi/d={:.2e} indet={} {:?}",
                            rep.pass, rep.worst_total, rep.worst_xi / delta,
                            rep.indeterminate.len(), t0.elapsed()
                        ),
                        Err(e) => println!("b={beta} d={delta} g={gamma} certify error: {e}"),
                    }
                }
                Err(e) => println!("b={beta} d={delta} g={gamma}: {e}"),
            }
        }
    }
}
