use num_complex::Complex64;
use skewlab::biquad::{construct_example, product_preset};
use skewlab::numeric::Poly;
use skewlab::dynamics::Point2;
use skewlab::invariant::{
    axiom_a_check, classify_critical, estimate_accumulation, find_saddles, unstable_arc,
    AccumulationKind,
};
use skewlab::julia::{CloudTag, PointCloud};

fn main() {
    let inst = construct_example(1, 1e-3).unwrap();
    let f = &inst.f;
    println!("instance: eta {:e} beta {:.9} alpha {:.9}", inst.eta, inst.beta_n, inst.alpha_n.re);

    let saddles = find_saddles(f, 2).unwrap();
    println!("saddles: {} in {} components", saddles.saddles.len(), saddles.n_components);
    for s in &saddles.saddles {
        println!(
            "  period {} at ({:.6}, {:.6}) |mult| base {:.3} fiber {:.3}",
            s.period, s.location.z.re, s.location.w.re,
            s.base_multiplier.norm(), s.fiber_multiplier.norm()
        );
    }

    let beta = Complex64::new(inst.beta_n, 0.0);
    let cls = classify_critical(
        f,
        &saddles,
        &PointCloud::plane(CloudTag::Generic, vec![beta]),
        192,
        1e-6,
    )
    .unwrap();
    println!("classification over beta: {}", cls.to_json());

    let seeds = PointCloud::space(
        CloudTag::Generic,
        vec![Point2::new(beta, Complex64::new(0.0, 0.0))],
    );
    let acc = estimate_accumulation(f, AccumulationKind::Pointwise, &seeds, 4, 7, 1e-3).unwrap();
    println!("accumulation: {}", acc.to_json());

    let report = axiom_a_check(f).unwrap();
    println!(
        "hyperbolicity: pass {} margin_j {:.4} margin_a {:?} fibers j/a/skip {}/{}/{}",
        report.pass(), report.margin_j, report.margin_a,
        report.julia_fibers, report.attracting_fibers, report.skipped_fibers
    );

    let b = Poly::from_real(&[-1.0, 0.0, 1.0]);
    let prod = product_preset(&b, &Poly::from_real(&[0.0, 0.0, 1.0])).unwrap();
    let ps = find_saddles(&prod, 1).unwrap();
    let arc = unstable_arc(&prod, &ps.saddles[0], 0.5, 2).unwrap();
    println!(
        "product arc: anchor ({:.4}, {:.4}) length {:.3} points {}",
        arc.anchor.location.z.re, arc.anchor.location.w.re, arc.arclength(), arc.points.len()
    );
    let hyp = product_preset(&b, &b).unwrap();
    let prep = axiom_a_check(&hyp).unwrap();
    println!("product check: pass {} margins {:.4}/{:.4}", prep.pass(), prep.margin_j, prep.margin_a);
}
