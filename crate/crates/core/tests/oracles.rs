//! Cross-checks of the closed forms against independent numerical oracles.

use std::f64::consts::LN_2;

use multiconn::field_trial::{measurement_outage, strongest_links, synthesize_trace, SnrModelParams};
use multiconn::link::Topology;
use multiconn::outage::{
    outage_exact, outage_exact_closed, outage_jd_quadrature, outage_monte_carlo, OutageEstimate,
};
use multiconn::quadrature::{integrate, Tolerance};
use multiconn::special::coding_constant;
use multiconn::{Combiner, Result};

/// Volume of `{γ ≥ 0 : Σ log2(1 + γ_i) < x}` in `k` dimensions, by the
/// recursion `V_k(x) = ∫_0^x V_{k-1}(x - u) ln2 · 2^u du`, `V_0 = 1`.
fn volume(k: usize, x: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if k == 1 {
        return Ok(x.exp2() - 1.0);
    }
    let tol = Tolerance::relative(1e-11);
    Ok(integrate(|u| Ok(volume(k - 1, x - u)? * LN_2 * u.exp2()), 0.0, x, tol)?.value)
}

#[test]
fn coding_constant_equals_outage_region_volume() {
    for n in 2..=4 {
        for r in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let oracle = volume(n, r).unwrap();
            let a = coding_constant(n, r).unwrap();
            assert!(((a - oracle) / oracle).abs() < 1e-8, "n={n} r={r}: {a} vs {oracle}");
        }
    }
}

fn within_ci(mc: &OutageEstimate, reference: f64, widths: f64) -> bool {
    let half = mc.ci_half_width.unwrap();
    (mc.value - reference).abs() <= widths * half.max(1e-12)
}

#[test]
fn jd_quadrature_agrees_with_sampling() {
    for (snrs, r) in [(vec![2.0, 5.0], 1.0), (vec![10.0, 10.0, 10.0], 3.0), (vec![1.0, 4.0, 2.0, 8.0], 2.0)] {
        let q = outage_jd_quadrature(&snrs, r, 1e-8).unwrap().value;
        let t = Topology::from_average_snrs(&snrs, 1.0).unwrap();
        let mc = outage_monte_carlo(Combiner::Jd, &t, r, 1_000_000, 17).unwrap();
        assert!(within_ci(&mc, q, 4.0), "{snrs:?}: {} vs {q}", mc.value);
    }
}

#[test]
fn closed_forms_agree_with_sampling() {
    let cases = [
        (Combiner::Sc, vec![3.0, 6.0], 2.0),
        (Combiner::Sc, vec![1.0, 1.0, 2.0], 0.5),
        (Combiner::Mrc, vec![4.0, 4.0, 4.0], 3.0),
        (Combiner::Mrc, vec![1.0, 3.0, 9.0], 2.5),
        (Combiner::Mrc, vec![2.0, 2.0 * (1.0 + 1e-6)], 1.0),
        (Combiner::Sco, vec![5.0], 1.5),
    ];
    for (comb, snrs, r) in cases {
        let exact = outage_exact_closed(comb, &snrs, r).unwrap().value;
        let t = Topology::from_average_snrs(&snrs, 1.0).unwrap();
        let mc = outage_monte_carlo(comb, &t, r, 1_000_000, 23).unwrap();
        assert!(within_ci(&mc, exact, 4.0), "{comb} {snrs:?}: {} vs {exact}", mc.value);
    }
}

#[test]
fn exact_outage_is_ordered_across_combiners() {
    for snrs in [vec![1.0, 2.0], vec![5.0, 5.0, 5.0], vec![0.5, 3.0, 30.0]] {
        for r in [0.3, 1.0, 4.0] {
            let o = |c| outage_exact(c, &snrs, r, 1e-9).unwrap().value;
            let sco = outage_exact(Combiner::Sco, &snrs[..1], r, 1e-9).unwrap().value;
            assert!(o(Combiner::Jd) <= o(Combiner::Mrc) + 1e-12);
            assert!(o(Combiner::Mrc) <= o(Combiner::Sc) + 1e-12);
            // SC never does worse than its first link alone.
            assert!(o(Combiner::Sc) <= sco + 1e-12);
        }
    }
}

#[test]
fn field_trial_jd_rows_bound_sampled_jd() {
    let trace = synthesize_trace(50, 16, SnrModelParams::default(), 8).unwrap();
    // A low-SNR model so that outages are frequent enough to sample.
    let weak = synthesize_trace(50, 16, SnrModelParams { mean_db: 0.0, ..SnrModelParams::default() }, 8).unwrap();
    for t in [&trace, &weak] {
        for id in t.measurement_ids().take(10) {
            for n in [2, 3] {
                let snrs = strongest_links(t, id, n).unwrap();
                let asym = measurement_outage(t, id, n, 1.0, Combiner::Jd).unwrap().value;
                let mrc = measurement_outage(t, id, n, 1.0, Combiner::Mrc).unwrap().value;
                let topo = Topology::from_average_snrs(&snrs, 1.0).unwrap();
                let mc = outage_monte_carlo(Combiner::Jd, &topo, 1.0, 1_000_000, id).unwrap();
                let slack = 3.0 * mc.ci_half_width.unwrap();
                assert!(mc.value <= asym + slack, "id={id} n={n}: {} vs {asym}", mc.value);
                assert!(mc.value <= mrc + slack, "id={id} n={n}: {} vs {mrc}", mc.value);
            }
        }
    }
}
