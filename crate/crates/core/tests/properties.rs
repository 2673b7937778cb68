use proptest::prelude::*;

use dephasing::dynamics::{evolve, negativity_at};
use dephasing::numerics::lambert_w0;
use dephasing::processes::{beta, beta_inverse};
use dephasing::states::{a_to_c, c_to_a};
use dephasing::timescales::{preserving_time, preserving_time_bell};
use dephasing::{BellMixture, EnvTopology, EvolutionParams, ProcessSpec, ThresholdRatio};

fn mixture() -> impl Strategy<Value = BellMixture> {
    prop::array::uniform4(0.0f64..1.0)
        .prop_filter("non-degenerate", |w| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|w| {
            let s: f64 = w.iter().sum();
            let mut c = w.map(|v| v / s);
            c[3] = 1.0 - c[0] - c[1] - c[2];
            BellMixture::new(c.map(|v| v.max(0.0))).unwrap()
        })
}

fn entangled_mixture() -> impl Strategy<Value = BellMixture> {
    mixture().prop_filter("entangled", |m| m.initial_negativity() > 1e-6)
}

fn process() -> impl Strategy<Value = ProcessSpec> {
    prop_oneof![
        (0.01f64..100.0).prop_map(|g| ProcessSpec::ornstein_uhlenbeck(g).unwrap()),
        (0.05f64..0.95).prop_map(|h| ProcessSpec::fractional_gaussian(h).unwrap()),
        Just(ProcessSpec::Wiener),
        Just(ProcessSpec::WhiteNoise),
    ]
}

fn env() -> impl Strategy<Value = EnvTopology> {
    prop_oneof![Just(EnvTopology::Independent), Just(EnvTopology::Common)]
}

proptest! {
    #[test]
    fn bloch_round_trip(m in mixture()) {
        let back = a_to_c(&c_to_a(&m)).unwrap();
        for (x, y) in m.weights().iter().zip(back.weights()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn lambert_residual(z in -0.36787944117144233f64..10.0) {
        let w = lambert_w0(z).unwrap();
        let scale = z.abs().max(1e-300);
        prop_assert!((w * w.exp() - z).abs() <= 1e-10 * scale.max(1e-6));
    }

    #[test]
    fn lambert_monotone(a in -0.36787944117144233f64..10.0, b in -0.36787944117144233f64..10.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(lambert_w0(lo).unwrap() <= lambert_w0(hi).unwrap());
    }

    #[test]
    fn beta_monotone(spec in process(), s in 0.0f64..20.0, d in 0.0f64..5.0) {
        prop_assert!(beta(spec, s).unwrap() <= beta(spec, s + d).unwrap());
    }

    #[test]
    fn beta_inverse_round_trip(spec in process()) {
        for t in [0.01, 0.1, 1.0, 10.0] {
            let back = beta_inverse(spec, beta(spec, t).unwrap()).unwrap();
            prop_assert!((back - t).abs() <= 1e-10 * t.max(1.0), "{spec} t={t} back={back}");
        }
    }

    #[test]
    fn negativity_ignores_omega0(m in mixture(), spec in process(), env in env(), t in 0.0f64..5.0) {
        let base = EvolutionParams::new(spec, env, 1.0, 0.0).unwrap();
        let n0 = negativity_at(&m, &base, t).unwrap();
        for w in [1.0, 17.0] {
            let p = base.with_omega0(w).unwrap();
            prop_assert_eq!(negativity_at(&m, &p, t).unwrap().to_bits(), n0.to_bits());
        }
    }

    #[test]
    fn negativity_non_increasing(m in mixture(), spec in process(), env in env(), s in 0.0f64..5.0, d in 0.0f64..2.0) {
        let p = EvolutionParams::with_defaults(spec, env);
        // the absolute-value form leaves ~1e-16 of rounding noise around zero
        prop_assert!(negativity_at(&m, &p, s + d).unwrap() <= negativity_at(&m, &p, s).unwrap() + 1e-15);
    }

    #[test]
    fn common_field_keeps_inner_coherence(m in mixture(), spec in process(), t in 0.0f64..5.0) {
        let p = EvolutionParams::with_defaults(spec, EnvTopology::Common);
        let rho = evolve(&m, &p, t).unwrap();
        let [_, _, c3, c4] = m.weights();
        prop_assert!((rho.get(1, 2).re - 0.5 * (c3 - c4)).abs() < 1e-15);
        prop_assert_eq!(rho.get(1, 2).im, 0.0);
    }

    #[test]
    fn common_field_preserves_for_less_time(m in entangled_mixture(), spec in process()) {
        let r = ThresholdRatio::default();
        let ind = preserving_time(&m, spec, 1.0, r, EnvTopology::Independent).unwrap();
        let com = preserving_time(&m, spec, 1.0, r, EnvTopology::Common).unwrap();
        if let (Some(ti), Some(tc)) = (ind.time(), com.time()) {
            prop_assert!(tc <= ti * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bell_closed_form_matches_generic(spec in process(), env in env(), lambda in 0.2f64..3.0) {
        let r = ThresholdRatio::default();
        let closed = preserving_time_bell(spec, lambda, r, env).unwrap();
        let generic = preserving_time(&BellMixture::PHI_PLUS, spec, lambda, r, env)
            .unwrap()
            .time()
            .unwrap();
        prop_assert!((closed - generic).abs() <= 1e-9 * closed.max(1.0));
    }
}

fn ou_tstar(gamma: f64) -> f64 {
    let spec = ProcessSpec::ornstein_uhlenbeck(gamma).unwrap();
    preserving_time_bell(
        spec,
        1.0,
        ThresholdRatio::default(),
        EnvTopology::Independent,
    )
    .unwrap()
}

#[test]
fn ou_tstar_decreases_with_gamma() {
    let gammas: Vec<f64> = (-4..=4).map(|k| 10f64.powi(k)).collect();
    let times: Vec<f64> = gammas.iter().map(|&g| ou_tstar(g)).collect();
    assert!(times.windows(2).all(|w| w[0] > w[1]), "{times:?}");
    let b_star = ThresholdRatio::default().beta_star().value();
    // Markovian limit approaches beta*, quasi-static limit grows like 1/sqrt(gamma)
    assert!(times[8] > b_star && times[8] < 1.05 * b_star);
    let quasi_static = (2.0 * b_star / 1e-4).sqrt();
    assert!(times[0] >= quasi_static && times[0] < 1.01 * quasi_static);
}

#[test]
fn fgn_tstar_nearly_linear_in_hurst() {
    let hs: Vec<f64> = (0..=18).map(|k| 0.05 + 0.05 * k as f64).collect();
    let ts: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let spec = ProcessSpec::fractional_gaussian(h).unwrap();
            preserving_time_bell(
                spec,
                1.0,
                ThresholdRatio::default(),
                EnvTopology::Independent,
            )
            .unwrap()
        })
        .collect();
    assert!(ts.windows(2).all(|w| w[0] < w[1]));

    let n = hs.len() as f64;
    let (mh, mt) = (hs.iter().sum::<f64>() / n, ts.iter().sum::<f64>() / n);
    let sxy: f64 = hs.iter().zip(&ts).map(|(h, t)| (h - mh) * (t - mt)).sum();
    let sxx: f64 = hs.iter().map(|h| (h - mh).powi(2)).sum();
    let slope = sxy / sxx;
    let max_residual = hs
        .iter()
        .zip(&ts)
        .map(|(h, t)| (t - (mt + slope * (h - mh))).abs())
        .fold(0.0, f64::max);
    let range = ts[ts.len() - 1] - ts[0];
    assert!(
        max_residual < 0.05 * range,
        "residual {max_residual} of range {range}"
    );
}

#[test]
fn wiener_is_fgn_at_half() {
    let half = ProcessSpec::fractional_gaussian(0.5).unwrap();
    for k in 0..100 {
        let t = 0.1 * k as f64;
        assert_eq!(
            beta(half, t).unwrap(),
            beta(ProcessSpec::Wiener, t).unwrap()
        );
    }
}
