use super::*;
use crate::code_model::{build_nr5g, encode, DynFrozenCfg};
use crate::fscl::Candidate;
use crate::scl_core::f_func;

fn lcg(seed: u64) -> impl FnMut() -> f64 {
    let mut s = seed ^ 0x9E37_79B9_7F4A_7C15;
    move || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Metric of deciding `u` (frozen prefix only, `nf` leaves) by the SC chain
/// rule on node LLRs `a`.
fn sc_prefix_metric(a: &[f64], nf: usize) -> f64 {
    fn rec(a: &[f64], nf: usize, pm: &mut f64) -> Vec<u8> {
        if nf == 0 {
            return vec![0; a.len()];
        }
        if a.len() == 1 {
            *pm += softplus(-a[0], ArithMode::Exact);
            return vec![0];
        }
        let h = a.len() / 2;
        let l: Vec<f64> = (0..h).map(|j| f_func(a[j], a[j + h], ArithMode::Exact)).collect();
        let bl = rec(&l, nf.min(h), pm);
        if nf > h {
            let r: Vec<f64> = (0..h).map(|j| crate::scl_core::g_func(a[j], a[j + h], bl[j])).collect();
            rec(&r, nf - h, pm);
        }
        vec![0; a.len()]
    }
    let mut pm = 0.0;
    rec(a, nf, &mut pm);
    pm
}

#[test]
fn frz_dec_matches_bitwise_sc_prefix() {
    let mut r = lcg(1);
    for (kind, ns, nf) in [(NodeKind::Spc, 8, 1), (NodeKind::Spc, 32, 1), (NodeKind::TypeIII, 16, 2), (NodeKind::TypeIV, 8, 3), (NodeKind::TypeIV, 32, 3)] {
        for _ in 0..50 {
            let a: Vec<f64> = (0..ns).map(|_| (r() - 0.4) * 8.0).collect();
            let mut k = Kernel::new(ArithMode::Exact);
            let got = frz_dec(kind, &a, 1.25, &mut k);
            let want = 1.25 + sc_prefix_metric(&a, nf);
            assert!((got - want).abs() < 1e-9, "{kind:?}: {got} vs {want}");
        }
    }
    let mut k = Kernel::new(ArithMode::Exact);
    assert_eq!(frz_dec(NodeKind::Rate1, &[1.0, 2.0], 0.5, &mut k), 0.5);
}

#[test]
fn frz_dec_is_marginal_over_information_bits() {
    // e^{−PM_fs} equals the total probability of all node completions.
    let mut r = lcg(2);
    let ns = 8;
    for (kind, nf) in [(NodeKind::Spc, 1), (NodeKind::TypeIII, 2), (NodeKind::TypeIV, 3)] {
        let a: Vec<f64> = (0..ns).map(|_| (r() - 0.5) * 6.0).collect();
        let mut mass = NEG_INF;
        for pat in 0..(1u32 << (ns - nf)) {
            let mut u = vec![0u8; ns];
            for t in 0..ns - nf {
                u[nf + t] = ((pat >> t) & 1) as u8;
            }
            let c = encode(&u).unwrap();
            let pm: f64 = c.iter().zip(&a).map(|(&b, &x)| softplus(-(1.0 - 2.0 * b as f64) * x, ArithMode::Exact)).sum();
            mass = box_plus(mass, -pm);
        }
        let got = frz_dec(kind, &a, 0.0, &mut Kernel::new(ArithMode::Exact));
        assert!((got + mass).abs() < 1e-10, "{kind:?}");
    }
}

fn cand(codeword: Vec<u8>, pm: f64) -> ListCandidate {
    ListCandidate { u: encode(&codeword).unwrap(), codeword, pm }
}

#[test]
fn app_without_unvisited_mass_is_list_posterior() {
    let list = vec![cand(vec![0, 0], 0.2), cand(vec![1, 1], 1.7), cand(vec![1, 0], 3.0)];
    let out = app_llrs(&list, &[0.0, 0.0], NEG_INF, XiVariant::Modified);
    let s0 = (-0.2f64).exp();
    let s1 = (-1.7f64).exp() + (-3.0f64).exp();
    assert!((out[0] - (s0 / s1).ln()).abs() < 1e-12);
    // Second bit: only the 1.7 entry has a one.
    let s0 = (-0.2f64).exp() + (-3.0f64).exp();
    assert!((out[1] - (s0 / (-1.7f64).exp()).ln()).abs() < 1e-12);
    // Unanimous bit with no unvisited mass saturates.
    let out = app_llrs(&list[..1], &[0.0, 0.0], NEG_INF, XiVariant::Modified);
    assert_eq!(out, vec![LLR_MAX, LLR_MAX]);
}

#[test]
fn app_branches_follow_the_unanimity_rule() {
    let ell = 1.5f64;
    let lam = -2.0f64;
    let l0 = -softplus(-ell, ArithMode::Exact);
    let l1 = l0 - ell;
    let pm = 0.3;
    let list = vec![cand(vec![0], pm)];
    // Modified: all zeros → numerator gets the larger channel term.
    let m = app_llrs(&list, &[ell], lam, XiVariant::Modified)[0];
    let want = box_plus(-pm, lam + l0.max(l1)) - (lam + l0.min(l1));
    assert!((m - want).abs() < 1e-12);
    let u = app_llrs(&list, &[ell], lam, XiVariant::Unmodified)[0];
    let want = box_plus(-pm, lam + l0) - (lam + l1);
    assert!((u - want).abs() < 1e-12);
    // All ones: mirrored.
    let list = vec![cand(vec![1], pm)];
    let m = app_llrs(&list, &[ell], lam, XiVariant::Modified)[0];
    let want = (lam + l0.min(l1)) - box_plus(-pm, lam + l0.max(l1));
    assert!((m - want).abs() < 1e-12);
    // Both sides present: both variants agree.
    let list = vec![cand(vec![0], 0.3), cand(vec![1], 0.9)];
    let a = xi_pair(&list, &[ell], lam);
    assert_eq!(a.modified, a.unmodified);
}

#[test]
fn app_is_clamped() {
    let list = vec![cand(vec![0], 0.0), cand(vec![1], 200.0)];
    assert_eq!(app_llrs(&list, &[0.0], NEG_INF, XiVariant::Modified), vec![LLR_MAX]);
}

#[test]
fn gamma_star_examples() {
    let list = vec![cand(vec![0], LN_2), cand(vec![1], LN_2)];
    assert!((gamma_star(&list, NEG_INF) - 0.5).abs() < 1e-15);
    assert!((approx_block_error(&list, NEG_INF) - 0.5).abs() < 1e-15);
    let list = vec![cand(vec![0], 0.0)];
    assert_eq!(gamma_star(&list, NEG_INF), 1.0);
    assert_eq!(approx_block_error(&list, NEG_INF), 0.0);
    // 1 − Γ* keeps precision when tiny.
    let p = approx_block_error(&list, -40.0);
    assert!((p - (-40f64).exp()).abs() < 1e-25);
    assert_eq!(gamma_star(&[], 0.0), 0.0);
}

fn outcome(surv: &[(usize, f64)], disc: &[(usize, f64)], total: f64) -> NodeDecodeOutcome {
    let c = |&(p, pm): &(usize, f64)| Candidate { parent: p, s_i: vec![], pm };
    NodeDecodeOutcome { survivors: surv.iter().map(c).collect(), discarded: disc.iter().map(c).collect(), total_valid: total }
}

#[test]
fn lambda_updates() {
    let mut k = Kernel::new(ArithMode::Exact);
    let o = outcome(&[(0, 1.0)], &[(0, 2.0), (0, 3.0)], 3.0);
    let got = lambda_update_lowrate(-1.0, 2.0 * LN_2, &o, &mut k);
    let want = ((-1.0f64).exp() / 4.0 + (-2.0f64).exp() + (-3.0f64).exp()).ln();
    assert!((got - want).abs() < 1e-12);

    // Exact high-rate: parent mass minus survivors.
    let o = outcome(&[(0, 1.0), (0, 1.5)], &[], 8.0);
    let got = lambda_update_highrate(NEG_INF, LN_2, &[0.5], &o, 2, &mut k).unwrap();
    let want = ((-0.5f64).exp() - (-1.0f64).exp() - (-1.5f64).exp()).ln();
    assert!((got - want).abs() < 1e-12);
    // Complete enumeration: nothing pruned.
    let o = outcome(&[(0, 0.6), (0, 0.7)], &[], 2.0);
    assert_eq!(lambda_update_highrate(NEG_INF, 0.0, &[0.5], &o, 2, &mut k).unwrap(), NEG_INF);
    // Survivors heavier than parents beyond tolerance → numeric error.
    let o = outcome(&[(0, 0.1)], &[], 4.0);
    assert!(matches!(lambda_update_highrate(NEG_INF, 0.0, &[0.5], &o, 2, &mut k), Err(DecodeError::Numeric(_))));

    // HWF: non-inherited parents plus weighted losers.
    let mut h = Kernel::new(ArithMode::Hwf);
    let o = outcome(&[(0, 1.0), (0, 1.2)], &[(0, 2.0)], 16.0);
    let got = lambda_update_highrate(NEG_INF, 0.0, &[0.5, 0.9], &o, 3, &mut h).unwrap();
    let want = box_plus_mode(-0.9, 2f64.ln() - 2.0, ArithMode::Hwf);
    assert!((got - want).abs() < 1e-12);
    // L = 1: the loser term vanishes.
    let o = outcome(&[(0, 1.0)], &[(0, 2.0)], 16.0);
    assert_eq!(lambda_update_highrate(NEG_INF, 0.0, &[0.5], &o, 1, &mut h).unwrap(), NEG_INF);
}

#[test]
fn lambda_is_a_probability() {
    // ln P*_T ≤ 0 with exact arithmetic.
    let spec = build_nr5g(64, 32, DynFrozenCfg::default()).unwrap();
    let mut r = lcg(5);
    for _ in 0..200 {
        let llrs: Vec<f64> = (0..64).map(|_| (r() - 0.3) * 5.0).collect();
        let a = so_fscl_decode(&llrs, &spec, 4, ArithMode::Exact).unwrap();
        let b = so_scl_decode(&llrs, &spec, 4, ArithMode::Exact).unwrap();
        assert!(a.lambda_t <= 1e-6 && b.lambda_t <= 1e-6);
        assert!((0.0..=1.0).contains(&a.gamma_star));
    }
}

#[test]
fn full_list_gives_map_llrs() {
    // L = 2^K keeps the whole codebook: no unvisited mass, APP = MAP.
    let frozen: Vec<bool> = (0..16).map(|i| ![3, 5, 6, 7, 11, 13, 14, 15].contains(&i)).collect();
    let spec = PolarCodeSpec::from_frozen(frozen, DynFrozenCfg::static_zero()).unwrap();
    let mut r = lcg(9);
    let llrs: Vec<f64> = (0..16).map(|_| (r() - 0.3) * 4.0).collect();
    let out = so_fscl_decode(&llrs, &spec, 256, ArithMode::Exact).unwrap();
    assert_eq!(out.lambda_t, NEG_INF);
    assert_eq!(out.candidates.len(), 256);
    for j in 0..16 {
        let (mut s0, mut s1) = (NEG_INF, NEG_INF);
        for w in 0..256u32 {
            let info: Vec<u8> = (0..8).map(|t| ((w >> t) & 1) as u8).collect();
            let c = spec.encode_info(&info).unwrap();
            let lp: f64 = -c.iter().zip(&llrs).map(|(&b, &x)| softplus(-(1.0 - 2.0 * b as f64) * x, ArithMode::Exact)).sum::<f64>();
            if c[j] == 0 {
                s0 = box_plus(s0, lp);
            } else {
                s1 = box_plus(s1, lp);
            }
        }
        let want = if s1 == NEG_INF { LLR_MAX } else if s0 == NEG_INF { -LLR_MAX } else { (s0 - s1).clamp(-LLR_MAX, LLR_MAX) };
        assert!((out.app_llrs[j] - want).abs() < 1e-9, "bit {j}: {} vs {want}", out.app_llrs[j]);
    }
}

#[test]
fn hwf_decodes_like_exact_at_high_snr() {
    let spec = build_nr5g(128, 64, DynFrozenCfg::default()).unwrap();
    let info: Vec<u8> = (0..64).map(|i| (i % 5 < 2) as u8).collect();
    let c = spec.encode_info(&info).unwrap();
    let llrs: Vec<f64> = c.iter().enumerate().map(|(i, &b)| (1.0 - 2.0 * b as f64) * (6.0 + (i % 3) as f64)).collect();
    let a = so_fscl_decode(&llrs, &spec, 4, ArithMode::Hwf).unwrap();
    assert_eq!(a.best().codeword, c);
    for (x, &b) in a.app_llrs.iter().zip(&c) {
        assert_eq!((*x < 0.0) as u8, b);
    }
}
