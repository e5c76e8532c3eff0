use nalgebra::DMatrix;
use proptest::prelude::*;

use fockent::asymptotics::{
    alice_number_variance, copies, ep_split_singles_asymptote, ep_split_singles_exact,
};
use fockent::bipartite::{
    project_local_number, reduced_density_matrix, sector_decomposition, CoefficientMatrix,
};
use fockent::fock::{compose_with, SignRule};
use fockent::measures::{
    full_report, mode_entanglement, mode_entanglement_via_density, modified_single_particle_dm,
    particle_entanglement, particle_entanglement_with, single_particle_entropy,
    von_neumann_entropy,
};
use fockent::sampling::StateSampler;
use fockent::{
    compose, format_state, parse_state, Amplitude, Error, Execution, FockState, ModePartition,
    Side, Statistics,
};

const TOL: f64 = 1e-9;

fn stats_strategy() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Boson), Just(Statistics::Fermion)]
}

fn sample(seed: u64, stats: Statistics) -> (FockState, ModePartition) {
    StateSampler::new(seed).random_state(stats)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn number_operator_expectations_are_nonnegative(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, _) = sample(seed, stats);
        for m in 0..s.mode_count() {
            let lowered = s.annihilate(m).unwrap();
            let n = lowered.inner_product(&lowered).unwrap();
            prop_assert!(n.re >= 0.0 && n.im.abs() < 1e-12);
        }
    }

    #[test]
    fn boson_lowering_undoes_raising_on_empty_modes(seed in any::<u64>()) {
        let (s, _) = sample(seed, Statistics::Boson);
        for m in 0..s.mode_count() {
            let empty = s.filter(|o| o.as_slice()[m] == 0);
            if empty.is_zero() {
                continue;
            }
            let back = empty.create(m).unwrap().annihilate(m).unwrap();
            prop_assert_eq!(back.len(), empty.len());
            for ((o1, a1), (o2, a2)) in back.terms().zip(empty.terms()) {
                prop_assert_eq!(o1, o2);
                prop_assert!((a1 - a2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fermion_creators_anticommute(seed in any::<u64>(), i in 0usize..6, j in 0usize..6) {
        let (s, _) = sample(seed, Statistics::Fermion);
        let m = s.mode_count();
        let (i, j) = (i % m, j % m);
        prop_assume!(i != j);
        let ij = s.create(j).unwrap().create(i).unwrap();
        let ji = s.create(i).unwrap().create(j).unwrap();
        prop_assert!(ij.add(&ji).unwrap().is_zero());
    }

    #[test]
    fn compose_multiplies_norms(a in any::<u64>(), b in any::<u64>(), stats in stats_strategy()) {
        let (x, px) = sample(a, stats);
        let (y, py) = sample(b, stats);
        let (xy, _) = compose(&x, px, &y, py).unwrap();
        let want = x.norm_sqr() * y.norm_sqr();
        prop_assert!((xy.norm_sqr() - want).abs() <= 1e-12 * want.max(1.0));
        prop_assert_eq!(xy.particle_number(), x.particle_number() + y.particle_number());
    }

    #[test]
    fn compose_is_associative_up_to_sign(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), stats in stats_strategy()) {
        let mut sampler = StateSampler::new(a ^ b.rotate_left(17) ^ c.rotate_left(34));
        let (x, px) = sampler.random_state(stats);
        let (y, py) = sampler.random_state(stats);
        let (z, pz) = sampler.random_state(stats);
        let (xy, pxy) = compose(&x, px, &y, py).unwrap();
        let (left, pl) = compose(&xy, pxy, &z, pz).unwrap();
        let (yz, pyz) = compose(&y, py, &z, pz).unwrap();
        let (right, pr) = compose(&x, px, &yz, pyz).unwrap();
        prop_assert_eq!(pl, pr);
        let overlap = left.inner_product(&right).unwrap();
        let norm = left.norm_sqr();
        // Equal up to a global sign.
        prop_assert!((overlap.norm() - norm).abs() <= 1e-9 * norm);
        prop_assert!(overlap.im.abs() <= 1e-9 * norm);
    }

    #[test]
    fn fermion_sign_rule_leaves_bipartite_measures_unchanged(a in any::<u64>(), b in any::<u64>()) {
        let (x, px) = sample(a, Statistics::Fermion);
        let (y, py) = sample(b, Statistics::Fermion);
        let (signed, p) = compose_with(&x, px, &y, py, SignRule::Canonical).unwrap();
        let (plain, q) = compose_with(&x, px, &y, py, SignRule::Omitted).unwrap();
        prop_assert_eq!(p, q);
        prop_assert!((mode_entanglement(&signed, p).unwrap() - mode_entanglement(&plain, q).unwrap()).abs() < TOL);
        prop_assert!((particle_entanglement(&signed, p).unwrap() - particle_entanglement(&plain, q).unwrap()).abs() < TOL);
        prop_assert!((alice_number_variance(&signed, p).unwrap() - alice_number_variance(&plain, q).unwrap()).abs() < TOL);
    }

    #[test]
    fn sectors_partition_the_state(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        let d = sector_decomposition(&s, p).unwrap();
        let total: f64 = d.iter().map(|x| x.probability).sum();
        prop_assert!((total - 1.0).abs() < TOL);

        let mut rebuilt = FockState::zero(s.stats(), s.mode_count(), s.particle_number());
        for (i, a) in d.iter().enumerate() {
            prop_assert!(a.state.terms().all(|(o, _)| p.alice_count(o) == a.n));
            prop_assert!((a.probability - a.state.norm_sqr() / s.norm_sqr()).abs() < 1e-12);
            let (proj, prob) = project_local_number(&s, p, a.n).unwrap();
            prop_assert_eq!(&proj, &a.state);
            prop_assert!((prob - a.probability).abs() < 1e-15);
            for b in d.iter().skip(i + 1) {
                prop_assert_eq!(a.state.inner_product(&b.state).unwrap(), Amplitude::new(0.0, 0.0));
            }
            rebuilt = rebuilt.add(&a.state).unwrap();
        }
        prop_assert_eq!(rebuilt, s);
    }

    #[test]
    fn reduced_states_share_spectra(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        let a = reduced_density_matrix(&s, p, Side::Alice).unwrap().eigenvalues();
        let b = reduced_density_matrix(&s, p, Side::Bob).unwrap().eigenvalues();
        let nz = |v: Vec<f64>| v.into_iter().filter(|&x| x > 1e-9).collect::<Vec<_>>();
        let (a, b) = (nz(a), nz(b));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < TOL);
        }
    }

    #[test]
    fn sector_reduced_state_lives_on_its_block(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        for sec in sector_decomposition(&s, p).unwrap().iter() {
            let rho = reduced_density_matrix(&sec.state, p, Side::Alice).unwrap();
            for label in rho.labels() {
                match label {
                    fockent::bipartite::BasisLabel::Occupation(o) => prop_assert_eq!(o.total(), sec.n),
                    other => prop_assert!(false, "unexpected label {other}"),
                }
            }
        }
    }

    #[test]
    fn entropy_routes_agree(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        let svd = mode_entanglement(&s, p).unwrap();
        let eig = mode_entanglement_via_density(&s, p).unwrap();
        prop_assert!((svd - eig).abs() < TOL, "{svd} vs {eig}");
    }

    #[test]
    fn execution_modes_agree(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        let seq = particle_entanglement_with(&s, p, Execution::Sequential).unwrap();
        let def = particle_entanglement_with(&s, p, Execution::default()).unwrap();
        prop_assert!((seq - def).abs() < 1e-12);
    }

    #[test]
    fn measures_ignore_normalization(seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0, stats in stats_strategy()) {
        prop_assume!(re.hypot(im) > 1e-3);
        let (s, p) = sample(seed, stats);
        let t = s.scale(Amplitude::new(re, im));
        let (a, b) = (full_report(&s, p).unwrap(), full_report(&t, p).unwrap());
        prop_assert!((a.e_m - b.e_m).abs() < TOL);
        prop_assert!((a.e_p - b.e_p).abs() < TOL);
        prop_assert!((a.variance_alice - b.variance_alice).abs() < TOL);
        match (a.s_single, b.s_single) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() < TOL),
            (None, None) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn report_invariants(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        let r = full_report(&s, p).unwrap();
        prop_assert!(r.e_p <= r.e_m + TOL);
        prop_assert!(r.e_p >= -TOL && r.e_m >= -TOL && r.variance_alice >= -TOL);
        if let Some(qc) = r.qc_fermion {
            prop_assert!(qc >= -TOL);
        }
    }

    #[test]
    fn alice_basis_changes_preserve_mode_entanglement(seed in any::<u64>(), stats in stats_strategy()) {
        let mut sampler = StateSampler::new(seed);
        let (s, p) = sampler.random_state(stats);
        let cm = CoefficientMatrix::from_state(&s, p).unwrap();
        let u = sampler.random_unitary(cm.rows().len());
        let rotated = cm.transform_rows(&u).unwrap();
        let before = mode_entanglement(&s, p).unwrap();
        let after = fockent::measures::coefficient_entropy(&rotated);
        prop_assert!((before - after).abs() < TOL, "{before} vs {after}");
    }

    #[test]
    fn sector_preserving_basis_changes_preserve_particle_entanglement(seed in any::<u64>(), stats in stats_strategy()) {
        let mut sampler = StateSampler::new(seed);
        let (s, p) = sampler.random_state(stats);
        let cm = CoefficientMatrix::from_state(&s, p).unwrap();
        let rows = cm.rows();
        let mut u = DMatrix::<Amplitude>::zeros(rows.len(), rows.len());
        let mut start = 0;
        while start < rows.len() {
            let n = rows[start].total();
            let end = (start..rows.len()).find(|&i| rows[i].total() != n).unwrap_or(rows.len());
            let block = sampler.random_unitary(end - start);
            u.view_mut((start, start), (end - start, end - start)).copy_from(&block);
            start = end;
        }
        let rotated = cm.transform_rows(&u).unwrap().to_state(stats);
        // A fermionic rotation may mix in doubly occupied rows only if such
        // rows exist; for fermions they never do.
        let rotated = rotated.unwrap();
        let before = particle_entanglement(&s, p).unwrap();
        let after = particle_entanglement(&rotated, p).unwrap();
        prop_assert!((before - after).abs() < TOL, "{before} vs {after}");
    }

    #[test]
    fn mode_entanglement_ignores_statistics(seed in any::<u64>()) {
        let (f, p) = sample(seed, Statistics::Fermion);
        let b = FockState::new(Statistics::Boson, f.mode_count(), f.terms().map(|(o, a)| (o.clone(), *a))).unwrap();
        prop_assert!((mode_entanglement(&f, p).unwrap() - mode_entanglement(&b, p).unwrap()).abs() < TOL);
        prop_assert!((particle_entanglement(&f, p).unwrap() - particle_entanglement(&b, p).unwrap()).abs() < TOL);
    }

    #[test]
    fn particle_entanglement_needs_boson_correlation(seed in any::<u64>()) {
        let (s, p) = StateSampler::new(seed).random_two_particle(Statistics::Boson);
        let ep = particle_entanglement(&s, p).unwrap();
        let sb = single_particle_entropy(&s).unwrap();
        if ep > TOL {
            prop_assert!(sb > TOL);
        }
        if sb < TOL {
            prop_assert!(ep < TOL);
        }
    }

    #[test]
    fn modified_matrix_weighted_entropy_is_particle_entanglement(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = StateSampler::new(seed).random_two_particle(stats);
        let ep = particle_entanglement(&s, p).unwrap();
        match modified_single_particle_dm(&s, p) {
            Ok((rho, p1)) => prop_assert!((p1 * von_neumann_entropy(&rho).unwrap() - ep).abs() < TOL),
            Err(Error::EmptySector(1)) => prop_assert!(ep.abs() < TOL),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn format_then_parse_round_trips(seed in any::<u64>(), stats in stats_strategy()) {
        let (s, p) = sample(seed, stats);
        let text = format_state(&s, p);
        let (t, q) = parse_state(&text, stats).unwrap();
        prop_assert_eq!(p, q);
        prop_assert_eq!(s.len(), t.len());
        for ((o1, a1), (o2, a2)) in s.terms().zip(t.terms()) {
            prop_assert_eq!(o1, o2);
            prop_assert!((a1 - a2).norm() <= 1e-12);
        }
    }

    #[test]
    fn parsing_is_total(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse_state(&text, Statistics::Boson);
    }
}

#[test]
fn split_single_family_converges_monotonically() {
    let grid: Vec<u64> = (2..=10).map(|k| 1u64 << k).collect();
    let gaps: Vec<f64> = grid
        .iter()
        .map(|&n| (ep_split_singles_exact(n) - ep_split_singles_asymptote(n)).abs())
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
    let ratios: Vec<f64> = grid.iter().map(|&n| ep_split_singles_exact(n) / n as f64).collect();
    for w in ratios.windows(2) {
        assert!(w[1] > w[0]);
    }
    assert!(ratios[7] > 0.98, "ratio at 512: {}", ratios[7]);
}

#[test]
fn copies_estimate_residual_stays_bounded() {
    // C copies of the four-term doubled state: the estimate drops an O(1)
    // constant, so only boundedness of the residual is checked.
    let (d, q) = parse_state("(|0,1>+|1,0>)^2", Statistics::Boson).unwrap();
    let rows = fockent::asymptotics::copies_scaling(&d, q, 6).unwrap();
    for r in &rows {
        assert!(r.difference.unwrap().abs() < 3.0, "{r:?}");
        let exact = ep_split_singles_exact(2 * r.count as u64);
        assert!((r.exact - exact).abs() < TOL);
    }
    let steps: Vec<f64> = rows.windows(2).map(|w| (w[1].difference.unwrap() - w[0].difference.unwrap()).abs()).collect();
    for w in steps.windows(2) {
        assert!(w[1] < w[0], "{steps:?}");
    }
    assert!((rows[1].exact - 1.969_360_937_770_433_5).abs() < 1e-9);
    let (c, pc) = copies(&d, q, 3).unwrap();
    assert_eq!(c.mode_count(), 12);
    assert_eq!(pc.alice_modes(), 6);
}

#[test]
fn three_split_singles_match_brute_force() {
    // Built through composition and evaluated sector by sector.
    let (s, p) = parse_state("(|0,1>+|1,0>)^3", Statistics::Boson).unwrap();
    let ep = particle_entanglement(&s, p).unwrap();
    assert!((ep - 1.188_721_875_540_867).abs() < 1e-12);
    assert!((ep_split_singles_exact(3) - ep).abs() < 1e-12);
}

#[test]
fn superadditivity_equality_can_hold_with_both_variances_nonzero() {
    // Alice's number is 0 or 1 in the first state and 0 or 3 in the
    // second; no two sector pairs share a total, so the gap vanishes.
    let (x, px) = parse_state("|0,1>+|1,0>", Statistics::Boson).unwrap();
    let (y, py) = parse_state("|000,111>+|111,000>", Statistics::Fermion)
        .map(|(s, p)| {
            (
                FockState::new(Statistics::Boson, s.mode_count(), s.terms().map(|(o, a)| (o.clone(), *a))).unwrap(),
                p,
            )
        })
        .unwrap();
    let r = fockent::asymptotics::check_superadditivity(&x, px, &y, py).unwrap();
    assert!(r.v_psi > 0.0 && r.v_phi > 0.0);
    assert!(!r.sector_overlap);
    assert!(r.gap.abs() < 1e-12, "{r:?}");
}

#[test]
fn single_particle_entropy_agrees_across_statistics_on_reference_rows() {
    for row in fockent::table::reference_rows() {
        let Ok((f, _)) = parse_state(&row.state, Statistics::Fermion) else {
            continue;
        };
        if f.particle_number() != 2 {
            continue;
        }
        let (b, _) = parse_state(&row.state, Statistics::Boson).unwrap();
        let (sf, sb) = (single_particle_entropy(&f).unwrap(), single_particle_entropy(&b).unwrap());
        assert!((sf - sb).abs() < TOL, "{}: S_f {sf} vs S_b {sb}", row.state);
    }
}

#[test]
fn single_particle_entropy_depends_on_statistics_in_general() {
    // Same amplitude map; the boson coefficient matrix is symmetric with
    // spectrum (2, -1, -1), the fermion one antisymmetric of rank 2.
    let text = "|11,0>+|10,1>+|01,1>";
    let (b, _) = parse_state(text, Statistics::Boson).unwrap();
    let (f, _) = parse_state(text, Statistics::Fermion).unwrap();
    let sb = single_particle_entropy(&b).unwrap();
    let sf = single_particle_entropy(&f).unwrap();
    let want_b = -(2.0 / 3.0 * (2.0f64 / 3.0).log2() + 2.0 / 6.0 * (1.0f64 / 6.0).log2());
    assert!((sb - want_b).abs() < 1e-12);
    assert!((sf - 1.0).abs() < 1e-12);
}
