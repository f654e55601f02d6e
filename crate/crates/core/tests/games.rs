mod common;

use common::*;
use consortia::analysis::{
    spoa_sweep, sweep_csv, worst_case_search, Game, SearchConfig, SearchFamily, SweepFamily, ValueGrid,
};
use consortia::generators::{paper_instance, PaperInstance, PaperParams};
use consortia::{
    ccc_report, find_sow, is_connected, is_eligible, magnet_is_strong, magnet_report, Consortium, Instance,
    ProposalProfile, Rational,
};

fn cons(ids: &[usize]) -> Consortium {
    Consortium::new(ids.iter().copied()).unwrap()
}

#[test]
fn eligibility_is_not_monotone_under_superset() {
    let line = Instance::new(4, [(0, 1), (1, 2), (2, 3)], [5, 0, 5, 0].map(r).to_vec(), r(8), r(1)).unwrap();
    assert!(is_eligible(&line, &cons(&[0, 1, 2])));
    // Same sum, but the induced subgraph is split.
    assert!(!is_connected(&line, &cons(&[0, 2, 3])));
    assert!(!is_eligible(&line, &cons(&[0, 2, 3])));
}

#[test]
fn instance_json_is_byte_stable() {
    let text = r#"{"n":3,"edges":[[2,1],[0,1]],"values":[3,"8/2","1/2"],"threshold":6,"prize":"2"}"#;
    let inst = Instance::from_json(text).unwrap();
    let canon = inst.to_json();
    assert_eq!(canon, r#"{"n":3,"edges":[[0,1],[1,2]],"values":["3","4","1/2"],"threshold":"6","prize":"2"}"#);
    assert_eq!(Instance::from_json(&canon).unwrap().to_json(), canon);
    for bad in [
        r#"{"n":2,"edges":[[0,1]],"values":[7,1],"threshold":7,"prize":1}"#,
        r#"{"n":2,"edges":[[0,1]],"values":[2,2],"threshold":7,"prize":1}"#,
        r#"{"n":2,"edges":[[0,2]],"values":[5,5],"threshold":7,"prize":1}"#,
        r#"{"n":2,"edges":[[0,1]],"values":[5,5],"threshold":7,"prize":0}"#,
    ] {
        assert!(Instance::from_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn sweeps_move_in_the_documented_direction() {
    let clique = spoa_sweep(SweepFamily::Clique, 2..=4, Game::Magnet, 6).unwrap();
    assert!(clique.windows(2).all(|w| w[1].observed < w[0].observed));
    let line = spoa_sweep(SweepFamily::Line, 3..=5, Game::Magnet, 9).unwrap();
    assert!(line.windows(2).all(|w| w[1].observed > w[0].observed));
    assert!(line.iter().all(|row| row.observed < r(2) && row.observed <= row.bound));
    let ccc = spoa_sweep(SweepFamily::Clique, [3], Game::Ccc, 6).unwrap();
    assert!(ccc[0].observed <= q(3, 2));
    assert!(sweep_csv(&line).lines().nth(1).unwrap().starts_with("3,magnet,line,149,90,5,3"));
}

#[test]
fn line_sweep_respects_the_size_limit() {
    let e = spoa_sweep(SweepFamily::Line, [4], Game::Magnet, 6).unwrap_err();
    assert_eq!(e.name(), "TooLarge");
}

#[test]
fn lower_bound_families_converge_as_eps_halves() {
    for k in [2usize, 3, 4] {
        let mut prev = r(0);
        for eps in [r(1), q(1, 2), q(1, 4)] {
            let inst = paper_instance(PaperInstance::CccCliqueLower, &PaperParams::new(r(120), eps).k(k)).unwrap();
            let spoa = ccc_report(&inst, 6).unwrap().spoa;
            assert!(spoa >= prev, "ccc k={k} eps={eps}");
            prev = spoa;
        }
        let mut prev = r(0);
        let t = r(12 * k as i64);
        for eps in [r(4), r(2), r(1), q(1, 2)] {
            let inst = paper_instance(PaperInstance::MagnetCliqueLower, &PaperParams::new(t, eps).k(k)).unwrap();
            let spoa = magnet_report(&inst, 6).unwrap().report.spoa;
            assert!(spoa >= prev, "magnet k={k} eps={eps}");
            prev = spoa;
        }
    }
    let mut prev = r(0);
    for eps in [r(3), q(3, 2), q(3, 4)] {
        let inst = paper_instance(PaperInstance::LineWorstcase, &PaperParams::new(r(90), eps).n(3)).unwrap();
        let spoa = magnet_report(&inst, 5).unwrap().report.spoa;
        assert!(spoa > prev);
        prev = spoa;
    }
}

#[test]
fn generated_instances_validate_across_the_default_grid() {
    for t in [6i64, 12, 30, 120] {
        for eps in [r(1), q(1, 2)] {
            for k in 2..=5 {
                let p = PaperParams::new(r(t), eps).k(k);
                paper_instance(PaperInstance::MagnetCliqueLower, &p).unwrap();
                if eps * Rational::from(k) < r(t) && r(t) / Rational::from(k - 1) >= eps {
                    paper_instance(PaperInstance::CccCliqueLower, &p).unwrap();
                }
            }
            for n in 3..=5 {
                let p = PaperParams::new(r(t), eps).n(n);
                paper_instance(PaperInstance::LineWorstcase, &p).unwrap();
                paper_instance(PaperInstance::GoldrushWorst, &p).unwrap();
            }
        }
    }
}

#[test]
fn search_finds_an_unstable_optimum() {
    let mut config = SearchConfig::new(Game::Ccc, SearchFamily::All, 4);
    config.grids = vec![ValueGrid::standard(r(6), r(1))];
    let candidates = consortia::analysis::search_candidates(&config).unwrap();
    let found = candidates.iter().find(|inst| {
        let sow = find_sow(inst).unwrap().consortium;
        ccc_report(inst, 6).is_ok_and(|rep| !rep.se_winners.contains(&sow))
    });
    let inst = found.expect("some optimum is not an equilibrium winner");
    assert!(ccc_report(inst, 6).unwrap().spoa > r(1));
}

#[test]
fn search_finds_spos_strictly_between_one_and_spoa() {
    let mut config = SearchConfig::new(Game::Magnet, SearchFamily::All, 5);
    config.grids = ValueGrid::defaults();
    let res = worst_case_search(&config).unwrap();
    let hit = res.spos_gap.expect("an instance with 1 < spos < spoa");
    assert!(r(1) < hit.spos && hit.spos < hit.spoa);
    let inst = Instance::from_json(&serde_json::to_string(&hit.instance).unwrap()).unwrap();
    let rep = magnet_report(&inst, 6).unwrap().report;
    assert_eq!((rep.spoa, rep.spos), (hit.spoa, hit.spos));
}

#[test]
fn equilibrium_winner_reached_only_through_appeals() {
    // The optimum {0,1,2} wins every equilibrium, yet only after round 1
    // elects {1,2}: proposing it outright lets {1,4} break away and win.
    let inst = Instance::from_json(
        r#"{"n":6,"edges":[[0,2],[0,3],[0,5],[1,2],[1,4],[2,3]],
            "values":[690,778,561,617,525,319],"threshold":1000,"prize":1}"#,
    )
    .unwrap();
    let rep = magnet_report(&inst, 6).unwrap().report;
    let z = cons(&[0, 1, 2]);
    assert_eq!(rep.se_winners, vec![z.clone()]);
    assert!(rep.equilibria.iter().all(|e| e.round1 == cons(&[1, 2])));
    let direct = ProposalProfile::with_singletons(6, vec![z]).unwrap();
    let dev = magnet_is_strong(&inst, &direct);
    assert_eq!(dev.witness().unwrap().coalition, cons(&[1, 4]));
}

#[test]
fn no_equilibrium_when_averages_tie() {
    // {0,4} ties {1,2} and wins on the member-list order; the appeal then
    // pulls 1 back in, which {1,2} undoes again.
    let inst = Instance::from_json(
        r#"{"n":5,"edges":[[0,1],[0,3],[0,4],[1,2]],"values":[1,5,1,2,5],"threshold":6,"prize":1}"#,
    )
    .unwrap();
    assert_eq!(magnet_report(&inst, 6).unwrap_err().name(), "NoStrongEquilibriumWithWinner");
    let naive = se_report(&inst, &|b: &[Set]| magnet_winner(&inst, b));
    assert!(naive.se_winners.is_empty());
}

#[cfg(feature = "parallel")]
#[test]
fn results_do_not_depend_on_thread_count() {
    let inst = paper_instance(PaperInstance::LineWorstcase, &PaperParams::new(r(120), r(1)).n(4)).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = single.install(|| serde_json::to_string(&magnet_report(&inst, 7).unwrap()).unwrap());
    let b = serde_json::to_string(&magnet_report(&inst, 7).unwrap()).unwrap();
    assert_eq!(a, b);
    let mut config = SearchConfig::new(Game::Ccc, SearchFamily::Tree, 5);
    config.grids = vec![ValueGrid::standard(r(12), r(1))];
    let a = single.install(|| worst_case_search(&config).unwrap());
    assert_eq!(a, worst_case_search(&config).unwrap());
}
