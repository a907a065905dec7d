use alcisep_core::gen::{random_labeled_kb, rng, KbShape};
use alcisep_core::strong::{strong_separable, StrongBudget};
use alcisep_core::Reasoner;

#[test]
#[ignore]
fn dbg_singleton_timing() {
    let mut r = rng(1010);
    let mut done = 0usize;
    let mut trial = 0usize;
    while done < 200 {
        trial += 1;
        let mut l = random_labeled_kb(
            &mut r,
            KbShape { constants: 4, max_binary: 3, ..Default::default() },
        );
        let cons: Vec<String> = l.kb.database.constants().into_iter().collect();
        if cons.len() < 3 {
            continue;
        }
        l.positives = cons.iter().take(2).cloned().collect();
        l.negatives = cons.iter().skip(2).take(2).cloned().collect();
        if l.negatives.is_empty() {
            continue;
        }
        let reasoner = Reasoner::new(l.kb.clone());
        if !reasoner.kb_satisfiable() || reasoner.table().type_count() > 10 {
            continue;
        }
        let t0 = std::time::Instant::now();
        let combined = strong_separable(&reasoner, &l, StrongBudget::default());
        let dt = t0.elapsed().as_millis();
        if dt > 400 {
            println!(
                "SLOW trial {trial}: {dt}ms types={} sep={} kb={:?} sigma={}",
                reasoner.table().type_count(),
                combined.separable,
                l.kb,
                l.sigma
            );
        }
        done += 1;
        if done % 25 == 0 {
            println!("done {done} (trial {trial})");
        }
    }
}
