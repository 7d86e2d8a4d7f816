//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero when
//! any criterion fails.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use windmill::axioms::{check_axioms, Axiom};
use windmill::cli::run_command;
use windmill::group::GroupWord;
use windmill::hull::{check_hull_lemmas, convex_closure, InvarianceStatus, LemmaInputs, LemmaStatus, Levels, Region};
use windmill::ladder::calibrate_constants;
use windmill::metrics::{DerivedMetrics, Space};
use windmill::models::adversarial::{gen_adversarial, AdversarialKind};
use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::models::oracle::membership_oracle;
use windmill::models::tree::{gen_tree_segments, TreeParams};
use windmill::properties::{check_exact_equality, check_properties};
use windmill::rational::int;
use windmill::rotors::greendlinger::{greendlinger, ShorteningOptions};
use windmill::rotors::presentation::{presentation, reduced_words, PresentationDoc, PresentationForm};
use windmill::rotors::tree::TreeOptions;
use windmill::rotors::windmill::{run_windmill, WindmillRun};
use windmill::rotors::{FamilyOptions, RotatingFamily};
use windmill::CompositeSystem;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tree_params(seed: u64) -> TreeParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TreeParams {
        vertices: rng.gen_range(8..=200),
        segments: rng.gen_range(4..=40),
        colors: rng.gen_range(1..=3),
        overlap: 0,
    }
}

fn tree_instances() -> Vec<CompositeSystem> {
    (0..100).map(|s| gen_tree_segments(&tree_params(s), s).and_then(|t| t.system()).expect("tree instance")).collect()
}

fn axiom_suite(trees: &[CompositeSystem]) -> Outcome {
    for (s, sys) in trees.iter().enumerate() {
        let r = check_axioms(sys, sys.theta());
        ensure(r.passes(), || format!("tree seed {s} fails {:?}", r.failing()))?;
        ensure(r.minimal_theta.as_ref().is_some_and(|t| t <= sys.theta()), || format!("tree seed {s}: no minimal theta"))?;
    }
    let table = [
        (AdversarialKind::AsymmetricDpi, Axiom::Symmetry),
        (AdversarialKind::BehrstockBreak, Axiom::Behrstock),
        (AdversarialKind::SeparationBreak, Axiom::Separation),
    ];
    for (kind, axiom) in table {
        let inst = gen_adversarial(kind, 1).map_err(|e| e.to_string())?;
        let r = check_axioms(&inst.system, inst.system.theta());
        ensure(r.failing() == vec![axiom], || format!("{kind} fails {:?}", r.failing()))?;
        ensure(r.outcome(axiom).witnesses.contains(&inst.target), || format!("{kind}: target not among witnesses"))?;
    }
    let inst = gen_adversarial(AdversarialKind::RotationTooSmall, 1).map_err(|e| e.to_string())?;
    let params = inst.rotation_params.ok_or("rotation kind without model parameters")?;
    let model = GraphProductModel::new_unrestricted(params).map_err(|e| e.to_string())?;
    let fam = RotatingFamily::new(&model).verify(&FamilyOptions::default());
    ensure(!fam.rotation_bound.passes() && !fam.rotation_bound.witnesses.is_empty(), || "q = 1 passes the rotation bound".into())?;
    let others = [&fam.conjugation, &fam.commutation, &fam.shift, &fam.fixes_inactive, &fam.equivariance];
    ensure(others.iter().all(|c| c.passes()), || "rotation kind fails checks other than the rotation bound".into())?;
    Ok(format!("{} trees pass, 4 adversarial kinds fail only their target", trees.len()))
}

fn property_suite(trees: &[CompositeSystem]) -> Outcome {
    let mut triples = 0;
    for (s, sys) in trees.iter().enumerate() {
        let metrics = DerivedMetrics::exact(sys);
        let sp = Space::new(sys, &metrics);
        let ladder = calibrate_constants(&sp).map_err(|e| format!("tree seed {s}: {e}"))?;
        let r = check_properties(&sp, &ladder);
        ensure(r.passes(), || format!("tree seed {s}: {:?}", r.outcomes.iter().filter(|o| !o.passes()).collect::<Vec<_>>()))?;
        let eq = check_exact_equality(&sp);
        ensure(eq.passes(), || format!("tree seed {s}: modified distance differs from raw at {:?}", eq.witnesses))?;
        triples += eq.checked;
    }
    Ok(format!("all seven properties on {} instances, exact equality on {triples} triples", trees.len()))
}

fn family_suite(model: &GraphProductModel) -> Outcome {
    ensure(model.q() == 5027, || format!("q = {}", model.q()))?;
    let r = RotatingFamily::new(model).verify(&FamilyOptions::default());
    ensure(r.passes(), || format!("{r:?}"))?;
    Ok(format!("q = 5027, rotation bound on {} triples", r.rotation_bound.checked))
}

struct Run {
    model: GraphProductModel,
    run: WindmillRun,
    doc: PresentationDoc,
}

fn windmill_run(params: GraphProductParams) -> Result<Run, String> {
    let model = GraphProductModel::new(params).map_err(|e| e.to_string())?;
    let radius = model.params().radius as usize;
    let run = run_windmill(&RotatingFamily::new(&model), 32, &TreeOptions::default()).map_err(|e| e.to_string())?;
    let doc = presentation(&model, &run.windmill, PresentationForm::Transversal, radius).map_err(|e| e.to_string())?;
    Ok(Run { model, run, doc })
}

fn generator_images(r: &Run) -> Vec<GroupWord> {
    r.doc.generators.iter().map(|g| r.model.rotation(&g.coset)).collect()
}

fn evaluate(r: &Run, images: &[GroupWord], w: &[(usize, i64)]) -> GroupWord {
    let grp = r.model.group();
    w.iter().fold(GroupWord::identity(), |acc, &(g, e)| grp.mul(&acc, &grp.pow(&images[g - 1], e)))
}

fn free_product_run(r: &Run) -> Outcome {
    ensure(r.run.windmill.absorbed(), || "windmill not absorbed".into())?;
    ensure(r.doc.relators.is_empty(), || format!("{} relators", r.doc.relators.len()))?;
    let images = generator_images(r);
    let (grp, q) = (r.model.group(), r.model.q());
    for g in &images {
        ensure(membership_oracle(grp, q, g.syllables()).in_kernel, || format!("{} outside the kernel", g.render(q)))?;
    }
    let words = reduced_words(images.len(), 8);
    for w in words.iter().filter(|w| !w.is_empty()) {
        let v = membership_oracle(grp, q, evaluate(r, &images, w).syllables());
        ensure(!v.trivial_in_group, || format!("relation of length {} among generators: {w:?}", w.len()))?;
    }
    Ok(format!("{} steps, {} generators, {} words of length at most 8 independent", r.run.trace.len(), images.len(), words.len() - 1))
}

fn graph_product_run(r: &Run) -> Outcome {
    ensure(r.run.windmill.absorbed(), || "windmill not absorbed".into())?;
    ensure(r.doc.verified, || "a relator does not evaluate to the identity".into())?;
    ensure(r.doc.complete_within_radius, || "a commuting conjugate pair has no relator".into())?;
    let images = generator_images(r);
    let (grp, q) = (r.model.group(), r.model.q());
    for rel in &r.doc.relators {
        ensure(rel.kind == "commutator" && rel.elements.len() == 2, || format!("unexpected relator {}", rel.text))?;
        let (y, moved) = (&rel.elements[0], &rel.elements[1]);
        ensure(!r.model.active(moved, y), || format!("{}: {} is active at {}", rel.text, r.model.label(moved), r.model.label(y)))?;
        let value = evaluate(r, &images, &rel.syllables);
        ensure(value.is_empty(), || format!("{} evaluates to {}", rel.text, value.render(q)))?;
        let expansion: Vec<(usize, i64)> = rel.syllables.iter().flat_map(|&(g, e)| grp.pow(&images[g - 1], e).syllables().to_vec()).collect();
        ensure(membership_oracle(grp, q, &expansion).trivial_in_group, || format!("{} is not oracle-trivial", rel.text))?;
    }
    ensure(!r.doc.relators.is_empty(), || "no relators".into())?;
    Ok(format!("{} relators verified, converse complete within word length {}", r.doc.relators.len(), r.doc.word_budget))
}

fn greendlinger_suite(r: &Run) -> Outcome {
    let fam = RotatingFamily::new(&r.model);
    let images = generator_images(r);
    let (grp, q) = (r.model.group(), r.model.q());
    let ladder = r.model.ladder();
    let bound = int(2) * &ladder.theta_p + int(3) * &ladder.kappa;
    let mut swept = 0;
    let mut most = 0;
    for w in reduced_words(images.len(), 8) {
        let gamma = evaluate(r, &images, &w);
        if membership_oracle(grp, q, gamma.syllables()).trivial_in_group {
            continue;
        }
        let opts = ShorteningOptions { max_steps: Some(w.len()), ..ShorteningOptions::default() };
        let rep = greendlinger(&fam, &gamma, &opts).map_err(|e| format!("{w:?}: {e}"))?;
        ensure(rep.reduced, || format!("{w:?} not reduced"))?;
        ensure(rep.steps.iter().all(|s| s.after <= bound), || format!("{w:?}: shortening pair exceeds {bound}"))?;
        most = most.max(rep.steps.len());
        swept += 1;
    }
    Ok(format!("{swept} words reduced, at most {most} steps, every pair within {bound}"))
}

fn tree_estimates(runs: &[&Run]) -> Outcome {
    let mut trees = 0;
    for r in runs {
        for rec in &r.run.trace {
            if let Some(t) = &rec.tree {
                ensure(t.passes(), || format!("step {}: {t:?}", rec.step))?;
                ensure(t.injective, || format!("step {}: not injective", rec.step))?;
                trees += 1;
            }
        }
    }
    ensure(trees > 0, || "no principal tree was built".into())?;
    Ok(format!("{trees} principal trees within both estimates"))
}

fn hull_suite() -> Outcome {
    let (mut configs, mut pass, mut inapplicable) = (0, 0, 0);
    let mut seed = 0u64;
    while configs < 50 {
        seed += 1;
        ensure(seed < 1000, || format!("only {configs} configurations with satisfiable hypotheses"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = TreeParams { vertices: rng.gen_range(10..40), segments: rng.gen_range(6..18), colors: rng.gen_range(1..=3), overlap: rng.gen_range(0..=1) };
        let sys = gen_tree_segments(&params, seed).and_then(|t| t.system()).map_err(|e| e.to_string())?;
        let metrics = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &metrics);
        let ladder = calibrate_constants(&sp).map_err(|e| e.to_string())?;
        let level = &ladder.big_theta + int(2 * sys.m() as i64 + 17) * &ladder.kappa + int(1);
        let mut all: Vec<usize> = (0..sys.len()).collect();
        all.shuffle(&mut rng);
        let seeds = Region::from_positions(sys.len(), all.iter().copied().take(rng.gen_range(1..=3)));
        let closure_level = &level - int(6) * &ladder.kappa;
        let region = convex_closure(&sp, &seeds, &Levels::Scalar(closure_level), &ladder.kappa).map_err(|e| e.to_string())?;
        let Some(&r) = all.iter().find(|&&p| !region.contains(p)) else { continue };
        let level2 = if seed % 2 == 0 { level.clone() } else { &level * int(4) };
        let inputs = LemmaInputs { region, r, s: None, level, level2, invariance: InvarianceStatus::Unchecked };
        let report = check_hull_lemmas(&sp, &ladder, &inputs).map_err(|e| e.to_string())?;
        if report.outcomes.iter().all(|o| matches!(o.status, LemmaStatus::Inapplicable(_))) {
            continue;
        }
        configs += 1;
        for o in &report.outcomes {
            match &o.status {
                LemmaStatus::Pass => pass += 1,
                LemmaStatus::Inapplicable(_) => inapplicable += 1,
                LemmaStatus::Fail(why) => return Err(format!("seed {seed}, {}: {why}", o.lemma)),
            }
        }
    }
    Ok(format!("{configs} configurations: {pass} lemma passes, {inapplicable} inapplicable, 0 failures"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = dir.path().join("fp2.json");
    std::fs::write(&spec, r#"{"kind": "graph-product", "params": {"m": 2, "radius": 4}}"#).map_err(|e| e.to_string())?;
    let spec = spec.to_str().unwrap().to_string();
    let pipeline = |tag: &str| -> Result<Vec<Vec<u8>>, String> {
        let out = dir.path().join(tag);
        std::fs::create_dir_all(&out).map_err(|e| e.to_string())?;
        let o = |name: &str| out.join(name).to_str().unwrap().to_string();
        let shared = dir.path().join("instance.json");
        let run = |c: Vec<String>| -> Result<(), String> {
            let r = run_command(std::iter::once("windmill".to_string()).chain(c.iter().cloned()));
            ensure(r.exit_code == 0, || format!("{c:?} exited {}: {}", r.exit_code, r.stderr))
        };
        let args = |a: &[&str]| a.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        run(args(&["gen", "--kind", "tree-segments", "--seed", "9", "--out", &o("tree.json")]))?;
        std::fs::copy(out.join("tree.json"), &shared).map_err(|e| e.to_string())?;
        run(args(&["check", shared.to_str().unwrap(), "--out", &o("check.json")]))?;
        run(args(&["windmill", "--model", &spec, "--out", &o("run")]))?;
        run(args(&["greendlinger", "--model", &spec, "--word", "a1^q a2^q a1^-q a2^-q", "--out", &o("short.json")]))?;
        ["tree.json", "check.json", "run/trace.jsonl", "run/presentation.json", "run/report.json", "short.json"]
            .iter()
            .map(|f| std::fs::read(out.join(f)).map_err(|e| e.to_string()))
            .collect()
    };
    let (a, b) = (pipeline("first")?, pipeline("second")?);
    ensure(a == b, || "reports differ between runs".into())?;
    Ok(format!("{} reports byte-identical across reruns", a.len()))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, outcome: Outcome, started: Instant| {
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({secs:.1}s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {why}");
            }
        }
    };

    let t = Instant::now();
    let trees = tree_instances();
    report(1, axiom_suite(&trees), t);
    let t = Instant::now();
    report(2, property_suite(&trees), t);

    let t = Instant::now();
    let free = windmill_run(GraphProductParams::free_product(6));
    match &free {
        Ok(r) => report(3, family_suite(&r.model), t),
        Err(e) => report(3, Err(e.clone()), t),
    }
    let t = Instant::now();
    report(4, free.as_ref().map_err(Clone::clone).and_then(free_product_run), t);
    let t = Instant::now();
    let edge = windmill_run(GraphProductParams::one_edge_three(5));
    report(5, edge.as_ref().map_err(Clone::clone).and_then(graph_product_run), t);
    let t = Instant::now();
    report(6, free.as_ref().map_err(Clone::clone).and_then(greendlinger_suite), t);
    let t = Instant::now();
    let runs = free.as_ref().and_then(|f| edge.as_ref().map(|e| vec![f, e])).map_err(Clone::clone);
    report(7, runs.and_then(|r| tree_estimates(&r)), t);
    let t = Instant::now();
    report(8, hull_suite(), t);
    let t = Instant::now();
    report(9, determinism(), t);

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
