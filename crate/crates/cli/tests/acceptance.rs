//! Acceptance run: one PASS/FAIL line per criterion, with its tolerance and
//! time budget. Exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use plateful::corpus::{load_judgments, load_queries, load_reviews, load_services, Corpus, Query, RelevanceJudgment, Review, FoodService};
use plateful::embeddings::EmbeddingTable;
use plateful::ltr::{pairwise_loss, train_ranknet, FeatureVector, RankNet, RankNetConfig, TrainingPair};
use plateful::search::{average_precision_at_k, reciprocal_rank, Mode, SearchConfig, SearchEngine};
use plateful::sentiment::{
    loss, train, AdamState, DropoutMasks, LstmConfig, LstmModel, LstmParams, SentimentClassifier,
    Vocabulary,
};
use plateful::tagging::{annotate, extract_pairs, load_gold, parse_annotated, TagPair};
use plateful::text_index::{Bm25Params, InvertedIndex};
use plateful_server::{router, AppState, EngineState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tower::ServiceExt;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn desk(file: &str) -> PathBuf {
    root().join("data/desk").join(file)
}

fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let denom = norm(a) + norm(b);
    if denom == 0.0 {
        0.0
    } else {
        diff / denom
    }
}

// ---------------------------------------------------------------- tagging

const FIG3_CONLL: &str = "\
0\tThe\tDET\t1\tdet
1\tfood\tNOUN\t6\tnsubj
2\tfrom\tADP\t1\tprep
3\tthis\tDET\t5\tdet
4\tbeautiful\tADJ\t5\tamod
5\trestaurant\tNOUN\t2\tpobj
6\tis\tAUX\t6\tROOT
7\tawful\tADJ\t6\tacomp
8\t.\tPUNCT\t6\tpunct
";

const NEGATED_CONLL: &str = "\
0\tThis\tDET\t1\tdet
1\tfood\tNOUN\t2\tnsubj
2\tis\tAUX\t2\tROOT
3\tnot\tPART\t2\tneg
4\tgood\tADJ\t2\tacomp
5\tat\tADP\t4\tprep
6\tall\tADV\t5\tpobj
7\t.\tPUNCT\t2\tpunct
";

fn tag_strings(pairs: &[TagPair]) -> Vec<String> {
    pairs.iter().map(TagPair::to_string).collect()
}

fn worked_tag_examples() -> Outcome {
    let cases = [
        ("The food from this beautiful restaurant is awful.", FIG3_CONLL, vec!["beautiful-restaurant", "awful-food"]),
        ("This food is not good at all.", NEGATED_CONLL, vec!["not-good-food"]),
    ];
    for (text, conll, expected) in cases {
        let parsed = parse_annotated(Path::new("inline"), conll).map_err(|e| e.to_string())?;
        ensure!(parsed.len() == 1, "expected one parsed sentence");
        let from_parse = tag_strings(&extract_pairs(&parsed[0].sentence));
        ensure!(from_parse == expected, "parsed `{text}` gave {from_parse:?}");
        let heuristic: Vec<TagPair> = annotate(text).iter().flat_map(extract_pairs).collect();
        let heuristic = tag_strings(&heuristic);
        ensure!(heuristic == expected, "annotated `{text}` gave {heuristic:?}");
    }
    Ok("[beautiful-restaurant, awful-food] and [not-good-food], exact, from parses and raw text".into())
}

fn gold_precision() -> Outcome {
    let gold = load_gold(root().join("data/tagging/gold.conll")).map_err(|e| e.to_string())?;
    ensure!(gold.len() >= 50, "only {} gold sentences", gold.len());
    let (mut correct, mut total) = (0, 0);
    for g in &gold {
        let mut expected = g.pairs.clone().ok_or("sentence without gold pairs")?;
        for pair in extract_pairs(&g.sentence) {
            total += 1;
            if let Some(at) = expected.iter().position(|e| *e == pair) {
                expected.swap_remove(at);
                correct += 1;
            }
        }
    }
    let precision = correct as f64 / total as f64;
    ensure!(precision >= 0.90, "precision {correct}/{total} = {precision:.4} < 0.90");
    Ok(format!("{} sentences, precision {correct}/{total} = {precision:.4} >= 0.90", gold.len()))
}

// ------------------------------------------------------------- text index

fn naive_bm25(docs: &[Vec<String>], query: &[String], target: usize) -> f64 {
    let (k1, b) = (1.2, 0.75);
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(Vec::len).sum::<usize>() as f64 / n;
    let doc = &docs[target];
    let distinct: BTreeSet<&String> = query.iter().collect();
    distinct
        .into_iter()
        .map(|t| {
            let tf = doc.iter().filter(|w| *w == t).count() as f64;
            if tf == 0.0 {
                return 0.0;
            }
            let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
            let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
            idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc.len() as f64 / avgdl))
        })
        .sum()
}

fn naive_tfidf(docs: &[Vec<String>], query: &[String], target: usize) -> f64 {
    let n = docs.len() as f64;
    let distinct: BTreeSet<&String> = query.iter().collect();
    distinct
        .into_iter()
        .map(|t| {
            let tf = docs[target].iter().filter(|w| *w == t).count() as f64;
            if tf == 0.0 {
                return 0.0;
            }
            let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
            (1.0 + tf.ln()) * (n / df).ln()
        })
        .sum()
}

fn index_of(docs: &[Vec<String>]) -> Result<InvertedIndex, String> {
    InvertedIndex::build("text", docs.iter().enumerate().map(|(i, d)| (format!("d{}", i + 1), d.clone())))
        .map_err(|e| e.to_string())
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(String::from).collect()
}

fn ranking_oracle() -> Outcome {
    const VOCAB: [&str; 9] = ["laksa", "spicy", "rice", "cheap", "soup", "good", "slow", "prawn", "tea"];
    let params = Bm25Params::<f64>::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for _ in 0..1000 {
        let docs: Vec<Vec<String>> = (0..rng.gen_range(1..=12))
            .map(|_| (0..rng.gen_range(1..=10)).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())].to_string()).collect())
            .collect();
        let index = index_of(&docs)?;
        for _ in 0..3 {
            let query: Vec<String> = (0..rng.gen_range(1..=4)).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())].to_string()).collect();
            for target in 0..docs.len() {
                let id = format!("d{}", target + 1);
                let bm25: f64 = index.bm25_score(&params, &query, &id).map_err(|e| e.to_string())?;
                let tfidf: f64 = index.tfidf_score(&query, &id).map_err(|e| e.to_string())?;
                worst = worst
                    .max((bm25 - naive_bm25(&docs, &query, target)).abs())
                    .max((tfidf - naive_tfidf(&docs, &query, target)).abs());
                checked += 2;
            }
        }
    }
    ensure!(worst <= 1e-9, "max deviation {worst:e} > 1e-9");

    let toy = vec![words("cheap tasty noodles"), words("tasty tasty chicken rice"), words("slow service")];
    let index = index_of(&toy)?;
    let q = words("tasty");
    let score = |doc: &str, bm25: bool| -> Result<f64, String> {
        if bm25 {
            index.bm25_score(&params, &q, doc).map_err(|e| e.to_string())
        } else {
            index.tfidf_score(&q, doc).map_err(|e| e.to_string())
        }
    };
    let toys = [
        ("bm25 d1", score("d1", true)?, 1.6f64.ln(), 0.47000, 5e-6),
        ("bm25 d2", score("d2", true)?, 1.6f64.ln() * 4.4 / 3.5, 0.59086, 5e-6),
        // The printed tf-idf values are hand-rounded: ln 1.5 = 0.405465 and
        // (1 + ln 2) ln 1.5 = 0.686512, so they are held to 2e-5.
        ("tfidf d1", score("d1", false)?, 1.5f64.ln(), 0.40546, 2e-5),
        ("tfidf d2", score("d2", false)?, (1.0 + 2f64.ln()) * 1.5f64.ln(), 0.68650, 2e-5),
    ];
    let mut shown = Vec::new();
    for (name, got, closed, printed, tol) in toys {
        ensure!((got - closed).abs() <= 1e-12, "{name}: {got} vs closed form {closed}");
        ensure!((got - printed).abs() <= tol, "{name}: {got:.6} vs printed {printed}");
        shown.push(format!("{name}={got:.6} (printed {printed:.5}, tol {tol:.0e})"));
    }
    Ok(format!(
        "1000 corpora, {checked} scores, max |module - naive| = {worst:.1e} <= 1e-9; toy values equal closed forms within 1e-12: {}",
        shown.join(" ")
    ))
}

// -------------------------------------------------------------- gradients

fn lstm_gradient_error() -> Result<f64, String> {
    let config = LstmConfig {
        max_len: 6,
        embed_dim: 4,
        lstm_units: 3,
        hidden_dim: 3,
        dropout: 0.3,
        recurrent_dropout: 0.3,
        ..LstmConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut model = LstmModel::<f64>::new(config, 8, &mut rng).map_err(|e| e.to_string())?;
    for (i, t) in model.params.tensors_mut().into_iter().enumerate() {
        for (j, v) in t.data.iter_mut().enumerate() {
            if i == 0 && j < 4 {
                continue;
            }
            *v = rng.gen_range(-0.8..0.8);
        }
    }
    let batch = vec![
        (vec![2, 5, 3, 7, 0, 0], 3, DropoutMasks::sample(&model.config, &mut rng)),
        (vec![4, 1, 6, 2, 5, 3], 0, DropoutMasks::sample(&model.config, &mut rng)),
    ];
    let total = |m: &LstmModel<f64>| -> f64 {
        batch
            .iter()
            .map(|(seq, label, masks)| {
                let cache = m.forward_with_masks(seq, masks.clone()).unwrap();
                loss(&cache.probabilities, *label).unwrap()
            })
            .sum()
    };
    let mut analytic = model.params.zeros_like();
    for (seq, label, masks) in &batch {
        let cache = model.forward_with_masks(seq, masks.clone()).map_err(|e| e.to_string())?;
        analytic.add_assign(&model.backward(&cache, *label).map_err(|e| e.to_string())?);
    }
    let step = 1e-4;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (ti, name) in LstmParams::<f64>::names().iter().enumerate() {
        let len = model.params.tensors()[ti].len();
        let mut numeric = vec![0.0; len];
        for k in 0..len {
            let original = model.params.tensors()[ti].data[k];
            probe.params.tensors_mut()[ti].data[k] = original + step;
            let plus = total(&probe);
            probe.params.tensors_mut()[ti].data[k] = original - step;
            let minus = total(&probe);
            probe.params.tensors_mut()[ti].data[k] = original;
            numeric[k] = (plus - minus) / (2.0 * step);
        }
        let err = relative_error(&analytic.tensors()[ti].data, &numeric);
        if err > 1e-4 {
            return Err(format!("LSTM {name}: relative error {err:e} > 1e-4"));
        }
        worst = worst.max(err);
    }
    Ok(worst)
}

fn ranknet_gradient_error() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let model = RankNet::<f64>::new(8, &mut rng).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let step = 1e-5;
    for _ in 0..5 {
        let pos = FeatureVector::new(rng.gen(), rng.gen(), rng.gen());
        let neg = FeatureVector::new(rng.gen(), rng.gen(), rng.gen());
        let (_, analytic) = model.pair_gradient(&pos, &neg);
        let mut probe = model.clone();
        for (t, name) in RankNet::<f64>::tensor_names().iter().enumerate() {
            let len = model.tensors()[t].len();
            let mut numeric = vec![0.0; len];
            for k in 0..len {
                let original = model.tensors()[t][k];
                probe.tensors_mut()[t][k] = original + step;
                let plus = pairwise_loss(probe.score(&pos), probe.score(&neg));
                probe.tensors_mut()[t][k] = original - step;
                let minus = pairwise_loss(probe.score(&pos), probe.score(&neg));
                probe.tensors_mut()[t][k] = original;
                numeric[k] = (plus - minus) / (2.0 * step);
            }
            let err = relative_error(analytic.tensors()[t], &numeric);
            if err > 1e-5 {
                return Err(format!("RankNet {name}: relative error {err:e} > 1e-5"));
            }
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

fn gradient_checks() -> Outcome {
    let lstm = lstm_gradient_error()?;
    let ranknet = ranknet_gradient_error()?;
    Ok(format!(
        "every tensor: LSTM max rel. error {lstm:.1e} <= 1e-4, RankNet {ranknet:.1e} <= 1e-5"
    ))
}

// --------------------------------------------------------------- learning

fn sentiment_convergence() -> Outcome {
    const INDICATORS: [&str; 5] = ["dreadful", "meh", "okayish", "yummy", "heavenly"];
    const FILLER: [&str; 16] = [
        "the", "food", "was", "we", "ordered", "rice", "noodles", "soup", "at", "this", "stall",
        "and", "service", "price", "lunch", "today",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let texts: Vec<(Vec<String>, usize)> = (0..200)
        .map(|i| {
            let label = i % 5;
            let mut tokens: Vec<String> = (0..rng.gen_range(4..12)).map(|_| FILLER[rng.gen_range(0..FILLER.len())].to_string()).collect();
            let at = rng.gen_range(0..=tokens.len());
            tokens.insert(at, INDICATORS[label].to_string());
            (tokens, label)
        })
        .collect();
    let vocab = Vocabulary::build(texts.iter().map(|(t, _)| t.as_slice()), None);
    let config = LstmConfig::default();
    ensure!(config.seed == 42, "desk config seed is {}", config.seed);
    let data: Vec<_> = texts.iter().map(|(t, l)| (vocab.encode(t, config.max_len), *l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut model = LstmModel::<f64>::new(config, vocab.size(), &mut rng).map_err(|e| e.to_string())?;
    let mut adam = AdamState::new(&model.params, model.config.learning_rate);
    let history = train(&mut model, &data, 30, 8, &mut adam, &mut rng).map_err(|e| e.to_string())?;
    let reached = history.accuracy.iter().position(|a| *a >= 0.95);
    let best = history.accuracy.iter().cloned().fold(0.0, f64::max);
    match reached {
        Some(epoch) => Ok(format!(
            "200 samples, seed 42: accuracy >= 0.95 at epoch {} of 30 (best {best:.3})",
            epoch + 1
        )),
        None => Err(format!("best training accuracy {best:.3} < 0.95 in 30 epochs")),
    }
}

fn ranknet_learning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = Vec::new();
    for q in 0..10 {
        let relevant: Vec<_> = (0..3).map(|_| FeatureVector::new(rng.gen_range(0.55..1.0), rng.gen(), rng.gen())).collect();
        let irrelevant: Vec<_> = (0..4).map(|_| FeatureVector::new(rng.gen_range(0.0..0.45), rng.gen(), rng.gen())).collect();
        for pos in &relevant {
            for neg in &irrelevant {
                pairs.push(TrainingPair { query_id: format!("q{q}"), features_pos: *pos, features_neg: *neg });
            }
        }
    }
    let config = RankNetConfig::default();
    let mut model = RankNet::new(config.hidden, &mut ChaCha8Rng::seed_from_u64(config.seed)).map_err(|e| e.to_string())?;
    train_ranknet(&mut model, &pairs, config.epochs, config.learning_rate, config.seed).map_err(|e| e.to_string())?;
    let ordered = pairs.iter().filter(|p| model.score(&p.features_pos) > model.score(&p.features_neg)).count();
    let fraction = ordered as f64 / pairs.len() as f64;
    ensure!(fraction >= 0.95, "only {fraction:.3} of pairs ordered");
    let mut worst: f64 = 0.0;
    for s in [-50.0, -3.7, -1.0, 0.0, 0.25, 1.0, 12.5, 50.0] {
        worst = worst.max((pairwise_loss(s, s) - 2f64.ln()).abs());
    }
    ensure!(worst <= 1e-12, "loss(s, s) deviates from ln 2 by {worst:e}");
    Ok(format!(
        "{ordered}/{} pairs ordered ({fraction:.3} >= 0.95) after {} epochs; |loss(s,s) - ln 2| <= {worst:.1e}",
        pairs.len(),
        config.epochs
    ))
}

// ---------------------------------------------------------------- metrics

fn metric_oracles() -> Outcome {
    // (ranking, relevant in total, k, AP@k, RR), all worked by hand.
    let cases: [(&str, usize, usize, f64, f64); 20] = [
        ("RNR", 2, 3, (1.0 + 2.0 / 3.0) / 2.0, 1.0),
        ("RRR", 3, 3, 1.0, 1.0),
        ("NNN", 2, 3, 0.0, 0.0),
        ("NRN", 1, 3, 0.5, 0.5),
        ("NNR", 1, 3, 1.0 / 3.0, 1.0 / 3.0),
        ("RNR", 2, 1, 1.0, 1.0),
        ("NRR", 2, 1, 0.0, 0.5),
        ("NRR", 2, 3, 7.0 / 12.0, 0.5),
        ("RNNNR", 2, 5, 0.7, 1.0),
        ("NNNNN", 3, 5, 0.0, 0.0),
        ("RRNNN", 4, 5, 0.5, 1.0),
        ("NRNRN", 2, 5, 0.5, 0.5),
        ("NRNRN", 2, 3, 0.25, 0.5),
        ("RNRNR", 3, 5, 34.0 / 45.0, 1.0),
        ("RNRNR", 3, 3, 5.0 / 9.0, 1.0),
        ("NNNNR", 1, 5, 0.2, 0.2),
        ("NNNNR", 1, 3, 0.0, 0.2),
        ("RRRRR", 5, 5, 1.0, 1.0),
        ("NRRRR", 10, 5, 163.0 / 300.0, 0.5),
        ("", 2, 5, 0.0, 0.0),
    ];
    for (pattern, total, k, ap, rr) in cases {
        let ranked: Vec<String> = (0..pattern.len()).map(|i| format!("d{i}")).collect();
        let mut relevant: BTreeSet<String> = pattern.chars().enumerate().filter(|(_, c)| *c == 'R').map(|(i, _)| format!("d{i}")).collect();
        for extra in 0..total - relevant.len() {
            relevant.insert(format!("unretrieved{extra}"));
        }
        let got_ap = average_precision_at_k(&ranked, &relevant, k);
        let got_rr = reciprocal_rank(&ranked, &relevant);
        ensure!((got_ap - ap).abs() <= 1e-12, "[{pattern}] AP@{k} = {got_ap}, expected {ap}");
        ensure!((got_rr - rr).abs() <= 1e-12, "[{pattern}] RR = {got_rr}, expected {rr}");
    }
    let rnr = average_precision_at_k(&["a", "b", "c"], &["a".to_string(), "c".to_string()].into(), 3);
    ensure!(format!("{rnr:.5}") == "0.83333", "[R,N,R] gave {rnr}");

    // A perfect system: each query's judged-relevant review ranks first.
    let service = FoodService { id: "s".into(), name: "S".into(), categories: vec![], location: String::new() };
    let review = |id: &str, text: &str| Review {
        id: id.into(),
        service_id: "s".into(),
        text: text.into(),
        label: 2,
        categories: vec![],
        timestamp: 0,
    };
    let corpus = Corpus::new(vec![service], vec![review("a", "laksa"), review("b", "coffee"), review("c", "satay")])
        .map_err(|e| e.to_string())?;
    let engine = SearchEngine::<f64>::build(corpus, EmbeddingTable::new(1), None).map_err(|e| e.to_string())?;
    let queries = ["laksa", "coffee", "satay"].map(|t| Query { id: t.into(), text: t.into() });
    let judgments: Vec<RelevanceJudgment> = ["a", "b", "c"]
        .iter()
        .zip(&queries)
        .map(|(d, q)| RelevanceJudgment { query_id: q.id.clone(), doc_id: d.to_string(), label: 1 })
        .collect();
    let reports = engine
        .evaluate(&queries, &judgments, &[Mode::Tfidf, Mode::Bm25], &SearchConfig::default())
        .map_err(|e| e.to_string())?;
    for r in &reports {
        ensure!(r.metrics.values().all(|v| *v == 1.0), "perfect {} ranking scored {:?}", r.mode, r.metrics);
    }
    Ok("20 constructed rankings match AP@k/RR oracles within 1e-12, [R,N,R] -> 0.83333; perfect ranking 1.0000 on MAP@1/3/5 and MRR".into())
}

// ------------------------------------------------------------- end to end

fn end_to_end_ordering() -> Outcome {
    let load = || -> plateful::Result<_> {
        let corpus = Corpus::new(load_services(desk("services.jsonl"))?, load_reviews(desk("reviews.jsonl"))?)?;
        let embeddings = EmbeddingTable::<f64>::load(desk("vectors.txt"), 50)?;
        let engine = SearchEngine::build(corpus, embeddings, None)?;
        let (ranker, _) = engine.train_ranker(
            &load_queries(desk("queries_train.tsv"))?,
            &load_judgments(desk("judgments_train.tsv"))?,
            &RankNetConfig::default(),
        )?;
        let queries = load_queries(desk("queries_test.tsv"))?;
        let judgments = load_judgments(desk("judgments_test.tsv"))?;
        let n_reviews = engine.corpus.reviews.len();
        let engine = engine.with_ranker(Some(ranker));
        let reports = engine.evaluate(&queries, &judgments, &Mode::ALL, &SearchConfig::default())?;
        Ok((n_reviews, queries.len(), reports))
    };
    let (n_reviews, n_queries, reports) = load().map_err(|e| e.to_string())?;
    ensure!(n_reviews >= 100, "only {n_reviews} reviews");
    ensure!(n_queries == 10, "{n_queries} test queries");
    let m = |i: usize, name: &str| reports[i].metric(name);
    let (tfidf5, bm25_5, ranknet5) = (m(0, "MAP@5"), m(1, "MAP@5"), m(2, "MAP@5"));
    let (bm25_rr, ranknet_rr) = (m(1, "MRR"), m(2, "MRR"));
    ensure!(ranknet5 > bm25_5, "ranknet MAP@5 {ranknet5:.4} <= bm25 {bm25_5:.4}");
    ensure!(ranknet_rr > bm25_rr, "ranknet MRR {ranknet_rr:.4} <= bm25 {bm25_rr:.4}");
    ensure!(bm25_5 >= tfidf5, "bm25 MAP@5 {bm25_5:.4} < tfidf {tfidf5:.4}");
    Ok(format!(
        "{n_reviews} reviews, {n_queries} queries: MAP@5 ranknet {ranknet5:.4} > bm25 {bm25_5:.4} >= tfidf {tfidf5:.4}; MRR ranknet {ranknet_rr:.4} > bm25 {bm25_rr:.4}"
    ))
}

// ----------------------------------------------------------------- server

fn always_positive() -> SentimentClassifier<f64> {
    let tokens = ["the", "laksa", "is", "not", "good"];
    let vocab = Vocabulary::build([&tokens[..]], None);
    let config = LstmConfig { embed_dim: 4, lstm_units: 2, hidden_dim: 2, ..LstmConfig::default() };
    let mut model = LstmModel::new(config, vocab.size(), &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
    model.params.out_w.data.iter_mut().for_each(|w| *w = 0.0);
    model.params.out_b.data.iter_mut().for_each(|b| *b = 0.0);
    model.params.out_b.data[4] = 10.0;
    SentimentClassifier { model, vocab }
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn server_checks() -> Outcome {
    let engine = || -> plateful::Result<_> {
        let corpus = Corpus::new(load_services(desk("services.jsonl"))?, load_reviews(desk("reviews.jsonl"))?)?;
        SearchEngine::build(corpus, EmbeddingTable::<f64>::load(desk("vectors.txt"), 50)?, None)
    };
    let plain = EngineState::new(engine().map_err(|e| e.to_string())?, None, None).map_err(|e| e.to_string())?;
    let app = router(AppState::new(plain));
    let expect = |(status, body): (StatusCode, Value), want: StatusCode, what: &str| -> Result<Value, String> {
        ensure!(status == want, "{what}: {status} (wanted {want}) {body}");
        if !want.is_success() {
            ensure!(body["error"].as_str().is_some_and(|e| !e.is_empty()), "{what}: no error body");
        }
        Ok(body)
    };
    let health = expect(call(&app, "GET", "/api/health", None).await, StatusCode::OK, "health")?;
    ensure!(health == serde_json::json!({"status": "ok"}), "health body {health}");
    expect(call(&app, "GET", "/api/services", None).await, StatusCode::OK, "services")?;
    let listing = expect(call(&app, "GET", "/api/services/s01/reviews?page=1&page_size=5", None).await, StatusCode::OK, "list")?;
    ensure!(listing["reviews"].as_array().map(Vec::len) == Some(5), "page size not honoured");
    let beyond = expect(call(&app, "GET", "/api/services/s01/reviews?page=99", None).await, StatusCode::OK, "page beyond")?;
    ensure!(beyond["reviews"] == serde_json::json!([]), "page beyond range not empty");
    expect(call(&app, "GET", "/api/services/zz/reviews", None).await, StatusCode::NOT_FOUND, "unknown service")?;
    let found = expect(call(&app, "GET", "/api/search?q=tasty%20noodles&mode=bm25", None).await, StatusCode::OK, "search")?;
    let scores: Vec<f64> = found["results"].as_array().ok_or("no results array")?.iter().filter_map(|r| r["score"].as_f64()).collect();
    ensure!(!scores.is_empty() && scores.windows(2).all(|w| w[0] >= w[1]), "results not sorted");
    expect(call(&app, "GET", "/api/search", None).await, StatusCode::BAD_REQUEST, "missing q")?;
    expect(call(&app, "GET", "/api/search?q=laksa&mode=nope", None).await, StatusCode::BAD_REQUEST, "bad mode")?;
    expect(call(&app, "GET", "/api/search?q=laksa&mode=ranknet", None).await, StatusCode::CONFLICT, "no ranker")?;
    let body = r#"{"service_id":"s01","text":"The laksa is not good."}"#;
    expect(call(&app, "POST", "/api/reviews", Some(body)).await, StatusCode::CONFLICT, "no sentiment model")?;

    let state = AppState::new(
        EngineState::new(engine().map_err(|e| e.to_string())?, Some(always_positive()), None).map_err(|e| e.to_string())?,
    );
    let app = router(state.clone());
    expect(call(&app, "POST", "/api/reviews", Some(r#"{"service_id":"s01"}"#)).await, StatusCode::BAD_REQUEST, "missing text")?;
    expect(call(&app, "POST", "/api/reviews", Some("{oops")).await, StatusCode::BAD_REQUEST, "malformed")?;
    expect(call(&app, "POST", "/api/reviews", Some(r#"{"service_id":"zz","text":"ok"}"#)).await, StatusCode::NOT_FOUND, "unknown service")?;
    let before = state.snapshot().engine.text_index.doc_count();
    let body = r#"{"service_id":"s01","text":"The laksa is not good. Quokkaberry chilli."}"#;
    let stored = expect(call(&app, "POST", "/api/reviews", Some(body)).await, StatusCode::CREATED, "submit")?;
    let tag = stored["tags"].as_array().and_then(|t| t.iter().find(|t| t["text"] == "not-good-laksa")).ok_or("no not-good-laksa tag")?;
    ensure!(tag["polarity"] == "negative", "not-good-laksa coloured {}", tag["polarity"]);
    let after = state.snapshot().engine.text_index.doc_count();
    ensure!(after == before + 1, "doc_count {before} -> {after}");
    let id = stored["review"]["id"].clone();
    let hit = expect(call(&app, "GET", "/api/search?q=quokkaberry", None).await, StatusCode::OK, "post-submit search")?;
    ensure!(hit["results"][0]["doc_id"] == id, "new review not retrievable: {hit}");
    Ok(format!(
        "status table (200/400/404/409/201) holds; not-good-laksa negative; doc_count {before} -> {after}; new review retrievable"
    ))
}

fn server_contract() -> Outcome {
    tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?
        .block_on(server_checks())
}

// ------------------------------------------------------------------ driver

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 9] = [
        ("worked tag examples", 1, worked_tag_examples),
        ("gold-corpus extraction precision", 5, gold_precision),
        ("BM25/tf-idf oracle", 30, ranking_oracle),
        ("gradient checks", 120, gradient_checks),
        ("sentiment convergence", 180, sentiment_convergence),
        ("RankNet learning", 60, ranknet_learning),
        ("metric oracles", 1, metric_oracles),
        ("end-to-end ordering", 120, end_to_end_ordering),
        ("server contract", 30, server_contract),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => {
                Err(format!("{detail}; took {:.2}s, budget {budget}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.2}s < {budget}s]", elapsed.as_secs_f64()),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name}: {reason} [{:.2}s]", elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", 9 - failed, 9);
    if failed > 0 {
        std::process::exit(1);
    }
}
