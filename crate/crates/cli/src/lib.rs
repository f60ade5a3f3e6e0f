//! The `plateful` command: build indexes, train models, extract tags, query,
//! evaluate and serve.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use plateful::corpus::{
    load_judgments, load_queries, load_reviews, load_services, split_dataset, tokenize, Corpus,
};
use plateful::embeddings::{load_doc_vectors, EmbeddingTable};
use plateful::ltr::{RankNetConfig, Ranker, RANKNET_CHECKPOINT_VERSION};
use plateful::search::{format_reports, Mode, SearchConfig, SearchEngine};
use plateful::sentiment::{
    evaluate, polarity, train, AdamState, LstmConfig, LstmModel, SentimentClassifier,
    Vocabulary, LSTM_CHECKPOINT_VERSION,
};
use plateful::tagging::text_tags;
use plateful_server::EngineState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DATA_DIR_ENV: &str = "PLATEFUL_DATA_DIR";
pub const INDEX_SNAPSHOT_VERSION: &str = "index-v1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Data(#[from] plateful::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Io { .. } => 2,
        }
    }

    fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "plateful", version, about = "Food review search with opinion tags")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the text and category indexes and report their statistics.
    Index(IndexArgs),
    /// Train the BiLSTM sentiment classifier on labelled reviews.
    TrainSentiment(TrainSentimentArgs),
    /// Train the RankNet re-ranker from relevance judgments.
    TrainRanker(TrainRankerArgs),
    /// Extract opinion tags from a text or a file of reviews.
    Tags(TagsArgs),
    /// Run one query and print the ranked results.
    Search(SearchArgs),
    /// Compare ranking modes on judged queries (MAP@1/3/5, MRR).
    Eval(EvalArgs),
    /// Serve the HTTP JSON API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Reviews JSONL [default: $PLATEFUL_DATA_DIR/reviews.jsonl]
    #[arg(long)]
    pub reviews: Option<PathBuf>,
    /// Services JSONL [default: $PLATEFUL_DATA_DIR/services.jsonl]
    #[arg(long)]
    pub services: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Word vectors, one `word v1 v2 ...` line each [default: $PLATEFUL_DATA_DIR/vectors.txt]
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Precomputed document vectors, `doc_id<TAB>v1,v2,...` lines
    #[arg(long)]
    pub doc_vectors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JudgedArgs {
    /// Queries TSV [default: $PLATEFUL_DATA_DIR/queries_test.tsv]
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Binary relevance judgments TSV [default: $PLATEFUL_DATA_DIR/judgments_test.tsv]
    #[arg(long)]
    pub judgments: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankingArgs {
    /// Results to return
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// First-pass candidates handed to the re-ranker
    #[arg(long, default_value_t = 50)]
    pub candidate_depth: usize,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Write a JSON snapshot of both indexes here
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainSentimentArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Pretrained word vectors used to initialize the embedding matrix
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub batch_size: usize,
    /// Share of reviews held out for a test accuracy (0 trains on all)
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Where to write the checkpoint
    #[arg(long)]
    pub model_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainRankerArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Training queries [default: $PLATEFUL_DATA_DIR/queries_train.tsv]
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Training judgments [default: $PLATEFUL_DATA_DIR/judgments_train.tsv]
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub hidden: usize,
    /// Where to write the checkpoint
    #[arg(long)]
    pub model_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TagsArgs {
    /// Text to tag
    #[arg(long, conflicts_with = "reviews")]
    pub text: Option<String>,
    /// Reviews JSONL to tag; tags are coloured by each review's label
    #[arg(long)]
    pub reviews: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Query text
    pub query: String,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, default_value = "bm25")]
    pub mode: Mode,
    #[command(flatten)]
    pub ranking: RankingArgs,
    /// RankNet checkpoint (required for --mode ranknet)
    #[arg(long)]
    pub model_in: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub judged: JudgedArgs,
    #[command(flatten)]
    pub ranking: RankingArgs,
    /// RankNet checkpoint; without it only tfidf and bm25 are compared
    #[arg(long)]
    pub model_in: Option<PathBuf>,
    /// Write the reports as JSON here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Sentiment or RankNet checkpoint; repeatable, type read from the file
    #[arg(long)]
    pub model_in: Vec<PathBuf>,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value_t = 50)]
    pub candidate_depth: usize,
}

/// Runs with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Index(a) => index(a, out),
        Command::TrainSentiment(a) => train_sentiment(a, out),
        Command::TrainRanker(a) => train_ranker(a, out),
        Command::Tags(a) => tags(a, out),
        Command::Search(a) => search(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Serve(a) => serve(a, out),
    }
}

/// Resolves a path flag. Relative paths missing from the working directory
/// are looked up under `$PLATEFUL_DATA_DIR`; an absent flag falls back to
/// `default` inside that directory.
pub fn resolve(flag: Option<&Path>, default: &str, name: &str) -> Result<PathBuf> {
    let data_dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
    match (flag, data_dir) {
        (Some(p), Some(dir)) if p.is_relative() && !p.exists() => Ok(dir.join(p)),
        (Some(p), _) => Ok(p.to_path_buf()),
        (None, Some(dir)) => Ok(dir.join(default)),
        (None, None) => Err(CliError::Usage(format!(
            "--{name} is required (or set {DATA_DIR_ENV})"
        ))),
    }
}

fn write(out: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    out.write_all(text.as_ref().as_bytes())
        .map_err(|e| CliError::io("writing output", e))
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus> {
    let reviews = load_reviews(resolve(args.reviews.as_deref(), "reviews.jsonl", "reviews")?)?;
    let services = load_services(resolve(args.services.as_deref(), "services.jsonl", "services")?)?;
    Ok(Corpus::new(services, reviews)?)
}

/// Dimension of a word-vector file, read from its first non-empty line.
fn vector_dim(path: &Path) -> Result<usize> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| CliError::io(path.display().to_string(), e))?;
        let n = line.split_whitespace().count();
        if n > 0 {
            return if n > 1 {
                Ok(n - 1)
            } else {
                Err(plateful::Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    message: "word without values".into(),
                }
                .into())
            };
        }
    }
    Err(plateful::Error::EmptyDataset.into())
}

fn load_embeddings(path: &Path) -> Result<EmbeddingTable<f64>> {
    Ok(EmbeddingTable::load(path, vector_dim(path)?)?)
}

fn load_engine(args: &EngineArgs) -> Result<(SearchEngine<f64>, Option<HashMap<String, Vec<f64>>>)> {
    let corpus = load_corpus(&args.corpus)?;
    let embeddings = load_embeddings(&resolve(args.embeddings.as_deref(), "vectors.txt", "embeddings")?)?;
    let precomputed = match &args.doc_vectors {
        Some(p) => Some(load_doc_vectors(resolve(Some(p), "", "doc-vectors")?, embeddings.dim())?),
        None => None,
    };
    let engine = SearchEngine::build(corpus, embeddings, precomputed.as_ref())?;
    Ok((engine, precomputed))
}

fn ranking_config(args: &RankingArgs, mode: Mode) -> Result<SearchConfig> {
    let config = SearchConfig {
        candidate_depth: args.candidate_depth,
        result_count: args.k,
        mode,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

/// A checkpoint of either model type, told apart by its version field.
pub enum Checkpoint {
    Sentiment(SentimentClassifier<f64>),
    Ranker(Ranker<f64>),
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(plateful::Error::from)?;
    match value.get("version").and_then(|v| v.as_str()) {
        Some(LSTM_CHECKPOINT_VERSION) => Ok(Checkpoint::Sentiment(SentimentClassifier::from_json(&text)?)),
        Some(RANKNET_CHECKPOINT_VERSION) => Ok(Checkpoint::Ranker(Ranker::from_json(&text)?)),
        other => Err(plateful::Error::Checkpoint(format!(
            "{}: unrecognised checkpoint version {other:?}",
            path.display()
        ))
        .into()),
    }
}

fn load_ranker(path: &Path) -> Result<Ranker<f64>> {
    match load_checkpoint(&resolve(Some(path), "", "model-in")?)? {
        Checkpoint::Ranker(r) => Ok(r),
        Checkpoint::Sentiment(_) => Err(CliError::Usage(format!(
            "{} is a sentiment checkpoint, expected a ranker",
            path.display()
        ))),
    }
}

fn index(args: IndexArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = load_corpus(&args.corpus)?;
    let engine = SearchEngine::build(corpus, EmbeddingTable::<f64>::new(1), None)?;
    write(
        out,
        format!(
            "documents {}\ntext terms {}\ntext avg length {:.2}\ncategory terms {}\n",
            engine.text_index.doc_count(),
            engine.text_index.terms().count(),
            engine.text_index.avg_doc_length(),
            engine.category_index.terms().count(),
        ),
    )?;
    if let Some(path) = args.model_out {
        let snapshot = serde_json::json!({
            "version": INDEX_SNAPSHOT_VERSION,
            "text": engine.text_index,
            "categories": engine.category_index,
        });
        fs::write(&path, snapshot.to_string()).map_err(|e| CliError::io(path.display().to_string(), e))?;
        write(out, format!("wrote {}\n", path.display()))?;
    }
    Ok(())
}

fn train_sentiment(args: TrainSentimentArgs, out: &mut dyn Write) -> Result<()> {
    let reviews = load_reviews(resolve(args.corpus.reviews.as_deref(), "reviews.jsonl", "reviews")?)?;
    if !(0.0..1.0).contains(&args.test_fraction) {
        return Err(CliError::Usage("--test-fraction must lie in [0, 1)".into()));
    }
    let (train_set, test_set) = if args.test_fraction > 0.0 {
        split_dataset(&reviews, args.test_fraction, args.seed)?
    } else {
        (reviews, Vec::new())
    };
    let pretrained = match &args.embeddings {
        Some(p) => Some(load_embeddings(&resolve(Some(p), "", "embeddings")?)?),
        None => None,
    };
    let config = LstmConfig {
        embed_dim: pretrained.as_ref().map_or(LstmConfig::default().embed_dim, |t| t.dim()),
        learning_rate: args.lr,
        seed: args.seed,
        ..LstmConfig::default()
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let tokens: Vec<Vec<String>> = train_set.iter().map(|r| tokenize(&r.text)).collect();
    let vocab = Vocabulary::build(tokens.iter().map(Vec::as_slice), None);
    let encode = |text: &str, label: u8| (vocab.encode(&tokenize(text), config.max_len), label as usize);
    let train_data: Vec<_> = train_set.iter().map(|r| encode(&r.text, r.label)).collect();
    let test_data: Vec<_> = test_set.iter().map(|r| encode(&r.text, r.label)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut model = LstmModel::new(config, vocab.size(), &mut rng)?;
    if let Some(table) = &pretrained {
        let set = model.load_pretrained(&vocab, table)?;
        write(out, format!("initialized {set} embedding rows from pretrained vectors\n"))?;
    }
    let mut adam = AdamState::new(&model.params, model.config.learning_rate);
    let history = train(&mut model, &train_data, args.epochs, args.batch_size, &mut adam, &mut rng)?;
    for (epoch, (loss, acc)) in history.loss.iter().zip(&history.accuracy).enumerate() {
        write(out, format!("epoch {:>3}  loss {loss:.4}  accuracy {acc:.4}\n", epoch + 1))?;
    }
    if !test_data.is_empty() {
        let (loss, acc) = evaluate(&model, &test_data)?;
        write(out, format!("held-out  loss {loss:.4}  accuracy {acc:.4}  ({} reviews)\n", test_data.len()))?;
    }
    SentimentClassifier { model, vocab }.save(&args.model_out)?;
    write(out, format!("wrote {}\n", args.model_out.display()))
}

fn train_ranker(args: TrainRankerArgs, out: &mut dyn Write) -> Result<()> {
    let (engine, _) = load_engine(&args.engine)?;
    let queries = load_queries(resolve(args.queries.as_deref(), "queries_train.tsv", "queries")?)?;
    let judgments = load_judgments(resolve(args.judgments.as_deref(), "judgments_train.tsv", "judgments")?)?;
    let config = RankNetConfig {
        hidden: args.hidden,
        epochs: args.epochs,
        learning_rate: args.lr,
        seed: args.seed,
    };
    let (ranker, history) = engine.train_ranker(&queries, &judgments, &config)?;
    if let (Some(first), Some(last)) = (history.first(), history.last()) {
        write(out, format!("epochs {}  loss {first:.4} -> {last:.4}\n", history.len()))?;
    }
    ranker.save(&args.model_out)?;
    write(out, format!("wrote {}\n", args.model_out.display()))
}

fn tags(args: TagsArgs, out: &mut dyn Write) -> Result<()> {
    match (args.text, args.reviews) {
        (Some(text), None) => {
            for pair in text_tags(&text) {
                write(out, format!("{pair}\n"))?;
            }
            Ok(())
        }
        (None, Some(path)) => {
            for r in load_reviews(resolve(Some(&path), "", "reviews")?)? {
                let review_polarity = polarity(r.label as usize)?;
                for pair in text_tags(&r.text) {
                    write(out, format!("{}\t{pair}\t{}\n", r.id, pair.polarity(review_polarity)))?;
                }
            }
            Ok(())
        }
        _ => Err(CliError::Usage("tags needs --text or --reviews".into())),
    }
}

fn search(args: SearchArgs, out: &mut dyn Write) -> Result<()> {
    let config = ranking_config(&args.ranking, args.mode)?;
    let (engine, _) = load_engine(&args.engine)?;
    let ranker = args.model_in.as_deref().map(load_ranker).transpose()?;
    let engine = engine.with_ranker(ranker);
    let results = engine.run_query(&args.query, &config)?;
    write(out, format!("{:>4}  {:<10} {:>9}  snippet\n", "rank", "doc_id", "score"))?;
    for r in results {
        let snippet: String = r.snippet.chars().take(70).collect();
        write(out, format!("{:>4}  {:<10} {:>9.4}  {snippet}\n", r.rank, r.doc_id, r.score))?;
    }
    Ok(())
}

fn eval(args: EvalArgs, out: &mut dyn Write) -> Result<()> {
    let config = ranking_config(&args.ranking, Mode::Bm25)?;
    let (engine, _) = load_engine(&args.engine)?;
    let queries = load_queries(resolve(args.judged.queries.as_deref(), "queries_test.tsv", "queries")?)?;
    let judgments = load_judgments(resolve(args.judged.judgments.as_deref(), "judgments_test.tsv", "judgments")?)?;
    let ranker = args.model_in.as_deref().map(load_ranker).transpose()?;
    let modes: &[Mode] = if ranker.is_some() {
        &Mode::ALL
    } else {
        &[Mode::Tfidf, Mode::Bm25]
    };
    let engine = engine.with_ranker(ranker);
    let reports = engine.evaluate(&queries, &judgments, modes, &config)?;
    write(out, format_reports(&reports))?;
    if let Some(path) = args.out {
        let json = serde_json::to_string_pretty(&reports).map_err(plateful::Error::from)?;
        fs::write(&path, json).map_err(|e| CliError::io(path.display().to_string(), e))?;
        write(out, format!("wrote {}\n", path.display()))?;
    }
    Ok(())
}

fn serve(args: ServeArgs, out: &mut dyn Write) -> Result<()> {
    let (engine, precomputed) = load_engine(&args.engine)?;
    let (mut sentiment, mut ranker) = (None, None);
    for path in &args.model_in {
        match load_checkpoint(&resolve(Some(path), "", "model-in")?)? {
            Checkpoint::Sentiment(s) => sentiment = Some(s),
            Checkpoint::Ranker(r) => ranker = Some(r),
        }
    }
    let search = SearchConfig {
        candidate_depth: args.candidate_depth,
        ..SearchConfig::default()
    };
    search.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    write(
        out,
        format!(
            "{} reviews, sentiment model {}, ranker {}\n",
            engine.corpus.reviews.len(),
            if sentiment.is_some() { "loaded" } else { "absent" },
            if ranker.is_some() { "loaded" } else { "absent" },
        ),
    )?;
    let state = EngineState::new(engine.with_ranker(ranker), sentiment, precomputed)?.with_search_config(search);
    let addr = SocketAddr::new(args.host, args.port);
    write(out, format!("listening on http://{addr}\n"))?;
    out.flush().map_err(|e| CliError::io("writing output", e))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io("starting runtime", e))?;
    runtime
        .block_on(plateful_server::serve(state, addr))
        .map_err(|e| CliError::io(format!("serving on {addr}"), e))
}
