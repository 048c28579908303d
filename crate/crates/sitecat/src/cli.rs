//! The `sitecat` command-line pipeline.
//!
//! Subcommands: `tagstats`, `crawl`, `train`, `classify`, `evaluate`,
//! and `experiment` (the scripted feature-ablation and training-swap
//! flows). Configuration comes from an optional TOML file (`--config`);
//! flags override file values. Data goes to files or standard output,
//! diagnostics to standard error, and the exit status is zero exactly
//! when no fatal error occurred.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_stopwords, Config};
use crate::eval::{evaluate, render_report, render_rows, Decision, EvalReport, ReportStyle};
use crate::html::{corpus_tag_stats, extract_fields, PageFields};
use crate::knn::{classify, classify_batch, DecisionConfig, InputDoc};
use crate::lsi::{build_index, load_index, save_index, IndexConfig, TrainingDoc};
use crate::records::{read_jsonl, read_jsonl_lenient, AnyDoc, CorpusRecord, ResultRecord};
use crate::spider::{crawl_batch, HttpFetcher, RepresentativeDoc, SourceKind};
use crate::taxonomy::{CategoryCode, Taxonomy};

#[derive(Parser, Debug)]
#[command(
    name = "sitecat",
    version,
    about = "Classify web sites into top-level NAICS industry categories"
)]
pub struct Cli {
    /// TOML config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Reserved for future randomized components; accepted and unused.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Word-count statistics per text source over a page corpus.
    Tagstats(TagstatsArgs),
    /// Crawl domains into representative-document records.
    Crawl(CrawlArgs),
    /// Build and save an index from labeled corpus files.
    Train(TrainArgs),
    /// Assign categories to crawl records or corpus records.
    Classify(ClassifyArgs),
    /// Score assignments against known categories.
    Evaluate(EvaluateArgs),
    /// Scripted experiment flows over user-supplied corpora.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
pub struct TagstatsArgs {
    /// Directory of .html/.htm files, or a crawl log kept with sources.
    pub input: PathBuf,

    /// Write the machine-readable report here; the text table always
    /// goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CrawlArgs {
    /// Domain list: one domain per line, `#` comments allowed.
    pub domains: PathBuf,

    /// Record sink (defaults to standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,

    /// Retain per-source text segments in each record.
    #[arg(long)]
    pub keep_sources: bool,

    /// Ignore robots.txt (fixture crawls only).
    #[arg(long)]
    pub no_robots: bool,

    /// Anchor-text substrings to follow, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub key_substrings: Option<Vec<String>>,

    #[arg(long)]
    pub max_links: Option<usize>,

    #[arg(long)]
    pub max_depth: Option<usize>,

    #[arg(long)]
    pub max_redirects: Option<usize>,

    #[arg(long)]
    pub timeout_ms: Option<u64>,

    #[arg(long)]
    pub politeness_ms: Option<u64>,

    #[arg(long)]
    pub user_agent: Option<String>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Labeled corpus files (merged into one index).
    #[arg(required = true)]
    pub corpora: Vec<PathBuf>,

    /// Where to write the trained index.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long)]
    pub rank: Option<usize>,

    #[arg(long)]
    pub min_df: Option<usize>,

    /// Stopword list: one word per line.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Crawl log or corpus file to classify.
    pub input: PathBuf,

    /// Trained index file.
    #[arg(long)]
    pub index: PathBuf,

    /// Result sink (defaults to standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,

    #[arg(long)]
    pub knn_k: Option<usize>,

    #[arg(long)]
    pub threshold: Option<f64>,

    /// Assign every category at or above the threshold, not just the top.
    #[arg(long)]
    pub multi_label: bool,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Result records, or decision records with embedded truth.
    pub results: PathBuf,

    /// Corpus file supplying truth labels by doc_id (labels are
    /// generalized to top level). Without it, the results file must
    /// carry `truth` fields itself.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// feature-table, training-table, or full.
    #[arg(long, default_value = "full")]
    pub style: String,

    /// Write the machine-readable report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExperimentName {
    FeatureAblation,
    TrainingSwap,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,

    /// Training corpus files (feature-ablation).
    #[arg(long)]
    pub train: Vec<PathBuf>,

    /// Crawl log with per-source text (feature-ablation).
    #[arg(long)]
    pub crawl_log: Option<PathBuf>,

    /// Truth corpus keyed by doc_id (feature-ablation).
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// First training corpus (training-swap).
    #[arg(long)]
    pub corpus_a: Option<PathBuf>,

    /// Second training corpus (training-swap).
    #[arg(long)]
    pub corpus_b: Option<PathBuf>,

    /// Labeled test corpus (training-swap).
    #[arg(long)]
    pub test: Option<PathBuf>,

    /// Write the comparison table here (also printed to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub rank: Option<usize>,

    #[arg(long)]
    pub min_df: Option<usize>,

    #[arg(long)]
    pub knn_k: Option<usize>,

    #[arg(long)]
    pub threshold: Option<f64>,
}

/// Parses and runs a full command line (minus argv[0] handling, which
/// clap owns). Returns an error for any fatal condition; the binary maps
/// that to a nonzero exit status.
pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Tagstats(args) => cmd_tagstats(args),
        Command::Crawl(args) => cmd_crawl(args, &config),
        Command::Train(args) => cmd_train(args, &config),
        Command::Classify(args) => cmd_classify(args, &config),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Experiment(args) => cmd_experiment(args, &config),
    }
}

fn cmd_tagstats(args: &TagstatsArgs) -> Result<()> {
    let pages = if args.input.is_dir() {
        read_html_dir(&args.input)?
    } else {
        pages_from_crawl_log(&args.input)?
    };
    let report = corpus_tag_stats(&pages)?;
    print!("{}", report.render());
    if let Some(out) = &args.out {
        let json = serde_json::to_string(&report)?;
        std::fs::write(out, json + "\n")?;
    }
    Ok(())
}

fn read_html_dir(dir: &Path) -> Result<Vec<PageFields>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("html") | Some("htm")
            )
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .html/.htm files in {}", dir.display());
    }
    paths
        .iter()
        .map(|p| {
            let bytes =
                std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(extract_fields(&bytes))
        })
        .collect()
}

fn pages_from_crawl_log(path: &Path) -> Result<Vec<PageFields>> {
    let records: Vec<RepresentativeDoc> = read_jsonl(path)
        .with_context(|| format!("reading crawl log {}", path.display()))?;
    records
        .iter()
        .filter(|r| r.is_reachable())
        .map(|r| {
            let sources = r.per_source.as_ref().ok_or_else(|| {
                anyhow!(
                    "crawl record for {:?} has no per-source text; re-crawl with --keep-sources",
                    r.domain
                )
            })?;
            let get = |k: SourceKind| sources.get(&k).cloned().unwrap_or_default();
            Ok(PageFields {
                title: get(SourceKind::Title),
                meta_keywords: get(SourceKind::MetaKeywords),
                meta_description: get(SourceKind::MetaDescription),
                body_text: get(SourceKind::BodyText),
                ..Default::default()
            })
        })
        .collect()
}

fn cmd_crawl(args: &CrawlArgs, config: &Config) -> Result<()> {
    let mut policy = config.crawl_policy();
    if let Some(keys) = &args.key_substrings {
        policy.key_substrings = keys.clone();
    }
    if let Some(v) = args.max_links {
        policy.max_followed_links = v;
    }
    if let Some(v) = args.max_depth {
        policy.max_depth = v;
    }
    if let Some(v) = args.max_redirects {
        policy.max_redirects = v;
    }
    if let Some(v) = args.timeout_ms {
        policy.per_request_timeout = std::time::Duration::from_millis(v);
    }
    if let Some(v) = args.politeness_ms {
        policy.politeness_delay = std::time::Duration::from_millis(v);
    }
    if let Some(v) = &args.user_agent {
        policy.user_agent = v.clone();
    }
    if args.keep_sources {
        policy.keep_sources = true;
    }
    if args.no_robots {
        policy.respect_robots = false;
    }
    if policy.key_substrings.is_empty() || policy.max_depth < 1 {
        bail!("crawl policy needs non-empty key substrings and max depth >= 1");
    }

    let domains = read_domains(&args.domains)?;
    let fetcher = HttpFetcher::new(policy.per_request_timeout, &policy.user_agent);
    let summary = match &args.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            crawl_batch(&domains, &fetcher, &policy, args.workers, BufWriter::new(file))?
        }
        None => crawl_batch(&domains, &fetcher, &policy, args.workers, std::io::stdout())?,
    };
    eprintln!(
        "crawled {} domains: {} reachable, {} unreachable, {} with empty text",
        domains.len(),
        summary.reachable,
        summary.unreachable,
        summary.empty_text
    );
    Ok(())
}

fn read_domains(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading domain list {}", path.display()))?;
    let domains: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    if domains.is_empty() {
        bail!("domain list {} is empty", path.display());
    }
    Ok(domains)
}

fn cmd_train(args: &TrainArgs, config: &Config) -> Result<()> {
    let taxonomy = Taxonomy::new();
    let docs = load_training_corpora(&args.corpora, &taxonomy)?;
    let mut index_config = config.index_config()?;
    if let Some(rank) = args.rank {
        index_config.rank = rank;
    }
    if let Some(min_df) = args.min_df {
        index_config.min_df = min_df;
    }
    if let Some(path) = &args.stopwords {
        index_config.stopwords = load_stopwords(path)?;
    }
    if index_config.rank < 1 {
        bail!("rank must be >= 1");
    }

    let requested = index_config.rank;
    let index = build_index(&docs, &index_config)?;
    if index.rank() < requested {
        eprintln!(
            "warning: rank {requested} clamped to {} (the matrix rank)",
            index.rank()
        );
    }
    save_index(&index, &args.out)
        .with_context(|| format!("writing index {}", args.out.display()))?;

    println!(
        "indexed {} documents: vocabulary {} terms, rank {}",
        index.n_docs(),
        index.vocabulary().len(),
        index.rank()
    );
    let mut counts: BTreeMap<&CategoryCode, usize> = BTreeMap::new();
    for j in 0..index.n_docs() {
        for label in index.doc_labels(j) {
            *counts.entry(label).or_insert(0) += 1;
        }
    }
    println!("documents per category:");
    for (code, count) in counts {
        let name = taxonomy.display_name(code).unwrap_or("");
        println!("  {:<6} {:>6}  {}", code.as_str(), count, name);
    }
    Ok(())
}

fn load_training_corpora(paths: &[PathBuf], taxonomy: &Taxonomy) -> Result<Vec<TrainingDoc>> {
    let mut docs = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for path in paths {
        let records: Vec<CorpusRecord> = read_jsonl(path)
            .with_context(|| format!("reading corpus {}", path.display()))?;
        for record in records {
            if record.labels.is_empty() {
                bail!(
                    "record {:?} in {} has no labels; training corpora must be pre-classified",
                    record.doc_id,
                    path.display()
                );
            }
            if !seen.insert(record.doc_id.clone()) {
                bail!("duplicate doc_id {:?} across corpus files", record.doc_id);
            }
            let mut labels = BTreeSet::new();
            for code in &record.labels {
                let top = taxonomy
                    .generalize(code)
                    .with_context(|| format!("record {:?}", record.doc_id))?;
                labels.insert(top);
            }
            docs.push(TrainingDoc {
                id: record.doc_id,
                text: record.text,
                labels,
            });
        }
    }
    if docs.is_empty() {
        bail!("no training records found");
    }
    Ok(docs)
}

fn decision_config(
    config: &Config,
    knn_k: Option<usize>,
    threshold: Option<f64>,
    multi_label: bool,
) -> Result<DecisionConfig> {
    let mut decision = config.decision_config();
    if let Some(k) = knn_k {
        decision.k = k;
    }
    if let Some(t) = threshold {
        decision.threshold = t;
    }
    if multi_label {
        decision.multi_label = true;
    }
    if decision.k < 1 {
        bail!("knn-k must be >= 1");
    }
    if decision.threshold < 0.0 {
        bail!("threshold must be >= 0");
    }
    Ok(decision)
}

fn cmd_classify(args: &ClassifyArgs, config: &Config) -> Result<()> {
    let index = load_index(&args.index)
        .with_context(|| format!("loading index {}", args.index.display()))?;
    let decision = decision_config(config, args.knn_k, args.threshold, args.multi_label)?;

    let (records, failures) = read_jsonl_lenient::<AnyDoc>(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    for (line, err) in &failures {
        eprintln!(
            "warning: {}:{line}: skipping unparseable record: {err}",
            args.input.display()
        );
    }
    let docs: Vec<InputDoc> = records
        .iter()
        .map(|r| InputDoc {
            doc_id: r.doc_id().to_string(),
            text: r.text().to_string(),
        })
        .collect();

    let summary = match &args.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            classify_batch(&index, docs, &decision, args.workers, BufWriter::new(file))?
        }
        None => classify_batch(&index, docs, &decision, args.workers, std::io::stdout())?,
    };
    eprintln!("classified {} documents", summary.n_docs);
    for (code, count) in &summary.assignments {
        eprintln!("  {:<6} {:>6}", code.as_str(), count);
    }
    Ok(())
}

fn truth_map(
    path: &Path,
    taxonomy: &Taxonomy,
) -> Result<BTreeMap<String, BTreeSet<CategoryCode>>> {
    let records: Vec<CorpusRecord> = read_jsonl(path)
        .with_context(|| format!("reading truth corpus {}", path.display()))?;
    let mut map = BTreeMap::new();
    for record in records {
        if record.labels.is_empty() {
            bail!("truth record {:?} has no labels", record.doc_id);
        }
        let mut labels = BTreeSet::new();
        for code in &record.labels {
            labels.insert(
                taxonomy
                    .generalize(code)
                    .with_context(|| format!("truth record {:?}", record.doc_id))?,
            );
        }
        map.insert(record.doc_id, labels);
    }
    Ok(map)
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let taxonomy = Taxonomy::new();
    let style: ReportStyle = args.style.parse().map_err(|e: String| anyhow!(e))?;

    let decisions: Vec<Decision> = match &args.truth {
        Some(truth_path) => {
            let results: Vec<ResultRecord> = read_jsonl(&args.results)
                .with_context(|| format!("reading results {}", args.results.display()))?;
            let truth = truth_map(truth_path, &taxonomy)?;
            results
                .into_iter()
                .map(|r| {
                    let t = truth
                        .get(&r.doc_id)
                        .ok_or_else(|| anyhow!("no truth labels for {:?}", r.doc_id))?;
                    Ok(Decision {
                        doc_id: r.doc_id,
                        assigned: r.assigned.into_iter().collect(),
                        truth: t.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => read_jsonl(&args.results)
            .with_context(|| format!("reading decisions {}", args.results.display()))?,
    };

    let report = evaluate(&decisions, &taxonomy)?;
    print!("{}", render_report(&report, style));
    if let Some(out) = &args.out {
        let json = serde_json::to_string(&report)?;
        std::fs::write(out, json + "\n")?;
    }
    Ok(())
}

/// The three feature-source variants of the first experiment, in table
/// row order.
const ABLATION_VARIANTS: [(&str, &[SourceKind]); 3] = [
    ("Body", &[SourceKind::BodyText]),
    (
        "Body + Metatags",
        &[
            SourceKind::BodyText,
            SourceKind::MetaKeywords,
            SourceKind::MetaDescription,
        ],
    ),
    (
        "Metatags",
        &[SourceKind::MetaKeywords, SourceKind::MetaDescription],
    ),
];

/// Builds one index from the training corpora, then classifies each
/// crawled site three times (body text only, body plus metatags, and
/// metatags only) and scores each variant against the truth labels.
pub fn feature_ablation(
    train: &[PathBuf],
    crawl_log: &Path,
    truth_path: &Path,
    index_config: &IndexConfig,
    decision: &DecisionConfig,
    taxonomy: &Taxonomy,
) -> Result<Vec<(String, EvalReport)>> {
    let records: Vec<RepresentativeDoc> = read_jsonl(crawl_log)
        .with_context(|| format!("reading crawl log {}", crawl_log.display()))?;
    let sites: Vec<&RepresentativeDoc> =
        records.iter().filter(|r| r.is_reachable()).collect();
    if sites.is_empty() {
        bail!("crawl log {} has no reachable sites", crawl_log.display());
    }
    for site in &sites {
        if site.per_source.is_none() {
            bail!(
                "crawl record for {:?} has no per-source text; re-crawl with --keep-sources",
                site.domain
            );
        }
    }
    let truth = truth_map(truth_path, taxonomy)?;
    let docs = load_training_corpora(train, taxonomy)?;
    let index = build_index(&docs, index_config)?;

    let mut rows = Vec::new();
    for (label, kinds) in ABLATION_VARIANTS {
        let mut decisions = Vec::new();
        for site in &sites {
            let sources = site.per_source.as_ref().unwrap();
            let text: Vec<&str> = kinds
                .iter()
                .filter_map(|k| sources.get(k))
                .map(String::as_str)
                .collect();
            let result = classify(&index, &site.domain, &text.join(" "), decision);
            let t = truth
                .get(&site.domain)
                .ok_or_else(|| anyhow!("no truth labels for {:?}", site.domain))?;
            decisions.push(Decision {
                doc_id: site.domain.clone(),
                assigned: result.assigned.into_iter().collect(),
                truth: t.clone(),
            });
        }
        rows.push((label.to_string(), evaluate(&decisions, taxonomy)?));
    }
    Ok(rows)
}

/// Trains one index per corpus and classifies the same labeled test set
/// with each, scoring both micro and macro.
pub fn training_swap(
    corpus_a: &Path,
    corpus_b: &Path,
    test: &Path,
    index_config: &IndexConfig,
    decision: &DecisionConfig,
    taxonomy: &Taxonomy,
) -> Result<Vec<(String, EvalReport)>> {
    let test_records: Vec<CorpusRecord> = read_jsonl(test)
        .with_context(|| format!("reading test corpus {}", test.display()))?;
    if test_records.is_empty() {
        bail!("test corpus {} is empty", test.display());
    }

    let mut rows = Vec::new();
    for path in [corpus_a, corpus_b] {
        let label = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("corpus")
            .to_string();
        let docs = load_training_corpora(&[path.to_path_buf()], taxonomy)?;
        let index = build_index(&docs, index_config)?;
        let mut decisions = Vec::new();
        for record in &test_records {
            if record.labels.is_empty() {
                bail!("test record {:?} has no labels", record.doc_id);
            }
            let mut truth = BTreeSet::new();
            for code in &record.labels {
                truth.insert(
                    taxonomy
                        .generalize(code)
                        .with_context(|| format!("test record {:?}", record.doc_id))?,
                );
            }
            let result = classify(&index, &record.doc_id, &record.text, decision);
            decisions.push(Decision {
                doc_id: record.doc_id.clone(),
                assigned: result.assigned.into_iter().collect(),
                truth,
            });
        }
        rows.push((label, evaluate(&decisions, taxonomy)?));
    }
    Ok(rows)
}

fn cmd_experiment(args: &ExperimentArgs, config: &Config) -> Result<()> {
    let taxonomy = Taxonomy::new();
    let mut index_config = config.index_config()?;
    if let Some(rank) = args.rank {
        index_config.rank = rank;
    }
    if let Some(min_df) = args.min_df {
        index_config.min_df = min_df;
    }
    let decision = decision_config(config, args.knn_k, args.threshold, false)?;

    let (header, with_macro, rows) = match args.name {
        ExperimentName::FeatureAblation => {
            if args.train.is_empty() {
                bail!("feature-ablation needs --train <corpus>...");
            }
            let crawl_log = args
                .crawl_log
                .as_ref()
                .ok_or_else(|| anyhow!("feature-ablation needs --crawl-log"))?;
            let truth = args
                .truth
                .as_ref()
                .ok_or_else(|| anyhow!("feature-ablation needs --truth"))?;
            let rows = feature_ablation(
                &args.train,
                crawl_log,
                truth,
                &index_config,
                &decision,
                &taxonomy,
            )?;
            ("Sources of Text", false, rows)
        }
        ExperimentName::TrainingSwap => {
            let a = args
                .corpus_a
                .as_ref()
                .ok_or_else(|| anyhow!("training-swap needs --corpus-a"))?;
            let b = args
                .corpus_b
                .as_ref()
                .ok_or_else(|| anyhow!("training-swap needs --corpus-b"))?;
            let test = args
                .test
                .as_ref()
                .ok_or_else(|| anyhow!("training-swap needs --test"))?;
            let rows = training_swap(a, b, test, &index_config, &decision, &taxonomy)?;
            ("Classifier", true, rows)
        }
    };

    let row_refs: Vec<(&str, &EvalReport)> =
        rows.iter().map(|(l, r)| (l.as_str(), r)).collect();
    let table = render_rows(header, &row_refs, with_macro);
    print!("{table}");
    if let Some(out) = &args.out {
        let mut file = File::create(out)
            .with_context(|| format!("creating {}", out.display()))?;
        file.write_all(table.as_bytes())?;
    }
    Ok(())
}
