use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use skbench::baselines::{
    avg_embed, cosine, load_linear_model, predict, save_linear_model, sgd_train_with_classes, tfidf_fit,
    EmbeddingTable, SgdConfig, TfidfModel,
};
use skbench::corpus::{
    clean_and_segment, clean_text, dedup_to_writer, read_documents, CleanStep, DedupConfig,
    LanguageFilter, LanguageProfile, RawDocument, DEFAULT_THRESHOLD,
};
use skbench::datasets::{
    clean_tweet, dedup_labeled, mapping_violations, read_conllu, read_labeled, read_sts, ClassificationTask,
};
use skbench::harness::{self, read_reports, render_report, run_search, run_task, RunConfig, Task};
use skbench::probing::{layerwise_curve, probe_config, read_layer_dir, sts_layer_analysis};
use skbench::tokenizer::{tokenization_stats, train_bpe, TokenizerModel};
use skbench::{Error, Result};

#[derive(Parser)]
#[command(name = "skbench", version, about = "Slovak corpus preparation and benchmark evaluation")]
struct Cli {
    /// Worker threads (default: $SKBENCH_JOBS or the CPU count).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean JSON-lines documents; writes JSON-lines with cleaned text.
    Clean {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Clean and split documents into sentences, one per line.
    Segment {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Drop repeated lines, keeping first occurrences in order.
    Dedup {
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Spill shards to this directory instead of memory.
        #[arg(long)]
        shard_dir: Option<PathBuf>,
    },
    /// Run clean, segment and dedup over documents and print the counters.
    Stats {
        input: Option<PathBuf>,
        /// Also write the unique sentences here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        shard_dir: Option<PathBuf>,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Train a BPE vocabulary on a text file.
    TrainBpe {
        input: PathBuf,
        #[arg(long)]
        vocab_size: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the tokens of every input line.
    Tokenize {
        #[arg(long)]
        model: PathBuf,
        input: Option<PathBuf>,
        /// Print ids instead of token strings.
        #[arg(long)]
        ids: bool,
    },
    /// Tokenization statistics over the word forms of a CoNLL-U file
    /// (or a plain file with one word per line).
    TokenStats {
        #[arg(long)]
        model: PathBuf,
        input: PathBuf,
    },
    /// Normalize a task's source file into JSON-lines plus a stats sidecar.
    Ingest {
        task: IngestTask,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Train a classical baseline.
    TrainBaseline {
        #[arg(long)]
        task: BaselineTask,
        #[arg(long)]
        model: BaselineModel,
        /// Labelled JSON-lines (unused by stsvec).
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// JSON file with SGD settings.
        #[arg(long)]
        sgd: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Predict with a trained baseline: labels as `{"id","label"}` lines for
    /// classification, one cosine per line for STS.
    PredictBaseline {
        #[arg(long)]
        model: PathBuf,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Layer-wise probing over a directory of `.lrep` tensors.
    Probe {
        #[arg(long)]
        layers: PathBuf,
        /// CoNLL-U (pos) or STS TSV (sts).
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        task: ProbeTask,
        #[arg(long)]
        exclude_special: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Execute one benchmark run from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Random search over the SGD settings of a run config.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Render every report of a task found below a directory.
    Report {
        #[arg(long)]
        task: Task,
        dir: PathBuf,
        /// Also write the TSV form here.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct CorpusArgs {
    /// Comma-separated cleaning steps: urls,punct,markdown,braces, `all` or `none`.
    #[arg(long, default_value = "all")]
    steps: String,
    /// Character-trigram profile (JSON) for language filtering.
    #[arg(long)]
    lang_profile: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    lang_threshold: f64,
}

impl CorpusArgs {
    fn steps(&self) -> Result<Vec<CleanStep>> {
        CleanStep::parse_list(&self.steps)
    }

    fn filter(&self) -> Result<Option<LanguageFilter>> {
        if !(0.0..=1.0).contains(&self.lang_threshold) {
            return Err(Error::Config(format!("--lang-threshold {} outside [0, 1]", self.lang_threshold)));
        }
        self.lang_profile
            .as_ref()
            .map(|p| Ok(LanguageFilter { profile: LanguageProfile::load(p)?, threshold: self.lang_threshold }))
            .transpose()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IngestTask {
    Pos,
    Sts,
    Sentiment,
    Docclass,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BaselineTask {
    Sentiment,
    Docclass,
    Sts,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BaselineModel {
    Tfidf,
    Avgvec,
    Stsvec,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbeTask {
    Pos,
    Sts,
}

/// `meta.json` of a trained baseline directory.
#[derive(Serialize, Deserialize)]
struct BaselineMeta {
    task: BaselineTask,
    model: BaselineModel,
    embeddings: Option<PathBuf>,
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>> {
    Ok(match path {
        Some(p) => Box::new(BufReader::new(File::open(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn io_err(path: &Path, e: io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source: e }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = open_output(Some(path))?;
    for it in items {
        serde_json::to_writer(&mut out, it)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".stats.json");
    PathBuf::from(s)
}

fn dedup_config(jobs: usize, shard_dir: Option<PathBuf>) -> DedupConfig {
    let cfg = DedupConfig::default().with_jobs(jobs);
    match shard_dir {
        Some(d) => cfg.with_spill_dir(d),
        None => cfg,
    }
}

fn read_labeled_path(path: &Path, task: ClassificationTask) -> Result<Vec<skbench::datasets::LabeledText>> {
    Ok(read_labeled(open_input(Some(path))?, task)?.0)
}

#[derive(Deserialize)]
struct TextRecord {
    text: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let jobs = cli.jobs.filter(|&j| j > 0).unwrap_or_else(harness::jobs_from_env);
    match execute(cli.command, jobs) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command, jobs: usize) -> Result<()> {
    match command {
        Command::Clean { input, output, corpus } => {
            let docs = read_documents(open_input(input.as_deref())?)?;
            let steps = corpus.steps()?;
            let filter = corpus.filter()?;
            let mut out = open_output(output.as_deref())?;
            let mut rejected = 0;
            for doc in &docs {
                let cleaned = clean_text(&doc.full_text(), &steps);
                if let Some(f) = &filter {
                    if !f.profile.accepts(&cleaned.text, f.threshold) {
                        rejected += 1;
                        continue;
                    }
                }
                let rec = RawDocument { title: String::new(), body: cleaned.text, source_id: doc.source_id.clone() };
                serde_json::to_writer(&mut out, &rec)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
            log::info!("cleaned {} documents, rejected {rejected}", docs.len());
        }
        Command::Segment { input, output, corpus } => {
            let docs = read_documents(open_input(input.as_deref())?)?;
            let (sentences, stats) = clean_and_segment(&docs, &corpus.steps()?, corpus.filter()?.as_ref(), jobs)?;
            let mut out = open_output(output.as_deref())?;
            for s in &sentences {
                writeln!(out, "{s}")?;
            }
            out.flush()?;
            log::info!("{} sentences from {} documents", stats.sentences_total, stats.documents);
        }
        Command::Dedup { input, output, shard_dir } => {
            let lines = open_input(input.as_deref())?.lines().map(|l| l.map_err(Error::from));
            let counts = dedup_to_writer(lines, &dedup_config(jobs, shard_dir), open_output(output.as_deref())?)?;
            log::info!("{} of {} lines unique", counts.unique_count, counts.total_count);
        }
        Command::Stats { input, output, shard_dir, corpus } => {
            let docs = read_documents(open_input(input.as_deref())?)?;
            let (sentences, mut stats) = clean_and_segment(&docs, &corpus.steps()?, corpus.filter()?.as_ref(), jobs)?;
            let sink: Box<dyn Write> = match &output {
                Some(p) => open_output(Some(p))?,
                None => Box::new(io::sink()),
            };
            let counts = dedup_to_writer(sentences.into_iter().map(Ok), &dedup_config(jobs, shard_dir), sink)?;
            stats.sentences_unique = counts.unique_count;
            print_json(&stats)?;
        }
        Command::TrainBpe { input, vocab_size, output } => {
            let text = fs::read_to_string(&input).map_err(|e| io_err(&input, e))?;
            let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
            let model = train_bpe(&lines, vocab_size)?;
            fs::create_dir_all(&output).map_err(|e| io_err(&output, e))?;
            model.save(&output)?;
            log::info!("vocabulary of {} tokens, {} merges", model.vocab_size(), model.merges().len());
        }
        Command::Tokenize { model, input, ids } => {
            let model = TokenizerModel::load(&model)?;
            let mut out = open_output(None)?;
            for line in open_input(input.as_deref())?.lines() {
                let line = line?;
                let toks = model.encode(&line);
                let fields: Vec<String> = toks
                    .iter()
                    .map(|t| if ids { t.id.to_string() } else { model.token(t.id).unwrap_or_default().to_owned() })
                    .collect();
                writeln!(out, "{}", fields.join(" "))?;
            }
            out.flush()?;
        }
        Command::TokenStats { model, input } => {
            let model = TokenizerModel::load(&model)?;
            let is_conllu = input.extension().is_some_and(|e| e == "conllu");
            let forms: Vec<String> = if is_conllu {
                read_conllu(&input)?.into_iter().flat_map(|ex| ex.words).collect()
            } else {
                let text = fs::read_to_string(&input).map_err(|e| io_err(&input, e))?;
                text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_owned).collect()
            };
            print_json(&tokenization_stats(&model, &forms)?)?;
        }
        Command::Ingest { task, input, output } => ingest(task, &input, &output)?,
        Command::TrainBaseline { task, model, train, embeddings, sgd, seed, output } => {
            train_baseline(task, model, train, embeddings, sgd, seed, &output)?
        }
        Command::PredictBaseline { model, input, output } => predict_baseline(&model, &input, output.as_deref())?,
        Command::Probe { layers, labels, task, exclude_special, seed } => {
            let layers = read_layer_dir(&layers)?;
            match task {
                ProbeTask::Pos => {
                    let tags: Vec<Vec<String>> = read_conllu(&labels)?.into_iter().map(|ex| ex.upos).collect();
                    let cfg = SgdConfig { seed: seed.unwrap_or(13), ..probe_config() };
                    print_json(&layerwise_curve(&layers, &tags, &cfg)?)?;
                }
                ProbeTask::Sts => {
                    let gold: Vec<f64> = read_sts(&labels)?.iter().map(|p| p.score).collect();
                    print_json(&sts_layer_analysis(&layers, &gold, exclude_special)?)?;
                }
            }
        }
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let report = run_task(&cfg)?;
            print_json(&report)?;
        }
        Command::Search { config, trials } => {
            let cfg = RunConfig::load(&config)?;
            let outcome = run_search(&cfg, trials, jobs)?;
            let failed = outcome.trials.iter().filter(|t| t.error.is_some()).count();
            log::info!("best trial {} of {} ({failed} failed)", outcome.best_trial, outcome.trials.len());
            print_json(&serde_json::json!({
                "best_trial": outcome.best_trial,
                "best_score": outcome.best_score,
                "best": outcome.best,
            }))?;
        }
        Command::Report { task, dir, tsv } => {
            let rendered = render_report(&read_reports(&dir, task)?)?;
            print!("{}", rendered.table);
            if let Some(p) = tsv {
                fs::write(&p, rendered.tsv).map_err(|e| io_err(&p, e))?;
            }
        }
    }
    Ok(())
}

fn ingest(task: IngestTask, input: &Path, output: &Path) -> Result<()> {
    let stats = match task {
        IngestTask::Pos => {
            let examples = read_conllu(input)?;
            let violations = mapping_violations(&examples);
            for v in violations.iter().take(20) {
                log::warn!("sentence {} word {}: XPOS {} with UPOS {}", v.sentence, v.word, v.xpos, v.upos);
            }
            write_jsonl(output, &examples)?;
            serde_json::json!({
                "sentences": examples.len(),
                "words": examples.iter().map(|e| e.words.len()).sum::<usize>(),
                "mapping_violations": violations.len(),
            })
        }
        IngestTask::Sts => {
            let pairs = read_sts(input)?;
            write_jsonl(output, &pairs)?;
            serde_json::json!({ "pairs": pairs.len() })
        }
        IngestTask::Sentiment => {
            let (mut items, read) = read_labeled(open_input(Some(input))?, ClassificationTask::Sentiment)?;
            for it in &mut items {
                it.text = clean_tweet(&it.text);
            }
            let before = items.len();
            items.retain(|it| !it.text.is_empty());
            let emptied = before - items.len();
            let (kept, dedup) = dedup_labeled(&items);
            write_jsonl(output, &kept)?;
            serde_json::json!({ "read": read.read, "emptied_by_cleaning": emptied, "dedup": dedup })
        }
        IngestTask::Docclass => {
            let (items, read) = read_labeled(open_input(Some(input))?, ClassificationTask::Docclass)?;
            write_jsonl(output, &items)?;
            serde_json::json!({ "read": read.read, "excluded": read.excluded, "kept": items.len() })
        }
    };
    let side = sidecar(output);
    fs::write(&side, serde_json::to_vec_pretty(&stats)?).map_err(|e| io_err(&side, e))?;
    Ok(())
}

fn train_baseline(
    task: BaselineTask,
    model: BaselineModel,
    train: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    sgd: Option<PathBuf>,
    seed: Option<u64>,
    output: &Path,
) -> Result<()> {
    let valid = matches!(
        (task, model),
        (BaselineTask::Sts, BaselineModel::Stsvec)
            | (BaselineTask::Sentiment | BaselineTask::Docclass, BaselineModel::Tfidf | BaselineModel::Avgvec)
    );
    if !valid {
        return Err(Error::Config("stsvec serves the sts task; tfidf and avgvec serve sentiment and docclass".into()));
    }
    if model != BaselineModel::Tfidf && embeddings.is_none() {
        return Err(Error::Config("this model needs --embeddings".into()));
    }
    let mut cfg: SgdConfig = match &sgd {
        Some(p) => serde_json::from_slice(&fs::read(p).map_err(|e| io_err(p, e))?)
            .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => SgdConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    fs::create_dir_all(output).map_err(|e| io_err(output, e))?;
    let embeddings = embeddings.map(|p| fs::canonicalize(&p).map_err(|e| io_err(&p, e))).transpose()?;
    let meta = BaselineMeta { task, model, embeddings: embeddings.clone() };
    let meta_path = output.join("meta.json");
    fs::write(&meta_path, serde_json::to_vec_pretty(&meta)?).map_err(|e| io_err(&meta_path, e))?;
    if model == BaselineModel::Stsvec {
        return Ok(());
    }
    let ctask = if task == BaselineTask::Sentiment { ClassificationTask::Sentiment } else { ClassificationTask::Docclass };
    let train = train.ok_or_else(|| Error::Config("--train is required".into()))?;
    let items = read_labeled_path(&train, ctask)?;
    let classes: Vec<String> = ctask.labels().iter().map(|s| s.to_string()).collect();
    let labels: Vec<&str> = items.iter().map(|i| i.label.as_str()).collect();
    let linear = match model {
        BaselineModel::Tfidf => {
            let texts: Vec<&str> = items.iter().map(|i| i.text.as_str()).collect();
            let tfidf = tfidf_fit(&texts, (1, 2), 2)?;
            let rows: Vec<_> = texts.iter().map(|t| tfidf.transform(t)).collect();
            tfidf.save(&output.join("tfidf.json"))?;
            sgd_train_with_classes(&rows, &labels, &classes, tfidf.dim(), &cfg)?
        }
        _ => {
            let table = EmbeddingTable::load(embeddings.as_ref().expect("checked above"))?;
            let rows: Vec<Vec<f64>> = items.iter().map(|i| avg_embed(&i.text, &table)).collect();
            sgd_train_with_classes(&rows, &labels, &classes, table.dim(), &cfg)?
        }
    };
    save_linear_model(&linear, &output.join("model.slbm"))?;
    log::info!("trained on {} examples", items.len());
    Ok(())
}

fn predict_baseline(dir: &Path, input: &Path, output: Option<&Path>) -> Result<()> {
    let meta_path = dir.join("meta.json");
    let meta: BaselineMeta = serde_json::from_slice(&fs::read(&meta_path).map_err(|e| io_err(&meta_path, e))?)?;
    let mut out = open_output(output)?;
    let table = meta.embeddings.as_ref().map(|p| EmbeddingTable::load(p)).transpose()?;
    if meta.model == BaselineModel::Stsvec {
        let table = table.ok_or_else(|| Error::Config("stsvec model without embeddings".into()))?;
        for p in read_sts(input)? {
            writeln!(out, "{}", cosine(&avg_embed(&p.sentence_a, &table), &avg_embed(&p.sentence_b, &table))?)?;
        }
        out.flush()?;
        return Ok(());
    }
    let linear = load_linear_model(&dir.join("model.slbm"))?;
    let tfidf = match meta.model {
        BaselineModel::Tfidf => Some(TfidfModel::load(&dir.join("tfidf.json"))?),
        _ => None,
    };
    let mut id = 0usize;
    for (i, line) in open_input(Some(input))?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TextRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: Some(i + 1),
            message: format!("expected a JSON object with `text`: {e}"),
        })?;
        let label = match (&tfidf, &table) {
            (Some(m), _) => predict(&linear, &m.transform(&rec.text))?.label,
            (None, Some(t)) => predict(&linear, &avg_embed(&rec.text, t))?.label,
            (None, None) => return Err(Error::Config("model directory lacks features".into())),
        };
        serde_json::to_writer(&mut out, &serde_json::json!({ "id": id, "label": label }))?;
        id += 1;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
